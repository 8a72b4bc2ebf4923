import logging
import random
from typing import Callable

from Models.CoalitionContext import CoalitionContext
from Models.CurvePoint import CurveParams, DssSignature
from Models.Share import Share, Commitment, Dealing
from Models.Signing import SigningKeyMaterial, MemberShares, Round1Msg, Round2Msg, SigningSession
from CrtVss.CrtVss import split_direct, verify_share
from Curve.Curve import scalar_mul, add_unchecked, point_neg, O
from Curve.Dss import dss_verify, message_digest
from ModMath.ModMath import crt_reconstruct
from ThresholdDss.Errors import (BoundTooLarge, MissingShares, NonInvertibleKA, NoValidCandidate, ResampleNonce,
                                 ShareVerificationFailed)

logger = logging.getLogger(__name__)

MAX_SIGNING_ATTEMPTS = 16


def check_sizing(coalition: CoalitionContext, key: SigningKeyMaterial, curve: CurveParams, bound: int):
    spread = coalition.size * bound
    if spread * spread >= coalition.m_c:
        raise BoundTooLarge(f"(t*B)^2 = {spread * spread} does not fit below M_C")
    if spread * curve.q * (1 + key.d) >= coalition.m_c:
        raise BoundTooLarge("t*B*q*(1 + d) does not fit below M_C")


def nonce_contribution(key: SigningKeyMaterial, bound: int, rng: random.Random, rho: int | None = None,
                       sigma: int | None = None) -> tuple[Dealing, Dealing]:
    """One member's pair of direct dealings for its parts of k and a."""
    rho = rng.randrange(1, bound) if rho is None else rho
    sigma = rng.randrange(1, bound) if sigma is None else sigma
    return (split_direct(rho, key.params, rng, bound=bound),
            split_direct(sigma, key.params, rng, bound=bound))


def accumulate(index: int, received: dict[int, tuple[Share | None, Commitment | None]]) -> Share:
    """
    Checks every received sub-share against the commitment that came with it
    and sums them pointwise. A sub-share or commitment that never arrived, or
    did not open, is missing.
    """
    total = 0
    modulus = None
    for dealer, (share, commitment) in sorted(received.items()):
        if share is None or commitment is None:
            raise MissingShares(f"member {index} has no readable sub-share from member {dealer}")
        if share.index != index or commitment.index != index or not verify_share(share, commitment):
            raise ShareVerificationFailed(index, dealer)
        total += share.value
        modulus = share.modulus
    if modulus is None:
        raise MissingShares(f"member {index} received no sub-shares")
    return Share(index=index, value=total % modulus, modulus=modulus)


def joint_nonce_gen(coalition: CoalitionContext, key: SigningKeyMaterial, curve: CurveParams, bound: int,
                    rng: random.Random, forced_rho: list[int] | None = None,
                    forced_sigma: list[int] | None = None) -> tuple[dict[int, Share], dict[int, Share]]:
    """
    Dealer-free generation of shares of k = sum(rho_j) and a = sum(sigma_j).

    Every coalition member deals its own rho_j, sigma_j in [1, B); nobody ever
    holds k or a.
    """
    check_sizing(coalition, key, curve, bound)

    contributions = {}
    for position, j in enumerate(coalition.indices):
        rho = forced_rho[position] if forced_rho else None
        sigma = forced_sigma[position] if forced_sigma else None
        contributions[j] = nonce_contribution(key, bound, rng, rho, sigma)

    k_shares, a_shares = {}, {}
    for i in coalition.indices:
        k_shares[i] = accumulate(i, {j: (rho.share(i), rho.commitment(i))
                                     for j, (rho, _) in contributions.items()})
        a_shares[i] = accumulate(i, {j: (sigma.share(i), sigma.commitment(i))
                                     for j, (_, sigma) in contributions.items()})
    return k_shares, a_shares


def _bundle(member: MemberShares) -> tuple[Share, Share]:
    if member.k_share is None or member.a_share is None:
        raise MissingShares(f"member {member.index} holds no nonce shares")
    return member.k_share, member.a_share


def round1(member: MemberShares, session: SigningSession) -> Round1Msg:
    k_share, a_share = _bundle(member)
    coalition = session.coalition
    v = k_share.value * a_share.value % k_share.modulus
    weighted = coalition.lambdas[member.index] * a_share.value % coalition.m_c
    return Round1Msg(index=member.index, v=v, w=scalar_mul(weighted, session.curve.generator, session.curve))


def _by_index(messages, coalition: CoalitionContext) -> list:
    by_index = {message.index: message for message in messages}
    if sorted(by_index) != coalition.indices:
        raise MissingShares(f"messages from {sorted(by_index)}, coalition is {coalition.indices}")
    return [by_index[i] for i in coalition.indices]


def combine_round1(messages: list[Round1Msg], session: SigningSession) -> list[int]:
    """
    Candidate r values for every wrap count kappa in [0, t).

    The v_i recombine to the exact integer k*a. The points sum to
    (a + kappa*M_C)G for an unknown kappa < t, since each weighted term was
    reduced below M_C before entering the exponent.
    """
    coalition, curve = session.coalition, session.curve
    ordered = _by_index(messages, coalition)

    ka = crt_reconstruct([(msg.v, coalition.moduli[msg.index]) for msg in ordered], coalition)
    if ka % curve.q == 0:
        raise NonInvertibleKA("k*a is a multiple of q")
    ka_inverse = pow(ka, -1, curve.q)

    total = O
    for msg in ordered:
        total = add_unchecked(total, msg.w, curve)
    wrap_step = point_neg(scalar_mul(coalition.m_c, curve.generator, curve), curve)

    candidates = []
    shifted = total
    for _ in range(coalition.size):
        point = scalar_mul(ka_inverse, shifted, curve)
        candidates.append(0 if point.is_identity else point.x % curve.q)
        shifted = add_unchecked(shifted, wrap_step, curve)

    session.round1 = ordered
    session.candidates = candidates
    return candidates


def round2(member: MemberShares, candidates: list[int], m: int, session: SigningSession) -> Round2Msg:
    k_share, _ = _bundle(member)
    modulus = k_share.modulus
    d = member.d_share.value
    return Round2Msg(index=member.index,
                     sig_candidates=[k_share.value * (m + r * d) % modulus for r in candidates])


def assemble_and_select(messages: list[Round2Msg], candidates: list[int], public_key, m: int,
                        session: SigningSession) -> tuple[DssSignature, int]:
    coalition, curve = session.coalition, session.curve
    ordered = _by_index(messages, coalition)

    degenerate = False
    for kappa, r in enumerate(candidates):
        residues = [(msg.sig_candidates[kappa], coalition.moduli[msg.index]) for msg in ordered]
        s = crt_reconstruct(residues, coalition) % curve.q
        if r == 0 or s == 0:
            degenerate = True
            continue
        signature = DssSignature(r=r, s=s)
        if dss_verify(public_key, m, signature, curve):
            session.round2 = ordered
            session.signature = signature
            session.kappa = kappa
            return signature, kappa

    if degenerate:
        raise ResampleNonce("a candidate had r = 0 or s = 0")
    raise NoValidCandidate("no candidate signature verifies, a share was corrupted")


class ThresholdSigner:
    """
    In-process orchestrator for one coalition: nonce generation, both rounds,
    selection. Retries with fresh nonces when the nonce turned out degenerate.
    """
    logger = logging.getLogger(__package__)

    def __init__(self, key: SigningKeyMaterial, curve: CurveParams, bound: int, rng: random.Random,
                 hash_name: str = "sha1", max_attempts: int = MAX_SIGNING_ATTEMPTS):
        self.key = key
        self.curve = curve
        self.bound = bound
        self.rng = rng
        self.hash_name = hash_name
        self.max_attempts = max_attempts
        self.members: dict[int, MemberShares] = {}

    def digest(self, message: bytes) -> int:
        return message_digest(message, self.curve.q, self.hash_name)

    def sign(self, message: bytes, coalition: CoalitionContext,
             round1_filter: Callable[[list[Round1Msg]], list[Round1Msg]] | None = None,
             round2_filter: Callable[[list[Round2Msg]], list[Round2Msg]] | None = None) -> SigningSession:
        m = self.digest(message)
        session = SigningSession(coalition=coalition, curve=self.curve, digest=m, bound=self.bound)

        for attempt in range(1, self.max_attempts + 1):
            session.attempts = attempt
            k_shares, a_shares = joint_nonce_gen(coalition, self.key, self.curve, self.bound, self.rng)
            self.members = {
                i: MemberShares(index=i, d_share=self.key.dealing.share(i), k_share=k_shares[i], a_share=a_shares[i])
                for i in coalition.indices
            }

            try:
                first = [round1(member, session) for member in self.members.values()]
                if round1_filter is not None:
                    first = round1_filter(first)
                candidates = combine_round1(first, session)

                second = [round2(member, candidates, m, session) for member in self.members.values()]
                if round2_filter is not None:
                    second = round2_filter(second)
                signature, kappa = assemble_and_select(second, candidates, self.key.public_key, m, session)
            except (NonInvertibleKA, ResampleNonce) as e:
                self.logger.debug(f"Attempt {attempt}: {e}, resampling nonces")
                continue

            self.logger.info(f"Coalition {coalition.indices} signed with kappa={kappa} after {attempt} attempt(s)")
            return session

        raise NoValidCandidate(f"no usable nonce within {self.max_attempts} attempts")
