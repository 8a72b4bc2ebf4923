import logging
import random
from itertools import combinations

from Models.PhaseMessages import Request
from Models.ScenarioConfig import ScenarioConfig
from Models.Share import Commitment
from Models.Signing import MemberShares, SigningKeyMaterial, SigningSession
from Models.Transcript import Transcript, Verdict
from Curve.Dss import dss_verify, message_digest
from ModMath.ModMath import coalition_context, to_hex
from NetSim.Scenarios.Distribution import participant, REQUESTOR
from NetSim.Scenarios.Reconstruction import ReconstructionRun
from NetSim.Simulator import Envelope
from NetSim.Terms import Atom, ident, label, tuple_term
from Storage.ConfigFiles import load_curve
from Storage.FileFormats import commitment_from_dict, commitment_to_dict
from ThresholdDss.Errors import (InsufficientTrustedNodes, MissingShares, NonInvertibleKA, NoValidCandidate,
                                 ResampleNonce, ShareVerificationFailed)
from ThresholdDss.KeySetup import plan_signing_params, create_signing_key
from ThresholdDss.ThresholdDss import (MAX_SIGNING_ATTEMPTS, accumulate, assemble_and_select, check_sizing,
                                       combine_round1, nonce_contribution, round1, round2)

logger = logging.getLogger(__name__)

# (t, n, m0, nonce bound) per curve
SIZING_PRESETS = {
    "toy-f17": (2, 3, 7, 64),
    "secp256k1": (2, 3, 7, 1 << 16),
}


def signing_sizing(config: ScenarioConfig) -> tuple[int, int, int, int]:
    t, n, m0, bound = SIZING_PRESETS.get(config.curve, SIZING_PRESETS["toy-f17"])
    return config.t or t, config.n or n, config.m0 or m0, config.bound or bound


class SigningRun(ReconstructionRun):
    """
    The three phases of a threshold signature on the simulated network:
    the dealer distributes the signing key, the requestor admits an attested
    coalition, and the coalition signs with jointly generated nonces.
    """

    def __init__(self, config: ScenarioConfig):
        self.curve = load_curve(config.curve)
        self.t, self.n, self.m0, self.bound = signing_sizing(config)
        params = plan_signing_params(self.t, self.n, self.m0, self.curve, self.bound, random.Random(config.seed))
        super().__init__(config, params)
        self.key: SigningKeyMaterial | None = None

    def _key_dealing(self):
        self.key = create_signing_key(self.secret, self.params, self.curve, self.bound, self.world.rng)
        return self.key.dealing, self.key.masked

    def distribute_key(self) -> bool:
        return self.run(self._key_dealing, receivers=(REQUESTOR,))

    def _wire_commitment(self, receiver: str, envelope: Envelope) -> Commitment | None:
        try:
            return commitment_from_dict(envelope.body.commitments[0])
        except (IndexError, KeyError, ValueError) as e:
            self.sim.note("fail", receiver, f"unreadable commitment on a nonce sub-share: {e}", envelope.sender)
            return None

    def _exchange_nonces(self, indices: list[int]) -> dict[int, MemberShares]:
        contributions = {j: nonce_contribution(self.key, self.bound, self.world.rng) for j in indices}
        for j, dealings in contributions.items():
            for i in indices:
                if i == j:
                    continue
                for part, dealing in zip("ka", dealings):
                    self.send_sealed(participant(j), participant(i), dealing.share(i), f"nonce-share:{part}{j}>{i}",
                                     kind=f"nonce-share-{part}",
                                     commitments=[commitment_to_dict(dealing.commitment(i))])
        self.sim.run()

        members = {}
        for i in indices:
            p = participant(i)
            received = {}
            for position, part in enumerate("ka"):
                own = contributions[i][position]
                shares = {i: (own.share(i), own.commitment(i))}
                for envelope in self.sim.collect(p, f"nonce-share-{part}"):
                    j = self.index_of[envelope.sender]
                    shares[j] = (self.open_sealed(p, envelope), self._wire_commitment(p, envelope))
                try:
                    received[part] = accumulate(i, shares)
                except ShareVerificationFailed as e:
                    self.sim.note("fail", p, str(e), participant(e.dealer))
                    raise
                except MissingShares as e:
                    self.sim.note("fail", p, str(e))
                    raise
            members[i] = MemberShares(index=i, d_share=self.accepted[i], k_share=received["k"], a_share=received["a"])
        return members

    def _attempt(self, session: SigningSession, indices: list[int], tamper_index: int | None):
        members = self._exchange_nonces(indices)

        for i, member in members.items():
            message = round1(member, session)
            term = tuple_term(ident(participant(i)), Atom("int", f"v:{i}"), Atom("point", f"w:{i}"))
            self.sim.send(Envelope(participant(i), REQUESTOR, "round1", term, message))
        self.sim.run()
        candidates = combine_round1([e.body for e in self.sim.collect(REQUESTOR, "round1")], session)

        for i in indices:
            self.sim.send(Envelope(REQUESTOR, participant(i), "candidates", tuple_term(ident(REQUESTOR), label("r")),
                                   {"candidates": [to_hex(r) for r in candidates]}))
        self.sim.run()

        for i, member in members.items():
            p = participant(i)
            self.sim.collect(p, "candidates")
            message = round2(member, candidates, session.digest, session)
            if i == tamper_index:
                self.world.nodes[p].tpm.compromised = True
                self.sim.note("state", p, "compromised after attestation, corrupts its signature share")
                modulus = member.k_share.modulus
                message.sig_candidates = [(value + 1) % modulus for value in message.sig_candidates]
            self.sim.send(Envelope(p, REQUESTOR, "round2", tuple_term(ident(p), Atom("int", f"sig:{i}")), message))
        self.sim.run()

        return assemble_and_select([e.body for e in self.sim.collect(REQUESTOR, "round2")], candidates,
                                   self.key.public_key, session.digest, session)

    def sign(self, message: bytes, tamper: bool = False) -> SigningSession:
        indices = self.choose(self.params.n)
        if indices is None:
            raise InsufficientTrustedNodes("no attested coalition for signing")
        coalition = coalition_context(self.params, indices)
        for a, b in combinations([participant(i) for i in indices], 2):
            if self.world.session_key(a, b) is None:
                self.world.handshake(a, b)

        m = message_digest(message, self.curve.q, self.config.hash_name)
        for i in indices:
            self.sim.send(Envelope(REQUESTOR, participant(i), "request",
                                   tuple_term(ident(REQUESTOR), ident(participant(i)), label("SIGN")),
                                   Request(sender=REQUESTOR, receiver=participant(i), purpose="sign", digest=to_hex(m))))
        self.sim.run()
        for i in indices:
            self.sim.collect(participant(i), "request")

        check_sizing(coalition, self.key, self.curve, self.bound)
        session = SigningSession(coalition=coalition, curve=self.curve, digest=m, bound=self.bound)
        for attempt in range(1, MAX_SIGNING_ATTEMPTS + 1):
            session.attempts = attempt
            try:
                self._attempt(session, indices, indices[0] if tamper else None)
            except (NonInvertibleKA, ResampleNonce) as e:
                self.sim.note("note", REQUESTOR, f"attempt {attempt}: {e}, new nonces")
                continue
            return session
        raise NoValidCandidate(f"no usable nonce within {MAX_SIGNING_ATTEMPTS} attempts")


def run_signing(config: ScenarioConfig, tamper: bool = False) -> tuple[Transcript, SigningSession | None, SigningRun]:
    run = SigningRun(config)
    if not run.distribute_key():
        return run.sim.verdict(Verdict.FAULT_DETECTED, "key distribution did not complete"), None, run

    try:
        session = run.sign(config.message.encode(), tamper)
    except NoValidCandidate as e:
        return run.sim.verdict(Verdict.FAULT_DETECTED, str(e)), None, run
    except (ShareVerificationFailed, MissingShares) as e:
        return run.sim.verdict(Verdict.FAULT_DETECTED, f"nonce generation stopped: {e}"), None, run
    except InsufficientTrustedNodes as e:
        return run.sim.verdict(Verdict.RECONSTRUCTION_IMPOSSIBLE, str(e)), None, run

    if not dss_verify(run.key.public_key, session.digest, session.signature, run.curve):
        return run.sim.verdict(Verdict.FAULT_DETECTED, "assembled signature does not verify"), session, run
    signature = session.signature
    verdict = Verdict.ATTACK_SUCCEEDED if tamper else Verdict.PASS
    return run.sim.verdict(verdict, f"r={to_hex(signature.r)} s={to_hex(signature.s)} kappa={session.kappa}"), session, run


def sign_honest(config: ScenarioConfig) -> Transcript:
    return run_signing(config)[0]


def sign_tamper_sig_share(config: ScenarioConfig) -> Transcript:
    return run_signing(config, tamper=True)[0]
