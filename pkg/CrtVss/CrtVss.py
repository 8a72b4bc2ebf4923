import logging
import random

from Models.ABParams import ABParams
from Models.CoalitionContext import CoalitionContext
from Models.OpCounter import OpCounter
from Models.Share import Share, Commitment, MaskedSecret, Dealing
from Models.SplitMode import SplitMode
from CrtVss.Errors import SecretOutOfRange, ValueExceedsCapacity, BadVerificationPrime, BadGenerator
from ModMath.Errors import IndexMismatch, WrongCoalitionSize
from ModMath.ModMath import is_probable_prime, crt_reconstruct

logger = logging.getLogger(__name__)


def gen_commitment(share: Share, p: int, rng: random.Random, generator: int | None = None) -> Commitment:
    """
    Public verification triple for one share.

    The generator is a square mod p = 2m + 1, hence lies in the subgroup of
    prime order m, and distinct residues of the share give distinct z.

    Args:
        share: Share to commit to
        p: Verification prime, must equal 2 * share.modulus + 1
        rng: Source for the generator
        generator: Fixed generator instead of a random square (fixtures)

    Returns:
        Commitment (index, p, g, z) with z = g^value mod p
    """
    m = share.modulus
    if p != 2 * m + 1 or not is_probable_prime(p):
        raise BadVerificationPrime(f"{p} is not a prime of the form 2*{m}+1")

    if generator is not None:
        if not 1 < generator < p or pow(generator, m, p) != 1:
            raise BadGenerator(f"{generator} does not generate the order-{m} subgroup mod {p}")
        g = generator
    else:
        g = 1
        while g == 1:
            h = rng.randint(2, p - 1)
            g = h * h % p

    return Commitment(index=share.index, p=p, g=g, z=pow(g, share.value, p))


def verify_share(share: Share, commitment: Commitment) -> bool:
    if share.index != commitment.index:
        raise IndexMismatch(f"share {share.index} checked against commitment {commitment.index}")
    return pow(commitment.g, share.value, commitment.p) == commitment.z


def _deal(value: int, params: ABParams, rng: random.Random, mode: SplitMode, bound: int) -> Dealing:
    shares = [Share(index=i, value=value % params.modulus(i), modulus=params.modulus(i)) for i in params.indices]
    commitments = [gen_commitment(share, params.verif_prime(share.index), rng) for share in shares]
    return Dealing(params=params, shares=tuple(shares), commitments=tuple(commitments), mode=mode, bound=bound)


def mask_limit(secret: int, params: ABParams, max_lifted: int | None = None) -> int:
    """Largest admissible mask A, so that secret + A*m0 stays below the lifted limit."""
    limit = params.capacity if max_lifted is None else min(max_lifted, params.capacity)
    return (limit - 1 - secret) // params.m0


def split_masked(secret: int, params: ABParams, rng: random.Random, mask: int | None = None,
                 max_lifted: int | None = None) -> tuple[Dealing, MaskedSecret]:
    if not 0 <= secret < params.m0:
        raise SecretOutOfRange(f"secret must lie in [0, {params.m0})")

    upper = mask_limit(secret, params, max_lifted)
    if upper < 1:
        raise ValueExceedsCapacity("capacity leaves no room for a mask")

    if mask is None:
        mask = rng.randint(1, upper)
    elif not 1 <= mask <= upper:
        # a trusted dealer never emits y >= M
        raise ValueExceedsCapacity(f"mask {mask} outside [1, {upper}] would lift the secret past capacity")

    lifted = secret + mask * params.m0
    dealing = _deal(lifted, params, rng, SplitMode.MASKED, bound=params.capacity)
    logger.debug(f"Dealt masked secret over {params.n} moduli")
    return dealing, MaskedSecret(secret=secret, mask=mask, lifted=lifted)


def split_direct(x: int, params: ABParams, rng: random.Random, bound: int | None = None) -> Dealing:
    if not 0 <= x < params.capacity:
        raise ValueExceedsCapacity(f"value does not fit below capacity {params.capacity}")
    declared = x + 1 if bound is None else bound
    if declared <= x or declared > params.capacity:
        raise ValueExceedsCapacity(f"declared bound {declared} does not cover the value or exceeds capacity")
    return _deal(x, params, rng, SplitMode.DIRECT, bound=declared)


def _aligned(shares: list[Share], ctx: CoalitionContext) -> list[Share]:
    if len(shares) != ctx.size:
        raise WrongCoalitionSize(f"{len(shares)} shares for a coalition of {ctx.size}")
    by_index = {share.index: share for share in shares}
    if sorted(by_index) != ctx.indices:
        raise IndexMismatch(f"share indices {sorted(by_index)} do not match coalition {ctx.indices}")
    return [by_index[i] for i in ctx.indices]


def reconstruct(shares: list[Share], ctx: CoalitionContext, m0: int, mode: SplitMode,
                counter: OpCounter | None = None) -> tuple[int, int]:
    ordered = _aligned(shares, ctx)
    y = crt_reconstruct([(share.value, share.modulus) for share in ordered], ctx, counter)
    return y, (y % m0 if mode == SplitMode.MASKED else y)


def consistent_secrets(known: list[Share], params: ABParams, secret_hint: int = 0) -> set[int]:
    """
    Secrets an observer holding `known` cannot rule out.

    Enumerates every admissible lifted value S' + A*m0 (A in the mask range of
    `secret_hint`, the range the dealer actually drew from) and keeps the S'
    whose lifted value matches all known residues.
    """
    upper = mask_limit(secret_hint, params)
    candidates = set()
    for candidate in range(params.m0):
        for mask in range(1, upper + 1):
            lifted = candidate + mask * params.m0
            if all(lifted % share.modulus == share.value for share in known):
                candidates.add(candidate)
                break
    return candidates
