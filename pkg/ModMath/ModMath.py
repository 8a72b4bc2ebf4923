import logging
import math
import random

from Models.ABParams import ABParams
from Models.CoalitionContext import CoalitionContext
from Models.OpCounter import OpCounter
from ModMath.Errors import NotInvertible, WrongCoalitionSize, DuplicateIndex, IndexMismatch

logger = logging.getLogger(__name__)

MILLER_RABIN_ROUNDS = 64

# Deterministic Miller-Rabin witness set, exact for every n < 3.3 * 10^24
_SMALL_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = [p for p in range(3, 1000, 2) if all(p % d for d in range(3, int(p ** 0.5) + 1, 2))]
SMALL_PRIMORIAL = math.prod(_SMALL_PRIMES)


def to_hex(value: int) -> str:
    return format(value, "x")


def from_hex(text: str) -> int:
    return int(text, 16)


def mod_inverse(a: int, m: int) -> int:
    if m < 2:
        raise NotInvertible(f"modulus {m} < 2")
    try:
        return pow(a, -1, m)
    except ValueError:
        raise NotInvertible(f"{a} has no inverse mod {m} (gcd {math.gcd(a, m)})") from None


def _miller_rabin(n: int, witnesses) -> bool:
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1

    for a in witnesses:
        a %= n
        if a in (0, 1, n - 1):
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_probable_prime(x: int, rounds: int = MILLER_RABIN_ROUNDS) -> bool:
    """
    Miller-Rabin primality test.

    Inputs below 2^64 use a fixed witness set and the answer is exact. Larger
    inputs use `rounds` witnesses drawn from a generator seeded with x itself,
    so the answer is a pure function of (x, rounds).

    Args:
        x: Candidate, x >= 0
        rounds: Number of random witnesses for large inputs

    Returns:
        True for primes; composites pass with probability at most 4^-rounds
    """
    if x < 2:
        return False
    if x in (2, 3):
        return True
    if x % 2 == 0:
        return False
    for p in _SMALL_PRIMES:
        if x == p:
            return True
        if x % p == 0:
            return False

    if x < 1 << 64:
        return _miller_rabin(x, _SMALL_WITNESSES)

    witness_rng = random.Random(x)
    return _miller_rabin(x, (witness_rng.randrange(2, x - 1) for _ in range(rounds)))


def build_coalition(moduli_by_index: dict[int, int], counter: OpCounter | None = None) -> CoalitionContext:
    """CRT basis for an arbitrary set of pairwise coprime moduli."""
    indices = sorted(moduli_by_index)
    moduli = [moduli_by_index[i] for i in indices]

    m_c = moduli[0]
    for m in moduli[1:]:
        m_c *= m
    if counter is not None:
        counter.tally(len(moduli) - 1)

    lambdas: dict[int, int] = {}
    for i, m in zip(indices, moduli):
        rest = m_c // m
        lambdas[i] = mod_inverse(rest % m, m) * rest
        if counter is not None:
            counter.tally()

    return CoalitionContext(indices=indices, moduli=dict(zip(indices, moduli)), m_c=m_c, lambdas=lambdas)


def coalition_context(params: ABParams, indices, counter: OpCounter | None = None) -> CoalitionContext:
    chosen = list(indices)
    if len(set(chosen)) != len(chosen):
        raise DuplicateIndex(f"duplicate index in coalition {chosen}")
    if len(chosen) != params.t:
        raise WrongCoalitionSize(f"coalition has {len(chosen)} members, threshold is {params.t}")
    for i in chosen:
        if not 1 <= i <= params.n:
            raise IndexMismatch(f"index {i} outside 1..{params.n}")

    return build_coalition({i: params.modulus(i) for i in chosen}, counter)


def crt_reconstruct(residues: list[tuple[int, int]], ctx: CoalitionContext, counter: OpCounter | None = None) -> int:
    """
    Recombines residues with the coalition's CRT basis.

    Args:
        residues: (value, modulus) pairs in the order of ctx.indices
        ctx: Coalition the residues belong to

    Returns:
        The unique y in [0, M_C) with y = value (mod modulus) for every pair
    """
    if len(residues) != ctx.size:
        raise IndexMismatch(f"{len(residues)} residues for a coalition of {ctx.size}")

    y = 0
    for (value, modulus), i in zip(residues, ctx.indices):
        if modulus != ctx.moduli[i]:
            raise IndexMismatch(f"residue modulus {modulus} does not belong to index {i}")
        if not 0 <= value < modulus:
            raise IndexMismatch(f"residue {value} outside [0, {modulus}) at index {i}")
        y += value * ctx.lambdas[i]

    if counter is not None:
        counter.tally(ctx.size)

    return y % ctx.m_c
