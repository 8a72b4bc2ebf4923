import logging
import math
import random

import sympy

from Models.ABParams import ABParams
from ModMath.Errors import InvalidParams, SearchExhausted
from ModMath.ModMath import is_probable_prime, SMALL_PRIMORIAL

logger = logging.getLogger(__name__)

MAX_CANDIDATE_SETS = 10_000

# Below this bit length Sophie Germain primes are counted instead of sampled blindly
_ENUMERATION_BITS = 20


def _is_sophie_germain(m: int) -> bool:
    # cheap sieve on both m and 2m+1 before Miller-Rabin
    if m > 1000 and (math.gcd(m, SMALL_PRIMORIAL) != 1 or math.gcd(2 * m + 1, SMALL_PRIMORIAL) != 1):
        return False
    return is_probable_prime(m) and is_probable_prime(2 * m + 1)


def random_sophie_germain(bits: int, rng: random.Random, max_draws: int | None = None) -> int:
    """Draws an odd `bits`-bit prime m with 2m+1 prime."""
    if bits < 3:
        raise InvalidParams(f"no Sophie Germain prime search below 3 bits (got {bits})")
    budget = max_draws or 50 * bits * bits + 1000
    for _ in range(budget):
        candidate = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if _is_sophie_germain(candidate):
            return candidate
    raise SearchExhausted(f"no {bits}-bit Sophie Germain prime within {budget} draws")


def find_safe_prime(bits: int, rng: random.Random) -> tuple[int, int]:
    """Returns (q, p) with p = 2q + 1 a `bits`-bit safe prime."""
    q = random_sophie_germain(bits - 1, rng)
    return q, 2 * q + 1


def next_prime(start: int) -> int:
    candidate = max(start, 2)
    while not is_probable_prime(candidate):
        candidate += 1
    return candidate


def common_bit_length(t: int, m0: int, min_capacity_bits: int, headroom_bits: int = 0) -> int:
    """
    Bit length shared by all moduli.

    With every modulus in [2^(l-1), 2^l) the product of the t smallest exceeds
    2^(t(l-1)) while m0^2 times the t-1 largest stays below
    2^(2 bits(m0) + headroom + l(t-1)), so the Asmuth-Bloom inequality (with
    `headroom_bits` to spare) holds for any draw once l >= 2 bits(m0) + headroom + t + 1.
    """
    return max(math.ceil(min_capacity_bits / t) + 1, 2 * m0.bit_length() + headroom_bits + t + 1)


def asmuth_bloom_holds(moduli: list[int], m0: int, t: int) -> bool:
    smallest = math.prod(moduli[:t])
    largest = math.prod(moduli[len(moduli) - t + 1:]) if t > 1 else 1
    return smallest > m0 * m0 * largest


def gen_ab_params(t: int, n: int, m0: int, min_capacity_bits: int, rng: random.Random,
                  headroom_bits: int = 0, max_attempts: int = MAX_CANDIDATE_SETS) -> ABParams:
    if not 2 <= t <= n:
        raise InvalidParams(f"threshold must satisfy 2 <= t <= n (got t={t}, n={n})")
    if not is_probable_prime(m0):
        raise InvalidParams(f"m0 = {m0} is not prime")

    bits = common_bit_length(t, m0, min_capacity_bits, headroom_bits)
    logger.debug(f"Searching {n} Sophie Germain moduli of {bits} bits (t={t}, m0={m0})")

    if bits <= _ENUMERATION_BITS:
        available = sum(1 for m in range((1 << (bits - 1)) | 1, 1 << bits, 2) if _is_sophie_germain(m))
        if available - (1 if m0.bit_length() == bits else 0) < n:
            raise SearchExhausted(f"only {available} Sophie Germain primes of {bits} bits, need {n}")

    for attempt in range(max_attempts):
        chosen: set[int] = set()
        while len(chosen) < n:
            m = random_sophie_germain(bits, rng)
            if m != m0:
                chosen.add(m)

        moduli = sorted(chosen)
        capacity = math.prod(moduli[:t])
        if capacity.bit_length() < min_capacity_bits or not asmuth_bloom_holds(moduli, m0, t):
            logger.debug(f"Candidate set {attempt} rejected")
            continue

        params = ABParams(
            m0=m0,
            moduli=moduli,
            verif_primes=[2 * m + 1 for m in moduli],
            t=t,
            n=n,
            capacity=capacity,
        )
        logger.info(f"Generated ({t}, {n}) parameters with {capacity.bit_length()}-bit capacity")
        return params

    raise SearchExhausted(f"no valid parameter set within {max_attempts} candidate sets")


def validate_ab_params(params: ABParams) -> list[str]:
    """
    Independent re-check of every ABParams invariant.

    Primality goes through sympy rather than this package's Miller-Rabin so the
    generator and its checker do not share a primality routine.

    Returns:
        Human readable problems, empty when the parameters are valid
    """
    problems: list[str] = []
    moduli = params.moduli

    if not 2 <= params.t <= params.n:
        problems.append(f"threshold t={params.t} not in [2, n={params.n}]")
    if len(moduli) != params.n or len(params.verif_primes) != params.n:
        problems.append(f"expected {params.n} moduli and verification primes")
        return problems
    if not sympy.isprime(params.m0):
        problems.append(f"m0 = {params.m0} is not prime")

    if any(a >= b for a, b in zip(moduli, moduli[1:])):
        problems.append("moduli are not strictly increasing")

    for i, (m, p) in enumerate(zip(moduli, params.verif_primes), start=1):
        if not sympy.isprime(m):
            problems.append(f"m{i} = {m} is not prime")
        if p != 2 * m + 1:
            problems.append(f"p{i} = {p} is not 2*m{i} + 1")
        elif not sympy.isprime(p):
            problems.append(f"p{i} = {p} is not prime")
        if math.gcd(m, params.m0) != 1:
            problems.append(f"m{i} shares a factor with m0")

    for i, a in enumerate(moduli):
        for b in moduli[i + 1:]:
            if math.gcd(a, b) != 1:
                problems.append(f"moduli {a} and {b} are not coprime")

    if 2 <= params.t <= params.n:
        if not asmuth_bloom_holds(moduli, params.m0, params.t):
            problems.append("Asmuth-Bloom inequality does not hold")
        if params.capacity != math.prod(moduli[:params.t]):
            problems.append("capacity is not the product of the t smallest moduli")

    return problems


def check_ab_params(params: ABParams) -> ABParams:
    problems = validate_ab_params(params)
    if problems:
        raise InvalidParams("; ".join(problems))
    return params
