import logging
import random

from Models.OpCounter import OpCounter
from Models.ShamirShare import ShamirShare, PolyDealing
from ModMath.ModMath import is_probable_prime, mod_inverse
from ShamirRef.Errors import BadParams, DuplicatePoint, ConstraintViolated, InsufficientShares

logger = logging.getLogger(__name__)


def eval_poly(coefficients: list[int], x: int, prime: int) -> int:
    # Horner, highest degree first
    result = 0
    for coefficient in reversed(coefficients):
        result = (result * x + coefficient) % prime
    return result


def shamir_split(secret: int, t: int, n: int, prime: int, rng: random.Random,
                 coefficients: list[int] | None = None) -> PolyDealing:
    """
    Shamir dealing of `secret` with threshold t among n parties.

    Args:
        coefficients: Full coefficient list (constant term first) for fixtures;
            its constant term must equal the secret

    Returns:
        PolyDealing holding the evaluations at x = 1..n
    """
    if not 1 <= t <= n < prime:
        raise BadParams(f"need 1 <= t <= n < P (got t={t}, n={n}, P={prime})")
    if not is_probable_prime(prime):
        raise BadParams(f"field size {prime} is not prime")
    if not 0 <= secret < prime:
        raise BadParams(f"secret outside [0, {prime})")

    if coefficients is None:
        coefficients = [secret] + [rng.randrange(prime) for _ in range(t - 1)]
    elif len(coefficients) > t or coefficients[0] != secret:
        raise BadParams("forced coefficients must have at most t terms and start with the secret")

    shares = tuple(ShamirShare(x=x, y=eval_poly(coefficients, x, prime), field_prime=prime) for x in range(1, n + 1))
    return PolyDealing(degree=t - 1, field_prime=prime, shares=shares)


def shamir_zero_sharing(degree: int, n: int, prime: int, rng: random.Random) -> PolyDealing:
    return shamir_split(0, degree + 1, n, prime, rng)


def shamir_reconstruct(shares: list[ShamirShare], prime: int, counter: OpCounter | None = None) -> int:
    """
    Naive Lagrange interpolation at 0.

    Every basis coefficient is rebuilt from scratch, 2(t-1) products for its
    numerator and denominator plus two to apply it, so t shares cost 2t^2
    multiplications; `counter` receives that tally.
    """
    xs = [share.x for share in shares]
    if len(set(xs)) != len(xs):
        raise DuplicatePoint(f"evaluation points repeat: {xs}")

    secret = 0
    multiplications = 0
    for share in shares:
        numerator = 1
        denominator = 1
        for other in shares:
            if other.x == share.x:
                continue
            numerator = numerator * (-other.x) % prime
            denominator = denominator * (share.x - other.x) % prime
            multiplications += 2
        secret = (secret + share.y * numerator % prime * mod_inverse(denominator, prime)) % prime
        multiplications += 2

    if counter is not None:
        counter.tally(multiplications)
    return secret


def shamir_refresh(refresh_dealings: list[PolyDealing], shares: list[ShamirShare]) -> list[ShamirShare]:
    """
    Additive proactive refresh: participant i deals w_i, every holder adds the
    pieces it received. Allowed only when the w_i sum to zero.
    """
    if not refresh_dealings:
        return list(shares)

    prime = refresh_dealings[0].field_prime
    total = 0
    for dealing in refresh_dealings:
        total += shamir_reconstruct(list(dealing.shares[:dealing.threshold]), prime, dealing.op_counter)
    if total % prime:
        raise ConstraintViolated(f"refresh secrets sum to {total % prime}, not 0, mod {prime}")

    refreshed = []
    for share in shares:
        delta = sum(dealing.shares[share.x - 1].y for dealing in refresh_dealings)
        refreshed.append(ShamirShare(x=share.x, y=(share.y + delta) % prime, field_prime=prime))
    return refreshed


def bgw_product(deal_a: PolyDealing, deal_b: PolyDealing, deal_c: PolyDealing, indices: list[int]) -> int:
    """
    Product of two Shamir secrets from local products v_i = a_i * b_i + c_i.

    The product polynomial has degree 2t-2, so 2t-1 of the listed parties are
    interpolated; deal_c is a sharing of zero that re-randomizes the product.
    """
    prime = deal_a.field_prime
    if {deal_b.field_prime, deal_c.field_prime} != {prime}:
        raise BadParams("all three dealings must live in the same field")
    if deal_b.degree != deal_a.degree:
        raise BadParams(f"factor dealings have degrees {deal_a.degree} and {deal_b.degree}")
    if deal_c.degree > 2 * deal_a.degree:
        raise BadParams(f"masking dealing of degree {deal_c.degree} exceeds the product degree {2 * deal_a.degree}")
    if shamir_reconstruct(list(deal_c.shares[:deal_c.threshold]), prime):
        raise ConstraintViolated("masking dealing does not share zero")

    needed = 2 * deal_a.degree + 1
    if len(indices) < needed:
        raise InsufficientShares(f"product reconstruction needs {needed} shares, got {len(indices)}")

    local = []
    for x in indices[:needed]:
        a, b, c = deal_a.shares[x - 1], deal_b.shares[x - 1], deal_c.shares[x - 1]
        local.append(ShamirShare(x=x, y=(a.y * b.y + c.y) % prime, field_prime=prime))
    return shamir_reconstruct(local, prime, deal_a.op_counter)
