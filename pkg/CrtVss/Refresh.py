import logging
import math
import random

from Models.ABParams import ABParams
from Models.Share import Share, Dealing, MaskedSecret
from CrtVss.CrtVss import split_masked, mask_limit
from CrtVss.Errors import ConstraintUnsatisfiable, InvalidNewParams
from ModMath.Errors import InvalidParams
from ModMath.ModMath import mod_inverse
from ModMath.ParamsGenerator import check_ab_params

logger = logging.getLogger(__name__)


def _random_unit(modulus: int, rng: random.Random) -> int:
    while True:
        w = rng.randrange(2, modulus)
        if math.gcd(w, modulus) == 1:
            return w


def mixed_refresh_values(params: ABParams, k_split: int, rng: random.Random) -> list[int]:
    """
    Refresh values w_1..w_n modulo the product of all moduli with
    prod(w_1..w_k) = 1 and sum(w_k+1..w_n) = 0, none of them trivial.
    """
    n = params.n
    if not 0 <= k_split <= n or k_split == 1 or n - k_split == 1:
        raise ConstraintUnsatisfiable(
            f"k_split={k_split} with n={n} forces a single factor to 1 or a single summand to 0")

    full = math.prod(params.moduli)

    multiplicative: list[int] = []
    while k_split:
        multiplicative = [_random_unit(full, rng) for _ in range(k_split - 1)]
        closing = mod_inverse(math.prod(multiplicative) % full, full)
        if closing != 1:
            multiplicative.append(closing)
            break

    additive: list[int] = []
    while n - k_split:
        additive = [rng.randrange(1, full) for _ in range(n - k_split - 1)]
        closing = -sum(additive) % full
        if closing != 0:
            additive.append(closing)
            break

    return multiplicative + additive


def refresh_mixed_demo(shares: list[Share], params: ABParams, k_split: int, rng: random.Random) -> list[Share]:
    """
    Applies a mixed multiplicative/additive refresh to CRT shares.

    Every refresh value is itself CRT-split; share j becomes
    S_j * prod_{i<=k} w_ij + sum_{i>k} w_ij (mod m_j). Because the constraints
    hold modulo a multiple of every m_j, the result equals S_j: refreshing over
    unchanged moduli cannot move the shares.
    """
    values = mixed_refresh_values(params, k_split, rng)
    refreshed = []
    for share in shares:
        m = share.modulus
        pieces = [w % m for w in values]
        scaled = share.value * math.prod(pieces[:k_split]) % m
        refreshed.append(Share(index=share.index, value=(scaled + sum(pieces[k_split:])) % m, modulus=m))
    return refreshed


def refresh_ttp(dealing: Dealing, masked: MaskedSecret, new_params: ABParams,
                rng: random.Random) -> tuple[Dealing, MaskedSecret]:
    """
    Trusted-third-party refresh: re-deals the same secret over a new modulus set.

    With unchanged parameters only the mask moves, and it is forced to differ
    from the old one whenever the mask range allows it.
    """
    try:
        check_ab_params(new_params)
    except InvalidParams as e:
        raise InvalidNewParams(str(e)) from e

    if masked.secret >= new_params.m0:
        raise InvalidNewParams(f"secret does not fit below new m0 = {new_params.m0}")

    upper = mask_limit(masked.secret, new_params)
    if upper < 1:
        raise InvalidNewParams("new capacity leaves no room for a mask")

    mask = rng.randint(1, upper)
    if new_params == dealing.params:
        while mask == masked.mask and upper > 1:
            mask = rng.randint(1, upper)

    logger.info(f"TTP refresh onto moduli of {new_params.moduli[0].bit_length()} bits")
    return split_masked(masked.secret, new_params, rng, mask=mask)
