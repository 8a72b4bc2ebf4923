import logging
import random

from Models.ABParams import ABParams
from Models.CurvePoint import CurveParams
from Models.Signing import SigningKeyMaterial
from CrtVss.CrtVss import split_masked
from Curve.Curve import scalar_mul
from ModMath.ParamsGenerator import gen_ab_params
from ThresholdDss.Errors import BoundTooLarge

logger = logging.getLogger(__name__)


def signing_key_bound(params: ABParams, curve: CurveParams, bound: int) -> int:
    """
    Exclusive upper bound on the effective key d.

    Keeping t*B*q*(1 + d) below the smallest coalition capacity guarantees that
    k(m + r d) never wraps during the round-2 recombination.
    """
    return (params.capacity - 1) // (params.t * bound * curve.q)


def plan_signing_params(t: int, n: int, m0: int, curve: CurveParams, bound: int, rng: random.Random,
                        min_capacity_bits: int = 0) -> ABParams:
    headroom = (t * bound * curve.q).bit_length() + 1
    return gen_ab_params(t, n, m0, min_capacity_bits, rng, headroom_bits=headroom)


def create_signing_key(secret: int, params: ABParams, curve: CurveParams, bound: int,
                       rng: random.Random) -> SigningKeyMaterial:
    limit = signing_key_bound(params, curve, bound)
    if limit <= secret + params.m0:
        raise BoundTooLarge(f"nonce bound {bound} leaves no room for a masked key below capacity")

    while True:
        dealing, masked = split_masked(secret, params, rng, max_lifted=limit)
        if masked.lifted % curve.q:
            break
        logger.debug("Lifted key is a multiple of q, drawing another mask")

    public_key = scalar_mul(masked.lifted, curve.generator, curve)
    logger.info(f"Signing key dealt to {params.n} nodes")
    return SigningKeyMaterial(params=params, d=masked.lifted, public_key=public_key, dealing=dealing, masked=masked)
