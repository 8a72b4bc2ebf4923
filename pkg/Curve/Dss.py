import hashlib
import logging

from Models.CurvePoint import CurvePoint, CurveParams, DssSignature
from Curve.Curve import scalar_mul, add_unchecked, is_on_curve
from Curve.Errors import NonInvertibleNonce, ZeroR, ZeroS

logger = logging.getLogger(__name__)


def message_digest(message: bytes, q: int, hash_name: str = "sha1") -> int:
    return int.from_bytes(hashlib.new(hash_name, message).digest(), "big") % q


def dss_sign_central(d: int, k: int, m: int, params: CurveParams) -> DssSignature:
    """
    Single-signer form of the signature variant used by the threshold protocol.

    r = x(k^-1 G) mod q and s = k(m + r d) mod q. Serves as the oracle the
    distributed signature must match.
    """
    q = params.q
    if k % q == 0:
        raise NonInvertibleNonce("nonce is a multiple of q")

    point = scalar_mul(pow(k, -1, q), params.generator, params)
    r = point.x % q
    if r == 0:
        raise ZeroR("r = 0")
    s = k * (m + r * d) % q
    if s == 0:
        raise ZeroS("s = 0")
    return DssSignature(r=r, s=s)


def dss_verify(public_key: CurvePoint, m: int, signature: DssSignature, params: CurveParams) -> bool:
    q = params.q
    r, s = signature.r, signature.s
    if not (1 <= r < q and 1 <= s < q) or not is_on_curve(public_key, params):
        return False

    w = pow(s, -1, q)
    x_point = add_unchecked(scalar_mul(m * w, params.generator, params), scalar_mul(r * w, public_key, params), params)
    if x_point.is_identity:
        logger.debug("Verification point is O, rejecting signature")
        return False
    return x_point.x % q == r
