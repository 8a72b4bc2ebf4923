import hashlib
import json
import logging

from Models.CurvePoint import CurvePoint, CurveParams
from Curve.Errors import PointNotOnCurve, InvalidCurve

logger = logging.getLogger(__name__)

# y^2 = x^3 + 2x + 2 over F_17, every one of its 19 points is a multiple of (5, 1)
TOY_CURVE = CurveParams(name="toy-f17", p=17, a=2, b=2, generator=CurvePoint(x=5, y=1), q=19)

O = CurvePoint.identity()


def is_on_curve(point: CurvePoint, params: CurveParams) -> bool:
    if point.is_identity:
        return True
    x, y = point.x, point.y
    if not (0 <= x < params.p and 0 <= y < params.p):
        return False
    return (y * y - (x * x * x + params.a * x + params.b)) % params.p == 0


def _require(point: CurvePoint, params: CurveParams):
    if not is_on_curve(point, params):
        raise PointNotOnCurve(f"({point.x}, {point.y}) is not on {params.name or 'the curve'}")


def point_neg(point: CurvePoint, params: CurveParams) -> CurvePoint:
    if point.is_identity:
        return point
    return CurvePoint(x=point.x, y=-point.y % params.p)


def add_unchecked(p1: CurvePoint, p2: CurvePoint, params: CurveParams) -> CurvePoint:
    if p1.is_identity:
        return p2
    if p2.is_identity:
        return p1

    p = params.p
    if p1.x == p2.x:
        if (p1.y + p2.y) % p == 0:
            return O
        slope = (3 * p1.x * p1.x + params.a) * pow(2 * p1.y, -1, p) % p
    else:
        slope = (p2.y - p1.y) * pow(p2.x - p1.x, -1, p) % p

    x3 = (slope * slope - p1.x - p2.x) % p
    y3 = (slope * (p1.x - x3) - p1.y) % p
    return CurvePoint(x=x3, y=y3)


def point_add(p1: CurvePoint, p2: CurvePoint, params: CurveParams) -> CurvePoint:
    _require(p1, params)
    _require(p2, params)
    return add_unchecked(p1, p2, params)


def scalar_mul(k: int, point: CurvePoint, params: CurveParams) -> CurvePoint:
    """
    Double-and-add, least significant bit first.

    Points are taken to lie in the subgroup generated by the base point, so k
    is reduced mod q first; negative k therefore works as well.
    """
    _require(point, params)
    k %= params.q

    result = O
    addend = point
    while k:
        if k & 1:
            result = add_unchecked(result, addend, params)
        addend = add_unchecked(addend, addend, params)
        k >>= 1
    return result


def validate_curve(params: CurveParams) -> CurveParams:
    p = params.p
    if (4 * params.a ** 3 + 27 * params.b ** 2) % p == 0:
        raise InvalidCurve("singular curve: 4a^3 + 27b^2 = 0")
    if params.generator.is_identity or not is_on_curve(params.generator, params):
        raise InvalidCurve("base point is not an affine point of the curve")

    # q*G, computed without the mod-q shortcut of scalar_mul
    result = O
    addend = params.generator
    k = params.q
    while k:
        if k & 1:
            result = add_unchecked(result, addend, params)
        addend = add_unchecked(addend, addend, params)
        k >>= 1
    if not result.is_identity:
        raise InvalidCurve(f"q*G is not the identity for q = {params.q}")
    return params


def curve_digest(params: CurveParams) -> str:
    canonical = json.dumps([params.p, params.a, params.b, params.generator.x, params.generator.y, params.q])
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
