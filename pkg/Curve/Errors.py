class CurveError(Exception):
    pass


class PointNotOnCurve(CurveError, ValueError):
    pass


class InvalidCurve(CurveError, ValueError):
    pass


class NonInvertibleNonce(CurveError, ValueError):
    pass


class ZeroR(CurveError):
    """r came out 0, pick another nonce."""


class ZeroS(CurveError):
    """s came out 0, pick another nonce."""
