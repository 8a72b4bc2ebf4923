class ShamirError(Exception):
    pass


class BadParams(ShamirError, ValueError):
    pass


class DuplicatePoint(ShamirError, ValueError):
    pass


class ConstraintViolated(ShamirError, ValueError):
    pass


class InsufficientShares(ShamirError, ValueError):
    pass
