class CrtVssError(Exception):
    pass


class SecretOutOfRange(CrtVssError, ValueError):
    pass


class ValueExceedsCapacity(CrtVssError, ValueError):
    pass


class BadVerificationPrime(CrtVssError, ValueError):
    pass


class BadGenerator(CrtVssError, ValueError):
    pass


class ModulusMismatch(CrtVssError, ValueError):
    pass


class ModeMismatch(CrtVssError, ValueError):
    pass


class CapacityExceeded(CrtVssError):
    pass


class ConstraintUnsatisfiable(CrtVssError, ValueError):
    pass


class InvalidNewParams(CrtVssError, ValueError):
    pass
