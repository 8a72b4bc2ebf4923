class ModMathError(Exception):
    pass


class NotInvertible(ModMathError, ValueError):
    pass


class SearchExhausted(ModMathError):
    pass


class InvalidParams(ModMathError, ValueError):
    pass


class WrongCoalitionSize(ModMathError, ValueError):
    pass


class DuplicateIndex(ModMathError, ValueError):
    pass


class IndexMismatch(ModMathError, ValueError):
    pass
