class NetSimError(Exception):
    pass


class BudgetExceeded(NetSimError):
    """The closure outgrew its term budget; `partial` holds what was derived so far."""

    def __init__(self, partial: frozenset, limit: int):
        super().__init__(f"deduction closure exceeded {limit} terms")
        self.partial = partial
        self.limit = limit


class UnknownScenario(NetSimError, KeyError):
    pass


class TermDecodeError(NetSimError, ValueError):
    pass
