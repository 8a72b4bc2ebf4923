class CliError(Exception):
    pass


class UsageError(CliError, ValueError):
    pass


class ShareRejected(CliError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"share {index} rejected: {reason}")
        self.index = index


class BenchMismatch(CliError):
    pass
