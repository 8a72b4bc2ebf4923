class AttestError(Exception):
    pass


class BadSlot(AttestError, IndexError):
    pass


class NoCredential(AttestError):
    pass


class EmptyConfigSet(AttestError, ValueError):
    pass


class DecryptionFailed(AttestError):
    pass


class DropSilently(AttestError):
    """The message is discarded without any reply."""


class AuthFailed(AttestError):
    pass
