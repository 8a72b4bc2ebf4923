class ThresholdDssError(Exception):
    pass


class InsufficientTrustedNodes(ThresholdDssError):
    pass


class BoundTooLarge(ThresholdDssError, ValueError):
    pass


class MissingShares(ThresholdDssError, ValueError):
    pass


class NonInvertibleKA(ThresholdDssError):
    pass


class ResampleNonce(ThresholdDssError):
    pass


class NoValidCandidate(ThresholdDssError):
    pass


class ShareVerificationFailed(ThresholdDssError):
    def __init__(self, index: int, dealer: int):
        super().__init__(f"sub-share for member {index} from member {dealer} does not match its commitment")
        self.index = index
        self.dealer = dealer
