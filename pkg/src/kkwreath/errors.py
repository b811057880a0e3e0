"""Exception types shared across the package."""


class KKError(Exception):
    """Base class for all errors raised by kkwreath."""


class NotAGroup(KKError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SizeCap(KKError):
    pass


class NotNormal(KKError):
    pass


class MixedParents(KKError):
    pass


class NotTransversal(KKError):
    pass


class CoreNotTrivial(KKError):
    """Raised when the subgroup to be factored out contains a nontrivial normal subgroup.

    ``witness`` is the offending normal subgroup (the normal core).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class HypothesisFailed(KKError):
    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = tuple(failed)


class NotPrimitive(KKError):
    pass


class WindowViolation(KKError):
    pass


class NoValidCp(KKError):
    def __init__(self, message, prime=None, witness=None):
        super().__init__(message)
        self.prime = prime
        self.witness = witness


class RankZero(KKError):
    pass


class UsageError(KKError):
    def __init__(self, message, token=None):
        super().__init__(message)
        self.token = token
