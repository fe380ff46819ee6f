"""Exception types raised across the package."""


class TradeoffError(ValueError):
    """Base class for all input/contract violations."""


class NotHermitian(TradeoffError):
    pass


class NotPsd(TradeoffError):
    pass


class OutOfRange(TradeoffError):
    pass


class WrongDim(TradeoffError):
    pass


class CompletenessViolated(TradeoffError):
    pass


class InvalidState(TradeoffError):
    pass


class ZeroProbabilityOutcome(TradeoffError):
    pass


class NegativeInput(TradeoffError):
    pass


class OutOfImage(TradeoffError):
    pass


class DegenerateInput(TradeoffError):
    pass


class NegativeRadicand(TradeoffError):
    pass
