"""Exception types raised across the package."""


class FishtrackError(Exception):
    pass


class ConfigError(FishtrackError, ValueError):
    """Invalid configuration value (thresholds, rates, weights)."""


class InputContractError(FishtrackError, ValueError):
    """Input violates an operation's documented precondition."""


class SequenceError(FishtrackError):
    """Frames fed to a stateful component out of order."""


class UndefinedMetricError(FishtrackError, ZeroDivisionError):
    """A metric or average whose denominator is zero."""


class MotParseError(FishtrackError, ValueError):
    def __init__(self, lineno: int, text: str, reason: str):
        self.lineno = lineno
        self.text = text
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}: {text!r}")
