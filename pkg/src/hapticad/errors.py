"""Exception hierarchy shared by every hapticad module."""


class HapticadError(Exception):
    """Base class for all domain errors raised by hapticad."""


class TooFewSamples(HapticadError, ValueError):
    pass


class DegenerateInput(HapticadError, ValueError):
    pass


class OutOfRange(HapticadError, ValueError):
    pass


class NonPositiveInput(HapticadError, ValueError):
    pass


class ProtocolViolation(HapticadError):
    """A scan event arrived in a phase that does not accept it."""


class UnknownToken(HapticadError, ValueError):
    pass


class InvalidRingSize(HapticadError, ValueError):
    pass


class TooFewRings(HapticadError, ValueError):
    pass


class MissingPhase(HapticadError, ValueError):
    """Hysteresis analysis needs both a compression and a release segment."""


class EmptyGrid(HapticadError, ValueError):
    pass


class EmptyDataset(HapticadError, ValueError):
    pass


class NonConvergence(HapticadError):
    """Training finished without meeting the requested error bound."""


class InvalidRotation(HapticadError, ValueError):
    pass


class MalformedRow(HapticadError, ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")
