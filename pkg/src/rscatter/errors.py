"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside its documented domain."""


class DegenerateTraceError(ValueError):
    """All samples identical; the Pareto shape estimate is undefined."""


class EmptyTraceError(ValueError):
    """No threshold crossings found in the power sequence."""


class TraceParseError(ValueError):
    """Malformed trace file line."""

    def __init__(self, line_number, message):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class InfiniteMeanError(ValueError):
    """Pareto shape <= 1; the mean duration diverges."""


class InfeasibleError(RuntimeError):
    """No admissible configuration satisfies the reliability constraint."""


class FrameCrcError(Exception):
    """Frame failed its CRC check."""
