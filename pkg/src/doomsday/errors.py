"""Exception types shared across the package."""


class InfiniteMeanError(ValueError):
    """An operation needed a finite mean, but the distribution has none."""


class ImpossibleObservationError(ValueError):
    """The observed rank has zero probability under every candidate."""


class InsufficientSamplesError(RuntimeError):
    """A Monte Carlo run accepted no trials under the conditioning event."""


class CalibrationError(RuntimeError):
    """A parameter solve failed to bracket a root or to converge."""


class TableFormatError(ValueError):
    """A population table could not be parsed.

    `lines` carries the 1-based line numbers of the offending rows.
    """

    def __init__(self, message, lines=()):
        super().__init__(message)
        self.lines = tuple(lines)
