"""Exception and warning types shared across the package."""


class LeocellError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(LeocellError):
    """Invalid input data, configuration, or arguments."""


class CsvFormatError(ValidationError):
    """Malformed dataset CSV; the message names the offending line."""


class DegenerateRangeError(ValidationError):
    """A variable range has min equal to max where a span is required."""


class ModelFileError(ValidationError):
    """A model file is unreadable, inconsistent, or has the wrong schema."""


class ModelMismatchError(ValidationError):
    """A loaded model does not fit the data or operation it was given."""


class StatisticUndefinedError(ValidationError):
    """A statistic's mathematical preconditions do not hold for this input."""


class RankDeficiencyError(LeocellError):
    """The regression design matrix is rank deficient.

    Carries the name of the degenerate column.
    """

    def __init__(self, column: str, message: str | None = None):
        self.column = column
        super().__init__(message or f"design matrix is rank deficient: column '{column}' "
                                    f"is linearly dependent on the preceding columns")


class DivergenceError(LeocellError):
    """Training produced a non-finite value; carries the offending epoch."""

    def __init__(self, epoch: int, message: str | None = None):
        self.epoch = epoch
        super().__init__(message or f"training diverged at epoch {epoch}: "
                                    f"non-finite parameter or error value")


class ExtrapolationWarning(UserWarning):
    """A value fell outside its fitted range and was extrapolated linearly."""


class RangeWarning(UserWarning):
    """Values are outside the physically plausible range for their field."""
