"""Exception hierarchy for climattr.

All library errors derive from :class:`ClimattrError` so callers can catch a
single base class. Data/configuration problems and numerical failures are kept
on separate branches because the command line maps them to different exit
codes.
"""


class ClimattrError(Exception):
    """Base class for all errors raised by this package."""


class DataError(ClimattrError):
    """Invalid input data or configuration (CLI exit code 1)."""


class NumericalError(ClimattrError):
    """Numerical failure such as non-convergence (CLI exit code 2)."""


# --- data / configuration ---------------------------------------------------

class EmptyOverlapError(DataError):
    """Series to be aligned share no common years."""


class WindowOutOfRangeError(DataError):
    """A requested year window falls outside the available span."""


class YearNotFoundError(DataError):
    """A requested reference year is not present in the series."""


class DuplicateYearError(DataError):
    """A CSV file contains the same year twice."""


class CsvParseError(DataError):
    """Malformed CSV input; carries the offending line number."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number


class ConfigError(DataError):
    """Invalid analysis configuration."""


class UnknownCoefficientError(DataError):
    """A coefficient name is not present in a fit result."""


class IncompleteScenarioError(DataError):
    """A scenario does not assign a value to every model covariate."""


class MissingAuxiliarySeriesError(DataError):
    """Component series needed for a forcing decomposition are missing."""


class NotNestedError(DataError):
    """The reduced model is not nested within the full model."""


class InvalidPeriodError(DataError):
    """Return period must be a real number greater than 1."""


class InvalidRssError(DataError):
    """Residual sums of squares violate positivity or nesting order."""


class TooFewReplicatesError(DataError):
    """Bootstrap or Monte Carlo replicate count below the method's floor."""


class InsufficientDataError(DataError):
    """Not enough rows for the requested fit (residual dof < 1)."""


# --- numerical --------------------------------------------------------------

class IllConditionedError(NumericalError):
    """Design matrix condition number exceeds the configured threshold."""


class NonConvergenceError(NumericalError):
    """Iterative optimisation failed to converge."""


class SupportViolationError(NumericalError):
    """Observations fall outside the support of the fitted distribution."""


class ZeroDenominatorError(NumericalError):
    """Counterfactual exceedance probability is numerically zero."""


class NonStationaryError(DataError):
    """A simulation spec defines an unstable (non-stationary) process."""
