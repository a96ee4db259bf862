"""Exception types raised across the pipeline."""


class PopcurveError(Exception):
    """Base class for all pipeline errors."""


class TooShort(PopcurveError):
    """Raw series has fewer points than the simulation window."""


class MalformedCsv(PopcurveError):
    """CSV cell could not be parsed; message names row and column."""


class EmptyFile(PopcurveError):
    """CSV file contains no data rows."""


class LengthMismatch(PopcurveError):
    """Series of unequal length passed where equal length is required."""


class NoConvergence(PopcurveError):
    """Every fit start failed to produce finite parameters."""


class InsufficientClusters(PopcurveError):
    """Silhouette needs at least two non-empty clusters."""


class EmptyIndex(PopcurveError):
    """Medoid index contains no medoids."""


class EmptyMatrix(PopcurveError):
    """Confusion matrix has a zero grand total."""


class InvalidSpec(PopcurveError):
    """Synthetic generation spec is invalid."""


class TooFewSeries(PopcurveError):
    """Not enough usable series for the validation experiment."""


class NoInput(PopcurveError):
    """Input directory contains no parseable CSV files."""
