"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(ToolkitError, ValueError):
    """Input violates an operation's preconditions."""


class DegenerateVarianceError(ToolkitError):
    """Long-run variance is zero or negative, so the statistic is undefined."""


class DegenerateScaleError(ToolkitError):
    """A fluctuation function vanished at some scale, so a ratio is undefined."""


class InvalidBarError(InvalidInputError):
    """Price bar violates the low <= open, close <= high ordering."""


class DegenerateOverlapError(ToolkitError):
    """Overlap mean between two segments is zero, so no rescaling ratio exists."""


class ComputationAbortedError(ToolkitError):
    """An iterative procedure exhausted its retry or tolerance budget."""
