"""Exception types shared across the package."""


class SubseqError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(SubseqError, ValueError):
    """Invalid or budget-infeasible algorithm parameters."""


class InputFormatError(SubseqError, ValueError):
    """Malformed input data (bad token, symbol out of range, bad file)."""


class SizeGuardError(SubseqError, ValueError):
    """Input exceeds the documented size guard of an exponential oracle."""
