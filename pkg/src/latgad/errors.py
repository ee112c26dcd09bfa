"""Exception taxonomy shared by all modules.

CLI exit-code mapping: invalid input and unsupported parameter regions are
usage errors (2), resource caps are resource errors (3), verification and
numeric failures are failures (1).
"""


class LatgadError(Exception):
    """Base class for all package errors."""


class InvalidInputError(LatgadError):
    """Malformed or inconsistent input values."""


class UnsupportedParametersError(InvalidInputError):
    """Parameter region where the requested object provably does not exist
    or the algorithm is not applicable."""


class DegenerateConstructionError(UnsupportedParametersError):
    """Construction would produce a zero separation gap (eps = 0)."""


class ResourceLimitError(LatgadError):
    """Requested computation exceeds a hard size cap."""


class NumericDegeneracyError(LatgadError):
    """Numeric search exhausted without reaching its termination condition."""


class VerificationError(LatgadError):
    """An internal consistency check on a constructed object failed."""
