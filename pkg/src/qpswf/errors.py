"""Exception types shared across the package."""


class QpswfError(Exception):
    """Base class for all library errors."""


class GridMismatch(QpswfError):
    """Two signals do not share the same sampling grid."""


class RegionOutOfGrid(QpswfError):
    """Requested region extends beyond the sampled grid."""


class ZeroSignal(QpswfError):
    """Operation requires a nonzero signal."""


class NonUniformGrid(QpswfError):
    """Axis metadata does not describe a uniform grid."""


class WindowTooSmall(QpswfError):
    """Frequency window cannot contain the requested band."""


class BadParameters(QpswfError):
    """Invalid numeric parameters."""


class ConvergenceFailure(QpswfError):
    """Eigensolver or iteration failed to converge."""


class EigenvalueTooSmall(QpswfError):
    """Eigenvalue is below the floor required to divide by it."""


class NonUnitCoefficient(QpswfError):
    """Quaternion amplitude must have unit modulus."""


class XiOutOfRange(QpswfError):
    """Requested time-energy ratio is outside the admissible interval."""


class BadIndex(QpswfError):
    """Basis element index does not satisfy the construction's preconditions."""


class NoAdmissibleIndex(QpswfError):
    """No basis element satisfies the construction's eigenvalue constraint."""


class LengthMismatch(QpswfError):
    """Coefficient list does not match the basis prefix."""


class QgridFormatError(QpswfError):
    """Malformed QGRID file."""
