"""Error types raised by twistleaf."""


class TwistleafError(Exception):
    """Base class for every error raised by the package."""


class ParameterMismatchError(TwistleafError, ValueError):
    """Two tower scalars were combined across different parameters c."""


class DimensionMismatchError(TwistleafError, ValueError):
    """Operands live in algebras, matrices or subspaces of different sizes."""


class RangeError(TwistleafError, ValueError):
    """A parameter (n, m, k, l, c, a Schubert symbol) is outside its range."""


class RingMismatchError(TwistleafError, TypeError):
    """Exact and floating-point operands were mixed."""


class PreconditionError(TwistleafError, RuntimeError):
    """An operation was called on inputs that violate its precondition."""
