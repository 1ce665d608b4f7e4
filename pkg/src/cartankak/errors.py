"""Exception hierarchy shared by all cartankak modules."""


class CartanKakError(Exception):
    """Base class for every error raised by this package."""


class InvalidSubscriptError(CartanKakError, ValueError):
    """Generator subscripts out of range or coincident."""


class UnsupportedLabelError(CartanKakError, ValueError):
    """Operation received a label kind it does not handle."""


class DimensionMismatchError(CartanKakError, ValueError):
    """Operands live in different matrix dimensions."""


class InvalidMatrixError(CartanKakError, ValueError):
    """Matrix fails a structural requirement (Hermitian, traceless, unitary...)."""


class NotAbelianError(CartanKakError, ValueError):
    """A set of generators required to commute does not."""


class NotMaximalError(CartanKakError, ValueError):
    """A center subalgebra is not maximal abelian in its ambient span."""


class BasisNotClosedError(CartanKakError, ValueError):
    """Commutators leave the provided generator basis; wrong representation choice."""


class NotBinaryPartitionedError(CartanKakError, ValueError):
    """Subscript patterns within a conjugate pair carry more than one binary string."""


class ClosureViolationError(CartanKakError, ValueError):
    """A commutator does not land in the single subalgebra closure requires."""


class InvalidChoiceError(CartanKakError, ValueError):
    """A Cartan-split selection contradicts the condition of closure."""


class NotInSpanError(CartanKakError, ValueError):
    """A matrix or subalgebra is not contained in the required span."""


class DecompositionError(CartanKakError, RuntimeError):
    """A factorization step failed; the message carries level/branch context."""
