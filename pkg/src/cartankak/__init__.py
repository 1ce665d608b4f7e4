"""Quotient algebras of su(N) and recursive KAK factorization of unitaries.

Construct conjugate partitions and quotient algebras from a center
subalgebra, enumerate the 2^p Cartan decompositions they carry, and factor
any special unitary into an ordered product of single-generator exponentials
(local and nonlocal gates) by repeated KAK steps.
"""

from .cartan import (
    CartanSplit,
    DecompositionSequence,
    build_cartan_split,
    build_decomposition_sequence,
    enumerate_maximal_abelian,
    enumerate_t_choices,
    extend_to_maximal_abelian,
    nearest_neighbors,
)
from .errors import (
    BasisNotClosedError,
    CartanKakError,
    ClosureViolationError,
    DecompositionError,
    DimensionMismatchError,
    InvalidChoiceError,
    InvalidMatrixError,
    InvalidSubscriptError,
    NotAbelianError,
    NotBinaryPartitionedError,
    NotInSpanError,
    NotMaximalError,
    UnsupportedLabelError,
)
from .generators import (
    CommutatorResult,
    Diag,
    Generator,
    Lambda,
    LambdaHat,
    OrthoDiag,
    TensorWord,
    commutator_numeric,
    commutator_symbolic,
    hs_inner,
    make_diag,
    make_lambda,
    make_lambda_hat,
    make_ortho_diag,
    make_tensor_word,
    to_lambda_basis,
)
from .kak import (
    AbelianBlock,
    Factorization,
    GateFactor,
    classify_gate,
    factor_abelian_exponential,
    ingest_unitary,
    kak_single_level,
    reconstruct,
    recursive_decompose,
)
from .partition import (
    AbelianSpace,
    ConjugatePair,
    QuotientAlgebra,
    SubscriptTable,
    binary_label_of,
    build_quotient_algebra,
    conjugate_quotient_algebra,
    diagonalize_abelian,
    intrinsic_center,
    intrinsic_quotient_algebra,
    lambda_basis,
    removing_process,
    standard_basis,
    standard_quotient_algebra,
    standard_word_center,
    subscript_table_of,
    verify_closure,
)

__version__ = "0.1.0"
