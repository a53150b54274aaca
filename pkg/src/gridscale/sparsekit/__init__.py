"""Sparse CSC storage, fill-reducing orderings and a direct LU solver."""

from .matrix import (
    SparseMatrix,
    SparseMatrixError,
    from_arrays,
    from_dense,
    from_triplets,
    identity,
    nnz,
)
from .ordering import Ordering, OrderingError, OrderKind, default_ordering, order
from .lu import (
    DEFAULT_PIVOT_TOL,
    FactorizationError,
    LuFactors,
    SingularMatrixError,
    SymbolicAnalysis,
    analyze,
    lu_factorize,
    lu_solve,
    lu_solve_multi,
)
from .mmio import MatrixMarketError, read_matrix_market, write_matrix_market

__all__ = [
    "SparseMatrix", "SparseMatrixError", "from_arrays", "from_dense",
    "from_triplets", "identity", "nnz",
    "Ordering", "OrderingError", "OrderKind", "default_ordering", "order",
    "DEFAULT_PIVOT_TOL", "FactorizationError", "LuFactors",
    "SingularMatrixError", "SymbolicAnalysis", "analyze",
    "lu_factorize", "lu_solve", "lu_solve_multi",
    "MatrixMarketError", "read_matrix_market", "write_matrix_market",
]
