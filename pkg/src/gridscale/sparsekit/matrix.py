"""Compressed sparse column matrices over real or complex scalars.

This is the storage format every other module builds on: admittance
matrices, random contrast matrices and Jacobian blocks all live here.
Assembly canonicalizes (sorted row indices per column, duplicates summed,
exact zeros dropped); factorization-time fill is handled elsewhere.
"""
from __future__ import annotations

import numpy as np

INDEX_DTYPE = np.int32
PTR_DTYPE = np.int64


class SparseMatrixError(ValueError):
    pass


class SparseMatrix:
    """CSC matrix: ``colptr`` (ncols+1), ``rowidx``/``values`` (nnz).

    Values are float64 or complex128; both flow through identical code.
    Instances are treated as immutable after construction.
    """

    __slots__ = ("nrows", "ncols", "colptr", "rowidx", "values")

    def __init__(self, nrows, ncols, colptr, rowidx, values):
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self.colptr = np.asarray(colptr, dtype=PTR_DTYPE)
        self.rowidx = np.asarray(rowidx, dtype=INDEX_DTYPE)
        values = np.asarray(values)
        if values.dtype not in (np.float64, np.complex128):
            values = values.astype(
                np.complex128 if np.iscomplexobj(values) else np.float64
            )
        self.values = values
        if self.colptr.shape != (self.ncols + 1,):
            raise SparseMatrixError("colptr must have length ncols+1")
        if self.colptr[0] != 0 or self.colptr[-1] != self.rowidx.size:
            raise SparseMatrixError("colptr must start at 0 and end at nnz")
        if self.rowidx.size != self.values.size:
            raise SparseMatrixError("rowidx and values length mismatch")

    # -- basic queries ------------------------------------------------

    @property
    def nnz(self) -> int:
        return int(self.rowidx.size)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def dtype(self):
        return self.values.dtype

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def column(self, j: int):
        """Row indices and values of column j (views, do not mutate)."""
        s, e = self.colptr[j], self.colptr[j + 1]
        return self.rowidx[s:e], self.values[s:e]

    def diagonal(self):
        d = np.zeros(min(self.nrows, self.ncols), dtype=self.dtype)
        for j in range(d.size):
            rows, vals = self.column(j)
            k = np.searchsorted(rows, j)
            if k < rows.size and rows[k] == j:
                d[j] = vals[k]
        return d

    # -- conversions ---------------------------------------------------

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=self.dtype)
        cols = np.repeat(np.arange(self.ncols), np.diff(self.colptr))
        out[self.rowidx, cols] = self.values
        return out

    def to_triplets(self):
        cols = np.repeat(
            np.arange(self.ncols, dtype=PTR_DTYPE), np.diff(self.colptr)
        )
        return self.rowidx.astype(PTR_DTYPE), cols, self.values.copy()

    def transpose(self) -> "SparseMatrix":
        rows, cols, vals = self.to_triplets()
        return from_arrays(self.ncols, self.nrows, cols, rows, vals)

    def astype(self, dtype) -> "SparseMatrix":
        return SparseMatrix(
            self.nrows, self.ncols, self.colptr.copy(), self.rowidx.copy(),
            self.values.astype(dtype),
        )

    # -- arithmetic -----------------------------------------------------

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.shape[0] != self.ncols:
            raise SparseMatrixError(
                f"dimension mismatch: matrix has {self.ncols} columns, "
                f"vector has {x.shape[0]} entries"
            )
        dtype = np.result_type(self.dtype, x.dtype)
        y = np.zeros(self.nrows, dtype=dtype)
        cols = np.repeat(np.arange(self.ncols), np.diff(self.colptr))
        np.add.at(y, self.rowidx, self.values * x[cols])
        return y

    def submatrix(self, row_ids, col_ids) -> "SparseMatrix":
        """Extract rows/columns given by index arrays (order preserved)."""
        row_ids = np.asarray(row_ids, dtype=PTR_DTYPE)
        col_ids = np.asarray(col_ids, dtype=PTR_DTYPE)
        rowmap = np.full(self.nrows, -1, dtype=PTR_DTYPE)
        rowmap[row_ids] = np.arange(row_ids.size)
        rows, cols, vals = self.to_triplets()
        colmap = np.full(self.ncols, -1, dtype=PTR_DTYPE)
        colmap[col_ids] = np.arange(col_ids.size)
        keep = (rowmap[rows] >= 0) & (colmap[cols] >= 0)
        return from_arrays(
            row_ids.size, col_ids.size,
            rowmap[rows[keep]], colmap[cols[keep]], vals[keep],
        )

    def norm_inf(self) -> float:
        """Max absolute row sum."""
        if self.nnz == 0:
            return 0.0
        sums = np.bincount(
            self.rowidx, weights=np.abs(self.values), minlength=self.nrows
        )
        return float(sums.max())

    def is_symmetric(self, tol: float = 0.0) -> bool:
        t = self.transpose()
        if not np.array_equal(self.colptr, t.colptr):
            return False
        if not np.array_equal(self.rowidx, t.rowidx):
            return False
        if tol == 0.0:
            return bool(np.array_equal(self.values, t.values))
        scale = max(np.abs(self.values).max(initial=0.0), 1.0)
        return bool(np.abs(self.values - t.values).max(initial=0.0) <= tol * scale)

    def pattern_symmetric(self) -> bool:
        t = self.transpose()
        return np.array_equal(self.colptr, t.colptr) and np.array_equal(
            self.rowidx, t.rowidx
        )

    def __repr__(self):
        kind = "complex" if self.dtype == np.complex128 else "real"
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz}, {kind})"


def from_arrays(nrows, ncols, rows, cols, vals) -> SparseMatrix:
    """Assemble from parallel triplet arrays; duplicates summed, zeros dropped."""
    rows = np.asarray(rows, dtype=PTR_DTYPE)
    cols = np.asarray(cols, dtype=PTR_DTYPE)
    vals = np.asarray(vals)
    if not (rows.size == cols.size == vals.size):
        raise SparseMatrixError("triplet arrays must have equal length")
    if rows.size:
        if rows.min() < 0 or rows.max() >= nrows:
            raise SparseMatrixError("row index out of range")
        if cols.min() < 0 or cols.max() >= ncols:
            raise SparseMatrixError("column index out of range")
    if vals.dtype not in (np.float64, np.complex128):
        vals = vals.astype(
            np.complex128 if np.iscomplexobj(vals) else np.float64
        )
    order = np.lexsort((rows, cols))
    rows, cols, vals = rows[order], cols[order], vals[order]
    if rows.size:
        key_change = np.empty(rows.size, dtype=bool)
        key_change[0] = True
        key_change[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.flatnonzero(key_change)
        summed = np.add.reduceat(vals, starts)
        rows, cols = rows[starts], cols[starts]
        keep = summed != 0
        rows, cols, summed = rows[keep], cols[keep], summed[keep]
    else:
        summed = vals
    colptr = np.zeros(ncols + 1, dtype=PTR_DTYPE)
    np.cumsum(np.bincount(cols, minlength=ncols), out=colptr[1:])
    return SparseMatrix(nrows, ncols, colptr, rows, summed)


def from_triplets(nrows, ncols, entries) -> SparseMatrix:
    """Assemble from an iterable of (row, col, value) entries."""
    entries = list(entries)
    if not entries:
        return from_arrays(nrows, ncols, [], [], np.empty(0))
    rows = np.array([e[0] for e in entries], dtype=PTR_DTYPE)
    cols = np.array([e[1] for e in entries], dtype=PTR_DTYPE)
    vals = np.array([e[2] for e in entries])
    return from_arrays(nrows, ncols, rows, cols, vals)


def nnz(m: SparseMatrix) -> int:
    return m.nnz


def identity(n: int, dtype=np.float64) -> SparseMatrix:
    idx = np.arange(n)
    colptr = np.arange(n + 1, dtype=PTR_DTYPE)
    return SparseMatrix(n, n, colptr, idx, np.ones(n, dtype=dtype))


def from_dense(a: np.ndarray) -> SparseMatrix:
    a = np.asarray(a)
    rows, cols = np.nonzero(a)
    return from_arrays(a.shape[0], a.shape[1], rows, cols, a[rows, cols])
