"""Matrix Market coordinate format, real and complex, 1-based indices."""
from __future__ import annotations

import numpy as np

from .matrix import SparseMatrix, from_arrays

_HEADER = "%%MatrixMarket matrix coordinate {field} general"


class MatrixMarketError(ValueError):
    pass


def write_matrix_market(m: SparseMatrix, path) -> None:
    field = "complex" if m.dtype == np.complex128 else "real"
    rows, cols, vals = m.to_triplets()
    with open(path, "w", encoding="ascii") as fh:
        fh.write(_HEADER.format(field=field) + "\n")
        fh.write(f"{m.nrows} {m.ncols} {m.nnz}\n")
        if field == "complex":
            for r, c, v in zip(rows, cols, vals):
                fh.write(f"{r + 1} {c + 1} {v.real:.17g} {v.imag:.17g}\n")
        else:
            for r, c, v in zip(rows, cols, vals):
                fh.write(f"{r + 1} {c + 1} {v:.17g}\n")


def read_matrix_market(path) -> SparseMatrix:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip()
        parts = header.split()
        if (len(parts) != 5 or parts[0] != "%%MatrixMarket"
                or parts[1] != "matrix" or parts[2] != "coordinate"
                or parts[4] != "general"):
            raise MatrixMarketError(f"unsupported header: {header!r}")
        field = parts[3]
        if field not in ("real", "complex", "integer"):
            raise MatrixMarketError(f"unsupported field type: {field!r}")
        line = fh.readline()
        while line.startswith("%"):
            line = fh.readline()
        dims = line.split()
        if len(dims) != 3:
            raise MatrixMarketError("malformed size line")
        nrows, ncols, nnz = (int(t) for t in dims)
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        dtype = np.complex128 if field == "complex" else np.float64
        vals = np.empty(nnz, dtype=dtype)
        for k in range(nnz):
            toks = fh.readline().split()
            if field == "complex":
                if len(toks) != 4:
                    raise MatrixMarketError(f"malformed entry on line {k + 3}")
                rows[k] = int(toks[0]) - 1
                cols[k] = int(toks[1]) - 1
                vals[k] = complex(float(toks[2]), float(toks[3]))
            else:
                if len(toks) != 3:
                    raise MatrixMarketError(f"malformed entry on line {k + 3}")
                rows[k] = int(toks[0]) - 1
                cols[k] = int(toks[1]) - 1
                vals[k] = float(toks[2])
    if nnz and (rows.min() < 0 or rows.max() >= nrows
                or cols.min() < 0 or cols.max() >= ncols):
        raise MatrixMarketError("entry index out of declared bounds")
    return from_arrays(nrows, ncols, rows, cols, vals)
