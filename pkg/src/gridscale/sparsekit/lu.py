"""Sparse direct LU: symbolic analysis, numeric factorization, solves.

The factorization is left-looking over a fill pattern predicted from the
elimination tree of the symmetrized pattern, so the numeric pass runs as
a few vectorized operations per column. Threshold partial pivoting is
honored by checking each pivot against its column; a column that fails
the check sends the whole factorization down a general row-pivoting path
that computes its patterns column by column instead.

When the ordering postponed a quasi-dense set of nodes (see ordering
module), the trailing block is factored densely with blocked updates.
That is what keeps random admittance-like matrices tractable; matrices
with tree-like patterns never postpone and never touch the dense path.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import SparseMatrix, from_arrays
from .ordering import Ordering, default_ordering

DEFAULT_PIVOT_TOL = 1e-3
_DENSE_BLOCK = 128
_MIN_TAIL = 32


class FactorizationError(ValueError):
    pass


class SingularMatrixError(FactorizationError):
    """Raised on structural or numeric singularity.

    ``column`` is the 0-based column index of the original matrix at
    which no acceptable pivot existed.
    """

    def __init__(self, column: int, kind: str = "numeric"):
        self.column = int(column)
        self.kind = kind
        super().__init__(
            f"{kind} singularity: no acceptable pivot in column {column} (0-based)"
        )


class _ThresholdFallback(Exception):
    """Internal: predicted-pattern pass hit a pivot below threshold."""


# ---------------------------------------------------------------------------
# symbolic analysis
# ---------------------------------------------------------------------------

@dataclass
class SymbolicAnalysis:
    """Reusable pattern prediction for one (matrix pattern, ordering) pair."""

    ordering: Ordering
    n: int
    s: int                    # dense tail start (== n when no tail)
    lp: np.ndarray            # strict-lower pattern colptr, len s+1
    li: np.ndarray            # strict-lower pattern rows (permuted space)
    up: np.ndarray            # per-column U-row pointers, len n+1
    uj: np.ndarray            # U row indices j per column k
    uidx: np.ndarray          # position of L[k, j] inside (lp, li)
    tail_off: np.ndarray      # per sparse column: first pattern index with row >= s

    @property
    def lower_nnz(self) -> int:
        return int(self.li.size)


def _permuted_pattern(m: SparseMatrix, perm: np.ndarray):
    """CSC arrays of A[perm, perm], plus the symmetrized pattern."""
    n = m.ncols
    iperm = np.empty(n, dtype=np.int64)
    iperm[perm] = np.arange(n)
    cols = np.repeat(np.arange(n, dtype=np.int64), np.diff(m.colptr))
    pr = iperm[m.rowidx]
    pc = iperm[cols]
    order = np.lexsort((pr, pc))
    pr, pc, pv = pr[order], pc[order], m.values[order]
    ap = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(pc, minlength=n), out=ap[1:])
    # symmetrized pattern (union with transpose), diagonal included
    code = np.unique(
        np.concatenate([pc * n + pr, pr * n + pc, np.arange(n) * (n + 1)])
    )
    sc, sr = code // n, code % n
    sp = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(sc, minlength=n), out=sp[1:])
    return ap, pr, pv, sp, sr


def _etree(n, sp, si):
    parent = np.full(n, -1, dtype=np.int64)
    ancestor = np.full(n, -1, dtype=np.int64)
    for k in range(n):
        for t in range(sp[k], sp[k + 1]):
            i = si[t]
            if i >= k:
                continue
            while True:
                r = ancestor[i]
                ancestor[i] = k
                if r == -1:
                    parent[i] = k
                    break
                if r == k:
                    break
                i = r
    return parent


def analyze(m: SparseMatrix, ordering: Ordering | None = None) -> SymbolicAnalysis:
    """Predict the fill pattern of an LU factorization without pivoting.

    The prediction is the Cholesky pattern of the symmetrized permuted
    matrix, exact for pattern-symmetric inputs and an upper bound
    otherwise.
    """
    if not m.is_square():
        raise FactorizationError("matrix must be square")
    if ordering is None:
        ordering = default_ordering(m)
    n = m.ncols
    if ordering.n != n:
        raise FactorizationError("ordering size does not match matrix")
    perm = ordering.perm
    _, _, _, sp, sr = _permuted_pattern(m, perm)
    s = min(ordering.dense_tail_start, n)
    if n - s < _MIN_TAIL:
        s = n
    parent = _etree(n, sp, sr)
    children: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        p = parent[i]
        if 0 <= p < s:
            children[p].append(i)
    pats: list[np.ndarray] = [None] * s  # type: ignore[list-item]
    for k in range(s):
        pieces = [sr[sp[k]:sp[k + 1]]]
        for c in children[k]:
            pieces.append(pats[c])
        merged = np.unique(np.concatenate(pieces)) if len(pieces) > 1 else pieces[0]
        pats[k] = merged[merged > k]
    if s:
        lens = np.fromiter((p.size for p in pats), dtype=np.int64, count=s)
        lp = np.zeros(s + 1, dtype=np.int64)
        np.cumsum(lens, out=lp[1:])
        li = (np.concatenate(pats) if lp[-1] else np.empty(0, dtype=np.int64)).astype(np.int64)
    else:
        lp = np.zeros(1, dtype=np.int64)
        li = np.empty(0, dtype=np.int64)
    # transpose of the strict-lower pattern: for each k the source columns j
    cols = np.repeat(np.arange(s, dtype=np.int64), np.diff(lp))
    order = np.argsort(li, kind="stable")
    tgt = li[order]
    up = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(tgt, minlength=n), out=up[1:])
    uj = cols[order]
    uidx = order.astype(np.int64)
    if s < n:
        tail_off = np.empty(s, dtype=np.int64)
        for j in range(s):
            tail_off[j] = lp[j] + np.searchsorted(li[lp[j]:lp[j + 1]], s)
    else:
        tail_off = np.empty(0, dtype=np.int64)
    return SymbolicAnalysis(ordering, n, s, lp, li, up, uj, uidx, tail_off)


# ---------------------------------------------------------------------------
# numeric factorization
# ---------------------------------------------------------------------------

class LuFactors:
    """Factors of P_r A P_c^T = L U with reusable triangular solves.

    ``L`` and ``U`` are materialized lazily as canonical SparseMatrix
    values; the solve paths use the internal compressed arrays directly.
    """

    def __init__(self, n, dtype, row_perm, col_perm, s, lp, li, lvals, d,
                 ucp, ucr, ucv, u12, T, tail_perm):
        self.n = int(n)
        self._dtype = dtype
        self.row_perm = row_perm
        self.col_perm = col_perm
        self._s = int(s)
        self._lp = lp
        self._li = li            # pivoted row indices
        self._lvals = lvals
        self._d = d              # U diagonal for sparse columns
        self._ucp = ucp          # strict-upper CSC over sparse columns
        self._ucr = ucr
        self._ucv = ucv
        self._u12 = u12          # (rows j, cols k, vals) with j < s <= k
        self._T = T              # packed dense tail LU (or None)
        self._tail_perm = tail_perm
        self._L_cache: SparseMatrix | None = None
        self._U_cache: SparseMatrix | None = None

    @property
    def dtype(self):
        return self._dtype

    @property
    def L(self) -> SparseMatrix:
        if self._L_cache is None:
            n, s = self.n, self._s
            rows = [self._li, np.arange(n, dtype=np.int64)]
            cols = [np.repeat(np.arange(s, dtype=np.int64), np.diff(self._lp)),
                    np.arange(n, dtype=np.int64)]
            vals = [self._lvals, np.ones(n, dtype=self._dtype)]
            if self._T is not None:
                tr, tc = np.tril_indices(n - s, k=-1)
                rows.append(tr + s)
                cols.append(tc + s)
                vals.append(self._T[tr, tc])
            self._L_cache = from_arrays(
                n, n, np.concatenate(rows), np.concatenate(cols),
                np.concatenate(vals),
            )
        return self._L_cache

    @property
    def U(self) -> SparseMatrix:
        if self._U_cache is None:
            n, s = self.n, self._s
            rows = [self._ucr,
                    np.arange(s, dtype=np.int64)]
            cols = [np.repeat(np.arange(s, dtype=np.int64), np.diff(self._ucp)),
                    np.arange(s, dtype=np.int64)]
            vals = [self._ucv, self._d[:s]]
            if self._T is not None:
                u12r, u12c, u12v = self._u12
                rows.append(u12r)
                cols.append(u12c)
                vals.append(u12v)
                tr, tc = np.triu_indices(n - s)
                rows.append(tr + s)
                cols.append(tc + s)
                vals.append(self._T[tr, tc])
            self._U_cache = from_arrays(
                n, n, np.concatenate(rows), np.concatenate(cols),
                np.concatenate(vals),
            )
        return self._U_cache

    # -- triangular solves --------------------------------------------

    def solve(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b)
        if b.shape != (self.n,):
            raise FactorizationError(
                f"right-hand side has shape {b.shape}, expected ({self.n},)"
            )
        dtype = np.result_type(self._dtype, b.dtype)
        w = b[self.row_perm].astype(dtype, copy=True)
        lp, li, lv = self._lp, self._li, self._lvals
        s = self._s
        for j in range(s):
            wj = w[j]
            if wj != 0:
                t0, t1 = lp[j], lp[j + 1]
                w[li[t0:t1]] -= wj * lv[t0:t1]
        T = self._T
        if T is not None:
            wt = w[s:]
            for i in range(1, wt.size):
                wt[i] -= T[i, :i] @ wt[:i]
            for i in range(wt.size - 1, -1, -1):
                wt[i] = (wt[i] - T[i, i + 1:] @ wt[i + 1:]) / T[i, i]
            w[s:] = wt
            u12r, u12c, u12v = self._u12
            if u12r.size:
                np.subtract.at(w, u12r, u12v * w[u12c])
        ucp, ucr, ucv = self._ucp, self._ucr, self._ucv
        d = self._d
        for k in range(s - 1, -1, -1):
            xk = w[k] / d[k]
            w[k] = xk
            if xk != 0:
                t0, t1 = ucp[k], ucp[k + 1]
                w[ucr[t0:t1]] -= xk * ucv[t0:t1]
        x = np.empty_like(w)
        x[self.col_perm] = w
        return x


def lu_factorize(m: SparseMatrix, ordering: Ordering | None = None,
                 pivot_tol: float = DEFAULT_PIVOT_TOL,
                 symbolic: SymbolicAnalysis | None = None) -> LuFactors:
    """Factor P_r A P_c^T = L U with threshold partial pivoting.

    ``pivot_tol = 0`` disables row exchanges entirely (the ordering is
    trusted; an exactly zero pivot is then an error). Otherwise a column
    whose diagonal candidate is smaller than ``pivot_tol`` times the
    column maximum is re-factored on a general row-pivoting path.
    """
    if not m.is_square():
        raise FactorizationError("matrix must be square")
    if pivot_tol < 0 or pivot_tol > 1:
        raise FactorizationError("pivot_tol must lie in [0, 1]")
    if ordering is None:
        ordering = default_ordering(m)
    if symbolic is None or symbolic.ordering is not ordering or symbolic.n != m.ncols:
        symbolic = analyze(m, ordering)
    if pivot_tol == 0.0 and symbolic.s < m.ncols:
        # a dense tail pivots unconditionally, not allowed at tol 0
        no_tail = Ordering(ordering.perm, ordering.kind)
        symbolic = analyze(m, no_tail)
        ordering = no_tail
    try:
        return _factor_predicted(m, ordering, symbolic, pivot_tol)
    except _ThresholdFallback:
        return _factor_pivoting(m, ordering, pivot_tol)


def lu_solve(f: LuFactors, b: np.ndarray) -> np.ndarray:
    """Solve A x = b using precomputed factors."""
    return f.solve(b)


def lu_solve_multi(f: LuFactors, B: np.ndarray) -> np.ndarray:
    """Solve A X = B columnwise; identical to repeated lu_solve calls."""
    B = np.asarray(B)
    if B.ndim == 1:
        return f.solve(B)
    out = np.empty((f.n, B.shape[1]), dtype=np.result_type(f.dtype, B.dtype))
    for j in range(B.shape[1]):
        out[:, j] = f.solve(B[:, j])
    return out


def _factor_predicted(m, ordering, sym, pivot_tol):
    n = m.ncols
    perm = ordering.perm
    ap, ar, av, _, _ = _permuted_pattern(m, perm)
    symmetric_values = m.is_symmetric()
    at_ptr = at_rows = at_vals = None
    if not symmetric_values:
        # row access to A(perm, perm) for the U side
        cols = np.repeat(np.arange(n, dtype=np.int64), np.diff(ap))
        order = np.lexsort((cols, ar))
        at_rows = cols[order]
        at_vals = av[order]
        at_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(ar, minlength=n), out=at_ptr[1:])

    s, lp, li = sym.s, sym.lp, sym.li
    up, uj, uidx, tail_off = sym.up, sym.uj, sym.uidx, sym.tail_off
    dtype = m.dtype
    x = np.zeros(n, dtype=dtype)
    y = x if symmetric_values else np.zeros(n, dtype=dtype)
    lvals = np.empty(li.size, dtype=dtype)
    urow = lvals if symmetric_values else np.empty(li.size, dtype=dtype)
    d = np.zeros(n, dtype=dtype)
    nt = n - s
    T = np.zeros((nt, nt), dtype=dtype) if nt else None
    if nt:
        # columns whose trailing segment nearly spans the dense block get
        # their Schur update done as panel matmuls after the sparse sweep
        tail_len = lp[1:] - tail_off
        is_big = tail_len >= max(16, int(0.05 * nt))
    else:
        is_big = None

    for k in range(n):
        lo = k if k < s else s
        a0, a1 = ap[k], ap[k + 1]
        arows = ar[a0:a1]
        sel = arows >= lo
        x[arows[sel]] = av[a0:a1][sel]
        if not symmetric_values:
            b0, b1 = at_ptr[k], at_ptr[k + 1]
            brows = at_rows[b0:b1]
            bsel = brows >= lo
            y[brows[bsel]] = at_vals[b0:b1][bsel]
        i0, i1 = up[k], up[k + 1]
        js = uj[i0:i1]
        pos = uidx[i0:i1]
        if k >= s and js.size:
            keep = ~is_big[js]
            js = js[keep]
            pos = pos[keep]
        if js.size:
            starts = pos if k < s else tail_off[js]
            lens = lp[js + 1] - starts
            tot = int(lens.sum())
            if tot:
                cum = np.empty(js.size, dtype=np.int64)
                cum[0] = 0
                np.cumsum(lens[:-1], out=cum[1:])
                src = np.repeat(starts - cum, lens) + np.arange(tot, dtype=np.int64)
                rows = li[src]
                if symmetric_values:
                    ujk = lvals[pos] * d[js]
                    np.subtract.at(x, rows, lvals[src] * np.repeat(ujk, lens))
                else:
                    ujk = urow[pos]
                    lkj = lvals[pos]
                    np.subtract.at(x, rows, lvals[src] * np.repeat(ujk, lens))
                    np.subtract.at(y, rows, urow[src] * np.repeat(lkj, lens))
        if k < s:
            piv = x[k]
            g0, g1 = lp[k], lp[k + 1]
            rows_k = li[g0:g1]
            colvals = x[rows_k]
            if pivot_tol > 0.0:
                cmax = abs(piv)
                if colvals.size:
                    cmax = max(cmax, float(np.abs(colvals).max()))
                if abs(piv) < pivot_tol * cmax:
                    raise _ThresholdFallback
            if piv == 0:
                cmax = float(np.abs(colvals).max()) if colvals.size else 0.0
                if cmax == 0.0:
                    raise SingularMatrixError(int(perm[k]), "structural")
                if pivot_tol == 0.0:
                    raise SingularMatrixError(int(perm[k]))
                raise _ThresholdFallback
            d[k] = piv
            lvals[g0:g1] = colvals / piv
            x[rows_k] = 0
            x[k] = 0
            if not symmetric_values:
                urow[g0:g1] = y[rows_k]
                y[rows_k] = 0
                y[k] = 0
        else:
            T[:, k - s] = x[s:]
            x[s:] = 0
            if not symmetric_values:
                y[s:] = 0

    tail_perm = None
    if T is not None:
        _apply_panel_updates(T, s, lp, li, lvals, urow, d, tail_off,
                             np.flatnonzero(is_big), symmetric_values)
        tail_perm = _dense_lu_inplace(T, pivot_tol, perm, s)
        # remap stored lower rows >= s into pivoted positions
        tinv = np.empty(nt, dtype=np.int64)
        tinv[tail_perm] = np.arange(nt)
        in_tail = li >= s
        li = li.copy()
        li[in_tail] = s + tinv[li[in_tail] - s]

    row_perm = perm.copy()
    if tail_perm is not None:
        row_perm[s:] = perm[s:][tail_perm]

    ucp, ucr, ucv, u12 = _build_upper(n, s, lp, li, lvals, urow, d, up, uj, uidx,
                                      symmetric_values)
    return LuFactors(n, dtype, row_perm, perm.copy(), s, lp, li, lvals, d,
                     ucp, ucr, ucv, u12, T, tail_perm)


_PANEL_WIDTH = 192


def _apply_panel_updates(T, s, lp, li, lvals, urow, d, tail_off, big_js,
                         symmetric_values):
    """Schur update of the dense tail from long-segment columns as matmuls."""
    nt = T.shape[0]
    for b0 in range(0, big_js.size, _PANEL_WIDTH):
        batch = big_js[b0:b0 + _PANEL_WIDTH]
        lpan = np.zeros((nt, batch.size), dtype=T.dtype)
        upan = np.zeros((batch.size, nt), dtype=T.dtype)
        for t in range(batch.size):
            j = batch[t]
            g0, g1 = tail_off[j], lp[j + 1]
            rloc = li[g0:g1] - s
            lseg = lvals[g0:g1]
            lpan[rloc, t] = lseg
            upan[t, rloc] = lseg * d[j] if symmetric_values else urow[g0:g1]
        T -= lpan @ upan


def _build_upper(n, s, lp, li, lvals, urow, d, up, uj, uidx, symmetric_values):
    """Strict-upper CSC over sparse columns plus the U12 coupling block."""
    # transpose entries for target columns 0..s-1 sit contiguously in (uj, uidx)
    ncp = up[:s + 1].copy()
    ucr = uj[:up[s]]
    if symmetric_values:
        ucv = lvals[uidx[:up[s]]] * d[ucr]
    else:
        ucv = urow[uidx[:up[s]]]
    if s < n:
        t_take = np.arange(up[s], up[n])
        u12r = uj[t_take]
        u12c = np.repeat(np.arange(s, n, dtype=np.int64), up[s + 1:n + 1] - up[s:n])
        if symmetric_values:
            u12v = lvals[uidx[t_take]] * d[u12r]
        else:
            u12v = urow[uidx[t_take]]
        u12 = (u12r, u12c, u12v)
    else:
        u12 = (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64),
               np.empty(0, dtype=lvals.dtype))
    return ncp, ucr, ucv, u12


def _dense_lu_inplace(T, pivot_tol, perm, s):
    """Blocked right-looking LU on the trailing dense block."""
    nt = T.shape[0]
    piv = np.arange(nt)
    for k0 in range(0, nt, _DENSE_BLOCK):
        k1 = min(k0 + _DENSE_BLOCK, nt)
        for k in range(k0, k1):
            col = np.abs(T[k:, k])
            cmax = float(col.max())
            if cmax == 0.0:
                raise SingularMatrixError(int(perm[s + k]))
            ip = k if col[0] >= pivot_tol * cmax and col[0] > 0 else k + int(col.argmax())
            if ip != k:
                T[[k, ip], :] = T[[ip, k], :]
                piv[[k, ip]] = piv[[ip, k]]
            T[k + 1:, k] /= T[k, k]
            if k + 1 < k1:
                T[k + 1:, k + 1:k1] -= np.outer(T[k + 1:, k], T[k, k + 1:k1])
        if k1 < nt:
            B = T[k0:k1, k1:]
            Lb = T[k0:k1, k0:k1]
            for r in range(1, k1 - k0):
                B[r] -= Lb[r, :r] @ B[:r]
            T[k1:, k1:] -= T[k1:, k0:k1] @ B
    return piv


def _factor_pivoting(m, ordering, pivot_tol):
    """General left-looking LU with depth-first reach and row pivoting.

    Column patterns adapt to the pivot sequence, so this path is exact
    for any nonsingular matrix; it runs with per-entry Python loops and
    is meant for matrices the predicted path declines.
    """
    n = m.ncols
    perm = ordering.perm
    ap, ar, av, _, _ = _permuted_pattern(m, perm)
    dtype = m.dtype
    x = np.zeros(n, dtype=dtype)
    pinv = np.full(n, -1, dtype=np.int64)   # row -> pivot position
    lcols_r: list[np.ndarray] = []
    lcols_v: list[np.ndarray] = []
    ucols_r: list[np.ndarray] = []
    ucols_v: list[np.ndarray] = []
    d = np.zeros(n, dtype=dtype)
    ljit_rows: list[list[int]] = [[] for _ in range(n)]  # unpivoted-row view of L cols

    for k in range(n):
        # reach of A(:,k) through finished columns, topological order
        a0, a1 = ap[k], ap[k + 1]
        stack: list[int] = []
        topo: list[int] = []
        mark = set()
        for r in ar[a0:a1]:
            r = int(r)
            if r in mark:
                continue
            # iterative DFS
            path = [r]
            mark.add(r)
            while path:
                node = path[-1]
                jn = pinv[node]
                advanced = False
                if jn >= 0:
                    for rr in ljit_rows[jn]:
                        if rr not in mark:
                            mark.add(rr)
                            path.append(rr)
                            advanced = True
                            break
                if not advanced:
                    topo.append(path.pop())
        x[ar[a0:a1]] = av[a0:a1]
        for node in reversed(topo):
            jn = pinv[node]
            if jn < 0:
                continue
            xj = x[node]
            if xj != 0:
                rows = lcols_r[jn]
                x[rows] -= xj * lcols_v[jn]
        # split into pivotal (U) and non-pivotal (candidate) entries
        upos = [node for node in topo if pinv[node] >= 0]
        cand = [node for node in topo if pinv[node] < 0]
        if not cand:
            raise SingularMatrixError(int(perm[k]), "structural")
        cvals = np.array([x[c] for c in cand], dtype=dtype)
        cabs = np.abs(cvals)
        cmax = float(cabs.max())
        if cmax == 0.0:
            raise SingularMatrixError(int(perm[k]))
        ipiv = None
        if k in mark and pinv[k] < 0 and abs(x[k]) >= pivot_tol * cmax and x[k] != 0:
            ipiv = k
        elif pivot_tol == 0.0:
            if pinv[k] < 0 and x[k] != 0:
                ipiv = k
            else:
                raise SingularMatrixError(int(perm[k]))
        else:
            ipiv = cand[int(cabs.argmax())]
        piv = x[ipiv]
        pinv[ipiv] = k
        d[k] = piv
        lr = np.array([c for c in cand if c != ipiv], dtype=np.int64)
        lv = x[lr] / piv
        lcols_r.append(lr)
        lcols_v.append(np.asarray(lv, dtype=dtype))
        ljit_rows[k] = [int(r) for r in lr]
        ur = np.array([pinv[u] for u in upos], dtype=np.int64)
        uv = x[np.array(upos, dtype=np.int64)] if upos else np.empty(0, dtype=dtype)
        ucols_r.append(ur)
        ucols_v.append(np.asarray(uv, dtype=dtype))
        for node in topo:
            x[node] = 0

    # assemble into the common internal layout (pivoted rows, no tail)
    rowof = np.empty(n, dtype=np.int64)
    rowof[pinv] = np.arange(n)
    lens = np.fromiter((r.size for r in lcols_r), dtype=np.int64, count=n)
    lp = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(lens, out=lp[1:])
    li = np.empty(lp[-1], dtype=np.int64)
    lvals = np.empty(lp[-1], dtype=dtype)
    for k in range(n):
        t0, t1 = lp[k], lp[k + 1]
        rows = pinv[lcols_r[k]]
        order = np.argsort(rows)
        li[t0:t1] = rows[order]
        lvals[t0:t1] = lcols_v[k][order]
    ulens = np.fromiter((r.size for r in ucols_r), dtype=np.int64, count=n)
    ucp = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(ulens, out=ucp[1:])
    ucr = np.empty(ucp[-1], dtype=np.int64)
    ucv = np.empty(ucp[-1], dtype=dtype)
    for k in range(n):
        t0, t1 = ucp[k], ucp[k + 1]
        order = np.argsort(ucols_r[k])
        ucr[t0:t1] = ucols_r[k][order]
        ucv[t0:t1] = ucols_v[k][order]
    row_perm = perm[rowof]
    u12 = (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64),
           np.empty(0, dtype=dtype))
    return LuFactors(n, dtype, row_perm, perm.copy(), n, lp, li, lvals, d,
                     ucp, ucr, ucv, u12, None, None)
