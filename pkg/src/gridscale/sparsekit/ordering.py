"""Fill-reducing orderings for sparse elimination.

Radial feeders give tree-of-cliques admittance patterns; eliminating
leaves first is what keeps their factorization near linear. General
patterns go through an approximate-minimum-degree pass built on a
quotient graph, with dense-node postponement: once every remaining node
is dense enough the ordering stops discriminating and the factorization
switches to a dense trailing block instead.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .matrix import SparseMatrix


class OrderingError(ValueError):
    pass


class OrderKind(Enum):
    Natural = "natural"
    MinimumDegree = "minimum-degree"
    LeafFirstTree = "leaf-first-tree"


@dataclass(frozen=True)
class Ordering:
    """A permutation of 0..n-1 plus how it was produced.

    ``dense_tail_start`` marks the boundary where minimum degree postponed
    the remaining (quasi-dense) nodes; the LU kernel may factor everything
    from there on as a dense block. It equals n when nothing was postponed.
    """

    perm: np.ndarray
    kind: OrderKind
    dense_tail_start: int = field(default=-1)

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        object.__setattr__(self, "perm", perm)
        if self.dense_tail_start < 0:
            object.__setattr__(self, "dense_tail_start", perm.size)
        n = perm.size
        if not np.array_equal(np.sort(perm), np.arange(n)):
            raise OrderingError("perm is not a permutation of 0..n-1")

    @property
    def n(self) -> int:
        return int(self.perm.size)

    def inverse(self) -> np.ndarray:
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.perm] = np.arange(self.n)
        return inv


def _symmetric_pattern(m: SparseMatrix):
    """Undirected adjacency (CSC arrays, no diagonal) of pattern(A + A^T)."""
    n = m.ncols
    cols = np.repeat(np.arange(n, dtype=np.int64), np.diff(m.colptr))
    rows = m.rowidx.astype(np.int64)
    r = np.concatenate([rows, cols])
    c = np.concatenate([cols, rows])
    off = r != c
    r, c = r[off], c[off]
    code = c * n + r
    code = np.unique(code)
    c, r = code // n, code % n
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(c, minlength=n), out=ptr[1:])
    return ptr, r


def order(m: SparseMatrix, kind: OrderKind, dense_cutoff: int | None = None) -> Ordering:
    """Compute a fill-reducing ordering of a square matrix's pattern.

    The pattern is symmetrized internally. ``LeafFirstTree`` demands the
    (symmetrized, diagonal-free) pattern graph be a forest.
    """
    if not m.is_square():
        raise OrderingError("ordering requires a square matrix")
    n = m.ncols
    if kind == OrderKind.Natural:
        return Ordering(np.arange(n, dtype=np.int64), kind)
    ptr, adj = _symmetric_pattern(m)
    if kind == OrderKind.LeafFirstTree:
        return Ordering(_leaf_first(n, ptr, adj), kind)
    if kind == OrderKind.MinimumDegree:
        perm, tail = _minimum_degree(n, ptr, adj, dense_cutoff)
        return Ordering(perm, kind, dense_tail_start=tail)
    raise OrderingError(f"unknown ordering kind: {kind!r}")


def default_ordering(m: SparseMatrix) -> Ordering:
    """LeafFirstTree when the pattern graph is a forest, else MinimumDegree."""
    ptr, adj = _symmetric_pattern(m)
    n = m.ncols
    if _is_forest(n, ptr, adj):
        return Ordering(_leaf_first(n, ptr, adj), OrderKind.LeafFirstTree)
    perm, tail = _minimum_degree(n, ptr, adj, None)
    return Ordering(perm, OrderKind.MinimumDegree, dense_tail_start=tail)


def _is_forest(n, ptr, adj) -> bool:
    nedges = adj.size // 2
    if nedges >= n:
        return False
    # acyclic iff repeated leaf peeling consumes every vertex
    deg = np.diff(ptr).copy()
    removed = np.zeros(n, dtype=bool)
    stack = list(np.flatnonzero(deg <= 1))
    count = 0
    for v in stack:
        if removed[v]:
            continue
        removed[v] = True
        count += 1
        for u in adj[ptr[v]:ptr[v + 1]]:
            if not removed[u]:
                deg[u] -= 1
                if deg[u] <= 1:
                    stack.append(u)
    return count == n


def _leaf_first(n, ptr, adj) -> np.ndarray:
    """Peel leaves in rounds: every current leaf orders before any vertex it
    exposes, so endpoints of a path come before its interior."""
    deg = np.diff(ptr).copy()
    order_out = np.empty(n, dtype=np.int64)
    removed = np.zeros(n, dtype=bool)
    frontier = list(np.flatnonzero(deg <= 1))
    k = 0
    while frontier:
        nxt: list[int] = []
        for v in frontier:
            if removed[v]:
                continue
            removed[v] = True
            order_out[k] = v
            k += 1
            for u in adj[ptr[v]:ptr[v + 1]]:
                if not removed[u]:
                    deg[u] -= 1
                    if deg[u] <= 1:
                        nxt.append(int(u))
        frontier = sorted(set(nxt))
    if k != n:
        raise OrderingError("not a forest")
    return order_out


def _minimum_degree(n, ptr, adj, dense_cutoff):
    """Quotient-graph minimum degree with approximate external degrees.

    Nodes whose degree exceeds ``dense_cutoff`` once the graph has shrunk
    are postponed to the end of the permutation (classic dense-row
    postponement); the boundary index is returned alongside the perm.
    """
    if n == 0:
        return np.empty(0, dtype=np.int64), 0
    avg_deg = adj.size / max(n, 1)
    if dense_cutoff is None:
        dense_cutoff = max(96, int(0.5 * np.sqrt(n * max(avg_deg, 1.0))))
    var_adj = [adj[ptr[i]:ptr[i + 1]] for i in range(n)]
    var_elems: list[list[int]] = [[] for _ in range(n)]
    elem_nodes: dict[int, np.ndarray] = {}
    degree = np.diff(ptr).astype(np.int64)
    ordered = np.zeros(n, dtype=bool)
    in_pivot = np.zeros(n, dtype=bool)
    heap = [(int(degree[i]), i) for i in range(n)]
    heapq.heapify(heap)
    out: list[int] = []
    postponed: list[int] = []
    next_eid = 0
    remaining = n

    while remaining:
        while heap:
            d, p = heapq.heappop(heap)
            if not ordered[p] and d == degree[p]:
                break
        else:
            for i in range(n):
                if not ordered[i]:
                    ordered[i] = True
                    postponed.append(i)
            break
        if degree[p] >= dense_cutoff and remaining > dense_cutoff:
            ordered[p] = True
            postponed.append(p)
            remaining -= 1
            continue
        pieces = []
        a = var_adj[p]
        if a.size:
            a = a[~ordered[a]]
            if a.size:
                pieces.append(a)
        for e in var_elems[p]:
            nodes = elem_nodes.pop(e, None)
            if nodes is not None:
                pieces.append(nodes)
        if pieces:
            lp_nodes = np.unique(np.concatenate(pieces))
            lp_nodes = lp_nodes[(lp_nodes != p) & ~ordered[lp_nodes]]
        else:
            lp_nodes = np.empty(0, dtype=np.int64)
        ordered[p] = True
        out.append(p)
        remaining -= 1
        if not lp_nodes.size:
            continue
        eid = next_eid
        next_eid += 1
        elem_nodes[eid] = lp_nodes
        in_pivot[lp_nodes] = True
        sz = lp_nodes.size
        for i in lp_nodes:
            a = var_adj[i]
            if a.size:
                keep = ~ordered[a] & ~in_pivot[a]
                if not keep.all():
                    var_adj[i] = a[keep]
            live = [e for e in var_elems[i] if e in elem_nodes]
            d = var_adj[i].size + sz - 1
            for e in live:
                d += elem_nodes[e].size
            live.append(eid)
            var_elems[i] = live
            degree[i] = d
            heapq.heappush(heap, (int(d), int(i)))
        in_pivot[lp_nodes] = False

    perm = np.array(out + postponed, dtype=np.int64)
    tail = len(out) if postponed else n
    return perm, tail
