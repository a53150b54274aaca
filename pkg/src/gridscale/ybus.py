"""Bus admittance matrix assembly, source/load partitioning, and the
random admittance-like contrast matrix.

The contrast matrix shares the headline properties of an assembled
admittance matrix (symmetric, diagonally dominant, ~3p nonzeros per row)
while scattering them at random positions; solving with it is the
control experiment that separates "sparse" from "well-structured".
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netmodel import LoadKind, Network
from .sparsekit import SparseMatrix, from_arrays


class YbusError(ValueError):
    pass


@dataclass
class YbusSystem:
    """Assembled n x n admittance matrix with its source/load partition."""

    y_full: SparseMatrix
    load_nodes: np.ndarray
    source_nodes: np.ndarray
    y_LL: SparseMatrix
    y_LS: SparseMatrix
    v_source: np.ndarray
    node_labels: list
    s_base_kva: float

    @property
    def n(self) -> int:
        return self.y_full.ncols

    @property
    def n_load(self) -> int:
        return int(self.load_nodes.size)


def assemble(net: Network, constant_power_as_impedance: bool = False) -> YbusSystem:
    """Scatter branch primitive blocks into the full admittance matrix.

    Constant-impedance loads (at 1 pu nominal voltage) fold onto the
    diagonal; constant-power loads contribute nothing unless
    ``constant_power_as_impedance`` converts them too.
    """
    n = net.n_nodes
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    for br in net.branches:
        q = len(br.phases)
        try:
            idx = np.array(
                [net.node_index[(br.from_bus, p)] for p in br.phases]
                + [net.node_index[(br.to_bus, p)] for p in br.phases],
                dtype=np.int64,
            )
        except KeyError as exc:
            raise YbusError(
                f"branch {br.from_bus}-{br.to_bus} references node {exc.args[0]}"
                " absent from the network"
            ) from None
        r = np.repeat(idx, 2 * q)
        c = np.tile(idx, 2 * q)
        rows.append(r)
        cols.append(c)
        vals.append(br.primitive_y.reshape(-1))
    for ld in net.loads:
        if ld.kind == LoadKind.ConstantImpedance or constant_power_as_impedance:
            node = net.node_index[(ld.bus, ld.phase)]
            s_pu = complex(ld.s_nominal) / net.s_base_kva
            y = np.conj(s_pu)  # |v_nominal| = 1 pu
            rows.append(np.array([node]))
            cols.append(np.array([node]))
            vals.append(np.array([y], dtype=np.complex128))
    if rows:
        y_full = from_arrays(
            n, n, np.concatenate(rows), np.concatenate(cols),
            np.concatenate(vals).astype(np.complex128),
        )
    else:
        y_full = from_arrays(n, n, [], [], np.empty(0, dtype=np.complex128))

    load_nodes = np.arange(net.n_load_nodes, dtype=np.int64)
    source_nodes = np.arange(net.n_load_nodes, net.n_nodes, dtype=np.int64)
    y_ll = y_full.submatrix(load_nodes, load_nodes)
    y_ls = y_full.submatrix(load_nodes, source_nodes)
    v_source = np.array(
        [net.source.voltage(net.node_labels[i][1]) for i in source_nodes],
        dtype=np.complex128,
    )
    return YbusSystem(y_full, load_nodes, source_nodes, y_ll, y_ls, v_source,
                      list(net.node_labels), net.s_base_kva)


def net_injections(net: Network, include_impedance: bool = False) -> np.ndarray:
    """Per-unit complex power injections at load nodes (loads consume)."""
    s = np.zeros(net.n_load_nodes, dtype=np.complex128)
    for ld in net.loads:
        if ld.kind == LoadKind.ConstantPower or include_impedance:
            node = net.node_index[(ld.bus, ld.phase)]
            s[node] -= complex(ld.s_nominal) / net.s_base_kva
    return s


def equivalent_p(y: SparseMatrix, n: int) -> float:
    """Effective phases per branch, nnz / 3n."""
    if n <= 0:
        raise YbusError("node count must be positive")
    return y.nnz / (3.0 * n)


@dataclass(frozen=True)
class UpsilonSpec:
    """Parameters of the admittance-like random symmetric matrix.

    Off-diagonal entries land at (3p-1)n random symmetric positions with
    values uniform on [-1, 1]; the diagonal is shifted by the maximum
    off-diagonal row sum plus ``upsilon0_margin``, making the matrix
    strictly diagonally dominant. Total stored entries come to 3pn.
    """

    n: int
    p: float
    seed: int = 0
    upsilon0_margin: float = 1.0

    def density(self) -> float:
        return (3.0 * self.p - 1.0) / self.n


def generate_upsilon(spec: UpsilonSpec) -> SparseMatrix:
    """Draw the sparse random symmetric contrast matrix; deterministic."""
    n = spec.n
    d = spec.density()
    if not (0.0 < d < 1.0):
        raise YbusError(f"density {d:.3g} outside (0, 1); check n and p")
    if spec.upsilon0_margin <= 0:
        raise YbusError("upsilon0_margin must be positive")
    rng = np.random.default_rng(spec.seed)
    k = int(round(n * (3.0 * spec.p - 1.0) / 2.0))
    k = min(k, n * (n - 1) // 2)
    codes = np.empty(0, dtype=np.int64)
    while codes.size < k:
        need = k - codes.size
        draw = int(need * 1.4) + 16
        i = rng.integers(0, n, size=draw)
        j = rng.integers(0, n, size=draw)
        off = i != j
        lo = np.minimum(i[off], j[off]).astype(np.int64)
        hi = np.maximum(i[off], j[off]).astype(np.int64)
        codes = np.unique(np.concatenate([codes, lo * n + hi]))
    codes = codes[:k]
    lo = codes // n
    hi = codes % n
    vals = rng.uniform(-1.0, 1.0, size=k)
    rows = np.concatenate([lo, hi])
    cols = np.concatenate([hi, lo])
    offvals = np.concatenate([vals, vals])
    rowsum = np.bincount(rows, weights=np.abs(offvals), minlength=n)
    u0 = float(rowsum.max()) + spec.upsilon0_margin
    rows = np.concatenate([rows, np.arange(n)])
    cols = np.concatenate([cols, np.arange(n)])
    offvals = np.concatenate([offvals, np.full(n, u0)])
    return from_arrays(n, n, rows, cols, offvals)
