"""Power-flow solution methods on the partitioned admittance system.

Four routes to a voltage vector, all sharing the same sparse solve
kernel: a fixed-point iteration with compensation currents for
constant-power loads; a single solve when every load is an admittance;
an affine model evaluated through one sparse solve (either the
fixed-point form or an implicit Jacobian block system); and a dense
explicit affine model kept as a small-scale oracle.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .sparsekit import (
    LuFactors,
    Ordering,
    SparseMatrix,
    SymbolicAnalysis,
    default_ordering,
    from_arrays,
    lu_factorize,
    lu_solve,
)
from .ybus import YbusSystem

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 100
DENSE_CAP = 4000


class PowerFlowError(ValueError):
    pass


@dataclass
class SolveTimings:
    factor_seconds: float = 0.0
    per_solve_seconds: list = field(default_factory=list)

    def total(self) -> float:
        return self.factor_seconds + sum(self.per_solve_seconds)


@dataclass
class PowerFlowSolution:
    v_nodes: np.ndarray
    iterations: int
    max_mismatch: float
    converged: bool
    timings: SolveTimings


def _prepare_factors(m: SparseMatrix, ordering, analysis, timings):
    t0 = time.perf_counter()
    factors = lu_factorize(m, ordering=ordering, symbolic=analysis)
    timings.factor_seconds = time.perf_counter() - t0
    return factors


def _timed_solve(factors: LuFactors, rhs, timings):
    t0 = time.perf_counter()
    x = factors.solve(rhs)
    timings.per_solve_seconds.append(time.perf_counter() - t0)
    return x


def solve_fixed_point(
    sys: YbusSystem,
    s_injection: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    v_init: np.ndarray | None = None,
    factors: LuFactors | None = None,
    ordering: Ordering | None = None,
    analysis: SymbolicAnalysis | None = None,
) -> PowerFlowSolution:
    """Implicit-impedance fixed point: v <- Y_LL \\ (conj(s/v) - Y_LS v_S).

    ``s_injection`` holds per-unit complex power injections at load nodes
    (negative for consumption). The factorization happens once and every
    iteration reuses it; pass ``factors`` to skip even that.
    """
    s = np.asarray(s_injection, dtype=np.complex128)
    if s.shape != (sys.n_load,):
        raise PowerFlowError(
            f"injection vector has shape {s.shape}, expected ({sys.n_load},)"
        )
    timings = SolveTimings()
    if factors is None:
        factors = _prepare_factors(sys.y_LL, ordering, analysis, timings)
    rhs0 = -sys.y_LS.matvec(sys.v_source)
    if v_init is None:
        v = _timed_solve(factors, rhs0, timings)
    else:
        v = np.asarray(v_init, dtype=np.complex128).copy()
        if v.shape != (sys.n_load,):
            raise PowerFlowError("v_init has wrong shape")
    if (v == 0).any():
        raise PowerFlowError("initial voltage contains zero entries")
    mismatch = np.inf
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        i_comp = np.conj(s / v)
        v_new = _timed_solve(factors, i_comp + rhs0, timings)
        scale = np.abs(v_new).max()
        if scale == 0 or not np.isfinite(scale):
            raise PowerFlowError(
                f"voltage iterate collapsed at iteration {it}"
            )
        mismatch = float(np.abs(v_new - v).max() / scale)
        v = v_new
        if mismatch <= tol:
            converged = True
            break
        if (v == 0).any():
            raise PowerFlowError(f"zero voltage entry at iteration {it}")
    return PowerFlowSolution(v, it, mismatch, converged, timings)


def solve_constant_admittance(
    sys: YbusSystem,
    ordering: Ordering | None = None,
    analysis: SymbolicAnalysis | None = None,
) -> PowerFlowSolution:
    """One factorization plus one solve; loads must already be folded into
    the admittance matrix (assemble with constant_power_as_impedance)."""
    timings = SolveTimings()
    factors = _prepare_factors(sys.y_LL, ordering, analysis, timings)
    rhs0 = -sys.y_LS.matvec(sys.v_source)
    v = _timed_solve(factors, rhs0, timings)
    return PowerFlowSolution(v, 1, 0.0, True, timings)


def power_balance_residual(sys: YbusSystem, v: np.ndarray, s: np.ndarray) -> float:
    """inf-norm of diag(conj(v)) (Y_LL v + Y_LS v_S) - conj(s)."""
    i = sys.y_LL.matvec(v) + sys.y_LS.matvec(sys.v_source)
    return float(np.abs(np.conj(v) * i - np.conj(s)).max())


# ---------------------------------------------------------------------------
# linearizations
# ---------------------------------------------------------------------------

class LinKind(Enum):
    FixedPoint = "fixed-point"
    ImplicitJacobian = "implicit-jacobian"
    DenseExplicit = "dense-explicit"


@dataclass
class JacobianSystem:
    """Real 2n x 2n block system [[S11, S12], [S21, S22]] over stacked
    rectangular voltage coordinates, with the map from stacked (re, im)
    power injections to the right-hand side."""

    s_blocks: SparseMatrix
    rhs_map: SparseMatrix

    @property
    def n(self) -> int:
        return self.s_blocks.ncols


@dataclass
class Linearization:
    kind: LinKind
    v0: np.ndarray            # model constant: evaluation at s = 0
    v_star: np.ndarray        # linearization voltage
    n: int
    factors: LuFactors | None = None
    h_scale: np.ndarray | None = None     # 1 / conj(v_star)
    jacobian: JacobianSystem | None = None
    jac_factors: LuFactors | None = None
    dense_m: np.ndarray | None = None


def build_jacobian_system(sys: YbusSystem, v_star: np.ndarray) -> JacobianSystem:
    """Blocks of the power-flow differential at v_star in rectangular
    coordinates: A dv + diag(b) dconj(v) = dconj(s) with
    A = diag(conj v*) Y_LL and b = Y_LL v* + Y_LS v_S."""
    nl = sys.n_load
    y = sys.y_LL
    cols = np.repeat(np.arange(nl, dtype=np.int64), np.diff(y.colptr))
    rows = y.rowidx.astype(np.int64)
    avals = np.conj(v_star)[rows] * y.values
    b = y.matvec(v_star) + sys.y_LS.matvec(sys.v_source)
    diag = np.arange(nl, dtype=np.int64)
    r = np.concatenate([rows, rows + nl, rows, rows + nl,
                        diag, diag + nl, diag, diag + nl])
    c = np.concatenate([cols, cols, cols + nl, cols + nl,
                        diag, diag, diag + nl, diag + nl])
    v = np.concatenate([
        avals.real,           # S11 <- Re A
        avals.imag,           # S21 <- Im A
        -avals.imag,          # S12 <- -Im A
        avals.real,           # S22 <- Re A
        b.real, b.imag, b.imag, -b.real,   # diag(b) contributions
    ])
    s_blocks = from_arrays(2 * nl, 2 * nl, r, c, v)
    rhs_map = from_arrays(
        2 * nl, 2 * nl,
        np.concatenate([diag, diag + nl]),
        np.concatenate([diag, diag + nl]),
        np.concatenate([np.ones(nl), -np.ones(nl)]),
    )
    return JacobianSystem(s_blocks, rhs_map)


def build_linearization(
    sys: YbusSystem,
    kind: LinKind,
    operating_point: PowerFlowSolution | np.ndarray | None = None,
    s_star: np.ndarray | None = None,
    dense_cap: int = DENSE_CAP,
    factors: LuFactors | None = None,
) -> Linearization:
    """Affine voltage model around an operating point (default: no load).

    The model constant ``v0`` is the evaluation at zero injection; when
    built at a loaded operating point it is the affine extrapolation
    v* - D s*, which coincides with the no-load voltage at s* = 0.
    """
    nl = sys.n_load
    if factors is None:
        factors = lu_factorize(sys.y_LL)
    rhs0 = -sys.y_LS.matvec(sys.v_source)
    v_noload = factors.solve(rhs0)
    if operating_point is None:
        v_star = v_noload.copy()
    elif isinstance(operating_point, PowerFlowSolution):
        v_star = operating_point.v_nodes.copy()
    else:
        v_star = np.asarray(operating_point, dtype=np.complex128).copy()
    if v_star.shape != (nl,):
        raise PowerFlowError("operating point has wrong shape")
    if (v_star == 0).any():
        raise PowerFlowError("linearization voltage contains zero entries")

    if kind == LinKind.FixedPoint:
        return Linearization(kind, v_noload, v_star, nl, factors=factors,
                             h_scale=1.0 / np.conj(v_star))
    if kind == LinKind.ImplicitJacobian:
        jac = build_jacobian_system(sys, v_star)
        jac_factors = lu_factorize(jac.s_blocks)
        lin = Linearization(kind, v_star.copy(), v_star, nl,
                            jacobian=jac, jac_factors=jac_factors)
        if s_star is not None:
            ds = _jac_apply(lin, np.asarray(s_star, dtype=np.complex128))
            lin.v0 = v_star - ds
        return lin
    if kind == LinKind.DenseExplicit:
        if nl > dense_cap:
            raise PowerFlowError(
                f"dense model refused for n={nl} > cap {dense_cap} "
                "(quadratic memory)"
            )
        m = np.empty((nl, nl), dtype=np.complex128)
        e = np.zeros(nl, dtype=np.complex128)
        for j in range(nl):
            e[j] = 1.0
            m[:, j] = factors.solve(e) / np.conj(v_star[j])
            e[j] = 0.0
        return Linearization(kind, v_noload, v_star, nl, dense_m=m)
    raise PowerFlowError(f"unknown linearization kind {kind!r}")


def _jac_apply(lin: Linearization, s: np.ndarray) -> np.ndarray:
    u = np.concatenate([s.real, s.imag])
    rhs = lin.jacobian.rhs_map.matvec(u)
    xy = lin.jac_factors.solve(rhs)
    return xy[:lin.n] + 1j * xy[lin.n:]


def evaluate_linearization(lin: Linearization, s: np.ndarray) -> np.ndarray:
    """Voltage of the affine model at injection s; sparse kinds cost one
    triangular-solve pass."""
    s = np.asarray(s, dtype=np.complex128)
    if s.shape != (lin.n,):
        raise PowerFlowError(
            f"injection vector has shape {s.shape}, expected ({lin.n},)"
        )
    if lin.kind == LinKind.FixedPoint:
        return lin.factors.solve(np.conj(s) * lin.h_scale) + lin.v0
    if lin.kind == LinKind.ImplicitJacobian:
        return _jac_apply(lin, s) + lin.v0
    if lin.kind == LinKind.DenseExplicit:
        return lin.dense_m @ np.conj(s) + lin.v0
    raise PowerFlowError(f"unknown linearization kind {lin.kind!r}")


# ---------------------------------------------------------------------------
# solution export
# ---------------------------------------------------------------------------

def export_solution_csv(path, sys: YbusSystem, sol: PowerFlowSolution) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node_id,bus,phase,v_re,v_im,v_mag_pu,v_ang_deg\n")
        for i in range(sys.n_load):
            bus, phase = sys.node_labels[i]
            v = sol.v_nodes[i]
            fh.write(
                f"{i},{bus},{phase},{v.real:.12g},{v.imag:.12g},"
                f"{abs(v):.12g},{np.degrees(np.angle(v)):.12g}\n"
            )
