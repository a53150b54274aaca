"""Scaling-exponent estimation: ordinary least squares on log-log axes.

The slope of log10(t) against log10(n) is the empirical complexity
coefficient; its standard error gives a 95% confidence interval
(alpha +- 1.96 sigma) that supports rejecting hypothesized exponents.
A sliding-window slope diagnostic flags data that only follows a power
law locally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Z95 = 1.96


class RegressionError(ValueError):
    pass


@dataclass(frozen=True)
class FitReport:
    alpha: float
    intercept: float
    sigma: float
    ci95: tuple[float, float]
    r2: float
    sample_count: int

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "intercept": self.intercept,
            "sigma": self.sigma,
            "ci95": [self.ci95[0], self.ci95[1]],
            "r2": self.r2,
            "sample_count": self.sample_count,
        }

    @staticmethod
    def from_alpha_sigma(alpha: float, sigma: float, intercept: float = 0.0,
                         r2: float = 0.0, sample_count: int = 3) -> "FitReport":
        return FitReport(alpha, intercept, sigma,
                         (alpha - Z95 * sigma, alpha + Z95 * sigma),
                         r2, sample_count)


def fit_loglog(points) -> FitReport:
    """OLS fit of log10(t) = alpha log10(n) + intercept.

    sigma is the standard error of the slope, sqrt((SSE/(N-2)) / Sxx);
    r2 is the coefficient of determination.
    """
    pts = [(float(n), float(t)) for n, t in points]
    if len(pts) < 3:
        raise RegressionError(f"need at least 3 points, got {len(pts)}")
    if any(n <= 0 or t <= 0 for n, t in pts):
        raise RegressionError("all n and t must be positive for log-log fit")
    x = np.log10([n for n, _ in pts])
    y = np.log10([t for _, t in pts])
    if np.unique(x).size < 2:
        raise RegressionError("degenerate abscissa: need at least 2 distinct n")
    alpha, intercept = np.polyfit(x, y, 1)
    resid = y - (alpha * x + intercept)
    sse = float(resid @ resid)
    sxx = float(((x - x.mean()) ** 2).sum())
    nobs = len(pts)
    sigma = math.sqrt(max(sse, 0.0) / (nobs - 2) / sxx)
    sst = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if sst == 0.0 else 1.0 - sse / sst
    r2 = min(max(r2, 0.0), 1.0)
    return FitReport(float(alpha), float(intercept), sigma,
                     (float(alpha - Z95 * sigma), float(alpha + Z95 * sigma)),
                     r2, nobs)


def median_per_case(records) -> list[tuple[float, float]]:
    """Per-case medians of per-iteration time.

    ``records`` holds (case_id, n, t_seconds, iterations) tuples. Times
    divide by iteration count first; the median of an even-sized group is
    the lower of the two central order statistics. Output is sorted by n.
    """
    groups: dict[str, tuple[float, list[float]]] = {}
    for case_id, n, t, iters in records:
        if iters <= 0:
            raise RegressionError(f"case {case_id}: nonpositive iteration count")
        groups.setdefault(case_id, (float(n), []))[1].append(float(t) / iters)
    if not groups:
        raise RegressionError("no records to take medians of")
    out = []
    for case_id, (n, ts) in groups.items():
        ts.sort()
        out.append((n, ts[(len(ts) - 1) // 2]))
    out.sort()
    return out


def hypothesis_excluded(report: FitReport, value: float) -> bool:
    """True when value lies outside the 95% confidence interval."""
    lo, hi = report.ci95
    return not (lo <= value <= hi)


def windowed_slopes(points, window_decades: float = 0.5,
                    step_decades: float = 0.25,
                    min_points: int = 3) -> list[tuple[float, float]]:
    """Slopes over sliding log10(n) windows, as (window center, slope).

    For clean power laws the slopes are flat; data whose local exponent
    grows (the random contrast matrices) shows a nondecreasing sequence.
    """
    pts = sorted((float(n), float(t)) for n, t in points)
    if len(pts) < min_points:
        raise RegressionError("not enough points for windowed slopes")
    x = np.log10([n for n, _ in pts])
    y = np.log10([t for _, t in pts])
    lo, hi = x.min(), x.max()
    out = []
    start = lo
    while True:
        end = start + window_decades
        mask = (x >= start - 1e-12) & (x <= end + 1e-12)
        if mask.sum() >= min_points and np.unique(x[mask]).size >= 2:
            slope = float(np.polyfit(x[mask], y[mask], 1)[0])
            out.append((float((start + end) / 2.0), slope))
        if end >= hi:
            break
        start += step_decades
    if not out:
        # window never captured enough points; fall back to one global slope
        out.append((float((lo + hi) / 2.0), float(np.polyfit(x, y, 1)[0])))
    return out


def slopes_nondecreasing(slopes, tol: float = 0.0) -> bool:
    vals = [s for _, s in slopes]
    return all(b >= a - tol for a, b in zip(vals, vals[1:]))


def local_only_power_law(slopes, spread_threshold: float = 0.25) -> bool:
    """Heuristic for 'the polynomial fit is only valid locally'."""
    vals = [s for _, s in slopes]
    return (max(vals) - min(vals)) >= spread_threshold if len(vals) > 1 else False
