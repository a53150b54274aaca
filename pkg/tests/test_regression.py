import math

import numpy as np
import pytest

from gridscale.regression import (
    FitReport,
    RegressionError,
    fit_loglog,
    hypothesis_excluded,
    local_only_power_law,
    median_per_case,
    slopes_nondecreasing,
    windowed_slopes,
)


def textbook_fit(points):
    """Independent oracle: plain-float least-squares formulas."""
    xs = [math.log10(n) for n, _ in points]
    ys = [math.log10(t) for _, t in points]
    n = len(xs)
    xbar = sum(xs) / n
    ybar = sum(ys) / n
    sxx = sum((x - xbar) ** 2 for x in xs)
    sxy = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    sse = sum((y - slope * x - intercept) ** 2 for x, y in zip(xs, ys))
    sst = sum((y - ybar) ** 2 for y in ys)
    sigma = math.sqrt(sse / (n - 2) / sxx)
    r2 = 1.0 - sse / sst if sst else 1.0
    return slope, intercept, sigma, r2


@pytest.mark.parametrize("k", [1, 2, 3])
def test_exact_power_law(k):
    pts = [(n, 2.5 * n ** k) for n in (10, 100, 1000, 10000)]
    rep = fit_loglog(pts)
    assert rep.alpha == pytest.approx(k, abs=1e-9)
    assert rep.sigma <= 1e-9
    assert rep.r2 == pytest.approx(1.0, abs=1e-12)


def test_paper_row_ci_arithmetic():
    rep = FitReport.from_alpha_sigma(1.037, 0.014)
    assert rep.ci95[0] == pytest.approx(1.0096, abs=5e-5)
    assert rep.ci95[1] == pytest.approx(1.0644, abs=5e-5)


def test_matches_textbook_oracle_on_noisy_power_laws():
    rng = np.random.default_rng(77)
    for _ in range(20):
        count = int(rng.integers(5, 40))
        k = rng.uniform(0.5, 3.0)
        c = 10 ** rng.uniform(-8, -2)
        ns = np.unique(rng.integers(10, 10 ** 5, size=count))
        if ns.size < 3:
            continue
        ts = c * ns.astype(float) ** k * 10 ** rng.normal(0, 0.05, size=ns.size)
        pts = list(zip(ns.tolist(), ts.tolist()))
        rep = fit_loglog(pts)
        slope, intercept, sigma, r2 = textbook_fit(pts)
        assert rep.alpha == pytest.approx(slope, abs=1e-10)
        assert rep.intercept == pytest.approx(intercept, abs=1e-10)
        assert rep.sigma == pytest.approx(sigma, abs=1e-10)
        assert rep.r2 == pytest.approx(r2, abs=1e-10)
        assert rep.ci95[0] == pytest.approx(slope - 1.96 * sigma, abs=1e-10)
        assert rep.ci95[1] == pytest.approx(slope + 1.96 * sigma, abs=1e-10)


def test_scale_equivariance():
    rng = np.random.default_rng(5)
    ns = [10, 30, 100, 300, 1000]
    ts = [1e-6 * n ** 1.3 * 10 ** rng.normal(0, 0.02) for n in ns]
    a = fit_loglog(list(zip(ns, ts)))
    b = fit_loglog([(n, 100.0 * t) for n, t in zip(ns, ts)])
    assert b.alpha == pytest.approx(a.alpha, abs=1e-12)
    assert b.sigma == pytest.approx(a.sigma, abs=1e-12)
    assert b.r2 == pytest.approx(a.r2, abs=1e-12)
    assert b.intercept == pytest.approx(a.intercept + 2.0, abs=1e-12)


def test_abscissa_scale_invariance():
    rng = np.random.default_rng(6)
    ns = [10, 50, 250, 1250]
    ts = [3e-7 * n ** 2.1 * 10 ** rng.normal(0, 0.02) for n in ns]
    a = fit_loglog(list(zip(ns, ts)))
    b = fit_loglog([(7.0 * n, t) for n, t in zip(ns, ts)])
    assert b.alpha == pytest.approx(a.alpha, abs=1e-12)
    assert b.sigma == pytest.approx(a.sigma, abs=1e-12)


def test_fit_errors():
    with pytest.raises(RegressionError):
        fit_loglog([(10, 1.0), (20, 2.0)])
    with pytest.raises(RegressionError):
        fit_loglog([(10, 1.0), (20, -2.0), (30, 3.0)])
    with pytest.raises(RegressionError):
        fit_loglog([(10, 1.0), (10, 2.0), (10, 3.0)])


def test_median_outlier_robust():
    recs = [("c", 100, t, 1) for t in (1.0, 2.0, 100.0)]
    assert median_per_case(recs) == [(100.0, 2.0)]


def test_median_single_sample():
    assert median_per_case([("c", 10, 7.0, 1)]) == [(10.0, 7.0)]


def test_median_even_count_lower_convention():
    recs = [("c", 10, t, 1) for t in (1.0, 2.0, 3.0, 4.0)]
    assert median_per_case(recs) == [(10.0, 2.0)]


def test_median_divides_by_iterations_first():
    recs = [("c", 10, 10.0, 5), ("c", 10, 3.0, 1), ("c", 10, 8.0, 2)]
    # per-iteration times: 2.0, 3.0, 4.0 -> median 3.0
    assert median_per_case(recs) == [(10.0, 3.0)]


def test_median_empty_group_errors():
    with pytest.raises(RegressionError):
        median_per_case([])


def test_hypothesis_exclusion_table_row():
    rep = FitReport.from_alpha_sigma(1.037, 0.014)
    assert hypothesis_excluded(rep, 3.0)       # cubic rejected
    assert hypothesis_excluded(rep, 1.0)       # strictly linear rejected
    assert not hypothesis_excluded(rep, rep.alpha)


def test_windowed_slopes_nondecreasing_for_growing_exponent():
    # local slope grows with n: t = n^(1 + log10(n)/4)
    ns = np.logspace(2, 5, 16)
    ts = ns ** (1.0 + np.log10(ns) / 4.0)
    slopes = windowed_slopes(list(zip(ns, ts)))
    assert len(slopes) >= 3
    assert slopes_nondecreasing(slopes)
    assert local_only_power_law(slopes)


def test_windowed_slopes_flat_for_power_law():
    ns = np.logspace(2, 5, 16)
    ts = 1e-5 * ns ** 1.1
    slopes = windowed_slopes(list(zip(ns, ts)))
    assert all(abs(s - 1.1) < 1e-9 for _, s in slopes)
    assert not local_only_power_law(slopes)


def test_report_round_trip_dict():
    rep = fit_loglog([(10, 1e-3), (100, 1e-2), (1000, 0.1)])
    d = rep.to_dict()
    assert d["alpha"] == rep.alpha
    assert d["ci95"] == [rep.ci95[0], rep.ci95[1]]
    assert d["sample_count"] == 3
