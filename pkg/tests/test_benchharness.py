import numpy as np
import pytest

from gridscale.benchharness import (
    BenchError,
    BenchSample,
    CampaignSpec,
    Subject,
    log_spaced_sizes,
    make_case,
    read_samples_csv,
    run_campaign,
    run_case,
    write_samples_csv,
)


def test_log_spaced_sizes_eleven_points():
    sizes = log_spaced_sizes(3000, 30000, 11)
    assert len(sizes) == 11
    assert sizes[0] == 3000 and sizes[-1] == 30000
    assert sizes == sorted(sizes)
    ratios = [b / a for a, b in zip(sizes, sizes[1:])]
    assert max(ratios) / min(ratios) < 1.02


def test_log_spaced_sizes_dedupes():
    sizes = log_spaced_sizes(10, 20, 30)
    assert len(sizes) == len(set(sizes))
    assert sizes == sorted(sizes)


def test_log_spaced_rejects_bad_grid():
    with pytest.raises(BenchError):
        log_spaced_sizes(100, 10, 5)


def test_run_case_sample_count():
    case = make_case(Subject.YbusSolve, 60, seed=1)
    samples = run_case(case, repetitions=10, warmup=1)
    assert len(samples) == 10
    assert [s.run_index for s in samples] == list(range(10))
    assert all(not s.failed for s in samples)
    assert all(s.t_seconds > 0 for s in samples)
    assert all(s.iterations == 1 for s in samples)
    assert all(s.n == case.n and s.nnz == case.nnz for s in samples)


def test_single_solve_deterministic_solutions():
    from gridscale.netmodel import GeneratorSpec, generate_radial
    from gridscale.sparsekit import lu_factorize
    from gridscale.ybus import assemble

    net = generate_radial(GeneratorSpec(m=40, seed=2))
    sys = assemble(net)
    rng = np.random.default_rng(0)
    rhs = rng.standard_normal(sys.n_load) + 1j * rng.standard_normal(sys.n_load)
    x1 = lu_factorize(sys.y_LL).solve(rhs)
    x2 = lu_factorize(sys.y_LL).solve(rhs)
    assert np.array_equal(x1, x2)


def test_fixed_point_case_records_iterations():
    case = make_case(Subject.FixedPointPF, 80, seed=3)
    samples = run_case(case, repetitions=3, warmup=1)
    assert all(s.iterations >= 1 for s in samples)
    its = {s.iterations for s in samples}
    assert len(its) == 1  # deterministic warm-start re-solve


def test_failed_case_flagged_not_raised():
    case = make_case(Subject.FixedPointPF, 40, seed=0, load_to=1e7)
    samples = run_case(case, repetitions=4, warmup=0)
    assert len(samples) == 1
    assert samples[0].failed


def test_campaign_empty_subjects():
    spec = CampaignSpec([], size_min=10, size_max=100, size_count=3)
    assert run_campaign(spec) == []


def test_campaign_row_count_and_order():
    spec = CampaignSpec(
        [Subject.YbusSolve, Subject.ConstAdmittancePF],
        size_min=40, size_max=90, size_count=3,
        repetitions=10, warmup=0, seed=4,
    )
    streamed = []
    samples = run_campaign(spec, sink=streamed.append)
    assert len(samples) == 2 * 3 * 10
    assert samples == streamed
    # ascending problem size, stable order, run_index inner
    keys = [(s.case_id, s.run_index) for s in samples]
    assert keys == sorted(keys, key=lambda k: (
        [c for c in samples if c.case_id == k[0]][0].n,
        spec.subjects.index([c for c in samples if c.case_id == k[0]][0].subject),
        k[1],
    ))


def test_campaign_deterministic_metadata():
    spec = CampaignSpec([Subject.FixedPointPF], size_min=50, size_max=120,
                        size_count=2, repetitions=3, warmup=0, seed=5)
    a = run_campaign(spec)
    b = run_campaign(spec)
    assert [(s.case_id, s.n, s.nnz, s.iterations) for s in a] == \
        [(s.case_id, s.n, s.nnz, s.iterations) for s in b]


def test_upsilon_case_counts():
    spec = CampaignSpec([Subject.UpsilonSolve], size_min=60, size_max=160,
                        size_count=3, repetitions=10, warmup=1, seed=6, p=2.0)
    samples = run_campaign(spec)
    assert len(samples) == 30
    assert all(s.iterations == 1 for s in samples)
    for s in samples:
        k = int(round(s.n * 5.0 / 2.0))
        assert s.nnz == 2 * k + s.n


def test_csv_round_trip(tmp_path):
    case = make_case(Subject.ConstAdmittancePF, 50, seed=7)
    samples = run_case(case, repetitions=5, warmup=0)
    path = tmp_path / "samples.csv"
    write_samples_csv(path, samples)
    header = path.read_text().splitlines()[0]
    assert header == "case_id,subject,n,nnz,run_index,t_seconds,iterations,failed"
    back = read_samples_csv(path)
    assert len(back) == 5
    for a, b in zip(samples, back):
        assert (a.case_id, a.subject, a.n, a.nnz, a.run_index, a.iterations,
                a.failed) == (b.case_id, b.subject, b.n, b.nnz, b.run_index,
                              b.iterations, b.failed)
        assert b.t_seconds == pytest.approx(a.t_seconds, rel=1e-8)


def test_campaign_spec_json_round_trip(tmp_path):
    spec = CampaignSpec([Subject.UpsilonSolve, Subject.YbusSolve],
                        size_min=3000, size_max=30000, size_count=11,
                        seed=9, p=3.0)
    path = tmp_path / "spec.json"
    spec.save(path)
    back = CampaignSpec.load(path)
    assert back.to_dict() == spec.to_dict()


def test_timing_covers_factor_and_solve_phases_only():
    from gridscale.netmodel import GeneratorSpec, generate_radial
    from gridscale.powerflow import solve_constant_admittance
    from gridscale.ybus import assemble

    net = generate_radial(GeneratorSpec(m=60, seed=8))
    sys = assemble(net, constant_power_as_impedance=True)
    sol = solve_constant_admittance(sys)
    assert sol.timings.total() == sol.timings.factor_seconds + sum(
        sol.timings.per_solve_seconds
    )
    assert sol.timings.factor_seconds > 0
    assert len(sol.timings.per_solve_seconds) == 1
