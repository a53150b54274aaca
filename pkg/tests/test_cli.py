import csv
import json

import numpy as np
import pytest

from gridscale.cli import main
from gridscale.netmodel import load_network
from gridscale.sparsekit import write_matrix_market
from gridscale.ybus import UpsilonSpec, generate_upsilon


def run_cli(*argv):
    return main(list(argv))


def test_no_command_prints_help(capsys):
    assert run_cli() == 0
    assert "generate" in capsys.readouterr().out


def test_generate_writes_networks_and_manifest(tmp_path, capsys):
    code = run_cli("--out-dir", str(tmp_path), "--seed", "7",
                   "generate", "--sizes", "40..200", "--count", "4")
    assert code == 0
    manifest = (tmp_path / "manifest.csv").read_text().splitlines()
    assert manifest[0] == "name,m,n,nnz,p_equiv"
    assert len(manifest) == 5
    ns = [int(r.split(",")[2]) for r in manifest[1:]]
    assert ns == sorted(ns)
    net = load_network(tmp_path / manifest[1].split(",")[0])
    assert net.m >= 2


def test_generate_count_zero(tmp_path):
    assert run_cli("--out-dir", str(tmp_path), "generate", "--count", "0") == 0
    assert (tmp_path / "manifest.csv").read_text().splitlines() == [
        "name,m,n,nnz,p_equiv"
    ]


def test_generate_deterministic_bytes(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        assert run_cli("--out-dir", str(d), "--seed", "3",
                       "generate", "--sizes", "40..120", "--count", "3") == 0
    for f in sorted(p.name for p in d1.iterdir()):
        assert (d1 / f).read_bytes() == (d2 / f).read_bytes()


def test_usage_error_exit_code_1(tmp_path):
    assert run_cli("generate", "--sizes", "banana") == 1
    assert run_cli("--bogus-flag") == 1
    assert run_cli("plot", "--kind", "spy", "--out", "x.svg") == 1


def test_bench_fit_plot_pipeline(tmp_path, capsys):
    code = run_cli("--out-dir", str(tmp_path), "--seed", "5", "bench",
                   "--subject", "ybus", "--sizes", "40..160", "--points", "4",
                   "--reps", "10", "--out", "samples.csv")
    assert code == 0
    rows = list(csv.DictReader(open(tmp_path / "samples.csv")))
    assert len(rows) == 40
    assert all(r["failed"] == "0" for r in rows)

    code = run_cli("--out-dir", str(tmp_path), "fit",
                   "--samples", str(tmp_path / "samples.csv"),
                   "--out", "report.json")
    assert code == 0
    out = capsys.readouterr().out
    assert "alpha" in out
    doc = json.loads((tmp_path / "report.json").read_text())
    assert "ybus" in doc
    assert doc["ybus"]["sample_count"] == 4
    assert (tmp_path / "report.csv").exists()

    code = run_cli("--out-dir", str(tmp_path), "plot", "--kind", "scatter",
                   "--samples", str(tmp_path / "samples.csv"),
                   "--subject", "ybus", "--out", "scatter.svg")
    assert code == 0
    assert (tmp_path / "scatter.svg").read_text().count("<circle") == 4


def test_bench_rerun_same_seed_same_metadata(tmp_path):
    for name in ("s1.csv", "s2.csv"):
        assert run_cli("--out-dir", str(tmp_path), "--seed", "11", "bench",
                       "--subject", "fixed-point", "--sizes", "40..80",
                       "--points", "2", "--reps", "3", "--out", name) == 0
    r1 = list(csv.DictReader(open(tmp_path / "s1.csv")))
    r2 = list(csv.DictReader(open(tmp_path / "s2.csv")))
    keep = ("case_id", "n", "nnz", "run_index", "iterations", "failed")
    assert [[r[k] for k in keep] for r in r1] == [[r[k] for k in keep] for r in r2]


def test_bench_spec_file(tmp_path):
    spec_path = tmp_path / "campaign.json"
    spec_path.write_text(json.dumps({
        "subjects": ["upsilon"], "size_min": 60, "size_max": 120,
        "size_count": 2, "repetitions": 3, "warmup": 0, "seed": 2, "p": 2.0,
    }))
    assert run_cli("--out-dir", str(tmp_path), "bench", "--spec",
                   str(spec_path), "--out", "u.csv") == 0
    rows = list(csv.DictReader(open(tmp_path / "u.csv")))
    assert len(rows) == 6
    assert {r["subject"] for r in rows} == {"upsilon"}


def test_bench_failure_exit_code_2(tmp_path):
    assert run_cli("--out-dir", str(tmp_path), "bench", "--subject",
                   "fixed-point", "--sizes", "40..60", "--points", "2",
                   "--reps", "2", "--step", "0.6:1000000", "--out", "f.csv") == 2


def test_fit_requires_enough_cases(tmp_path):
    assert run_cli("--out-dir", str(tmp_path), "bench", "--subject", "ybus",
                   "--sizes", "40..60", "--points", "2", "--reps", "2",
                   "--out", "few.csv") == 0
    assert run_cli("fit", "--samples", str(tmp_path / "few.csv")) == 2


def test_fit_missing_file_is_runtime_error(tmp_path):
    assert run_cli("fit", "--samples", str(tmp_path / "nope.csv")) == 2


def test_plot_spy_from_matrix_market(tmp_path):
    m = generate_upsilon(UpsilonSpec(n=104, p=2.5, seed=0))
    mtx = tmp_path / "u.mtx"
    write_matrix_market(m, mtx)
    assert run_cli("--out-dir", str(tmp_path), "plot", "--kind", "spy",
                   "--matrix", str(mtx), "--out", "spy.svg") == 0
    assert (tmp_path / "spy.svg").read_text().count('fill="#1f3d7a"') == 780


def test_plot_iterations(tmp_path):
    assert run_cli("--out-dir", str(tmp_path), "--seed", "1", "bench",
                   "--subject", "fixed-point", "--sizes", "40..120",
                   "--points", "3", "--reps", "3", "--out", "s.csv") == 0
    assert run_cli("--out-dir", str(tmp_path), "plot", "--kind", "iterations",
                   "--samples", str(tmp_path / "s.csv"),
                   "--out", "iters.svg") == 0
    assert (tmp_path / "iters.svg").read_text().count("<circle") == 3


def test_generate_json_manifest(tmp_path):
    assert run_cli("--out-dir", str(tmp_path), "--format", "json",
                   "generate", "--sizes", "40..80", "--count", "2") == 0
    doc = json.loads((tmp_path / "manifest.json").read_text())
    assert len(doc) == 2
    assert {"name", "m", "n", "nnz", "p_equiv"} <= set(doc[0])
