"""Command line: generate network families, run timed campaigns, fit the
scaling exponent, and emit SVG plots.

Exit codes: 0 success, 1 usage error, 2 runtime or case failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import benchharness as bh
from . import plots
from .netmodel import GeneratorSpec, generate_radial, load_network, save_network
from .regression import (
    fit_loglog,
    hypothesis_excluded,
    local_only_power_law,
    median_per_case,
    windowed_slopes,
)
from .sparsekit import read_matrix_market
from .ybus import assemble, equivalent_p


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise _UsageError(f"bad size range {text!r}, expected LO..HI") from None
    if lo < 2 or hi < lo:
        raise _UsageError(f"bad size range {text!r}")
    return lo, hi


def _parse_step(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise _UsageError(f"bad load step {text!r}, expected FROM:TO") from None


def build_parser() -> _Parser:
    p = _Parser(prog="gridscale",
                description="Admittance-matrix power flow scaling benchmark.")
    p.add_argument("--seed", type=int, default=0, help="campaign master seed")
    p.add_argument("--out-dir", default=".", help="directory for outputs")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="table output format")
    sub = p.add_subparsers(dest="command")

    g = sub.add_parser("generate", help="write a synthetic radial network family")
    g.add_argument("--sizes", default="100..100000", help="node range LO..HI")
    g.add_argument("--count", type=int, default=15, help="number of networks")

    b = sub.add_parser("bench", help="run a timed campaign, write sample CSV")
    b.add_argument("--subject", action="append", default=None,
                   choices=[s.value for s in bh.Subject],
                   help="repeatable; default: all power-flow subjects")
    b.add_argument("--sizes", default="300..100000", help="node range LO..HI")
    b.add_argument("--points", type=int, default=15, help="log-spaced sizes")
    b.add_argument("--reps", type=int, default=10, help="timed runs per case")
    b.add_argument("--warmup", type=int, default=1)
    b.add_argument("--p", type=float, default=2.0,
                   help="phases per branch for the upsilon subject")
    b.add_argument("--step", default="0.6:0.3", help="load step FROM:TO")
    b.add_argument("--tol", type=float, default=1e-6)
    b.add_argument("--spec", default=None, help="campaign spec JSON (overrides flags)")
    b.add_argument("--out", default="samples.csv")

    f = sub.add_parser("fit", help="fit the scaling exponent from samples")
    f.add_argument("--samples", required=True)
    f.add_argument("--subject", action="append", default=None,
                   help="restrict to these subjects")
    f.add_argument("--out", default="fit_report.json")

    pl = sub.add_parser("plot", help="emit an SVG figure")
    pl.add_argument("--kind", required=True, choices=("scatter", "spy", "iterations"))
    pl.add_argument("--samples", help="sample CSV (scatter, iterations)")
    pl.add_argument("--subject", help="subject filter for sample plots")
    pl.add_argument("--matrix", help="Matrix Market file (spy)")
    pl.add_argument("--network", help="network JSON; spy of its admittance matrix")
    pl.add_argument("--title", default="")
    pl.add_argument("--out", default="plot.svg")
    return p


def cmd_generate(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    if args.count > 0:
        lo, hi = _parse_range(args.sizes)
        sizes = bh.log_spaced_sizes(lo, hi, args.count)
        for n_target in sizes:
            m = max(2, int(round(n_target / bh._MEAN_PHASES)))
            net = generate_radial(GeneratorSpec(m=m, seed=args.seed))
            name = f"net-{n_target:07d}.json"
            save_network(net, out_dir / name)
            sys_ = assemble(net)
            rows.append({
                "name": name, "m": net.m, "n": sys_.n,
                "nnz": sys_.y_full.nnz,
                "p_equiv": round(equivalent_p(sys_.y_full, sys_.n), 4),
            })
    if args.format == "json":
        with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=1, sort_keys=True)
            fh.write("\n")
    else:
        with open(out_dir / "manifest.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["name", "m", "n", "nnz", "p_equiv"])
            for r in rows:
                w.writerow([r["name"], r["m"], r["n"], r["nnz"], r["p_equiv"]])
    print(f"wrote {len(rows)} networks to {out_dir}")
    return 0


def cmd_bench(args) -> int:
    if args.spec:
        spec = bh.CampaignSpec.load(args.spec)
    else:
        subjects = args.subject or ["fixed-point", "const-admittance", "ybus"]
        lo, hi = _parse_range(args.sizes)
        load_from, load_to = _parse_step(args.step)
        spec = bh.CampaignSpec(
            [bh.Subject(s) for s in subjects],
            size_min=lo, size_max=hi, size_count=args.points,
            repetitions=args.reps, warmup=args.warmup, seed=args.seed,
            p=args.p, load_from=load_from, load_to=load_to, tolerance=args.tol,
        )
    out_path = Path(args.out_dir) / args.out
    out_path.parent.mkdir(parents=True, exist_ok=True)
    any_failed = False
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(bh.CSV_HEADER)

        def sink(s):
            nonlocal any_failed
            any_failed |= s.failed
            writer.writerow([s.case_id, s.subject.value, s.n, s.nnz,
                             s.run_index, f"{s.t_seconds:.9e}", s.iterations,
                             int(s.failed)])
            fh.flush()

        bh.run_campaign(spec, sink=sink)
    print(f"samples written to {out_path}")
    return 2 if any_failed else 0


def _fit_by_subject(samples, subjects=None):
    by_subject: dict[str, list] = {}
    for s in samples:
        if s.failed:
            continue
        if subjects and s.subject.value not in subjects:
            continue
        by_subject.setdefault(s.subject.value, []).append(s.record())
    results = {}
    for subject, records in sorted(by_subject.items()):
        points = median_per_case(records)
        if len(points) < 3:
            raise bh.BenchError(
                f"subject {subject}: fewer than 3 usable cases"
            )
        report = fit_loglog(points)
        slopes = windowed_slopes(points)
        results[subject] = (report, points, slopes)
    return results


_SUBJECT_LABELS = {
    "fixed-point": "(i) nonlinear fixed point, per iteration",
    "const-admittance": "(ii) constant admittance load",
    "jacobian": "(iii) implicit Jacobian sparse solve",
    "ybus": "(iv) admittance matrix sparse solve",
    "upsilon": "(v) admittance-like random matrix",
}


def cmd_fit(args) -> int:
    samples = bh.read_samples_csv(args.samples)
    results = _fit_by_subject(samples, args.subject)
    if not results:
        raise bh.BenchError("no usable samples")
    doc = {}
    print(f"{'subject':<42} {'alpha':>7} {'sigma':>7} {'r2':>7}  "
          f"{'CI95':>18}  {'excl a=1':>8} {'excl a=3':>8}")
    for subject, (rep, points, slopes) in results.items():
        label = _SUBJECT_LABELS.get(subject, subject)
        ci = f"[{rep.ci95[0]:.3f}, {rep.ci95[1]:.3f}]"
        print(f"{label:<42} {rep.alpha:>7.3f} {rep.sigma:>7.3f} "
              f"{rep.r2:>7.3f}  {ci:>18}  "
              f"{str(hypothesis_excluded(rep, 1.0)):>8} "
              f"{str(hypothesis_excluded(rep, 3.0)):>8}")
        if local_only_power_law(slopes):
            print(f"  warning: {subject}: gradient grows with n; "
                  "power law only locally valid")
        doc[subject] = rep.to_dict()
        doc[subject]["windowed_slopes"] = [[c, s] for c, s in slopes]
        doc[subject]["excludes_linear"] = hypothesis_excluded(rep, 1.0)
        doc[subject]["excludes_cubic"] = hypothesis_excluded(rep, 3.0)
    out_path = Path(args.out_dir) / args.out
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
    if args.format == "csv":
        table = out_path.with_suffix(".csv")
        with open(table, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["subject", "alpha", "sigma", "r2", "ci_lo", "ci_hi",
                        "excludes_linear", "excludes_cubic"])
            for subject, (rep, _, _) in results.items():
                w.writerow([subject, f"{rep.alpha:.6f}", f"{rep.sigma:.6f}",
                            f"{rep.r2:.6f}", f"{rep.ci95[0]:.6f}",
                            f"{rep.ci95[1]:.6f}",
                            int(hypothesis_excluded(rep, 1.0)),
                            int(hypothesis_excluded(rep, 3.0))])
    return 0


def cmd_plot(args) -> int:
    out_path = Path(args.out_dir) / args.out
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if args.kind == "spy":
        if args.matrix:
            m = read_matrix_market(args.matrix)
        elif args.network:
            m = assemble(load_network(args.network)).y_full
        else:
            raise _UsageError("spy needs --matrix or --network")
        plots.spy_svg(m, out_path, title=args.title)
    else:
        if not args.samples:
            raise _UsageError(f"{args.kind} needs --samples")
        samples = bh.read_samples_csv(args.samples)
        subjects = [args.subject] if args.subject else None
        if args.kind == "scatter":
            results = _fit_by_subject(samples, subjects)
            if len(results) != 1:
                raise _UsageError(
                    "scatter plots one subject; pass --subject "
                    f"(found: {', '.join(results) or 'none'})"
                )
            subject, (rep, points, _) = next(iter(results.items()))
            title = args.title or _SUBJECT_LABELS.get(subject, subject)
            plots.scatter_fit_svg(points, rep, out_path, title=title)
        else:
            pts = {}
            for s in samples:
                if s.failed or (subjects and s.subject.value not in subjects):
                    continue
                pts.setdefault(s.case_id, (s.n, []))[1].append(s.iterations)
            data = []
            for n, its in pts.values():
                its.sort()
                data.append((n, its[(len(its) - 1) // 2]))
            if not data:
                raise bh.BenchError("no usable samples for iterations plot")
            plots.iterations_scatter_svg(sorted(data), out_path, title=args.title)
    print(f"wrote {out_path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return 0
        handler = {
            "generate": cmd_generate,
            "bench": cmd_bench,
            "fit": cmd_fit,
            "plot": cmd_plot,
        }[args.command]
        return handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (bh.BenchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
