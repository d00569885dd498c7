"""Command-line pipeline: ingest, propagate, analyze, simulate, report.

Every subcommand prints one JSON summary to stdout and writes its artifacts
(plus the resolved configuration) under ``--out``. Exit codes: 0 success,
1 usage error, 2 data error. All randomness flows from ``--seed``, so a
repeated invocation with the same configuration produces identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Sequence

from . import depgraph, distfit, propagation, regression, survival
from .model import ModelParams, SyntheticCorpusSpec, generate_corpus
from .versioning import EmptyCorpusError, next_release_agreement

__all__ = ["main", "run"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        raise _UsageError(message)


_DATA_ERRORS = (
    depgraph.FormatError,
    depgraph.CycleDetectedError,
    distfit.NonConvergenceError,
    EmptyCorpusError,
    survival.EmptyInputError,
    ValueError,
    OSError,
)


def _build_parser() -> _Parser:
    parser = _Parser(prog="vulnlife", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", type=Path, default=None, help="output directory")
        return p

    def add_sample_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--samples", type=Path, required=True, help="samples CSV")
        p.add_argument("--duration", choices=["cumulative", "level"], default="cumulative")
        p.add_argument("--include-censored-as-events", action="store_true")

    p = add("ingest", "load and validate a corpus, derive successor edges")
    p.add_argument("--releases", type=Path, required=True)
    p.add_argument("--deps", type=Path, required=True)
    p.add_argument("--cves", type=Path, default=None)

    p = add("propagate", "mark affected releases per advisory and extract samples")
    p.add_argument("--releases", type=Path, required=True)
    p.add_argument("--deps", type=Path, required=True)
    p.add_argument("--cves", type=Path, required=True)
    p.add_argument("--max-level", type=int, default=10)

    p = add("survival", "stratified Kaplan-Meier curves and per-level stats")
    add_sample_opts(p)

    p = add("fit", "fit candidate distributions and rank them")
    add_sample_opts(p)
    p.add_argument("--bootstrap", type=int, default=250, help="bootstrap replicates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--families", nargs="+", choices=list(distfit.FAMILIES),
                   default=list(distfit.FAMILIES))

    p = add("regress", "least squares of per-level durations against level")
    p.add_argument("--samples", type=Path, default=None, help="samples CSV")
    p.add_argument("--stats", type=Path, default=None, help="per-level stats CSV")
    p.add_argument("--duration", choices=["cumulative", "level"], default="cumulative")
    p.add_argument("--include-censored-as-events", action="store_true")
    p.add_argument("--target", choices=["mean", "median", "both"], default="both")
    p.add_argument("--per-sample", action="store_true",
                   help="regress on raw samples instead of per-level aggregates")

    p = add("simulate", "emit a synthetic corpus from the resolution model")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--k", type=float, default=0.02)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--per-level", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = add("report", "plot-ready CSVs: curves, stats, violins, regression")
    add_sample_opts(p)

    return parser


def _config_dict(args: argparse.Namespace) -> dict:
    config = {}
    for key, value in sorted(vars(args).items()):
        if key == "func":
            continue
        config[key] = str(value) if isinstance(value, Path) else value
    return config


def _prepare_out(args: argparse.Namespace) -> Path | None:
    out: Path | None = args.out
    if out is None:
        return None
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "run_config.json", "w", encoding="utf-8") as handle:
        json.dump(_config_dict(args), handle, indent=2, sort_keys=True)
        handle.write("\n")
    return out


def _emit(summary: dict) -> None:
    json.dump(summary, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _load_graph(args: argparse.Namespace) -> depgraph.DependencyGraph:
    graph = depgraph.ingest_graph(args.releases, args.deps)
    depgraph.compute_next_edges(graph)
    return graph


def _cmd_ingest(args: argparse.Namespace) -> int:
    out = _prepare_out(args)
    graph = _load_graph(args)
    summary = {
        "subcommand": "ingest",
        "releases": len(graph),
        "artifacts": len(graph.artifacts()),
        "dep_edges": len(graph.dep_edges),
        "next_edges": len(graph.next_edges),
        "diagnostics": graph.diagnostics.as_dict(),
        "config": _config_dict(args),
    }
    entries = []
    for artifact in graph.artifacts():
        siblings = graph.releases_of(artifact)
        versions = [r.version for r in siblings]
        for rel in siblings:
            candidates = [v for v in versions if v != rel.version]
            if any(v > rel.version for v in candidates):
                entries.append((rel.version, candidates))
    if entries:
        summary["next_release_agreement"] = next_release_agreement(entries)
    if args.cves is not None:
        cves = depgraph.ingest_cves(args.cves, graph)
        summary["cves"] = len(cves)
        summary["diagnostics"] = graph.diagnostics.as_dict()
    if out is not None:
        with open(out / "graph_summary.json", "w", encoding="utf-8") as handle:
            json.dump(summary, handle, indent=2)
            handle.write("\n")
    _emit(summary)
    return 0


def _cmd_propagate(args: argparse.Namespace) -> int:
    out = _prepare_out(args)
    if args.max_level < 0:
        raise _UsageError("--max-level must be >= 0")
    graph = _load_graph(args)
    cves = depgraph.ingest_cves(args.cves, graph)
    raw = propagation.propagate_all(graph, cves, max_level=args.max_level, record=True)
    kept, report = propagation.filter_samples(raw)
    if out is not None:
        propagation.write_samples_csv(kept, out / "samples.csv")
    levels = sorted({s.level for s in kept})
    _emit(
        {
            "subcommand": "propagate",
            "cves": len(cves),
            "raw_samples": len(raw),
            "samples": len(kept),
            "censored": sum(1 for s in kept if s.censored),
            "levels": levels,
            "filtered": report.as_dict(),
            "diagnostics": graph.diagnostics.as_dict(),
            "config": _config_dict(args),
        }
    )
    return 0


def _cmd_survival(args: argparse.Namespace) -> int:
    out = _prepare_out(args)
    samples = propagation.read_samples_csv(args.samples)
    curves = survival.stratified_survival(samples, args.duration) if samples else {}
    stats = survival.level_stats(samples, args.duration, args.include_censored_as_events)
    if out is not None:
        survival.write_curves_csv(curves, out / "survival_curves.csv")
        survival.write_stats_csv(stats, out / "level_stats.csv")
    if not samples:
        print("warning: no samples; wrote headers only", file=sys.stderr)
    _emit(
        {
            "subcommand": "survival",
            "samples": len(samples),
            "levels": sorted(curves),
            "stats": [vars(s) for s in stats],
            "config": _config_dict(args),
        }
    )
    return 0


def _fit_durations(args: argparse.Namespace) -> list[float]:
    samples = propagation.read_samples_csv(args.samples)
    pairs = survival.sample_durations(samples, args.duration, args.include_censored_as_events)
    return [days for days, censored in pairs if not censored]


def _cmd_fit(args: argparse.Namespace) -> int:
    out = _prepare_out(args)
    durations = _fit_durations(args)
    fits = [distfit.fit_mle(family, durations) for family in args.families]
    fits = [
        distfit.with_goodness_of_fit(fit, durations, replicates=args.bootstrap, seed=args.seed)
        for fit in fits
    ]
    ranked = distfit.aic_rank(fits)
    if out is not None:
        with open(out / "fits.json", "w", encoding="utf-8") as handle:
            json.dump(distfit.fit_report(ranked), handle, indent=2)
            handle.write("\n")
        for fit in ranked:
            distfit.write_qq_csv(distfit.qq_points(fit, durations), out / f"qq_{fit.family}.csv")
    _emit(
        {
            "subcommand": "fit",
            "n": len(durations),
            "fits": distfit.fit_report(ranked),
            "config": _config_dict(args),
        }
    )
    return 0


def _read_stats_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or "level" not in reader.fieldnames:
            raise ValueError(f"{path}: stats CSV needs a 'level' column")
        return list(reader)


def _regression_points(args: argparse.Namespace, target: str) -> list[tuple[float, float]]:
    if args.stats is not None:
        rows = _read_stats_csv(args.stats)
        if rows and target not in rows[0]:
            raise ValueError(f"{args.stats}: no '{target}' column")
        return [(float(r["level"]), float(r[target])) for r in rows]
    samples = propagation.read_samples_csv(args.samples)
    if args.per_sample:
        usable = [s for s in samples if not s.censored or args.include_censored_as_events]
        field = args.duration
        return [
            (float(s.level), float(s.cumulative_days if field == "cumulative" else s.level_days))
            for s in usable
        ]
    stats = survival.level_stats(samples, args.duration, args.include_censored_as_events)
    return [(float(s.level), s.mean if target == "mean" else s.median) for s in stats]


def _cmd_regress(args: argparse.Namespace) -> int:
    if (args.samples is None) == (args.stats is None):
        raise _UsageError("give exactly one of --samples or --stats")
    if args.per_sample and args.stats is not None:
        raise _UsageError("--per-sample needs --samples")
    out = _prepare_out(args)
    targets = ["mean", "median"] if args.target == "both" else [args.target]
    results = []
    for target in targets:
        fit = regression.ols_fit(_regression_points(args, target))
        slope_months, intercept_months = regression.months_rule(fit)
        results.append(
            {
                "target": target,
                "intercept": fit.intercept,
                "slope": fit.slope,
                "r2": fit.r_squared,
                "n": fit.n_points,
                "slope_months": slope_months,
                "intercept_months": intercept_months,
            }
        )
    if out is not None:
        with open(out / "regression.json", "w", encoding="utf-8") as handle:
            json.dump(results, handle, indent=2)
            handle.write("\n")
    _emit({"subcommand": "regress", "fits": results, "config": _config_dict(args)})
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    if args.out is None:
        raise _UsageError("simulate requires --out")
    out = _prepare_out(args)
    params = ModelParams(alpha=args.alpha, k=args.k, c=args.c)
    spec = SyntheticCorpusSpec(
        depth=args.depth, artifacts_per_level=args.per_level, seed=args.seed
    )
    graph, cves = generate_corpus(spec, params)
    depgraph.write_releases_csv(graph, out / "releases.csv")
    depgraph.write_deps_csv(graph, out / "deps.csv")
    depgraph.write_cves_json(cves, out / "cves.json")
    _emit(
        {
            "subcommand": "simulate",
            "releases": len(graph),
            "dep_edges": len(graph.dep_edges),
            "cves": len(cves),
            "expected_slope_days_per_level": params.alpha / params.k,
            "files": ["releases.csv", "deps.csv", "cves.json"],
            "config": _config_dict(args),
        }
    )
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    if args.out is None:
        raise _UsageError("report requires --out")
    out = _prepare_out(args)
    samples = propagation.read_samples_csv(args.samples)

    curves = survival.stratified_survival(samples, args.duration) if samples else {}
    survival.write_curves_csv(curves, out / "survival_curves.csv")
    stats = survival.level_stats(samples, args.duration, args.include_censored_as_events)
    survival.write_stats_csv(stats, out / "level_stats.csv")

    with open(out / "violin_source.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["level", "duration_days"])
        for s in samples:
            if s.censored and not args.include_censored_as_events:
                continue
            days = s.cumulative_days if args.duration == "cumulative" else s.level_days
            writer.writerow([s.level, days])

    fits: dict[str, regression.RegressionResult] = {}
    if len(stats) >= 2:
        for target in ("mean", "median"):
            points = [(float(s.level), getattr(s, target)) for s in stats]
            fits[target] = regression.ols_fit(points)
    with open(out / "regression_points.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["level", "mean", "median", "fit_mean", "fit_median"])
        for s in stats:
            row = [s.level, f"{s.mean:.6g}", f"{s.median:g}"]
            for target in ("mean", "median"):
                row.append(f"{fits[target].predict(s.level):.6g}" if target in fits else "")
            writer.writerow(row)
    regression_summary = [
        {
            "target": target,
            "intercept": fit.intercept,
            "slope": fit.slope,
            "r2": fit.r_squared,
            "n": fit.n_points,
        }
        for target, fit in fits.items()
    ]
    with open(out / "regression.json", "w", encoding="utf-8") as handle:
        json.dump(regression_summary, handle, indent=2)
        handle.write("\n")

    if not samples:
        print("warning: no samples; wrote headers only", file=sys.stderr)
    _emit(
        {
            "subcommand": "report",
            "samples": len(samples),
            "levels": sorted({s.level for s in samples}),
            "regression": regression_summary,
            "files": [
                "survival_curves.csv",
                "level_stats.csv",
                "violin_source.csv",
                "regression_points.csv",
                "regression.json",
            ],
            "config": _config_dict(args),
        }
    )
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "propagate": _cmd_propagate,
    "survival": _cmd_survival,
    "fit": _cmd_fit,
    "regress": _cmd_regress,
    "simulate": _cmd_simulate,
    "report": _cmd_report,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand is None:
            raise _UsageError("a subcommand is required")
        return _COMMANDS[args.subcommand](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run())
