"""Command-line runner.

Subcommands: ``run``, ``table-example1``, ``basis-dump``, ``cdf``, ``verify``.
Failures exit with status 1 and a JSON error on stderr naming the stage
(validation, basis, conditioning, fitting, io).
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bspline import eval_all
from .bench import get_benchmark, relative_variance_error
from .config import ConfigError, digest, validate
from .decomposition import (
    SddExpansion,
    SurrogateSample,
    draw_inputs,
    empirical_cdf,
    fit_quadrature,
    fit_regression,
    sample_surrogate,
    term_count,
)
from .errors import ConditioningError
from .experiments import table_example1
from .knots import KnotSequence, from_config as knots_from_config, open_uniform
from .measures import MeasureSpec, presets
from .orthobasis import eval_orthonormal, whiten
from .reference import build_reference

log = logging.getLogger("sdd")


class StageError(Exception):
    def __init__(self, stage, message):
        self.stage = stage
        super().__init__(message)


@contextlib.contextmanager
def stage(name):
    try:
        yield
    except StageError:
        raise
    except ConditioningError as exc:
        raise StageError("conditioning", str(exc)) from exc
    except (ValueError, KeyError, TypeError, OSError, ArithmeticError) as exc:
        raise StageError("io" if isinstance(exc, OSError) else name, str(exc)) from exc


def fmt(v):
    """Full-precision scientific notation (17 significant digits)."""
    return format(float(v), ".16e")


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _subset_label(u):
    return " ".join(str(k) for k in u)


# -- run ----------------------------------------------------------------------


def _read_samples(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"{path}: need a header row and at least one sample")
    data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ValueError(f"{path}: expected N input columns and one output column")
    return SurrogateSample(data[:, :-1], data[:, -1])


def _coordinate_specs(cfg, N):
    coords = cfg["coordinates"]
    if isinstance(coords, dict):
        coords = [coords] * N
    if len(coords) != N:
        raise ValueError(f"{len(coords)} coordinate specs for {N} inputs")
    return coords


def _build_bases(cfg, default_measures, N):
    specs = _coordinate_specs(cfg, N)
    measures = []
    for k, spec in enumerate(specs):
        if "measure" in spec:
            measures.append(MeasureSpec.from_dict(spec["measure"]))
        elif default_measures is not None:
            measures.append(default_measures[k])
        else:
            raise ValueError(f"coordinate {k}: a measure is required for external samples")
    method = cfg["method"]
    if method == "sdd":
        return [whiten(knots_from_config(s["knots"], m.a, m.b), m) for s, m in zip(specs, measures)], cfg["S"]
    for s in specs:
        extra = set(s["knots"]) - {"p"}
        if extra - {"elements"} or s["knots"].get("elements", 1) != 1:
            raise ValueError(f"{method} takes only the degree p per coordinate (no interior knots)")
    return build_reference(method, measures, [s["knots"]["p"] for s in specs], cfg.get("S"))


def execute(cfg, threads=None):
    """Run a validated config; returns ``{filename: text}`` plus timings."""
    timings = {}
    t0 = time.perf_counter()
    with stage("validation"):
        bench = samples = None
        if "benchmark" in cfg:
            spec = cfg["benchmark"]
            spec = {"name": spec} if isinstance(spec, str) else spec
            bench = get_benchmark(spec["name"], **spec.get("params", {}))
            N = bench.dim
        else:
            with stage("io"):
                samples = _read_samples(cfg["samples"]["path"])
            N = samples.x.shape[1]
        S = cfg.get("S", N)
        if S > N:
            raise ValueError(f"truncation S={S} exceeds the number of inputs N={N}")
        _coordinate_specs(cfg, N)
    with stage("basis"):
        bases, S = _build_bases(cfg, bench.measures.components if bench else None, N)
    timings["basis"] = time.perf_counter() - t0

    t1 = time.perf_counter()
    fitting = cfg["fitting"]
    with stage("fitting"):
        if fitting["kind"] == "quadrature":
            e = fit_quadrature(
                bench.func, bases, S, bench.breakpoints,
                points_per_element=fitting.get("points_per_element", 12),
                tol=fitting.get("tol"), threads=threads,
            )
        else:
            if samples is None:
                ncoef = term_count(N, S, tuple(b.n for b in bases))
                count = fitting.get("samples", 3 * ncoef)
                x = draw_inputs(bench.measures, count, fitting["seed"], threads)
                samples = SurrogateSample(x, bench.func(x))
            e = fit_regression(samples, bases, S, fitting.get("ridge"), fitting.get("min_ratio", 2.0))
    timings["fitting"] = time.perf_counter() - t1

    files = {}
    out = cfg["outputs"]
    with stage("fitting"):
        variance = e.variance()
        if out["expansion"]:
            files["expansion.json"] = e.dumps()
        if out["coefficients"]:
            rows = [["", "", fmt(e.y0)]]
            rows += [[_subset_label(u), _subset_label(i), fmt(c)] for (u, i), c in zip(e.terms, e.coefficients)]
            files["coefficients.csv"] = _csv_text(["subset", "index", "coefficient"], rows)
        if out["statistics"]:
            exact_mean = exact_var = rel = ""
            if bench is not None and bench.variance:
                exact_mean, exact_var = fmt(bench.mean), fmt(bench.variance)
                rel = fmt(relative_variance_error(variance, bench.variance))
            files["statistics.csv"] = _csv_text(
                ["method", "N", "S", "basis_count", "mean", "variance",
                 "exact_mean", "exact_variance", "relative_error"],
                [[cfg["method"], N, S, len(e), fmt(e.mean()), fmt(variance), exact_mean, exact_var, rel]],
            )
        if out["variance_decomposition"]:
            parts = e.variance_by_subset()
            rows = [[_subset_label(u), fmt(v), fmt(v / variance if variance > 0 else 0.0)] for u, v in parts.items()]
            files["variance_decomposition.csv"] = _csv_text(["subset", "variance", "fraction"], rows)
        if out["cdf"]:
            t2 = time.perf_counter()
            values, probs = empirical_cdf(sample_surrogate(e, cfg["mcs"]["count"], cfg["mcs"]["seed"], threads=threads))
            files["cdf.csv"] = _csv_text(["value", "probability"], [[fmt(v), fmt(p)] for v, p in zip(values, probs)])
            timings["sampling"] = time.perf_counter() - t2
    seeds = {"mcs": cfg["mcs"]["seed"]}
    if "seed" in fitting:
        seeds["fitting"] = fitting["seed"]
    manifest = {
        "tool": "sdd",
        "version": __version__,
        "config_sha256": digest(cfg),
        "seeds": seeds,
        "config": cfg,
        "outputs": {name: hashlib.sha256(text.encode()).hexdigest() for name, text in sorted(files.items())},
    }
    files["manifest.json"] = json.dumps(manifest, indent=1, sort_keys=True) + "\n"
    return files, timings


def cmd_run(args):
    with stage("io"):
        raw = json.loads(Path(args.config).read_text())
    with stage("validation"):
        try:
            cfg = validate(raw)
        except ConfigError as exc:
            raise StageError("validation", str(exc)) from exc
        if "samples" in cfg:
            path = Path(cfg["samples"]["path"])
            if not path.is_absolute():
                cfg["samples"]["path"] = str(Path(args.config).resolve().parent / path)
        if args.seed is not None:
            cfg["mcs"]["seed"] = args.seed
            if cfg["fitting"]["kind"] == "regression" and "samples" not in cfg:
                cfg["fitting"]["seed"] = args.seed
    files, timings = execute(cfg, args.threads)
    with stage("io"):
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out / name).write_text(text)
        (out / "timings.json").write_text(json.dumps(timings, indent=1, sort_keys=True) + "\n")
    for name in files:
        print(out / name)
    return 0


# -- other subcommands ---------------------------------------------------------


def cmd_table(args):
    with stage("fitting"):
        rows = table_example1(args.threads)
    text = _csv_text(
        ["method", "p", "knots", "basis_count", "relative_error"],
        [[r.method, r.p, r.knots, r.basis_count, fmt(r.relative_error)] for r in rows],
    )
    _emit(text, args.out)
    return 0


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with stage("io"):
            Path(out).parent.mkdir(parents=True, exist_ok=True)
            Path(out).write_text(text)


def _parse_measure(text, a, b):
    table = presets()
    if text in table:
        m = table[text]
        if (a, b) != (-1.0, 1.0):
            raise ValueError("preset measures are defined on [-1, 1]; pass a JSON measure instead")
        return m
    return MeasureSpec.from_dict(json.loads(text))


def cmd_basis_dump(args):
    with stage("validation"):
        measure = _parse_measure(args.measure, args.a, args.b) if args.orthonormal else None
        a, b = (measure.a, measure.b) if measure else (args.a, args.b)
    with stage("basis"):
        if args.knots:
            knots = KnotSequence(tuple(float(v) for v in args.knots.split(",")), args.p)
        else:
            mult = {args.elements // 2: 2} if args.repeat_center else None
            if args.repeat_center and args.elements % 2:
                raise ValueError("repeat-center needs an even number of elements")
            knots = open_uniform(a, b, args.p, args.elements, mult)
        x = np.unique(np.concatenate([np.linspace(*knots.support, args.points), knots.distinct]))
        if args.orthonormal:
            values = eval_orthonormal(whiten(knots, measure), x)
            prefix = "psi"
        else:
            values = eval_all(knots, x)
            prefix = "B"
    header = ["x"] + [f"{prefix}_{i}" for i in range(values.shape[1])]
    _emit(_csv_text(header, [[fmt(v) for v in (xi, *row)] for xi, row in zip(x, values)]), args.out)
    return 0


def cmd_cdf(args):
    with stage("io"):
        e = SddExpansion.loads(Path(args.expansion).read_text())
    with stage("fitting"):
        values, probs = empirical_cdf(sample_surrogate(e, args.count, args.seed, threads=args.threads))
    _emit(_csv_text(["value", "probability"], [[fmt(v), fmt(p)] for v, p in zip(values, probs)]), args.out)
    return 0


def cmd_verify(args):
    from .verify import run_checks

    results = run_checks()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return 0 if all(ok for _, ok, _ in results) else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="sdd", description="Spline dimensional decomposition toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=os.cpu_count(), help="worker threads")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="fit an expansion from a JSON run config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override fitting and sampling seeds")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("table-example1", parents=[common], help="variance-error table for the two-input non-smooth benchmark")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("basis-dump", parents=[common], help="tabulate B-splines or orthonormal splines on a grid")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--elements", type=int, default=4)
    p.add_argument("--repeat-center", action="store_true")
    p.add_argument("--knots", help="explicit comma-separated knot vector")
    p.add_argument("--a", type=float, default=-1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--orthonormal", action="store_true")
    p.add_argument("--measure", default="uniform", help="uniform | truncated_gaussian | beta | JSON object")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_basis_dump)

    p = sub.add_parser("cdf", parents=[common], help="empirical CDF of a saved expansion by Monte Carlo")
    p.add_argument("--expansion", required=True)
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("verify", parents=[common], help="run the built-in invariant checks")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    logging.basicConfig(
        level=os.environ.get("SDD_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        json.dump({"error": {"stage": exc.stage, "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
