"""Command-line interface: ``simulate``, ``sweep``, ``regress``,
``verify-appendix`` and ``ar1`` verbs.

Parameters come from an optional flat config file (``--config`` or the
``MGMARKET_CONFIG`` environment variable) with command-line flags winning
over file values.  All outputs are written atomically (temp file + rename) so
aborted long sweeps never leave partial files behind.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, replace

import numpy as np

from . import analytic, engine, market, stats, sweep
from .config import (
    ModelConfig,
    UniformCoupling,
    config_digest,
    from_items,
    parse_items,
    to_text,
)
from .errors import ConfigError, DegenerateSeriesError, NonPositivePriceError

CONFIG_ENV_VAR = "MGMARKET_CONFIG"

_HOMOGENEOUS_FLAGS = ("b1", "b2")
_UNIFORM_FLAGS = ("c1", "delta1", "c2", "delta2")


@dataclass(frozen=True)
class CommandOutcome:
    exit_code: int
    message: str = ""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; this CLI reserves 2 for
    # runtime errors, so usage problems are rerouted to exit code 1.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


@contextmanager
def _atomic_open(path: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mgmarket-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--n-agents", type=int, dest="n_agents")
    parser.add_argument("--memory", type=int)
    parser.add_argument("--strategies", type=int, dest="n_strategies")
    parser.add_argument("--horizon", type=int)
    parser.add_argument("--initial-price", type=float, dest="initial_price")
    parser.add_argument("--a1", type=float)
    parser.add_argument("--a2", type=float)
    parser.add_argument("--b1", type=float, help="homogeneous coupling for stock 1")
    parser.add_argument("--b2", type=float, help="homogeneous coupling for stock 2")
    parser.add_argument("--c1", type=float, help="uniform coupling center for stock 1")
    parser.add_argument("--delta1", type=float, help="uniform coupling half-range for stock 1")
    parser.add_argument("--c2", type=float, help="uniform coupling center for stock 2")
    parser.add_argument("--delta2", type=float, help="uniform coupling half-range for stock 2")
    hold = parser.add_mutually_exclusive_group()
    hold.add_argument("--allow-hold", dest="allow_hold", action="store_const", const=True)
    hold.add_argument("--no-allow-hold", dest="allow_hold", action="store_const", const=False)
    parser.add_argument("--event-p", type=float, dest="event_probability")
    parser.add_argument("--event-k", type=float, dest="event_strength")
    parser.add_argument("--no-events", action="store_true")
    parser.add_argument("--runs", type=int, dest="n_runs")
    parser.add_argument("--seed", type=int, dest="master_seed")
    parser.add_argument("--threads", type=int, default=os.cpu_count())


def _resolve_config(args) -> tuple[ModelConfig, dict]:
    """File values overlaid with explicit flags; returns config + overrides."""
    items: dict[str, object] = {}
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if path:
        with open(path, encoding="utf-8") as fh:
            items = parse_items(fh.read())

    overrides: dict[str, object] = {}
    for key in (
        "n_agents", "memory", "n_strategies", "horizon", "initial_price",
        "a1", "a2", "b1", "b2", "c1", "delta1", "c2", "delta2",
        "allow_hold", "event_probability", "event_strength", "n_runs", "master_seed",
    ):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value

    hom_given = any(k in overrides for k in _HOMOGENEOUS_FLAGS)
    uni_given = any(k in overrides for k in _UNIFORM_FLAGS)
    if hom_given and uni_given:
        raise ConfigError("cannot mix --b1/--b2 with --c1/--delta1/--c2/--delta2")
    if hom_given:
        for key in ("coupling", *_UNIFORM_FLAGS):
            items.pop(key, None)
        items["coupling"] = "homogeneous"
    elif uni_given:
        for key in ("coupling", *_HOMOGENEOUS_FLAGS):
            items.pop(key, None)
        items["coupling"] = "uniform"

    if getattr(args, "no_events", False):
        items.pop("event_probability", None)
        items.pop("event_strength", None)
        overrides.pop("event_probability", None)
        overrides.pop("event_strength", None)

    items.update(overrides)
    return from_items(items), overrides


def _write_summary(path, config, overrides, batch) -> None:
    record = {
        "config": {k: v for k, v in parse_items(to_text(config)).items()},
        "config_digest": config_digest(config),
        "overrides": overrides,
        "master_seed": config.master_seed,
        "mean_correlation": batch.mean_correlation,
        "runs": [
            {"run_index": r.run_index, "correlation": r.correlation} for r in batch.runs
        ],
        "metadata": {
            "expectation_series": "population_mean",
            "recorded_window": "main loop only; warm-up excluded",
        },
    }
    with _atomic_open(path) as fh:
        json.dump(record, fh, indent=2)
        fh.write("\n")


def _cmd_simulate(args) -> CommandOutcome:
    config, overrides = _resolve_config(args)
    batch = engine.run_many(config, threads=args.threads)
    if args.out:
        with _atomic_open(args.out) as fh:
            market.write_trajectory(batch.runs[0].market, fh)
    if args.scatter_out:
        rows = (
            (stock + 1, result.run_index, t + 1, float(x[t]), float(y[t]))
            for result in batch.runs
            for stock in (0, 1)
            for x, y in [result.samples(stock)]
            for t in range(len(x))
        )
        with _atomic_open(args.scatter_out) as fh:
            sweep.write_scatter(rows, fh)
    if args.summary:
        _write_summary(args.summary, config, overrides, batch)
    print(f"simulate: {config.n_runs} runs, mean correlation {batch.mean_correlation:+.4f}")
    return CommandOutcome(0)


def _axis_from_flags(args, name: str, default: np.ndarray) -> np.ndarray:
    lo = getattr(args, f"{name}_min", None)
    hi = getattr(args, f"{name}_max", None)
    step = getattr(args, f"{name}_step", None)
    if lo is None and hi is None and step is None:
        return default
    lo = default[0] if lo is None else lo
    hi = default[-1] if hi is None else hi
    step = (default[1] - default[0]) if step is None else step
    if step <= 0 or hi < lo:
        raise ConfigError(f"invalid axis for {name}: min={lo} max={hi} step={step}")
    return np.round(np.arange(lo, hi + step / 2, step), 10) + 0.0


def _grid_out_path(base: str, strength: float) -> str:
    root, ext = os.path.splitext(base)
    return f"{root}_k{strength:g}{ext or '.csv'}"


def _cmd_sweep(args) -> CommandOutcome:
    config, _ = _resolve_config(args)
    threads = args.threads
    collect = args.scatter_out is not None
    grids: list[sweep.SweepGrid]

    if args.experiment in ("homogeneous", "holding"):
        if args.experiment == "holding":
            config = replace(config, allow_hold=True)
        grid = sweep.sweep_homogeneous(
            config,
            b1_values=_axis_from_flags(args, "b1", sweep.default_homogeneous_axis()),
            b2_values=_axis_from_flags(args, "b2", sweep.default_homogeneous_axis()),
            threads=threads,
            collect_samples=collect,
        )
        grids = [grid]
    elif args.experiment == "centers":
        config = _ensure_uniform(config, default_delta=1.0)
        grid = sweep.sweep_centers(
            config,
            c1_values=_axis_from_flags(args, "c1", sweep.default_centers_axis()),
            c2_values=_axis_from_flags(args, "c2", sweep.default_centers_axis()),
            threads=threads,
            collect_samples=collect,
        )
        grids = [grid]
    elif args.experiment == "ranges":
        config = _ensure_uniform(config, default_delta=1.0)
        grid = sweep.sweep_ranges(
            config,
            delta1_values=_axis_from_flags(args, "delta1", sweep.default_ranges_axis()),
            delta2_values=_axis_from_flags(args, "delta2", sweep.default_ranges_axis()),
            threads=threads,
            collect_samples=collect,
        )
        grids = [grid]
    else:  # events
        k_values = [float(v) for v in args.k_values.split(",")] if args.k_values else [1.0, 2.0, 3.0, 4.0]
        grids = sweep.sweep_events(
            config,
            k_values=k_values,
            b1_values=_axis_from_flags(args, "b1", sweep.default_homogeneous_axis()),
            b2_values=_axis_from_flags(args, "b2", sweep.default_homogeneous_axis()),
            probability=args.event_probability,
            threads=threads,
            collect_samples=collect,
        )

    for grid in grids:
        out = args.out
        scatter_out = args.scatter_out
        if grid.event_strength is not None and len(grids) > 1:
            if out:
                out = _grid_out_path(out, grid.event_strength)
            if scatter_out:
                scatter_out = _grid_out_path(scatter_out, grid.event_strength)
        if out:
            with _atomic_open(out) as fh:
                sweep.write_grid(grid, fh)
        if scatter_out:
            with _atomic_open(scatter_out) as fh:
                sweep.write_scatter(sweep.iter_scatter_rows(grid), fh)
        label = "" if grid.event_strength is None else f" (k={grid.event_strength:g})"
        n1, n2 = (len(a.values) for a in grid.axes)
        print(
            f"sweep {args.experiment}{label}: {n1}x{n2} cells x {grid.n_runs} runs "
            f"in {grid.elapsed_seconds:.1f}s"
        )
    return CommandOutcome(0)


def _ensure_uniform(config: ModelConfig, default_delta: float) -> ModelConfig:
    if isinstance(config.coupling, UniformCoupling):
        return config
    return replace(
        config, coupling=UniformCoupling(0.0, default_delta, 0.0, default_delta)
    )


def _load_samples(paths) -> dict[int, list[tuple[np.ndarray, np.ndarray]]]:
    """Read trajectory or scatter CSVs into per-stock (expected, return) pairs."""
    per_stock: dict[int, list[tuple[np.ndarray, np.ndarray]]] = {1: [], 2: []}
    for path in paths:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header == market.TRAJECTORY_COLUMNS:
                rows = list(reader)
                for stock, (x_col, y_col) in ((1, (4, 2)), (2, (8, 6))):
                    x = np.array([float(r[x_col]) for r in rows])
                    y = np.array([float(r[y_col]) for r in rows])
                    per_stock[stock].append((x, y))
            elif header == sweep.SCATTER_COLUMNS:
                buckets: dict[tuple[int, int], list[tuple[float, float]]] = {}
                for r in reader:
                    buckets.setdefault((int(r[0]), int(r[1])), []).append(
                        (float(r[3]), float(r[4]))
                    )
                for (stock, _run), pairs in sorted(buckets.items()):
                    arr = np.array(pairs)
                    per_stock[stock].append((arr[:, 0], arr[:, 1]))
            else:
                raise ConfigError(f"{path}: unrecognized CSV header {header}")
    return per_stock


def _cmd_regress(args) -> CommandOutcome:
    per_stock = _load_samples(args.inputs)
    rows = []
    for stock in (1, 2):
        if not per_stock[stock]:
            continue
        x = np.concatenate([p[0] for p in per_stock[stock]])
        y = np.concatenate([p[1] for p in per_stock[stock]])
        report = stats.ols(x, y)
        rows.append(
            [stock, repr(report.beta1), repr(report.p_value), repr(report.r_squared), report.n]
        )
    header = ["stock", "beta1", "p_value", "r_squared", "n"]
    if args.out:
        with _atomic_open(args.out) as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)
    return CommandOutcome(0)


def _cmd_ar1(args) -> CommandOutcome:
    per_stock = _load_samples(args.inputs)
    rows = []
    for stock in (1, 2):
        if not per_stock[stock]:
            continue
        series_list = [y for _x, y in per_stock[stock]]
        report = stats.ar1_pooled(series_list)
        rows.append([stock, repr(report.phi), report.n])
    header = ["stock", "phi", "n"]
    if args.out:
        with _atomic_open(args.out) as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)
    return CommandOutcome(0)


def _cmd_verify_appendix(args) -> CommandOutcome:
    report = analytic.verify_appendix(n_samples=args.samples, master_seed=args.master_seed)

    def fmt(flag) -> str:
        return "-" if flag is None else ("ok" if flag else "FAIL")

    print("sampling model: return changes uniform over the signed unit box per quadrant")
    print(f"{'regime':6} {'input':8} {'output':8} {'feasibility':11} {'condition':9} {'trend':5}")
    for check in report.checks:
        print(
            f"{check.regime:6} {analytic.quadrant_str(check.input_quadrant):8} "
            f"{analytic.quadrant_str(check.output_quadrant):8} "
            f"{fmt(check.feasibility_ok):11} {fmt(check.condition_ok):9} {fmt(check.trend_ok):5}"
            + (f"  {check.detail}" if check.detail else "")
        )
    if args.out:
        with _atomic_open(args.out) as fh:
            writer = csv.writer(fh)
            writer.writerow(["regime", "input", "output", "feasibility", "condition", "trend"])
            for check in report.checks:
                writer.writerow(
                    [check.regime, analytic.quadrant_str(check.input_quadrant),
                     analytic.quadrant_str(check.output_quadrant),
                     fmt(check.feasibility_ok), fmt(check.condition_ok), fmt(check.trend_ok)]
                )
    if report.passed:
        print(f"verify-appendix: all {len(report.checks)} cells agree at {report.n_samples} samples")
        return CommandOutcome(0)
    return CommandOutcome(
        3, f"analytic.verify_appendix: {len(report.failures)} cells disagree with the oracle"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mgmarket", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("simulate", help="run one configuration and export results")
    _add_model_flags(p)
    p.add_argument("--out", help="trajectory CSV of the first run")
    p.add_argument("--scatter-out", dest="scatter_out", help="pooled (expected, return) samples CSV")
    p.add_argument("--summary", help="batch summary JSON")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("sweep", help="grid of mean correlations over a parameter plane")
    _add_model_flags(p)
    p.add_argument(
        "--experiment",
        required=True,
        choices=["homogeneous", "centers", "ranges", "events", "holding"],
    )
    for axis in ("b1", "b2", "c1", "c2", "delta1", "delta2"):
        p.add_argument(f"--{axis}-min", type=float, dest=f"{axis}_min")
        p.add_argument(f"--{axis}-max", type=float, dest=f"{axis}_max")
        p.add_argument(f"--{axis}-step", type=float, dest=f"{axis}_step")
    p.add_argument("--k-values", dest="k_values", help="comma-separated shock strengths")
    p.add_argument("--out", help="grid CSV (per-k suffix added for events)")
    p.add_argument("--scatter-out", dest="scatter_out")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("regress", help="OLS of return on expected return from CSVs")
    p.add_argument("inputs", nargs="+", help="trajectory or scatter CSV files")
    p.add_argument("--out", help="report CSV (default: stdout)")
    p.set_defaults(handler=_cmd_regress)

    p = sub.add_parser("ar1", help="first-order autoregression of returns from CSVs")
    p.add_argument("inputs", nargs="+", help="trajectory or scatter CSV files")
    p.add_argument("--out", help="report CSV (default: stdout)")
    p.set_defaults(handler=_cmd_ar1)

    p = sub.add_parser("verify-appendix", help="check the sign-case table against sampling")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, dest="master_seed", default=0)
    p.add_argument("--out", help="pass/fail table CSV")
    p.set_defaults(handler=_cmd_verify_appendix)

    return parser


def dispatch(argv) -> CommandOutcome:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return CommandOutcome(1, str(exc))
    except SystemExit as exc:  # --help prints and exits 0
        return CommandOutcome(int(exc.code or 0))
    try:
        return args.handler(args)
    except ConfigError as exc:
        return CommandOutcome(1, f"config.validate: {exc}")
    except NonPositivePriceError as exc:
        return CommandOutcome(2, f"market.update_price: {exc}")
    except DegenerateSeriesError as exc:
        return CommandOutcome(2, f"stats: {exc}")
    except FileNotFoundError as exc:
        return CommandOutcome(2, f"io: {exc}")


def main() -> None:
    outcome = dispatch(sys.argv[1:])
    if outcome.message:
        stream = sys.stdout if outcome.exit_code == 0 else sys.stderr
        print(outcome.message, file=stream)
    sys.exit(outcome.exit_code)


if __name__ == "__main__":
    main()
