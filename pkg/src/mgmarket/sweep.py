"""Parameter-plane sweeps: grids of mean return correlation.

Each grid cell is a full Monte Carlo batch (``n_runs`` independent runs) at
one point of the swept parameter plane.  A cell's master seed is folded from
the base master seed and the cell's coupling parameters alone, so results are
independent of execution order, identical cells in different experiments are
bit-identical, and event-strength variants of the same cell share all
non-event randomness (making strength comparisons paired).

Experiments:

* homogeneous  -- shared coupling weights (b1, b2) on a square grid;
* centers      -- per-agent uniform couplings, sweeping the centers (c1, c2);
* ranges       -- per-agent uniform couplings, sweeping the half-ranges;
* events       -- the homogeneous grid re-run per external-shock strength k;
* holding      -- the homogeneous grid with the hold decision enabled.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import engine
from .config import (
    Coupling,
    EventModel,
    HomogeneousCoupling,
    ModelConfig,
    UniformCoupling,
    validate,
)
from .seeding import fold_seed

DEFAULT_EVENT_PROBABILITY = 0.0082


def default_homogeneous_axis() -> np.ndarray:
    return np.round(np.linspace(-1.0, 1.0, 21), 10) + 0.0


def default_centers_axis() -> np.ndarray:
    return np.round(np.linspace(-1.0, 1.0, 11), 10) + 0.0


def default_ranges_axis() -> np.ndarray:
    return np.round(np.linspace(1.0, 5.0, 9), 10) + 0.0


def cell_seed(master_seed: int, coupling: Coupling) -> int:
    """Seed of one grid cell, a function of the coupling parameters only."""
    if isinstance(coupling, HomogeneousCoupling):
        return fold_seed(master_seed, "cell:homogeneous", (coupling.b1, coupling.b2))
    return fold_seed(
        master_seed,
        "cell:uniform",
        (coupling.c1, coupling.delta1, coupling.c2, coupling.delta2),
    )


@dataclass(frozen=True)
class Axis:
    name: str
    values: np.ndarray


RunSamples = tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass
class SweepGrid:
    axes: tuple[Axis, Axis]
    rho_runs: np.ndarray  # (n1, n2, n_runs)
    template: ModelConfig
    started_at: str
    elapsed_seconds: float
    event_strength: Optional[float] = None
    samples: Optional[list[list[list[RunSamples]]]] = field(default=None, repr=False)

    def __post_init__(self):
        n1, n2 = len(self.axes[0].values), len(self.axes[1].values)
        if self.rho_runs.shape[:2] != (n1, n2):
            raise ValueError("cell count must equal the axis product")
        if np.any(np.abs(self.mean_rho) > 1.0 + 1e-12):
            raise ValueError("cell means must lie in [-1, 1]")

    @property
    def mean_rho(self) -> np.ndarray:
        return self.rho_runs.mean(axis=2)

    @property
    def std_rho(self) -> np.ndarray:
        if self.rho_runs.shape[2] < 2:
            return np.zeros(self.rho_runs.shape[:2])
        return self.rho_runs.std(axis=2, ddof=1)

    @property
    def n_runs(self) -> int:
        return self.rho_runs.shape[2]

    def cell_mean(self, v1: float, v2: float) -> float:
        i1 = int(np.argmin(np.abs(self.axes[0].values - v1)))
        i2 = int(np.argmin(np.abs(self.axes[1].values - v2)))
        return float(self.mean_rho[i1, i2])


def _cell_task(args) -> tuple[float, Optional[RunSamples]]:
    config, run_index, want_samples = args
    result = engine.run(config, run_index)
    samples = None
    if want_samples:
        samples = (result.samples(0), result.samples(1))
    return result.correlation, samples


def _run_grid(
    cells: list[list[ModelConfig]],
    axes: tuple[Axis, Axis],
    template: ModelConfig,
    threads: Optional[int],
    collect_samples: bool,
    event_strength: Optional[float] = None,
) -> SweepGrid:
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    t0 = time.monotonic()
    n1, n2 = len(cells), len(cells[0])
    n_runs = template.n_runs
    tasks = [
        (cells[i1][i2], run, collect_samples)
        for i1 in range(n1)
        for i2 in range(n2)
        for run in range(n_runs)
    ]
    if threads is not None and threads > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (threads * 8))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_cell_task, tasks, chunksize=chunk))
    else:
        outcomes = [_cell_task(t) for t in tasks]

    rho = np.empty((n1, n2, n_runs))
    samples: Optional[list[list[list[RunSamples]]]] = None
    if collect_samples:
        samples = [[[None] * n_runs for _ in range(n2)] for _ in range(n1)]  # type: ignore[list-item]
    for flat, (value, run_samples) in enumerate(outcomes):
        i1, rest = divmod(flat, n2 * n_runs)
        i2, run = divmod(rest, n_runs)
        rho[i1, i2, run] = value
        if samples is not None:
            samples[i1][i2][run] = run_samples
    return SweepGrid(
        axes=axes,
        rho_runs=rho,
        template=template,
        started_at=started,
        elapsed_seconds=time.monotonic() - t0,
        event_strength=event_strength,
        samples=samples,
    )


def _homogeneous_cells(
    base: ModelConfig, b1_values: np.ndarray, b2_values: np.ndarray
) -> list[list[ModelConfig]]:
    cells = []
    for b1 in b1_values:
        row = []
        for b2 in b2_values:
            coupling = HomogeneousCoupling(float(b1), float(b2))
            row.append(
                replace(
                    base,
                    coupling=coupling,
                    master_seed=cell_seed(base.master_seed, coupling),
                )
            )
        cells.append(row)
    return cells


def sweep_homogeneous(
    base_config: ModelConfig,
    b1_values: Optional[Sequence[float]] = None,
    b2_values: Optional[Sequence[float]] = None,
    threads: Optional[int] = None,
    collect_samples: bool = False,
) -> SweepGrid:
    """Mean correlation over a (b1, b2) grid with shared coupling weights."""
    validate(base_config)
    b1v = np.asarray(b1_values if b1_values is not None else default_homogeneous_axis(), dtype=float)
    b2v = np.asarray(b2_values if b2_values is not None else default_homogeneous_axis(), dtype=float)
    base = replace(base_config, events=None)
    cells = _homogeneous_cells(base, b1v, b2v)
    return _run_grid(
        cells, (Axis("b1", b1v), Axis("b2", b2v)), base, threads, collect_samples
    )


def sweep_centers(
    base_config: ModelConfig,
    c1_values: Optional[Sequence[float]] = None,
    c2_values: Optional[Sequence[float]] = None,
    threads: Optional[int] = None,
    collect_samples: bool = False,
) -> SweepGrid:
    """Mean correlation over a (c1, c2) grid of uniform-coupling centers."""
    validate(base_config)
    if not isinstance(base_config.coupling, UniformCoupling):
        raise ValueError("centers sweep requires a uniform coupling template")
    c1v = np.asarray(c1_values if c1_values is not None else default_centers_axis(), dtype=float)
    c2v = np.asarray(c2_values if c2_values is not None else default_centers_axis(), dtype=float)
    base = replace(base_config, events=None)
    d1, d2 = base.coupling.delta1, base.coupling.delta2
    cells = []
    for c1 in c1v:
        row = []
        for c2 in c2v:
            coupling = UniformCoupling(float(c1), d1, float(c2), d2)
            row.append(
                replace(base, coupling=coupling, master_seed=cell_seed(base.master_seed, coupling))
            )
        cells.append(row)
    return _run_grid(cells, (Axis("c1", c1v), Axis("c2", c2v)), base, threads, collect_samples)


def sweep_ranges(
    base_config: ModelConfig,
    delta1_values: Optional[Sequence[float]] = None,
    delta2_values: Optional[Sequence[float]] = None,
    threads: Optional[int] = None,
    collect_samples: bool = False,
) -> SweepGrid:
    """Mean correlation over a (delta1, delta2) grid of uniform half-ranges."""
    validate(base_config)
    if not isinstance(base_config.coupling, UniformCoupling):
        raise ValueError("ranges sweep requires a uniform coupling template")
    d1v = np.asarray(delta1_values if delta1_values is not None else default_ranges_axis(), dtype=float)
    d2v = np.asarray(delta2_values if delta2_values is not None else default_ranges_axis(), dtype=float)
    base = replace(base_config, events=None)
    c1, c2 = base.coupling.c1, base.coupling.c2
    cells = []
    for d1 in d1v:
        row = []
        for d2 in d2v:
            coupling = UniformCoupling(c1, float(d1), c2, float(d2))
            row.append(
                replace(base, coupling=coupling, master_seed=cell_seed(base.master_seed, coupling))
            )
        cells.append(row)
    return _run_grid(cells, (Axis("delta1", d1v), Axis("delta2", d2v)), base, threads, collect_samples)


def sweep_events(
    base_config: ModelConfig,
    k_values: Sequence[float] = (1.0, 2.0, 3.0, 4.0),
    b1_values: Optional[Sequence[float]] = None,
    b2_values: Optional[Sequence[float]] = None,
    probability: Optional[float] = None,
    threads: Optional[int] = None,
    collect_samples: bool = False,
) -> list[SweepGrid]:
    """One homogeneous grid per external-shock strength k.

    Cells across strengths share seeds, so each k grid is a paired variant of
    the k=0 baseline.
    """
    validate(base_config)
    b1v = np.asarray(b1_values if b1_values is not None else default_homogeneous_axis(), dtype=float)
    b2v = np.asarray(b2_values if b2_values is not None else default_homogeneous_axis(), dtype=float)
    if probability is None:
        probability = (
            base_config.events.probability
            if base_config.events is not None
            else DEFAULT_EVENT_PROBABILITY
        )
    grids = []
    for k in k_values:
        events = EventModel(probability=float(probability), strength=float(k))
        base = replace(base_config, events=events)
        cells = _homogeneous_cells(base, b1v, b2v)
        grids.append(
            _run_grid(
                cells,
                (Axis("b1", b1v), Axis("b2", b2v)),
                base,
                threads,
                collect_samples,
                event_strength=float(k),
            )
        )
    return grids


# --- CSV export -------------------------------------------------------------

GRID_COLUMNS = ["axis1", "axis2", "mean_rho", "std_rho", "n_runs"]
SCATTER_COLUMNS = ["stock", "run", "t", "expected_return", "return"]


def write_grid(grid: SweepGrid, fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(GRID_COLUMNS)
    mean, std = grid.mean_rho, grid.std_rho
    for i1, v1 in enumerate(grid.axes[0].values):
        for i2, v2 in enumerate(grid.axes[1].values):
            writer.writerow(
                [repr(float(v1)), repr(float(v2)), repr(float(mean[i1, i2])),
                 repr(float(std[i1, i2])), grid.n_runs]
            )


def iter_scatter_rows(grid: SweepGrid):
    """Pooled (stock, run, t, expected, return) rows across all cells."""
    if grid.samples is None:
        raise ValueError("sweep was executed without collect_samples")
    n2, n_runs = len(grid.axes[1].values), grid.n_runs
    for i1 in range(len(grid.axes[0].values)):
        for i2 in range(n2):
            for run, run_samples in enumerate(grid.samples[i1][i2]):
                run_id = (i1 * n2 + i2) * n_runs + run
                for stock_index, (expected, realized) in enumerate(run_samples):
                    for t in range(len(expected)):
                        yield (stock_index + 1, run_id, t + 1,
                               float(expected[t]), float(realized[t]))


def write_scatter(rows, fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(SCATTER_COLUMNS)
    for stock, run_id, t, expected, realized in rows:
        writer.writerow([stock, run_id, t, repr(expected), repr(realized)])


def pooled_grid_samples(grid: SweepGrid, stock_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate every cell's (expected, return) samples for one stock."""
    if grid.samples is None:
        raise ValueError("sweep was executed without collect_samples")
    xs, ys = [], []
    for row in grid.samples:
        for cell in row:
            for run_samples in cell:
                x, y = run_samples[stock_index]
                xs.append(x)
                ys.append(y)
    return np.concatenate(xs), np.concatenate(ys)
