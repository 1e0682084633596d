"""One full simulation run: initialization, warm-up, the per-step loop over
both stocks, and trajectory recording.

Step protocol (main loop), using only step t-1 data as inputs:

1. each agent's expected return per stock from both stocks' lagged returns;
2. information state per stock: last m return signs plus the expectation sign;
3. each agent plays its highest-scoring strategy slot (ties uniform);
4. decisions sum to the internal excess demand; an external shock is added
   when the event model is active;
5. price and log return update from the total demand;
6. every slot's score is updated with its hypothetical payoff.

Warm-up runs max(1, m) steps with uniformly random decisions and no scoring,
so every history bit of the first scored step is a realized return sign.  The
recorded window excludes warm-up.

Randomness comes from named per-run streams (see :mod:`mgmarket.seeding`):
``strategies:j``, ``warmup:j``, ``tiebreak:j`` and ``events:j`` per stock j,
plus ``couplings`` for the agent population.  Per-stock streams make the
decoupled case (b1 = b2 = 0) evolve each stock exactly as an independent
single-asset game.

When the event model is active, the run first executes a calibration pass
with identical streams and events disabled to measure the baseline standard
deviation of each stock's internal demand, then re-runs with shocks enabled.
"""

from __future__ import annotations

from dataclasses import dataclass
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import market, scoring, seeding, strategy
from .config import ModelConfig, config_digest, validate
from .errors import NonPositivePriceError
from .expectation import CouplingCoefficients, sample_couplings
from .market import EventState, MarketState, StockSeries
from .stats import pearson


@dataclass(frozen=True)
class RunComponents:
    """Everything random a run needs, pre-drawn or as live streams."""

    tables: tuple[np.ndarray, np.ndarray]
    couplings: CouplingCoefficients
    warmup_decisions: tuple[np.ndarray, np.ndarray]
    tiebreak_rngs: tuple[np.random.Generator, np.random.Generator]
    event_rngs: tuple[np.random.Generator, np.random.Generator]


def build_components(config: ModelConfig, run_index: int) -> RunComponents:
    """Realize all random inputs of one run from its named streams."""
    n, s, m = config.n_agents, config.n_strategies, config.memory
    decision_values = np.asarray(config.decision_set, dtype=np.int8)
    seed = config.master_seed

    tables = []
    warmups = []
    tiebreaks = []
    event_rngs = []
    for stock in (1, 2):
        strat_rng = seeding.stream(seed, run_index, seeding.stock_label(seeding.STRATEGIES, stock))
        tables.append(strategy.sample_strategy_tables(strat_rng, n, s, m, config.decision_set))
        warm_rng = seeding.stream(seed, run_index, seeding.stock_label(seeding.WARMUP, stock))
        raw = warm_rng.integers(0, len(decision_values), size=(config.warmup_steps, n))
        warmups.append(decision_values[raw])
        tiebreaks.append(
            seeding.stream(seed, run_index, seeding.stock_label(seeding.TIEBREAK, stock))
        )
        event_rngs.append(
            seeding.stream(seed, run_index, seeding.stock_label(seeding.EVENTS, stock))
        )

    couplings = sample_couplings(
        config.coupling, n, seeding.stream(seed, run_index, seeding.COUPLINGS)
    )
    return RunComponents(
        tables=(tables[0], tables[1]),
        couplings=couplings,
        warmup_decisions=(warmups[0], warmups[1]),
        tiebreak_rngs=(tiebreaks[0], tiebreaks[1]),
        event_rngs=(event_rngs[0], event_rngs[1]),
    )


@dataclass
class SimulationTrace:
    """Per-step internals recorded for verification runs (small configs)."""

    state_indices: np.ndarray  # (2, T, N)
    slot_decisions: np.ndarray  # (2, T, N, S)
    selected_slots: np.ndarray  # (2, T, N)
    final_scores: np.ndarray  # (2, N, S)


def simulate_trajectory(
    config: ModelConfig,
    components: RunComponents,
    event_states: tuple[EventState, EventState] | None = None,
    record_trace: bool = False,
) -> tuple[MarketState, SimulationTrace | None]:
    """Run the dynamics with fully realized components.

    Exposed separately from :func:`run` so tests can inject hand-built
    strategy tables or warm-up decisions.
    """
    n, s_slots, m = config.n_agents, config.n_strategies, config.memory
    warm, horizon = config.warmup_steps, config.horizon
    total_steps = warm + horizon
    a1, a2 = config.a
    hist_mask = (1 << m) - 1
    agent_rows = np.arange(n)

    prices = [np.empty(total_steps) for _ in range(2)]
    returns = [np.empty(total_steps) for _ in range(2)]
    internal = [np.empty(total_steps, dtype=np.int64) for _ in range(2)]
    total = [np.empty(total_steps) for _ in range(2)]
    re_mean = [np.empty(horizon) for _ in range(2)]

    trace = None
    if record_trace:
        trace = SimulationTrace(
            state_indices=np.empty((2, horizon, n), dtype=np.int32),
            slot_decisions=np.empty((2, horizon, n, s_slots), dtype=np.int8),
            selected_slots=np.empty((2, horizon, n), dtype=np.int16),
            final_scores=np.zeros((2, n, s_slots)),
        )

    prev_price = [config.initial_price, config.initial_price]
    hist = [0, 0]
    scores = scoring.AgentScores.zeros(n, s_slots)

    def advance(j: int, step: int, a_int: int, a_ext: float) -> float:
        a_total = market.combined_demand(a_int, a_ext)
        try:
            price = market.update_price(prev_price[j], a_total)
        except NonPositivePriceError as exc:
            raise NonPositivePriceError(exc.price, stock=j + 1, step=step) from None
        r = market.log_return(price, prev_price[j])
        prices[j][step] = price
        returns[j][step] = r
        internal[j][step] = a_int
        total[j][step] = a_total
        prev_price[j] = price
        hist[j] = ((hist[j] << 1) | (1 if r >= 0 else 0)) & hist_mask
        return a_total

    for w in range(warm):
        for j in (0, 1):
            played = components.warmup_decisions[j][w]
            advance(j, w, market.excess_demand(played), 0.0)

    b_per_stock = (components.couplings.b1, components.couplings.b2)
    mean_b = (float(b_per_stock[0].mean()), float(b_per_stock[1].mean()))
    for t in range(horizon):
        step = warm + t
        lag = (returns[0][step - 1], returns[1][step - 1])
        for j in (0, 1):
            a_j = a1 if j == 0 else a2
            expected = a_j * lag[j] + b_per_stock[j] * lag[1 - j]
            e_bits = (expected >= 0.0).astype(np.int64)
            state_idx = (hist[j] << 1) | e_bits

            slot = scoring.select_slots(scores.values[j], components.tiebreak_rngs[j])
            decisions = strategy.decide_all_slots(components.tables[j], state_idx)
            played = decisions[agent_rows, slot]
            a_int = market.excess_demand(played)
            a_ext = 0.0
            if event_states is not None:
                a_ext = market.external_demand(event_states[j], components.event_rngs[j])

            a_total = advance(j, step, a_int, a_ext)
            scoring.update_scores(scores.values[j], decisions, a_total)

            if trace is not None:
                trace.state_indices[j, t] = state_idx
                trace.slot_decisions[j, t] = decisions
                trace.selected_slots[j, t] = slot

        # record the population-mean expectation standing after this step's
        # returns, i.e. the forecast agents carry into the next step
        for j in (0, 1):
            a_j = a1 if j == 0 else a2
            re_mean[j][t] = a_j * returns[j][step] + mean_b[j] * returns[1 - j][step]

    if trace is not None:
        trace.final_scores[:] = scores.values

    stocks = tuple(
        StockSeries(
            prices=prices[j],
            returns=returns[j],
            internal_demand=internal[j],
            total_demand=total[j] if event_states is not None else internal[j].copy(),
            mean_expectation=re_mean[j],
        )
        for j in (0, 1)
    )
    state = MarketState(
        initial_price=config.initial_price, warmup_steps=warm, stocks=stocks
    )
    return state, trace


@dataclass(frozen=True)
class RunResult:
    market: MarketState
    correlation: float
    run_index: int
    master_seed: int
    config_digest: str
    event_states: tuple[EventState, EventState] | None = None

    def samples(self, stock_index: int) -> tuple[np.ndarray, np.ndarray]:
        """(mean expected return, realized return) pairs per recorded step."""
        series = self.market.stocks[stock_index]
        return series.mean_expectation, self.market.main_returns(stock_index)


def _execute(
    config: ModelConfig, run_index: int, record_trace: bool
) -> tuple[RunResult, SimulationTrace | None]:
    validate(config)
    components = build_components(config, run_index)

    event_states = None
    if config.events is not None:
        baseline, _ = simulate_trajectory(config, components)
        event_states = tuple(
            EventState(
                probability=config.events.probability,
                strength=config.events.strength,
                baseline_std=float(
                    np.std(baseline.stocks[j].internal_demand[baseline.warmup_steps :])
                ),
            )
            for j in (0, 1)
        )
        # the calibration pass consumed the live streams; rebuild them
        components = build_components(config, run_index)

    state, trace = simulate_trajectory(config, components, event_states, record_trace)
    rho = pearson(state.main_returns(0), state.main_returns(1))
    result = RunResult(
        market=state,
        correlation=rho,
        run_index=run_index,
        master_seed=config.master_seed,
        config_digest=config_digest(config),
        event_states=event_states,
    )
    return result, trace


def run(config: ModelConfig, run_index: int) -> RunResult:
    """Execute one full run and compute the return correlation."""
    result, _ = _execute(config, run_index, record_trace=False)
    return result


def run_traced(config: ModelConfig, run_index: int) -> tuple[RunResult, SimulationTrace]:
    """Like :func:`run` but also returns per-step internals for verification."""
    result, trace = _execute(config, run_index, record_trace=True)
    assert trace is not None
    return result, trace


@dataclass(frozen=True)
class BatchResult:
    runs: list[RunResult]
    mean_correlation: float

    @property
    def correlations(self) -> np.ndarray:
        return np.array([r.correlation for r in self.runs])


def _run_task(args: tuple[ModelConfig, int]) -> RunResult:
    config, run_index = args
    return run(config, run_index)


def run_many(config: ModelConfig, threads: int | None = None) -> BatchResult:
    """Execute ``config.n_runs`` independent runs and average the correlation.

    Runs are seeded by index, so results do not depend on execution order or
    worker count.
    """
    validate(config)
    tasks = [(config, i) for i in range(config.n_runs)]
    if threads is not None and threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]
    mean_rho = float(np.mean([r.correlation for r in results]))
    return BatchResult(runs=results, mean_correlation=mean_rho)


def pooled_samples(runs: list[RunResult], stock_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate (expected, return) samples of many runs for one stock."""
    xs, ys = [], []
    for result in runs:
        x, y = result.samples(stock_index)
        xs.append(x)
        ys.append(y)
    return np.concatenate(xs), np.concatenate(ys)
