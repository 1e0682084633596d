"""Price formation: excess demand, the square-root price impact, log returns,
and exogenous demand shocks.

Each step the decisions of all agents for a stock sum to an integer excess
demand.  The price moves by the signed square root of the total demand, and
the return is the log-price difference.  When the event model is active, an
external shock of magnitude ``k`` times the baseline demand standard
deviation is added to the internal demand with a random sign, with a fixed
per-step probability.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositivePriceError


@dataclass(frozen=True)
class EventState:
    """Calibrated shock generator for one stock."""

    probability: float
    strength: float
    baseline_std: float

    @property
    def amplitude(self) -> float:
        return self.strength * self.baseline_std


def excess_demand(decisions) -> int:
    """Exact integer sum of all agents' decisions for one stock."""
    return int(np.asarray(decisions).sum())


def external_demand(state: EventState, rng: np.random.Generator) -> float:
    """One step's external shock: +/- amplitude with probability p, else 0.

    Both the occurrence draw and the sign draw are consumed every call so the
    stream schedule does not depend on outcomes.
    """
    fired = rng.random() < state.probability
    odd_parity = int(rng.integers(0, 2))
    if not fired:
        return 0.0
    return -state.amplitude if odd_parity else state.amplitude


def combined_demand(internal: int, external: float) -> float:
    return internal + external


def update_price(prev_price: float, total_demand: float) -> float:
    """Move the price by the signed square root of the total demand.

    Zero demand leaves the price unchanged.  A non-positive result is a hard
    error: clamping would silently corrupt the return series.
    """
    if total_demand > 0:
        new_price = prev_price + math.sqrt(total_demand)
    elif total_demand < 0:
        new_price = prev_price - math.sqrt(-total_demand)
    else:
        new_price = prev_price
    if new_price <= 0:
        raise NonPositivePriceError(new_price)
    return new_price


def log_return(p_now: float, p_prev: float) -> float:
    if p_now <= 0 or p_prev <= 0:
        raise ValueError("prices must be positive")
    return math.log(p_now) - math.log(p_prev)


@dataclass(frozen=True)
class StockSeries:
    """Full trajectory of one stock: warm-up steps followed by the recorded
    main window.  ``mean_expectation`` covers the main window only and holds
    the population-mean expected return formed from the data through each
    step, i.e. the forecast agents carry out of step t."""

    prices: np.ndarray
    returns: np.ndarray
    internal_demand: np.ndarray
    total_demand: np.ndarray
    mean_expectation: np.ndarray


@dataclass(frozen=True)
class MarketState:
    initial_price: float
    warmup_steps: int
    stocks: tuple[StockSeries, StockSeries]

    @property
    def horizon(self) -> int:
        return len(self.stocks[0].prices) - self.warmup_steps

    def main_returns(self, stock_index: int) -> np.ndarray:
        return self.stocks[stock_index].returns[self.warmup_steps :]

    def main_prices(self, stock_index: int) -> np.ndarray:
        return self.stocks[stock_index].prices[self.warmup_steps :]

    def main_total_demand(self, stock_index: int) -> np.ndarray:
        return self.stocks[stock_index].total_demand[self.warmup_steps :]


TRAJECTORY_COLUMNS = ["t", "P1", "r1", "A1", "re1_mean", "P2", "r2", "A2", "re2_mean"]


def _demand_cell(x: float):
    return int(x) if float(x).is_integer() else repr(float(x))


def write_trajectory(state: MarketState, fh) -> None:
    """Write the recorded window as CSV, one row per main-loop step."""
    writer = csv.writer(fh)
    writer.writerow(TRAJECTORY_COLUMNS)
    w = state.warmup_steps
    s1, s2 = state.stocks
    for t in range(state.horizon):
        writer.writerow(
            [
                t + 1,
                repr(float(s1.prices[w + t])),
                repr(float(s1.returns[w + t])),
                _demand_cell(s1.total_demand[w + t]),
                repr(float(s1.mean_expectation[t])),
                repr(float(s2.prices[w + t])),
                repr(float(s2.returns[w + t])),
                _demand_cell(s2.total_demand[w + t]),
                repr(float(s2.mean_expectation[t])),
            ]
        )
