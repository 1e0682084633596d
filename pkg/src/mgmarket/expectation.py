"""Per-agent expected returns and coupling-coefficient sampling.

An agent's expected return for a stock is a linear mix of that stock's own
lagged return (weight ``a``) and the other stock's lagged return (the agent's
personal coupling weight ``b``).  The coupling weights are either shared by
all agents or drawn per agent from a uniform distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Coupling, HomogeneousCoupling, UniformCoupling


def expected_return(a: float, b, r_own_lag: float, r_other_lag: float):
    """a * own lagged return + b * other stock's lagged return.

    ``b`` may be a scalar or a per-agent array; the result broadcasts.
    """
    return a * r_own_lag + b * r_other_lag


@dataclass(frozen=True)
class CouplingCoefficients:
    """Per-agent cross-stock weights, one array per stock."""

    b1: np.ndarray
    b2: np.ndarray

    def for_stock(self, stock_index: int) -> np.ndarray:
        return self.b1 if stock_index == 0 else self.b2


def sample_couplings(
    coupling: Coupling, n_agents: int, rng: np.random.Generator
) -> CouplingCoefficients:
    """Realize the coupling spec for a population of agents.

    Homogeneous specs consume no randomness; uniform specs draw b1 for all
    agents, then b2, i.i.d. and independent across stocks.
    """
    if isinstance(coupling, HomogeneousCoupling):
        return CouplingCoefficients(
            b1=np.full(n_agents, float(coupling.b1)),
            b2=np.full(n_agents, float(coupling.b2)),
        )
    if isinstance(coupling, UniformCoupling):
        b1 = rng.uniform(coupling.c1 - coupling.delta1, coupling.c1 + coupling.delta1, n_agents)
        b2 = rng.uniform(coupling.c2 - coupling.delta2, coupling.c2 + coupling.delta2, n_agents)
        return CouplingCoefficients(b1=b1, b2=b2)
    raise TypeError(f"unsupported coupling spec {coupling!r}")


def mean_expected_return_delta(a: float, c: float, dr_own_lag: float, dr_other_lag: float) -> float:
    """Population-mean change of the expected return given return changes.

    With per-agent weights averaging to ``c`` this is the mean-field form of
    the per-agent expectation delta; for homogeneous weights (c = b) it equals
    the per-agent delta exactly.
    """
    return a * dr_own_lag + c * dr_other_lag
