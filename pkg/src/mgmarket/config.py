"""Model configuration: parameters, validation, and the flat config-file format.

A :class:`ModelConfig` holds everything a simulation batch needs.  Configs are
immutable; the engine and sweeps copy-and-replace fields via
:func:`dataclasses.replace`.  The external format is flat ``key = value`` text,
one parameter per line, which round-trips bit-exactly (floats are written with
``repr``).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from typing import Union

from .errors import CoefficientOutOfRangeError, ConfigError, EvenAgentCountError

BINARY_DECISIONS = (-1, 1)
HOLD_DECISIONS = (-1, 0, 1)

_MAX_MEMORY = 20  # 2^(m+1) strategy rows; anything bigger is a config mistake


@dataclass(frozen=True)
class HomogeneousCoupling:
    """Every agent uses the same cross-stock weights (b1, b2)."""

    b1: float
    b2: float


@dataclass(frozen=True)
class UniformCoupling:
    """Per-agent weights drawn uniformly from [c - delta, c + delta] per stock."""

    c1: float
    delta1: float
    c2: float
    delta2: float


Coupling = Union[HomogeneousCoupling, UniformCoupling]


@dataclass(frozen=True)
class EventModel:
    """Exogenous demand shocks: each step, with probability ``probability``,
    a shock of magnitude ``strength`` times the baseline demand std hits a
    stock with a random sign."""

    probability: float
    strength: float


@dataclass(frozen=True)
class ModelConfig:
    n_agents: int = 1001
    memory: int = 1
    n_strategies: int = 2
    horizon: int = 1000
    initial_price: float = 2000.0
    a: tuple[float, float] = (1.0, 1.0)
    coupling: Coupling = HomogeneousCoupling(0.5, 0.5)
    allow_hold: bool = False
    events: EventModel | None = None
    n_runs: int = 50
    master_seed: int = 20170918

    @property
    def decision_set(self) -> tuple[int, ...]:
        return HOLD_DECISIONS if self.allow_hold else BINARY_DECISIONS

    @property
    def warmup_steps(self) -> int:
        return max(1, self.memory)

    def with_coupling(self, coupling: Coupling) -> "ModelConfig":
        return replace(self, coupling=coupling)


def validate(config: ModelConfig) -> ModelConfig:
    """Check every invariant; return the config unchanged if all hold."""
    if config.n_agents <= 0:
        raise ConfigError(f"n_agents must be positive, got {config.n_agents}")
    if config.n_agents % 2 == 0:
        raise EvenAgentCountError(f"n_agents must be odd, got {config.n_agents}")
    if config.memory <= 0:
        raise ConfigError(f"memory must be positive, got {config.memory}")
    if config.memory > _MAX_MEMORY:
        raise ConfigError(f"memory {config.memory} exceeds supported maximum {_MAX_MEMORY}")
    if config.n_strategies <= 0:
        raise ConfigError(f"n_strategies must be positive, got {config.n_strategies}")
    if config.horizon <= 0:
        raise ConfigError(f"horizon must be positive, got {config.horizon}")
    if config.initial_price <= 0:
        raise ConfigError(f"initial_price must be positive, got {config.initial_price}")
    for j, aj in enumerate(config.a, start=1):
        if not 0.0 < aj <= 1.0:
            raise CoefficientOutOfRangeError(f"a{j} must lie in (0, 1], got {aj}")
    if isinstance(config.coupling, UniformCoupling):
        for name in ("delta1", "delta2"):
            d = getattr(config.coupling, name)
            if d < 0:
                raise CoefficientOutOfRangeError(f"{name} must be non-negative, got {d}")
    elif not isinstance(config.coupling, HomogeneousCoupling):
        raise ConfigError(f"unsupported coupling spec {config.coupling!r}")
    if config.events is not None:
        if not 0.0 <= config.events.probability <= 1.0:
            raise CoefficientOutOfRangeError(
                f"event probability must lie in [0, 1], got {config.events.probability}"
            )
        if config.events.strength < 0:
            raise CoefficientOutOfRangeError(
                f"event strength must be non-negative, got {config.events.strength}"
            )
    if config.n_runs <= 0:
        raise ConfigError(f"n_runs must be positive, got {config.n_runs}")
    return config


# --- flat key = value config format ---------------------------------------

_BOOL_WORDS = {"true": True, "false": False}


def to_text(config: ModelConfig) -> str:
    """Serialize to the flat config format (all fields, one per line)."""
    lines = [
        f"n_agents = {config.n_agents}",
        f"memory = {config.memory}",
        f"n_strategies = {config.n_strategies}",
        f"horizon = {config.horizon}",
        f"initial_price = {config.initial_price!r}",
        f"a1 = {config.a[0]!r}",
        f"a2 = {config.a[1]!r}",
    ]
    if isinstance(config.coupling, HomogeneousCoupling):
        lines += [
            "coupling = homogeneous",
            f"b1 = {config.coupling.b1!r}",
            f"b2 = {config.coupling.b2!r}",
        ]
    else:
        lines += [
            "coupling = uniform",
            f"c1 = {config.coupling.c1!r}",
            f"delta1 = {config.coupling.delta1!r}",
            f"c2 = {config.coupling.c2!r}",
            f"delta2 = {config.coupling.delta2!r}",
        ]
    lines.append(f"allow_hold = {'true' if config.allow_hold else 'false'}")
    if config.events is not None:
        lines += [
            f"event_probability = {config.events.probability!r}",
            f"event_strength = {config.events.strength!r}",
        ]
    lines += [
        f"n_runs = {config.n_runs}",
        f"master_seed = {config.master_seed}",
    ]
    return "\n".join(lines) + "\n"


_INT_KEYS = {"n_agents", "memory", "n_strategies", "horizon", "n_runs", "master_seed"}
_FLOAT_KEYS = {
    "initial_price", "a1", "a2", "b1", "b2",
    "c1", "delta1", "c2", "delta2",
    "event_probability", "event_strength",
}


def parse_items(text: str) -> dict[str, object]:
    """Parse flat config text into a key -> typed-value dict.

    Blank lines and ``#`` comments are ignored; unknown keys are errors.
    """
    items: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in items:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key in _INT_KEYS:
            items[key] = int(value)
        elif key in _FLOAT_KEYS:
            items[key] = float(value)
        elif key == "allow_hold":
            if value.lower() not in _BOOL_WORDS:
                raise ConfigError(f"line {lineno}: allow_hold must be true or false")
            items[key] = _BOOL_WORDS[value.lower()]
        elif key == "coupling":
            if value not in ("homogeneous", "uniform"):
                raise ConfigError(f"line {lineno}: coupling must be homogeneous or uniform")
            items[key] = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return items


def from_items(items: dict[str, object]) -> ModelConfig:
    """Build a validated config from parsed items; absent keys take defaults."""
    items = dict(items)
    defaults = ModelConfig()

    kind = items.pop("coupling", None)
    coupling_keys = {"b1", "b2", "c1", "delta1", "c2", "delta2"}
    given = coupling_keys & items.keys()
    if kind is None:
        if given & {"c1", "delta1", "c2", "delta2"} and given & {"b1", "b2"}:
            raise ConfigError("mixed homogeneous and uniform coupling keys")
        kind = "uniform" if given & {"c1", "delta1", "c2", "delta2"} else (
            "homogeneous" if given else None
        )
    if kind == "homogeneous" or kind is None and not given:
        bad = given - {"b1", "b2"}
        if kind == "homogeneous" and bad:
            raise ConfigError(f"keys {sorted(bad)} do not belong to homogeneous coupling")
        base = defaults.coupling
        coupling: Coupling = HomogeneousCoupling(
            b1=float(items.pop("b1", base.b1)), b2=float(items.pop("b2", base.b2))
        )
    else:
        bad = given - {"c1", "delta1", "c2", "delta2"}
        if bad:
            raise ConfigError(f"keys {sorted(bad)} do not belong to uniform coupling")
        coupling = UniformCoupling(
            c1=float(items.pop("c1", 0.0)),
            delta1=float(items.pop("delta1", 1.0)),
            c2=float(items.pop("c2", 0.0)),
            delta2=float(items.pop("delta2", 1.0)),
        )

    events = None
    if "event_probability" in items or "event_strength" in items:
        events = EventModel(
            probability=float(items.pop("event_probability", 0.0)),
            strength=float(items.pop("event_strength", 0.0)),
        )

    config = ModelConfig(
        n_agents=int(items.pop("n_agents", defaults.n_agents)),
        memory=int(items.pop("memory", defaults.memory)),
        n_strategies=int(items.pop("n_strategies", defaults.n_strategies)),
        horizon=int(items.pop("horizon", defaults.horizon)),
        initial_price=float(items.pop("initial_price", defaults.initial_price)),
        a=(float(items.pop("a1", defaults.a[0])), float(items.pop("a2", defaults.a[1]))),
        coupling=coupling,
        allow_hold=bool(items.pop("allow_hold", defaults.allow_hold)),
        events=events,
        n_runs=int(items.pop("n_runs", defaults.n_runs)),
        master_seed=int(items.pop("master_seed", defaults.master_seed)),
    )
    if items:
        raise ConfigError(f"unused keys {sorted(items)}")
    return validate(config)


def from_text(text: str) -> ModelConfig:
    return from_items(parse_items(text))


def read_config(path) -> ModelConfig:
    with open(path, encoding="utf-8") as fh:
        return from_text(fh.read())


def config_digest(config: ModelConfig) -> str:
    """Stable hex digest of the canonical config text."""
    return hashlib.sha256(to_text(config).encode("utf-8")).hexdigest()
