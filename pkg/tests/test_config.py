import pytest
from hypothesis import given, strategies as st

from mgmarket import (
    CoefficientOutOfRangeError,
    ConfigError,
    EvenAgentCountError,
    EventModel,
    HomogeneousCoupling,
    ModelConfig,
    UniformCoupling,
    config_digest,
    from_text,
    to_text,
    validate,
)
from mgmarket.config import from_items, parse_items


def test_paper_scale_config_accepted():
    cfg = ModelConfig(
        n_agents=1001, memory=1, n_strategies=2, horizon=1000,
        initial_price=2000.0, a=(1.0, 1.0), coupling=HomogeneousCoupling(0.5, 0.5),
    )
    assert validate(cfg) is cfg


def test_even_agent_count_rejected():
    with pytest.raises(EvenAgentCountError):
        validate(ModelConfig(n_agents=1000))


@pytest.mark.parametrize("a", [(0.0, 1.0), (1.0, 1.5), (-0.2, 0.5)])
def test_persistence_weight_out_of_range(a):
    with pytest.raises(CoefficientOutOfRangeError):
        validate(ModelConfig(a=a))


def test_negative_delta_rejected():
    with pytest.raises(CoefficientOutOfRangeError):
        validate(ModelConfig(coupling=UniformCoupling(0.0, -0.5, 0.0, 1.0)))


def test_event_probability_bounds():
    with pytest.raises(CoefficientOutOfRangeError):
        validate(ModelConfig(events=EventModel(probability=1.5, strength=1.0)))
    with pytest.raises(CoefficientOutOfRangeError):
        validate(ModelConfig(events=EventModel(probability=0.5, strength=-1.0)))


@pytest.mark.parametrize(
    "field,value",
    [("horizon", 0), ("n_strategies", 0), ("memory", 0), ("initial_price", 0.0),
     ("n_runs", 0), ("n_agents", -3)],
)
def test_nonpositive_sizes_rejected(field, value):
    with pytest.raises(ConfigError):
        validate(ModelConfig(**{field: value}))


def test_round_trip_homogeneous():
    cfg = ModelConfig(coupling=HomogeneousCoupling(0.1 + 0.2, -0.30000000000000004))
    assert from_text(to_text(cfg)) == cfg


def test_round_trip_uniform_with_events():
    cfg = ModelConfig(
        coupling=UniformCoupling(0.4, 0.2, -0.3, 1.0),
        events=EventModel(probability=0.0082, strength=3.0),
        allow_hold=True,
    )
    assert from_text(to_text(cfg)) == cfg


@given(
    b1=st.floats(-2, 2, allow_nan=False),
    b2=st.floats(-2, 2, allow_nan=False),
    price=st.floats(1e-3, 1e6, allow_nan=False),
    seed=st.integers(0, 2**63 - 1),
)
def test_round_trip_is_bit_exact(b1, b2, price, seed):
    cfg = ModelConfig(
        coupling=HomogeneousCoupling(b1, b2), initial_price=price, master_seed=seed
    )
    again = from_text(to_text(cfg))
    assert again == cfg
    assert config_digest(again) == config_digest(cfg)


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_items("n_agents = 11\nbogus = 3\n")


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_items("memory = 1\nmemory = 2\n")


def test_comments_and_blank_lines_ignored():
    items = parse_items("# header\n\nn_agents = 11  # inline\n")
    assert items == {"n_agents": 11}


def test_mixed_coupling_keys_rejected():
    with pytest.raises(ConfigError):
        from_items({"b1": 0.5, "c1": 0.2})


def test_uniform_keys_with_homogeneous_kind_rejected():
    with pytest.raises(ConfigError):
        from_items({"coupling": "homogeneous", "delta1": 1.0})
