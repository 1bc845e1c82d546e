import itertools

import numpy as np
import pytest

from symdispatch.model import (
    ConfigError,
    ScenarioConfig,
    Urgency,
    format_config,
    load_config,
    parse_config,
    resolve_collision,
    sample_private_states,
    stage_cost,
)


@pytest.mark.parametrize(
    "action, cost",
    [((1, 0), 0), ((0, 1), 0), ((1, 1), 1), ((0, 0), 1)],
)
def test_stage_cost_examples(action, cost):
    assert stage_cost(action) == cost


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_stage_cost_zero_on_exactly_n_actions(n):
    actions = list(itertools.product((False, True), repeat=n))
    assert sum(stage_cost(a) == 0 for a in actions) == n


def test_urgency_has_two_values():
    assert len(Urgency) == 2


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(num_agents=1),
        dict(horizon=0),
        dict(load_probability=-0.1),
        dict(load_probability=1.5),
        dict(seed=-1),
        dict(seed=2**64),
    ],
)
def test_config_rejects_out_of_range(kwargs):
    with pytest.raises(ConfigError):
        ScenarioConfig(**kwargs)


def test_parse_config_roundtrip(tmp_path):
    cfg = ScenarioConfig(3, 7, 0.25, 2**63 + 5)
    path = tmp_path / "s.cfg"
    path.write_text(format_config(cfg))
    assert load_config(path) == cfg


def test_parse_config_comments_and_colons():
    cfg = parse_config("# heavy\nnum_agents: 2\nhorizon = 10  # slots\nload_probability=0.8\nseed = 9\n")
    assert cfg == ScenarioConfig(2, 10, 0.8, 9)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("num_agents = 2\nbogus = 1\n", "unknown key 'bogus'"),
        ("horizon = 10\nhorizon = 5\n", "duplicate"),
        ("horizon = ten\n", "bad value"),
        ("just a line\n", "expected"),
    ],
)
def test_parse_config_errors(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)


@pytest.mark.parametrize("load, expected", [(0.0, Urgency.LOW), (1.0, Urgency.HIGH)])
def test_degenerate_priors(load, expected):
    cfg = ScenarioConfig(load_probability=load)
    rng = np.random.default_rng(0)
    for _ in range(200):
        assert sample_private_states(cfg, rng) == (expected, expected)


def test_private_state_frequency():
    cfg = ScenarioConfig(num_agents=2, load_probability=0.5)
    rng = np.random.default_rng(7)
    draws = [sample_private_states(cfg, rng) for _ in range(50_000)]
    freq = np.mean([s is Urgency.HIGH for d in draws for s in d])
    assert abs(freq - 0.5) <= 0.01


def test_private_states_deterministic():
    cfg = ScenarioConfig(num_agents=4, load_probability=0.3)
    a = sample_private_states(cfg, np.random.default_rng(11))
    b = sample_private_states(cfg, np.random.default_rng(11))
    assert a == b and len(a) == 4


def test_resolve_collision_examples():
    rng = np.random.default_rng(0)
    assert resolve_collision((1, 0), rng) == 0
    assert resolve_collision((0, 1), rng) == 1
    assert resolve_collision((0, 0), rng) is None


def test_resolve_collision_uniform():
    rng = np.random.default_rng(3)
    wins = np.array([resolve_collision((1, 1), rng) for _ in range(100_000)])
    assert abs(np.mean(wins == 0) - 0.5) <= 0.01


def test_resolve_collision_only_dispatchers():
    rng = np.random.default_rng(5)
    for action in itertools.product((0, 1), repeat=4):
        for _ in range(20):
            w = resolve_collision(action, rng)
            assert (w is None) == (sum(action) == 0)
            if w is not None:
                assert action[w]
