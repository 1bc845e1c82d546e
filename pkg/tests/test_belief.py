import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracle import posterior_exact, prob_exactly_one, snap_exact
from symdispatch.belief import (
    BeliefGrid,
    Prescription,
    ZeroLikelihood,
    bayes_update,
    dispatch_probability,
    expected_stage_cost,
    joint_observation_probability,
    snap_to_grid,
    update_beliefs,
)

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
prescriptions = st.builds(Prescription, unit, unit)
JOINT = list(itertools.product((False, True), repeat=2))


@pytest.mark.parametrize(
    "b, g, expected",
    [(1.0, (0.7, 0.1), 0.7), (0.0, (0.7, 0.1), 0.1), (0.5, (0.8, 0.2), 0.5)],
)
def test_dispatch_probability(b, g, expected):
    assert dispatch_probability(b, Prescription(*g)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize(
    "belief, g, expected",
    [((1, 1), (1, 0.3), 1.0), ((1, 0), (1, 0), 0.0), ((0.5, 0.5), (1, 0), 0.5)],
)
def test_expected_stage_cost_examples(belief, g, expected):
    assert expected_stage_cost(belief, Prescription(*g)) == pytest.approx(expected, abs=1e-15)


def test_expected_stage_cost_rejects_other_n():
    with pytest.raises(ValueError):
        expected_stage_cost((0.5, 0.5, 0.5), Prescription(1, 0))


@given(unit, unit, prescriptions)
def test_expected_stage_cost_matches_enumeration(b1, b2, g):
    r1 = dispatch_probability(b1, g)
    r2 = dispatch_probability(b2, g)
    c = expected_stage_cost((b1, b2), g)
    assert 0.0 <= c <= 1.0 + 1e-15
    assert c == pytest.approx(1.0 - prob_exactly_one(r1, r2), abs=1e-12)


@pytest.mark.parametrize(
    "b, g, u, expected",
    [
        (0.5, (1.0, 0.0), True, 1.0),
        (0.5, (0.5, 0.5), True, 0.5),
        (0.5, (0.8, 0.2), True, 0.8),
    ],
)
def test_bayes_update_examples(b, g, u, expected):
    assert bayes_update(b, Prescription(*g), u) == pytest.approx(expected, abs=1e-15)


def test_collision_scenario_reveals_both():
    # Both agents dispatch under the revealing prescription from prior 0.5.
    g = Prescription(1.0, 0.0)
    assert update_beliefs((0.5, 0.5), (g, g), (True, True)) == (1.0, 1.0)


def test_zero_likelihood_strict_and_robust():
    g = Prescription(1.0, 0.0)
    with pytest.raises(ZeroLikelihood):
        bayes_update(1.0, g, False)
    assert bayes_update(1.0, g, False, strict=False) == 1.0
    with pytest.raises(ZeroLikelihood):
        bayes_update(0.0, g, True)


@given(unit, prescriptions)
def test_bayes_martingale(b, g):
    r = dispatch_probability(b, g)
    total = 0.0
    for u, p in ((True, r), (False, 1.0 - r)):
        if p > 0:
            total += p * bayes_update(b, g, u)
    assert total == pytest.approx(b, abs=1e-12)


@given(prescriptions, st.booleans(), st.sampled_from([0.0, 1.0]))
def test_absorbing_certainty(g, u, b):
    try:
        assert bayes_update(b, g, u) == b
    except ZeroLikelihood:
        pass


@given(unit, unit, st.booleans())
def test_uninformative_prescription(b, gamma, u):
    g = Prescription(gamma, gamma)
    assert bayes_update(b, g, u, strict=False) == b


@given(st.fractions(0, 1, max_denominator=40), st.sampled_from(range(21)), st.sampled_from(range(21)), st.booleans())
def test_bayes_matches_exact_rational(b, h, l, u):
    g = Prescription(h / 20, l / 20)
    exact = posterior_exact(Fraction(b), Fraction(h, 20), Fraction(l, 20), u)
    if exact is None:
        with pytest.raises(ZeroLikelihood):
            bayes_update(float(b), g, u)
    else:
        assert bayes_update(float(b), g, u) == pytest.approx(float(exact), abs=1e-14)


def test_joint_observation_probability_examples():
    assert joint_observation_probability((1, 1), Prescription(1, 0.4), (1, 1)) == 1.0
    assert joint_observation_probability((0.5, 0.5), Prescription(1, 0), (1, 0)) == 0.25


@given(unit, unit, prescriptions)
def test_joint_observation_probability_normalized(b1, b2, g):
    total = sum(joint_observation_probability((b1, b2), g, u) for u in JOINT)
    assert total == pytest.approx(1.0, abs=1e-12)


def test_grid_points():
    grid = BeliefGrid()
    pts = grid.points
    assert len(pts) == 21 and pts[0] == 0.0 and pts[-1] == 1.0
    assert np.allclose(np.diff(pts), 0.05)


def test_grid_rejects_uneven_resolution():
    with pytest.raises(ValueError):
        BeliefGrid(0.3)


@pytest.mark.parametrize(
    "b, expected",
    [(0.80, 0.80), (0.8 / (0.8 + 0.2 * 0.25), 0.95), (0.025, 0.05), (0.0, 0.0), (1.0, 1.0), (0.974, 0.95)],
)
def test_snap_examples(b, expected):
    assert snap_to_grid((b, b), BeliefGrid()) == (expected, expected)


@given(st.fractions(0, 1, max_denominator=200))
def test_snap_matches_exact_rule(b):
    assert BeliefGrid().snap(float(b)) == float(snap_exact(Fraction(b), 20))


@given(unit)
def test_snap_is_nearest(b):
    s = BeliefGrid().snap(b)
    assert abs(s - b) <= 0.025 + 1e-9
