import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from adjrisk.distributions import DiscreteDistribution, uniform_on
from adjrisk.extreal import POS_INF
from adjrisk.families import RiskFamilySpec
from adjrisk.profiles import (TargetRiskProfile, benchmark_profile, constant_then_infinite,
                              default_benchmark_grid, left_continuous_profile, left_inverse,
                              load_profile, profile_from_text, profile_to_text, save_profile,
                              step_profile, validate_finiteness_assumption)

STEP_CASE = step_profile([0.95, 0.99], [0.0, 0.01])


def test_step_profile_values():
    g = STEP_CASE
    assert g(0.0) == 0 and g(0.95) == 0
    assert g(0.96) == 0.01 and g(0.99) == 0.01
    assert g(0.995).is_pos_inf and g(1.0).is_pos_inf
    assert g.breakpoints == (0.95, 0.99)
    assert g.is_left_continuous and g.in_g0


@pytest.mark.parametrize("levels,values", [
    ([0.5, 0.4], [0.0, 1.0]), ([0.5], [-1.0]), ([0.5, 0.6], [1.0, 1.0]), ([1.0], [0.0]),
    ([0.5], [math.inf]),
])
def test_step_profile_rejects(levels, values):
    with pytest.raises(ValueError):
        step_profile(levels, values)


def test_profile_must_be_nondecreasing_and_finite_somewhere():
    with pytest.raises(ValueError):
        TargetRiskProfile((0.0, 1.0), (1.0, 0.0), (0.5,))
    with pytest.raises(ValueError):
        TargetRiskProfile((0.0, 1.0), (0.0, math.inf), (math.inf,))


def test_p1_p2_and_left_inverse():
    g = STEP_CASE
    assert g.p1 == 0.95 and g.p2 == 0.99
    assert left_inverse(g, 0.0) == 0.95
    assert left_inverse(g, 0.005) == 0.95
    assert left_inverse(g, 0.01) == 0.99
    assert left_inverse(g, POS_INF) == 1.0
    flat = left_continuous_profile([1.0], [0.0])
    assert left_inverse(flat, 0.0) == 1.0
    with pytest.raises(ValueError):
        left_inverse(g.scaled(1.0), -1.0)


def test_image_of_step():
    assert [float(u) for u in STEP_CASE.image()] == [0.0, 0.01, math.inf]


def test_point_valued_profile():
    g = constant_then_infinite(0.95, 0.0, at_q=0.01)
    assert g(0.9) == 0 and g(0.95) == 0.01 and g(0.96).is_pos_inf
    assert not g.is_left_continuous


def test_finiteness_assumption():
    rep = validate_finiteness_assumption(STEP_CASE)
    assert rep.ok and (rep.p1, rep.p2) == (0.95, 0.99)
    bad = validate_finiteness_assumption(constant_then_infinite(0.95, 0.0, at_q=0.01))
    assert not bad.ok
    flat = validate_finiteness_assumption(constant_then_infinite(0.9))
    assert not flat.ok  # p1 == p2


def test_benchmark_grid():
    grid = default_benchmark_grid()
    assert len(grid) == 51 and grid[0] == 0.0001 and grid[-1] == 0.9999
    assert 0.5 in grid


def test_benchmark_profile_clamps_and_rectifies():
    w = np.linspace(-0.02, 0.03, 60)
    g = benchmark_profile(RiskFamilySpec.var(), w)
    vals = [float(v) for v in g.at[:-1]]
    assert vals[0] == 0.0 and min(vals) >= 0.0
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert g(1.0).is_pos_inf


def test_flat_returns_give_zero_profile():
    g = benchmark_profile(RiskFamilySpec.es(), np.full(80, -0.001))
    assert all(v == 0.0 for v in g.at[:-1])


def test_benchmark_profile_on_exact_law():
    d = DiscreteDistribution.from_atoms([(-1.0, 0.5), (1.0, 0.5)])
    g = benchmark_profile(RiskFamilySpec.es(), d, grid=[0.0, 0.5, 0.75], cap=False)
    assert g(0.5) == 1.0 and g(0.25) == 1.0 and g(0.0) == 0.0 and g(1.0) == 1.0


def test_text_roundtrip(tmp_path):
    for g in (STEP_CASE, constant_then_infinite(0.95, 0.0, at_q=0.01),
              benchmark_profile(RiskFamilySpec.es(), np.random.default_rng(3).normal(size=60))):
        assert profile_from_text(profile_to_text(g)) == g
        save_profile(g, tmp_path / "g.txt")
        assert load_profile(tmp_path / "g.txt") == g


def test_text_format_is_readable():
    text = profile_to_text(STEP_CASE)
    assert text.splitlines()[0] == "0.0\t0.0"
    assert text.splitlines()[-1] == "1.0\tinf"


@given(st.lists(st.floats(0.0, 5.0), min_size=1, max_size=8))
def test_tabulated_profile_nondecreasing(values):
    vals = np.maximum.accumulate(values)
    levels = np.linspace(0.1, 0.9, len(vals))
    g = left_continuous_profile(levels, vals)
    pts = [g(p) for p in np.linspace(0, 1, 57)]
    assert all(b >= a for a, b in zip(pts, pts[1:]))
