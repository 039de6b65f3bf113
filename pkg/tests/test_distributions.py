from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from adjrisk.distributions import (DiscreteDistribution, SampleWindow, comonotone_sum, empirical_law,
                                   independent_average, max_with_zero, quantile, scale_shift, uniform_on)
from conftest import laws


def test_merges_and_sorts():
    d = DiscreteDistribution.from_atoms([(2.0, 0.25), (1.0, 0.5), (2.0, 0.25)])
    assert d.values == (1.0, 2.0)
    assert d.probs == (0.5, 0.5)


@pytest.mark.parametrize("atoms", [[], [(1.0, 0.5)], [(1.0, 1.0), (2.0, 0.0)], [(float("inf"), 1.0)]])
def test_rejects_bad_laws(atoms):
    with pytest.raises(ValueError):
        DiscreteDistribution.from_atoms(atoms)


def test_quantile_is_left_continuous():
    d = DiscreteDistribution.from_atoms([(0.0, 0.5), (1.0, 0.5)])
    assert quantile(d, 0.0) == 0.0
    assert quantile(d, 0.5) == 0.0
    assert quantile(d, 0.5 + 1e-9) == 1.0
    assert quantile(d, 1.0) == 1.0


def test_independent_average_matches_enumeration():
    x = DiscreteDistribution.from_atoms([(1.0, 1 / 3), (0.0, 1 / 3), (-0.5, 1 / 3)])
    avg = independent_average(x, x)
    expected = {-0.5: 1, -0.25: 2, 0.0: 1, 0.25: 2, 0.5: 2, 1.0: 1}
    assert avg.values == tuple(sorted(expected))
    for v, p in avg.atoms:
        assert p == pytest.approx(expected[v] / 9, abs=1e-15)


def test_comonotone_sum_of_copies_is_doubling():
    d = DiscreteDistribution.from_atoms([(0.0, 0.39), (1.0, 0.61)])
    s = comonotone_sum(d, d)
    assert s.values == (0.0, 2.0)
    assert s.probs == pytest.approx((0.39, 0.61))


def test_scale_shift_and_positive_part():
    d = DiscreteDistribution.from_atoms([(-2.0, 0.5), (2.0, 0.5)])
    assert scale_shift(d, 2.0, 1.0).values == (-3.0, 5.0)
    assert scale_shift(d, 0.0, 4.0) == DiscreteDistribution.point_mass(4.0)
    assert max_with_zero(d).values == (0.0, 2.0)
    with pytest.raises(ValueError):
        scale_shift(d, -1.0)


def test_empirical_law_counts_ties():
    law = empirical_law(SampleWindow.of([3, 1, 3, 2]))
    assert law.values == (1.0, 2.0, 3.0)
    assert law.probs == pytest.approx((0.25, 0.25, 0.5))


def test_uniform_on_and_mean():
    d = uniform_on([1, 2, 3, 4])
    assert d.mean() == 2.5
    assert d.expect(lambda x: x * x) == pytest.approx(7.5)


@given(laws())
def test_quantile_nondecreasing_and_in_support(d):
    qs = [quantile(d, p) for p in np.linspace(0, 1, 41)]
    assert all(b >= a for a, b in zip(qs, qs[1:]))
    assert set(qs) <= set(d.values)


@given(laws())
def test_quantile_matches_cdf_definition(d):
    # VaR_p = min{x : F(x) >= p}, evaluated with exact rational cdf sums
    probs = [Fraction(p) for p in d.probs]
    for p in (0.1, 0.37, 0.5, 0.9, 0.99):
        cum = Fraction(0)
        expected = d.values[-1]
        for v, q in zip(d.values, probs):
            cum += q
            if cum >= Fraction(p) - Fraction(1, 10**12):
                expected = v
                break
        assert quantile(d, p) == expected
