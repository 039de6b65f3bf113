"""Executable counterexamples and property checks for adjusted risk measures."""
from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import measures as M
from .adjusted import adjusted_value
from .distributions import (DiscreteDistribution, independent_average, max_with_zero, scale_shift,
                            uniform_on)
from .duality import aerm_dual_value, c_of, expectile_dual_value, minimax_gap
from .extreal import format_ext
from .families import RiskFamilySpec
from .profiles import (TargetRiskProfile, constant_then_infinite,
                       left_continuous_profile, step_profile)

EPS = 0.01

_RELATIONS = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}

# an evaluator maps a law to the adjusted value of the fixture's measure
Evaluator = Callable[[DiscreteDistribution], float]


@dataclass(frozen=True)
class CounterexampleFixture:
    """A claimed strict inequality between two evaluations of one adjusted measure."""

    name: str
    spec: RiskFamilySpec
    g: TargetRiskProfile
    inputs: Tuple[DiscreteDistribution, ...]
    lhs_text: str
    relation: str
    rhs_text: str
    lhs: Callable[[Evaluator, Tuple[DiscreteDistribution, ...]], float] = field(compare=False)
    rhs: Callable[[Evaluator, Tuple[DiscreteDistribution, ...]], float] = field(compare=False)
    expected: Optional[Tuple[float, float]] = None


@dataclass(frozen=True)
class CheckReport:
    name: str
    relation: str
    lhs: float
    rhs: float
    passed: bool
    note: str = ""

    def row(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.name:<28} {self.relation:<24} {format_ext(self.lhs, 10):>14} "
                f"{format_ext(self.rhs, 10):>14}  {status}")


def run_fixture(f: CounterexampleFixture, expected_tol: float = 1e-12) -> CheckReport:
    def rho(d: DiscreteDistribution) -> float:
        return float(adjusted_value(f.spec, f.g, d).value)

    lhs, rhs = f.lhs(rho, f.inputs), f.rhs(rho, f.inputs)
    ok = bool(_RELATIONS[f.relation](lhs, rhs))
    note = ""
    if f.expected is not None:
        el, er = f.expected
        close = math.isclose(lhs, el, abs_tol=expected_tol) and math.isclose(rhs, er, abs_tol=expected_tol)
        ok = ok and close
        if not close:
            note = f"expected ({el}, {er})"
    return CheckReport(f.name, f"{f.lhs_text} {f.relation} {f.rhs_text}", lhs, rhs, ok, note)


def _two_point(a: float, pa: float, b: float) -> DiscreteDistribution:
    return DiscreteDistribution.from_atoms([(a, pa), (b, 1.0 - pa)])


def scrm_convexity_fixture(c: float = 1.0, eps: float = EPS, r: float = 0.7) -> CounterexampleFixture:
    # g = (c + eps) on [2/3, 1]: the value at 2/3 itself is already positive
    g = TargetRiskProfile((0.0, 2.0 / 3.0, 1.0), (0.0, c + eps, c + eps), (0.0, c + eps), "step")
    x = DiscreteDistribution.from_atoms([(c, 1 / 3), (0.0, 1 / 3), (-0.5 * c, 1 / 3)])
    return CounterexampleFixture(
        "scrm_convexity", RiskFamilySpec.scrm(r), g, (x, x),
        "rho((X+Y)/2)", ">", "rho(X)/2 + rho(Y)/2",
        lambda rho, xs: rho(independent_average(xs[0], xs[1])),
        lambda rho, xs: 0.5 * rho(xs[0]) + 0.5 * rho(xs[1]),
        expected=(0.25 * c, 0.0))


def aerm_homogeneity_fixture(eps: float = EPS) -> CounterexampleFixture:
    g = left_continuous_profile([2.0 / 3.0], [2.0 - eps])
    x = _two_point(-2.0, 0.5, 4.0)
    return CounterexampleFixture(
        "aerm_positive_homogeneity", RiskFamilySpec.expectile(), g, (x,),
        "2 rho(X)", "<", "rho(2X)",
        lambda rho, xs: 2.0 * rho(xs[0]),
        lambda rho, xs: rho(scale_shift(xs[0], 2.0)),
        expected=(2 * eps, 2.0 + eps))


def scrm_subadditivity_fixture(c: float = 1.0, eps: float = EPS, q: float = 0.4,
                               r: float = 0.5) -> CounterexampleFixture:
    lo = q - eps
    g = TargetRiskProfile((0.0, lo, 1.0), (0.0, 1.5 * c, 1.5 * c), (0.0, 1.5 * c), "step")
    x = _two_point(0.0, lo, c)
    return CounterexampleFixture(
        "scrm_subadditivity", RiskFamilySpec.scrm(r), g, (x,),
        "rho(X+X)", ">", "2 rho(X)",
        lambda rho, xs: rho(scale_shift(xs[0], 2.0)),
        lambda rho, xs: 2.0 * rho(xs[0]),
        expected=(0.5 * c, 0.0))


def scrm_surplus_fixture(c: float = 1.0, q: float = 0.4, s: float = 0.2,
                         r: float = 0.2) -> CounterexampleFixture:
    mid = (q + s) / 2.0
    g = constant_then_infinite(mid)
    x = _two_point(-c, q, c)
    # ES at (q+s)/2 of X and of max(X, 0), both over the tail mass 1 - mid
    exact = ((1 - q) * c - (q - mid) * c) / (1 - mid), (1 - q) * c / (1 - mid)
    return CounterexampleFixture(
        "scrm_surplus_invariance", RiskFamilySpec.scrm(r), g, (x,),
        "rho(X)", "<", "rho(max(X,0))",
        lambda rho, xs: rho(xs[0]),
        lambda rho, xs: rho(max_with_zero(xs[0])),
        expected=exact)


def aerm_surplus_fixture(c: float = 1.0) -> CounterexampleFixture:
    g = constant_then_infinite(0.5)
    x = _two_point(-2.0 * c, 0.5, 2.0 * c)
    return CounterexampleFixture(
        "aerm_surplus_invariance", RiskFamilySpec.expectile(), g, (x,),
        "rho(X)", "<", "rho(max(X,0))",
        lambda rho, xs: rho(xs[0]),
        lambda rho, xs: rho(max_with_zero(xs[0])),
        expected=(0.0, c))


def counterexample_fixtures() -> List[CounterexampleFixture]:
    return [scrm_convexity_fixture(), aerm_homogeneity_fixture(), scrm_subadditivity_fixture(),
            scrm_surplus_fixture(), aerm_surplus_fixture()]


# positive homogeneity


@dataclass(frozen=True)
class PHWitness:
    law: DiscreteDistribution
    lam: float
    scaled_value: float  # rho(lam X)
    value_scaled: float  # lam rho(X)

    @property
    def gap(self) -> float:
        return abs(self.scaled_value - self.value_scaled)


def _differs(a: float, b: float, tol: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a != b
    return abs(a - b) > tol * max(1.0, abs(a), abs(b))


def ph_violation_search(spec: RiskFamilySpec, g: TargetRiskProfile,
                        candidates: Sequence[DiscreteDistribution], lams: Sequence[float],
                        tol: float = 1e-9) -> Optional[PHWitness]:
    """First ``(X, lam)`` with ``rho(lam X) != lam rho(X)`` beyond ``tol`` (relative)."""
    for d in candidates:
        base = float(adjusted_value(spec, g, d).value)
        for lam in lams:
            scaled = float(adjusted_value(spec, g, scale_shift(d, lam)).value)
            if _differs(scaled, lam * base, tol):
                return PHWitness(d, lam, scaled, lam * base)
    return None


def ph_candidates(seed: int = 0, n_random: int = 20) -> List[DiscreteDistribution]:
    """Spread-out uniform laws at several scales plus random small laws.

    Scaling a wide law moves the maximizing level of ``rho_p - g(p)``
    between steps, which is what breaks homogeneity.
    """
    out = [uniform_on(np.linspace(-s, s, 41)) for s in (0.01, 0.05, 0.2, 1.0)]
    out += [uniform_on(np.linspace(0.0, s, 41)) for s in (0.02, 0.1, 0.5)]
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        k = int(rng.integers(2, 7))
        vals = rng.normal(0.0, rng.uniform(0.01, 1.0), size=k)
        probs = rng.dirichlet(np.ones(k))
        out.append(DiscreteDistribution.from_atoms(zip(vals.tolist(), probs.tolist())))
    return out


PH_LAMBDAS = (0.5, 2.0, 7.0)


def two_step_profile() -> TargetRiskProfile:
    """Profile with two finite positive values (0.01 and 0.02)."""
    return step_profile([0.5, 0.9, 0.99], [0.0, 0.01, 0.02])


def one_step_profile(q: float = 0.95, r: float = 0.01) -> TargetRiskProfile:
    """Profile whose only finite positive value ``r`` sits at the single level ``q``."""
    return constant_then_infinite(q, 0.0, at_q=r)


# combined runner


def dual_checks(seed: int = 0, n_random: int = 100) -> List[CheckReport]:
    reports = []
    d39 = _two_point(0.0, 0.5, 1.0)
    res = aerm_dual_value(d39, constant_then_infinite(0.95))
    w = res.density.weights if res.density is not None else ()
    ok = (res.density is not None and np.allclose(w, (0.1, 1.9), atol=1e-9)
          and abs((1.0 - c_of(res.density)) - 0.95) < 1e-9 and abs(float(res.value) - 0.95) < 1e-9)
    reports.append(CheckReport("aerm_dual_density", "1-c(Q) == 0.95",
                               1.0 - c_of(res.density) if res.density else math.nan, 0.95, ok,
                               f"weights={tuple(round(x, 12) for x in w)}"))
    d310 = _two_point(-1.0, 0.5, 1.0)
    g310 = left_continuous_profile([0.5], [1.0])
    si, is_ = minimax_gap(d310, g310)
    reports.append(CheckReport("aerm_minimax_gap", "(sup inf, inf sup) == (-1, 0)",
                               float(si), float(is_), si == -1.0 and is_ == 0.0))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_random):
        k = int(rng.integers(1, 7))
        d = DiscreteDistribution.from_atoms(zip(rng.normal(size=k).tolist(),
                                                rng.dirichlet(np.ones(k)).tolist()))
        for q in (0.1, 0.25, 0.5, 0.75, 0.9, 0.95):
            worst = max(worst, abs(float(expectile_dual_value(d, q)) - M.expectile(d, q)))
    reports.append(CheckReport("expectile_primal_dual", "max |dual - primal| <= 1e-6",
                               worst, 1e-6, worst <= 1e-6))
    return reports


def ph_checks(seed: int = 0) -> List[CheckReport]:
    cands = ph_candidates(seed)
    es = RiskFamilySpec.es()
    w2 = ph_violation_search(es, two_step_profile(), cands, PH_LAMBDAS, tol=1e-9)
    w1 = ph_violation_search(es, one_step_profile(), cands, PH_LAMBDAS, tol=1e-10)
    return [
        CheckReport("ph_two_positive_values", "witness gap > 1e-6",
                    w2.gap if w2 else 0.0, 1e-6, bool(w2 and w2.gap > 1e-6)),
        CheckReport("ph_one_positive_value", "no witness",
                    w1.gap if w1 else 0.0, 1e-10, w1 is None),
    ]


def run_all(seed: int = 0) -> List[CheckReport]:
    reports = [run_fixture(f) for f in counterexample_fixtures()]
    reports += dual_checks(seed)
    reports += ph_checks(seed)
    return reports


def format_table(reports: Sequence[CheckReport]) -> str:
    head = f"{'check':<28} {'relation':<24} {'lhs':>14} {'rhs':>14}  status"
    lines = [head, "-" * len(head)]
    for r in reports:
        lines.append(r.row() + (f"  ({r.note})" if r.note else ""))
    return "\n".join(lines)
