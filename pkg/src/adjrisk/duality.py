"""Dual representations of expectiles and of the adjusted expectile measure.

On a finite space the densities allowed for ``e_q`` are those whose
max/min weight ratio is at most ``kappa = max(q, 1-q) / min(q, 1-q)``.
That set is a cone cut by the mean-one hyperplane; its extreme points are
two-valued densities, so the optimum puts weight ``kappa * l`` on a block
of top (or bottom) atoms and ``l`` elsewhere.  Scanning the block size
gives the exact optimum.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .distributions import DiscreteDistribution
from .extreal import NEG_INF, POS_INF, ExtReal, ext, ext_sub
from .profiles import TargetRiskProfile

MAX_ATOMS = 12
MEAN_ONE_TOL = 1e-12
DEFAULT_LEVEL_STEP = 1e-3


class AtomLimitError(RuntimeError):
    """The law has more atoms than the desk-scale dual solver accepts."""


@dataclass(frozen=True)
class Density:
    """Weights ``dQ/dP`` on the atoms of a reference law."""

    weights: Tuple[float, ...]
    probs: Tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        p = tuple(float(x) for x in self.probs)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "probs", p)
        if len(w) != len(p) or not w:
            raise ValueError("need one weight per atom")
        if any(x <= 0 for x in w):
            raise ValueError("density weights must be strictly positive")
        if abs(float(np.dot(w, p)) - 1.0) > MEAN_ONE_TOL:
            raise ValueError("density must integrate to one")

    @classmethod
    def uniform(cls, d: DiscreteDistribution) -> "Density":
        return cls((1.0,) * len(d), d.probs)

    def expectation(self, d: DiscreteDistribution) -> float:
        return float(np.dot(np.multiply(self.weights, self.probs), d.values))


def c_of(q: Density) -> float:
    lo, hi = min(q.weights), max(q.weights)
    return lo / (lo + hi)


@dataclass(frozen=True)
class DualSolution:
    value: float
    density: Density


def _check_atoms(d: DiscreteDistribution) -> None:
    if len(d) > MAX_ATOMS:
        raise AtomLimitError(f"{len(d)} atoms exceed the cap of {MAX_ATOMS}")


def _block_optimum(d: DiscreteDistribution, kappa: float, top: bool) -> DualSolution:
    """Best two-valued density with ratio ``kappa`` on a top or bottom block.

    ``top=True`` maximizes ``E_Q[X]`` (high weight on the largest atoms);
    ``top=False`` minimizes it (high weight on the smallest atoms).
    """
    x = np.asarray(d.values)
    p = np.asarray(d.probs)
    m = len(x)
    best = None
    for j in range(m + 1):
        hi = np.zeros(m, dtype=bool)
        if top:
            hi[m - j:] = True
        else:
            hi[:j] = True
        w = np.where(hi, kappa, 1.0)
        mass = float(np.dot(w, p))
        val = float(np.dot(w * p, x)) / mass
        better = best is None or (val > best[0] if top else val < best[0])
        if better:
            best = (val, w / mass)
    val, w = best
    # re-pin the mean-one constraint against rounding
    w = w / float(np.dot(w, p))
    return DualSolution(val, Density(tuple(w), d.probs))


def expectile_dual(d: DiscreteDistribution, q: float) -> DualSolution:
    """Optimal density and value of the dual problem for ``e_q``."""
    if not 0.0 < q < 1.0:
        raise ValueError("dual representation needs q in (0, 1)")
    _check_atoms(d)
    if q >= 0.5:
        return _block_optimum(d, q / (1.0 - q), top=True)
    return _block_optimum(d, (1.0 - q) / q, top=False)


def expectile_dual_value(d: DiscreteDistribution, q: float) -> ExtReal:
    return ext(expectile_dual(d, q).value)


def _level_grid(g: TargetRiskProfile, lo: float, hi: float, step: float,
                include_hi: bool = True) -> List[float]:
    n = int(round((hi - lo) / step))
    levels = {lo + i * (hi - lo) / n for i in range(n + 1)}
    for t in g.knots:
        for s in (t, t - 1e-9):
            if lo <= s <= hi:
                levels.add(s)
    out = sorted(levels)
    return out if include_hi else [x for x in out if x < hi]


@dataclass(frozen=True)
class AermDual:
    value: ExtReal
    level: float
    density: Optional[Density]
    branch: int


def aerm_dual_value(d: DiscreteDistribution, g: TargetRiskProfile,
                    step: float = DEFAULT_LEVEL_STEP) -> AermDual:
    """Both branches of the dual formula for the adjusted expectile measure.

    Branch 1 scans ``p`` in ``[0, 1/2]`` with the inner infimum equal to the
    dual minimum at ratio ``(1-p)/p`` (the minimum atom at ``p = 0``).
    Branch 2 scans densities by their ratio ``kappa = p/(1-p)``, ``p`` in
    ``[1/2, 1)``, for which ``1 - c(Q) = p``.
    """
    if not g.eval(1.0).is_pos_inf:
        raise ValueError("the dual formula needs g(1) = +inf")
    _check_atoms(d)
    best = AermDual(NEG_INF, 0.0, None, 1)
    for p in _level_grid(g, 0.0, 0.5, step):
        if p == 0.0:
            sol = DualSolution(d.min, None)
        else:
            sol = expectile_dual(d, p)
        term = ext_sub(sol.value, g.eval(p))
        if term > best.value:
            best = AermDual(term, p, sol.density, 1)
    for p in _level_grid(g, 0.5, 1.0, step, include_hi=False):
        sol = expectile_dual(d, p)
        term = ext_sub(sol.value, g.eval(p))
        if term > best.value:
            best = AermDual(term, p, sol.density, 2)
    return best


def minimax_gap(d: DiscreteDistribution, g: TargetRiskProfile,
                step: float = DEFAULT_LEVEL_STEP) -> Tuple[ExtReal, ExtReal]:
    """``(sup_p inf_Q, inf_Q sup_p)`` of ``E_Q[X] - g(p) + delta_{[0, c(Q)]}(p)`` on ``[0, 1/2]``.

    For a fixed ``c = c(Q)`` the inner supremum depends on ``Q`` only
    through ``E_Q[X]``, so the outer infimum uses the dual minimizer at
    ratio ``(1-c)/c``.
    """
    _check_atoms(d)
    levels = _level_grid(g, 0.0, 0.5, step)
    sup_inf = NEG_INF
    for p in levels:
        inner = d.min if p == 0.0 else expectile_dual(d, p).value
        sup_inf = max(sup_inf, ext_sub(inner, g.eval(p)))
    inf_sup = POS_INF
    for c in levels[1:]:
        eq = expectile_dual(d, c).value
        outer = NEG_INF
        for p in levels:
            lhs = POS_INF if p > c else ext(eq)
            outer = max(outer, ext_sub(lhs, g.eval(p)))
        inf_sup = min(inf_sup, outer)
    return sup_inf, inf_sup


def penalty_along_ratio(g: TargetRiskProfile, cs: Sequence[float]) -> List[ExtReal]:
    """``g(1 - c)`` along a sequence of ``c`` values in ``(0, 1/2]``."""
    return [g.eval(1.0 - c) for c in cs]
