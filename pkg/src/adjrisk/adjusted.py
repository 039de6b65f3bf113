"""Adjusted risk measures ``sup_p {rho_p(X) - g(p)}``."""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from . import measures as M
from .distributions import DiscreteDistribution
from .extreal import NEG_INF, ExtReal, ext_sub
from .families import (LEVEL_CAP, LEVEL_FLOOR, PreparedWindow, RiskFamilySpec, check_ordered,
                       rho_p, rho_p_hat)
from .profiles import TargetRiskProfile, left_continuous_profile, left_inverse

DEFAULT_STEP = 0.02
LEFT_LIMIT_OFFSET = 1e-9


class UnorderedFamilyError(ValueError):
    """The family is not ordered, so the image-based representation does not apply."""


class LevelMismatchError(ValueError):
    """CRM/FCRM segment levels do not line up with the profile's breakpoints."""


@dataclass(frozen=True)
class AdjustedResult:
    value: ExtReal
    argmax_level: float
    attained: bool = True

    def __float__(self) -> float:
        return float(self.value)


def uniform_levels(step: float, lo: float = 0.0, hi: float = 1.0) -> List[float]:
    n = int(round(1.0 / step))
    out = [min(max(round(i * step, 12), lo), hi) for i in range(n + 1)]
    return sorted(set(out + [lo, hi]))


def evaluation_grid(spec: RiskFamilySpec, g: TargetRiskProfile, step: float = DEFAULT_STEP,
                    bounds: Tuple[float, float] = (0.0, 1.0), extra: Iterable[float] = (),
                    left_offset: float = LEFT_LIMIT_OFFSET) -> Tuple[List[float], frozenset]:
    """Candidate levels and the subset that only approximates a left limit.

    The grid is the union of uniform steps, profile knots, family segment
    endpoints and ``knot - left_offset`` wherever the profile jumps at the
    knot itself (there the supremum is approached from the left).
    """
    lo, hi = bounds
    levels = set(uniform_levels(step, lo, hi))
    levels.update(x for x in extra if lo <= x <= hi)
    levels.update(x for x in spec.segment_endpoints if lo <= x <= hi)
    approx = set()
    for k, t in enumerate(g.knots):
        if lo <= t <= hi:
            levels.add(t)
        if k > 0 and g.at[k] != g.gaps[k - 1]:
            s = t - left_offset
            if lo <= s <= hi and s not in levels:
                approx.add(s)
                levels.add(s)
    return sorted(levels), frozenset(approx)


def _argmax(levels: Sequence[float], terms: Sequence[ExtReal], approx=frozenset()) -> AdjustedResult:
    best = max(terms)
    if best.is_neg_inf:
        return AdjustedResult(NEG_INF, levels[0], False)
    i = next(i for i, t in enumerate(terms) if t == best)
    return AdjustedResult(best, levels[i], levels[i] not in approx)


def grid_supremum(rho_values: Sequence[float], g: TargetRiskProfile, levels: Sequence[float],
                  approx=frozenset()) -> AdjustedResult:
    terms = [ext_sub(r, g.eval(p)) for r, p in zip(rho_values, levels)]
    return _argmax(levels, terms, approx)


def adjusted_value(spec: RiskFamilySpec, g: TargetRiskProfile, d: DiscreteDistribution,
                   grid: Optional[Sequence[float]] = None, step: float = DEFAULT_STEP,
                   left_offset: float = LEFT_LIMIT_OFFSET) -> AdjustedResult:
    """Grid maximum of ``rho_p(d) - g(p)`` over [0, 1]; ties go to the smallest level."""
    levels, approx = evaluation_grid(spec, g, step, (0.0, 1.0), grid or (), left_offset)
    rhos = [rho_p(spec, d, p) for p in levels]
    return grid_supremum(rhos, g, levels, approx)


def adjusted_value_hat(spec: RiskFamilySpec, g: TargetRiskProfile, w,
                       grid: Optional[Sequence[float]] = None, step: float = DEFAULT_STEP,
                       bounds: Tuple[float, float] = (LEVEL_FLOOR, LEVEL_CAP),
                       left_offset: float = LEFT_LIMIT_OFFSET, rvar_points: int = 20) -> AdjustedResult:
    """Estimator version on a sample window, levels restricted to ``bounds``."""
    pw = w if isinstance(w, PreparedWindow) else PreparedWindow(w, rvar_points)
    levels, approx = evaluation_grid(spec, g, step, bounds, grid or (), left_offset)
    rhos = [rho_p_hat(spec, pw, p) for p in levels]
    return grid_supremum(rhos, g, levels, approx)


def closed_form_step(spec: RiskFamilySpec, g: TargetRiskProfile, d: DiscreteDistribution) -> AdjustedResult:
    """Finite maximum over the pieces of a piecewise-constant profile.

    For an ordered family with left-continuous level maps, the supremum over
    a piece on which ``g`` is constant sits at the piece's right end, so the
    adjusted value is ``max_i {rho_{t_i}(d) - r_i}`` over the pieces.
    """
    if not spec.is_ordered:
        raise UnorderedFamilyError(f"{spec} is not an ordered left-continuous family")
    if spec.kind in ("crm", "fcrm"):
        missing = [x for x in spec.levels if x not in g.knots]
        if missing:
            raise LevelMismatchError(f"{spec}: levels {missing} are not breakpoints of the profile")
    cache = {}
    best = None
    for t, v in g.pieces():
        if t not in cache:
            cache[t] = rho_p(spec, d, t)
        term = ext_sub(cache[t], v)
        # a gap value sits left of t; it is attained only if it equals g(t)
        attained = v == g.eval(t)
        cand = (term, t, attained)
        if best is None or term > best[0] or (term == best[0] and t == best[1] and attained and not best[2]):
            best = cand
    term, t, attained = best
    if term.is_neg_inf:
        return AdjustedResult(NEG_INF, 0.0, False)
    return AdjustedResult(term, t, attained)


def ordered_representation(spec: RiskFamilySpec, g: TargetRiskProfile, d: DiscreteDistribution,
                           grid: Optional[Sequence[float]] = None) -> ExtReal:
    """``sup over u in Im(g) of rho_{g^{-1}_+(u)}(d) - u`` for ordered families."""
    check_grid = list(grid) if grid is not None else uniform_levels(0.01)
    chk = check_ordered(spec, d, sorted(set(check_grid) | set(g.knots)))
    if not spec.is_ordered or not chk.ordered:
        raise UnorderedFamilyError(f"{spec} is not ordered on this law: {chk.violation}")
    terms = []
    for u in g.image():
        if u.is_pos_inf:
            terms.append(NEG_INF)
            continue
        p = left_inverse(g, u)
        terms.append(ext_sub(rho_p(spec, d, p), u))
    return max(terms)


# loss value-at-risk


@dataclass(frozen=True)
class AlphaFunction:
    """Right-continuous nondecreasing step map ``u -> alpha(u)``.

    ``alpha(u) = values[k]`` for ``u`` in ``[breaks[k], breaks[k+1])``.
    """

    breaks: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        b = tuple(float(x) for x in self.breaks)
        v = tuple(float(x) for x in self.values)
        object.__setattr__(self, "breaks", b)
        object.__setattr__(self, "values", v)
        if not b or b[0] != 0.0 or len(b) != len(v):
            raise ValueError("alpha needs breaks starting at 0 and one value per break")
        if any(y <= x for x, y in zip(b, b[1:])):
            raise ValueError("alpha breaks must be strictly increasing")
        if any(y <= x for x, y in zip(v, v[1:])):
            raise ValueError("alpha values must be strictly increasing")
        if any(not 0.0 < x <= 1.0 for x in v):
            raise ValueError("alpha values must lie in (0, 1]")

    @classmethod
    def constant(cls, a: float) -> "AlphaFunction":
        return cls((0.0,), (a,))

    def __call__(self, u: float) -> float:
        if u < 0:
            raise ValueError("alpha is defined on [0, inf)")
        return self.values[bisect.bisect_right(self.breaks, u) - 1]

    @property
    def sup(self) -> float:
        return self.values[-1]


def lvar(d: DiscreteDistribution, alpha: AlphaFunction, u_grid: Sequence[float] = ()) -> float:
    """``sup_{u >= 0} VaR_{alpha(u)}(d) - u``.

    On each constant piece of ``alpha`` the term decreases in ``u``, so the
    supremum is attained at one of the breaks; ``u_grid`` adds extra points.
    """
    us = sorted(set(alpha.breaks) | {float(u) for u in u_grid if u >= 0})
    return max(M.var(d, alpha(u)) - u for u in us)


def alpha_to_profile(alpha: AlphaFunction) -> TargetRiskProfile:
    """Profile ``g`` with ``sup_p {VaR_p - g(p)} = LVaR_alpha``.

    ``g(p) = inf{u : alpha(u) >= p}`` on ``[alpha(0), sup alpha]``, ``0`` below
    and ``+inf`` above ``sup alpha``.
    """
    levels = list(alpha.values)
    values = [0.0] + list(alpha.breaks[1:])
    return left_continuous_profile(levels, values, cap=True, kind="step")
