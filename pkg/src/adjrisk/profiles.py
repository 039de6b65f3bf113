"""Target risk profiles: nondecreasing maps from [0, 1] to (-inf, inf].

A profile is stored as knots ``0 = t_0 < t_1 < ... < t_m = 1`` with the value
*at* every knot and the value on every open gap ``(t_{k-1}, t_k)``.  This
covers left-continuous step functions (value at ``t_k`` equals the value on
the gap before it) as well as profiles with isolated point values such as
``(c + eps) * 1_[2/3, 1]``.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .distributions import DiscreteDistribution, SampleWindow
from .extreal import POS_INF, ZERO, ExtReal, ext, format_ext, parse_ext
from .families import LEVEL_CAP, LEVEL_FLOOR, PreparedWindow, RiskFamilySpec, rho_p, rho_p_hat

Value = Union[float, ExtReal]


@dataclass(frozen=True)
class TargetRiskProfile:
    knots: Tuple[float, ...]
    at: Tuple[ExtReal, ...]
    gaps: Tuple[ExtReal, ...]
    kind: str = field(default="general", compare=False)

    def __post_init__(self):
        knots = tuple(float(t) for t in self.knots)
        at = tuple(ext(v) for v in self.at)
        gaps = tuple(ext(v) for v in self.gaps)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "at", at)
        object.__setattr__(self, "gaps", gaps)
        if len(knots) < 2 or knots[0] != 0.0 or knots[-1] != 1.0:
            raise ValueError("knots must start at 0 and end at 1")
        if any(b <= a for a, b in zip(knots, knots[1:])):
            raise ValueError("knots must be strictly increasing")
        if len(at) != len(knots) or len(gaps) != len(knots) - 1:
            raise ValueError("need one value per knot and one per gap")
        chain = self._chain()
        if any(v.is_neg_inf for v in chain):
            raise ValueError("profiles never take the value -inf")
        if any(b < a for a, b in zip(chain, chain[1:])):
            raise ValueError("profile must be nondecreasing")
        if all(v.is_pos_inf for v in chain[1:]):
            raise ValueError("profile must be finite at some level in (0, 1]")

    def _chain(self) -> List[ExtReal]:
        out = [self.at[0]]
        for gap, pt in zip(self.gaps, self.at[1:]):
            out += [gap, pt]
        return out

    def __call__(self, p: float) -> ExtReal:
        return self.eval(p)

    def eval(self, p: float) -> ExtReal:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"level must lie in [0, 1], got {p!r}")
        k = bisect.bisect_left(self.knots, p)
        if self.knots[k] == p:
            return self.at[k]
        return self.gaps[k - 1]

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """Interior knots where the profile may jump."""
        return self.knots[1:-1]

    @property
    def is_left_continuous(self) -> bool:
        return all(a == g for a, g in zip(self.at[1:], self.gaps))

    @property
    def in_g0(self) -> bool:
        return self.at[0] == 0.0

    @property
    def p1(self) -> float:
        """Largest level with ``g = 0`` (supremum if not attained)."""
        return self._sup_where(lambda v: v == ZERO)

    @property
    def p2(self) -> float:
        """Largest level with ``g < inf`` (supremum if not attained)."""
        return self._sup_where(lambda v: not v.is_pos_inf)

    def _sup_where(self, pred) -> float:
        best = None
        if pred(self.at[0]):
            best = 0.0
        for k in range(1, len(self.knots)):
            if pred(self.gaps[k - 1]) or pred(self.at[k]):
                best = self.knots[k]
        return best if best is not None else float("nan")

    def image(self) -> List[ExtReal]:
        return sorted(set(self._chain()))

    def pieces(self):
        """Yield ``(right_end, value)`` for every point and gap of the profile."""
        yield 0.0, self.at[0]
        for k in range(1, len(self.knots)):
            yield self.knots[k], self.gaps[k - 1]
            yield self.knots[k], self.at[k]

    def scaled(self, lam: float) -> "TargetRiskProfile":
        return TargetRiskProfile(self.knots, [_scale(v, lam) for v in self.at],
                                 [_scale(v, lam) for v in self.gaps], self.kind)


def _scale(v: ExtReal, lam: float) -> ExtReal:
    return v if v.is_pos_inf else ExtReal(float(v) * lam)


def step_profile(levels: Sequence[float], values: Sequence[Value]) -> TargetRiskProfile:
    """``g = r_1`` on ``[0, p_1]``, ``r_i`` on ``(p_{i-1}, p_i]``, ``+inf`` above ``p_n``."""
    levels = [float(x) for x in levels]
    vals = [ext(v) for v in values]
    if not levels:
        raise ValueError("a step profile needs at least one level")
    if len(levels) != len(vals):
        raise ValueError("need one value per level")
    if any(not 0.0 < x < 1.0 for x in levels):
        raise ValueError("step levels must lie strictly inside (0, 1)")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("step levels must be strictly increasing")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError("step values must be strictly increasing")
    if vals[0] < 0.0 or any(v.is_pos_inf for v in vals):
        raise ValueError("step values must be finite and the first one non-negative")
    return left_continuous_profile([0.0] + levels, [vals[0]] + vals, cap=True, kind="step")


def left_continuous_profile(levels: Sequence[float], values: Sequence[Value], cap: bool = True,
                            kind: str = "tabulated") -> TargetRiskProfile:
    """Piecewise-constant, left-continuous profile from ``(level, value)`` pairs.

    ``g(p)`` is the value of the first tabulated level ``>= p``.  If the grid
    stops before 1, the profile is ``+inf`` above it (``cap``) or keeps its
    last value.  If the grid does not start at 0, ``g(0)`` is 0.
    """
    levels = [float(x) for x in levels]
    vals = [ext(v) for v in values]
    if len(levels) != len(vals) or not levels:
        raise ValueError("need a non-empty list of (level, value) pairs")
    if levels[0] != 0.0:
        levels, vals = [0.0] + levels, [ZERO] + vals
    if levels[-1] != 1.0:
        levels.append(1.0)
        vals.append(POS_INF if cap else vals[-1])
    return TargetRiskProfile(levels, vals, vals[1:], kind)


tabulated_profile = left_continuous_profile


def constant_then_infinite(q: float, below: Value = 0.0, at_q: Optional[Value] = None) -> TargetRiskProfile:
    """``g = below`` on ``[0, q)``, ``at_q`` at ``q`` and ``+inf`` on ``(q, 1]``.

    With ``at_q`` finite and positive this is the profile with exactly one
    level where ``g`` is finite and positive.
    """
    at_q = ext(below if at_q is None else at_q)
    if q >= 1.0:
        return TargetRiskProfile((0.0, 1.0), (ext(below), at_q), (ext(below),), "general")
    return TargetRiskProfile((0.0, q, 1.0), (ext(below), at_q, POS_INF), (ext(below), POS_INF),
                             "general")


def left_inverse(g: TargetRiskProfile, u: Value) -> float:
    """``sup{p in [0, 1] : g(p) <= u}``."""
    u = ext(u)
    if u < g.at[0]:
        raise ValueError(f"u = {u} lies below g(0) = {g.at[0]}")
    best = 0.0
    for k in range(1, len(g.knots)):
        if g.gaps[k - 1] <= u or g.at[k] <= u:
            best = g.knots[k]
    return best


@dataclass(frozen=True)
class FinitenessReport:
    ok: bool
    p1: float
    p2: float
    violations: Tuple[str, ...] = ()


def validate_finiteness_assumption(g: TargetRiskProfile) -> FinitenessReport:
    """Check lower semicontinuity and ``0 < p1 < p2 < 1`` for ``g`` in G0."""
    problems = []
    if not g.in_g0:
        problems.append(f"g(0) = {g.at[0]} != 0")
    # for a nondecreasing step function lower semicontinuity means left continuity
    for k in range(1, len(g.knots)):
        if g.at[k] > g.gaps[k - 1]:
            problems.append(f"not lower semicontinuous at {g.knots[k]!r}")
    p1, p2 = g.p1, g.p2
    if not p1 > 0.0:
        problems.append(f"p1 = {p1!r} is not > 0")
    if not p1 < p2:
        problems.append(f"p1 = {p1!r} is not < p2 = {p2!r}")
    if not p2 < 1.0:
        problems.append(f"p2 = {p2!r} is not < 1")
    return FinitenessReport(not problems, p1, p2, tuple(problems))


def default_benchmark_grid(step: float = 0.02) -> List[float]:
    """Levels ``0, step, 2 step, ..., 1`` restricted to [0.0001, 0.9999]."""
    n = int(round(1.0 / step))
    grid = [round(i * step, 12) for i in range(n + 1) if i * step <= 1.0 + 1e-12]
    grid = [min(max(x, LEVEL_FLOOR), LEVEL_CAP) for x in grid]
    return sorted(set(grid))


def benchmark_profile(family: RiskFamilySpec,
                      benchmark: Union[DiscreteDistribution, SampleWindow, Sequence[float], PreparedWindow],
                      grid: Optional[Sequence[float]] = None, cap: bool = True) -> TargetRiskProfile:
    """Profile ``g(p) = max(rho_p(benchmark), 0)`` on ``grid``, made nondecreasing.

    A running maximum of the clamped values keeps ``g`` monotone, and each
    value is held left-continuously back to the previous grid level; ``g(0) = 0`` and, with ``cap``,
    ``g = +inf`` above the last grid level.
    """
    grid = list(default_benchmark_grid() if grid is None else grid)
    if any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 0.0 or grid[-1] > 1.0:
        raise ValueError("grid must be strictly increasing within [0, 1]")
    if isinstance(benchmark, DiscreteDistribution):
        raw = np.array([rho_p(family, benchmark, p) for p in grid])
    else:
        pw = benchmark if isinstance(benchmark, PreparedWindow) else PreparedWindow(benchmark)
        raw = np.array([rho_p_hat(family, pw, p) for p in grid])
    vals = np.maximum.accumulate(np.maximum(raw, 0.0))
    if grid[0] == 0.0:
        vals[0] = 0.0
        vals = np.maximum.accumulate(vals)
    return left_continuous_profile(grid, vals.tolist(), cap=cap, kind="benchmark")


# text table: one "level<TAB>value" row per knot; a row "level-<TAB>value"
# gives the value on the open gap ending at that level when it differs.


def profile_to_text(g: TargetRiskProfile) -> str:
    lines = [f"{format_ext(g.knots[0])}\t{format_ext(g.at[0])}"]
    for k in range(1, len(g.knots)):
        t = format_ext(g.knots[k])
        if g.gaps[k - 1] != g.at[k]:
            lines.append(f"{t}-\t{format_ext(g.gaps[k - 1])}")
        lines.append(f"{t}\t{format_ext(g.at[k])}")
    return "\n".join(lines) + "\n"


def profile_from_text(text: str) -> TargetRiskProfile:
    knots: List[float] = []
    at: List[ExtReal] = []
    gaps: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'level<TAB>value', got {raw!r}")
        lv, val = parts
        try:
            value = parse_ext(val)
            if lv.endswith("-"):
                gaps[float(lv[:-1])] = value
            else:
                knots.append(float(lv))
                at.append(value)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if not knots:
        raise ValueError("empty profile table")
    gap_vals = [gaps.pop(t, v) for t, v in zip(knots[1:], at[1:])]
    if gaps:
        raise ValueError(f"gap rows without a matching level row: {sorted(gaps)}")
    return TargetRiskProfile(knots, at, gap_vals, "tabulated")


def save_profile(g: TargetRiskProfile, path: Union[str, Path]) -> None:
    Path(path).write_text(profile_to_text(g))


def load_profile(path: Union[str, Path]) -> TargetRiskProfile:
    return profile_from_text(Path(path).read_text())
