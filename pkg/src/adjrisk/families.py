"""Families of risk measures indexed by a probability level."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from . import measures as M
from .distributions import DiscreteDistribution, SampleWindow, empirical_law

# estimator levels are restricted to [LEVEL_FLOOR, LEVEL_CAP]
LEVEL_FLOOR = 0.0001
LEVEL_CAP = 0.9999

KINDS = ("es", "var", "scrm", "crm", "fcrm", "expectile", "cond_es", "solvency")
_N_LEVELS = {"scrm": 1, "solvency": 1}
# families whose level map is increasing and left-continuous
ORDERED_KINDS = frozenset({"es", "var", "scrm", "crm", "fcrm", "expectile", "cond_es"})


@dataclass(frozen=True)
class RiskFamilySpec:
    """Declarative description of a family ``{rho_p}``.

    ``levels`` carries the split level for ``scrm``/``solvency`` and the
    interior levels ``p_1 < ... < p_n`` for ``crm``/``fcrm``.
    """

    kind: str
    levels: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family {self.kind!r}; expected one of {KINDS}")
        levels = tuple(float(x) for x in self.levels)
        object.__setattr__(self, "levels", levels)
        if self.kind in ("crm", "fcrm"):
            if not levels:
                raise ValueError(f"{self.kind} needs at least one interior level")
        elif self.kind in _N_LEVELS:
            if len(levels) != 1:
                raise ValueError(f"{self.kind} needs exactly one split level")
        elif levels:
            raise ValueError(f"{self.kind} takes no level parameters")
        if any(not 0.0 < x < 1.0 for x in levels):
            raise ValueError("family levels must lie strictly inside (0, 1)")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError("family levels must be strictly increasing")

    @classmethod
    def es(cls):
        return cls("es")

    @classmethod
    def var(cls):
        return cls("var")

    @classmethod
    def scrm(cls, r: float):
        return cls("scrm", (r,))

    @classmethod
    def crm(cls, levels: Sequence[float]):
        return cls("crm", tuple(levels))

    @classmethod
    def fcrm(cls, levels: Sequence[float]):
        return cls("fcrm", tuple(levels))

    @classmethod
    def expectile(cls):
        return cls("expectile")

    @classmethod
    def conditional_es(cls):
        return cls("cond_es")

    @classmethod
    def solvency(cls, split: float = 0.975):
        return cls("solvency", (split,))

    @property
    def is_ordered(self) -> bool:
        return self.kind in ORDERED_KINDS

    @property
    def segment_endpoints(self) -> Tuple[float, ...]:
        return self.levels

    def __str__(self) -> str:
        if not self.levels:
            return self.kind
        return self.kind + ":" + ",".join(repr(x) for x in self.levels)


def parse_family(text: str) -> RiskFamilySpec:
    """Parse ``kind`` or ``kind:l1,l2,...`` (e.g. ``scrm:0.95``)."""
    kind, _, rest = text.strip().partition(":")
    levels = tuple(float(t) for t in rest.split(",") if t.strip()) if rest else ()
    return RiskFamilySpec(kind.strip().lower(), levels)


def _segment(levels: Tuple[float, ...], p: float) -> int:
    """Index i with p in (l_{i-1}, l_i] (l_0 = 0 closed), len(levels) above."""
    for i, lv in enumerate(levels):
        if p <= lv:
            return i
    return len(levels)


def rho_p(spec: RiskFamilySpec, d: DiscreteDistribution, p: float) -> float:
    """Value of ``rho_p`` on an exact law."""
    k = spec.kind
    if k == "es":
        return M.es(d, p)
    if k == "var":
        return M.var(d, p)
    if k == "expectile":
        return M.expectile(d, p)
    if k == "cond_es":
        return M.conditional_es(d, p)
    if k == "scrm":
        return M.var(d, p) if p <= spec.levels[0] else M.es(d, p)
    if k == "solvency":
        return M.es(d, p) if p <= spec.levels[0] else M.var(d, p)
    i = _segment(spec.levels, p)
    if i == len(spec.levels):
        return M.es(d, p)
    right = spec.levels[i]
    if k == "crm":
        return M.rvar(d, p, right)
    left = 0.0 if i == 0 else spec.levels[i - 1]
    return M.rvar(d, left, right)


class PreparedWindow:
    """A sorted window with a lazily built empirical law, reused across levels."""

    def __init__(self, w: Union[SampleWindow, Sequence[float], np.ndarray], rvar_points: int = 20):
        pts = w.points if isinstance(w, SampleWindow) else w
        self.xs = np.sort(np.asarray(pts, dtype=float))
        if self.xs.size == 0 or np.isnan(self.xs).any():
            raise ValueError("window must be non-empty and NaN-free")
        self.rvar_points = rvar_points
        self._law: Optional[DiscreteDistribution] = None
        self._law_arrays = None

    @property
    def law(self) -> DiscreteDistribution:
        if self._law is None:
            self._law = empirical_law(SampleWindow.of(self.xs))
        return self._law

    def var(self, p: float) -> float:
        if 0.0 < p < 1.0:
            return M.var_hat_sorted(self.xs, p)
        return M.var(self.law, p)

    def es(self, p: float) -> float:
        if 0.0 < p < 1.0:
            return M.es_hat_sorted(self.xs, p)
        return M.es(self.law, p)

    def rvar(self, a1: float, a2: float) -> float:
        a1 = min(max(a1, LEVEL_FLOOR), LEVEL_CAP)
        a2 = min(max(a2, LEVEL_FLOOR), LEVEL_CAP)
        if a1 >= a2:
            return self.var(a2)
        return M.rvar_hat_sorted(self.xs, a1, a2, self.rvar_points)

    def expectile(self, q: float) -> float:
        if self._law_arrays is None:
            law = self.law
            self._law_arrays = (np.asarray(law.values), np.asarray(law.probs))
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"q must lie in [0, 1], got {q!r}")
        return M._expectile_sorted(*self._law_arrays, q)

    def conditional_es(self, p: float) -> float:
        return M.conditional_es(self.law, p)


def _rho_prepared(spec: RiskFamilySpec, pw: PreparedWindow, p: float) -> float:
    k = spec.kind
    if k == "es":
        return pw.es(p)
    if k == "var":
        return pw.var(p)
    if k == "expectile":
        return pw.expectile(p)
    if k == "cond_es":
        return pw.conditional_es(p)
    if k == "scrm":
        return pw.var(p) if p <= spec.levels[0] else pw.es(p)
    if k == "solvency":
        return pw.es(p) if p <= spec.levels[0] else pw.var(p)
    i = _segment(spec.levels, p)
    if i == len(spec.levels):
        return pw.es(p)
    right = spec.levels[i]
    if p == right:
        return pw.var(p) if k == "crm" else pw.rvar(0.0 if i == 0 else spec.levels[i - 1], right)
    if k == "crm":
        return pw.rvar(p, right)
    return pw.rvar(0.0 if i == 0 else spec.levels[i - 1], right)


def rho_p_hat(spec: RiskFamilySpec, w, p: float) -> float:
    """Window estimator of ``rho_p``.

    Levels 0 and 1 fall back to the exact empirical law; RVaR lower
    endpoints at 0 are raised to ``LEVEL_FLOOR``.
    """
    pw = w if isinstance(w, PreparedWindow) else PreparedWindow(w)
    return _rho_prepared(spec, pw, p)


def rho_hat_curve(spec: RiskFamilySpec, w, levels: Sequence[float]) -> np.ndarray:
    pw = w if isinstance(w, PreparedWindow) else PreparedWindow(w)
    return np.array([_rho_prepared(spec, pw, p) for p in levels])


def rho_curve(spec: RiskFamilySpec, d: DiscreteDistribution, levels: Sequence[float]) -> np.ndarray:
    return np.array([rho_p(spec, d, p) for p in levels])


@dataclass(frozen=True)
class OrderCheck:
    ordered: bool
    violation: Optional[Tuple[float, float, float, float]] = None  # (p, q, rho_p, rho_q)

    def __bool__(self) -> bool:
        return self.ordered


def check_ordered(spec: RiskFamilySpec, d: DiscreteDistribution, grid: Sequence[float],
                  tol: float = 1e-12) -> OrderCheck:
    """Whether ``rho_p(d) <= rho_q(d)`` for all adjacent grid levels ``p < q``."""
    levels = list(grid)
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("grid must be strictly increasing")
    vals = rho_curve(spec, d, levels)
    for i in range(len(levels) - 1):
        a, b = vals[i], vals[i + 1]
        if a > b + tol * max(1.0, abs(a), abs(b)):
            return OrderCheck(False, (levels[i], levels[i + 1], float(a), float(b)))
    return OrderCheck(True)
