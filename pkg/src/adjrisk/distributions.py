"""Finitely supported loss distributions and raw sample windows."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence, Tuple

import numpy as np

MERGE_TOL = 1e-12
PROB_TOL = 1e-12


def _merge(pairs: Iterable[Tuple[float, float]]) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    items = sorted((float(v), float(p)) for v, p in pairs)
    values: list = []
    probs: list = []
    for v, p in items:
        if values and abs(v - values[-1]) <= MERGE_TOL:
            probs[-1] += p
        else:
            values.append(v)
            probs.append(p)
    return tuple(values), tuple(probs)


@dataclass(frozen=True)
class DiscreteDistribution:
    """Law of a loss with finitely many atoms.

    Atoms are sorted ascending, values within ``MERGE_TOL`` are merged and
    probabilities must be strictly positive and sum to one.
    """

    values: Tuple[float, ...]
    probs: Tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.probs) or not self.values:
            raise ValueError("need a non-empty list of (value, prob) atoms")
        if any(not np.isfinite(v) for v in self.values):
            raise ValueError("atom values must be finite")
        if any(p <= 0 for p in self.probs):
            raise ValueError("atom probabilities must be strictly positive")
        if abs(sum(self.probs) - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {sum(self.probs)!r}, not 1")
        if any(b - a <= MERGE_TOL for a, b in zip(self.values, self.values[1:])):
            raise ValueError("atom values must be strictly increasing; use from_atoms")

    @classmethod
    def from_atoms(cls, atoms: Iterable[Tuple[float, float]]) -> "DiscreteDistribution":
        values, probs = _merge(atoms)
        return cls(values, probs)

    @classmethod
    def point_mass(cls, a: float) -> "DiscreteDistribution":
        return cls((float(a),), (1.0,))

    @property
    def atoms(self) -> Tuple[Tuple[float, float], ...]:
        return tuple(zip(self.values, self.probs))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def cdf_steps(self) -> np.ndarray:
        """Cumulative probabilities at each atom, last entry pinned to 1."""
        c = np.cumsum(self.probs)
        c[-1] = 1.0
        return c

    @property
    def min(self) -> float:
        return self.values[0]

    @property
    def max(self) -> float:
        return self.values[-1]

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def expect(self, f) -> float:
        return float(sum(p * f(v) for v, p in self.atoms))


@dataclass(frozen=True)
class SampleWindow:
    """A window of observations (negative log-returns in the backtests)."""

    points: Tuple[float, ...]

    def __post_init__(self):
        if len(self.points) < 1:
            raise ValueError("a sample window needs at least one point")
        if any(np.isnan(x) for x in self.points):
            raise ValueError("sample window contains NaN")

    @classmethod
    def of(cls, points: Iterable[float]) -> "SampleWindow":
        return cls(tuple(float(x) for x in points))

    def __len__(self) -> int:
        return len(self.points)

    def sorted(self) -> np.ndarray:
        return np.sort(np.asarray(self.points, dtype=float))


def quantile(d: DiscreteDistribution, p: float) -> float:
    """Left-continuous generalized inverse; ``p = 0`` gives the smallest atom."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"level must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return d.min
    idx = int(np.searchsorted(d.cdf_steps, p - PROB_TOL, side="left"))
    return d.values[min(idx, len(d) - 1)]


def independent_average(d1: DiscreteDistribution, d2: DiscreteDistribution) -> DiscreteDistribution:
    """Law of ``(V + W) / 2`` for independent ``V ~ d1`` and ``W ~ d2``."""
    return DiscreteDistribution.from_atoms(
        ((v + w) / 2.0, p * q) for (v, p), (w, q) in product(d1.atoms, d2.atoms)
    )


def comonotone_sum(d1: DiscreteDistribution, d2: DiscreteDistribution) -> DiscreteDistribution:
    """Law of ``V + W`` when both are increasing functions of one uniform."""
    cuts = sorted(set(d1.cdf_steps.tolist()) | set(d2.cdf_steps.tolist()))
    atoms = []
    lo = 0.0
    for hi in cuts:
        if hi - lo > PROB_TOL:
            mid = (lo + hi) / 2.0
            atoms.append((quantile(d1, mid) + quantile(d2, mid), hi - lo))
        lo = hi
    return _renormalized(atoms)


def scale_shift(d: DiscreteDistribution, lam: float, m: float = 0.0) -> DiscreteDistribution:
    """Law of ``lam * X + m``."""
    if lam < 0:
        raise ValueError("scale must be non-negative")
    if lam == 0:
        return DiscreteDistribution.point_mass(m)
    return DiscreteDistribution.from_atoms((lam * v + m, p) for v, p in d.atoms)


def max_with_zero(d: DiscreteDistribution) -> DiscreteDistribution:
    """Law of ``max(X, 0)``."""
    return DiscreteDistribution.from_atoms((max(v, 0.0), p) for v, p in d.atoms)


def empirical_law(w: SampleWindow) -> DiscreteDistribution:
    n = len(w)
    values, counts = np.unique(np.asarray(w.points, dtype=float), return_counts=True)
    return _renormalized(zip(values.tolist(), (counts / n).tolist()))


def _renormalized(atoms: Iterable[Tuple[float, float]]) -> DiscreteDistribution:
    values, probs = _merge(atoms)
    total = sum(probs)
    return DiscreteDistribution(values, tuple(p / total for p in probs))


def uniform_on(values: Sequence[float]) -> DiscreteDistribution:
    return empirical_law(SampleWindow.of(values))
