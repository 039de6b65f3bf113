"""Base risk measures on exact laws and their sample-window estimators.

Exact evaluations integrate the quantile step function piece by piece, so
ES, RVaR and the conditional ES carry no discretization error.  The window
estimators use order statistics of a window of ``n`` points; ``n = 60``
gives the classical rolling-window estimators.
"""
from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np

from .distributions import DiscreteDistribution, SampleWindow, empirical_law, quantile

EXPECTILE_TOL = 1e-10
# n * p values within this distance of an integer are treated as that integer
INDEX_SNAP = 1e-9


def _check_level(p: float, name: str = "p") -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")


def quantile_integral(d: DiscreteDistribution, a: float, b: float) -> float:
    """Integral of ``VaR_u(X)`` over ``u`` in ``[a, b]``."""
    if b <= a:
        return 0.0
    upper = d.cdf_steps
    lower = np.concatenate(([0.0], upper[:-1]))
    widths = np.clip(np.minimum(upper, b) - np.maximum(lower, a), 0.0, None)
    return float(np.dot(widths, d.values))


def var(d: DiscreteDistribution, p: float) -> float:
    _check_level(p)
    return quantile(d, p)


def es(d: DiscreteDistribution, p: float) -> float:
    _check_level(p)
    if p == 1.0:
        return d.max
    # anchored at the maximum so that tails sitting on one atom come out exact
    top = d.max
    upper = d.cdf_steps
    lower = np.concatenate(([0.0], upper[:-1]))
    widths = np.clip(upper - np.maximum(lower, p), 0.0, None)
    return top - float(np.dot(widths, top - np.asarray(d.values))) / (1.0 - p)


def rvar(d: DiscreteDistribution, a1: float, a2: float) -> float:
    _check_level(a1, "a1")
    _check_level(a2, "a2")
    if a1 > a2:
        raise ValueError(f"RVaR needs a1 <= a2, got ({a1}, {a2})")
    if a1 == a2:
        return var(d, a1)
    return quantile_integral(d, a1, a2) / (a2 - a1)


def _expectile_sorted(values: np.ndarray, probs: np.ndarray, q: float) -> float:
    if q == 0.0 or len(values) == 1:
        return float(values[0])
    if q == 1.0:
        return float(values[-1])
    # On [x_k, x_{k+1}] the defining function
    #   f(e) = q E[(X - e)^+] - (1 - q) E[(e - X)^+]
    # is affine, so each bracket has a closed-form root.
    p_low = np.cumsum(probs)[:-1]
    m_low = np.cumsum(probs * values)[:-1]
    p_up = 1.0 - p_low
    m_up = float(np.dot(probs, values)) - m_low
    roots = (q * m_up + (1.0 - q) * m_low) / (q * p_up + (1.0 - q) * p_low)
    lo, hi = values[:-1], values[1:]
    span = np.maximum(hi - lo, 1.0)
    ok = (roots >= lo - 1e-12 * span) & (roots <= hi + 1e-12 * span)
    k = int(np.argmax(ok)) if ok.any() else int(np.argmin(np.abs(roots - np.clip(roots, lo, hi))))
    return float(np.clip(roots[k], lo[k], hi[k]))


def expectile(d: DiscreteDistribution, q: float) -> float:
    """Root of ``q E[(X-e)^+] = (1-q) E[(e-X)^+]``; endpoints give min / max."""
    _check_level(q, "q")
    return _expectile_sorted(np.asarray(d.values), np.asarray(d.probs), q)


def expectile_residual(d: DiscreteDistribution, q: float, e: float) -> float:
    up = sum(p * max(v - e, 0.0) for v, p in d.atoms)
    down = sum(p * max(e - v, 0.0) for v, p in d.atoms)
    return q * up - (1.0 - q) * down


def _g(w: float) -> float:
    # antiderivative of log(w), continuous at 0
    return 0.0 if w <= 0.0 else w * math.log(w) - w


def conditional_es(d: DiscreteDistribution, p: float) -> float:
    """Average of ``ES_q`` over ``q`` in ``[p, 1]``; ``p = 1`` gives the max.

    Swapping the order of integration gives
    ``(1/(1-p)) * int_p^1 VaR_u log((1-p)/(1-u)) du``, which is integrated
    exactly on each constant piece of the quantile function.
    """
    _check_level(p)
    if p == 1.0:
        return d.max
    log1p = math.log1p(-p)
    upper = d.cdf_steps
    lower = np.concatenate(([0.0], upper[:-1]))
    total = 0.0
    for x, lo, hi in zip(d.values, lower, upper):
        a, b = max(lo, p), min(hi, 1.0)
        if b <= a:
            continue
        weight = (b - a) * log1p - (_g(1.0 - a) - _g(1.0 - b))
        total += x * weight
    return total / (1.0 - p)


# window estimators


WindowLike = Union[SampleWindow, Sequence[float], np.ndarray]


def _sorted(w: WindowLike) -> np.ndarray:
    pts = w.points if isinstance(w, SampleWindow) else w
    xs = np.sort(np.asarray(pts, dtype=float))
    if xs.size == 0:
        raise ValueError("empty window")
    return xs


def _open_level(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"window estimators need a level in (0, 1), got {p!r}")


def _floor_np(n: int, p: float) -> int:
    k = math.floor(n * p + INDEX_SNAP)
    return min(k, n - 1)


def var_hat_sorted(xs: np.ndarray, p: float) -> float:
    return float(xs[_floor_np(len(xs), p)])


def es_hat_sorted(xs: np.ndarray, p: float) -> float:
    n = len(xs)
    k = _floor_np(n, p)
    # (sum_{j>k} x_j + x_k (k + 1 - n p)) / (n - n p), written relative to x_k
    base = float(xs[k])
    return base + float((xs[k + 1:] - base).sum()) / (n - n * p)


def rvar_hat_sorted(xs: np.ndarray, a1: float, a2: float, grid_points: int = 20) -> float:
    if grid_points == 1:
        return var_hat_sorted(xs, a1)
    n = len(xs)
    us = a1 + (a2 - a1) * np.arange(grid_points) / (grid_points - 1)
    idx = np.minimum(np.floor(n * us + INDEX_SNAP).astype(int), n - 1)
    vals = xs[idx]
    return float(vals[0] + np.mean(vals - vals[0]))


def var_hat(w: WindowLike, p: float) -> float:
    """Order statistic ``x_(floor(n p) + 1)``."""
    _open_level(p)
    return var_hat_sorted(_sorted(w), p)


def es_hat(w: WindowLike, p: float) -> float:
    """Weighted tail mean of the order statistics above ``floor(n p)``."""
    _open_level(p)
    return es_hat_sorted(_sorted(w), p)


def rvar_hat(w: WindowLike, a1: float, a2: float, grid_points: int = 20) -> float:
    """Mean of ``var_hat`` over ``grid_points`` equidistant levels in ``[a1, a2]``."""
    _open_level(a1)
    _open_level(a2)
    if grid_points < 1:
        raise ValueError("grid_points must be positive")
    if a1 >= a2 and not (grid_points == 1 and a1 == a2):
        raise ValueError(f"RVaR estimator needs a1 < a2, got ({a1}, {a2})")
    return rvar_hat_sorted(_sorted(w), a1, a2, grid_points)


def expectile_hat(w: WindowLike, q: float) -> float:
    _open_level(q)
    pts = w if isinstance(w, SampleWindow) else SampleWindow.of(w)
    return expectile(empirical_law(pts), q)
