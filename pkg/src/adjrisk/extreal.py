"""Extended real numbers with the conventions used for adjusted risk measures.

Two conventions differ from IEEE floats:

* ``inf - inf`` is ``-inf`` (a level with an infinite target never wins a sup),
* ``inf * 0`` is ``0`` (indicator weights switch infinite values off).

Values are stored as a float tag; NaN is never representable.
"""
from __future__ import annotations

import math
from functools import total_ordering
from typing import Iterable, Union

Number = Union[int, float]


@total_ordering
class ExtReal:
    """A finite real, ``+inf`` or ``-inf``."""

    __slots__ = ("_v",)

    def __init__(self, value: Union[Number, "ExtReal"]):
        if isinstance(value, ExtReal):
            v = value._v
        else:
            v = float(value)
        if math.isnan(v):
            raise ValueError("ExtReal cannot hold NaN")
        object.__setattr__(self, "_v", v)

    def __setattr__(self, name, value):
        raise AttributeError("ExtReal is immutable")

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self._v)

    @property
    def is_pos_inf(self) -> bool:
        return self._v == math.inf

    @property
    def is_neg_inf(self) -> bool:
        return self._v == -math.inf

    def __float__(self) -> float:
        return self._v

    def __eq__(self, other) -> bool:
        if isinstance(other, ExtReal):
            return self._v == other._v
        if isinstance(other, (int, float)):
            return self._v == float(other)
        return NotImplemented

    def __lt__(self, other) -> bool:
        if isinstance(other, ExtReal):
            return self._v < other._v
        if isinstance(other, (int, float)):
            return self._v < float(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._v)

    def __neg__(self) -> "ExtReal":
        return ExtReal(-self._v)

    def __add__(self, other) -> "ExtReal":
        b = ExtReal(other)
        if self.is_pos_inf and b.is_neg_inf or self.is_neg_inf and b.is_pos_inf:
            # a + b == a - (-b); follow the subtraction convention
            return NEG_INF
        return ExtReal(self._v + b._v)

    __radd__ = __add__

    def __sub__(self, other) -> "ExtReal":
        return ext_sub(self, ExtReal(other))

    def __rsub__(self, other) -> "ExtReal":
        return ext_sub(ExtReal(other), self)

    def __repr__(self) -> str:
        return f"ExtReal({format_ext(self)})"

    def __str__(self) -> str:
        return format_ext(self)


POS_INF = ExtReal(math.inf)
NEG_INF = ExtReal(-math.inf)
ZERO = ExtReal(0.0)


def ext(x: Union[Number, ExtReal]) -> ExtReal:
    return x if isinstance(x, ExtReal) else ExtReal(x)


def ext_sub(a: Union[Number, ExtReal], b: Union[Number, ExtReal]) -> ExtReal:
    """``a - b`` with ``inf - inf = -inf``.

    ``(-inf) - (-inf)`` has no agreed value and raises; target profiles never
    take ``-inf`` so it cannot arise from a well-formed evaluation.
    """
    a, b = ext(a), ext(b)
    if b.is_pos_inf:
        return NEG_INF
    if a.is_neg_inf and b.is_neg_inf:
        raise ArithmeticError("(-inf) - (-inf) is undefined")
    if a.is_pos_inf:
        return POS_INF
    if a.is_neg_inf:
        return NEG_INF
    if b.is_neg_inf:
        return POS_INF
    return ExtReal(a._v - b._v)


def ext_mul_indicator(c: Union[Number, ExtReal], ind: int) -> ExtReal:
    """``c * ind`` for ``ind`` in {0, 1}, with ``inf * 0 = 0``."""
    if ind not in (0, 1):
        raise ValueError(f"indicator must be 0 or 1, got {ind!r}")
    return ext(c) if ind == 1 else ZERO


def ext_max(values: Iterable[Union[Number, ExtReal]]) -> ExtReal:
    vals = [ext(v) for v in values]
    if not vals:
        raise ValueError("max of an empty collection")
    return max(vals)


def format_ext(x: Union[Number, ExtReal], digits: int = 17) -> str:
    v = float(ext(x))
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    if digits >= 17:
        return repr(v)
    return f"{v:.{digits}g}"


def parse_ext(token: str) -> ExtReal:
    t = token.strip().lower()
    if t in ("inf", "+inf", "infinity", "+infinity"):
        return POS_INF
    if t in ("-inf", "-infinity"):
        return NEG_INF
    return ExtReal(float(t))
