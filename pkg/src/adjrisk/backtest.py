"""Rolling-window backtests of adjusted risk measures on price series."""
from __future__ import annotations

import csv
import datetime as dt
import math
import statistics
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .adjusted import (DEFAULT_STEP, AdjustedResult, adjusted_value_hat, evaluation_grid,
                       grid_supremum)
from .extreal import format_ext, parse_ext
from .families import LEVEL_CAP, LEVEL_FLOOR, PreparedWindow, RiskFamilySpec, rho_p_hat
from .profiles import TargetRiskProfile, benchmark_profile, default_benchmark_grid, step_profile

PathLike = Union[str, Path]
OUTPUT_DIGITS = 10


class PriceDataError(ValueError):
    """A price file could not be parsed; ``problems`` lists every bad row."""

    def __init__(self, path, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__(f"{path}: " + "; ".join(self.problems))


@dataclass(frozen=True)
class PriceSeries:
    dates: Tuple[dt.date, ...]
    prices: Tuple[float, ...]

    def __post_init__(self):
        if len(self.dates) != len(self.prices):
            raise ValueError("dates and prices differ in length")
        if not self.dates:
            raise ValueError("empty price series")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        if any(not (p > 0 and math.isfinite(p)) for p in self.prices):
            raise ValueError("prices must be positive and finite")

    def __len__(self) -> int:
        return len(self.prices)


@dataclass(frozen=True)
class DatedSeries:
    """Values indexed by trading date (negative log-returns in practice)."""

    dates: Tuple[dt.date, ...]
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if len(self.dates) != len(self.values):
            raise ValueError("dates and values differ in length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")

    def __len__(self) -> int:
        return len(self.dates)

    def between(self, start: dt.date, end: dt.date) -> "DatedSeries":
        idx = [i for i, d in enumerate(self.dates) if start <= d <= end]
        return DatedSeries(tuple(self.dates[i] for i in idx), self.values[idx])

    def shifted(self, m: float) -> "DatedSeries":
        return DatedSeries(self.dates, self.values + m)

    def take(self, dates: Sequence[dt.date]) -> "DatedSeries":
        pos = {d: i for i, d in enumerate(self.dates)}
        idx = [pos[d] for d in dates]
        return DatedSeries(tuple(dates), self.values[idx])


def _parse_date(token: str) -> dt.date:
    return dt.date.fromisoformat(token.strip())


def load_prices(path: PathLike) -> PriceSeries:
    """Read a ``date,price`` CSV; ``#`` lines are skipped.

    Every malformed row is reported with its line number.  Out-of-order
    rows are sorted with a warning; duplicate dates are an error.
    """
    path = Path(path)
    rows: List[Tuple[dt.date, float]] = []
    problems: List[str] = []
    header_seen = False
    with path.open(newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = next(csv.reader([text]))
            if not header_seen:
                header_seen = True
                if [f.strip().lower() for f in fields[:2]] == ["date", "price"]:
                    continue
            if len(fields) < 2:
                problems.append(f"line {lineno}: expected 'date,price'")
                continue
            try:
                day = _parse_date(fields[0])
            except ValueError:
                problems.append(f"line {lineno}: bad date {fields[0]!r}")
                continue
            try:
                price = float(fields[1])
            except ValueError:
                problems.append(f"line {lineno}: missing or bad price {fields[1]!r}")
                continue
            if not (price > 0 and math.isfinite(price)):
                problems.append(f"line {lineno}: non-positive price {price!r}")
                continue
            rows.append((day, price))
    if problems:
        raise PriceDataError(path, problems)
    if not rows:
        raise PriceDataError(path, ["no price rows"])
    if any(b[0] < a[0] for a, b in zip(rows, rows[1:])):
        warnings.warn(f"{path}: dates out of order, sorting", stacklevel=2)
        rows.sort(key=lambda r: r[0])
    dups = sorted({a[0] for a, b in zip(rows, rows[1:]) if a[0] == b[0]})
    if dups:
        raise PriceDataError(path, [f"duplicate date {d.isoformat()}" for d in dups])
    return PriceSeries(tuple(r[0] for r in rows), tuple(r[1] for r in rows))


def write_prices(s: PriceSeries, path: PathLike) -> None:
    with Path(path).open("w", newline="") as fh:
        fh.write("date,price\n")
        for d, p in zip(s.dates, s.prices):
            fh.write(f"{d.isoformat()},{p!r}\n")


def neg_log_returns(s: PriceSeries) -> DatedSeries:
    """``-ln(P_t / P_{t-1})`` dated at ``t``."""
    if len(s) < 2:
        raise ValueError("need at least two prices")
    p = np.asarray(s.prices, dtype=float)
    return DatedSeries(s.dates[1:], -np.log(p[1:] / p[:-1]))


def calibrate_frame_profile(returns: DatedSeries, frame: Tuple[dt.date, dt.date],
                            family: RiskFamilySpec, grid: Optional[Sequence[float]] = None,
                            window: int = 60) -> TargetRiskProfile:
    """Benchmark profile of ``family`` estimated on all returns inside ``frame``."""
    start, end = frame
    if returns.dates and (start < returns.dates[0] or end > returns.dates[-1]):
        raise ValueError(f"frame {start}..{end} is outside the data range")
    sub = returns.between(start, end)
    if len(sub) < window:
        raise ValueError(f"frame {start}..{end} holds {len(sub)} returns, fewer than {window}")
    return benchmark_profile(family, sub.values, grid)


# the three volatility frames of the S&P 500 study
VOLATILITY_FRAMES = {
    "low": (dt.date(2003, 12, 26), dt.date(2006, 12, 21)),
    "medium": (dt.date(2000, 1, 3), dt.date(2002, 1, 3)),
    "high": (dt.date(2007, 5, 15), dt.date(2009, 5, 11)),
}


@dataclass(frozen=True)
class MeasureConfig:
    """One output column: a family and its profile.

    ``profile`` is used in fixed mode.  In reevaluated mode the profile is
    recalibrated daily from ``profile_family`` (default: ``family``).
    """

    name: str
    family: RiskFamilySpec
    profile: Optional[TargetRiskProfile] = None
    profile_family: Optional[RiskFamilySpec] = None

    def __post_init__(self):
        if not self.name or "," in self.name:
            raise ValueError(f"bad measure name {self.name!r}")


@dataclass(frozen=True)
class BacktestConfig:
    measures: Tuple[MeasureConfig, ...]
    window: int = 60
    grid_step: float = DEFAULT_STEP
    level_bounds: Tuple[float, float] = (LEVEL_FLOOR, LEVEL_CAP)
    mode: str = "fixed"
    lookback: int = 60
    reldiffs: Tuple[Tuple[str, str], ...] = ()
    rvar_points: int = 20

    def __post_init__(self):
        object.__setattr__(self, "measures", tuple(self.measures))
        object.__setattr__(self, "reldiffs", tuple(tuple(p) for p in self.reldiffs))
        problems = self.problems()
        if problems:
            raise ValueError("; ".join(problems))

    @staticmethod
    def scalar_problems(window: int, grid_step: float, mode: str, lookback: int) -> List[str]:
        out = []
        if window < 2:
            out.append("window must be at least 2")
        if not 0.0 < grid_step < 0.5:
            out.append("grid_step must lie in (0, 0.5)")
        if mode not in ("fixed", "reevaluated"):
            out.append(f"mode must be 'fixed' or 'reevaluated', got {mode!r}")
        if mode == "reevaluated" and lookback < 1:
            out.append("lookback must be a positive integer")
        return out

    def problems(self) -> List[str]:
        out = self.scalar_problems(self.window, self.grid_step, self.mode, self.lookback)
        if not self.measures:
            out.append("at least one measure is required")
        names = [m.name for m in self.measures]
        if len(set(names)) != len(names):
            out.append("measure names must be unique")
        if self.mode == "fixed":
            out += [f"measure {m.name!r} needs a profile in fixed mode"
                    for m in self.measures if m.profile is None]
        for a, b in self.reldiffs:
            for n in (a, b):
                if n not in names:
                    out.append(f"relative difference refers to unknown measure {n!r}")
        return out

    @property
    def first_row(self) -> int:
        """Index of the first return with a full window (and lookback)."""
        span = self.window if self.mode == "fixed" else max(self.window, self.lookback)
        return span - 1


@dataclass
class BacktestOutput:
    names: Tuple[str, ...]
    dates: List[dt.date]
    results: Dict[str, List[AdjustedResult]]
    reldiff_pairs: Tuple[Tuple[str, str], ...]
    reldiffs: Dict[Tuple[str, str], List[Optional[float]]]

    def __len__(self) -> int:
        return len(self.dates)

    def values(self, name: str) -> np.ndarray:
        return np.array([float(r.value) for r in self.results[name]])

    def levels(self, name: str) -> np.ndarray:
        return np.array([r.argmax_level for r in self.results[name]])


def relative_difference(a: float, b: float) -> Optional[float]:
    """``(a - b) / b``; ``None`` when ``b == 0`` or either side is infinite."""
    if b == 0.0 or not (math.isfinite(a) and math.isfinite(b)):
        return None
    return (a - b) / b


def _align(a: DatedSeries, b: DatedSeries) -> Tuple[DatedSeries, DatedSeries]:
    common = sorted(set(a.dates) & set(b.dates))
    if not common:
        raise ValueError("the two series share no dates")
    return a.take(common), b.take(common)


def run_backtest(returns: DatedSeries, cfg: BacktestConfig,
                 benchmark: Optional[DatedSeries] = None) -> BacktestOutput:
    """Evaluate every configured measure on each full trailing window.

    In reevaluated mode the profile for date ``t`` is the benchmark profile
    of the trailing ``lookback`` benchmark returns ending at ``t`` (the
    evaluated series itself when no benchmark is given).
    """
    if benchmark is not None:
        returns, benchmark = _align(returns, benchmark)
    elif cfg.mode == "reevaluated":
        benchmark = returns
    n = len(returns)
    first = cfg.first_row
    if n <= first:
        raise ValueError(f"{n} returns are too few for window {cfg.window}"
                         + (f" and lookback {cfg.lookback}" if cfg.mode == "reevaluated" else ""))
    bench_grid = default_benchmark_grid(cfg.grid_step)
    names = tuple(m.name for m in cfg.measures)
    results: Dict[str, List[AdjustedResult]] = {m: [] for m in names}
    fixed_grids = {}
    if cfg.mode == "fixed":
        for m in cfg.measures:
            fixed_grids[m.name] = evaluation_grid(m.family, m.profile, cfg.grid_step, cfg.level_bounds)
    dates = []
    for t in range(first, n):
        day = returns.dates[t]
        pw = PreparedWindow(returns.values[t - cfg.window + 1:t + 1], cfg.rvar_points)
        bench_pw = None
        if cfg.mode == "reevaluated":
            bench_pw = PreparedWindow(benchmark.values[t - cfg.lookback + 1:t + 1], cfg.rvar_points)
        for m in cfg.measures:
            try:
                if cfg.mode == "fixed":
                    levels, approx = fixed_grids[m.name]
                    rhos = [rho_p_hat(m.family, pw, p) for p in levels]
                    res = grid_supremum(rhos, m.profile, levels, approx)
                else:
                    g = benchmark_profile(m.profile_family or m.family, bench_pw, bench_grid)
                    res = adjusted_value_hat(m.family, g, pw, step=cfg.grid_step,
                                             bounds=cfg.level_bounds)
            except Exception as exc:  # noqa: BLE001 - re-raised with date context
                raise RuntimeError(f"{day.isoformat()}: evaluating {m.name} failed: {exc}") from exc
            results[m.name].append(res)
        dates.append(day)
    rd = {}
    for a, b in cfg.reldiffs:
        rd[(a, b)] = [relative_difference(float(x.value), float(y.value))
                      for x, y in zip(results[a], results[b])]
    return BacktestOutput(names, dates, results, cfg.reldiffs, rd)


def compare_indices(returns_a: DatedSeries, returns_b: DatedSeries, cfg: BacktestConfig) -> BacktestOutput:
    """Measures on series ``a`` against profiles reevaluated on series ``b``."""
    if cfg.mode != "reevaluated":
        raise ValueError("index comparison uses reevaluated profiles")
    return run_backtest(returns_a, cfg, benchmark=returns_b)


def _fmt(x: float) -> str:
    return format_ext(x, OUTPUT_DIGITS)


def output_header(o: BacktestOutput) -> List[str]:
    cols = ["date"]
    for n in o.names:
        cols += [n, f"{n}_level"]
    cols += [f"reldiff_{a}_{b}" for a, b in o.reldiff_pairs]
    return cols


def export_output(o: BacktestOutput, path: PathLike) -> None:
    if not len(o):
        raise ValueError("nothing to export")
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(output_header(o)) + "\n")
        for i, day in enumerate(o.dates):
            row = [day.isoformat()]
            for n in o.names:
                r = o.results[n][i]
                row += [_fmt(float(r.value)), _fmt(r.argmax_level)]
            for pair in o.reldiff_pairs:
                v = o.reldiffs[pair][i]
                row.append("" if v is None else _fmt(v))
            fh.write(",".join(row) + "\n")


def read_output(path: PathLike) -> Dict[str, list]:
    """Columns of an exported file; empty fields come back as ``None``."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols: Dict[str, list] = {h: [] for h in header}
        for row in reader:
            for h, tok in zip(header, row):
                if h == "date":
                    cols[h].append(_parse_date(tok))
                else:
                    cols[h].append(None if tok == "" else float(parse_ext(tok)))
    return cols


@dataclass(frozen=True)
class SummaryStats:
    column: str
    mean: float
    median: float
    count: int
    undefined: int


def summarize(o: BacktestOutput) -> List[SummaryStats]:
    """Mean and lower median of each relative-difference column."""
    out = []
    for a, b in o.reldiff_pairs:
        vals = o.reldiffs[(a, b)]
        ok = [v for v in vals if v is not None]
        mean = statistics.fmean(ok) if ok else math.nan
        med = statistics.median_low(ok) if ok else math.nan
        out.append(SummaryStats(f"reldiff_{a}_{b}", mean, med, len(ok), len(vals) - len(ok)))
    return out


def step_case_config(window: int = 60, jump: float = 0.01, r: float = 0.95) -> BacktestConfig:
    """Adjusted ES against the SCRM with ``g = jump`` on ``(0.95, 0.99]``."""
    g = step_profile([0.95, 0.99], [0.0, jump])
    return BacktestConfig(
        measures=(MeasureConfig("scrm", RiskFamilySpec.scrm(r), g),
                  MeasureConfig("adj_es", RiskFamilySpec.es(), g)),
        window=window, reldiffs=(("scrm", "adj_es"),))
