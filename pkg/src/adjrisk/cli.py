"""Command-line interface: ``python -m adjrisk <command> ...``.

Exit status 0 means success, 1 a computation failure and 2 a usage or
configuration error.
"""
from __future__ import annotations

import argparse
import datetime as dt
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import yaml

from .adjusted import DEFAULT_STEP, adjusted_value, adjusted_value_hat
from .backtest import (VOLATILITY_FRAMES, BacktestConfig, DatedSeries, MeasureConfig, PriceDataError,
                       calibrate_frame_profile, compare_indices, export_output, load_prices,
                       neg_log_returns, run_backtest, summarize)
from .distributions import DiscreteDistribution
from .extreal import format_ext
from .families import RiskFamilySpec, parse_family, rho_p, rho_p_hat
from .profiles import (TargetRiskProfile, default_benchmark_grid, load_profile, profile_to_text,
                       save_profile, step_profile)
from .verify import format_table, run_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DIGITS = 10


class ConfigError(Exception):
    """Invalid run configuration; ``problems`` holds every issue found."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("\n".join(self.problems))


def _fmt(x: float) -> str:
    return format_ext(x, DIGITS)


# input parsing


def parse_step(text: str) -> TargetRiskProfile:
    """``"0.95:0,0.99:0.01"`` -> step profile with ``+inf`` above the last level."""
    levels, values = [], []
    for item in text.split(","):
        lv, _, val = item.partition(":")
        if not val:
            raise ValueError(f"step entries look like level:value, got {item!r}")
        levels.append(float(lv))
        values.append(float(val))
    return step_profile(levels, values)


def read_data_file(path: Path):
    """A one-column file is a sample window; ``value,prob`` rows form an exact law."""
    rows: List[List[float]] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = [p for p in text.replace(",", " ").split()]
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            if not rows and lineno == 1:
                continue  # header
            raise ValueError(f"{path}:{lineno}: cannot parse {text!r}")
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = {len(r) for r in rows}
    if width == {1}:
        return np.array([r[0] for r in rows])
    if width == {2}:
        return DiscreteDistribution.from_atoms((r[0], r[1]) for r in rows)
    raise ValueError(f"{path}: rows must all have one column or all have two (value,prob)")


@dataclass
class RunConfig:
    """Parsed backtest/compare configuration."""

    data: Path
    benchmark: Optional[Path]
    backtest: BacktestConfig
    out: Optional[Path]


def _as_path(base: Path, value: Any, key: str, problems: List[str]) -> Optional[Path]:
    if value is None:
        return None
    p = Path(str(value))
    if not p.is_absolute():
        p = Path(os.path.normpath(base / p))
    if not p.exists():
        problems.append(f"{key}: file {p} does not exist")
    return p


def _parse_date(value: Any) -> dt.date:
    return value if isinstance(value, dt.date) else dt.date.fromisoformat(str(value))


def _profile_from_config(entry: Dict[str, Any], base: Path, family: RiskFamilySpec,
                         returns_for_frames, problems: List[str], where: str,
                         window: int, grid_step: float) -> Optional[TargetRiskProfile]:
    if not isinstance(entry, dict) or len(entry) == 0:
        problems.append(f"{where}: profile must be a mapping with 'step', 'file' or 'frame'")
        return None
    try:
        if "step" in entry:
            st = entry["step"]
            if isinstance(st, str):
                return parse_step(st)
            return step_profile(st["levels"], st["values"])
        if "file" in entry:
            p = _as_path(base, entry["file"], f"{where}.file", problems)
            return load_profile(p) if p is not None and p.exists() else None
        if "frame" in entry:
            fr = entry["frame"]
            frame = VOLATILITY_FRAMES[fr] if isinstance(fr, str) else tuple(_parse_date(x) for x in fr)
            fam = parse_family(entry["family"]) if "family" in entry else family
            returns = returns_for_frames()
            if returns is None:
                return None
            return calibrate_frame_profile(returns, frame, fam, default_benchmark_grid(grid_step),
                                           window=window)
    except (KeyError, ValueError, TypeError) as exc:
        problems.append(f"{where}: {exc}")
        return None
    problems.append(f"{where}: unknown profile source {sorted(entry)}")
    return None


def load_run_config(path: Path, overrides: Dict[str, Any]) -> RunConfig:
    problems: List[str] = []
    try:
        raw = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError([f"{path}: {exc}"])
    if not isinstance(raw, dict):
        raise ConfigError([f"{path}: top level must be a mapping"])
    base = path.parent
    data = _as_path(base, raw.get("data"), "data", problems)
    if data is None:
        problems.append("data: required")
    bench = _as_path(base, raw.get("benchmark"), "benchmark", problems)
    out = raw.get("out")
    out = Path(overrides["out"]) if overrides.get("out") else (Path(os.path.normpath(base / out)) if out else None)
    try:
        window = int(overrides.get("window") or raw.get("window", 60))
    except (TypeError, ValueError):
        problems.append(f"window: not an integer: {raw.get('window')!r}")
        window = 60
    try:
        grid_step = float(overrides.get("grid_step") or raw.get("grid_step", DEFAULT_STEP))
    except (TypeError, ValueError):
        problems.append(f"grid_step: not a number: {raw.get('grid_step')!r}")
        grid_step = DEFAULT_STEP
    mode = str(raw.get("mode", "fixed"))
    try:
        lookback = int(raw.get("lookback", 60))
    except (TypeError, ValueError):
        problems.append(f"lookback: not an integer: {raw.get('lookback')!r}")
        lookback = 60
    # scalar checks run even when no measure parses, so every problem is reported
    problems += BacktestConfig.scalar_problems(window, grid_step, mode, lookback)

    cache: Dict[str, Any] = {}

    def frame_returns():
        if "r" not in cache:
            src = bench if bench is not None else data
            try:
                cache["r"] = neg_log_returns(load_prices(src)) if src and src.exists() else None
            except (PriceDataError, ValueError) as exc:
                problems.append(f"frame data: {exc}")
                cache["r"] = None
        return cache["r"]

    measures = []
    entries = raw.get("measures") or []
    if not entries:
        problems.append("measures: at least one measure is required")
    for i, m in enumerate(entries):
        where = f"measures[{i}]"
        try:
            name = str(m["name"])
            fam = parse_family(str(m["family"]))
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"{where}: {exc}")
            continue
        prof = None
        if "profile" in m:
            prof = _profile_from_config(m["profile"], base, fam, frame_returns, problems, where, window,
                                        grid_step)
        pf = None
        if "profile_family" in m:
            try:
                pf = parse_family(str(m["profile_family"]))
            except ValueError as exc:
                problems.append(f"{where}.profile_family: {exc}")
        try:
            measures.append(MeasureConfig(name, fam, prof, pf))
        except ValueError as exc:
            problems.append(f"{where}: {exc}")
    reldiffs = [tuple(p) for p in raw.get("reldiff", [])]
    if any(len(p) != 2 for p in reldiffs):
        problems.append("reldiff: entries must be [A, B] pairs")
        reldiffs = [p for p in reldiffs if len(p) == 2]
    cfg = None
    if measures or not problems:
        try:
            cfg = BacktestConfig(measures=tuple(measures), window=window, grid_step=grid_step,
                                 mode=mode, lookback=lookback,
                                 reldiffs=tuple(reldiffs), rvar_points=int(raw.get("rvar_points", 20)))
        except ValueError as exc:
            problems += str(exc).split("; ")
    if problems:
        raise ConfigError(list(dict.fromkeys(problems)))
    return RunConfig(data, bench, cfg, out)


# commands


def cmd_estimate(args) -> int:
    path = Path(args.data)
    if not path.exists():
        raise ConfigError([f"data file {path} does not exist"])
    try:
        data = read_data_file(path)
        fam = parse_family(args.family)
        g = None
        if args.profile:
            g = load_profile(args.profile)
        elif args.step:
            g = parse_step(args.step)
    except (OSError, ValueError) as exc:
        raise ConfigError([str(exc)])
    exact = isinstance(data, DiscreteDistribution)
    if g is None:
        if args.level is None:
            raise ConfigError(["estimate needs --level or a profile (--profile / --step)"])
        p = args.level
        val = rho_p(fam, data, p) if exact else rho_p_hat(fam, data, p)
        print("measure,level,value")
        print(f"{fam},{_fmt(p)},{_fmt(val)}")
        return EXIT_OK
    if exact:
        res = adjusted_value(fam, g, data, step=args.grid_step)
    else:
        res = adjusted_value_hat(fam, g, data, step=args.grid_step)
    print("measure,value,level,attained")
    print(f"{fam},{_fmt(float(res.value))},{_fmt(res.argmax_level)},{str(res.attained).lower()}")
    return EXIT_OK


def _load_returns(path: Path) -> DatedSeries:
    return neg_log_returns(load_prices(path))


def _run(args, compare: bool) -> int:
    if not args.config:
        raise ConfigError([f"{'compare' if compare else 'backtest'} needs --config"])
    cfgpath = Path(args.config)
    if not cfgpath.exists():
        raise ConfigError([f"config file {cfgpath} does not exist"])
    rc = load_run_config(cfgpath, {"out": args.out, "window": args.window, "grid_step": args.grid_step})
    try:
        returns = _load_returns(rc.data)
        bench = _load_returns(rc.benchmark) if rc.benchmark else None
    except (PriceDataError, ValueError) as exc:
        raise ConfigError([str(exc)])
    need = rc.backtest.first_row + 1
    if len(returns) < need:
        raise ConfigError([f"data holds {len(returns)} returns, fewer than the {need} needed for one window"])
    if compare:
        if bench is None:
            raise ConfigError(["compare needs a 'benchmark' series in the config"])
        out = compare_indices(returns, bench, rc.backtest)
    else:
        out = run_backtest(returns, rc.backtest, benchmark=bench)
    if rc.out is not None:
        export_output(out, rc.out)
        print(f"wrote {len(out)} rows to {rc.out}")
    print("column,mean,median,count,undefined")
    for s in summarize(out):
        print(f"{s.column},{_fmt(s.mean)},{_fmt(s.median)},{s.count},{s.undefined}")
    return EXIT_OK


def cmd_backtest(args) -> int:
    return _run(args, compare=False)


def cmd_compare(args) -> int:
    return _run(args, compare=True)


def cmd_profile(args) -> int:
    try:
        if args.step:
            g = parse_step(args.step)
        else:
            if not args.prices:
                raise ConfigError(["profile needs --step or --prices"])
            returns = _load_returns(Path(args.prices))
            fam = parse_family(args.family)
            if args.frame in VOLATILITY_FRAMES:
                frame = VOLATILITY_FRAMES[args.frame]
            elif args.frame:
                a, _, b = args.frame.partition(":")
                frame = (dt.date.fromisoformat(a), dt.date.fromisoformat(b))
            else:
                frame = (returns.dates[0], returns.dates[-1])
            step = args.grid_step
            g = calibrate_frame_profile(returns, frame, fam, default_benchmark_grid(step), window=args.window)
    except (OSError, PriceDataError, ValueError) as exc:
        raise ConfigError([str(exc)])
    if args.out:
        save_profile(g, args.out)
    else:
        sys.stdout.write(profile_to_text(g))
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = run_all(seed=args.seed)
    print(format_table(reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--grid-step", type=float, default=DEFAULT_STEP, dest="grid_step",
                        help="level grid step (default 0.02)")
    common.add_argument("--window", type=int, default=None, help="rolling window length")
    common.add_argument("--out", help="output path")

    ap = argparse.ArgumentParser(prog="adjrisk", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common], help="evaluate a measure on a window or law")
    p.add_argument("data", help="one value per line (window) or value,prob rows (exact law)")
    p.add_argument("--family", default="es", help="e.g. es, var, expectile, scrm:0.95, crm:0.5,0.9")
    p.add_argument("--level", type=float, help="evaluate rho_p at this level")
    p.add_argument("--profile", help="profile table file")
    p.add_argument("--step", help="step profile, e.g. 0.95:0,0.99:0.01")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("backtest", parents=[common], help="rolling-window backtest from a config")
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("compare", parents=[common], help="cross-index comparison from a config")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("profile", parents=[common], help="build a step or benchmark profile")
    p.add_argument("--prices", help="date,price CSV of the benchmark")
    p.add_argument("--family", default="es")
    p.add_argument("--frame", help="low, medium, high or START:END (ISO dates)")
    p.add_argument("--step", help="step profile, e.g. 0.95:0,0.99:0.01")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("verify", parents=[common], help="run counterexample and dual checks")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.window is None:
        args.window = 60 if args.command == "profile" else None
    try:
        return args.func(args)
    except ConfigError as exc:
        for line in exc.problems:
            print(f"error: {line}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - reported as a computation failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
