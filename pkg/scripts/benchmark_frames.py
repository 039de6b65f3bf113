"""Adjusted measures with benchmark profiles calibrated on volatility frames.

The benchmark series supplies the profiles (low / medium / high frame), the
stock series is evaluated from 2010 on.  One CSV per frame is written.

Usage: python scripts/benchmark_frames.py BENCH.csv STOCK.csv OUTDIR [--window 60]
"""
import argparse
import datetime as dt
from pathlib import Path

from adjrisk.backtest import (VOLATILITY_FRAMES, BacktestConfig, MeasureConfig, calibrate_frame_profile,
                              export_output, load_prices, neg_log_returns, run_backtest, summarize)
from adjrisk.families import RiskFamilySpec

CRM_LEVELS = (0.165, 0.33, 0.495, 0.66, 0.825, 0.99)


def families():
    return {
        "adj_es": RiskFamilySpec.es(),
        "scrm": RiskFamilySpec.scrm(0.99),
        "crm": RiskFamilySpec.crm(CRM_LEVELS),
        "aerm": RiskFamilySpec.expectile(),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("bench")
    ap.add_argument("stock")
    ap.add_argument("outdir")
    ap.add_argument("--window", type=int, default=60)
    ap.add_argument("--from-date", default="2010-01-04")
    args = ap.parse_args()

    bench = neg_log_returns(load_prices(args.bench))
    stock = neg_log_returns(load_prices(args.stock))
    start = dt.date.fromisoformat(args.from_date)
    stock = stock.between(start, stock.dates[-1])
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for frame_name, frame in VOLATILITY_FRAMES.items():
        measures = tuple(MeasureConfig(n, f, calibrate_frame_profile(bench, frame, f, window=args.window))
                         for n, f in families().items())
        cfg = BacktestConfig(measures, window=args.window,
                             reldiffs=(("scrm", "adj_es"), ("crm", "adj_es"), ("aerm", "adj_es")))
        out = run_backtest(stock, cfg)
        path = outdir / f"frame_{frame_name}.csv"
        export_output(out, path)
        print(f"[{frame_name}] {len(out)} rows -> {path}")
        for s in summarize(out):
            print(f"    {s.column}: mean {100 * s.mean:.2f}%  median {100 * s.median:.2f}%")


if __name__ == "__main__":
    main()
