"""Daily reevaluated benchmark profiles and the cross-index comparison.

Evaluates the adjusted measures built below against the adjusted ES on SERIES with
profiles recalibrated every day from the trailing LOOKBACK returns of
BENCH (60 and 200 by default).  Writes one CSV per lookback and reports how
often the optimal level sits at the extreme levels.

Usage: python scripts/reevaluated_profiles.py SERIES.csv BENCH.csv OUTDIR [--lookbacks 60 200]
"""
import argparse
from pathlib import Path

import numpy as np

from adjrisk.backtest import BacktestConfig, MeasureConfig, compare_indices, export_output, load_prices, neg_log_returns, summarize
from adjrisk.families import LEVEL_CAP, LEVEL_FLOOR, RiskFamilySpec

CRM_LEVELS = (0.165, 0.33, 0.495, 0.66, 0.825, 0.99)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("series")
    ap.add_argument("bench")
    ap.add_argument("outdir")
    ap.add_argument("--window", type=int, default=60)
    ap.add_argument("--lookbacks", type=int, nargs="+", default=[60, 200])
    args = ap.parse_args()

    a = neg_log_returns(load_prices(args.series))
    b = neg_log_returns(load_prices(args.bench))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    measures = (MeasureConfig("adj_es", RiskFamilySpec.es()),
                MeasureConfig("scrm", RiskFamilySpec.scrm(0.99)),
                MeasureConfig("crm", RiskFamilySpec.crm(CRM_LEVELS)),
                MeasureConfig("aerm", RiskFamilySpec.expectile()))
    for lb in args.lookbacks:
        cfg = BacktestConfig(measures, window=args.window, mode="reevaluated", lookback=lb,
                             reldiffs=(("scrm", "adj_es"), ("crm", "adj_es"), ("aerm", "adj_es")))
        out = compare_indices(a, b, cfg)
        path = outdir / f"reevaluated_{lb}.csv"
        export_output(out, path)
        print(f"[lookback {lb}] {len(out)} rows -> {path}")
        for name in ("adj_es", "scrm"):
            lv = out.levels(name)
            print(f"    {name}: optimal level at {LEVEL_FLOOR}: {100 * np.mean(lv == LEVEL_FLOOR):.1f}%, "
                  f"at {LEVEL_CAP}: {100 * np.mean(lv == LEVEL_CAP):.1f}%, "
                  f"max value {np.max(out.values(name)):.4g}")
        for s in summarize(out):
            print(f"    {s.column}: mean {100 * s.mean:.2f}%  median {100 * s.median:.2f}%  "
                  f"({s.undefined} undefined)")


if __name__ == "__main__":
    main()
