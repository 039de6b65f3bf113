"""Write seeded synthetic daily closes with calm and turbulent regimes.

Usage: python scripts/make_synthetic_prices.py OUT.csv [--seed N] [--start 2000-01-03] [--end 2024-02-08]
"""
import argparse
import datetime as dt

import numpy as np

from adjrisk.backtest import PriceSeries, write_prices


def business_days(start: dt.date, end: dt.date):
    day = start
    while day <= end:
        if day.weekday() < 5:
            yield day
        day += dt.timedelta(days=1)


def simulate(dates, seed: int, s0: float = 1000.0) -> PriceSeries:
    """GARCH(1,1) log-returns with Student-t shocks."""
    rng = np.random.default_rng(seed)
    omega, alpha, beta, nu = 2e-6, 0.09, 0.89, 5.0
    var = omega / (1.0 - alpha - beta)
    logp = np.log(s0)
    prices = []
    for _ in dates:
        z = rng.standard_t(nu) * np.sqrt((nu - 2.0) / nu)
        r = 0.0003 + np.sqrt(var) * z
        logp += r
        prices.append(float(np.exp(logp)))
        var = omega + alpha * (r - 0.0003) ** 2 + beta * var
    return PriceSeries(tuple(dates), tuple(prices))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--start", default="2000-01-03")
    ap.add_argument("--end", default="2024-02-08")
    args = ap.parse_args()
    dates = list(business_days(dt.date.fromisoformat(args.start), dt.date.fromisoformat(args.end)))
    write_prices(simulate(dates, args.seed), args.out)
    print(f"wrote {len(dates)} closes to {args.out}")


if __name__ == "__main__":
    main()
