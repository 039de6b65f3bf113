import datetime as dt
import math
import warnings

import numpy as np
import pytest

from adjrisk.adjusted import adjusted_value_hat
from adjrisk.backtest import (BacktestConfig, DatedSeries, MeasureConfig, PriceDataError, PriceSeries,
                              calibrate_frame_profile, compare_indices, export_output, load_prices,
                              neg_log_returns, read_output, relative_difference, run_backtest,
                              step_case_config, summarize, write_prices)
from adjrisk.families import RiskFamilySpec
from adjrisk.profiles import default_benchmark_grid, step_profile


def business_days(n, start=dt.date(2020, 1, 1)):
    out, d = [], start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return tuple(out)


def random_returns(n, seed=0, scale=0.01):
    rng = np.random.default_rng(seed)
    return DatedSeries(business_days(n), rng.standard_t(4, size=n) * scale)


def write_csv(path, text):
    path.write_text(text)
    return path


# price files


def test_load_two_rows(tmp_path):
    p = write_csv(tmp_path / "p.csv", "date,price\n2020-01-02,100\n2020-01-03,101\n")
    s = load_prices(p)
    assert s.dates == (dt.date(2020, 1, 2), dt.date(2020, 1, 3)) and s.prices == (100.0, 101.0)
    r = neg_log_returns(s)
    assert len(r) == 1 and r.values[0] == pytest.approx(-math.log(1.01))


def test_load_skips_comments_and_header_optional(tmp_path):
    p = write_csv(tmp_path / "p.csv", "# index closes\n2020-01-02,100\n\n2020-01-03,99\n")
    assert len(load_prices(p)) == 2


def test_out_of_order_rows_are_sorted_with_warning(tmp_path):
    p = write_csv(tmp_path / "p.csv", "date,price\n2020-01-03,101\n2020-01-02,100\n")
    with pytest.warns(UserWarning, match="out of order"):
        s = load_prices(p)
    assert s.dates[0] == dt.date(2020, 1, 2)


def test_every_bad_row_is_reported(tmp_path):
    p = write_csv(tmp_path / "p.csv", "date,price\n2020-01-02,0\n2020-13-01,5\n2020-01-06,abc\n")
    with pytest.raises(PriceDataError) as err:
        load_prices(p)
    assert [s.split(":")[0] for s in err.value.problems] == ["line 2", "line 3", "line 4"]
    assert "non-positive" in err.value.problems[0]


def test_duplicate_dates_and_empty_file(tmp_path):
    with pytest.raises(PriceDataError, match="duplicate"):
        load_prices(write_csv(tmp_path / "d.csv", "2020-01-02,1\n2020-01-02,2\n"))
    with pytest.raises(PriceDataError, match="no price rows"):
        load_prices(write_csv(tmp_path / "e.csv", "date,price\n"))


def test_price_round_trip(tmp_path):
    s = PriceSeries(business_days(3), (1.5, 2.25, 1e-3))
    write_prices(s, tmp_path / "p.csv")
    assert load_prices(tmp_path / "p.csv") == s


def test_neg_log_returns_examples():
    s = PriceSeries(business_days(4), (100.0, 200.0, 100.0, 100.0))
    r = neg_log_returns(s)
    assert r.values == pytest.approx([-math.log(2), math.log(2), 0.0])
    assert r.dates == s.dates[1:]
    with pytest.raises(ValueError):
        neg_log_returns(PriceSeries(s.dates[:1], (1.0,)))


# frame calibration


def test_flat_frame_gives_zero_profile():
    r = DatedSeries(business_days(80), np.zeros(80))
    g = calibrate_frame_profile(r, (r.dates[0], r.dates[-1]), RiskFamilySpec.es(), default_benchmark_grid())
    assert all(float(v) == 0.0 for v in g.at[1:-1] if math.isfinite(float(v)))


def test_high_volatility_frame_dominates_low():
    rng = np.random.default_rng(5)
    vals = np.concatenate([rng.normal(0, 0.005, 300), rng.normal(0, 0.03, 300)])
    r = DatedSeries(business_days(600), vals)
    grid = default_benchmark_grid()
    low = calibrate_frame_profile(r, (r.dates[0], r.dates[299]), RiskFamilySpec.es(), grid)
    high = calibrate_frame_profile(r, (r.dates[300], r.dates[-1]), RiskFamilySpec.es(), grid)
    for p in (0.5, 0.9, 0.99):
        assert float(high.eval(p)) >= float(low.eval(p))


def test_frame_window_boundary():
    r = random_returns(100)
    ok = calibrate_frame_profile(r, (r.dates[0], r.dates[59]), RiskFamilySpec.es(), window=60)
    assert ok is not None
    with pytest.raises(ValueError, match="fewer than 60"):
        calibrate_frame_profile(r, (r.dates[0], r.dates[58]), RiskFamilySpec.es(), window=60)
    with pytest.raises(ValueError, match="outside"):
        calibrate_frame_profile(r, (r.dates[0] - dt.timedelta(days=1), r.dates[-1]), RiskFamilySpec.es())


# runs


@pytest.mark.parametrize("n,window", [(60, 60), (61, 60), (250, 60), (30, 5)])
def test_fixed_row_count(n, window):
    out = run_backtest(random_returns(n), step_case_config(window=window))
    assert len(out) == n - window + 1
    assert out.dates[0] == random_returns(n).dates[window - 1]


def test_too_short_series_is_an_error():
    with pytest.raises(ValueError, match="too few"):
        run_backtest(random_returns(59), step_case_config())


def test_reevaluated_row_count():
    cfg = BacktestConfig((MeasureConfig("es", RiskFamilySpec.es()),), window=40, mode="reevaluated", lookback=70)
    assert len(run_backtest(random_returns(120), cfg)) == 120 - 70 + 1


def test_scrm_never_exceeds_adjusted_es():
    out = run_backtest(random_returns(400, seed=3), step_case_config())
    rd = [v for v in out.reldiffs[("scrm", "adj_es")] if v is not None]
    assert rd and max(rd) <= 0.0
    assert np.all(out.values("scrm") <= out.values("adj_es"))


def test_constant_series_gives_constant_output():
    r = DatedSeries(business_days(80), np.full(80, 0.002))
    out = run_backtest(r, step_case_config())
    assert np.allclose(out.values("adj_es"), 0.002, atol=1e-15)
    assert set(out.levels("adj_es")) == {0.0001}


def test_self_benchmark_is_bounded_by_zero():
    # each window measured against its own benchmark profile never needs positive capital
    cfg = BacktestConfig((MeasureConfig("es", RiskFamilySpec.es()),
                          MeasureConfig("var", RiskFamilySpec.var())),
                         window=60, mode="reevaluated", lookback=60)
    out = run_backtest(random_returns(150, seed=9), cfg)
    assert np.all(out.values("es") <= 1e-12) and np.all(out.values("var") <= 1e-12)


def test_reevaluated_matches_direct_computation():
    r = random_returns(90, seed=4)
    cfg = BacktestConfig((MeasureConfig("es", RiskFamilySpec.es(), profile_family=RiskFamilySpec.var()),),
                         window=50, mode="reevaluated", lookback=60)
    out = run_backtest(r, cfg)
    from adjrisk.profiles import benchmark_profile
    t = 75
    g = benchmark_profile(RiskFamilySpec.var(), r.values[t - 59:t + 1], default_benchmark_grid())
    direct = adjusted_value_hat(RiskFamilySpec.es(), g, r.values[t - 49:t + 1])
    i = out.dates.index(r.dates[t])
    assert float(out.results["es"][i].value) == float(direct.value)


def test_compare_identical_and_shifted_series():
    r = random_returns(120, seed=2)
    cfg = BacktestConfig((MeasureConfig("es", RiskFamilySpec.es()),), mode="reevaluated")
    same = compare_indices(r, r, cfg)
    assert np.all(same.values("es") <= 1e-12)
    shifted = compare_indices(r.shifted(0.01), r, cfg)
    assert shifted.values("es") == pytest.approx(same.values("es") + 0.01, abs=1e-12)


def test_compare_needs_overlap_and_reevaluated_mode():
    r = random_returns(100)
    later = DatedSeries(tuple(d + dt.timedelta(days=1000) for d in r.dates), r.values)
    cfg = BacktestConfig((MeasureConfig("es", RiskFamilySpec.es()),), mode="reevaluated")
    with pytest.raises(ValueError, match="share no dates"):
        compare_indices(r, later, cfg)
    with pytest.raises(ValueError, match="reevaluated"):
        compare_indices(r, r, step_case_config())


def test_cash_additivity_end_to_end():
    r = random_returns(150, seed=8)
    a = run_backtest(r, step_case_config())
    b = run_backtest(r.shifted(0.003), step_case_config())
    for name in ("scrm", "adj_es"):
        assert b.values(name) == pytest.approx(a.values(name) + 0.003, abs=1e-10)


def test_config_problems_are_collected():
    with pytest.raises(ValueError) as err:
        BacktestConfig((MeasureConfig("a", RiskFamilySpec.es()), MeasureConfig("a", RiskFamilySpec.es())),
                       window=1, mode="weekly", reldiffs=(("a", "zz"),))
    msg = str(err.value)
    for part in ("window", "mode", "unique", "'zz'"):
        assert part in msg


# export


def test_relative_difference_undefined_cases():
    assert relative_difference(1.0, 0.0) is None
    assert relative_difference(math.inf, 1.0) is None
    assert relative_difference(0.9, 1.0) == pytest.approx(-0.1)


def test_export_round_trip(tmp_path):
    out = run_backtest(random_returns(100, seed=6), step_case_config())
    export_output(out, tmp_path / "o.csv")
    cols = read_output(tmp_path / "o.csv")
    assert list(cols) == ["date", "scrm", "scrm_level", "adj_es", "adj_es_level", "reldiff_scrm_adj_es"]
    assert cols["date"] == out.dates
    assert np.allclose(cols["adj_es"], out.values("adj_es"), rtol=1e-9)


def test_export_leaves_undefined_reldiff_empty(tmp_path):
    r = DatedSeries(business_days(60), np.zeros(60))
    out = run_backtest(r, step_case_config())
    assert len(out) == 1
    export_output(out, tmp_path / "o.csv")
    lines = (tmp_path / "o.csv").read_text().splitlines()
    assert len(lines) == 2 and lines[1].endswith(",")
    assert read_output(tmp_path / "o.csv")["reldiff_scrm_adj_es"] == [None]
    assert summarize(out)[0].undefined == 1


def test_export_is_byte_identical(tmp_path):
    r = random_returns(200, seed=12)
    for name in ("a.csv", "b.csv"):
        export_output(run_backtest(r, step_case_config()), tmp_path / name)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_summary_uses_mean_and_lower_median():
    out = run_backtest(random_returns(120, seed=1), step_case_config())
    s = summarize(out)[0]
    vals = sorted(v for v in out.reldiffs[("scrm", "adj_es")] if v is not None)
    assert s.mean == pytest.approx(sum(vals) / len(vals))
    assert s.median == vals[(len(vals) - 1) // 2]
