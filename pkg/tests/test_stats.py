"""Fixed-point rendering and density statistics."""

import math
from decimal import ROUND_HALF_EVEN, Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from a4census.census import CensusRow
from a4census.stats import (
    CSV_HEADER,
    MISSING,
    CountRow,
    binomial_z,
    census_csv,
    density_report,
    deviation_metric,
    format_fraction,
    format_ratio,
    independence_chi2,
    read_census_csv,
    render_report,
    render_table,
)


def test_format_ratio_known_cells():
    assert format_ratio(38, 55) == "0.69091"
    assert format_ratio(15, 55) == "0.27273"
    assert format_ratio(9, 55) == "0.16364"
    assert format_fraction(Fraction(38 * 15, 55 * 55)) == "0.18843"


def test_format_ratio_half_even_ties():
    assert format_ratio(1, 8, places=2) == "0.12"  # 0.125 ties to even
    assert format_ratio(3, 8, places=2) == "0.38"  # 0.375 ties to even
    assert format_ratio(1, 200, places=2) == "0.00"  # 0.005 ties to even
    assert format_ratio(3, 200, places=2) == "0.02"  # 0.015 ties to even


def test_format_ratio_errors():
    with pytest.raises(ValueError):
        format_ratio(1, 0)
    with pytest.raises(ValueError):
        format_ratio(-1, 5)


@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=1, max_value=10**9))
@settings(max_examples=200)
def test_format_ratio_matches_decimal_half_even(num, den):
    getcontext().prec = 80
    want = str((Decimal(num) / Decimal(den)).quantize(Decimal("0.00001"), rounding=ROUND_HALF_EVEN))
    assert format_ratio(num, den) == want


def test_deviation_metric_examples():
    # (2/3)*55 - 38 = -4/3 over sqrt(55)
    assert math.isclose(deviation_metric(55, 38), -4 / (3 * math.sqrt(55)))
    assert deviation_metric(3, 2) == 0.0
    assert deviation_metric(9, 0) == 2.0
    with pytest.raises(ValueError):
        deviation_metric(0, 0)


def test_binomial_z_examples():
    z = binomial_z(38, 55, Fraction(2, 3))
    assert math.isclose(z, (38 - 55 * 2 / 3) / math.sqrt(55 * (2 / 9)), rel_tol=1e-12)
    assert round(z, 3) == 0.381
    assert binomial_z(40, 60, Fraction(2, 3)) == 0.0
    with pytest.raises(ValueError):
        binomial_z(1, 0, Fraction(1, 2))
    with pytest.raises(ValueError):
        binomial_z(1, 5, 1)
    with pytest.raises(ValueError):
        binomial_z(1, 5, 0)


def test_independence_chi2_values():
    # proportional table has statistic exactly 0
    assert independence_chi2(4, 2, 2, 1) == 0.0
    # hand-computed 2x2: expected counts from margins
    n11, n10, n01, n00 = 20, 10, 5, 15
    n = 50
    got = independence_chi2(n11, n10, n01, n00)
    expect = 0.0
    for obs, r, c in [(n11, 30, 25), (n10, 30, 25), (n01, 20, 25), (n00, 20, 25)]:
        e = r * c / n
        expect += (obs - e) ** 2 / e
    assert math.isclose(got, expect, rel_tol=1e-12)


def test_independence_chi2_degenerate_margins():
    with pytest.raises(ValueError):
        independence_chi2(0, 0, 3, 4)  # first condition never holds
    with pytest.raises(ValueError):
        independence_chi2(2, 0, 3, 0)  # second condition always holds


counts = st.integers(min_value=0, max_value=10**6)


@given(st.lists(st.tuples(counts, counts, counts, counts), min_size=1, max_size=6))
@settings(max_examples=60)
def test_census_csv_roundtrip(raws):
    rows = []
    n = 0
    for c3x, clx, ctx, cbx in raws:
        n += 1000
        c3 = c3x
        cl = min(clx, c3)
        ct = min(ctx, c3)
        cb = min(cbx, cl, ct)
        rows.append(CensusRow(n=n, c3=c3, c_lambda=cl, c_taubar=ct, c_both=cb, n_classified=n))
    text = census_csv(rows)
    back = read_census_csv(text)
    assert [(r.n, r.c3, r.c_lambda, r.c_taubar, r.c_both) for r in back] == [
        (r.n, r.c3, r.c_lambda, r.c_taubar, r.c_both) for r in rows
    ]


def test_census_csv_header_and_empty_ratios():
    row = CountRow(n=10, c3=0, c_lambda=0, c_taubar=0, c_both=0)
    text = census_csv([row])
    lines = text.strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == "10,0,0,0,0,,,,"


def test_render_table_missing_marker():
    row = CountRow(n=10, c3=0, c_lambda=0, c_taubar=0, c_both=0)
    out = render_table([row])
    assert MISSING in out


def test_render_table_layout():
    row = CountRow(n=1000, c3=55, c_lambda=38, c_taubar=15, c_both=9)
    out = render_table([row])
    body = out.strip().splitlines()[1]
    assert body.split() == ["1,000", "55", "0.69091", "0.27273", "0.18843", "0.16364"]


def test_read_census_csv_rejects_garbage():
    with pytest.raises(ValueError):
        read_census_csv("nonsense\n1,2\n")
    with pytest.raises(ValueError):
        read_census_csv("n,c3,c_lambda,c_taubar,c_both\n1,2\n")


def test_density_report_values():
    row = CountRow(n=1000, c3=55, c_lambda=38, c_taubar=15, c_both=9)
    rep = density_report(row)
    assert rep.n == 1000 and rep.c3 == 55
    assert math.isclose(rep.z_lambda, binomial_z(38, 55, Fraction(2, 3)))
    assert math.isclose(rep.z_taubar, binomial_z(15, 55, Fraction(1, 3)))
    assert math.isclose(rep.z_both, binomial_z(9, 55, Fraction(2, 9)))
    assert math.isclose(rep.deviation, deviation_metric(55, 38))
    assert math.isclose(rep.chi2, independence_chi2(9, 29, 6, 11))
    text = render_report(rep)
    assert "conventional z-score" in text
    assert "deviation" in text
    with pytest.raises(ValueError):
        density_report(CountRow(n=10, c3=0, c_lambda=0, c_taubar=0, c_both=0))


def test_report_uses_both_conventions_distinctly():
    # the deviation metric and the z-score differ by sqrt(p(1-p)); on the
    # published first row they even have different signs from rounding
    row = CountRow(n=1000, c3=55, c_lambda=38, c_taubar=15, c_both=9)
    rep = density_report(row)
    assert not math.isclose(rep.deviation, rep.z_lambda)
    assert math.isclose(rep.z_lambda * math.sqrt(2 / 9), -rep.deviation, rel_tol=1e-9)
