"""Dataset builders feeding the fits."""

import pytest
from mpmath import mpf

from partnum import (
    DataSeries,
    DomainError,
    EstimatorKind,
    build_c1_series,
    build_c2_series,
    build_diff_target_series,
    build_ratio_series,
)
from partnum.series import SHIFT_GRID, build_c2_from_c1_series, build_ratio_line_series

# Frozen from the session's 60-digit evaluation of the defining formula at n=120.
C1_AT_120 = "-0.3480056115394475055652253914620501"


def test_default_grids():
    assert SHIFT_GRID[0] == 120 and SHIFT_GRID[-1] == 8000 and len(SHIFT_GRID) == 395


def test_series_invariants():
    with pytest.raises(ValueError):
        DataSeries((), ())
    with pytest.raises(ValueError):
        DataSeries((mpf(1), mpf(1)), (mpf(0), mpf(0)))
    with pytest.raises(ValueError):
        DataSeries((mpf(2), mpf(1)), (mpf(0), mpf(0)))


def test_c1_series(table10000):
    series = build_c1_series(table10000)
    assert len(series) == 395
    assert abs(series.ys[0] - mpf(C1_AT_120)) < mpf("1e-30")
    # the quantity y + n is a square over pi^2, hence positive
    assert all(y + x > 0 for x, y in zip(series.xs, series.ys))


def test_c1_rejects_n_zero(table10000):
    with pytest.raises(DomainError):
        build_c1_series(table10000, n_values=[0, 20])


def test_c2_series_positive_on_default_range(table10000):
    series = build_c2_series(table10000)
    assert len(series) == 395
    assert all(y > 0 for y in series.ys)


def test_c2_small_n_variant(table10000):
    series = build_c2_series(table10000, n_values=range(3, 101))
    assert len(series) == 98
    assert int(series.xs[0]) == 3 and int(series.xs[-1]) == 100


def test_ratio_series(table10000):
    series = build_ratio_series(table10000)
    assert all(y > 1 for y in series.ys)
    # ratio approaches 1 from above: monotone decrease on the tail
    tail = series.ys[-20:]
    assert all(b < a for a, b in zip(tail, tail[1:]))


def test_ratio_line_series_is_straight(table10000):
    series = build_ratio_line_series(table10000)
    # second differences of a straight line vanish relative to the values
    d1 = [(b - a) for a, b in zip(series.ys, series.ys[1:])]
    rel_dev = max(abs(b - a) for a, b in zip(d1, d1[1:])) / abs(d1[0])
    assert rel_dev < mpf("0.01")


def test_diff_target_variants(table10000):
    c3 = build_diff_target_series(table10000, "c3")
    c5 = build_diff_target_series(table10000, "c5")
    assert len(c3) == 397 and len(c5) == 397
    assert int(c3.xs[0]) == 80 and int(c3.xs[-1]) == 8000
    # the squared variant is the square of the plain one
    assert all(abs(a - b * b) / a < mpf("1e-40") for a, b in zip(c3.ys, c5.ys))
    c4 = build_diff_target_series(table10000, "c4", t0="0.3594143172")
    assert len(c4) == 397 and all(y > 0 for y in c4.ys)
    with pytest.raises(ValueError):
        build_diff_target_series(table10000, "c4")  # t0 required
    with pytest.raises(ValueError):
        build_diff_target_series(table10000, "c9")


def test_c2_from_c1_series(table10000, registry):
    series = build_c2_from_c1_series(table10000, registry[EstimatorKind.RH1])
    assert len(series) == 98  # odd and even n from 3..100
    assert all(y > 0 for x, y in zip(series.xs, series.ys) if int(x) % 2 == 1)
