"""Fitting machinery: least squares, refinement steps, scans, traces."""

import json

import pytest
from mpmath import mp, mpf

from partnum import (
    DataSeries,
    FitDivergedError,
    FitModel,
    GridConfig,
    SingularFitError,
    avg_error,
    build_c1_series,
    grid_refine,
    iterate_c1_fit,
    linear_lsq,
    model_function,
    refine_exponent_scale,
    refine_shift,
    working_dps,
)
from partnum.errors import ConfigError
from partnum.fitting import (
    fit_result_to_dict,
    refine_scale_only,
    save_fit_json,
)


def const_one(x):
    return mpf(1)


def make_series(xs, f):
    with working_dps(50):
        xs = tuple(mpf(x) for x in xs)
        return DataSeries(xs, tuple(f(x) for x in xs))


def shifted_power(a, b, c, e):
    a, b, c, e = (mpf(v) for v in (a, b, c, e))
    return lambda x: a * (x + c) ** (-e) + b


def shifted_sqrt(a, b, c):
    a, b, c = (mpf(v) for v in (a, b, c))
    return lambda x: a * mp.sqrt(x + c) + b


def digits_agree(x, y, digits):
    return abs(mpf(x) - mpf(y)) <= abs(mpf(y)) * mpf(5) * mpf(10) ** (-digits)


def test_avg_error_exact_fit_is_zero():
    series = make_series(range(1, 11), lambda x: 2 * x + 3)
    assert avg_error(series, lambda x: 2 * x + 3) == 0


def test_avg_error_hand_value():
    series = DataSeries((mpf(0), mpf(1)), (mpf(0), mpf(1)))
    assert abs(avg_error(series, lambda x: mpf(0)) - mp.sqrt(mpf(1) / 2)) < mpf("1e-45")


def test_linear_lsq_exact_line():
    series = make_series(range(0, 10), lambda x: 2 * x + 3)
    fit = linear_lsq([const_one, lambda x: x], series, names=("b", "m"))
    assert digits_agree(fit.coefficients["b"], 3, 30)
    assert digits_agree(fit.coefficients["m"], 2, 30)
    assert fit.avg_error < mpf("1e-40")


def test_linear_lsq_mean():
    series = DataSeries((mpf(1), mpf(2)), (mpf(1), mpf(3)))
    fit = linear_lsq([const_one], series)
    assert fit.coefficients["c0"] == 2


def test_linear_lsq_rank_deficient():
    series = make_series(range(0, 6), lambda x: x)
    with pytest.raises(SingularFitError):
        linear_lsq([lambda x: x, lambda x: 2 * x], series)
    with pytest.raises(SingularFitError):
        linear_lsq([const_one, lambda x: x, lambda x: x * x], DataSeries((mpf(1),), (mpf(1),)))


def test_linear_lsq_residual_orthogonality():
    series = make_series(range(1, 40), lambda x: mp.sqrt(x) + 1 / (x + 2))
    basis = [const_one, lambda x: x, lambda x: x * x]
    fit = linear_lsq(basis, series)
    with working_dps(50):
        cols = [[bf(x) for x in series.xs] for bf in basis]
        coeffs = [fit.coefficients[f"c{i}"] for i in range(3)]
        resid = [
            y - sum(c * col[i] for c, col in zip(coeffs, cols))
            for i, y in enumerate(series.ys)
        ]
        rnorm = mp.sqrt(mp.fsum(r * r for r in resid))
        for col in cols:
            cnorm = mp.sqrt(mp.fsum(v * v for v in col))
            assert abs(mp.fsum(r * v for r, v in zip(resid, col))) / (rnorm * cnorm) < mpf("1e-20")


def test_cubic_through_four_points_interpolates():
    series = make_series([1, 2, 3, 4], lambda x: x**3 - 7 * x + 2)
    fit = linear_lsq(
        [lambda x: x**3, lambda x: x**2, lambda x: x, const_one],
        series,
        names=("a", "b", "c", "d"),
        model=FitModel.CUBIC,
    )
    assert fit.avg_error < mpf("1e-40")
    assert digits_agree(fit.coefficients["a"], 1, 30)


def test_refine_exponent_scale_round_trip():
    true = {"a": "-0.02", "b": "-0.3456", "c": "3", "e": "0.5"}
    series = make_series(range(120, 2001, 20), shifted_power(**{k: v for k, v in zip("abce", ("-0.02", "-0.3456", "3", "0.5"))}))
    e2, a = refine_exponent_scale(series, b="-0.3456", c2="3")
    assert digits_agree(e2, mpf("0.5"), 10)
    assert digits_agree(a, mpf("-0.02"), 10)


def test_refine_scale_only_round_trip():
    series = make_series(range(120, 2001, 20), shifted_power("-0.02", "-0.3456", "3", "0.5"))
    a = refine_scale_only(series, b="-0.3456", c2="3", e2="0.5")
    assert digits_agree(a, mpf("-0.02"), 10)


def test_refine_shift_round_trip():
    series = make_series(range(120, 2001, 20), shifted_power("-0.02", "-0.3456", "7", "0.5"))
    c2 = refine_shift(series, a="-0.02", b="-0.3456", e2="0.5")
    assert digits_agree(c2, 7, 10)


def test_refine_shift_constant_offset():
    # data built as y = x + 7 inverted through the model with a=b=1... keep it
    # to the contract: mean of ((a/(y-b))^(1/e2) - x) over exact model data
    series = make_series(range(10, 40), shifted_power("-1", "0", "7", "1"))
    c2 = refine_shift(series, a="-1", b="0", e2="1")
    assert digits_agree(c2, 7, 12)


def test_refine_domain_errors():
    series = make_series(range(120, 300, 20), shifted_power("-0.02", "-0.3456", "3", "0.5"))
    from partnum import DomainError

    with pytest.raises(DomainError):
        refine_exponent_scale(series, b="-10", c2="3")  # b below every y
    with pytest.raises(DomainError):
        refine_shift(series, a="0.02", b="-0.3456", e2="0.5")  # ratio negative


def test_iterate_recovers_synthetic_model():
    series = make_series(range(120, 3001, 20), shifted_power("-0.026", "-0.3456", "4.5", "0.5"))
    fit = iterate_c1_fit(series, init_c2="3.0", init_e2="0.55", max_iter=120)
    assert not fit.diverged
    assert digits_agree(fit.coefficients["a"], mpf("-0.026"), 10)
    assert digits_agree(fit.coefficients["b"], mpf("-0.3456"), 10)
    assert digits_agree(fit.coefficients["c"], mpf("4.5"), 10)
    assert digits_agree(fit.coefficients["e"], mpf("0.5"), 10)


def test_iterate_trace_minimum_and_shape():
    series = make_series(range(120, 2001, 20), shifted_power("-0.026", "-0.3456", "4.5", "0.5"))
    fit = iterate_c1_fit(series, init_c2="2.0", init_e2="0.5", max_iter=40)
    assert fit.trace
    assert all(fit.avg_error <= err for _, _, err in fit.trace)
    assert [idx for idx, _, _ in fit.trace] == list(range(1, len(fit.trace) + 1))


def test_iterate_first_step_failure_raises():
    series = make_series(range(120, 400, 20), shifted_power("-0.026", "-0.3456", "4.5", "0.5"))
    with pytest.raises(FitDivergedError):
        iterate_c1_fit(series, init_c2="-130", init_e2="0.5")


def test_iterate_divergence_flag_on_full_range(table10000):
    series = build_c1_series(table10000)
    fit = iterate_c1_fit(series, init_c2="2.5", init_e2="0.5", fix_e2=True, double_a=True)
    assert fit.diverged
    assert len(fit.trace) < 200


def test_grid_recovers_synthetic_sqrt_model():
    series = make_series(range(3, 100, 2), shifted_sqrt("0.45", "-0.055", "4.4"))
    config = GridConfig("0.5", "15", "0.1", 11)
    fit = grid_refine(series, FitModel.SHIFTED_SQRT, config)
    assert digits_agree(fit.coefficients["a"], mpf("0.45"), 10)
    assert digits_agree(fit.coefficients["b"], mpf("-0.055"), 10)
    assert digits_agree(fit.coefficients["c"], mpf("4.4"), 10)


def test_grid_recovers_synthetic_power_model():
    series = make_series(range(120, 2001, 20), shifted_power("-0.026", "-0.3456", "4.6", "0.5"))
    config = GridConfig("0.5", "15", "0.1", 11)
    fit = grid_refine(series, FitModel.SHIFTED_POWER, config)
    assert digits_agree(fit.coefficients["c"], mpf("4.6"), 10)
    assert digits_agree(fit.coefficients["a"], mpf("-0.026"), 10)


def test_grid_walks_below_initial_window():
    # optimum below c_low: the recentering must walk the window down
    series = make_series(range(120, 2001, 20), shifted_sqrt("0.44", "0.13", "0.27"))
    fit = grid_refine(series, FitModel.SHIFTED_SQRT, GridConfig("0.5", "15", "0.1", 9))
    assert digits_agree(fit.coefficients["c"], mpf("0.27"), 7)


def test_grid_determinism_byte_identical():
    series = make_series(range(10, 200, 10), shifted_sqrt("1.5", "-2", "3.3"))
    config = GridConfig("0.5", "15", "0.1", 6)
    one = grid_refine(series, FitModel.SHIFTED_SQRT, config)
    two = grid_refine(series, FitModel.SHIFTED_SQRT, config)
    assert json.dumps(fit_result_to_dict(one)) == json.dumps(fit_result_to_dict(two))


def test_grid_trace_and_minimum():
    series = make_series(range(10, 200, 10), shifted_sqrt("1.5", "-2", "3.3"))
    fit = grid_refine(series, FitModel.SHIFTED_SQRT, GridConfig("0.5", "15", "0.1", 4))
    assert fit.trace
    assert all(fit.avg_error <= err for _, _, err in fit.trace)


def test_grid_tie_break_smallest_shift():
    # flat data: every shift fits equally well (a=0), the first grid point wins
    series = DataSeries(tuple(mpf(x) for x in range(1, 8)), tuple(mpf(5) for _ in range(7)))
    fit = grid_refine(series, FitModel.SHIFTED_SQRT, GridConfig("0.5", "2.5", "0.5", 2))
    assert fit.coefficients["c"] == mpf("0.5")


def test_grid_all_points_invalid_raises():
    series = make_series(range(1, 10), lambda x: mp.sqrt(x))
    with pytest.raises(FitDivergedError):
        grid_refine(series, FitModel.SHIFTED_SQRT, GridConfig("-100", "-50", "10", 2))


def test_grid_config_validation():
    with pytest.raises(ConfigError):
        GridConfig("5", "1", "0.1", 8)
    with pytest.raises(ConfigError):
        GridConfig("1", "5", "0", 8)
    with pytest.raises(ConfigError):
        GridConfig("1", "5", "0.1", 0)


def test_model_function_domains():
    from partnum import DomainError

    f = model_function(FitModel.SHIFTED_POWER, {"a": mpf(1), "b": mpf(0), "c": mpf(-5), "e": mpf("0.5")})
    with pytest.raises(DomainError):
        f(mpf(2))
    line = model_function(FitModel.LINE, {"slope": mpf(2), "intercept": mpf(1)})
    assert line(mpf(3)) == 7


def test_fit_result_serialization(tmp_path):
    series = make_series(range(1, 30), shifted_sqrt("1.5", "-2", "3.3"))
    fit = grid_refine(series, FitModel.SHIFTED_SQRT, GridConfig("1", "6", "1", 3))
    path = tmp_path / "fit.json"
    save_fit_json(fit, path)
    doc = json.loads(path.read_text())
    assert doc["model"] == "shifted_sqrt"
    assert set(doc["coefficients"]) == {"a", "b", "c"}
    assert len(doc["trace"]) == len(fit.trace)
    assert doc["diverged"] is False
