"""Estimator formulas: values, domains, rounding, dispatch."""

import json

import pytest
from mpmath import mp, mpf

from partnum import (
    ConfigError,
    DomainError,
    EstimatorKind,
    RangeError,
    estimate,
    f3,
    load_registry,
    paper_registry,
    rd3,
    rh,
    rh0,
    rh1,
    rh2,
    rh3,
    rh4,
    round_half_up,
    save_registry,
)
from partnum.estimators import c2_prime, rh0_branch

# Frozen from an independent 60-digit evaluation of exp(pi*sqrt(2)/sqrt(3))/sqrt(48).
RH_AT_1 = "1.8766704226053691623464052891771154"


def test_rh_value_at_1():
    value = rh(1)
    assert abs(value - mpf(RH_AT_1)) < mpf("1e-30")


def test_rh_relative_error_at_100(table10000):
    rel = rh(100) / table10000.p(100) - 1
    assert mpf("0.03") < rel <= mpf("0.09")


def test_rh_domain():
    with pytest.raises(DomainError):
        rh(0)
    with pytest.raises(DomainError):
        rh(-5)


def test_rh1_point_values(registry):
    coeffs = registry[EstimatorKind.RH1]
    assert round_half_up(rh1(100, coeffs)) == 190569177
    assert rh1(1, coeffs) > 0


def test_rh2_accuracy(table10000, registry):
    coeffs = registry[EstimatorKind.RH2]
    assert abs(rh2(50, coeffs) / table10000.p(50) - 1) < mpf("1e-3")
    assert abs(rh2(1000, coeffs) / table10000.p(1000) - 1) < mpf("1e-6")
    assert rh2(1, coeffs) > 0


def test_rd3_domain_and_error_scale(table10000, registry):
    coeffs = registry[EstimatorKind.RD3]
    for n in (1, 10, 14):
        with pytest.raises(DomainError):
            rd3(n, coeffs)
    assert rd3(15, coeffs) > 0
    # at n=1000 the ratio-corrected error is orders of magnitude above rh2's
    rh2_err = abs(rh2(1000, registry[EstimatorKind.RH2]) / table10000.p(1000) - 1)
    rd3_err = abs(rd3(1000, coeffs) / table10000.p(1000) - 1)
    assert 100 < rd3_err / rh2_err < 10000


def test_f3_small_n(registry):
    coeffs = registry[EstimatorKind.F3]
    assert f3(1, coeffs) > 0
    assert coeffs["d1"] == mpf("4.188653689e7")


def test_rh3_small_n(table10000, registry):
    coeffs = registry[EstimatorKind.RH3]
    assert abs(rh3(5, coeffs) / table10000.p(5) - 1) < mpf("0.05")
    value = rh3(1, coeffs)  # real but poor at n=1
    assert value > 0
    assert abs(value - 1) > 1


def test_rh4_coefficient_and_value(registry):
    coeffs = registry[EstimatorKind.RH4]
    assert coeffs["c3"] == mpf("-0.08501098214")
    assert round_half_up(rh4(5, coeffs)) == 7


def test_rh0_branches_and_domain(table10000, registry):
    coeffs = registry[EstimatorKind.RH0]
    for n in range(3, 100, 2):
        assert rh0_branch(n) == "odd"
        expected = coeffs["odd_a"] * mp.sqrt(n + coeffs["odd_c"]) + coeffs["odd_b"]
        assert c2_prime(n, coeffs) == expected
    for n in range(4, 101, 2):
        assert rh0_branch(n) == "even"
        expected = coeffs["even_a"] * mp.sqrt(n + coeffs["even_c"]) + coeffs["even_b"]
        assert c2_prime(n, coeffs) == expected
    with pytest.raises(DomainError):
        rh0(2, coeffs)
    with pytest.raises(RangeError):
        rh0(0, coeffs)
    with pytest.raises(RangeError):
        rh0(101, coeffs)
    assert abs(rh0(50, coeffs) / table10000.p(50) - 1) < mpf("4e-5")


def test_round_half_up():
    assert round_half_up(mpf("0.5")) == 1
    assert round_half_up(mpf("0.4999")) == 0
    assert round_half_up(mpf(0)) == 0
    assert round_half_up(7) == 7
    assert round_half_up(mpf("2.5")) == 3
    with pytest.raises(DomainError):
        round_half_up(mpf("-0.25"))
    with pytest.raises(DomainError):
        round_half_up(mp.inf)


def test_round_half_up_huge_values_exact():
    # mantissa surgery must keep the half even when the value dwarfs it
    big = mpf(10) ** 40
    assert round_half_up(big) == 10**40
    x = mpf(3) * mpf(2) ** 200  # integer-valued mpf, exp > 0
    assert round_half_up(x) == 3 * 2**200


def test_round_half_up_matches_floor_rule(registry):
    # floor(x + 1/2) computed at inflated precision as a cross-check
    coeffs = registry[EstimatorKind.RH1]
    for n in (1, 7, 100, 731):
        x = rh1(n, coeffs)
        with mp.workprec(mp.mag(x) + 300):
            expected = int(mp.floor(x + mpf("0.5")))
        assert round_half_up(x) == expected


def test_estimator_determinism(registry):
    coeffs = registry[EstimatorKind.RH1]
    a = rh1(9876, coeffs)
    b = rh1(9876, coeffs)
    assert a == b and a._mpf_ == b._mpf_


def test_estimate_dispatch(table10000, registry):
    assert estimate(EstimatorKind.RH, 100) == rh(100)
    assert estimate("rh1", 100, registry) == rh1(100, registry[EstimatorKind.RH1])
    with pytest.raises(DomainError):
        estimate(EstimatorKind.RH0, 2, registry)
    with pytest.raises(ConfigError):
        estimate("nope", 10, registry)
    with pytest.raises(ConfigError):
        estimate(EstimatorKind.RH1, 10, {EstimatorKind.RH: registry[EstimatorKind.RH]})


def test_registry_round_trip(tmp_path, registry):
    path = tmp_path / "coeffs.json"
    save_registry(registry, path)
    loaded = load_registry(path)
    assert set(loaded) == set(registry)
    for kind, cs in registry.items():
        for name, value in cs.values.items():
            assert loaded[kind][name] == value
    doc = json.loads(path.read_text())
    assert all("coefficients" in entry for entry in doc["estimators"])


def test_coefficient_set_validates_names(registry):
    from partnum.coefficients import CoefficientSet

    with pytest.raises(ConfigError):
        CoefficientSet(EstimatorKind.RH1, {"a1": mpf(1)})
