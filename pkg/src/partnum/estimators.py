"""Closed-form estimators for the partition number p(n).

The baseline is the Hardy-Ramanujan asymptotic

    rh(n) = exp(sqrt(2/3)*pi*sqrt(n)) / (4*sqrt(3)*n),

and the rest of the family refines it: rh1 perturbs the exponent, rh2
perturbs the denominator, rd3 divides by a fitted ratio, f3/rh3/rh4
subtract a fitted correction term, and rh0 is the small-n piecewise
variant. Appending a half and flooring ("rounded variant") exploits the
integrality of p(n).

Every function is a pure function of (n, coefficients) evaluated at the
requested working precision; results are bit-identical across calls.
Domains are guarded even where the shipped coefficients cannot violate
them, so refit coefficients fail loudly instead of going complex.
"""

from __future__ import annotations

from mpmath import mp, mpf

from .coefficients import CoefficientSet, EstimatorKind, Registry, paper_registry
from .errors import ConfigError, DomainError, RangeError
from .precision import DEFAULT_DPS, four_sqrt3, sqrt23_pi, working_dps


def _require_positive_index(n: int) -> None:
    if n < 1:
        raise DomainError(f"estimators are defined for n >= 1, got n={n}")


def _hr_exp(x) -> mpf:
    """exp(sqrt(2/3)*pi*sqrt(x)) for x >= 0."""
    if x < 0:
        raise DomainError(f"negative radicand {x} in Hardy-Ramanujan exponent")
    return mp.exp(sqrt23_pi() * mp.sqrt(x))


def rh(n: int, dps: int = DEFAULT_DPS) -> mpf:
    """Hardy-Ramanujan asymptotic estimate of p(n)."""
    _require_positive_index(n)
    with working_dps(dps):
        return _hr_exp(n) / (four_sqrt3() * n)


def rh_shifted(x, dps: int = DEFAULT_DPS) -> mpf:
    """rh evaluated at a real argument x > 0 (used by the t0 pipelines)."""
    with working_dps(dps):
        x = mpf(x)
        if x <= 0:
            raise DomainError(f"rh argument must be positive, got {x}")
        return _hr_exp(x) / (four_sqrt3() * x)


def rh1(n: int, coeffs: CoefficientSet, dps: int = DEFAULT_DPS) -> mpf:
    """Exponent-corrected estimator: sqrt(n) -> sqrt(n + a1/sqrt(n+c1) + b1)."""
    _require_positive_index(n)
    with working_dps(dps):
        shifted = n + coeffs["c1"]
        if shifted <= 0:
            raise DomainError(f"n + c1 = {mp.nstr(shifted, 8)} not positive at n={n}")
        radicand = n + coeffs["a1"] / mp.sqrt(shifted) + coeffs["b1"]
        if radicand <= 0:
            raise DomainError(f"corrected exponent radicand {mp.nstr(radicand, 8)} not positive at n={n}")
        return _hr_exp(radicand) / (four_sqrt3() * n)


def rh2(n: int, coeffs: CoefficientSet, dps: int = DEFAULT_DPS) -> mpf:
    """Denominator-corrected estimator: n -> n + a2*sqrt(n+c2) + b2."""
    _require_positive_index(n)
    with working_dps(dps):
        shifted = n + coeffs["c2"]
        if shifted < 0:
            raise DomainError(f"n + c2 = {mp.nstr(shifted, 8)} negative at n={n}")
        denom = n + coeffs["a2"] * mp.sqrt(shifted) + coeffs["b2"]
        if denom <= 0:
            raise DomainError(f"corrected denominator {mp.nstr(denom, 8)} not positive at n={n}")
        return _hr_exp(n) / (four_sqrt3() * denom)


def rd3(n: int, coeffs: CoefficientSet, dps: int = DEFAULT_DPS) -> mpf:
    """Ratio-corrected estimator rh(n) / (1 + 1/sqrt(a3*n + b3)).

    The linear radicand goes negative for n <= 14 with the shipped
    coefficients; that is a hard domain edge, not a numerical accident.
    """
    _require_positive_index(n)
    with working_dps(dps):
        radicand = coeffs["a3"] * n + coeffs["b3"]
        if radicand <= 0:
            raise DomainError(
                f"ratio radicand a3*n+b3 = {mp.nstr(radicand, 8)} not positive at n={n}"
            )
        return rh(n, dps=dps) / (1 + 1 / mp.sqrt(radicand))


def _cubic(x, a, b, c, d) -> mpf:
    return ((a * x + b) * x + c) * x + d


def f3(n: int, coeffs: CoefficientSet, dps: int = DEFAULT_DPS) -> mpf:
    """Difference-corrected estimator with a cubic denominator term."""
    _require_positive_index(n)
    with working_dps(dps):
        c3 = _cubic(mpf(n), coeffs["a1"], coeffs["b1"], coeffs["c1"], coeffs["d1"])
        if c3 <= 0:
            raise DomainError(f"cubic C3({n}) = {mp.nstr(c3, 8)} not positive")
        correction = mp.pi * _hr_exp(n) / (12 * mp.sqrt(2 * c3))
        return rh(n, dps=dps) - correction


def _c4(u, coeffs: CoefficientSet) -> mpf:
    """a2*u^1.5 + b2*u + c2*u^0.5 + d2 over u = n - t0."""
    root = mp.sqrt(u)
    return coeffs["a2"] * u * root + coeffs["b2"] * u + coeffs["c2"] * root + coeffs["d2"]


def rh3(n: int, coeffs: CoefficientSet, dps: int = DEFAULT_DPS) -> mpf:
    """Shifted-difference estimator built on the t0 displacement."""
    _require_positive_index(n)
    with working_dps(dps):
        t0 = coeffs["t0"]
        u = n - t0
        if u <= 0:
            raise DomainError(f"n={n} does not exceed the shift t0={t0}")
        c4 = _c4(u, coeffs)
        if c4 == 0:
            raise DomainError(f"C4({n}) = 0")
        correction = mp.sqrt(2) * t0 * mp.pi * _hr_exp(u) / (24 * c4)
        return rh(n, dps=dps) - correction


def _c5(x, coeffs: CoefficientSet) -> mpf:
    """a3*n^1.5 + b3*n + c3*n^0.5 + d3."""
    root = mp.sqrt(x)
    return coeffs["a3"] * x * root + coeffs["b3"] * x + coeffs["c3"] * root + coeffs["d3"]


def rh4(n: int, coeffs: CoefficientSet, dps: int = DEFAULT_DPS) -> mpf:
    """Unshifted-difference estimator with a fractional-power denominator."""
    _require_positive_index(n)
    with working_dps(dps):
        c5 = _c5(mpf(n), coeffs)
        if c5 == 0:
            raise DomainError(f"C5({n}) = 0")
        correction = mp.pi * _hr_exp(n) / (12 * mp.sqrt(2) * c5)
        return rh(n, dps=dps) - correction


def rh0_branch(n: int) -> str:
    """Which piecewise branch applies at n: parity dispatch."""
    return "odd" if n % 2 else "even"


def c2_prime(n: int, coeffs: CoefficientSet, dps: int = DEFAULT_DPS) -> mpf:
    """The piecewise denominator shift of rh0."""
    with working_dps(dps):
        branch = rh0_branch(n)
        a, c, b = coeffs[f"{branch}_a"], coeffs[f"{branch}_c"], coeffs[f"{branch}_b"]
        radicand = n + c
        if radicand < 0:
            raise DomainError(
                f"{branch} branch radicand n + ({mp.nstr(c, 8)}) = {mp.nstr(radicand, 8)} negative at n={n}"
            )
        return a * mp.sqrt(radicand) + b


def rh0(n: int, coeffs: CoefficientSet, dps: int = DEFAULT_DPS) -> mpf:
    """Small-n estimator, valid for 1 <= n <= 100; n=2 is domain-invalid."""
    if not 1 <= n <= 100:
        raise RangeError(f"rh0 is defined for 1 <= n <= 100, got n={n}")
    with working_dps(dps):
        denom = n + c2_prime(n, coeffs, dps=dps)
        if denom <= 0:
            raise DomainError(f"denominator n + C2'({n}) = {mp.nstr(denom, 8)} not positive")
        return _hr_exp(n) / (four_sqrt3() * denom)


def round_half_up(x) -> int:
    """floor(x + 1/2) computed exactly, whatever the magnitude of x.

    Works directly on the mantissa/exponent of the input, so the half is
    never absorbed by rounding and no second float rounding can occur.
    """
    if isinstance(x, int):
        if x < 0:
            raise DomainError(f"round_half_up expects a nonnegative value, got {x}")
        return x
    x = mpf(x) if not isinstance(x, mpf) else x
    if not mp.isfinite(x):
        raise DomainError(f"round_half_up expects a finite value, got {x}")
    if x < 0:
        raise DomainError(f"round_half_up expects a nonnegative value, got {x}")
    _, man, exp, _ = x._mpf_
    if man == 0:
        return 0
    if exp >= 0:  # already an integer
        return man << exp
    shift = -exp  # x = man / 2^shift; floor(x + 1/2) in pure integers
    return (2 * man + (1 << shift)) >> (shift + 1)


_DISPATCH = {
    EstimatorKind.RH: lambda n, cs, dps: rh(n, dps=dps),
    EstimatorKind.RH1: rh1,
    EstimatorKind.RH2: rh2,
    EstimatorKind.RD3: rd3,
    EstimatorKind.F3: f3,
    EstimatorKind.RH3: rh3,
    EstimatorKind.RH4: rh4,
    EstimatorKind.RH0: rh0,
}


def estimate(
    kind: EstimatorKind | str,
    n: int,
    registry: Registry | None = None,
    dps: int = DEFAULT_DPS,
) -> mpf:
    """Evaluate the estimator `kind` at n with the registry's coefficients."""
    try:
        kind = EstimatorKind(kind)
    except ValueError:
        raise ConfigError(f"unknown estimator kind {kind!r}") from None
    if registry is None:
        registry = paper_registry()
    if kind not in registry:
        raise ConfigError(f"registry has no coefficients for {kind.value}")
    return _DISPATCH[kind](n, registry[kind], dps)
