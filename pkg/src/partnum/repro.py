"""Reproduction suite: every published exactness, accuracy and
coefficient claim checked against this implementation.

Each check is a named, independently runnable assertion; the registry
below drives both the ``repro`` CLI command (pass/fail matrix, exit
code) and the acceptance test module. Checks compare either exactly
(integer equality, domain errors) or to a stated number of significant
digits (relative error below half a unit in that digit).

Heavy inputs (the exact table to n=10000, datasets, fits) are built
once per context and shared.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

from mpmath import mp, mpf

from .analysis import PAPER_THRESHOLDS, ErrorReport, check_thresholds, scan
from .coefficients import EstimatorKind, paper_registry
from .errors import DomainError
from .estimators import estimate, round_half_up
from .exact import build_table, p_oracle_prefix
from .fitting import (
    DEFAULT_GRID,
    FitModel,
    fit_c1_linear,
    fit_c2prime_piecewise,
    fit_c3_cubic,
    fit_c5,
    fit_ratio_line,
    fit_t0_and_c4,
    grid_refine,
    iterate_c1_fit,
)
from .precision import DEFAULT_DPS, working_dps
from .series import build_c1_series, build_c2_series

TABLE_DEPTH = 10000


def agrees_to_digits(value, target, digits: int) -> bool:
    """Relative agreement within half a unit in the given significant digit."""
    with working_dps(DEFAULT_DPS):
        value, target = mpf(value), mpf(target)
        if target == 0:
            return value == 0
        return abs((value - target) / target) <= mpf(5) * mpf(10) ** (-digits)


class ReproContext:
    """Shared exact table, registry and lazily built fits."""

    def __init__(self, table=None, dps: int = DEFAULT_DPS):
        self.dps = dps
        self.table = table if table is not None else build_table(TABLE_DEPTH)
        self.registry = paper_registry()
        self._reports: dict = {}

    def report(self, kind: EstimatorKind, lo: int, hi: int, rounded: bool) -> ErrorReport:
        key = (kind, lo, hi, rounded)
        if key not in self._reports:
            self._reports[key] = scan(
                self.table, kind, (lo, hi), self.registry, rounded=rounded, dps=self.dps
            )
        return self._reports[key]

    def rounded_value(self, kind: EstimatorKind, n: int) -> int:
        return round_half_up(estimate(kind, n, self.registry, dps=self.dps))

    @cached_property
    def c1_series(self):
        return build_c1_series(self.table, dps=self.dps)

    @cached_property
    def c2_series(self):
        return build_c2_series(self.table, dps=self.dps)

    @cached_property
    def fit_c1_fixed(self):
        return fit_c1_linear(self.c1_series, c2="2.5", e2="0.5", dps=self.dps)

    @cached_property
    def fit_c1_grid(self):
        return grid_refine(self.c1_series, FitModel.SHIFTED_POWER, DEFAULT_GRID, dps=self.dps)

    @cached_property
    def fit_c1_iterate(self):
        return iterate_c1_fit(self.c1_series, init_c2="2.5", init_e2="0.5", dps=self.dps)

    @cached_property
    def fit_c2_grid(self):
        return grid_refine(self.c2_series, FitModel.SHIFTED_SQRT, DEFAULT_GRID, dps=self.dps)

    @cached_property
    def fit_ratio(self):
        return fit_ratio_line(self.table, dps=self.dps)

    @cached_property
    def fit_t0_c4(self):
        return fit_t0_and_c4(self.table, dps=self.dps)

    @cached_property
    def fit_c5_result(self):
        return fit_c5(self.table, dps=self.dps)

    @cached_property
    def fit_c3_result(self):
        return fit_c3_cubic(self.table, dps=self.dps)

    @cached_property
    def fit_c2prime(self):
        return fit_c2prime_piecewise(self.table, dps=self.dps)


def refit_registry(ctx: ReproContext):
    """Registry rebuilt from this implementation's own fits."""
    from .coefficients import CoefficientSet, Registry

    def cs(kind, mapping):
        return CoefficientSet(kind, mapping, provenance="refit")

    c1g, c2g = ctx.fit_c1_grid, ctx.fit_c2_grid
    ratio, t0c4, c5, c3 = ctx.fit_ratio, ctx.fit_t0_c4, ctx.fit_c5_result, ctx.fit_c3_result
    odd, even = ctx.fit_c2prime
    registry: Registry = {
        EstimatorKind.RH: cs(EstimatorKind.RH, {}),
        EstimatorKind.RH1: cs(
            EstimatorKind.RH1,
            {"a1": c1g.coefficients["a"], "b1": c1g.coefficients["b"], "c1": c1g.coefficients["c"]},
        ),
        EstimatorKind.RH2: cs(
            EstimatorKind.RH2,
            {"a2": c2g.coefficients["a"], "b2": c2g.coefficients["b"], "c2": c2g.coefficients["c"]},
        ),
        EstimatorKind.RD3: cs(
            EstimatorKind.RD3,
            {"a3": ratio.coefficients["slope"], "b3": ratio.coefficients["intercept"]},
        ),
        EstimatorKind.F3: cs(
            EstimatorKind.F3,
            {f"{k}1": c3.coefficients[k] for k in "abcd"},
        ),
        EstimatorKind.RH3: cs(
            EstimatorKind.RH3,
            {"t0": t0c4.coefficients["t0"], **{f"{k}2": t0c4.coefficients[k] for k in "abcd"}},
        ),
        EstimatorKind.RH4: cs(
            EstimatorKind.RH4,
            {f"{k}3": c5.coefficients[k] for k in "abcd"},
        ),
        EstimatorKind.RH0: cs(
            EstimatorKind.RH0,
            {
                "odd_a": odd.coefficients["a"],
                "odd_c": odd.coefficients["c"],
                "odd_b": odd.coefficients["b"],
                "even_a": even.coefficients["a"],
                "even_c": even.coefficients["c"],
                "even_b": even.coefficients["b"],
            },
        ),
    }
    return registry


@dataclass(frozen=True)
class Check:
    check_id: str
    criterion: str
    description: str
    run: Callable[[ReproContext], tuple[bool, str]]


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    criterion: str
    description: str
    passed: bool
    detail: str


CHECKS: list[Check] = []


def _check(check_id: str, criterion: str, description: str):
    def register(fn):
        CHECKS.append(Check(check_id, criterion, description, fn))
        return fn

    return register


# --- exactness ---------------------------------------------------------


@_check("exact-p100", "1", "p(100) = 190569292 exactly")
def _exact_100(ctx):
    got = ctx.table.p(100)
    return got == 190569292, f"p(100) = {got}"


@_check("exact-p200", "1", "p(200) = 3972999029388 exactly")
def _exact_200(ctx):
    got = ctx.table.p(200)
    return got == 3972999029388, f"p(200) = {got}"


@_check("exact-oracle", "2", "pentagonal table equals the DP oracle for n <= 500")
def _exact_oracle(ctx):
    oracle = p_oracle_prefix(500)
    bad = [n for n in range(501) if oracle[n] != ctx.table.p(n)]
    return not bad, "all 501 values equal" if not bad else f"first mismatch at n={bad[0]}"


# --- point values ------------------------------------------------------


def _who_rounds_to(ctx, n: int, target: int) -> str:
    producers = []
    for kind in EstimatorKind:
        try:
            if ctx.rounded_value(kind, n) == target:
                producers.append(kind.value)
        except DomainError:
            continue
    return ", ".join(producers) if producers else "no shipped estimator"


@_check("point-rh1-100", "3", "rounded rh1(100) = 190569177")
def _point_100(ctx):
    got = ctx.rounded_value(EstimatorKind.RH1, 100)
    detail = f"rounded rh1(100) = {got}; 190569177 produced by: {_who_rounds_to(ctx, 100, 190569177)}"
    return got == 190569177, detail


@_check("point-rh1-200", "3", "rounded rh1(200) = 3972999059745")
def _point_200(ctx):
    got = ctx.rounded_value(EstimatorKind.RH1, 200)
    detail = (
        f"rounded rh1(200) = {got}; "
        f"3972999059745 produced by: {_who_rounds_to(ctx, 200, 3972999059745)}"
    )
    return got == 3972999059745, detail


# --- threshold clauses -------------------------------------------------

_CLAUSE_CRITERIA = {
    EstimatorKind.RH: "4",
    EstimatorKind.RH1: "5",
    EstimatorKind.RH3: "6",
    EstimatorKind.RH4: "7",
    EstimatorKind.RH0: "8",
}


def _clause_runner(spec, clause):
    def run(ctx):
        lo = min(c.n_low for c in spec.clauses)
        hi = max(c.n_high for c in spec.clauses)
        report = ctx.report(spec.estimator_kind, lo, hi, spec.rounded)
        partial = type(spec)(spec.estimator_kind, spec.rounded, (clause,))
        result = check_thresholds(report, partial)[0]
        if result.passed:
            return True, f"holds at all {result.checked} valid n"
        return False, (
            f"violated at n={result.witness_n}: "
            f"|rel| = {mp.nstr(result.witness_value, 8)}"
        )

    return run


for _spec in PAPER_THRESHOLDS:
    for _clause in _spec.clauses:
        _kind = _spec.estimator_kind.value
        _cmp = "<" if _clause.direction == "all_below" else ">"
        _desc = (
            f"{_kind}{' rounded' if _spec.rounded else ''} abs rel error "
            f"{_cmp} {mp.nstr(_clause.bound, 4)} on {_clause.n_low}..{_clause.n_high}"
        )
        CHECKS.append(
            Check(
                f"thresh-{_kind}-{_clause.n_low}-{_clause.n_high}",
                _CLAUSE_CRITERIA[_spec.estimator_kind],
                _desc,
                _clause_runner(_spec, _clause),
            )
        )


def _exact_hits(ctx, kind):
    misses = []
    for n in list(range(2, 12)) + [15]:
        got = ctx.rounded_value(kind, n)
        if got != ctx.table.p(n):
            misses.append(f"n={n}: {got} != {ctx.table.p(n)}")
    return not misses, "exact at 2..11 and 15" if not misses else "; ".join(misses)


@_check("exact-hits-rh3", "6", "rounded rh3 equals p(n) for 1<n<12 and n=15")
def _hits_rh3(ctx):
    return _exact_hits(ctx, EstimatorKind.RH3)


@_check("exact-hits-rh4", "7", "rounded rh4 equals p(n) for 1<n<12 and n=15")
def _hits_rh4(ctx):
    return _exact_hits(ctx, EstimatorKind.RH4)


@_check("domain-rd3", "9", "rd3 raises DomainError exactly for n <= 14")
def _domain_rd3(ctx):
    wrongly_ok = []
    for n in range(1, 15):
        try:
            estimate(EstimatorKind.RD3, n, ctx.registry, dps=ctx.dps)
            wrongly_ok.append(n)
        except DomainError:
            pass
    try:
        estimate(EstimatorKind.RD3, 15, ctx.registry, dps=ctx.dps)
        ok15 = True
    except DomainError:
        ok15 = False
    passed = not wrongly_ok and ok15
    detail = "DomainError on 1..14, real value at 15" if passed else (
        f"no error at {wrongly_ok}" if wrongly_ok else "n=15 unexpectedly failed"
    )
    return passed, detail


# --- fitting reproduction ---------------------------------------------


def _coeff_check(check_id, criterion, fit_attr, key, target, digits, label=None):
    label = label or key

    @_check(check_id, criterion, f"{fit_attr.replace('_', ' ')}: {label} = {target} to {digits} digits")
    def run(ctx, fit_attr=fit_attr, key=key, target=target, digits=digits):
        fit = getattr(ctx, fit_attr)
        if isinstance(fit, tuple):  # piecewise pipelines return (odd, even)
            branch, key_name = key
            value = fit[branch].coefficients[key_name]
        else:
            value = fit.coefficients[key] if key != "avg_error" else fit.avg_error
        ok = agrees_to_digits(value, target, digits)
        return ok, f"got {mp.nstr(mpf(value), 12)}, want {target} (to {digits} digits)"

    return run


# criterion 10: fixed-shift linear fit of the exponent data
_coeff_check("fit10-a", "10", "fit_c1_fixed", "a", "-0.02635983935", 8)
_coeff_check("fit10-b", "10", "fit_c1_fixed", "b", "-0.3456348045", 8)
_coeff_check("fit10-err", "10", "fit_c1_fixed", "avg_error", "1.074574171e-5", 4)

# criterion 11: grid pipeline on the exponent data
_coeff_check("fit11-a", "11", "fit_c1_grid", "a", "-0.02651010067", 4)
_coeff_check("fit11-b", "11", "fit_c1_grid", "b", "-0.3456324524", 4)
_coeff_check("fit11-c", "11", "fit_c1_grid", "c", "4.8444724", 4)
_coeff_check("fit11-err", "11", "fit_c1_grid", "avg_error", "2.446731760e-7", 2)

# criterion 12: alternating iteration from (2.5, 0.5)
_coeff_check("fit12-a", "12", "fit_c1_iterate", "a", "-0.02594609078", 4)
_coeff_check("fit12-b", "12", "fit_c1_iterate", "b", "-0.3456286995", 4)
_coeff_check("fit12-c", "12", "fit_c1_iterate", "c", "3.320623832", 4)
_coeff_check("fit12-e", "12", "fit_c1_iterate", "e", "0.4963284361", 4)
_coeff_check("fit12-err", "12", "fit_c1_iterate", "avg_error", "9.010349470e-8", 2)

# criterion 13: grid pipeline on the denominator data
_coeff_check("fit13-a", "13", "fit_c2_grid", "a", "0.4432884566", 4)
_coeff_check("fit13-b", "13", "fit_c2_grid", "b", "0.1325096085", 4)
_coeff_check("fit13-c", "13", "fit_c2_grid", "c", "0.274078", 4)
_coeff_check("fit13-err", "13", "fit_c2_grid", "avg_error", "3.65e-6", 2)

# criterion 14: straightened ratio line
_coeff_check("fit14-slope", "14", "fit_ratio", "slope", "5.062307637", 4)
_coeff_check("fit14-intercept", "14", "fit_ratio", "intercept", "-75.65700620", 4)

# criterion 15: t0 search plus both difference-correction bases
_coeff_check("fit15-t0", "15", "fit_t0_c4", "t0", "0.3594143172", 4)
_coeff_check("fit15-c4-a", "15", "fit_t0_c4", "a", "1.039888529", 4)
_coeff_check("fit15-c4-b", "15", "fit_t0_c4", "b", "-0.3305606395", 4)
_coeff_check("fit15-c4-c", "15", "fit_t0_c4", "c", "0.6134039843", 4)
_coeff_check("fit15-c4-d", "15", "fit_t0_c4", "d", "-0.8582793693", 4)
_coeff_check("fit15-c5-a", "15", "fit_c5_result", "a", "2.893270736", 4)
_coeff_check("fit15-c5-b", "15", "fit_c5_result", "b", "0.4164546941", 4)
_coeff_check("fit15-c5-c", "15", "fit_c5_result", "c", "-0.08501098214", 4)
_coeff_check("fit15-c5-d", "15", "fit_c5_result", "d", "-0.4621004962", 4)

# criterion 16: small-n piecewise branches
_coeff_check("fit16-odd-a", "16", "fit_c2prime", (0, "a"), "0.4527092482", 4, label="odd a")
_coeff_check("fit16-odd-c", "16", "fit_c2prime", (0, "c"), "4.35278", 4, label="odd c")
_coeff_check("fit16-odd-b", "16", "fit_c2prime", (0, "b"), "-0.05498719946", 4, label="odd b")
_coeff_check("fit16-even-a", "16", "fit_c2prime", (1, "a"), "0.4412187317", 4, label="even a")
_coeff_check("fit16-even-c", "16", "fit_c2prime", (1, "c"), "-2.01699", 4, label="even c")
_coeff_check("fit16-even-b", "16", "fit_c2prime", (1, "b"), "0.2102618735", 4, label="even b")


# Report data behind the published error tables and figures, as CSV.
TABLE_EXPORTS: tuple[tuple[str, EstimatorKind, tuple[int, int], bool], ...] = (
    ("rh_rel_error_1_1000", EstimatorKind.RH, (1, 1000), False),
    ("rh_rel_error_1000_10000", EstimatorKind.RH, (1000, 10000), False),
    ("rh1_rel_error_1_1000", EstimatorKind.RH1, (1, 1000), False),
    ("rh1_rounded_rel_error_1_80", EstimatorKind.RH1, (1, 80), True),
    ("rh1_rel_error_1000_10000", EstimatorKind.RH1, (1000, 10000), False),
    ("rh2_rel_error_1_1000", EstimatorKind.RH2, (1, 1000), False),
    ("rh2_rounded_rel_error_1_80", EstimatorKind.RH2, (1, 80), True),
    ("rh2_rel_error_1000_10000", EstimatorKind.RH2, (1000, 10000), False),
    ("rd3_rel_error_1_1000", EstimatorKind.RD3, (1, 1000), False),
    ("rd3_rel_error_1000_10000", EstimatorKind.RD3, (1000, 10000), False),
    ("f3_rel_error_1_1000", EstimatorKind.F3, (1, 1000), False),
    ("rh3_rel_error_1_1000", EstimatorKind.RH3, (1, 1000), False),
    ("rh3_rounded_rel_error_1_30", EstimatorKind.RH3, (1, 30), True),
    ("rh3_rel_error_1000_10000", EstimatorKind.RH3, (1000, 10000), False),
    ("rh4_rel_error_1_1000", EstimatorKind.RH4, (1, 1000), False),
    ("rh4_rounded_rel_error_1_30", EstimatorKind.RH4, (1, 30), True),
    ("rh4_rel_error_1000_10000", EstimatorKind.RH4, (1000, 10000), False),
    ("rh0_rel_error_1_100", EstimatorKind.RH0, (1, 100), False),
    ("rh0_rounded_rel_error_1_30", EstimatorKind.RH0, (1, 30), True),
)


def emit_tables(ctx: ReproContext, directory) -> list[str]:
    """Write the table/figure data as CSV files; returns the paths."""
    import os

    from .analysis import emit_csv

    os.makedirs(directory, exist_ok=True)
    written = []
    for name, kind, (lo, hi), rounded in TABLE_EXPORTS:
        path = os.path.join(directory, f"{name}.csv")
        emit_csv(ctx.report(kind, lo, hi, rounded), path)
        written.append(path)
    for name, series in (
        ("c1_series", ctx.c1_series),
        ("c2_series", ctx.c2_series),
    ):
        path = os.path.join(directory, f"{name}.csv")
        emit_csv(series, path)
        written.append(path)
    return written


def check_ids() -> list[str]:
    return [c.check_id for c in CHECKS]


def run_check(ctx: ReproContext, check_id: str) -> CheckResult:
    for check in CHECKS:
        if check.check_id == check_id:
            passed, detail = check.run(ctx)
            return CheckResult(check.check_id, check.criterion, check.description, passed, detail)
    raise KeyError(f"unknown check {check_id!r}")


def run_all(ctx: ReproContext, only: str | None = None) -> list[CheckResult]:
    """Run every check (optionally only 'thresholds' or 'fits')."""
    results = []
    for check in CHECKS:
        if only == "thresholds" and not (
            check.check_id.startswith(("thresh-", "exact-hits-", "domain-", "point-", "exact-"))
        ):
            continue
        if only == "fits" and not check.check_id.startswith("fit"):
            continue
        passed, detail = check.run(ctx)
        results.append(
            CheckResult(check.check_id, check.criterion, check.description, passed, detail)
        )
    return results
