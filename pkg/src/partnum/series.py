"""Datasets consumed by the fitting pipelines.

Each builder turns a slice of the exact table into (x, y) points at
working precision:

  * exponent-shift data:     y = (3/2) * ln(4*n*sqrt(3)*p(n))^2 / pi^2 - n
  * denominator-shift data:  y = exp(pi*sqrt(2n/3)) / (4*sqrt(3)*p(n)) - n
  * ratio data:              y = rh(n) / p(n)
  * difference targets:      reciprocal-style transforms of rh(n) - p(n)
                             feeding the cubic / fractional-power fits

The default sampling grids are n = 20k+100 (k = 1..395) for the shift
datasets and n = 20k+60 (k = 1..397) for the difference targets; the
small-n piecewise pipeline walks n = 3..100 instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from mpmath import mp, mpf

from .coefficients import CoefficientSet
from .errors import DomainError
from .exact import PartitionTable
from .precision import DEFAULT_DPS, four_sqrt3, sqrt23_pi, working_dps

# Sampling grids used in the original derivation.
SHIFT_GRID = tuple(range(120, 8001, 20))  # 20k+100, k = 1..395
DIFF_GRID = tuple(range(80, 8001, 20))  # 20k+60,  k = 1..397
SMALL_N_GRID = tuple(range(3, 101))


@dataclass(frozen=True)
class DataSeries:
    """Strictly x-ordered, nonempty (x, y) data."""

    xs: tuple[mpf, ...] = field(repr=False)
    ys: tuple[mpf, ...] = field(repr=False)
    label: str = ""

    def __post_init__(self):
        if not self.xs:
            raise ValueError("series must be nonempty")
        if len(self.xs) != len(self.ys):
            raise ValueError("xs and ys must have equal length")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise ValueError("xs must be strictly increasing")

    def __len__(self) -> int:
        return len(self.xs)

    @property
    def points(self) -> tuple[tuple[mpf, mpf], ...]:
        return tuple(zip(self.xs, self.ys))


def _as_sorted_ints(n_values: Iterable[int]) -> tuple[int, ...]:
    ns = tuple(n_values)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_values must be strictly increasing")
    return ns


def build_c1_series(
    table: PartitionTable,
    n_values: Sequence[int] = SHIFT_GRID,
    dps: int = DEFAULT_DPS,
) -> DataSeries:
    """Exponent shift extracted pointwise from exact values."""
    ns = _as_sorted_ints(n_values)
    with working_dps(dps):
        xs, ys = [], []
        for n in ns:
            if n < 1:
                raise DomainError(f"exponent-shift data needs n >= 1, got {n}")
            log_term = mp.log(4 * n * mp.sqrt(3) * table.p(n))
            y = mpf(3) / 2 * log_term**2 / mp.pi**2 - n
            xs.append(mpf(n))
            ys.append(y)
    return DataSeries(tuple(xs), tuple(ys), label="c1")


def build_c2_series(
    table: PartitionTable,
    n_values: Sequence[int] = SHIFT_GRID,
    dps: int = DEFAULT_DPS,
) -> DataSeries:
    """Denominator shift extracted pointwise from exact values."""
    ns = _as_sorted_ints(n_values)
    with working_dps(dps):
        xs, ys = [], []
        for n in ns:
            if n < 1:
                raise DomainError(f"denominator-shift data needs n >= 1, got {n}")
            y = mp.exp(sqrt23_pi() * mp.sqrt(n)) / (four_sqrt3() * table.p(n)) - n
            xs.append(mpf(n))
            ys.append(y)
    return DataSeries(tuple(xs), tuple(ys), label="c2")


def build_c2_from_c1_series(
    table: PartitionTable,
    rh1_coeffs: CoefficientSet,
    n_values: Sequence[int] = SMALL_N_GRID,
    dps: int = DEFAULT_DPS,
) -> DataSeries:
    """Denominator shift left over after the fitted exponent correction.

    Feeds the odd-n cubic fits; uses the rh1 coefficient set to supply
    the exponent shift.
    """
    ns = _as_sorted_ints(n_values)
    with working_dps(dps):
        a1, b1, c1 = rh1_coeffs["a1"], rh1_coeffs["b1"], rh1_coeffs["c1"]
        xs, ys = [], []
        for n in ns:
            if n < 1:
                raise DomainError(f"denominator-shift data needs n >= 1, got {n}")
            radicand = n + a1 / mp.sqrt(n + c1) + b1
            if radicand <= 0:
                raise DomainError(f"corrected exponent radicand not positive at n={n}")
            y = mp.exp(sqrt23_pi() * mp.sqrt(radicand)) / (four_sqrt3() * table.p(n)) - n
            xs.append(mpf(n))
            ys.append(y)
    return DataSeries(tuple(xs), tuple(ys), label="c2_from_c1")


def _rh_over_p(n: int, table: PartitionTable) -> mpf:
    return mp.exp(sqrt23_pi() * mp.sqrt(n)) / (four_sqrt3() * n * table.p(n))


def build_ratio_series(
    table: PartitionTable,
    n_values: Sequence[int] = SHIFT_GRID,
    dps: int = DEFAULT_DPS,
) -> DataSeries:
    """Baseline-to-exact ratio rh(n)/p(n)."""
    ns = _as_sorted_ints(n_values)
    with working_dps(dps):
        xs = [mpf(n) for n in ns]
        ys = [_rh_over_p(n, table) for n in ns]
    return DataSeries(tuple(xs), tuple(ys), label="ratio")


def build_ratio_line_series(
    table: PartitionTable,
    n_values: Sequence[int] = SHIFT_GRID,
    dps: int = DEFAULT_DPS,
) -> DataSeries:
    """Transformed ratio data (n, (rh/p - 1)^-2), which lies on a line."""
    ns = _as_sorted_ints(n_values)
    with working_dps(dps):
        xs, ys = [], []
        for n in ns:
            excess = _rh_over_p(n, table) - 1
            if excess <= 0:
                raise DomainError(f"rh(n) does not exceed p(n) at n={n}")
            xs.append(mpf(n))
            ys.append(excess**-2)
    return DataSeries(tuple(xs), tuple(ys), label="ratio_line")


def build_diff_target_series(
    table: PartitionTable,
    variant: str,
    n_values: Sequence[int] = DIFF_GRID,
    t0=None,
    dps: int = DEFAULT_DPS,
) -> DataSeries:
    """Targets for fitting the gap rh(n) - p(n).

    variant "c3": y = (pi*e(n) / (12*sqrt(2)*gap))^2, fit by a cubic;
    variant "c4": y = sqrt(2)*t0*pi*e(n-t0) / (24*gap), needs t0;
    variant "c5": y = pi*e(n) / (12*sqrt(2)*gap);
    with e(x) = exp(sqrt(2/3)*pi*sqrt(x)) and gap = rh(n) - p(n).
    """
    if variant not in ("c3", "c4", "c5"):
        raise ValueError(f"unknown difference-target variant {variant!r}")
    if variant == "c4" and t0 is None:
        raise ValueError("variant 'c4' needs the shift t0")
    ns = _as_sorted_ints(n_values)
    with working_dps(dps):
        if t0 is not None:
            t0 = mpf(t0)
        xs, ys = [], []
        for n in ns:
            hr_exp = mp.exp(sqrt23_pi() * mp.sqrt(n))
            gap = hr_exp / (four_sqrt3() * n) - table.p(n)
            if gap <= 0:
                raise DomainError(f"rh(n) - p(n) = {mp.nstr(gap, 8)} not positive at n={n}")
            if variant == "c3":
                y = (mp.pi * hr_exp / (12 * mp.sqrt(2) * gap)) ** 2
            elif variant == "c5":
                y = mp.pi * hr_exp / (12 * mp.sqrt(2) * gap)
            else:
                u = n - t0
                if u <= 0:
                    raise DomainError(f"n={n} does not exceed t0={t0}")
                y = mp.sqrt(2) * t0 * mp.pi * mp.exp(sqrt23_pi() * mp.sqrt(u)) / (24 * gap)
            xs.append(mpf(n))
            ys.append(y)
    return DataSeries(tuple(xs), tuple(ys), label=f"diff_{variant}")
