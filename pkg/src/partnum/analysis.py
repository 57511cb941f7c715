"""Relative-error reports of estimators against the exact table.

A scan walks a range of n, evaluates one estimator (raw, or rounded to
the nearest integer first), and records the signed relative error
(estimate - p(n)) / p(n) per row. Rows where the estimator is outside
its domain carry an explicit error marker so that threshold checks can
skip them deliberately instead of tripping over sentinels.

Threshold specs encode published accuracy claims as clauses
(n range, bound, all_below / all_above with strict comparison); checking
a clause against a report yields pass/fail plus the witness n on
failure. Reports serialize to deterministic CSV (and back).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

from mpmath import mp, mpf

from .coefficients import EstimatorKind, Registry, paper_registry
from .errors import ConfigError, DomainError, RangeError
from .estimators import estimate, round_half_up
from .exact import PartitionTable
from .precision import DEFAULT_DPS, real, working_dps
from .series import DataSeries
from .fitting import FitResult

CSV_DIGITS = 30


@dataclass(frozen=True)
class ReportRow:
    n: int
    estimate: mpf | int | None  # int when the scan rounded; None on domain error
    exact: int
    rel_error: mpf | None
    abs_rel_error: mpf | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class ErrorReport:
    estimator_kind: EstimatorKind
    rounded: bool
    rows: tuple[ReportRow, ...]
    range: tuple[int, int, int]  # start, stop, step (stop inclusive)

    def row(self, n: int) -> ReportRow:
        start, _, step = self.range
        index = (n - start) // step
        if not 0 <= index < len(self.rows) or self.rows[index].n != n:
            raise KeyError(f"report has no row for n={n}")
        return self.rows[index]


def scan(
    table: PartitionTable,
    kind: EstimatorKind | str,
    scan_range: tuple[int, int] | tuple[int, int, int],
    registry: Registry | None = None,
    rounded: bool = False,
    dps: int = DEFAULT_DPS,
) -> ErrorReport:
    """Evaluate an estimator over every n in the range against exact p(n)."""
    kind = EstimatorKind(kind)
    if registry is None:
        registry = paper_registry()
    start, stop, step = (*scan_range, 1)[:3]
    if step < 1 or stop < start:
        raise ConfigError(f"bad scan range {scan_range}")
    if stop > table.max_n:
        raise ConfigError(f"scan needs p(n) up to {stop}, table holds {table.max_n}")
    rows = []
    with working_dps(dps):
        for n in range(start, stop + 1, step):
            exact = table.p(n)
            try:
                value = estimate(kind, n, registry, dps=dps)
            except (DomainError, RangeError) as exc:
                rows.append(
                    ReportRow(n, None, exact, None, None, error=type(exc).__name__)
                )
                continue
            compared: mpf | int = round_half_up(value) if rounded else value
            rel = (mpf(compared) - exact) / exact
            rows.append(ReportRow(n, compared, exact, rel, abs(rel)))
    return ErrorReport(
        estimator_kind=kind,
        rounded=rounded,
        rows=tuple(rows),
        range=(start, stop, step),
    )


@dataclass(frozen=True)
class ThresholdClause:
    n_low: int
    n_high: int
    bound: mpf
    direction: str  # "all_below" | "all_above"

    def __post_init__(self):
        object.__setattr__(self, "bound", real(self.bound))
        if self.n_low > self.n_high:
            raise ConfigError(f"clause range [{self.n_low}, {self.n_high}] is empty")
        if not self.bound > 0:
            raise ConfigError("clause bound must be positive")
        if self.direction not in ("all_below", "all_above"):
            raise ConfigError(f"unknown direction {self.direction!r}")


@dataclass(frozen=True)
class ThresholdSpec:
    estimator_kind: EstimatorKind
    rounded: bool
    clauses: tuple[ThresholdClause, ...]


@dataclass(frozen=True)
class ClauseResult:
    clause: ThresholdClause
    passed: bool
    witness_n: int | None = None
    witness_value: mpf | None = None
    checked: int = 0


def check_thresholds(report: ErrorReport, spec: ThresholdSpec) -> list[ClauseResult]:
    """Evaluate every clause exactly; strict < / > as the claims state."""
    if spec.estimator_kind != report.estimator_kind or spec.rounded != report.rounded:
        raise ConfigError("threshold spec does not match the report's estimator")
    results = []
    for clause in spec.clauses:
        start, stop, step = report.range
        if clause.n_low < start or clause.n_high > stop or step != 1:
            raise ConfigError(
                f"report range {report.range} does not cover clause "
                f"[{clause.n_low}, {clause.n_high}] at step 1"
            )
        witness = None
        checked = 0
        for n in range(clause.n_low, clause.n_high + 1):
            row = report.row(n)
            if not row.ok:  # domain-invalid rows are skipped deliberately
                continue
            checked += 1
            value = row.abs_rel_error
            bad = value >= clause.bound if clause.direction == "all_below" else value <= clause.bound
            if bad:
                witness = (n, value)
                break
        if witness is None:
            results.append(ClauseResult(clause, True, checked=checked))
        else:
            results.append(
                ClauseResult(clause, False, witness[0], witness[1], checked=checked)
            )
    return results


# Published accuracy claims, verbatim strict bounds.
PAPER_THRESHOLDS: tuple[ThresholdSpec, ...] = (
    ThresholdSpec(
        EstimatorKind.RH,
        rounded=False,
        clauses=(
            ThresholdClause(1, 25, "0.09", "all_above"),
            ThresholdClause(26, 220, "0.03", "all_above"),
            ThresholdClause(1, 1000, "0.014", "all_above"),
            ThresholdClause(1000, 10000, "0.0044", "all_above"),
        ),
    ),
    ThresholdSpec(
        EstimatorKind.RH1,
        rounded=False,
        clauses=(
            ThresholdClause(100, 10000, "6e-7", "all_below"),
            ThresholdClause(26, 10000, "1e-3", "all_below"),
            ThresholdClause(11, 10000, "1e-2", "all_below"),
            ThresholdClause(1000, 3000, "1e-8", "all_below"),
            ThresholdClause(3000, 10000, "5.3e-9", "all_below"),
        ),
    ),
    ThresholdSpec(
        EstimatorKind.RH3,
        rounded=True,
        clauses=(ThresholdClause(2501, 9999, "3e-9", "all_below"),),
    ),
    ThresholdSpec(
        EstimatorKind.RH4,
        rounded=True,
        clauses=(ThresholdClause(2501, 9999, "1e-9", "all_below"),),
    ),
    ThresholdSpec(
        EstimatorKind.RH0,
        rounded=True,
        clauses=(ThresholdClause(3, 80, "4e-5", "all_below"),),
    ),
)


def _fmt(value) -> str:
    if isinstance(value, int):
        return str(value)
    return mp.nstr(mpf(value), CSV_DIGITS)


def emit_csv(obj, destination) -> None:
    """Write a report, fit result, or data series as deterministic CSV."""
    close = False
    if hasattr(destination, "write"):
        fh = destination
    else:
        fh = open(destination, "w", encoding="ascii", newline="")
        close = True
    try:
        writer = csv.writer(fh, lineterminator="\n")
        if isinstance(obj, ErrorReport):
            writer.writerow(["n", "estimate", "exact", "rel_error", "abs_rel_error"])
            for row in obj.rows:
                if row.ok:
                    writer.writerow(
                        [row.n, _fmt(row.estimate), row.exact, _fmt(row.rel_error), _fmt(row.abs_rel_error)]
                    )
                else:
                    writer.writerow([row.n, row.error, row.exact, "", ""])
        elif isinstance(obj, DataSeries):
            writer.writerow(["x", "y"])
            for x, y in zip(obj.xs, obj.ys):
                writer.writerow([_fmt(x), _fmt(y)])
        elif isinstance(obj, FitResult):
            names = sorted(obj.coefficients)
            writer.writerow(["index", *names, "avg_error"])
            for idx, coeffs, err in obj.trace:
                writer.writerow([idx, *(_fmt(coeffs[k]) if k in coeffs else "" for k in names), _fmt(err)])
        else:
            raise ConfigError(f"cannot emit {type(obj).__name__} as CSV")
    finally:
        if close:
            fh.close()


def parse_report_csv(source, kind: EstimatorKind, rounded: bool) -> ErrorReport:
    """Rebuild an ErrorReport from its CSV image (full stored precision)."""
    close = False
    if hasattr(source, "read"):
        fh = source
    else:
        fh = open(source, "r", encoding="ascii", newline="")
        close = True
    try:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["n", "estimate", "exact", "rel_error", "abs_rel_error"]:
            raise ConfigError(f"not a report CSV: header {header}")
        rows = []
        for record in reader:
            n, est, exact = int(record[0]), record[1], int(record[2])
            if record[3] == "":
                rows.append(ReportRow(n, None, exact, None, None, error=est))
            else:
                estimate_val: mpf | int = int(est) if rounded else mpf(est)
                rows.append(
                    ReportRow(n, estimate_val, exact, mpf(record[3]), mpf(record[4]))
                )
    finally:
        if close:
            fh.close()
    if not rows:
        raise ConfigError("empty report CSV")
    ns = [r.n for r in rows]
    step = ns[1] - ns[0] if len(ns) > 1 else 1
    return ErrorReport(kind, rounded, tuple(rows), (ns[0], ns[-1], step))
