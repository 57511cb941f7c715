"""Exact partition numbers p(n) as arbitrary-precision integers.

The production path is Euler's pentagonal-number recurrence

    p(n) = sum_{k=1..k1} (-1)^(k-1) p(n - (3k^2+k)/2)
         + sum_{k=1..k2} (-1)^(k-1) p(n - (3k^2-k)/2)

with k1 = floor((sqrt(24n+1)-1)/6), k2 = floor((sqrt(24n+1)+1)/6) and
p(0) = 1, filled bottom-up into a dense table. The bounds are computed
with integer square roots, so no term ever has a negative argument and
no float is involved anywhere.

A brute-force dynamic program over part sizes (count partitions with
parts <= k) serves as an independent oracle; it deliberately shares no
code with the recurrence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import isqrt

from mpmath import mp

from .errors import DomainError

TABLE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class PartitionTable:
    """Dense table of p(0..max_n). Immutable once built; safe to share."""

    max_n: int
    values: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if len(self.values) != self.max_n + 1:
            raise ValueError("table length must be max_n + 1")

    def p(self, n: int) -> int:
        """p(n); raises IndexError outside 0..max_n."""
        if not 0 <= n <= self.max_n:
            raise IndexError(f"n={n} outside table range 0..{self.max_n}")
        return self.values[n]


def pentagonal_bounds(n: int) -> tuple[int, int]:
    """(k1, k2) term counts of the recurrence at n, via exact isqrt."""
    s = isqrt(24 * n + 1)
    return (s - 1) // 6, (s + 1) // 6


def build_table(max_n: int) -> PartitionTable:
    """Fill p(0..max_n) bottom-up with the pentagonal recurrence."""
    if max_n < 0:
        raise ValueError(f"max_n must be >= 0, got {max_n}")
    values = [0] * (max_n + 1)
    values[0] = 1
    for n in range(1, max_n + 1):
        k1, k2 = pentagonal_bounds(n)
        total = 0
        for k in range(1, k1 + 1):
            term = values[n - (3 * k * k + k) // 2]
            total += -term if k % 2 == 0 else term
        for k in range(1, k2 + 1):
            term = values[n - (3 * k * k - k) // 2]
            total += -term if k % 2 == 0 else term
        values[n] = total
    return PartitionTable(max_n=max_n, values=tuple(values))


def p_exact(table: PartitionTable, n: int) -> int:
    """p(n) from a prebuilt table; IndexError outside its range."""
    return table.p(n)


def _oracle_counts(max_n: int) -> list[int]:
    # Count-by-largest-part DP: after processing part k, dp[j] is the
    # number of partitions of j into parts <= k.
    dp = [0] * (max_n + 1)
    dp[0] = 1
    for part in range(1, max_n + 1):
        for j in range(part, max_n + 1):
            dp[j] += dp[j - part]
    return dp


def p_oracle_dp(n: int) -> int:
    """p(n) by the quadratic count-by-largest-part dynamic program.

    Independent of the pentagonal recurrence; intended for n up to a few
    thousand.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return _oracle_counts(n)[n]


def p_oracle_prefix(max_n: int) -> list[int]:
    """All of p(0..max_n) from a single oracle DP pass."""
    if max_n < 0:
        raise ValueError(f"max_n must be >= 0, got {max_n}")
    return _oracle_counts(max_n)


def storage_bytes_estimate(estimator_value) -> int:
    """Bytes needed to store p(n), i.e. ceil((log2(estimate)+1)/8).

    Any positive estimate of p(n) will do; this is what a C program
    would use to size a buffer before computing the exact value.
    """
    with mp.workdps(50):
        value = mp.mpf(estimator_value)
        if value <= 0:
            raise DomainError(f"estimator value must be positive, got {estimator_value}")
        bits = mp.log(value, 2) + 1
        return int(mp.ceil(bits / 8))


def save_table_json(table: PartitionTable, path) -> None:
    """Write a lossless JSON image: header + values as decimal strings."""
    doc = {
        "format_version": TABLE_FORMAT_VERSION,
        "max_n": table.max_n,
        "values": [str(v) for v in table.values],
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(doc, fh)


def load_table_json(path) -> PartitionTable:
    """Read a table written by save_table_json."""
    with open(path, "r", encoding="ascii") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != TABLE_FORMAT_VERSION:
        raise ValueError(f"unsupported table format: {doc.get('format_version')!r}")
    values = tuple(int(v) for v in doc["values"])
    return PartitionTable(max_n=doc["max_n"], values=values)
