"""Exact partition table: recurrence, oracle, bounds, serialization."""

import pytest

from partnum import (
    DomainError,
    build_table,
    load_table_json,
    p_exact,
    p_oracle_dp,
    p_oracle_prefix,
    save_table_json,
    storage_bytes_estimate,
)
from partnum.exact import pentagonal_bounds

KNOWN_PREFIX = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


def test_build_table_zero():
    assert build_table(0).values == (1,)


def test_build_table_small_prefix():
    assert list(build_table(10).values) == KNOWN_PREFIX


def test_known_large_values(table10000):
    assert table10000.p(100) == 190569292
    assert table10000.p(200) == 3972999029388
    assert table10000.p(1000) == 24061467864032622473692149727991


def test_negative_max_n_rejected():
    with pytest.raises(ValueError):
        build_table(-1)


def test_p_exact_and_bounds():
    table = build_table(10)
    assert p_exact(table, 10) == 42
    assert p_exact(table, 0) == 1
    with pytest.raises(IndexError):
        p_exact(table, 11)
    with pytest.raises(IndexError):
        p_exact(table, -1)


def test_oracle_small_values():
    assert p_oracle_dp(0) == 1
    assert p_oracle_dp(4) == 5  # 4, 3+1, 2+2, 2+1+1, 1+1+1+1
    assert p_oracle_dp(100) == 190569292


def test_oracle_matches_recurrence(table500):
    prefix = p_oracle_prefix(500)
    assert [table500.p(n) for n in range(501)] == prefix


def test_strictly_increasing(table500):
    values = table500.values
    assert all(values[n + 1] > values[n] for n in range(1, 500))


def test_rebuild_deterministic():
    assert build_table(300).values == build_table(300).values


def test_prefix_stability():
    small = build_table(60)
    large = build_table(200)
    assert small.values == large.values[:61]


def test_pentagonal_bounds_perfect_square_edges():
    # 24n+1 a perfect square happens at generalized pentagonal n;
    # exact isqrt must not flip the term count there.
    for n in (1, 2, 5, 7, 12, 15, 22, 26, 10000):
        k1, k2 = pentagonal_bounds(n)
        assert (3 * k1 * k1 + k1) // 2 <= n < (3 * (k1 + 1) ** 2 + (k1 + 1)) // 2
        assert (3 * k2 * k2 - k2) // 2 <= n < (3 * (k2 + 1) ** 2 - (k2 + 1)) // 2


def test_storage_bytes():
    assert storage_bytes_estimate(1) == 1
    assert storage_bytes_estimate(190569292) == 4
    with pytest.raises(DomainError):
        storage_bytes_estimate(0)
    with pytest.raises(DomainError):
        storage_bytes_estimate(-3)


def test_table_json_round_trip(tmp_path):
    table = build_table(300)
    path = tmp_path / "table.json"
    save_table_json(table, path)
    loaded = load_table_json(path)
    assert loaded.max_n == table.max_n
    assert loaded.values == table.values


def test_table_json_version_check(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"format_version": 99, "max_n": 0, "values": ["1"]}')
    with pytest.raises(ValueError):
        load_table_json(path)
