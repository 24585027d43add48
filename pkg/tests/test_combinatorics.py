import math

import pytest
from hypothesis import given, strategies as st

from tsmatpi import combinatorics as cb
from tsmatpi.combinatorics import DyckPath


@pytest.mark.parametrize("n, expected", [(0, 1), (3, 5), (4, 14), (8, 1430)])
def test_catalan_values(n, expected):
    assert cb.catalan(n) == expected


@pytest.mark.parametrize("n", [-1, 31])
def test_catalan_range(n):
    with pytest.raises(ValueError):
        cb.catalan(n)


def test_catalan_triangle_values():
    assert cb.catalan_triangle(4, 2) == 9
    assert cb.catalan_triangle(3, 3) == cb.catalan(3) == 5
    for n in range(13):
        assert cb.catalan_triangle(n, 0) == 1
        assert cb.catalan_triangle(n, n) == cb.catalan(n)


def test_catalan_triangle_rejects_k_above_n():
    with pytest.raises(ValueError):
        cb.catalan_triangle(3, 4)


def test_triangle_row_recurrences():
    # partial sums start at column 0
    for n in range(13):
        for k in range(n + 2):
            assert cb.catalan_triangle(n + 1, k) == sum(cb.catalan_triangle(n, j) for j in range(min(k, n) + 1))
        assert cb.catalan(n + 1) == sum(cb.catalan_triangle(n, j) for j in range(n + 1))


@pytest.mark.parametrize("n", range(13))
def test_enumeration_counts(n):
    paths = cb.enumerate_dyck_paths(n)
    assert len(paths) == cb.catalan(n)
    assert len({p.steps for p in paths}) == len(paths)


def test_enumeration_order_and_small_cases():
    assert [str(p) for p in cb.enumerate_dyck_paths(3)] == ["RRRUUU", "RRURUU", "RRUURU", "RURRUU", "RURURU"]
    assert [p.steps for p in cb.enumerate_dyck_paths(0)] == [()]
    paths = [str(p) for p in cb.enumerate_dyck_paths(6)]
    assert paths == sorted(paths)  # 'R' < 'U'


@pytest.mark.parametrize("bad", ["U", "RUU", "URRU", "RRU", "RX"])
def test_dyck_path_validation(bad):
    with pytest.raises(ValueError):
        DyckPath.from_string(bad)


@pytest.mark.parametrize("text, cost", [("RRRUUU", 6), ("RURURU", 3), ("RU", 1), ("", 0)])
def test_area_cost_examples(text, cost):
    assert cb.area_cost(DyckPath.from_string(text)) == cost


def test_area_cost_figure_sum():
    assert sorted(cb.area_cost(p) for p in cb.enumerate_dyck_paths(3)) == [3, 4, 4, 5, 6]


@given(st.integers(min_value=1, max_value=9), st.data())
def test_area_cost_bounds(n, data):
    paths = cb.enumerate_dyck_paths(n)
    p = paths[data.draw(st.integers(0, len(paths) - 1))]
    assert n <= cb.area_cost(p) <= n * (n + 1) // 2


@pytest.mark.parametrize("k, expected", [(1, 0), (2, 1), (3, 5), (4, 22), (5, 93), (9, 26333)])
def test_s_total_values(k, expected):
    assert cb.s_total(k) == expected


@pytest.mark.parametrize("k", range(1, 12))
def test_s_total_matches_enumeration(k):
    assert cb.s_total(k) == sum(cb.area_cost(p) for p in cb.enumerate_dyck_paths(k - 1))


def test_s_triangle_values():
    assert cb.s_triangle(3, 1) == 9
    assert cb.s_triangle(4, 2) == 32
    assert cb.s_triangle(5, 5) == 0
    for n in range(13):
        assert cb.s_triangle(n, 0) == n * (n + 1) // 2
        assert sum(cb.s_triangle(n, k) for k in range(n + 1)) == cb.s_total(n + 1)


def test_cost_estimates():
    assert cb.smatpi_cost_estimate(1) == 0
    assert cb.smatpi_cost_estimate(2) == 64
    assert cb.smatpi_cost_estimate(4) - cb.smatpi_cost_estimate(3) == 2**10 * 22
    assert [cb.tsmatpi_cost_model(d) for d in (0, 1, 3)] == [0, 4, 644]
    for dk in range(21):
        assert cb.tsmatpi_cost_model(dk) == cb.tsmatpi_cost_closed_form(dk)
        assert cb.tsmatpi_cost_closed_form(dk) == sum(k * k * 4**k for k in range(dk + 1))


def test_asymptotic_ratio():
    assert abs(cb.catalan_asymptotic_ratio(25) - 1) < 0.1
    assert math.isclose(cb.catalan_asymptotic_ratio(25), 0.9567, abs_tol=1e-3)
