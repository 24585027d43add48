"""Catalan numbers, Catalan's triangle, Dyck paths and kernel cost models.

Everything here is exact integer arithmetic.  These numbers serve as test
oracles for the kernel construction, so no floating point is allowed to leak
in except for :func:`catalan_asymptotic_ratio`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Tuple

__all__ = [
    "RIGHT",
    "UP",
    "DyckPath",
    "catalan",
    "catalan_triangle",
    "enumerate_dyck_paths",
    "area_cost",
    "s_total",
    "s_triangle",
    "smatpi_cost_estimate",
    "tsmatpi_cost_model",
    "tsmatpi_cost_closed_form",
    "catalan_asymptotic_ratio",
]

RIGHT = "R"
UP = "U"

MAX_CATALAN_N = 30
MAX_ENUMERATE_N = 14
MAX_S_K = 15
MAX_TSMATPI_DK = 25


def _check_range(name: str, value: int, lo: int, hi: int) -> None:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"{name} must be an int, got {type(value).__name__}")
    if value < lo or value > hi:
        raise ValueError(f"{name}={value} outside supported range [{lo}, {hi}]")


@dataclass(frozen=True)
class DyckPath:
    """Lattice path from (0, 0) to (n, n) built from unit Right/Up steps.

    Every prefix must contain at least as many Right steps as Up steps, so the
    path stays weakly below the diagonal ``y = x``.
    """

    steps: Tuple[str, ...]

    def __post_init__(self) -> None:
        height = 0
        for step in self.steps:
            if step == RIGHT:
                height += 1
            elif step == UP:
                height -= 1
            else:
                raise ValueError(f"invalid step {step!r}")
            if height < 0:
                raise ValueError("path crosses above the diagonal")
        if height != 0:
            raise ValueError("path does not end on the diagonal")

    @classmethod
    def from_string(cls, text: str) -> "DyckPath":
        return cls(tuple(text))

    @property
    def size(self) -> int:
        return len(self.steps) // 2

    def __str__(self) -> str:
        return "".join(self.steps)


def catalan(n: int) -> int:
    """Return the Catalan number ``C_n = (2n)! / ((n+1)! n!)``."""
    _check_range("n", n, 0, MAX_CATALAN_N)
    return math.comb(2 * n, n) // (n + 1)


def catalan_triangle(n: int, k: int) -> int:
    """Entry ``T(n, k) = binom(n+k, k) - binom(n+k, k-1)`` of Catalan's triangle."""
    _check_range("n", n, 0, MAX_CATALAN_N)
    _check_range("k", k, 0, n)
    lower = math.comb(n + k, k - 1) if k >= 1 else 0
    return math.comb(n + k, k) - lower


def _dyck_paths(n: int) -> Iterator[Tuple[str, ...]]:
    # Right < Up, so exploring Right first yields lexicographic order.
    steps: List[str] = []

    def walk(rights: int, ups: int) -> Iterator[Tuple[str, ...]]:
        if rights == n and ups == n:
            yield tuple(steps)
            return
        if rights < n:
            steps.append(RIGHT)
            yield from walk(rights + 1, ups)
            steps.pop()
        if ups < rights:
            steps.append(UP)
            yield from walk(rights, ups + 1)
            steps.pop()

    yield from walk(0, 0)


def enumerate_dyck_paths(n: int) -> List[DyckPath]:
    """All Dyck paths of size ``n`` in lexicographic order (Right before Up)."""
    _check_range("n", n, 0, MAX_ENUMERATE_N)
    return [DyckPath(p) for p in _dyck_paths(n)]


def area_cost(path: DyckPath) -> int:
    """Count unit squares and diagonal half-cells between ``path`` and ``y = x``.

    In the row between heights ``y`` and ``y + 1`` the path climbs at some
    abscissa ``x``; the row then holds ``x - y - 1`` full squares and one
    triangle above the path.
    """
    x = y = 0
    total = 0
    for step in path.steps:
        if step == RIGHT:
            x += 1
        else:
            total += x - y
            y += 1
    return total


@lru_cache(maxsize=None)
def _area_table(n: int) -> Tuple[int, int]:
    """(number of paths, summed area) over all Dyck paths of size ``n``.

    Dynamic programme over lattice points; the enumeration in
    :func:`enumerate_dyck_paths` is the brute-force check of this.
    """
    # state (x, y) -> (count, area accumulated so far)
    count = {(0, 0): 1}
    area = {(0, 0): 0}
    for _ in range(2 * n):
        new_count: dict = {}
        new_area: dict = {}
        for (x, y), c in count.items():
            a = area[(x, y)]
            if x < n:
                key = (x + 1, y)
                new_count[key] = new_count.get(key, 0) + c
                new_area[key] = new_area.get(key, 0) + a
            if y < x:
                key = (x, y + 1)
                new_count[key] = new_count.get(key, 0) + c
                new_area[key] = new_area.get(key, 0) + a + c * (x - y)
        count, area = new_count, new_area
    return count[(n, n)], area[(n, n)]


def s_total(k: int) -> int:
    """``S_k``: summed :func:`area_cost` over all Dyck paths of size ``k - 1``."""
    _check_range("k", k, 1, MAX_S_K)
    return _area_table(k - 1)[1]


@lru_cache(maxsize=None)
def _s_triangle(n: int, k: int) -> int:
    if k == n:
        return 0
    numerator = (n - k) ** 2 * math.comb(n - 1 + k, k)
    term, rem = divmod(numerator, n)
    if rem:
        raise ArithmeticError(f"S({n},{k}) increment is not an integer")
    return sum(_s_triangle(n - 1, j) for j in range(k + 1)) + term


def s_triangle(n: int, k: int) -> int:
    """Entry ``S(n, k)`` of the area triangle whose row ``n`` sums to ``S_{n+1}``.

    Defined by ``S(n, n) = 0`` and
    ``S(n, k) = sum_{j<=k} S(n-1, j) + (n-k)^2/n * binom(n-1+k, k)``.
    """
    _check_range("n", n, 0, MAX_CATALAN_N)
    _check_range("k", k, 0, n)
    return _s_triangle(n, k)


def smatpi_cost_estimate(dk: int) -> int:
    """Operation-count estimate ``sum_k 4^(k+1) S_k`` for naive kernel summation."""
    _check_range("dk", dk, 1, MAX_S_K)
    return sum(4 ** (k + 1) * s_total(k) for k in range(1, dk + 1))


def tsmatpi_cost_closed_form(dk: int) -> int:
    """``(4/27) ((9 dk^2 - 6 dk + 5) 4^dk - 5)`` evaluated exactly."""
    _check_range("dk", dk, 0, MAX_TSMATPI_DK)
    value, rem = divmod(4 * ((9 * dk * dk - 6 * dk + 5) * 4**dk - 5), 27)
    if rem:
        raise ArithmeticError(f"closed form not integral at dk={dk}")
    return value


def tsmatpi_cost_model(dk: int) -> int:
    """Tree-traversal work ``sum_{k=0}^{dk} k^2 4^k``.

    The direct sum is checked against :func:`tsmatpi_cost_closed_form` on
    every call.
    """
    _check_range("dk", dk, 0, MAX_TSMATPI_DK)
    direct = sum(k * k * 4**k for k in range(dk + 1))
    closed = tsmatpi_cost_closed_form(dk)
    if direct != closed:
        raise ArithmeticError(f"cost model mismatch at dk={dk}: {direct} != {closed}")
    return direct


def catalan_asymptotic_ratio(n: int) -> float:
    """``C_n / (4^n / (sqrt(pi) n^(3/2)))``, tending to 1 for large ``n``."""
    _check_range("n", n, 1, MAX_CATALAN_N)
    return catalan(n) * math.sqrt(math.pi) * n**1.5 / 4.0**n
