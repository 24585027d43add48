"""Memory-kernel matrices by per-path recurrence over an implicit quadtree.

Two kernel families are built, both as lists of 4x4 matrices indexed
``[later pair, earlier pair]``:

``m_col0[k-1]``
    ``M^(k,0)``, kernels that reach back to the initial time point
    (whose coefficients carry the half-cell ``eta_initial`` column).
``m_col1[k-1]``
    ``M^(k+1,1)``, the translation-invariant kernels used for every later
    time offset.

For a path ``sigma_0 .. sigma_k`` the kernel integrand is split by the
position ``j`` of the last ``(F - 1)`` box in its final column,

    kernel term = sum_j (F(k, j) - 1) S_k[j],

and the partial sums ``S`` obey a first-order recurrence in ``k``
(:func:`advance_frame`).  Walking all paths depth-first, one frame per depth,
gives the kernels in ``O(dk 4^dk)`` time and ``O(dk^2)`` memory.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bath import EtaTable
from .influence import (
    PAIR_STATES,
    PairState,
    a_initial,
    a_interior,
    f_factor,
    f_minus_one,
    f_table,
    fm1_table,
    a_initial_matrix,
    a_interior_matrix,
)

__all__ = [
    "Family",
    "KernelSet",
    "TraversalFrame",
    "TraversalStats",
    "MAX_DK",
    "root_frame",
    "advance_frame",
    "frame_contribution",
    "compute_kernels",
    "compute_kernels_reference",
    "traverse_single_root",
    "symbolic_term_counts",
    "tree_node_count",
    "frame_scalar_capacity",
    "reference_frame_capacity",
]

MAX_DK = 14


class Family(str, enum.Enum):
    COL0 = "col0"
    COL1 = "col1"


@dataclass
class TraversalStats:
    node_visits: Dict[str, int] = field(default_factory=dict)
    peak_live_scalars: int = 0


@dataclass
class KernelSet:
    dk: int
    m_col0: np.ndarray
    m_col1: np.ndarray
    stats: Optional[TraversalStats] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        shape = (self.dk, 4, 4)
        if self.m_col0.shape != shape or self.m_col1.shape != shape:
            raise ValueError(f"kernel arrays must have shape {shape}")

    def col0(self, k: int) -> np.ndarray:
        """``M^(k,0)`` for ``1 <= k <= dk``."""
        return self.m_col0[k - 1]

    def col1(self, k: int) -> np.ndarray:
        """``M^(k+1,1)`` for ``1 <= k <= dk``."""
        return self.m_col1[k - 1]


def tree_node_count(dk: int) -> int:
    """Nodes visited per family: four roots, ``4^k`` nodes on level ``k``."""
    return sum(4 ** (k + 1) for k in range(1, dk + 1))


def frame_scalar_capacity(dk: int) -> int:
    """Peak scalars held by the compiled traversal's frames.

    Internal depth ``k`` keeps ``k`` shared prefix values plus one scale;
    leaves keep nothing.
    """
    return (dk - 1) * (dk + 2) // 2


def reference_frame_capacity(dk: int) -> int:
    """Peak scalars held by :func:`compute_kernels_reference` frames."""
    return 1 + dk * (dk - 1) // 2


# -- per-path factor algebra ---------------------------------------------------

class _NumericFactors:
    """Factors along one concrete path, in family-local time indices.

    Local index 0 is the first path point.  For ``COL1`` every coefficient is
    an interior one; for ``COL0`` pairs ending on point 0 use ``eta_initial``.
    """

    zero = 0j

    def __init__(self, path: Sequence[PairState], eta: EtaTable, k_mat: np.ndarray, family: Family):
        self.path = path
        self.eta = eta
        self.k_mat = k_mat
        self.family = Family(family)

    def _eta(self, i: int, j: int) -> complex:
        lag = i - j
        if lag > self.eta.max_lag:
            raise IndexError(f"lag {lag} out of EtaTable range (max_lag={self.eta.max_lag})")
        if j == 0 and self.family is Family.COL0:
            return self.eta.eta_initial[lag]
        return self.eta.eta_interior[lag]

    def f(self, i: int, j: int) -> complex:
        return f_factor(self.path[i], self.path[j], self._eta(i, j))

    def d(self, i: int, j: int) -> complex:
        return f_minus_one(self.path[i], self.path[j], self._eta(i, j))

    def a(self, i: int) -> complex:
        return a_interior(self.path[i], self.path[i - 1], self.eta, self.k_mat)

    def root(self) -> complex:
        if self.family is Family.COL0:
            return a_initial(self.path[1], self.path[0], self.eta, self.k_mat)
        return a_interior(self.path[1], self.path[0], self.eta, self.k_mat)


@dataclass(frozen=True)
class TraversalFrame:
    """State of one tree node.

    ``scalars`` holds the split partial sums ``S_k[0..k-2]`` for depth
    ``k >= 2``; a depth-1 node holds the single first-step value.
    """

    depth: int
    path: Tuple[PairState, ...]
    scalars: tuple

    def __post_init__(self) -> None:
        if len(self.path) != self.depth + 1:
            raise ValueError("path length must equal depth + 1")
        if len(self.scalars) != max(self.depth - 1, 1):
            raise ValueError("wrong number of scalars for depth")


def _advance_scalars(parent: Sequence, p: int, fac) -> list:
    """Child partial sums at depth ``p + 1`` from the parent's at depth ``p``.

    ``S_{p+1}[n] = (sum_{j<n} (F(p,j)-1) S_p[j] + F(p,n) S_p[n])
                   * A(p+1) * prod_{l=n+1}^{p-1} F(p+1, l)``
    with ``S_p[p-1] = 0``.  Prefix sums and suffix products are shared.
    """
    k = p + 1
    if p == 1:
        return [parent[0] * fac.a(2)]
    suffix = [None] * p
    suffix[p - 1] = None  # empty product
    for n in range(p - 2, -1, -1):
        fk = fac.f(k, n + 1)
        suffix[n] = fk if suffix[n + 1] is None else suffix[n + 1] * fk
    a = fac.a(k)
    prefix = fac.zero
    child = []
    for n in range(p):
        if n < p - 1:
            base = prefix + fac.f(p, n) * parent[n]
            prefix = prefix + fac.d(p, n) * parent[n]
        else:
            base = prefix
        val = base * a
        if suffix[n] is not None:
            val = val * suffix[n]
        child.append(val)
    return child


def root_frame(sigma0: PairState, sigma1: PairState, eta: EtaTable, k_mat: np.ndarray,
               family: Family = Family.COL0) -> TraversalFrame:
    fac = _NumericFactors((sigma0, sigma1), eta, k_mat, family)
    return TraversalFrame(1, (sigma0, sigma1), (fac.root(),))


def advance_frame(parent: TraversalFrame, sigma_next: PairState, eta: EtaTable,
                  k_mat: np.ndarray, family: Family = Family.COL0) -> TraversalFrame:
    """Extend ``parent`` by one pair state and apply the partial-sum recurrence."""
    path = parent.path + (sigma_next,)
    fac = _NumericFactors(path, eta, k_mat, family)
    scalars = _advance_scalars(parent.scalars, parent.depth, fac)
    return TraversalFrame(parent.depth + 1, path, tuple(scalars))


def frame_contribution(frame: TraversalFrame, eta: EtaTable, k_mat: np.ndarray,
                       family: Family = Family.COL0) -> complex:
    """This path's term of the depth-``k`` kernel, ``sum_j (F(k,j)-1) S_k[j]``."""
    if frame.depth == 1:
        return frame.scalars[0]
    fac = _NumericFactors(frame.path, eta, k_mat, family)
    k = frame.depth
    return sum(fac.d(k, j) * s for j, s in enumerate(frame.scalars))


def _check_dk(dk: int, eta: EtaTable, max_dk: int) -> None:
    if int(dk) != dk or dk < 1:
        raise ValueError(f"dk must be a positive integer, got {dk}")
    if dk > max_dk:
        raise ValueError(f"dk={dk} exceeds the resource cap {max_dk}")
    if eta.max_lag < dk:
        raise IndexError(f"EtaTable max_lag={eta.max_lag} too short for dk={dk}")


def compute_kernels_reference(eta: EtaTable, k_mat: np.ndarray, dk: int,
                              max_dk: int = 7) -> KernelSet:
    """Pure-Python depth-first traversal built from :func:`advance_frame`.

    Slow; kept as a readable cross-check of the compiled traversal.  The
    stats record the live-scalar peak measured on the frame stack.
    """
    _check_dk(dk, eta, max_dk)
    stats = TraversalStats()
    out = {Family.COL0: np.zeros((dk, 4, 4), complex), Family.COL1: np.zeros((dk, 4, 4), complex)}
    for family in (Family.COL0, Family.COL1):
        visits = 0
        live = 0

        def visit(frame: TraversalFrame) -> None:
            nonlocal visits, live
            visits += 1
            live += len(frame.scalars)
            stats.peak_live_scalars = max(stats.peak_live_scalars, live)
            k = frame.depth
            term = frame_contribution(frame, eta, k_mat, family)
            out[family][k - 1, frame.path[-1].index, frame.path[0].index] += term
            if k < dk:
                for s in PAIR_STATES:
                    visit(advance_frame(frame, s, eta, k_mat, family))
            live -= len(frame.scalars)

        for s0 in PAIR_STATES:
            for s1 in PAIR_STATES:
                visit(root_frame(s0, s1, eta, k_mat, family))
        stats.node_visits[family.value] = visits
    return KernelSet(dk, out[Family.COL0], out[Family.COL1], stats)


def _lag_tables(values: np.ndarray, dk: int):
    f = np.stack([f_table(values[lag]) for lag in range(dk + 1)])
    d = np.stack([fm1_table(values[lag]) for lag in range(dk + 1)])
    return np.ascontiguousarray(f), np.ascontiguousarray(d)


def _traversal_setups(eta: EtaTable, k_mat: np.ndarray, dk: int):
    f_int, d_int = _lag_tables(eta.eta_interior, dk)
    f_ini, d_ini = _lag_tables(eta.eta_initial, dk)
    a_tab = a_interior_matrix(eta, k_mat)
    roots = {
        Family.COL0: (a_initial_matrix(eta, k_mat), f_ini, d_ini),
        Family.COL1: (a_tab, f_int, d_int),
    }
    return a_tab, f_int, d_int, roots


def traverse_single_root(eta: EtaTable, k_mat: np.ndarray, dk: int, family: Family,
                         root: int, max_dk: int = MAX_DK) -> Tuple[np.ndarray, int, int]:
    """One root subtree of one family: ``(partial kernels, node visits, peak scalars)``.

    Useful for instrumenting large ``dk`` without paying for all eight subtrees.
    """
    from ._traversal import traverse_root

    _check_dk(dk, eta, max_dk)
    if root not in range(4):
        raise ValueError(f"root must be a pair-state index 0..3, got {root}")
    dk = int(dk)
    a_tab, f_int, d_int, roots = _traversal_setups(eta, k_mat, dk)
    root_tab, f0, d0 = roots[Family(family)]
    out = np.zeros((dk, 4, 4), dtype=np.complex128)
    counters = np.zeros(2, dtype=np.int64)
    traverse_root(root, dk, root_tab, a_tab, f0, d0, f_int, d_int, out, counters)
    return out, int(counters[0]), int(counters[1])


def compute_kernels(eta: EtaTable, k_mat: np.ndarray, dk: int, threads: int = 1,
                    max_dk: int = MAX_DK) -> KernelSet:
    """Build ``M^(k,0)`` and ``M^(k+1,1)`` for ``k = 1..dk`` by tree traversal.

    Each family is walked as four independent root subtrees.  Partial kernels
    are merged in fixed root order, so ``threads > 1`` reproduces the
    single-threaded result bit for bit.
    """
    from ._traversal import traverse_root

    _check_dk(dk, eta, max_dk)
    dk = int(dk)
    a_tab, f_int, d_int, setups = _traversal_setups(eta, k_mat, dk)
    jobs = [(fam, root) for fam in (Family.COL0, Family.COL1) for root in range(4)]
    partial = {job: np.zeros((dk, 4, 4), dtype=np.complex128) for job in jobs}
    counters = {job: np.zeros(2, dtype=np.int64) for job in jobs}

    def run(job):
        fam, root = job
        root_tab, f0, d0 = setups[fam]
        traverse_root(root, dk, root_tab, a_tab, f0, d0, f_int, d_int, partial[job], counters[job])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, jobs))
    else:
        for job in jobs:
            run(job)

    stats = TraversalStats()
    result = {}
    for fam in (Family.COL0, Family.COL1):
        acc = np.zeros((dk, 4, 4), dtype=np.complex128)
        for root in range(4):
            acc += partial[(fam, root)]
        result[fam] = acc
        stats.node_visits[fam.value] = int(sum(counters[(fam, r)][0] for r in range(4)))
        stats.peak_live_scalars = max(
            stats.peak_live_scalars, *(int(counters[(fam, r)][1]) for r in range(4))
        )
    return KernelSet(dk, result[Family.COL0], result[Family.COL1], stats)


# -- symbolic expansion --------------------------------------------------------

class _Poly:
    """Sum of distinct products of named factors with integer coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[frozenset, int]] = None):
        self.terms = terms or {}

    @classmethod
    def symbol(cls, name) -> "_Poly":
        return cls({frozenset([name]): 1})

    def __add__(self, other: "_Poly") -> "_Poly":
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, 0) + c
            if out[mono] == 0:
                del out[mono]
        return _Poly(out)

    def __mul__(self, other: "_Poly") -> "_Poly":
        out: Dict[frozenset, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                if m1 & m2:
                    raise ArithmeticError(f"factor repeated in product: {set(m1 & m2)}")
                mono = m1 | m2
                out[mono] = out.get(mono, 0) + c1 * c2
        return _Poly({m: c for m, c in out.items() if c})

    def __len__(self) -> int:
        return len(self.terms)


class _SymbolicFactors:
    zero = _Poly()

    def f(self, i, j):
        return _Poly.symbol(("F", i, j))

    def d(self, i, j):
        return _Poly.symbol(("F-1", i, j))

    def a(self, i):
        return _Poly.symbol(("A", i))

    def root(self):
        return _Poly.symbol(("A", 1))


def symbolic_term_counts(k_max: int) -> Dict[int, Tuple[int, List[int]]]:
    """Run the partial-sum recurrence over an abstract factor algebra.

    Returns ``{k: (terms in the depth-k kernel integrand, terms per S_k[j])}``
    for ``2 <= k <= k_max``.  Factors ``F`` and ``F - 1`` are kept as distinct
    symbols so every diagram is a distinct product.
    """
    fac = _SymbolicFactors()
    scalars = [fac.root()]
    out = {}
    for k in range(2, k_max + 1):
        scalars = _advance_scalars(scalars, k - 1, fac)
        total = _Poly()
        for j, s in enumerate(scalars):
            total = total + fac.d(k, j) * s
        out[k] = (len(total), [len(s) for s in scalars])
    return out
