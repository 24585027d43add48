"""Brute-force references for the kernel construction and the dynamics.

Nothing here goes through the tree traversal.  Path sums are carried out on
a dense tensor with one axis per time point, so their cost grows as
``4^(N+1)`` and they are capped at desk-scale sizes.
"""
from __future__ import annotations

import itertools

import numpy as np

from .bath import EtaTable
from .dynamics import DensitySeries, unvectorize_density, vectorize_density
from .influence import PAIR_STATES, a_initial, a_interior, f_factor, f_table, g_matrix
from .kernels import KernelSet

__all__ = [
    "MAX_PATH_STEPS",
    "MAX_ORACLE_DK",
    "full_path_propagator",
    "deconvolve_kernels",
    "explicit_kernel",
    "iquapi_evolve",
]

MAX_PATH_STEPS = 10
MAX_ORACLE_DK = 8


def _broadcast(table: np.ndarray, ndim: int, ax_late: int, ax_early: int) -> np.ndarray:
    """Place a 4x4 ``[late, early]`` table on two axes of an ``ndim`` tensor."""
    shape = [1] * ndim
    if ax_late == ax_early:
        shape[ax_late] = 4
        return np.diagonal(table).reshape(shape)
    shape[ax_late] = 4
    shape[ax_early] = 4
    if ax_late < ax_early:
        return table.reshape(shape)
    return table.T.reshape(shape)


def _path_weights(eta: EtaTable, k_mat: np.ndarray, n_steps: int, shifted: bool) -> np.ndarray:
    ndim = n_steps + 1
    w = np.ones((4,) * ndim, dtype=complex)
    g = g_matrix(k_mat)
    for j in range(1, ndim):
        w = w * _broadcast(g, ndim, j, j - 1)
    for j1 in range(ndim):
        for j2 in range(j1 + 1):
            if shifted and j1 == 0:
                continue  # F at the window's first point belongs to the previous step
            if j2 == 0 and not shifted:
                coeff = eta.eta_initial[j1]
            else:
                coeff = eta.eta_interior[j1 - j2]
            w = w * _broadcast(f_table(coeff), ndim, j1, j2)
    return w


def full_path_propagator(eta: EtaTable, k_mat: np.ndarray, n_steps: int,
                         shifted: bool = False) -> np.ndarray:
    """``U^(N,0)[s_N, s_0]`` by explicit summation over all interior paths.

    With ``shifted=True`` the window starts at an interior time point: every
    coefficient is an interior one and the first point's self-interaction is
    left out, which is the propagator whose kernels are ``M^(k+1,1)``.
    """
    if not 1 <= n_steps <= MAX_PATH_STEPS:
        raise ValueError(f"n_steps={n_steps} outside [1, {MAX_PATH_STEPS}]")
    if eta.max_lag < n_steps:
        raise IndexError(f"EtaTable max_lag={eta.max_lag} too short for {n_steps} steps")
    w = _path_weights(eta, k_mat, n_steps, shifted)
    if n_steps > 1:
        w = w.sum(axis=tuple(range(1, n_steps)))
    return np.ascontiguousarray(w.T)


def deconvolve_kernels(eta: EtaTable, k_mat: np.ndarray, dk: int) -> KernelSet:
    """Kernels recovered from full path sums by inverting the convolution.

    ``M^(s+1,1) = V^(s) - sum_{m<s} M^(s-m+1,1) V^(m)`` on the shifted
    window, then ``M^(r,0) = U^(r,0) - sum_{m<r} M^(r-m+1,1) U^(m,0)``.
    """
    if not 1 <= dk <= MAX_ORACLE_DK:
        raise ValueError(f"dk={dk} outside [1, {MAX_ORACLE_DK}]")
    u = [full_path_propagator(eta, k_mat, r) for r in range(1, dk + 1)]
    v = [full_path_propagator(eta, k_mat, s, shifted=True) for s in range(1, dk + 1)]
    col1 = np.zeros((dk, 4, 4), dtype=complex)
    col0 = np.zeros((dk, 4, 4), dtype=complex)
    for s in range(1, dk + 1):
        acc = v[s - 1].copy()
        for m in range(1, s):
            acc -= col1[s - m - 1] @ v[m - 1]
        col1[s - 1] = acc
    for r in range(1, dk + 1):
        acc = u[r - 1].copy()
        for m in range(1, r):
            acc -= col1[r - m - 1] @ u[m - 1]
        col0[r - 1] = acc
    return KernelSet(dk, col0, col1)


def explicit_kernel(eta: EtaTable, k_mat: np.ndarray, k: int) -> np.ndarray:
    """``M^(2,0)`` or ``M^(3,0)`` transcribed term by term.

    ``M^(2,0) = sum_1 (F20 - 1) A21 A10``
    ``M^(3,0) = sum_{1,2} [(F30 - 1) F20 F31 + (F31 - 1)(F20 - 1)] A32 A21 A10``
    """
    if k not in (2, 3):
        raise ValueError(f"explicit kernel only available for k in (2, 3), got {k}")

    def F(path, i, j):
        coeff = eta.eta_initial[i] if j == 0 else eta.eta_interior[i - j]
        return f_factor(path[i], path[j], coeff)

    out = np.zeros((4, 4), dtype=complex)
    for path in itertools.product(PAIR_STATES, repeat=k + 1):
        chain = a_initial(path[1], path[0], eta, k_mat)
        for i in range(2, k + 1):
            chain *= a_interior(path[i], path[i - 1], eta, k_mat)
        if k == 2:
            bracket = F(path, 2, 0) - 1
        else:
            bracket = ((F(path, 3, 0) - 1) * F(path, 2, 0) * F(path, 3, 1)
                       + (F(path, 3, 1) - 1) * (F(path, 2, 0) - 1))
        out[path[-1].index, path[0].index] += bracket * chain
    return out


def iquapi_evolve(eta: EtaTable, k_mat: np.ndarray, dk: int, rho0: np.ndarray,
                  n_steps: int) -> DensitySeries:
    """Iterative path propagation with influence memory truncated at ``dk`` lags.

    The augmented tensor keeps one axis per pair state in the last ``dk``
    time points.  Each step multiplies in the bare propagation weight and
    every influence factor linking the new point to the window (lag ``<= dk``),
    then sums out the point that leaves the window.
    """
    if not 1 <= dk <= MAX_ORACLE_DK:
        raise ValueError(f"dk={dk} outside [1, {MAX_ORACLE_DK}] (tensor has 4^dk entries)")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if eta.max_lag < dk:
        raise IndexError(f"EtaTable max_lag={eta.max_lag} too short for dk={dk}")
    g = g_matrix(k_mat)
    vec0 = vectorize_density(rho0)
    tensor = vec0 * np.diagonal(f_table(eta.eta_initial[0]))
    window = [0]  # time indices of the tensor axes, oldest first
    rhos = [np.asarray(rho0, dtype=complex)]
    for j in range(1, n_steps + 1):
        ndim = len(window) + 1
        factor = _broadcast(g, ndim, ndim - 1, ndim - 2)
        factor = factor * _broadcast(f_table(eta.eta_interior[0]), ndim, ndim - 1, ndim - 1)
        for ax, i in enumerate(window):
            coeff = eta.eta_initial[j] if i == 0 else eta.eta_interior[j - i]
            factor = factor * _broadcast(f_table(coeff), ndim, ndim - 1, ax)
        tensor = tensor[..., None] * factor
        window.append(j)
        if len(window) > dk:
            tensor = tensor.sum(axis=0)
            window.pop(0)
        vec = tensor.reshape(-1, 4).sum(axis=0)
        rhos.append(unvectorize_density(vec))
    return DensitySeries(eta.dt, np.array(rhos))
