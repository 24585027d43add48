"""Ohmic bath discretization and influence-functional coefficients.

The bath is a finite set of harmonic modes ``(omega_j, c_j)``.  Its
autocorrelation is

    C(t) = sum_j c_j^2 / (2 omega_j) [coth(beta omega_j / 2) cos(omega_j t)
                                      - i sin(omega_j t)]

and the coefficients ``eta[j1, j2]`` are double integrals of ``C(t - t')``
over the time cells attached to grid points ``j1`` and ``j2``.  Grid point 0
owns the half cell ``[0, dt/2]``; every later point ``j`` owns the full cell
``[j dt - dt/2, j dt + dt/2]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
from scipy import integrate

__all__ = [
    "BathConfig",
    "BathMode",
    "EtaTable",
    "discretize_bath",
    "bath_correlation",
    "compute_eta",
    "eta_quadrature_oracle",
    "QuadratureError",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class BathConfig:
    """Parameters of the discretized Ohmic bath.

    Defaults are the validated setting ``xi=0.2, omega_c=2.5, omega_max=10,
    L=400, beta=5``.
    """

    xi: float = 0.2
    omega_c: float = 2.5
    omega_max: float = 10.0
    n_modes: int = 400
    beta: float = 5.0

    def __post_init__(self) -> None:
        if not self.xi >= 0:
            raise ValueError(f"xi must be >= 0, got {self.xi}")
        if not self.omega_c > 0:
            raise ValueError(f"omega_c must be > 0, got {self.omega_c}")
        if not self.omega_max > 0:
            raise ValueError(f"omega_max must be > 0, got {self.omega_max}")
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ValueError(f"n_modes must be a positive integer, got {self.n_modes}")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")


@dataclass(frozen=True)
class BathMode:
    omega: float
    c: float


def _coth(x: np.ndarray) -> np.ndarray:
    # 1 + 2/(e^{2x} - 1): no overflow for large x
    return 1.0 + 2.0 / np.expm1(2.0 * x)


def discretize_bath(cfg: BathConfig) -> List[BathMode]:
    """Logarithmic discretization of the Ohmic spectral density into ``L`` modes.

    ``omega_j = -omega_c ln(1 - (j/L)(1 - exp(-omega_max/omega_c)))`` and
    ``c_j = omega_j sqrt(xi omega_c / L (1 - exp(-omega_max/omega_c)))``.
    """
    L = int(cfg.n_modes)
    j = np.arange(1, L + 1, dtype=float)
    # 1 - exp(-x) via expm1 keeps precision for small omega_max/omega_c
    weight = -np.expm1(-cfg.omega_max / cfg.omega_c)
    omega = -cfg.omega_c * np.log1p(-(j / L) * weight)
    # the last mode sits exactly at the upper edge
    omega[-1] = cfg.omega_max
    c = omega * np.sqrt(cfg.xi * cfg.omega_c / L * weight)
    return [BathMode(float(w), float(cj)) for w, cj in zip(omega, c)]


def _mode_arrays(modes: Sequence[BathMode]):
    omega = np.array([m.omega for m in modes], dtype=float)
    c = np.array([m.c for m in modes], dtype=float)
    return omega, c


def bath_correlation(modes: Sequence[BathMode], beta: float, t: float) -> complex:
    """Bath autocorrelation ``C(t)`` of a discrete set of modes."""
    omega, c = _mode_arrays(modes)
    if omega.size == 0:
        return 0j
    amp = c**2 / (2.0 * omega)
    re = np.sum(amp * _coth(0.5 * beta * omega) * np.cos(omega * t))
    im = -np.sum(amp * np.sin(omega * t))
    return complex(re, im)


@dataclass(frozen=True)
class EtaTable:
    """Influence-functional coefficients indexed by lag.

    ``eta_initial[d]`` is ``eta[d, 0]`` (second point at the initial half
    cell) and ``eta_interior[d]`` is ``eta[j + d, j]`` for any ``j >= 1``.
    """

    dt: float
    max_lag: int
    eta_initial: np.ndarray = field(repr=False)
    eta_interior: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        for name in ("eta_initial", "eta_interior"):
            arr = getattr(self, name)
            if arr.shape != (self.max_lag + 1,):
                raise ValueError(f"{name} must have length max_lag + 1")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
            arr.setflags(write=False)

    def lookup(self, j1: int, j2: int) -> complex:
        if j2 < 0 or j1 < j2:
            raise IndexError(f"eta index ({j1}, {j2}) requires j1 >= j2 >= 0")
        lag = j1 - j2
        if lag > self.max_lag:
            raise IndexError(f"lag {lag} exceeds max_lag {self.max_lag}")
        if j2 == 0:
            return complex(self.eta_initial[j1])
        return complex(self.eta_interior[lag])


def _sinc(x: np.ndarray) -> np.ndarray:
    return np.sinc(x / np.pi)


def _ordered_cell_kernel(z: np.ndarray) -> np.ndarray:
    """``(e^z - 1 - z) / z^2`` for purely imaginary ``z``, stable near 0."""
    out = np.empty_like(z)
    small = np.abs(z) < 0.05
    zs = z[small]
    # Taylor series 1/2 + z/6 + z^2/24 + ... ; |z| < 0.05 needs 8 terms
    acc = np.zeros_like(zs)
    term = np.full_like(zs, 0.5)
    for n in range(2, 10):
        acc += term
        term = term * zs / (n + 1)
    out[small] = acc
    zl = z[~small]
    out[~small] = (np.expm1(zl) - zl) / zl**2
    return out


def compute_eta(modes: Sequence[BathMode], beta: float, dt: float, max_lag: int) -> EtaTable:
    """Closed-form cell integrals of the bath correlation, per mode.

    Each mode contributes ``p e^{i w tau} + q e^{-i w tau}`` to ``C(tau)`` with
    ``p, q = (a -+ b)/2``, ``a = c^2/(2w) coth(beta w/2)``, ``b = c^2/(2w)``.
    Integrals of the exponentials factorize over disjoint cells; the
    time-ordered integral within one cell of width ``w`` is
    ``w^2 (e^z - 1 - z)/z^2`` with ``z = -+ i omega w``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if int(max_lag) != max_lag or max_lag < 1:
        raise ValueError(f"max_lag must be an integer >= 1, got {max_lag}")
    max_lag = int(max_lag)
    omega, c = _mode_arrays(modes)
    eta_initial = np.zeros(max_lag + 1, dtype=complex)
    eta_interior = np.zeros(max_lag + 1, dtype=complex)
    if omega.size == 0 or not np.any(c):
        return EtaTable(dt, max_lag, eta_initial, eta_interior)

    b = c**2 / (2.0 * omega)
    a = b * _coth(0.5 * beta * omega)
    p = 0.5 * (a - b)
    q = 0.5 * (a + b)

    def diagonal(width: float) -> complex:
        z = -1j * omega * width
        k_minus = _ordered_cell_kernel(z)  # e^{-i w (t - t')}
        k_plus = np.conj(k_minus)
        return complex(width**2 * np.sum(p * k_plus + q * k_minus))

    def offdiag(separation: float, h1: float, h2: float) -> complex:
        amp = 4.0 * h1 * h2 * _sinc(omega * h1) * _sinc(omega * h2)
        phase = np.exp(1j * omega * separation)
        return complex(np.sum(amp * (p * phase + q * np.conj(phase))))

    half = 0.5 * dt
    eta_initial[0] = diagonal(half)
    eta_interior[0] = diagonal(dt)
    for d in range(1, max_lag + 1):
        eta_initial[d] = offdiag(d * dt - 0.25 * dt, half, 0.25 * dt)
        eta_interior[d] = offdiag(d * dt, half, half)
    return EtaTable(dt, max_lag, eta_initial, eta_interior)


def _cell(j: int, dt: float):
    if j == 0:
        return 0.0, 0.5 * dt
    return j * dt - 0.5 * dt, j * dt + 0.5 * dt


def eta_quadrature_oracle(
    modes: Sequence[BathMode],
    beta: float,
    dt: float,
    j1: int,
    j2: int,
    tol: float = 1e-12,
) -> complex:
    """``eta[j1, j2]`` by adaptive 2-D quadrature of :func:`bath_correlation`.

    Independent of :func:`compute_eta`; used only for validation.
    """
    if not (j1 >= j2 >= 0):
        raise ValueError(f"need j1 >= j2 >= 0, got ({j1}, {j2})")
    if not modes or all(m.c == 0 for m in modes):
        return 0j
    lo1, hi1 = _cell(j1, dt)
    lo2, hi2 = _cell(j2, dt)

    def part(fn):
        if j1 == j2:
            # t in the cell, t' from the cell start up to t
            val, err = integrate.dblquad(
                lambda tp, t: fn(bath_correlation(modes, beta, t - tp)),
                lo1, hi1, lambda t: lo1, lambda t: t,
                epsabs=tol * dt * dt, epsrel=tol,
            )
        else:
            val, err = integrate.dblquad(
                lambda tp, t: fn(bath_correlation(modes, beta, t - tp)),
                lo1, hi1, lo2, hi2,
                epsabs=tol * dt * dt, epsrel=tol,
            )
        if not np.isfinite(val) or err > max(1e3 * tol * abs(val), 1e-15):
            raise QuadratureError(
                f"eta[{j1},{j2}] quadrature did not converge (err={err:.3e})"
            )
        return val

    return complex(part(lambda z: z.real), part(lambda z: z.imag))
