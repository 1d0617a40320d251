"""Closed-form mode-by-mode ground truth for ultrastatic families.

For ``h_t = h_0`` and constant-in-time potential the slab operator separates,
``K = -d_s^2 + a`` with ``a = -Delta_{h_0} + V + m^2``, and everything is a
function of ``eps = a^{1/2}``.  Matrix functions are taken through the
``W_S``-orthonormal eigendecomposition of the discrete ``a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from calderon_states.calderon import CalderonPair
from calderon_states.discretize import DiscreteDomain, fourier_derivative_matrix
from calderon_states.errors import OracleDomainError
from calderon_states.geometry import MetricFamily, circle_grid, trig_eval


@dataclass(frozen=True)
class ModeSpectrum:
    """``a phi_k = eps_k^2 phi_k`` with ``phi_k`` orthonormal for ``diag(weights)``."""

    eigenvalues: np.ndarray
    modes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    operator: np.ndarray = field(repr=False)

    @property
    def eps(self) -> np.ndarray:
        return self.eigenvalues

    def analysis(self) -> np.ndarray:
        """Left inverse of ``modes``: modal coefficients of a grid function."""
        return self.modes.conj().T * self.weights[None, :]

    def function_of(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Grid matrix of ``fn(eps)``."""
        return (self.modes * fn(self.eigenvalues)[None, :]) @ self.analysis()

    def residual(self) -> float:
        lhs = self.operator @ self.modes
        return float(np.max(np.abs(lhs - self.modes * self.eigenvalues[None, :] ** 2)))

    def orthonormality_defect(self) -> float:
        G = self.modes.conj().T @ (self.weights[:, None] * self.modes)
        return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def spatial_operator(h0, V, N: int, m2: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Discrete ``a = -Delta_{h_0} + V + m^2`` and its quadrature weights on ``N`` points."""
    y = circle_grid(N)
    h = trig_eval(tuple(h0), y)
    if np.any(h <= 0):
        raise OracleDomainError("h0 must be positive on the grid")
    g = 1.0 / np.sqrt(h)
    D = fourier_derivative_matrix(N)
    a = -(g[:, None] * D) @ (g[:, None] * D) + np.diag(trig_eval(tuple(V), y) + m2)
    return a, (2.0 * np.pi / N) * np.sqrt(h)


def mode_spectrum(h0=(1.0,), V=(), N: int = 16, m2: float = 1.0) -> ModeSpectrum:
    """Eigen-decomposition of the circle operator; raises if any ``eps^2 <= 0``."""
    a, w = spatial_operator(h0, V, N, m2)
    r = np.sqrt(w)
    sym = r[:, None] * a / r[None, :]
    sym = 0.5 * (sym + sym.conj().T)
    lam, U = np.linalg.eigh(sym)
    if lam[0] <= 0:
        raise OracleDomainError(f"spatial operator is not positive (smallest eigenvalue {lam[0]:.3e})")
    return ModeSpectrum(np.sqrt(lam), U / r[:, None], w, a)


def spectrum_for(family: MetricFamily, N: int) -> ModeSpectrum:
    if family.kind.value != "ultrastatic":
        raise OracleDomainError(f"closed forms need an ultrastatic family, got {family.kind.value}")
    return mode_spectrum(family.h0, family.V, N, family.m2)


def kinv_closed_form(eps: float, T: float, v: Callable[[float], float],
                     rtol: float = 1e-10) -> Callable[[float], float]:
    """Dirichlet inverse of ``-d_s^2 + eps^2`` on ``(-T, T)`` as a free-space part minus a correction.

    ``u`` convolves ``v`` with ``(2 eps)^{-1} exp(-eps |s - s'|)`` and ``r``
    restores the boundary values using the moments
    ``v+ = int exp(-eps s') v``, ``v- = int exp(eps s') v``.
    """
    if eps <= 0:
        raise OracleDomainError("eps must be positive")
    opts = dict(epsrel=rtol, epsabs=0.0, limit=200)

    def quad(fn, a, b):
        if b <= a:
            return 0.0
        re = integrate.quad(lambda x: np.real(fn(x)), a, b, **opts)[0]
        im = integrate.quad(lambda x: np.imag(fn(x)), a, b, **opts)[0]
        return re + 1j * im if im != 0.0 else re

    v_plus = quad(lambda x: np.exp(-eps * x) * v(x), -T, T)
    v_minus = quad(lambda x: np.exp(eps * x) * v(x), -T, T)
    # exp(4 T eps) - 1 written to stay finite for large T eps
    pref = 1.0 / (2.0 * eps * -np.expm1(-4.0 * T * eps))

    def solution(s: float):
        left = quad(lambda x: np.exp(-(s - x) * eps) * v(x), -T, s)
        right = quad(lambda x: np.exp((s - x) * eps) * v(x), s, T)
        u = (left + right) / (2.0 * eps)
        r = pref * (np.exp((-2.0 * T - s) * eps) * v_plus - np.exp((s - 4.0 * T) * eps) * v_plus
                    - np.exp((-s - 4.0 * T) * eps) * v_minus + np.exp((s - 2.0 * T) * eps) * v_minus)
        return u - r

    return solution


def dirichlet_green(eps: float, T: float, s, sp):
    """Green's function of ``-d_s^2 + eps^2`` on ``(-T, T)`` with zero end values."""
    hi, lo = np.maximum(s, sp), np.minimum(s, sp)
    return np.sinh(eps * (T - hi)) * np.sinh(eps * (T + lo)) / (eps * np.sinh(2.0 * T * eps))


def calderon_closed_form(eps: float, T: float) -> np.ndarray:
    """Per-mode ``C+`` for the slab ``(-T, T)``; ``C- = 1 - C+``."""
    if eps <= 0 or T <= 0:
        raise OracleDomainError("eps and T must be positive")
    th = np.tanh(T * eps)
    return 0.5 * np.array([[1.0, th / eps], [eps / th, 1.0]], dtype=complex)


def ground_state_projector(eps: float) -> np.ndarray:
    """``T -> infinity`` limit of :func:`calderon_closed_form`."""
    if eps <= 0:
        raise OracleDomainError("eps must be positive")
    return 0.5 * np.array([[1.0, 1.0 / eps], [eps, 1.0]], dtype=complex)


def ground_state_bound(eps: float, T: float) -> float:
    """Bound on ``||C+(T) - C_gs||`` from ``|tanh x - 1|, |coth x - 1| <= 2 exp(-2x)``."""
    return 2.0 * (1.0 + eps + 1.0 / eps) * np.exp(-2.0 * T * eps)


def _grid_pair(spec: ModeSpectrum, block_fn) -> np.ndarray:
    """Assemble ``2N x 2N`` from per-mode ``2 x 2`` blocks in the grid basis."""
    blocks = np.array([block_fn(e) for e in spec.eps])  # (N, 2, 2)
    out = np.empty((2 * len(spec.eps),) * 2, dtype=complex)
    P, A = spec.modes, spec.analysis()
    n = len(spec.eps)
    for i in range(2):
        for j in range(2):
            out[i * n:(i + 1) * n, j * n:(j + 1) * n] = (P * blocks[:, i, j][None, :]) @ A
    return out


def oracle_pair(domain: DiscreteDomain, family: MetricFamily | None = None,
                T: float | None = None) -> CalderonPair:
    """Exact ``C+-`` assembled in the same grid representation as the numerical pair."""
    family = family or domain.family
    T = domain.T if T is None else T
    spec = spectrum_for(family, domain.N)
    Cp = _grid_pair(spec, lambda e: calderon_closed_form(e, T))
    Cm = np.eye(2 * domain.N) - Cp
    return CalderonPair(Cp, Cm, Cp, Cm, np.concatenate([spec.weights, spec.weights]),
                        domain, family, 1, {"oracle": True, "T": T})


def ground_state_pair(domain: DiscreteDomain, family: MetricFamily | None = None) -> CalderonPair:
    family = family or domain.family
    spec = spectrum_for(family, domain.N)
    Cp = _grid_pair(spec, ground_state_projector)
    Cm = np.eye(2 * domain.N) - Cp
    return CalderonPair(Cp, Cm, Cp, Cm, np.concatenate([spec.weights, spec.weights]),
                        domain, family, 1, {"oracle": "ground_state"})


def modal_blocks(C: np.ndarray, spec: ModeSpectrum) -> np.ndarray:
    """Per-mode ``2 x 2`` blocks ``(N, 2, 2)`` of a Cauchy-data operator (off-mode coupling dropped)."""
    n = len(spec.eps)
    P, A = spec.modes, spec.analysis()
    out = np.empty((n, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            out[:, i, j] = np.diag(A @ C[i * n:(i + 1) * n, j * n:(j + 1) * n] @ P)
    return out


def modal_coupling(C: np.ndarray, spec: ModeSpectrum) -> float:
    """Largest off-diagonal modal entry, measuring how far ``C`` is from mode-diagonal."""
    n = len(spec.eps)
    P, A = spec.modes, spec.analysis()
    worst = 0.0
    for i in range(2):
        for j in range(2):
            B = A @ C[i * n:(i + 1) * n, j * n:(j + 1) * n] @ P
            worst = max(worst, float(np.max(np.abs(B - np.diag(np.diag(B))))))
    return worst
