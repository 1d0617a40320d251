"""Slab grids, quadrature weights and the spatial operator matrices.

The slab ``(-T, T) x S^1`` is discretized with an equispaced ``s``-grid that
contains ``s = 0`` as a node and ``N`` equispaced points on the circle.
Circle derivatives are Fourier spectral; the Nyquist mode is given the
wavenumber ``-N/2`` so that ``D_y^2`` acts on it by ``-(N/2)^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from calderon_states.errors import DomainError
from calderon_states.geometry import MetricFamily, check_wick_domain, circle_grid, coeffs_at


def wavenumbers(N: int) -> np.ndarray:
    return np.fft.fftfreq(N, d=1.0 / N)


def fourier_derivative_matrix(N: int, order: int = 1) -> np.ndarray:
    """Dense spectral differentiation matrix on ``N`` equispaced circle points."""
    symbol = (1j * wavenumbers(N)) ** order
    eye = np.eye(N)
    return np.fft.ifft(symbol[:, None] * np.fft.fft(eye, axis=0), axis=0)


@dataclass(frozen=True)
class DiscreteDomain:
    """Grids and weights on the slab.

    ``s`` holds all ``M + 1`` nodes including the Dirichlet endpoints; the
    unknowns live on ``s[1:-1]`` ordered ``s``-major (``index = j * N + k``).
    ``s_shift`` displaces the whole ``s``-grid and exists only to build
    asymmetric negative controls.
    """

    T: float
    M: int
    N: int
    family: MetricFamily
    s: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    ws: float
    wy: np.ndarray = field(repr=False)
    h0: np.ndarray = field(repr=False)
    s_shift: float = 0.0

    @property
    def ds(self) -> float:
        return 2.0 * self.T / self.M

    @property
    def s_interior(self) -> np.ndarray:
        return self.s[1:-1]

    @property
    def n_interior(self) -> int:
        return (self.M - 1) * self.N

    @property
    def zero_index(self) -> int:
        """Interior-row index of ``s = 0``."""
        if self.s_shift != 0.0:
            raise DomainError("shifted grids do not contain s = 0 as a node")
        return self.M // 2 - 1

    @property
    def is_symmetric(self) -> bool:
        return self.s_shift == 0.0

    def reshape(self, u: np.ndarray) -> np.ndarray:
        """View an interior vector (or matrix of column vectors) as ``(M-1, N, ...)``."""
        return u.reshape((self.M - 1, self.N) + u.shape[1:])


def build_domain(T: float, M: int, N: int, family: MetricFamily, *,
                 s_shift: float = 0.0) -> DiscreteDomain:
    """Construct the slab grids after checking Wick admissibility of ``T``."""
    if M < 4 or M % 2:
        raise ValueError(f"M must be even and >= 4, got {M}")
    if N < 4 or N % 2:
        raise ValueError(f"N must be even and >= 4, got {N}")
    if T <= 0:
        raise ValueError(f"T must be positive, got {T}")
    y = circle_grid(N)
    h0 = family.h0_at(y)
    report = check_wick_domain(family, T + abs(s_shift), y)
    if not report.ok:
        raise DomainError(
            f"T = {T} exceeds the admissible Wick-rotation half-width "
            f"{report.max_admissible_T:.6f}",
            max_admissible_T=report.max_admissible_T,
        )
    ds = 2.0 * T / M
    # symmetric by construction: ds * (-k) == -(ds * k) in floating point
    s = ds * (np.arange(M + 1) - M // 2)
    s[0], s[-1] = -T, T
    s = s + s_shift
    return DiscreteDomain(T=T, M=M, N=N, family=family, s=s, y=y, ws=ds,
                          wy=(2.0 * np.pi / N) * np.sqrt(h0), h0=h0, s_shift=s_shift)


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    descriptor: str


@dataclass(frozen=True)
class SpatialOperators:
    a: OperatorMatrix
    a0: OperatorMatrix


def spatial_matrices(family: MetricFamily, y: np.ndarray, t, D: np.ndarray | None = None):
    """``(a(t), a_0(t))`` on the circle grid ``y`` for (complex) time ``t``.

    ``a(t) u = -h_t^{-1/2} D_y (h_t^{-1/2} D_y u) + V u`` with ``D_y`` spectral.
    """
    c = coeffs_at(family, complex(t), y)
    D = fourier_derivative_matrix(len(y)) if D is None else D
    # h_t^{-1/2} through the holomorphic fourth root so the branch follows t
    g = 1.0 / (c.d ** 2 * np.sqrt(family.h0_at(y)))
    a = -(g[:, None] * D) @ (g[:, None] * D) + np.diag(family.V_at(y).astype(complex))
    a0 = (c.d[:, None] * a) / c.d[None, :] + np.diag(c.a0_shift)
    return a, a0


def assemble_spatial(domain: DiscreteDomain, family: MetricFamily, t) -> SpatialOperators:
    """Matrices of ``a(t) = -Delta_{h_t} + V`` and its reduction ``a_0(t)``."""
    t = complex(t)
    a, a0 = spatial_matrices(family, domain.y, t)
    return SpatialOperators(
        a=OperatorMatrix(a, f"a(t={t})"),
        a0=OperatorMatrix(a0, f"a0(t={t})"),
    )


@dataclass(frozen=True)
class Weights:
    """Diagonals of the slab (``W_H``) and Cauchy-data (``W_S``) inner products."""

    W_H: np.ndarray
    W_S: np.ndarray


def inner_products(domain: DiscreteDomain, family: MetricFamily | None = None) -> Weights:
    wy = domain.wy
    if family is not None and family is not domain.family:
        wy = (2.0 * np.pi / domain.N) * np.sqrt(family.h0_at(domain.y))
    W_H = np.tile(domain.ws * wy, domain.M - 1)
    W_S = np.concatenate([wy, wy])
    return Weights(W_H=W_H, W_S=W_S)


def weighted_adjoint(A: np.ndarray, w_out: np.ndarray, w_in: np.ndarray | None = None) -> np.ndarray:
    """Adjoint of ``A`` for diagonal inner products: ``W_in^{-1} A^H W_out``."""
    if w_in is None:
        w_in = w_out
    return (A.conj().T * w_out[None, :]) / w_in[:, None]
