"""Real-time Cauchy problem and the negative-frequency probe.

Solves ``d_t^2 u + r(t) d_t u + a(t) u = 0`` on the circle grid with data
``u(0) = f0``, ``d_t u(0) = i f1``.  Since ``-d_s = i^{-1} d_t`` under
``t = i s``, Calderon-projected Cauchy data are used unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from calderon_states.discretize import fourier_derivative_matrix, spatial_matrices
from calderon_states.errors import StabilityError, UnsupportedProbeError
from calderon_states.geometry import FamilyKind, MetricFamily, circle_grid
from calderon_states.oracle import ModeSpectrum

CFL_FACTOR = 0.5


@dataclass(frozen=True)
class CauchyDatum:
    """``(u|_{t=0}, i^{-1} d_t u|_{t=0})`` sampled on the circle grid."""

    f0: np.ndarray
    f1: np.ndarray

    def __post_init__(self):
        f0 = np.asarray(self.f0, dtype=complex).ravel()
        f1 = np.asarray(self.f1, dtype=complex).ravel()
        if f0.shape != f1.shape:
            raise ValueError(f"f0 has {f0.size} samples but f1 has {f1.size}")
        object.__setattr__(self, "f0", f0)
        object.__setattr__(self, "f1", f1)

    @property
    def N(self) -> int:
        return self.f0.size

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "CauchyDatum":
        n = v.size // 2
        return cls(v[:n], v[n:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.f0, self.f1])

    def time_reversed(self) -> "CauchyDatum":
        """Data of ``conj(u(-t))``, which exchanges the two frequency branches."""
        return CauchyDatum(self.f0.conj(), -self.f1.conj())


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    values: np.ndarray = field(repr=False)
    derivatives: np.ndarray = field(repr=False)
    family: MetricFamily = None

    def modal(self, spec: ModeSpectrum) -> np.ndarray:
        """Modal coefficients ``(n_times, N)``."""
        return self.values @ spec.analysis().T


def max_stable_dt(family: MetricFamily, N: int, T_w: float) -> float:
    """``CFL_FACTOR * dy * min h_t^{1/2}`` over the window (the wave speed is ``h_t^{-1/2}``)."""
    y = circle_grid(N)
    t = np.linspace(0.0, T_w, 257)
    f_min = float(np.min(np.real(family.time_factor(t))))
    return CFL_FACTOR * (2.0 * np.pi / N) * np.sqrt(f_min * np.min(family.h0_at(y)))


def cauchy_solve(family: MetricFamily, datum: CauchyDatum, T_w: float, dt: float) -> Trajectory:
    """Classical RK4 for the first-order system ``(u, d_t u)``."""
    if T_w <= 0 or dt <= 0:
        raise ValueError("T_w and dt must be positive")
    N = datum.N
    limit = max_stable_dt(family, N, T_w)
    if dt > limit * (1 + 1e-12):
        raise StabilityError(f"dt = {dt:.3e} exceeds the stability bound {limit:.3e}")
    n_steps = int(np.ceil(T_w / dt - 1e-9))
    h = T_w / n_steps
    y = circle_grid(N)
    D = fourier_derivative_matrix(N)
    static = family.kind is FamilyKind.ULTRASTATIC
    a_static = spatial_matrices(family, y, 0.0, D)[0] if static else None

    def rhs(t, u, v):
        a = a_static if static else spatial_matrices(family, y, t, D)[0]
        r = 0.0 if static else complex(family.r(t))
        return v, -(a @ u) - r * v

    u, v = datum.f0.copy(), 1j * datum.f1
    times = h * np.arange(n_steps + 1)
    U = np.empty((n_steps + 1, N), dtype=complex)
    V = np.empty_like(U)
    U[0], V[0] = u, v
    for n in range(n_steps):
        t = times[n]
        k1u, k1v = rhs(t, u, v)
        k2u, k2v = rhs(t + h / 2, u + h / 2 * k1u, v + h / 2 * k1v)
        k3u, k3v = rhs(t + h / 2, u + h / 2 * k2u, v + h / 2 * k2v)
        k4u, k4v = rhs(t + h, u + h * k3u, v + h * k3v)
        u = u + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        v = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        U[n + 1], V[n + 1] = u, v
    return Trajectory(times, U, V, family)


def modal_energy(traj: Trajectory, spec: ModeSpectrum) -> np.ndarray:
    """``sum_k |d_t c_k|^2 + eps_k^2 |c_k|^2`` at every time step."""
    A = spec.analysis().T
    c, dc = traj.values @ A, traj.derivatives @ A
    return np.sum(np.abs(dc) ** 2 + (spec.eps ** 2)[None, :] * np.abs(c) ** 2, axis=1)


@dataclass(frozen=True)
class ProbeResult:
    eps: np.ndarray
    positive: np.ndarray = field(repr=False)
    negative: np.ndarray = field(repr=False)

    @property
    def ratio(self) -> np.ndarray:
        """``|B_k / A_k|`` (negative over positive frequency amplitude)."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.abs(self.negative) / np.abs(self.positive)

    @property
    def inverse_ratio(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.abs(self.positive) / np.abs(self.negative)


def frequency_probe(traj: Trajectory, spec: ModeSpectrum) -> ProbeResult:
    """Least-squares fit ``c_k(t) = A_k e^{i eps_k t} + B_k e^{-i eps_k t}`` per mode."""
    if traj.family is not None and traj.family.kind is not FamilyKind.ULTRASTATIC:
        raise UnsupportedProbeError(
            f"frequency probe needs an ultrastatic family, got {traj.family.kind.value}"
        )
    c = traj.modal(spec)
    t = traj.times
    A, B = np.empty(len(spec.eps), complex), np.empty(len(spec.eps), complex)
    for k, e in enumerate(spec.eps):
        basis = np.stack([np.exp(1j * e * t), np.exp(-1j * e * t)], axis=1)
        (A[k], B[k]), *_ = np.linalg.lstsq(basis, c[:, k], rcond=None)
    return ProbeResult(spec.eps.copy(), A, B)
