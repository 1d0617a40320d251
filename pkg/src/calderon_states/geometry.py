"""Analytic metric families on the circle and their Gaussian-coordinate reductions.

A family is a time-dependent metric ``h_t(y) dy^2`` on ``S^1`` of the separable
form ``h_t(y) = f(t) h_0(y)`` together with a potential ``V(y) + m^2``.  Because
``f`` is given in closed form, the holomorphic extension to complex time is an
exact substitution and the Wick-rotated coefficients are evaluated at ``t = i s``.

The reduction used throughout is

* ``r(t, y) = 1/2 d_t ln h_t(y)``
* ``d(t, y) = h_t(y)^{1/4} h_0(y)^{-1/4}``
* ``a_0(t) = d a(t) d^{-1} - r^2/4 - 1/2 d_t r``

and the spatial operator is ``a(t) = -Delta_{h_t} + V`` (positive Laplacian sign
convention, so that the Wick-rotated operator is elliptic).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from calderon_states.errors import InvalidFamilyError

# Lower/upper bound constants of the admissibility conditions.
RE_LOWER, RE_UPPER = 0.5, 1.5
IM_BOUND = 0.5
ABS_BOUND = 2.0
DHAT_LOWER, DHAT_UPPER = 0.5, 1.0
DHAT_GRAD_BOUND = 1.0


class FamilyKind(str, enum.Enum):
    ULTRASTATIC = "ultrastatic"
    EXPONENTIAL = "exponential"
    POLYNOMIAL = "polynomial"


def trig_eval(coeffs: Sequence[float], y: np.ndarray) -> np.ndarray:
    """Evaluate ``c0 + sum_k (a_k cos(k y) + b_k sin(k y))``.

    ``coeffs`` is laid out as ``[c0, a1, b1, a2, b2, ...]``; a trailing cosine
    coefficient without its sine partner is allowed.
    """
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    if len(coeffs) == 0:
        return out
    out = out + coeffs[0]
    rest = list(coeffs[1:])
    for i in range(0, len(rest), 2):
        k = i // 2 + 1
        out = out + rest[i] * np.cos(k * y)
        if i + 1 < len(rest):
            out = out + rest[i + 1] * np.sin(k * y)
    return out


def circle_grid(N: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(N) / N


@dataclass(frozen=True)
class MetricFamily:
    """Separable analytic family ``h_t = f(t) h_0`` plus potential ``V + m^2``.

    Parameters
    ----------
    kind
        ``ultrastatic`` (``f = 1``), ``exponential`` (``f = exp(2 kappa t)``) or
        ``polynomial`` (``f = 1 + alpha t^2``).
    h0, V
        Trigonometric coefficient lists, see :func:`trig_eval`.
    m2
        Constant mass squared, ``m2 >= 0``.
    """

    kind: FamilyKind = FamilyKind.ULTRASTATIC
    h0: tuple[float, ...] = (1.0,)
    V: tuple[float, ...] = ()
    m2: float = 1.0
    kappa: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        object.__setattr__(self, "h0", tuple(float(c) for c in self.h0))
        object.__setattr__(self, "V", tuple(float(c) for c in self.V))
        if not self.h0:
            raise InvalidFamilyError("h0 needs at least a constant coefficient")
        if self.m2 < 0:
            raise InvalidFamilyError(f"mass squared must be >= 0, got {self.m2}")
        # sufficient positivity bound, the grid check in h0_at is the real guard
        if self.h0[0] <= 0:
            raise InvalidFamilyError("h0 must have a positive mean")

    @classmethod
    def ultrastatic(cls, h0=(1.0,), V=(), m2=1.0):
        return cls(FamilyKind.ULTRASTATIC, tuple(h0), tuple(V), m2)

    @classmethod
    def exponential(cls, kappa, h0=(1.0,), V=(), m2=1.0):
        return cls(FamilyKind.EXPONENTIAL, tuple(h0), tuple(V), m2, kappa=kappa)

    @classmethod
    def polynomial(cls, alpha, h0=(1.0,), V=(), m2=1.0):
        return cls(FamilyKind.POLYNOMIAL, tuple(h0), tuple(V), m2, alpha=alpha)

    # -- spatial data -----------------------------------------------------

    def h0_at(self, y) -> np.ndarray:
        h = trig_eval(self.h0, y)
        if np.any(h <= 0):
            raise InvalidFamilyError(
                f"h0 is non-positive at {int(np.sum(h <= 0))} grid point(s); "
                f"min value {h.min():.3g}"
            )
        return h

    def V_at(self, y) -> np.ndarray:
        return trig_eval(self.V, y) + self.m2

    # -- time factor f(t) and derivatives (holomorphic in t) ---------------

    def time_factor(self, t):
        """``f(t)``; accepts scalars or arrays of complex times."""
        t = np.asarray(t, dtype=complex)
        if self.kind is FamilyKind.ULTRASTATIC:
            return np.ones_like(t)
        if self.kind is FamilyKind.EXPONENTIAL:
            return np.exp(2.0 * self.kappa * t)
        return 1.0 + self.alpha * t * t

    def fourth_root_factor(self, t):
        """``f(t)^{1/4}``, continued holomorphically from ``f(0)^{1/4} = 1``."""
        t = np.asarray(t, dtype=complex)
        if self.kind is FamilyKind.EXPONENTIAL:
            return np.exp(0.5 * self.kappa * t)
        return self.time_factor(t) ** 0.25

    def r(self, t):
        """``1/2 d_t ln f(t)``."""
        t = np.asarray(t, dtype=complex)
        if self.kind is FamilyKind.ULTRASTATIC:
            return np.zeros_like(t)
        if self.kind is FamilyKind.EXPONENTIAL:
            return np.full_like(t, self.kappa)
        return self.alpha * t / (1.0 + self.alpha * t * t)

    def dr_dt(self, t):
        t = np.asarray(t, dtype=complex)
        if self.kind is not FamilyKind.POLYNOMIAL:
            return np.zeros_like(t)
        a = self.alpha
        return a * (1.0 - a * t * t) / (1.0 + a * t * t) ** 2


@dataclass(frozen=True)
class CoefficientSample:
    t: complex
    h: np.ndarray
    r: np.ndarray
    d: np.ndarray
    dt_d0: np.ndarray
    a0_shift: np.ndarray
    y: np.ndarray = field(repr=False, default=None)


def coeffs_at(family: MetricFamily, t, ygrid) -> CoefficientSample:
    """Sample every reduction coefficient of ``family`` at (complex) time ``t``.

    The Wick-rotated quantities are obtained by passing ``t = 1j * s``; e.g.
    the reduction factor at imaginary time is ``coeffs_at(fam, 1j*s, y).d``.
    """
    y = np.asarray(ygrid, dtype=float)
    h0 = family.h0_at(y)
    ones = np.ones_like(y, dtype=complex)
    t = complex(t)
    f = complex(family.time_factor(t))
    r = complex(family.r(t))
    return CoefficientSample(
        t=t,
        h=f * h0.astype(complex),
        r=r * ones,
        d=complex(family.fourth_root_factor(t)) * ones,
        # d_t d(0) = r(0) / 2 since d_t ln d = r / 2
        dt_d0=0.5 * complex(family.r(0.0)) * ones,
        a0_shift=(-0.25 * r * r - 0.5 * complex(family.dr_dt(t))) * ones,
        y=y,
    )


@dataclass(frozen=True)
class DomainReport:
    ok: bool
    max_admissible_T: float
    T: float
    conditions: dict
    condition_max_T: dict

    @property
    def imag_bound_ok(self) -> bool:
        return self.conditions["ii_imag"]


def _conditions_at(family: MetricFamily, s: np.ndarray, h0: np.ndarray) -> dict:
    """Boolean arrays (over ``s``) for each admissibility condition."""
    f = family.time_factor(1j * s)
    dhat = family.fourth_root_factor(1j * s)
    # h_{is}(y) = f(is) h0(y): every bound is relative to h0, so the y
    # dependence cancels except through the grid-wise products below.
    re = np.real(f)[:, None] * h0[None, :]
    im = np.imag(f)[:, None] * h0[None, :]
    ab = np.abs(f)[:, None] * h0[None, :]
    tol = 1e-14
    return {
        "i_real": np.all((RE_LOWER * h0 <= re + tol) & (re <= RE_UPPER * h0 + tol), axis=1),
        "ii_imag": np.all(np.abs(im) <= IM_BOUND * h0 + tol, axis=1),
        "iii_abs": np.all(ab <= ABS_BOUND * h0 + tol, axis=1),
        "iv_dhat": (np.abs(dhat) >= DHAT_LOWER - tol) & (np.abs(dhat) <= DHAT_UPPER + tol),
        # d-hat is independent of y for separable families: gradient vanishes
        "v_grad": np.full(s.shape, 0.0 <= DHAT_GRAD_BOUND),
    }


# conditions that decide admissibility; the imaginary-part bound is reported only
GATING_CONDITIONS = ("i_real", "iii_abs", "iv_dhat", "v_grad")


SCAN_STEP = 1e-2
SCAN_CAP = 1e3
BISECT_TOL = 1e-6


def _symmetric_conditions(family, s, h0) -> dict:
    cp = _conditions_at(family, s, h0)
    cm = _conditions_at(family, -s, h0)
    return {n: cp[n] & cm[n] for n in cp}


def _largest_T(family, h0, name, scan_s, scan_ok) -> float:
    """Largest ``T`` with condition ``name`` holding on ``[-T, T]`` (``inf`` if it never fails)."""
    if scan_ok.all():
        return np.inf
    k = int(np.argmin(scan_ok))
    if k == 0:
        return 0.0
    lo, hi = scan_s[k - 1], scan_s[k]
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if _symmetric_conditions(family, np.array([mid]), h0)[name][0]:
            lo = mid
        else:
            hi = mid
    return float(lo)


def check_wick_domain(family: MetricFamily, T: float, ygrid) -> DomainReport:
    """Check the Wick-rotation admissibility conditions for ``|s| <= T``.

    Each condition is evaluated for both ``s`` and ``-s``.  The conditions are
    first scanned on ``[0, SCAN_CAP]`` with step ``SCAN_STEP`` and the first
    failure is then located by bisection to ``BISECT_TOL``.
    """
    if T <= 0:
        raise ValueError(f"T must be positive, got {T}")
    h0 = family.h0_at(np.asarray(ygrid, dtype=float))
    scan_s = np.arange(0.0, SCAN_CAP + SCAN_STEP, SCAN_STEP)
    scan = _symmetric_conditions(family, scan_s, h0)
    cond_T = {n: _largest_T(family, h0, n, scan_s, ok) for n, ok in scan.items()}
    max_T = min(cond_T[n] for n in GATING_CONDITIONS)
    conditions = {n: bool(T <= cond_T[n]) for n in cond_T}
    ok = all(conditions[n] for n in GATING_CONDITIONS)
    return DomainReport(ok=ok, max_admissible_T=max_T, T=T, conditions=conditions,
                        condition_max_T=cond_T)
