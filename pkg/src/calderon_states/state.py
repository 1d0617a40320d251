"""Cauchy-surface covariances of the state defined by a Calderon pair.

``lambda+- = +-q C+-`` are the Cauchy-data two-point forms; the matrices here
are the forms before weighting, and every positivity statement is made for
``W_S lambda+-`` (the Hermitian forms on the weighted data space).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from calderon_states.calderon import BoundaryMatrices, CalderonPair
from calderon_states.errors import DegenerateStateError

THERMAL_OCCUPATION = 0.5


@dataclass(frozen=True)
class StateCovariances:
    lambda_plus: np.ndarray = field(repr=False)
    lambda_minus: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    defects: dict = field(default_factory=dict)

    @property
    def c_plus(self) -> np.ndarray:
        return np.linalg.solve(self.q, self.lambda_plus)

    @property
    def c_minus(self) -> np.ndarray:
        return -np.linalg.solve(self.q, self.lambda_minus)

    @property
    def eta(self) -> np.ndarray:
        """Symmetric part ``1/2 Re(lambda+ + lambda-)``."""
        return 0.5 * np.real(self.lambda_plus + self.lambda_minus)

    def form(self, lam: np.ndarray) -> np.ndarray:
        return self.weights[:, None] * lam


def _herm(A):
    return 0.5 * (A + A.conj().T)


def covariances(pair: CalderonPair, mats: BoundaryMatrices) -> StateCovariances:
    """``lambda+- = +-q C+-`` with the CCR, positivity and projector defects attached."""
    q = mats.q
    lp, lm = q @ pair.Cplus, -q @ pair.Cminus
    cov = StateCovariances(lp, lm, q, pair.W_S)
    eye = np.eye(q.shape[0])
    Fp, Fm = cov.form(lp), cov.form(lm)
    cov.defects.update(
        ccr=ccr_defect(cov),
        pos_min_eig_plus=float(np.linalg.eigvalsh(_herm(Fp))[0]),
        pos_min_eig_minus=float(np.linalg.eigvalsh(_herm(Fm))[0]),
        pos_norm_plus=float(np.linalg.norm(Fp, 2)),
        pos_norm_minus=float(np.linalg.norm(Fm, 2)),
        c_sum=float(np.linalg.norm(cov.c_plus + cov.c_minus - eye, 2)),
    )
    return cov


def ccr_defect(cov: StateCovariances) -> float:
    """``||lambda+ - lambda- - q|| / ||q||`` (spectral norm)."""
    return float(np.linalg.norm(cov.lambda_plus - cov.lambda_minus - cov.q, 2)
                 / np.linalg.norm(cov.q, 2))


def purity_matrix(cov: StateCovariances, scale: float = 1.0) -> np.ndarray:
    """``G = L^{-1/2} Q L^{-1/2}`` with ``Q = W_S q`` and ``L = scale * Herm(W_S(lambda+ + lambda-))``.

    For ``v1`` fixed, ``sup_{v2} |v1^H Q v2|^2 / v2^H L v2 = v1^H Q L^{-1} Q v1``,
    so the state is pure iff ``Q L^{-1} Q = L``, i.e. ``G^2 = 1``.
    """
    L = scale * _herm(cov.form(cov.lambda_plus + cov.lambda_minus))
    evals, evecs = np.linalg.eigh(L)
    if evals[0] <= 1e-13 * max(abs(evals[-1]), 1.0):
        raise DegenerateStateError(
            f"symmetrized covariance is not positive definite (min eigenvalue {evals[0]:.3e})"
        )
    L_isqrt = (evecs / np.sqrt(evals)) @ evecs.conj().T
    Q = cov.form(cov.q)
    return L_isqrt @ Q @ L_isqrt


def purity_defect(cov: StateCovariances, scale: float = 1.0) -> float:
    """``||G^2 - 1||`` (spectral norm), zero exactly for pure states.

    ``scale`` multiplies the symmetrized covariance; ``scale = 1 + 2n``
    models a thermal-like mixture with occupation ``n``.
    """
    G = purity_matrix(cov, scale)
    return float(np.linalg.norm(G @ G - np.eye(G.shape[0]), 2))


def thermal_purity_defect(cov: StateCovariances, n: float = THERMAL_OCCUPATION) -> float:
    """Negative control: the defect of ``cov`` with its covariance inflated by ``1 + 2n``."""
    return purity_defect(cov, 1.0 + 2.0 * n)
