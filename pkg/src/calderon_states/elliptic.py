"""Dirichlet realization of the Wick-rotated operator on the slab.

``K0 = -D_s^2 (x) I + diag_s(a_0(i s_j))`` on interior nodes, with the rows for
``s = +-T`` eliminated.  The matrix is block tridiagonal in ``s`` with dense
``N x N`` blocks and is factorized once by block elimination.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from calderon_states.discretize import DiscreteDomain, assemble_spatial, inner_products
from calderon_states.errors import RealizationError
from calderon_states.geometry import MetricFamily, coeffs_at

DEFAULT_SEED = 0x5EED


@dataclass
class BlockTridiagonalLU:
    """Block Thomas factorization of a block-tridiagonal matrix.

    ``lower[j]`` couples row block ``j`` to ``j-1`` (``lower[0]`` unused) and
    ``upper[j]`` couples ``j`` to ``j+1``.
    """

    pivots: list
    multipliers: list
    upper: list
    n_blocks: int
    block_size: int

    @classmethod
    def factor(cls, lower, diag, upper, rcond_floor=1e-14):
        n = len(diag)
        pivots, mult = [], [None]
        D = diag[0]
        for j in range(n):
            if j > 0:
                L = sla.lu_solve(pivots[-1], lower[j].T, trans=1).T  # lower_j D_{j-1}^{-1}
                mult.append(L)
                D = diag[j] - L @ upper[j - 1]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", sla.LinAlgWarning)
                lu, piv = sla.lu_factor(D, check_finite=False)
            d = np.abs(np.diag(lu))
            if not np.all(np.isfinite(d)) or d.min() <= rcond_floor * d.max() or d.max() == 0:
                raise RealizationError(
                    f"singular pivot block at s-index {j}: smallest pivot {d.min():.3e}, "
                    f"largest {d.max():.3e}"
                )
            pivots.append((lu, piv))
        return cls(pivots, mult, list(upper), n, diag[0].shape[0])

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        n, b = self.n_blocks, self.block_size
        squeeze = rhs.ndim == 1
        R = rhs.reshape(n, b, -1).astype(complex)
        Y = np.empty_like(R)
        Y[0] = R[0]
        for j in range(1, n):
            Y[j] = R[j] - self.multipliers[j] @ Y[j - 1]
        X = np.empty_like(R)
        X[n - 1] = sla.lu_solve(self.pivots[n - 1], Y[n - 1])
        for j in range(n - 2, -1, -1):
            X[j] = sla.lu_solve(self.pivots[j], Y[j] - self.upper[j] @ X[j + 1])
        X = X.reshape(n * b, -1)
        return X[:, 0] if squeeze else X


def blocks_to_sparse(lower, diag, upper) -> sp.csr_matrix:
    n = len(diag)
    grid = [[None] * n for _ in range(n)]
    for j in range(n):
        grid[j][j] = sp.coo_matrix(diag[j])
        if j > 0:
            grid[j][j - 1] = sp.coo_matrix(lower[j])
        if j < n - 1:
            grid[j][j + 1] = sp.coo_matrix(upper[j])
    return sp.bmat(grid, format="csr")


@dataclass
class EllipticRealization:
    domain: DiscreteDomain
    family: MetricFamily
    lower: list = field(repr=False)
    diag: list = field(repr=False)
    upper: list = field(repr=False)
    matrix: sp.csr_matrix = field(repr=False)
    factorization: BlockTridiagonalLU = field(repr=False)
    label: str = "K0"

    @property
    def K0(self) -> sp.csr_matrix:
        return self.matrix

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.matrix @ u

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self.factorization.solve(rhs)


def _assemble(domain, family, lower, diag, upper, label):
    try:
        lu = BlockTridiagonalLU.factor(lower, diag, upper)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise RealizationError(str(exc)) from exc
    return EllipticRealization(domain, family, lower, diag, upper,
                               blocks_to_sparse(lower, diag, upper), lu, label)


def assemble_K0(domain: DiscreteDomain, family: MetricFamily | None = None) -> EllipticRealization:
    """Assemble and factorize ``K0`` with homogeneous Dirichlet data at ``s = +-T``."""
    family = family or domain.family
    N, ds = domain.N, domain.ds
    eye = np.eye(N, dtype=complex)
    diag = [2.0 / ds**2 * eye + assemble_spatial(domain, family, 1j * s).a0.entries
            for s in domain.s_interior]
    off = [-eye / ds**2 for _ in domain.s_interior]
    return _assemble(domain, family, off, diag, off, "K0")


def _link_phases(domain: DiscreteDomain, family: MetricFamily, n_gauss: int = 10) -> np.ndarray:
    """``exp(int_{s_j}^{s_{j+1}} i r(i s)/2 ds)`` for every grid interval, by Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(n_gauss)
    s = domain.s
    mid, half = 0.5 * (s[1:] + s[:-1]), 0.5 * np.diff(s)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    conn = 0.5j * family.r(1j * nodes)
    return np.exp(half * (conn @ w))


def assemble_K(domain: DiscreteDomain, family: MetricFamily | None = None) -> EllipticRealization:
    """Unreduced operator ``K = -d_s^2 - i r(is) d_s + a(is)``.

    The first-order term is discretized covariantly: neighbour values are
    parallel-transported with the phase ``exp(int i r(is)/2 ds)`` computed by
    quadrature of ``r`` alone, which absorbs ``-i r d_s`` together with the
    zeroth-order terms ``r^2/4 + (d_t r)/2`` it generates.
    """
    family = family or domain.family
    N, ds = domain.N, domain.ds
    links = _link_phases(domain, family)  # interval j connects s[j] -> s[j+1]
    lower, diag, upper = [], [], []
    for j, s in enumerate(domain.s_interior, start=1):
        ops = assemble_spatial(domain, family, 1j * s)
        shift = coeffs_at(family, 1j * s, domain.y).a0_shift
        diag.append(2.0 / ds**2 * np.eye(N) + ops.a.entries + np.diag(shift))
        upper.append(-links[j] / ds**2 * np.eye(N))
        lower.append(-1.0 / (links[j - 1] * ds**2) * np.eye(N))
    return _assemble(domain, family, lower, diag, upper, "K")


def solve_K0(real: EllipticRealization, rhs: np.ndarray) -> np.ndarray:
    rhs = np.asarray(rhs)
    if rhs.shape[0] != real.domain.n_interior:
        raise ValueError(
            f"rhs has {rhs.shape[0]} rows, realization expects {real.domain.n_interior}"
        )
    return real.solve(rhs)


def dhat_on_interior(domain: DiscreteDomain, family: MetricFamily | None = None) -> np.ndarray:
    family = family or domain.family
    d = family.fourth_root_factor(1j * domain.s_interior)
    return np.repeat(d, domain.N)


def conjugation_defect(domain: DiscreteDomain, family: MetricFamily | None = None) -> float:
    """``||dhat K dhat^{-1} - K0|| / ||K0||`` (Frobenius)."""
    family = family or domain.family
    K = assemble_K(domain, family).matrix
    K0 = assemble_K0(domain, family).matrix
    d = dhat_on_interior(domain, family)
    conj = sp.diags(d) @ K @ sp.diags(1.0 / d)
    return float(sp.linalg.norm(conj - K0) / sp.linalg.norm(K0))


def reflection_permutation(domain: DiscreteDomain) -> np.ndarray:
    """Index map of ``s -> -s`` on interior unknowns."""
    n_s, N = domain.M - 1, domain.N
    idx = np.arange(n_s * N).reshape(n_s, N)
    return idx[::-1].ravel()


def reflection_defect(real: EllipticRealization) -> float:
    """``||W_H^{-1} K0^H W_H - Pi K0 Pi|| / ||K0||`` (Frobenius)."""
    w = inner_products(real.domain).W_H
    K0 = real.matrix
    adj = sp.diags(1.0 / w) @ K0.conj().T @ sp.diags(w)
    p = reflection_permutation(real.domain)
    refl = K0[p][:, p]
    return float(sp.linalg.norm(adj - refl) / sp.linalg.norm(K0))


@dataclass(frozen=True)
class SectorialityReport:
    min_herm_eig: float
    numerical_range_angle: float
    seed: int
    n_samples: int


def hermitian_part(A):
    return 0.5 * (A + A.conj().T)


def block_inertia_below(diag, upper, sigma: float) -> int:
    """Number of eigenvalues below ``sigma`` of a Hermitian block-tridiagonal matrix.

    Uses block LDL^H: the inertia of the matrix equals the summed inertia of
    the Schur-complement pivots (Haynsworth additivity).
    """
    count = 0
    D = None
    for j, A in enumerate(diag):
        A = A - sigma * np.eye(A.shape[0])
        if j > 0:
            B = upper[j - 1]
            A = A - B.conj().T @ np.linalg.solve(D, B)
        D = 0.5 * (A + A.conj().T)
        count += int(np.sum(np.linalg.eigvalsh(D) < 0))
    return count


def min_block_hermitian_eigenvalue(diag, upper, rtol: float = 1e-12) -> float:
    """Smallest eigenvalue by inertia bisection between Gershgorin bounds."""
    lo, hi = np.inf, -np.inf
    for j, A in enumerate(diag):
        r = np.sum(np.abs(A), axis=1) - np.abs(np.diag(A))
        if j > 0:
            r = r + np.sum(np.abs(upper[j - 1]), axis=0)
        if j < len(diag) - 1:
            r = r + np.sum(np.abs(upper[j]), axis=1)
        c = np.real(np.diag(A))
        lo, hi = min(lo, float(np.min(c - r))), max(hi, float(np.max(c + r)))
    scale = max(abs(lo), abs(hi))
    while hi - lo > rtol * scale:
        mid = 0.5 * (lo + hi)
        if block_inertia_below(diag, upper, mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def weighted_hermitian_blocks(real: EllipticRealization):
    """Diagonal and super-diagonal blocks of ``Herm(W_H K0)``."""
    dom = real.domain
    w = dom.ws * dom.wy
    diag = [hermitian_part(w[:, None] * D) for D in real.diag]
    upper = [0.5 * (w[:, None] * real.upper[j] + (w[:, None] * real.lower[j + 1]).conj().T)
             for j in range(len(real.diag) - 1)]
    return diag, upper


def sectoriality_defect(real: EllipticRealization, n_samples: int = 1000,
                        seed: int = DEFAULT_SEED) -> SectorialityReport:
    """Certificate of discrete sectoriality of ``W_H K0``.

    Reports the smallest eigenvalue of its Hermitian part and the largest
    ``|Im q| / Re q`` over random unit vectors, ``q = u^H W_H K0 u``.
    """
    w = inner_products(real.domain).W_H
    B = sp.diags(w) @ real.matrix
    lam = min_block_hermitian_eigenvalue(*weighted_hermitian_blocks(real))
    rng = np.random.default_rng(seed)
    n = B.shape[0]
    U = rng.standard_normal((n, n_samples)) + 1j * rng.standard_normal((n, n_samples))
    U /= np.linalg.norm(U, axis=0)
    q = np.einsum("ij,ij->j", U.conj(), B @ U)
    angle = float(np.max(np.abs(q.imag) / q.real)) if np.all(q.real > 0) else np.inf
    return SectorialityReport(lam, angle, seed, n_samples)
