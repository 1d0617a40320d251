"""Trace maps, boundary matrices and the discrete Calderon projectors.

Cauchy data are pairs ``(f0, f1)`` of circle grid functions stacked as a
``2N`` vector.  The centered trace ``gamma u = (u(0), -d_s u(0))`` and its exact
discrete adjoint ``gamma*`` (w.r.t. ``W_H`` and ``W_S``) realize the layer
source; the one-sided traces ``gamma+-`` extrapolate from nodes strictly
inside ``s > 0`` resp. ``s < 0``.  The node ``s = 0`` carries the layer source,
so the solution there is not a limit of either side.

The projectors are

    C0+- = -+ gamma+- K0^{-1} gamma* S0,      C+- = R^{-1} C0+- R.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from calderon_states.discretize import DiscreteDomain, inner_products
from calderon_states.elliptic import EllipticRealization, assemble_K, assemble_K0, dhat_on_interior
from calderon_states.geometry import MetricFamily, coeffs_at

TRACE_WIDTH = 5


def extrapolation_weights(nodes) -> np.ndarray:
    """Weights giving ``p(0)`` for the polynomial interpolating values at ``nodes``."""
    nodes = np.asarray(nodes, dtype=float)
    V = np.vander(nodes, increasing=True).T
    e0 = np.zeros(len(nodes))
    e0[0] = 1.0
    return np.linalg.solve(V, e0)


@dataclass(frozen=True)
class TraceMaps:
    gamma: sp.csr_matrix = field(repr=False)
    gamma_plus: sp.csr_matrix = field(repr=False)
    gamma_minus: sp.csr_matrix = field(repr=False)
    gamma_star: sp.csr_matrix = field(repr=False)
    width: int = TRACE_WIDTH


def _trace_matrix(domain: DiscreteDomain, rows_value, rows_deriv) -> sp.csr_matrix:
    """Assemble a ``2N x n_interior`` trace from per-``s``-node stencil weights."""
    N, n = domain.N, domain.n_interior
    G = sp.lil_matrix((2 * N, n), dtype=float)
    for k in range(N):
        for j, c in rows_value:
            G[k, j * N + k] += c
        for j, c in rows_deriv:
            G[N + k, j * N + k] += c
    return G.tocsr()


def trace_maps(domain: DiscreteDomain, width: int = TRACE_WIDTH,
               slab_weights: np.ndarray | None = None) -> TraceMaps:
    """Discrete traces on the interface ``s = 0``.

    One-sided values extrapolate ``u`` from nodes ``1..width`` (in units of
    ``ds``) of the respective side.  One-sided normal derivatives extrapolate
    the midpoint differences ``(u_{m+1} - u_m)/ds`` located at ``m + 1/2``,
    ``m = 1..width``.  Both are second-order for smooth ``u``.

    ``slab_weights`` overrides the ``W_H`` diagonal used for ``gamma*`` (the
    unreduced operator lives in a differently weighted space).
    """
    j0, ds = domain.zero_index, domain.ds
    if width + 1 > domain.M // 2 - 1:
        raise ValueError(f"trace stencil width {width} needs M >= {2 * width + 4}, got M = {domain.M}")
    wv = extrapolation_weights(np.arange(1, width + 1))
    wd = extrapolation_weights(np.arange(1, width + 1) + 0.5)

    deriv = np.zeros(width + 2)  # d_s u(0+) ~ sum_m deriv[m] u_m
    for m, c in enumerate(wd, start=1):
        deriv[m + 1] += c / ds
        deriv[m] -= c / ds
    value = [(k, wv[k - 1]) for k in range(1, width + 1)]
    nz = [(m, deriv[m]) for m in range(1, width + 2)]

    gamma = _trace_matrix(domain, [(j0, 1.0)],
                          [(j0 + 1, -0.5 / ds), (j0 - 1, 0.5 / ds)])
    plus = _trace_matrix(domain, [(j0 + k, c) for k, c in value],
                         [(j0 + m, -c) for m, c in nz])
    # mirror image: d_s at 0- is minus the outward derivative on the left
    minus = _trace_matrix(domain, [(j0 - k, c) for k, c in value],
                          [(j0 - m, c) for m, c in nz])
    weights = inner_products(domain)
    W_H = weights.W_H if slab_weights is None else slab_weights
    star = sp.diags(1.0 / W_H) @ gamma.T @ sp.diags(weights.W_S)
    return TraceMaps(gamma, plus, minus, star.tocsr(), width)


def block_matrix(a, b, c, d) -> np.ndarray:
    """``2N x 2N`` matrix from four ``N``-vectors (diagonal blocks) or scalars."""
    return np.block([[np.diag(a), np.diag(b)], [np.diag(c), np.diag(d)]])


@dataclass(frozen=True)
class BoundaryMatrices:
    q: np.ndarray = field(repr=False)
    S0: np.ndarray = field(repr=False)
    S: np.ndarray = field(repr=False)
    R: np.ndarray = field(repr=False)
    sign_resolution: int = 1
    rho: np.ndarray = field(repr=False, default=None)

    @property
    def R_inv(self) -> np.ndarray:
        n = self.R.shape[0] // 2
        Ri = self.R.copy()
        Ri[n:, :n] *= -1
        return Ri


def boundary_matrices(family: MetricFamily, domain: DiscreteDomain,
                      sign_resolution: int | None = None) -> BoundaryMatrices:
    """``q``, ``S0`` and the sign-resolved ``R``, ``S``.

    ``R = [[1, 0], [sigma * d_s dhat(0), 1]]`` and ``S = R^H S0 R``, so
    ``S = [[-sigma 2i d_t d(0), -1], [1, 0]]``.  With ``sign_resolution=None``
    ``sigma`` is chosen by :func:`resolve_sign`.
    """
    if sign_resolution is None:
        sign_resolution = resolve_sign(domain, family)
    if sign_resolution not in (1, -1):
        raise ValueError("sign_resolution must be +1 or -1")
    N = domain.N
    one, zero = np.ones(N), np.zeros(N)
    c = coeffs_at(family, 0.0, domain.y)
    rho = 1j * c.dt_d0  # d_s dhat(0) = i d_t d(0)
    R = block_matrix(one, zero, sign_resolution * rho, one)
    S0 = block_matrix(zero, -one, one, zero)
    return BoundaryMatrices(
        q=block_matrix(zero, one, one, zero),
        S0=S0,
        S=R.conj().T @ S0 @ R,
        R=R,
        sign_resolution=sign_resolution,
        rho=rho,
    )


@dataclass
class CalderonPair:
    Cplus: np.ndarray = field(repr=False)
    Cminus: np.ndarray = field(repr=False)
    C0plus: np.ndarray = field(repr=False)
    C0minus: np.ndarray = field(repr=False)
    W_S: np.ndarray = field(repr=False)
    domain: DiscreteDomain
    family: MetricFamily
    sign_resolution: int = 1
    meta: dict = field(default_factory=dict)


def _projector_columns(real: EllipticRealization, traces: TraceMaps, S: np.ndarray):
    source = traces.gamma_star @ S
    U = real.solve(source)
    return -(traces.gamma_plus @ U), traces.gamma_minus @ U


def calderon_pair(real: EllipticRealization, traces: TraceMaps,
                  mats: BoundaryMatrices) -> CalderonPair:
    """Projectors from ``2N`` solves against the factorized ``K0``."""
    C0p, C0m = _projector_columns(real, traces, mats.S0)
    Ri = mats.R_inv
    return CalderonPair(
        Cplus=Ri @ C0p @ mats.R,
        Cminus=Ri @ C0m @ mats.R,
        C0plus=C0p,
        C0minus=C0m,
        W_S=inner_products(real.domain).W_S,
        domain=real.domain,
        family=real.family,
        sign_resolution=mats.sign_resolution,
        meta={"M": real.domain.M, "N": real.domain.N, "T": real.domain.T,
              "trace_width": traces.width},
    )


def unreduced_slab_weights(domain: DiscreteDomain, family: MetricFamily) -> np.ndarray:
    """``W_H`` for the unreduced operator: ``ds * (2 pi/N) |h_{is}|^{1/2}``."""
    f = np.abs(family.time_factor(1j * domain.s_interior))
    return np.kron(domain.ws * np.sqrt(f), domain.wy)


def direct_pair(domain: DiscreteDomain, family: MetricFamily, S: np.ndarray,
                real_K: EllipticRealization | None = None):
    """``C+- = -+ gamma+- K^{-1} gamma* S`` straight from the unreduced operator.

    The traces are the plain ones and ``gamma*`` is the adjoint for the
    ``|h_{is}|^{1/2}``-weighted slab product; nothing here uses ``dhat`` or ``R``.
    """
    real_K = real_K or assemble_K(domain, family)
    traces = trace_maps(domain, slab_weights=unreduced_slab_weights(domain, family))
    return _projector_columns(real_K, traces, S)


def resolve_sign(domain: DiscreteDomain, family: MetricFamily,
                 real_K: EllipticRealization | None = None) -> int:
    """Pick the sign of ``R``'s off-diagonal block that makes the direct pair sum to 1.

    Ties (e.g. ultrastatic families, where the block vanishes) resolve to ``+1``.
    """
    c = coeffs_at(family, 0.0, domain.y)
    if np.allclose(c.dt_d0, 0.0):
        return 1
    real_K = real_K or assemble_K(domain, family)
    W = inner_products(domain).W_S
    defects = {}
    for sigma in (1, -1):
        mats = boundary_matrices(family, domain, sign_resolution=sigma)
        Cp, Cm = direct_pair(domain, family, mats.S, real_K)
        defects[sigma] = weighted_norm(Cp + Cm - np.eye(2 * domain.N), W)
    return min(defects, key=lambda k: (defects[k], -k))


def conjugated_pair(domain: DiscreteDomain, family: MetricFamily, mats: BoundaryMatrices,
                    real_K: EllipticRealization | None = None):
    """Pair from the unreduced ``K`` with traces and source transported by ``dhat``.

    ``gamma+-_K u = R^{-1} gamma+- (dhat u)`` and ``gamma*_K = dhat^{-1} gamma* R^{-H}``,
    so that ``gamma*_K S = dhat^{-1} gamma* S0 R``.  Agreement with
    ``R^{-1} C0 R`` checks the assembly of ``K`` against ``K0`` and the
    algebra of ``R`` and ``S``.
    """
    real_K = real_K or assemble_K(domain, family)
    traces = trace_maps(domain)
    d = dhat_on_interior(domain, family)
    R_inv_H = np.linalg.inv(mats.R).conj().T
    source = (traces.gamma_star @ (R_inv_H @ mats.S)) / d[:, None]
    U = d[:, None] * real_K.solve(source)
    Ri = mats.R_inv
    return -(Ri @ (traces.gamma_plus @ U)), Ri @ (traces.gamma_minus @ U)


def weighted_norm(X: np.ndarray, w: np.ndarray) -> float:
    """Operator norm of ``X`` on the ``w``-weighted space."""
    r = np.sqrt(w)
    return float(np.linalg.norm(r[:, None] * X / r[None, :], 2))


def build_pair(domain: DiscreteDomain, family: MetricFamily | None = None,
               sign_resolution: int | None = None):
    """Assemble, factorize and project; returns ``(pair, realization, traces, mats)``."""
    family = family or domain.family
    real = assemble_K0(domain, family)
    traces = trace_maps(domain)
    mats = boundary_matrices(family, domain, sign_resolution)
    return calderon_pair(real, traces, mats), real, traces, mats


def green_identity_defect(real: EllipticRealization, traces: TraceMaps,
                          u: np.ndarray, v: np.ndarray, mats: BoundaryMatrices | None = None) -> float:
    """Discrete defect of the half-slab Green identity on ``s >= 0``.

    ``u`` and ``v`` are full-grid arrays of shape ``(M + 1, N)`` vanishing at
    ``s = +-T``.  Returns
    ``|(v|K0 u)_+ - (K0* v|u)_+ - (gamma+ v|S0 gamma+ u)_S|`` with trapezoid
    weights in ``s`` (half weight on ``s = 0``).
    """
    dom = real.domain
    N, j0 = dom.N, dom.zero_index
    u_in, v_in = u[1:-1].ravel(), v[1:-1].ravel()
    W_H = inner_products(dom).W_H
    K0u = real.apply(u_in)
    K0adj_v = (real.matrix.conj().T @ (W_H * v_in)) / W_H
    half = np.ones(dom.M - 1)
    half[:j0] = 0.0
    half[j0] = 0.5
    omega = np.kron(half * dom.ws, dom.wy)
    lhs = np.vdot(v_in, omega * K0u) - np.vdot(K0adj_v, omega * u_in)
    S0 = mats.S0 if mats is not None else block_matrix(np.zeros(N), -np.ones(N), np.ones(N), np.zeros(N))
    W_S = inner_products(dom).W_S
    gu, gv = traces.gamma_plus @ u_in, traces.gamma_plus @ v_in
    rhs = np.vdot(gv, W_S * (S0 @ gu))
    return float(abs(lhs - rhs))


@dataclass(frozen=True)
class IdentityReport:
    sum_defect: float
    herm_defect: float
    pos_min_eig_plus: float
    pos_min_eig_minus: float
    pos_norm_plus: float
    pos_norm_minus: float
    idem_defect: float

    def positivity_ok(self, floor: float = 1e-6) -> bool:
        return (self.pos_min_eig_plus >= -floor * self.pos_norm_plus
                and self.pos_min_eig_minus >= -floor * self.pos_norm_minus)


def _herm_min(A: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (A + A.conj().T))[0])


def identity_report(pair: CalderonPair, mats: BoundaryMatrices) -> IdentityReport:
    """Measure the sum, hermiticity, positivity and idempotence identities.

    Operator norms are taken on the ``W_S``-weighted Cauchy-data space.
    """
    W = pair.W_S
    Cp, Cm = pair.Cplus, pair.Cminus
    eye = np.eye(Cp.shape[0])
    Fp = W[:, None] * (mats.q @ Cp)
    Fm = -W[:, None] * (mats.q @ Cm)
    return IdentityReport(
        sum_defect=weighted_norm(Cp + Cm - eye, W),
        herm_defect=float(np.linalg.norm(Fp - Fp.conj().T, 2) / np.linalg.norm(Fp, 2)),
        pos_min_eig_plus=_herm_min(Fp),
        pos_min_eig_minus=_herm_min(Fm),
        pos_norm_plus=float(np.linalg.norm(Fp, 2)),
        pos_norm_minus=float(np.linalg.norm(Fm, 2)),
        idem_defect=weighted_norm(Cp @ Cp - Cp, W),
    )


def adjointness_defect(domain: DiscreteDomain, traces: TraceMaps, n_pairs: int = 100,
                       seed: int = 0x5EED) -> float:
    """Largest ``|(gamma* f|u)_{W_H} - (f|gamma u)_{W_S}| / (|f| |u|)`` over random pairs."""
    w = inner_products(domain)
    rng = np.random.default_rng(seed)
    n, m = domain.n_interior, 2 * domain.N
    worst = 0.0
    for _ in range(n_pairs):
        f = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        lhs = np.vdot(traces.gamma_star @ f, w.W_H * u)
        rhs = np.vdot(f, w.W_S * (traces.gamma @ u))
        scale = np.sqrt(np.vdot(f, w.W_S * f).real * np.vdot(u, w.W_H * u).real)
        worst = max(worst, float(abs(lhs - rhs) / scale))
    return worst


def charge_form_defect(mats: BoundaryMatrices) -> float:
    """``||R^H q R - q||`` (Frobenius)."""
    return float(np.linalg.norm(mats.R.conj().T @ mats.q @ mats.R - mats.q))


def slab_norm(domain: DiscreteDomain, u: np.ndarray) -> float:
    """``W_H`` norm of a full-grid ``(M + 1, N)`` function (interior nodes)."""
    w = inner_products(domain).W_H
    return float(np.sqrt(np.sum(w * np.abs(u[1:-1].ravel()) ** 2)))


def green_test_functions(domain: DiscreteDomain) -> tuple[np.ndarray, np.ndarray]:
    """Smooth manufactured ``(u, v)`` on the full grid, supported in ``|s| < 0.8 T``.

    Neither is even in ``s``, so the interface term of the Green identity is
    exercised.
    """
    s, y = domain.s[:, None], domain.y[None, :]
    x = s / (0.8 * domain.T)
    inside = np.abs(x) < 1
    bump = np.where(inside, np.exp(-1.0 / np.where(inside, 1.0 - x**2, 1.0)), 0.0)
    u = bump * (1.0 + 0.5 * s + s**2) * (1.0 + np.cos(y) + 0.3j * np.sin(2 * y))
    v = bump * (1.0 - s + 0.2 * s**3) * (1.0 + np.sin(y) + 0.5 * np.cos(y))
    return u, v


def relative_green_defect(real: EllipticRealization, traces: TraceMaps,
                          mats: BoundaryMatrices | None = None) -> float:
    """Green-identity defect of :func:`green_test_functions` divided by ``|u| |v|``."""
    u, v = green_test_functions(real.domain)
    d = green_identity_defect(real, traces, u, v, mats)
    return d / (slab_norm(real.domain, u) * slab_norm(real.domain, v))
