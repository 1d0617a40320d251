import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from calderon_states.discretize import build_domain, inner_products
from calderon_states.elliptic import (
    BlockTridiagonalLU,
    assemble_K0,
    block_inertia_below,
    conjugation_defect,
    min_block_hermitian_eigenvalue,
    reflection_defect,
    sectoriality_defect,
    solve_K0,
    weighted_hermitian_blocks,
)
from calderon_states.errors import RealizationError
from calderon_states.geometry import MetricFamily
from calderon_states.oracle import dirichlet_green


def _random_blocks(rng, n, b, shift):
    def m():
        return rng.standard_normal((b, b)) + 1j * rng.standard_normal((b, b))
    diag = [m() + shift * np.eye(b) for _ in range(n)]
    return [m() for _ in range(n)], diag, [m() for _ in range(n)]


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 8), b=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_block_lu_matches_dense(n, b, seed):
    from calderon_states.elliptic import blocks_to_sparse

    rng = np.random.default_rng(seed)
    lower, diag, upper = _random_blocks(rng, n, b, 6.0 * b)
    A = blocks_to_sparse(lower, diag, upper).toarray()
    rhs = rng.standard_normal((n * b, 3)) + 1j * rng.standard_normal((n * b, 3))
    x = BlockTridiagonalLU.factor(lower, diag, upper).solve(rhs)
    np.testing.assert_allclose(A @ x, rhs, atol=1e-10)


def test_singular_pivot_raises():
    z = np.zeros((2, 2))
    with pytest.raises(RealizationError):
        BlockTridiagonalLU.factor([z, z], [z, np.eye(2)], [z, z])


def test_single_mode_stencil():
    # h0 = 1, m^2 = 1, N = 4: the k = +-1 modes have eps^2 = 2
    dom = build_domain(1.0, 4, 4, MetricFamily.ultrastatic())
    K = assemble_K0(dom).matrix.toarray()
    mode = np.exp(1j * dom.y) / 2
    P = np.kron(np.eye(3), mode[None, :].conj())
    E = np.kron(np.eye(3), mode[:, None])
    ds = 0.5
    expect = np.array([[2 / ds**2 + 2, -1 / ds**2, 0], [-1 / ds**2, 2 / ds**2 + 2, -1 / ds**2],
                       [0, -1 / ds**2, 2 / ds**2 + 2]])
    np.testing.assert_allclose(P @ K @ E, expect, atol=1e-12)


@pytest.mark.parametrize("fixture", ["ultra", "expo", "variable"])
def test_inverse_consistency(fixture, request, rng):
    real = getattr(request.getfixturevalue(fixture), "real")
    w = rng.standard_normal(real.domain.n_interior) + 1j * rng.standard_normal(real.domain.n_interior)
    u = solve_K0(real, real.apply(w))
    assert np.linalg.norm(u - w) / np.linalg.norm(w) <= 1e-10
    x = solve_K0(real, w)
    assert np.linalg.norm(real.apply(x) - w) <= 1e-10 * (np.linalg.norm(w) + np.linalg.norm(x) * sp.linalg.norm(real.K0))


def test_zero_rhs(ultra):
    assert np.all(solve_K0(ultra.real, np.zeros(ultra.domain.n_interior)) == 0)


def test_rhs_dimension_checked(ultra):
    with pytest.raises(ValueError):
        solve_K0(ultra.real, np.zeros(7))


def test_point_source_matches_green_function():
    # unit mode k = 0 (eps = 1); discrete delta at s = 0 has height 1/ds
    errs = []
    for M in (100, 200):
        dom = build_domain(1.0, M, 4, MetricFamily.ultrastatic())
        real = assemble_K0(dom)
        rhs = np.zeros((M - 1, 4), complex)
        rhs[dom.zero_index] = 1.0 / dom.ds
        u = dom.reshape(solve_K0(real, rhs.ravel()))[:, 0]
        errs.append(np.max(np.abs(u - dirichlet_green(1.0, 1.0, dom.s_interior, 0.0))))
    assert errs[0] < 1e-4
    assert 3.0 <= errs[0] / errs[1] <= 5.0


def test_manufactured_solution():
    # u = sin(pi (s + T)/(2T)) e^{iy}: K0 u = ((pi/2T)^2 + 2) u for h0 = 1, m = 1
    errs = []
    for M in (100, 200):
        dom = build_domain(1.0, M, 8, MetricFamily.ultrastatic())
        real = assemble_K0(dom)
        s, y = dom.s_interior[:, None], dom.y[None, :]
        u = (np.sin(np.pi * (s + 1) / 2) * np.exp(1j * y)).ravel()
        errs.append(np.max(np.abs(real.apply(u) - ((np.pi / 2) ** 2 + 2) * u)))
    assert errs[0] < 1e-3
    assert 3.0 <= errs[0] / errs[1] <= 5.0


@pytest.mark.parametrize("fixture", ["ultra", "expo", "variable"])
def test_reflection(fixture, request):
    assert reflection_defect(request.getfixturevalue(fixture).real) <= 1e-12


def test_reflection_negative_control():
    fam = MetricFamily.exponential(0.2)
    dom = build_domain(1.0, 10, 8, fam, s_shift=0.5)
    assert reflection_defect(assemble_K0(dom, fam)) > 1e-3


@pytest.mark.parametrize("fam,T", [(MetricFamily.exponential(0.2, h0=(1.0, 0.3)), 2.0),
                                   (MetricFamily.polynomial(0.1, h0=(1.0, 0.2)), 2.0)])
def test_dhat_conjugation(fam, T):
    dom = build_domain(T, 60, 8, fam)
    assert conjugation_defect(dom, fam) <= 1e-10


def test_inertia_bisection_matches_dense():
    fam = MetricFamily.exponential(0.2, h0=(1.0, 0.3))
    dom = build_domain(2.0, 24, 8, fam)
    real = assemble_K0(dom, fam)
    W = inner_products(dom).W_H
    B = (sp.diags(W) @ real.matrix).toarray()
    dense = np.linalg.eigvalsh(0.5 * (B + B.conj().T))
    blocks = weighted_hermitian_blocks(real)
    assert abs(min_block_hermitian_eigenvalue(*blocks) - dense[0]) <= 1e-10 * np.max(np.abs(dense))
    sigma = 0.5 * (dense[3] + dense[4])
    assert block_inertia_below(*blocks, sigma) == 4


def test_sectoriality_ultrastatic(ultra):
    rep = sectoriality_defect(ultra.real)
    assert rep.min_herm_eig > 0
    assert rep.numerical_range_angle <= 1e-12
    assert rep.seed == 0x5EED and rep.n_samples == 1000


def test_sectoriality_exponential_certificate():
    fam = MetricFamily.exponential(0.2)
    rep = sectoriality_defect(assemble_K0(build_domain(2.0, 100, 16, fam), fam))
    assert rep.min_herm_eig > 0
    assert 0 < rep.numerical_range_angle <= 1


def test_sectoriality_is_seeded(ultra):
    a = sectoriality_defect(ultra.real, n_samples=50, seed=7)
    b = sectoriality_defect(ultra.real, n_samples=50, seed=7)
    assert a == b
