import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from calderon_states.errors import OracleDomainError
from calderon_states.oracle import (
    calderon_closed_form,
    dirichlet_green,
    ground_state_bound,
    ground_state_projector,
    kinv_closed_form,
    mode_spectrum,
)


def test_spectrum_unit_circle():
    spec = mode_spectrum(N=8)
    expect = np.sqrt([1, 2, 2, 5, 5, 10, 10, 17])
    np.testing.assert_allclose(np.sort(spec.eps), expect, rtol=1e-13)
    assert spec.residual() <= 1e-10
    assert spec.orthonormality_defect() <= 1e-12


def test_spectrum_two_points():
    np.testing.assert_allclose(mode_spectrum(N=2, m2=4.0).eps, [2.0, np.sqrt(5.0)], rtol=1e-14)


def test_spectrum_variable_metric():
    spec = mode_spectrum(h0=(1.0, 0.4, 0.1), V=(0.2, 0.3), N=16)
    assert spec.residual() <= 1e-10
    assert spec.orthonormality_defect() <= 1e-12
    assert np.all(spec.eps**2 >= 1.0 - 1e-12 + 0.2 - 0.3)


def test_nonpositive_spectrum_rejected():
    with pytest.raises(OracleDomainError):
        mode_spectrum(N=8, m2=0.0)


def test_kinv_zero():
    assert kinv_closed_form(1.5, 1.0, lambda s: 0.0)(0.3) == 0


@settings(max_examples=8, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(-2, 2), k=st.floats(0.5, 4), eps=st.floats(0.3, 6))
def test_kinv_dirichlet(a, b, k, eps):
    T = 1.0
    sol = kinv_closed_form(eps, T, lambda s: a * np.sin(k * s) + b * np.cos(s) + 1.0)
    assert abs(sol(T)) <= 1e-9 and abs(sol(-T)) <= 1e-9


def test_kinv_solves_the_equation():
    eps, T = 2.0, 1.0
    v = lambda s: np.sin(3 * s) + s**2
    sol = kinv_closed_form(eps, T, v)
    h = 1e-3
    for s in np.linspace(-0.9, 0.9, 7):
        lhs = -(sol(s + h) - 2 * sol(s) + sol(s - h)) / h**2 + eps**2 * sol(s)
        assert abs(lhs - v(s)) <= 1e-6


def test_kinv_matches_green_function():
    from scipy import integrate

    eps, T = 1.3, 0.8
    v = lambda s: np.exp(s) * np.cos(2 * s)
    sol = kinv_closed_form(eps, T, v)
    for s in (-0.5, 0.1, 0.6):
        ref = integrate.quad(lambda x: dirichlet_green(eps, T, s, x) * v(x), -T, T, points=[s], epsabs=1e-13)[0]
        assert abs(sol(s) - ref) <= 1e-10


def test_closed_form_numbers():
    C = calderon_closed_form(1.0, 1.0)
    np.testing.assert_allclose(C, 0.5 * np.array([[1, 0.761594155955765], [1.313035285499331, 1]]), rtol=1e-14)


@settings(max_examples=50, deadline=None)
@given(eps=st.floats(0.05, 30), T=st.floats(0.05, 10))
def test_closed_form_idempotent(eps, T):
    C = calderon_closed_form(eps, T)
    scale = max(1.0, np.abs(C).max()) ** 2
    assert np.max(np.abs(C @ C - C)) <= 1e-14 * scale


def test_large_T_limit():
    np.testing.assert_allclose(calderon_closed_form(1.0, 20.0), 0.5 * np.ones((2, 2)), atol=1e-15)


def test_ground_state_projector():
    G = ground_state_projector(2.0)
    np.testing.assert_allclose(G, 0.5 * np.array([[1, 0.5], [2, 1]]))
    np.testing.assert_allclose(G @ G, G, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(eps=st.floats(0.2, 20), T=st.floats(0.1, 10))
def test_ground_state_bound(eps, T):
    if eps * T < 1:
        return
    diff = np.linalg.norm(calderon_closed_form(eps, T) - ground_state_projector(eps), 2)
    assert diff <= ground_state_bound(eps, T) + 1e-15


@pytest.mark.parametrize("bad", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
def test_closed_form_domain(bad):
    with pytest.raises(OracleDomainError):
        calderon_closed_form(*bad)
