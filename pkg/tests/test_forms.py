import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from preqind import forms

mat3 = arrays(np.float64, (3, 3), elements=st.floats(-2, 2))


@given(mat3, arrays(np.float64, 3, elements=st.floats(-2, 2)))
def test_exterior_derivative_of_linear_form(A, x):
    # alpha_i(x) = sum_j A_ij x_j  =>  d alpha(e_j, e_k) = A_kj - A_jk
    alpha = forms.OneForm(3, lambda y: A @ y)
    gram = forms.exterior_derivative_gram(alpha, x)
    assert np.allclose(gram, A.T - A, atol=1e-8)


def test_d_of_p_dtheta_is_area_form():
    alpha = forms.OneForm(2, lambda y: np.array([0.0, y[0]]))
    assert np.allclose(forms.exterior_derivative_gram(alpha, np.array([0.3, 1.2])), [[0, 1], [-1, 0]], atol=1e-9)
    v, w = np.array([1.0, 2.0]), np.array([-0.5, 0.25])
    assert np.isclose(forms.exterior_derivative(alpha, np.zeros(2), v, w), v[0] * w[1] - v[1] * w[0])


def test_d_of_exact_form_vanishes():
    # alpha = d(x y z)
    alpha = forms.OneForm(3, lambda y: np.array([y[1] * y[2], y[0] * y[2], y[0] * y[1]]))
    assert np.allclose(forms.exterior_derivative_gram(alpha, np.array([0.4, -1.0, 2.0])), 0.0, atol=1e-8)


def test_jacobian_of_linear_map(rng):
    A = rng.standard_normal((2, 4))
    assert np.allclose(forms.jacobian(lambda y: A @ y, rng.standard_normal(4)), A, atol=1e-8)


def test_rank_and_nullspace():
    A = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])
    assert forms.rank(A) == 1
    N = forms.nullspace(A)
    assert N.dim == 2 and np.allclose(A @ N.basis, 0.0)


@given(arrays(np.float64, (5, 2), elements=st.floats(-3, 3)))
def test_principal_angles_self_zero(V):
    S = forms.Subspace.span(V)
    assert np.max(forms.principal_angles(S, S), initial=0.0) < 1e-7


def test_principal_angles_orthogonal():
    S1 = forms.Subspace.span(np.array([[1.0], [0.0], [0.0]]))
    S2 = forms.Subspace.span(np.array([[0.0], [1.0], [0.0]]))
    assert np.isclose(forms.principal_angles(S1, S2)[0], np.pi / 2)
    assert not forms.subspace_equal(S1, S2)


def test_symplectic_orthogonal_of_lagrangian_is_itself():
    J = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
    L = forms.Subspace.span(np.eye(4)[:, :2])
    assert forms.subspace_equal(forms.symplectic_orthogonal(J, L), L)


def test_annihilator_dimension(rng):
    S = forms.Subspace.span(rng.standard_normal((5, 2)))
    Ann = forms.annihilator(S)
    assert Ann.dim == 3 and np.allclose(Ann.basis.T @ S.basis, 0.0, atol=1e-12)


@given(st.floats(-100, 100))
def test_wrap_angle_range(t):
    w = forms.wrap_angle(t)
    assert -np.pi - 1e-12 <= w <= np.pi + 1e-12
    assert np.isclose(np.exp(1j * w), np.exp(1j * t))


def test_two_form_eval():
    w = forms.TwoForm(2, lambda y: np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert w.eval(np.zeros(2), np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(1.0)
