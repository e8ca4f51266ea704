import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from preqind import example_solvable as ex
from preqind import forms
from preqind import prequantum as pq

from . import oracles

seeds = st.integers(0, 2**31 - 1)
lams = st.floats(-2, 2, allow_nan=False)


def contact_spaces():
    return [ex.preq_Xprime(), ex.preq_Xlambda(0.0), ex.preq_Xlambda(0.3), ex.preq_Xlambda(0.7)]


@pytest.mark.parametrize("S", contact_spaces(), ids=lambda S: S.name)
@given(seed=seeds)
def test_reeb_field_and_contact(S, seed):
    rng = np.random.default_rng(seed)
    x = S.sample(rng)
    assert pq.is_contact(S, x)
    R = pq.reeb(S, x)
    # varpi = (...) + d theta_z and d varpi has no theta_z dependence: R = d/d theta_z
    assert np.allclose(R, np.eye(3)[2], atol=1e-9)
    r1, r2 = pq.reeb_residuals(S, x, rng)
    assert r1 < 1e-9 and r2 < 1e-6


@pytest.mark.parametrize("S", contact_spaces(), ids=lambda S: S.name)
@given(seed=seeds)
def test_lifted_action_preserves_varpi_and_commutes_with_circle(S, seed):
    rng = np.random.default_rng(seed)
    x = S.sample(rng)
    g = S.group.random_element(rng, box=3.0)
    v = rng.standard_normal(3)
    assert pq.action_pullback_residual(S, g, x, v, h=1e-5) < 1e-6
    assert pq.circle_commutation_residual(S, g, rng.uniform(0, 2 * np.pi), x) < 1e-10


@given(lam=lams, seed=seeds)
def test_preq_moment_matches_hand_computation(lam, seed):
    S = ex.preq_Xlambda(lam)
    x = S.sample(np.random.default_rng(seed))
    assert np.allclose(pq.preq_moment_vector(S, x), oracles.preq_moment_Xlambda(x[0], x[1]), atol=1e-8)


def test_preq_moment_of_Xprime_is_coadjoint_orbit(rng):
    S = ex.preq_Xprime()
    for _ in range(5):
        x = S.sample(rng)
        p, s = x[:2]
        assert np.allclose(pq.preq_moment_vector(S, x), oracles.dual_coeffs(p, np.exp(1j * s), s), atol=1e-8)


def test_circle_action_is_reeb_flow(rng):
    for S in contact_spaces():
        assert pq.circle_flow_residual(S, S.sample(rng)) < 1e-6


def test_dual_flips_form_sign_and_moment(rng):
    S = ex.preq_Xlambda(0.3)
    D = pq.preq_dual(S)
    x = S.sample(rng)
    assert np.allclose(D.varpi.coeffs(x), -np.asarray(S.varpi.coeffs(x)))
    assert D.circle_sign == -S.circle_sign
    assert np.allclose(pq.preq_moment_vector(D, x), -pq.preq_moment_vector(S, x), atol=1e-8)
    # the circle still acts by the Reeb flow of the dual form
    assert pq.circle_flow_residual(D, x) < 1e-6


def test_box_product_is_prequantum_and_gauge_invariant(rng):
    S1, S2 = pq.preq_dual(ex.preq_Xlambda(0.3)), ex.res_preq_Xprime_G()
    B = pq.box_product(S1, S2)
    y = B.space.sample(rng)
    assert pq.is_contact(B.space, y)
    r1, r2 = pq.reeb_residuals(B.space, y, rng)
    assert r1 < 1e-9 and r2 < 1e-6
    # closed-form moment (sum over the diagonal) agrees with varpi on fundamental fields
    assert np.allclose(B.space.momentum(y), pq.preq_moment_vector(B.space, y), atol=1e-7)
    # moving along the anti-diagonal circle does not change the class
    x1, x2 = B.lift(y)
    t = 0.9
    assert np.allclose(B.space.diff(B.gauge(S1.rotate(-t, x1), S2.rotate(t, x2)), y), 0.0, atol=1e-12)
    g = S1.group.random_element(rng, box=2.0)
    assert pq.action_pullback_residual(B.space, g, y, rng.standard_normal(B.space.chart_dim), h=1e-5) < 1e-6


@given(lam=lams, p=st.floats(-2, 2))
def test_holonomy_of_theta_loop(lam, p):
    z = ex.holonomy_Xlambda(lam, p)
    assert abs(z - oracles.holonomy_theta_loop(lam, p)) < 1e-6
    assert abs(abs(z) - 1.0) < 1e-12


@pytest.mark.parametrize("r", [0.1, 0.3, 0.8])
def test_holonomy_of_contractible_loop_is_exp_minus_i_area(r):
    # Stokes: the lift accumulates -oint (p + lambda) d theta_q = -(enclosed area)
    S = ex.preq_Xlambda(0.3)
    z = pq.holonomy(S, lambda t: np.array([0.5 + r * np.cos(t), 1.0 + r * np.sin(t)]))
    assert abs(z - np.exp(-1j * np.pi * r * r)) < 1e-8


def test_holonomy_rejects_open_loop():
    with pytest.raises(ValueError):
        pq.holonomy(ex.preq_Xlambda(0.0), lambda t: np.array([t, 0.0]))


def test_unsupported_space_without_circle():
    with pytest.raises(pq.UnsupportedSpaceError):
        pq.PrequantumSpace("bad", ex.group_G(), 2, forms.OneForm(2, lambda x: x), lambda g, x: x, circle_index=5)


def test_preq_hom_is_a_single_circle():
    R = pq.preq_hom(ex.preq_Xlambda(0.3), ex.res_preq_Xprime_G())
    pts = [R.sample(11, i) for i in range(8)]
    assert R.count_classes(pts, seed=11).n_classes == 1
    assert R.local_dimension(pts[0]) == 1
    assert R.curve_closure(pts[0]) < 1e-4


def test_induced_prequantum_space_prequantizes_symplectic_induction(rng):
    ind = ex.induced_T_lambda(0.3)
    base = ind.underlying()
    d = ind.T.dim
    for _ in range(3):
        n = ind.sample_level(rng)
        gram = forms.exterior_derivative_gram(ind.N.varpi, n)
        assert np.allclose(gram[:d, :d], base.N.omega.gram(n[:d]), atol=1e-6)
        assert np.allclose(ind.preq_moment_G(n), base.phi(n[:d]), atol=1e-6)
        assert np.linalg.norm(ind.psi(n)) < 1e-9


@given(lam=lams, seed=seeds)
def test_d_varpi_lambda_on_p_theta_plane(lam, seed):
    S = ex.preq_Xlambda(lam)
    x = S.sample(np.random.default_rng(seed))
    e = np.eye(3)
    assert abs(forms.exterior_derivative(S.varpi, x, e[0], e[1]) - 1.0) < 1e-8


def test_double_dual_is_original(rng):
    S = ex.preq_Xprime()
    DD = pq.preq_dual(pq.preq_dual(S))
    x = S.sample(rng)
    assert DD.circle_sign == S.circle_sign
    assert np.allclose(DD.varpi.coeffs(x), S.varpi.coeffs(x))
    assert np.allclose(DD.rotate(0.4, x), S.rotate(0.4, x))
