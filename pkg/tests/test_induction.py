import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from preqind import example_solvable as ex
from preqind import forms
from preqind import induction as ind
from preqind.ham_spaces import check_cardinal_a, check_cardinal_b

seeds = st.integers(0, 2**31 - 1)


def test_induced_dim_formula():
    # 2 dim(G/H) + dim Y
    assert ind.induced_dim(ex.group_G(), ex.group_H(), ex.point_c_h()) == 2
    assert ind.induced_dim(ex.group_Gprime(), ex.group_Hprime(), ex.point_c_hprime()) == 2
    assert ind.induced_dim(ex.group_Gprime(), ex.group_G(), ex.orbit_X()) == 4


@given(seed=seeds)
def test_cotangent_form_is_d_of_canonical_one_form(seed):
    T = ind.CotangentBundle(ex.group_G())
    x = T.sample(np.random.default_rng(seed))
    assert np.allclose(T.omega_gram(x), forms.exterior_derivative_gram(T.varpi(), x), atol=1e-6)


@given(seed=seeds)
def test_left_and_right_actions_commute(seed):
    rng = np.random.default_rng(seed)
    T = ind.CotangentBundle(ex.group_G())
    x = T.sample(rng)
    g, k = (ex.group_G().random_element(rng, box=2.0) for _ in range(2))
    assert np.allclose(T.left(g, T.right(k, x)), T.right(k, T.left(g, x)), atol=1e-9)


@given(seed=seeds)
def test_left_moment_is_equivariant_and_right_invariant(seed):
    rng = np.random.default_rng(seed)
    G = ex.group_G()
    T = ind.CotangentBundle(G)
    x = T.sample(rng)
    g, k = (G.random_element(rng, box=2.0) for _ in range(2))
    assert np.allclose(T.phi(T.left(g, x)), G.coAd(g, T.phi(x)), atol=1e-8)
    assert np.allclose(T.phi(T.right(k, x)), T.phi(x), atol=1e-8)


@pytest.mark.parametrize("primed", [False, True])
def test_level_set_sampler_and_invariance(primed, rng):
    S = ex.induced_Xprime() if primed else ex.induced_X()
    for _ in range(5):
        n = S.sample_level(rng)
        assert np.linalg.norm(S.psi(n)) < 1e-9
        h = S.H.random_element(rng, box=2.0, n_max=2)
        m = S.act_H(h, n)
        assert np.linalg.norm(S.psi(m)) < 1e-9
        assert np.allclose(S.phi(m), S.phi(n), atol=1e-9)
        assert S.same_class(n, m)


def test_induced_moment_lands_on_orbit(rng):
    S = ex.induced_X()
    X = ex.orbit_X()
    for _ in range(10):
        phi = S.phi(S.sample_level(rng))
        # (p, q, 1) with |q| = 1
        assert np.isclose(phi[1] ** 2 + phi[2] ** 2, 1.0) and np.isclose(phi[3], -1.0)
        x = np.array([phi[0], np.arctan2(phi[2], phi[1])])
        assert np.allclose(X.moment(x), phi)


def test_cardinal_properties_on_N(rng):
    S = ex.induced_Xprime()
    for _ in range(5):
        n = S.sample_level(rng)
        assert check_cardinal_a(S.N, n) and check_cardinal_b(S.N, n)


def test_reduced_form_rank_and_tangency(rng):
    S = ex.induced_X()
    n = S.sample_level(rng)
    T = S.level_tangents(n)
    O = S.h_orbit_directions(n)
    gram = np.array([[ind.reduced_form(S, n, v, w) for w in T.basis.T] for v in T.basis.T])
    # the kernel of the restricted form is exactly the H-orbit directions
    assert forms.rank(gram) == T.dim - forms.rank(O)
    normal = forms.jacobian(S.psi, n)[0]  # gradient of a constraint is never tangent to its level set
    with pytest.raises(ind.NotTangentError):
        ind.reduced_form(S, n, normal, T.basis[:, 0])


def test_induce_rejects_wrong_group():
    with pytest.raises(ValueError):
        ind.induce(ex.subgroup_H(), ex.orbit_X())


def test_stages_round_trip_and_fibres(rng):
    S = ex.stages_example()
    for _ in range(5):
        n = S.big.sample_level(rng)
        assert np.allclose(S.s(S.section(n)), n, atol=1e-9)
        m = S.sample_level(rng)
        k = S.K.random_element(rng, box=2.0)
        assert np.allclose(S.s(S.act(S.G.identity(), k, S.H.identity(), m)), S.s(m), atol=1e-9)


def test_stages_s_is_equivariant(rng):
    S = ex.stages_example()
    m = S.sample_level(rng)
    g = S.G.random_element(rng, box=2.0)
    h = S.H.random_element(rng, box=2.0, n_max=1)
    lhs = S.s(S.act(g, S.K.identity(), h, m))
    rhs = S.big.act(g, h, S.s(m))
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_stages_one_form_identity(rng):
    S = ex.stages_example()
    pts = [S.sample_level(rng) for _ in range(5)]
    assert ind.stages_form_identity(S, pts, rng) < 1e-6


def test_stages_rejects_points_off_level():
    S = ex.stages_example()
    m = S.sample_level(np.random.default_rng(1))
    m[S.G.dim] += 0.5
    with pytest.raises(ind.ConstraintViolation):
        S.s(m)


def test_frobenius_round_trips(rng):
    F = ind.frobenius(ex.orbit_X(), ex.subgroup_H(), ex.res_Xprime_H())
    lhs, rhs = F.lhs(), F.rhs()
    for _ in range(3):
        m = F.sample_level(rng)
        n = F.forward(m)
        assert rhs.residual(n) < 1e-9
        assert lhs.equivalent(F.backward(n), m) is not None
        assert np.allclose(F.forward(F.backward(n)), n, atol=1e-9)


@given(seed=seeds)
def test_canonical_form_on_T_star_Gprime_matches_left_trivialized_formula(seed):
    # omega = d<mu, q^-1 dq>: omega(v1, v2) = <nu1, xi2> - <nu2, xi1> - <mu, [xi1, xi2]>,
    # with xi = q^-1 dq read off matrices directly and nu = d mu
    rng = np.random.default_rng(seed)
    G = ex.group_Gprime()
    T = ind.CotangentBundle(G)
    x = T.sample(rng)
    d = G.dim
    q, mu = x[:d], x[d:]
    Minv = np.linalg.inv(G.element(q).matrix)

    def xi(dq, h=1e-6):
        dM = (G.element(q + h * dq).matrix - G.element(q - h * dq).matrix) / (2 * h)
        return G.algebra_coeffs(Minv @ dM, tol=1e-6)

    v1, v2 = rng.standard_normal(2 * d), rng.standard_normal(2 * d)
    x1, x2 = xi(v1[:d]), xi(v2[:d])
    want = v1[d:] @ x2 - v2[d:] @ x1 - mu @ G.bracket(x1, x2)
    fd = v1 @ forms.exterior_derivative_gram(T.varpi(), x) @ v2
    closed = v1 @ T.omega_gram(x) @ v2
    assert abs(fd - want) < 1e-6 * max(1.0, abs(want))
    assert abs(closed - want) < 1e-8 * max(1.0, abs(want))
