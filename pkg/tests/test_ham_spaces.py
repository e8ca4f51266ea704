import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from preqind import example_solvable as ex
from preqind import forms
from preqind import ham_spaces as hs

seeds = st.integers(0, 2**31 - 1)


def spaces():
    return [ex.orbit_X(), ex.orbit_Xprime()]


@pytest.mark.parametrize("X", spaces(), ids=lambda X: X.name)
@given(seed=seeds)
def test_cardinal_properties(X, seed):
    x = X.sample(np.random.default_rng(seed))
    assert hs.check_cardinal_a(X, x)
    assert hs.check_cardinal_b(X, x)


@pytest.mark.parametrize("X", spaces(), ids=lambda X: X.name)
@given(seed=seeds)
def test_moment_is_equivariant(X, seed):
    rng = np.random.default_rng(seed)
    x = X.sample(rng)
    g = X.group.random_element(rng, box=3.0)
    assert np.allclose(X.moment(X.action(g, x)), X.group.coAd(g, X.moment(x)), atol=1e-9)


@pytest.mark.parametrize("X", spaces(), ids=lambda X: X.name)
@given(seed=seeds)
def test_action_preserves_form(X, seed):
    rng = np.random.default_rng(seed)
    x = X.sample(rng)
    g = X.group.random_element(rng, box=3.0)
    J = forms.jacobian(lambda y: X.action(g, y), x)
    assert np.allclose(J.T @ X.omega.gram(X.action(g, x)) @ J, X.omega.gram(x), atol=1e-7)


@pytest.mark.parametrize("X", spaces(), ids=lambda X: X.name)
def test_hamiltonian_identity(X, rng):
    # omega = d varpi with <Phi, xi> = varpi(Z_xi) and varpi invariant gives omega(Z_xi, .) = -d<Phi, xi>
    for _ in range(5):
        x = X.sample(rng)
        xi = rng.standard_normal(X.group.dim)
        Z = X.fundamental_field(xi, x)
        dH = forms.jacobian(lambda y: np.atleast_1d(X.moment(y) @ xi), x)[0]
        assert np.allclose(Z @ X.omega.gram(x), -dH, atol=1e-7)


def test_orbit_points_in_closed_form():
    X, Xp = ex.orbit_X(), ex.orbit_Xprime()
    # X' = {(p, e^{is}, s, 1)} and X = {(p, q, 1)}
    assert np.allclose(Xp.moment(np.array([0.5, 1.0])), [0.5, np.cos(1.0), np.sin(1.0), -1.0, -1.0])
    assert np.allclose(X.moment(np.array([0.5, 1.0])), [0.5, np.cos(1.0), np.sin(1.0), -1.0])
    # c_check = (0, 1, 0, 1) is the base point of X'
    assert np.allclose(Xp.moment(np.zeros(2)), ex.c_check())


def test_dual_flips_form_and_moment(rng):
    X = ex.orbit_X()
    D = hs.dual(X)
    x = X.sample(rng)
    assert np.allclose(D.omega.gram(x), -X.omega.gram(x))
    assert np.allclose(D.moment(x), -X.moment(x))


def test_product_moment_is_sum(rng):
    X, R = ex.orbit_X(), ex.res_Xprime_G()
    P = hs.product(X, R, diagonal=True)
    x, y = X.sample(rng), R.sample(rng)
    assert np.allclose(P.moment(np.concatenate([x, y])), X.moment(x) + R.moment(y))


def test_orbit_equivalent_finds_witness_and_rejects(rng):
    X = ex.orbit_X()
    x = X.sample(rng)
    g = X.group.random_element(rng, box=2.0)
    w = hs.orbit_equivalent(X.group, X.action, x, X.action(g, x), diff=X.diff, rng=rng)
    assert w is not None
    assert np.linalg.norm(X.diff(X.action(w, x), X.action(g, x))) < 1e-9


def test_project_to_level():
    c = lambda y: np.array([y[0] ** 2 + y[1] ** 2 - 1.0])
    y = hs.project_to_level(c, np.array([2.0, 0.5]))
    assert abs(c(y)[0]) < 1e-9


def test_hom_set_is_a_point():
    Q = hs.hom_set(ex.orbit_X(), ex.res_Xprime_G())
    pts = [Q.sample(3, i) for i in range(12)]
    assert max(Q.residual(p) for p in pts) < 1e-9
    cc = Q.count_classes(pts, seed=3)
    assert cc.n_classes == 1
    assert Q.local_dimension(pts[0]) == 0


def test_hom_set_rejects_mismatched_groups():
    with pytest.raises(ValueError):
        hs.hom_set(ex.orbit_X(), ex.orbit_Xprime())


def test_invariant_prunes_the_witness_search():
    X = ex.orbit_Xprime()
    Q = hs.QuotientSet("X'/G'", X.group, X.action, lambda y: np.zeros(0), 2, X.periodic, X.sample,
                       invariant=lambda y: np.array([y[0]]))
    # p is not actually G'-invariant; the count then trusts it and never searches across different p,
    # while points with equal invariants are still merged only through a found witness
    pts = [np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.0, 0.0])]
    cc = Q.count_classes(pts)
    assert cc.n_classes == 2 and cc.labels[0] == cc.labels[2]
