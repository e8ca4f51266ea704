import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from preqind import example_solvable as ex
from preqind import prequantum as pq

from . import oracles

lams = st.floats(-2, 2, allow_nan=False)
h_params = st.tuples(st.integers(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))


def h_of(t):
    k, br, bi, f = t
    return ex.h_elem(k, complex(br, bi), f)


@given(lams, h_params)
def test_character_matches_formula(lam, t):
    k, br, bi, f = t
    assert abs(ex.char_lambda(lam, h_of(t)) - oracles.char_lambda(lam, 2 * np.pi * k, complex(br, bi), f)) < 1e-9


@given(lams, h_params, h_params)
def test_character_is_a_homomorphism(lam, t1, t2):
    h1, h2 = h_of(t1), h_of(t2)
    assert abs(ex.char_lambda(lam, h1 * h2) - ex.char_lambda(lam, h1) * ex.char_lambda(lam, h2)) < 1e-9


@given(h_params, h_params)
def test_primed_character_is_a_homomorphism(t1, t2):
    # H' is a = 0 in G'; feed it elements with e = 0
    g1 = ex.gprime(0.0, complex(t1[1], t1[2]), t1[0], t1[3])
    g2 = ex.gprime(0.0, complex(t2[1], t2[2]), t2[0], t2[3])
    sub = ex.subgroup_Hprime()
    h1, h2 = sub.to_sub(g1), sub.to_sub(g2)
    assert abs(ex.char_prime(h1 * h2) - ex.char_prime(h1) * ex.char_prime(h2)) < 1e-9


@pytest.mark.parametrize("lam", [0.0, 0.3, 0.7])
def test_circle_T_lambda_has_moment_c_check(lam, rng):
    T = ex.T_lambda(lam)
    x = T.sample(rng)
    assert np.allclose(pq.preq_moment_vector(T, x), ex.c_check_h(), atol=1e-8)


def test_c_check_restrictions():
    assert np.allclose(ex.c_check(), oracles.dual_coeffs(0.0, 1.0 + 0j, 0.0))
    assert np.allclose(ex.subgroup_G().restrict(ex.c_check()), ex.c_check_g())
    assert np.allclose(ex.subgroup_H_in_Gprime().restrict(ex.c_check()), ex.c_check_h())


def test_covering_is_equivariant(rng):
    Xp, X = ex.orbit_Xprime(), ex.orbit_X()
    for _ in range(5):
        x = Xp.sample(rng)
        g = ex.group_G().random_element(rng, box=2.0)
        gp = ex.subgroup_G().include(g)
        assert ex.same_X_point(ex.covering(Xp.action(gp, x)), X.action(g, ex.covering(x)))


@pytest.mark.parametrize("n", [-2, -1, 1, 2])
def test_integer_shift_gauge_map(n):
    lam = 0.3
    F = ex.gauge_equivalence(lam, lam + n)
    assert F is not None
    pull, equi = ex.gauge_residuals(lam, lam + n, F)
    assert pull < 1e-10 and equi < 1e-9


@pytest.mark.parametrize("shift", [0.5, 0.25, -0.7])
def test_no_gauge_map_for_non_integer_shift(shift):
    assert ex.gauge_equivalence(0.1, 0.1 + shift) is None


def test_gauge_map_exact_jacobian_matches_finite_differences():
    F = ex.gauge_map(-1)  # n = lambda1 - lambda2
    exact = ex.gauge_residuals(0.2, 1.2, F)
    fd = ex.gauge_residuals(0.2, 1.2, F, fd=True)
    assert exact[0] < 1e-10 and fd[0] < 1e-8
    # a shift by the wrong integer does not pull the form back
    assert ex.gauge_residuals(0.2, 1.2, ex.gauge_map(2))[0] > 1.0


def test_holonomy_separates_half_shift():
    assert abs(abs(ex.holonomy_Xlambda(0.0) - ex.holonomy_Xlambda(0.5)) - 2.0) < 1e-6


@pytest.mark.parametrize("lam", [0.0, 0.7])
def test_induced_circle_is_X_lambda(lam):
    res = ex.induced_iso_residuals(ex.induced_T_lambda(lam), ex.induced_to_Xlambda(lam), ex.preq_Xlambda(lam), 5, 3)
    assert max(res.values()) < 1e-6
    assert abs(ex.holonomy_induced(lam, 0.2) - ex.holonomy_Xlambda(lam, 0.2)) < 1e-6


def test_induced_primed_circle_is_X_prime():
    res = ex.induced_iso_residuals(ex.induced_T_prime(), ex.induced_to_Xprime(), ex.preq_Xprime(), 5, 3)
    assert max(res.values()) < 1e-6


@pytest.mark.parametrize("primed", [False, True])
def test_induced_orbits(primed):
    assert ex.moment_image_distance(primed, 50, 1) < 1e-6
    inj = ex.moment_injectivity(primed, 4, 1)
    assert inj["witnessed"] == inj["n"] == inj["slice_agree"] == 4


def test_frobenius_example_small_run():
    checks = ex.run_frobenius_example(seed=5, samples=20, round_trips=5)
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]
    names = [c.name for c in checks]
    assert len(names) == len(set(names))
