"""The solvable group G' of upper triangular 4x4 matrices and its orbits.

An element of G' is

    [[e^{ia}, 0, 0, b],
     [0,      1, e, f],
     [0,      0, 1, a],
     [0,      0, 0, 1]]      a, e, f real, b complex,

with chart ``(a, Re b, Im b, e, f)``.  G is the normal subgroup e = 0, H the
subgroup of G with a in 2*pi*Z and H' the normal subgroup a = 0 of G'.

A dual vector (p, q, s, t) is the value at the identity of the 1-form
p da + Re(conj(q) db) - s de - t df, so its coefficients against the chart
basis are ``(p, Re q, Im q, -s, -t)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cache

import numpy as np

from . import forms
from .forms import OneForm, TwoForm, wrap_angle
from .ham_spaces import HamiltonianSpace, hom_set, point_space, restrict_space
from .induction import Stages, frobenius, induce, stages_map
from .lie_core import ChartDomainError, GroupElement, LieGroup, Subgroup
from .prequantum import (
    HOLONOMY_STEPS,
    PrequantumInduced,
    PrequantumSpace,
    holonomy,
    preq_frobenius,
    preq_hom,
    preq_induce,
    restrict_preq,
)
from .report import Check, check, parallel_map

TWO_PI = 2 * np.pi
P_BOX = 3.0
S_BOX = 4.0


def gprime_matrix(a: float, b: complex, e: float, f: float) -> np.ndarray:
    M = np.eye(4, dtype=complex)
    M[0, 0] = np.exp(1j * a)
    M[0, 3] = b
    M[1, 2] = e
    M[1, 3] = f
    M[2, 3] = a
    return M


def _unit(i: int, j: int) -> np.ndarray:
    E = np.zeros((4, 4), dtype=complex)
    E[i, j] = 1.0
    return E


_A = 1j * _unit(0, 0) + _unit(2, 3)
_BR = _unit(0, 3)
_BI = 1j * _unit(0, 3)
_E = _unit(1, 2)
_F = _unit(1, 3)


def _read(M) -> tuple[float, complex, float, float]:
    return M[2, 3].real, complex(M[0, 3]), M[1, 2].real, M[1, 3].real


@dataclass(frozen=True)
class GPrimeElement:
    a: float
    b: complex
    e: float = 0.0
    f: float = 0.0

    @property
    def params(self) -> np.ndarray:
        return np.array([self.a, self.b.real, self.b.imag, self.e, self.f])

    @property
    def matrix(self) -> np.ndarray:
        return gprime_matrix(self.a, self.b, self.e, self.f)

    @classmethod
    def of(cls, g: GroupElement) -> GPrimeElement:
        return cls(*_read(g.matrix))


@dataclass(frozen=True)
class DualGPrime:
    p: float
    q: complex
    s: float
    t: float = 1.0

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.p, self.q.real, self.q.imag, -self.s, -self.t])

    @classmethod
    def of(cls, mu) -> DualGPrime:
        mu = np.asarray(mu, dtype=float)
        return cls(mu[0], complex(mu[1], mu[2]), -mu[3], -mu[4])


@cache
def group_Gprime() -> LieGroup:
    return LieGroup(
        name="G'",
        dim=5,
        to_matrix=lambda x: gprime_matrix(x[0], complex(x[1], x[2]), x[3], x[4]),
        from_matrix=lambda M: np.array([M[2, 3].real, M[0, 3].real, M[0, 3].imag, M[1, 2].real, M[1, 3].real]),
        algebra_basis=(_A, _BR, _BI, _E, _F),
    )


@cache
def group_G() -> LieGroup:
    return LieGroup(
        name="G",
        dim=4,
        to_matrix=lambda x: gprime_matrix(x[0], complex(x[1], x[2]), 0.0, x[3]),
        from_matrix=lambda M: np.array([M[2, 3].real, M[0, 3].real, M[0, 3].imag, M[1, 3].real]),
        algebra_basis=(_A, _BR, _BI, _F),
    )


def _winding(M) -> tuple[int]:
    a = M[2, 3].real
    k = int(np.rint(a / TWO_PI))
    if abs(a - k * TWO_PI) > 1e-9:
        raise ChartDomainError(f"a = {a} is not in 2*pi*Z")
    return (k,)


@cache
def group_H() -> LieGroup:
    """H = {a in 2 pi Z, e = 0}: identity component in (Re b, Im b, f), one Z generator a -> a + 2 pi."""
    return LieGroup(
        name="H",
        dim=3,
        to_matrix=lambda x: gprime_matrix(0.0, complex(x[0], x[1]), 0.0, x[2]),
        from_matrix=lambda M: np.array([M[0, 3].real, M[0, 3].imag, M[1, 3].real]),
        algebra_basis=(_BR, _BI, _F),
        component_generators=(gprime_matrix(TWO_PI, 0, 0, 0),),
        component_of=_winding,
    )


@cache
def group_Hprime() -> LieGroup:
    return LieGroup(
        name="H'",
        dim=4,
        to_matrix=lambda x: gprime_matrix(0.0, complex(x[0], x[1]), x[2], x[3]),
        from_matrix=lambda M: np.array([M[0, 3].real, M[0, 3].imag, M[1, 2].real, M[1, 3].real]),
        algebra_basis=(_BR, _BI, _E, _F),
    )


@cache
def subgroup_G() -> Subgroup:
    return Subgroup(group_G(), group_Gprime())


@cache
def subgroup_H() -> Subgroup:
    """H inside G."""
    return Subgroup(group_H(), group_G())


@cache
def subgroup_H_in_Gprime() -> Subgroup:
    return Subgroup(group_H(), group_Gprime())


@cache
def subgroup_Hprime() -> Subgroup:
    return Subgroup(group_Hprime(), group_Gprime())


def gprime(a: float = 0.0, b: complex = 0.0, e: float = 0.0, f: float = 0.0) -> GroupElement:
    return group_Gprime().from_full_matrix(gprime_matrix(a, b, e, f))


def g_elem(a: float = 0.0, b: complex = 0.0, f: float = 0.0) -> GroupElement:
    return group_G().from_full_matrix(gprime_matrix(a, b, 0.0, f))


def h_elem(k: int = 0, b: complex = 0.0, f: float = 0.0) -> GroupElement:
    return group_H().element([b.real, b.imag, f], (k,))


# ---------------------------------------------------------------- coset slices


def _slice(sub: LieGroup, rep_of):
    def coset_slice(q: GroupElement) -> GroupElement:
        a, b, e, f = _read(q.matrix)
        return sub.from_full_matrix(np.linalg.solve(rep_of(a, e), q.matrix))

    return coset_slice


slice_H_in_G = _slice(group_H(), lambda a, e: gprime_matrix(a % TWO_PI, 0, 0, 0))
slice_H_in_Gprime = _slice(group_H(), lambda a, e: gprime_matrix(a % TWO_PI, 0, e, 0))
slice_Hprime_in_Gprime = _slice(group_Hprime(), lambda a, e: gprime_matrix(a, 0, 0, 0))


# ---------------------------------------------------------------- coadjoint action and orbits

C_CHECK = DualGPrime(0.0, 1.0 + 0j, 0.0, 1.0)


def c_check() -> np.ndarray:
    return C_CHECK.coeffs


def c_check_g() -> np.ndarray:
    return subgroup_G().restrict(c_check())


def c_check_h() -> np.ndarray:
    return subgroup_H().restrict(c_check_g())


def c_check_hprime() -> np.ndarray:
    return subgroup_Hprime().restrict(c_check())


def coadjoint_gprime(g: GPrimeElement, m: DualGPrime) -> DualGPrime:
    """Closed-form coadjoint action on the hyperplane t = 1."""
    if abs(m.t - 1.0) > 1e-12:
        raise ValueError("closed form holds on t = 1 only")
    w = np.exp(1j * g.a)
    return DualGPrime(
        m.p + g.e + (np.conj(1j * g.b) * m.q * w).real,
        m.q * w,
        m.s + g.a,
        1.0,
    )


def _gp(g: GroupElement) -> tuple[float, complex, float, float]:
    return _read(g.matrix)


def _symplectic_plane() -> TwoForm:
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return TwoForm(2, lambda x: J)


def _sample_ps(rng):
    return np.array([rng.uniform(-P_BOX, P_BOX), rng.uniform(-S_BOX, S_BOX)])


def _sample_ptheta(rng):
    return np.array([rng.uniform(-P_BOX, P_BOX), rng.uniform(0.0, TWO_PI)])


@cache
def orbit_Xprime() -> HamiltonianSpace:
    """X' = {(p, e^{is}, s, 1)} with chart (p, s) and form dp ^ ds = d(p ds)."""

    def action(g, x):
        a, b, e, f = _gp(g)
        p, s = x
        return np.array([p + e + (np.conj(1j * b) * np.exp(1j * (s + a))).real, s + a])

    def moment(x):
        p, s = x
        return DualGPrime(p, np.exp(1j * s), s, 1.0).coeffs

    return HamiltonianSpace(
        name="X'",
        group=group_Gprime(),
        chart_dim=2,
        action=action,
        omega=_symplectic_plane(),
        moment=moment,
        varpi=OneForm(2, lambda x: np.array([0.0, x[0]])),
        sample=_sample_ps,
    )


@cache
def orbit_X() -> HamiltonianSpace:
    """X = {(p, q, 1)} with chart (p, theta), q = e^{i theta}, and form dp ^ dq/(iq) = dp ^ d theta."""

    def action(g, x):
        a, b, e, f = _gp(g)
        p, th = x
        return np.array([p + (np.conj(1j * b) * np.exp(1j * (th + a))).real, th + a])

    def moment(x):
        p, th = x
        return np.array([p, np.cos(th), np.sin(th), -1.0])

    return HamiltonianSpace(
        name="X",
        group=group_G(),
        chart_dim=2,
        action=action,
        omega=_symplectic_plane(),
        moment=moment,
        periodic=(False, True),
        varpi=OneForm(2, lambda x: np.array([0.0, x[0]])),
        sample=_sample_ptheta,
    )


@cache
def res_Xprime_G() -> HamiltonianSpace:
    return restrict_space(orbit_Xprime(), subgroup_G(), name="Res_G X'")


@cache
def res_Xprime_H() -> HamiltonianSpace:
    return restrict_space(orbit_Xprime(), subgroup_H_in_Gprime(), name="Res_H X'")


@cache
def point_c_h() -> HamiltonianSpace:
    return point_space(group_H(), c_check_h(), name="{c|h}")


@cache
def point_c_hprime() -> HamiltonianSpace:
    return point_space(group_Hprime(), c_check_hprime(), name="{c|h'}")


def covering(x) -> np.ndarray:
    """X' -> X, (p, s) -> (p, e^{is}) in the (p, theta) chart."""
    p, s = x
    return np.array([p, s % TWO_PI])


def same_X_point(x1, x2, tol: float = 1e-9) -> bool:
    return abs(x1[0] - x2[0]) < tol and abs(wrap_angle(x1[1] - x2[1])) < tol


# ---------------------------------------------------------------- prequantizations


def _sample_ps_z(rng):
    return np.array([rng.uniform(-P_BOX, P_BOX), rng.uniform(-S_BOX, S_BOX), rng.uniform(0.0, TWO_PI)])


def _sample_ptheta_z(rng):
    return np.array([rng.uniform(-P_BOX, P_BOX), rng.uniform(0.0, TWO_PI), rng.uniform(0.0, TWO_PI)])


@cache
def preq_Xprime() -> PrequantumSpace:
    """X~' = X' x T, chart (p, s, theta_z), varpi = p ds + d theta_z."""

    def action(g, x):
        a, b, e, f = _gp(g)
        p, s, th = x
        w = np.exp(1j * (s + a))
        return np.array([
            p + e + (np.conj(1j * b) * w).real,
            s + a,
            th + (np.conj(b) * w).real - s * e - f,
        ])

    X = orbit_Xprime()
    return PrequantumSpace(
        name="X~'",
        group=group_Gprime(),
        chart_dim=3,
        varpi=OneForm(3, lambda x: np.array([0.0, x[0], 1.0])),
        action=action,
        circle_index=2,
        sample=_sample_ps_z,
        moment=lambda x: X.moment(x[:2]),
        base=X,
    )


@cache
def preq_Xlambda(lam: float) -> PrequantumSpace:
    """X~_lambda = X x T, chart (p, theta_q, theta_z), varpi = (p + lambda) d theta_q + d theta_z."""
    lam = float(lam)

    def action(g, x):
        a, b, e, f = _gp(g)
        p, th, tz = x
        w = np.exp(1j * (th + a))
        return np.array([
            p + (np.conj(1j * b) * w).real,
            th + a,
            tz + (np.conj(b) * w).real - lam * a - f,
        ])

    X = orbit_X()
    return PrequantumSpace(
        name=f"X~_{lam:g}",
        group=group_G(),
        chart_dim=3,
        varpi=OneForm(3, lambda x: np.array([0.0, x[0] + lam, 1.0])),
        action=action,
        periodic=(False, True, True),
        circle_index=2,
        sample=_sample_ptheta_z,
        moment=lambda x: X.moment(x[:2]),
        base=X,
    )


@cache
def res_preq_Xprime_G() -> PrequantumSpace:
    return restrict_preq(preq_Xprime(), subgroup_G(), name="Res_G X~'")


@cache
def res_preq_Xprime_H() -> PrequantumSpace:
    return restrict_preq(preq_Xprime(), subgroup_H_in_Gprime(), name="Res_H X~'")


@dataclass(frozen=True)
class CharacterLambda:
    lam: float

    def __call__(self, h: GroupElement) -> complex:
        return char_lambda(self.lam, h)


def _member_of(sub: Subgroup, h: GroupElement) -> GroupElement:
    if h.group is sub.sub or (h.group is sub.amb and sub.contains(h)):
        return h
    raise ValueError(f"element is not in {sub.sub.name}")


def _char_lambda_angle(lam: float, h: GroupElement) -> float:
    """An unwrapped argument of chi_lambda(h): -lambda a + Re b - f."""
    a, b, e, f = _read(_member_of(subgroup_H(), h).matrix)
    return -lam * a + b.real - f


def char_lambda(lam: float, h: GroupElement) -> complex:
    """chi_lambda(h) = e^{-i lambda a} e^{i [Re b - f]} on H."""
    return complex(np.exp(1j * _char_lambda_angle(lam, h)))


def _char_prime_angle(h: GroupElement) -> float:
    a, b, e, f = _read(_member_of(subgroup_Hprime(), h).matrix)
    return b.real - f


def char_prime(h: GroupElement) -> complex:
    """chi'(h') = e^{i [Re b - f]} on H'."""
    return complex(np.exp(1j * _char_prime_angle(h)))


@cache
def T_lambda(lam: float) -> PrequantumSpace:
    """The unit circle with H acting by chi_lambda, varpi = d theta."""
    lam = float(lam)
    c = c_check_h()
    return PrequantumSpace(
        name=f"T_{lam:g}",
        group=group_H(),
        chart_dim=1,
        varpi=OneForm(1, lambda x: np.array([1.0])),
        action=lambda h, x: np.asarray(x, dtype=float) + _char_lambda_angle(lam, h),
        circle_index=0,
        moment=lambda x: c.copy(),
        base=point_c_h(),
    )


@cache
def T_prime() -> PrequantumSpace:
    """The unit circle with H' acting by chi'."""
    c = c_check_hprime()
    return PrequantumSpace(
        name="T'",
        group=group_Hprime(),
        chart_dim=1,
        varpi=OneForm(1, lambda x: np.array([1.0])),
        action=lambda h, x: np.asarray(x, dtype=float) + _char_prime_angle(h),
        circle_index=0,
        moment=lambda x: c.copy(),
        base=point_c_hprime(),
    )


# ---------------------------------------------------------------- gauge equivalences and holonomy

GAUGE_POINTS = 16


@dataclass(frozen=True)
class GaugeMap:
    """F(p, q, z) = (p, q, z q^n) in the (p, theta_q, theta_z) chart."""

    n: int

    def __call__(self, x) -> np.ndarray:
        p, th, tz = np.asarray(x, dtype=float)
        return np.array([p, th, tz + self.n * th])

    def jacobian(self, x=None) -> np.ndarray:
        return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, float(self.n), 1.0]])


def gauge_map(n: int) -> GaugeMap:
    return GaugeMap(int(n))


def gauge_residuals(lam1: float, lam2: float, F, n_points: int = GAUGE_POINTS, seed: int = 0, fd: bool = False):
    """(max |F^* varpi_lam2 - varpi_lam1|, max |F(g x) - g F(x)|) at seeded points.

    The pullback uses F.jacobian unless ``fd`` asks for central differences.
    """
    S1, S2 = preq_Xlambda(lam1), preq_Xlambda(lam2)
    rng = np.random.default_rng([seed, 2])
    pull = equi = 0.0
    for _ in range(n_points):
        x = S1.sample(rng)
        J = forms.jacobian(F, x) if fd else F.jacobian(x)
        pull = max(pull, float(np.max(np.abs(J.T @ S2.varpi.coeffs(F(x)) - S1.varpi.coeffs(x)))))
        g = group_G().random_element(rng, box=3.0)
        equi = max(equi, float(np.max(np.abs(S2.diff(F(S1.action(g, x)), S2.action(g, F(x)))))))
    return pull, equi


def gauge_equivalence(lam1: float, lam2: float, tol: float = 1e-9):
    """The isomorphism X~_lam1 -> X~_lam2 when lam1 - lam2 is an integer, verified before it is returned."""
    d = lam1 - lam2
    n = int(np.rint(d))
    if abs(d - n) > tol:
        return None
    F = gauge_map(n)
    pull, equi = gauge_residuals(lam1, lam2, F)
    if pull > 1e-10 or equi > 1e-9:
        return None
    return F


def theta_loop(p: float):
    """theta_q: 0 -> 2 pi at fixed p, in the base chart (p, theta_q)."""
    return lambda t: np.array([p, t])


def holonomy_Xlambda(lam: float, p: float = 0.0, n_steps: int = HOLONOMY_STEPS) -> complex:
    return holonomy(preq_Xlambda(lam), theta_loop(p), n_steps=n_steps)


def holonomy_expected(lam: float, p: float = 0.0) -> complex:
    return complex(np.exp(-2j * np.pi * (p + lam)))


# ---------------------------------------------------------------- induced prequantum spaces


@cache
def induced_T_lambda(lam: float) -> PrequantumInduced:
    return preq_induce(subgroup_H(), T_lambda(lam))


@cache
def induced_T_prime() -> PrequantumInduced:
    return preq_induce(subgroup_Hprime(), T_prime())


def induced_to_Xlambda(lam: float):
    """Ind_H^G T_lam -> X~_lam, [q, mu, z] -> q (mu_a, 0, z)."""
    S = preq_Xlambda(lam)
    G = group_G()

    def F(n):
        n = np.asarray(n, dtype=float)
        return S.action(G.element(n[:4]), np.array([n[4], 0.0, n[8]]))

    return F


def induced_to_Xprime():
    """Ind_H'^G' T' -> X~', [q, mu, z] -> q (mu_a, 0, z)."""
    S = preq_Xprime()
    G = group_Gprime()

    def F(n):
        n = np.asarray(n, dtype=float)
        return S.action(G.element(n[:5]), np.array([n[5], 0.0, n[10]]))

    return F


def induced_iso_residuals(ind: PrequantumInduced, F, target: PrequantumSpace, n_points: int, seed: int):
    """Residuals of F as an isomorphism of prequantum G-spaces on the level set.

    Returns a dict with H-invariance, G-equivariance, the 1-form pullback on
    level-set tangents, and the momentum match.
    """
    rng = np.random.default_rng([seed, 3])
    G, H = ind.G, ind.H
    out = dict(h_invariance=0.0, g_equivariance=0.0, pullback=0.0, moment=0.0)
    for _ in range(n_points):
        n = ind.sample_level(rng)
        h = H.random_element(rng, box=2.0, n_max=2 if H.n_components else 0)
        g = G.random_element(rng, box=2.0)
        x = F(n)
        out["h_invariance"] = max(out["h_invariance"], float(np.max(np.abs(target.diff(F(ind.act_H(h, n)), x)))))
        out["g_equivariance"] = max(out["g_equivariance"],
                                    float(np.max(np.abs(target.diff(F(ind.act_G(g, n)), target.action(g, x))))))
        T = ind.level_tangents(n)
        J = forms.jacobian(F, n)
        pulled = J.T @ target.varpi.coeffs(x)
        here = np.asarray(ind.N.varpi.coeffs(n))
        out["pullback"] = max(out["pullback"], float(np.max(np.abs((pulled - here) @ T.basis))))
        out["moment"] = max(out["moment"], float(np.max(np.abs(target.momentum(x) - ind.phi(n)))))
    return out


def holonomy_induced(lam: float, p: float = 0.0, n_steps: int = HOLONOMY_STEPS) -> complex:
    """Holonomy over q = exp(t A), t in [0, 2 pi], mu = (p, 1, 0, -1); closed up by the winding element of H."""
    ind = induced_T_lambda(lam)
    mu = np.array([p, 1.0, 0.0, -1.0])
    loop = lambda t: np.concatenate([[t, 0.0, 0.0, 0.0], mu])  # noqa: E731
    h1 = h_elem(1)
    return holonomy(ind.N, loop, n_steps=n_steps, closing=lambda n: ind.act_H(h1, n))


# ---------------------------------------------------------------- induced orbits


def _chart_X(m):
    return np.array([m[0], np.arctan2(m[2], m[1])])


def _chart_Xprime(m):
    return np.array([m[0], -m[3]])


@cache
def induced_X():
    return induce(subgroup_H(), point_c_h(), coset_slice=slice_H_in_G)


@cache
def induced_Xprime():
    return induce(subgroup_Hprime(), point_c_hprime(), coset_slice=slice_Hprime_in_Gprime)


def moment_image_distance(primed: bool, n_points: int = 500, seed: int = 0) -> float:
    """Sample Hausdorff distance between the induced moment image and the orbit.

    Image -> orbit: read an orbit chart point off each image and compare with
    the orbit's moment there.  Orbit -> image: solve for a level-set point over
    each sampled orbit point.
    """
    S = induced_Xprime() if primed else induced_X()
    X = orbit_Xprime() if primed else orbit_X()
    chart = _chart_Xprime if primed else _chart_X
    rng = np.random.default_rng([seed, 4])
    d1 = d2 = 0.0
    for _ in range(n_points):
        m = S.phi(S.sample_level(rng))
        d1 = max(d1, float(np.linalg.norm(m - X.moment(chart(m)))))
        target = X.moment(X.sample(rng))
        d2 = max(d2, float(np.linalg.norm(S.phi(S.fibre_point(target, rng)) - target)))
    return max(d1, d2)


def moment_injectivity(primed: bool, n_points: int = 20, seed: int = 0, n_max: int = 8) -> dict:
    """Two level-set points over the same momentum must be H-equivalent (searched at budget n_max).

    The second point is solved from the momentum value alone.  Equivalence is
    decided twice: by orbit search and by the canonical coset slice.
    """
    S = induced_Xprime() if primed else induced_X()
    Q = S.quotient(n_max=n_max)
    rng = np.random.default_rng([seed, 5])
    found = slices = 0
    worst = 0.0
    for _ in range(n_points):
        n1 = S.sample_level(rng)
        n2 = S.fibre_point(S.phi(n1), rng)
        w = Q.equivalent(n2, n1)
        if w is not None:
            found += 1
            worst = max(worst, float(np.linalg.norm(Q.diff(Q.action(w, n2), n1))))
        slices += S.same_class(n1, n2)
    return dict(n=n_points, witnessed=found, slice_agree=slices, residual_max=worst, n_max=n_max)


# ---------------------------------------------------------------- stages instance


@cache
def stages_example() -> Stages:
    """H in G in G' with Y = {c|h}."""
    return stages_map(subgroup_G(), subgroup_H(), subgroup_H_in_Gprime(), point_c_h(), coset_slice=slice_H_in_Gprime)


# ---------------------------------------------------------------- report runners


def run_frobenius_example(seed: int = 42, samples: int = 200, n_max: int = 8, round_trips: int = 50) -> list[Check]:
    """Hom_G(X, Res X') is a point, also through the H side and the reciprocity maps."""
    checks = []
    Q = hom_set(orbit_X(), res_Xprime_G(), n_max=n_max)
    pts = parallel_map(lambda i: Q.sample(seed, i), range(samples))
    cc = Q.count_classes(pts, seed)
    checks.append(check("hom_G(X,Res X') class_count", cc.n_classes == 1, cc.witness_residual_max, 1, cc.n_classes))
    dims = sorted(set(parallel_map(Q.local_dimension, pts)))
    checks.append(check("hom_G(X,Res X') quotient_dim", dims == [0], None, [0], dims))

    QH = hom_set(point_c_h(), res_Xprime_H(), n_max=n_max)
    ptsH = parallel_map(lambda i: QH.sample(seed, i), range(samples))
    ccH = QH.count_classes(ptsH, seed)
    checks.append(check("hom_H({c|h},Res X') class_count", ccH.n_classes == 1, ccH.witness_residual_max, 1,
                        ccH.n_classes))

    F = frobenius(res_Xprime_G(), subgroup_H(), point_c_h())
    L, R = F.lhs(n_max=n_max), F.rhs(n_max=n_max)
    reps = parallel_map(lambda i: L.sample(seed, i), range(round_trips))
    ccL = L.count_classes(reps, seed)
    checks.append(check("frobenius lhs class_count", ccL.n_classes == 1, ccL.witness_residual_max, 1, ccL.n_classes))

    def trip(m):
        n = F.forward(m)
        w1 = L.equivalent(F.backward(n), m)
        r1 = np.inf if w1 is None else float(np.linalg.norm(L.diff(L.action(w1, F.backward(n)), m)))
        n2 = F.forward(F.backward(n))
        w2 = R.equivalent(n2, n)
        r2 = np.inf if w2 is None else float(np.linalg.norm(R.diff(R.action(w2, n2), n)))
        return r1, r2

    res = parallel_map(trip, reps)
    r1 = max(r for r, _ in res)
    r2 = max(r for _, r in res)
    checks.append(check("frobenius backward(forward) same class", r1 < 1e-8, r1, round_trips,
                        sum(r < 1e-8 for r, _ in res)))
    checks.append(check("frobenius forward(backward) same class", r2 < 1e-8, r2, round_trips,
                        sum(r < 1e-8 for _, r in res)))
    return checks


def run_prequantum_frobenius_example(
    lam: float, seed: int = 42, samples: int = 200, n_max: int = 8, side_samples: int = 50, round_trips: int = 20,
    closure_points: int = 5,
) -> list[Check]:
    """Hom_G(X~_lam, Res X~') is a single circle, also through the H side and the reciprocity maps."""
    tag = f"lambda={lam:g}"
    checks = []
    R = preq_hom(preq_Xlambda(lam), res_preq_Xprime_G(), n_max=n_max)
    pts = parallel_map(lambda i: R.sample(seed, i), range(samples))
    cc = R.count_classes(pts, seed)
    checks.append(check(f"{tag} hom_G class_count", cc.n_classes == 1, cc.witness_residual_max, 1, cc.n_classes))
    dims = sorted(set(parallel_map(R.local_dimension, pts)))
    checks.append(check(f"{tag} hom_G local_dim", dims == [1], None, [1], dims))
    clos = max(parallel_map(R.curve_closure, pts[:closure_points]))
    checks.append(check(f"{tag} hom_G curve_closes", clos < 1e-4, clos, "< 1e-4", clos))
    orb = max(parallel_map(R.orbit_form_residual, pts[:closure_points]))
    checks.append(check(f"{tag} hom_G form_vanishes_on_orbits", orb < 1e-8, orb, "< 1e-8", orb))

    n_side = min(samples, side_samples)
    RH = preq_hom(T_lambda(lam), res_preq_Xprime_H(), n_max=n_max)
    ptsH = parallel_map(lambda i: RH.sample(seed, i), range(n_side))
    ccH = RH.count_classes(ptsH, seed)
    checks.append(check(f"{tag} hom_H class_count", ccH.n_classes == 1, ccH.witness_residual_max, 1, ccH.n_classes))
    dimsH = sorted(set(parallel_map(RH.local_dimension, ptsH)))
    checks.append(check(f"{tag} hom_H local_dim", dimsH == [1], None, [1], dimsH))

    F = preq_frobenius(res_preq_Xprime_G(), subgroup_H(), T_lambda(lam))
    L = F.lhs(n_max=n_max)
    reps = parallel_map(lambda i: L.sample(seed, i), range(n_side))
    ccL = L.count_classes(reps, seed)
    checks.append(check(f"{tag} frobenius lhs class_count", ccL.n_classes == 1, ccL.witness_residual_max, 1,
                        ccL.n_classes))
    dimsL = sorted(set(parallel_map(L.local_dimension, reps)))
    checks.append(check(f"{tag} frobenius lhs local_dim", dimsL == [1], None, [1], dimsL))

    RR = F.rhs()

    def trip(m):
        n = F.forward(m)
        b = F.backward(n)
        w1 = L.quotient.equivalent(b, m)
        r1 = np.inf if w1 is None else float(np.linalg.norm(L.quotient.diff(L.quotient.action(w1, b), m)))
        n2 = F.forward(b)
        w2 = RR.quotient.equivalent(n2, n)
        r2 = np.inf if w2 is None else float(np.linalg.norm(RR.quotient.diff(RR.quotient.action(w2, n2), n)))
        return r1, r2

    res = parallel_map(trip, reps[:round_trips])
    r1 = max(r for r, _ in res)
    r2 = max(r for _, r in res)
    checks.append(check(f"{tag} frobenius backward(forward) same class", r1 < 1e-8, r1, len(res),
                        sum(r < 1e-8 for r, _ in res)))
    checks.append(check(f"{tag} frobenius forward(backward) same class", r2 < 1e-8, r2, len(res),
                        sum(r < 1e-8 for _, r in res)))
    return checks
