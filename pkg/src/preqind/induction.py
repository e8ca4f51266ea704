"""Symplectic induction, induction in stages and Frobenius reciprocity.

Cotangent data is left-trivialized: a covector p at q is stored as the
chart point ``(q params, mu)`` with ``mu = q^-1 p`` in dual coefficients.
In this picture

* left translation by g:   (q, mu) -> (g q, mu)
* right translation by h: (q, mu) -> (q h^-1, coAd(h, mu))
* canonical 1-form:        <mu, q^-1 dq>
* momentum of the left action: coAd(q, mu).

The stages and reciprocity statements are checked constructively: the maps
from the proofs, their sections, equivariance and the 1-form identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import forms
from .forms import OneForm, TwoForm
from .ham_spaces import (
    HamiltonianSpace,
    QuotientSet,
    SamplerError,
    hom_set,
    orbit_span,
    project_to_level,
    restrict_space,
)
from .lie_core import GroupElement, LieGroup, Subgroup, direct_product, pair_element, split_element

Q_BOX = 3.0


@dataclass(frozen=True)
class CotangentPoint:
    q: GroupElement
    mu: np.ndarray

    def chart(self) -> np.ndarray:
        return np.concatenate([self.q.params, self.mu])


class CotangentBundle:
    """T*G in left trivialization, chart ``(q params, mu)``."""

    def __init__(self, G: LieGroup):
        if G.n_components:
            raise ValueError("T*G is only built over connected groups")
        self.G = G
        self.dim = 2 * G.dim
        basis = np.eye(G.dim)
        # structure constants: [e_i, e_j] = sum_k c[i, j, k] e_k
        self._c = np.array([[G.bracket(ei, ej) for ej in basis] for ei in basis]).reshape(G.dim, G.dim, G.dim)

    def split(self, x) -> CotangentPoint:
        d = self.G.dim
        return CotangentPoint(self.G.element(x[:d]), np.asarray(x[d : 2 * d], dtype=float))

    def join(self, q: GroupElement, mu) -> np.ndarray:
        return np.concatenate([q.params, np.asarray(mu, dtype=float)])

    def left(self, g: GroupElement, x) -> np.ndarray:
        pt = self.split(x)
        return self.join(g * pt.q, pt.mu)

    def right(self, h: GroupElement, x) -> np.ndarray:
        """Right action x -> x h^-1 by an element of G."""
        pt = self.split(x)
        return self.join(pt.q * h.inverse(), self.G.coAd(h, pt.mu))

    def phi(self, x) -> np.ndarray:
        pt = self.split(x)
        return self.G.coAd(pt.q, pt.mu)

    def left_velocity_matrix(self, qparams) -> np.ndarray:
        return np.array([self.G.left_velocity(qparams, e) for e in np.eye(self.G.dim)]).T

    def varpi_coeffs(self, x) -> np.ndarray:
        d = self.G.dim
        L = self.left_velocity_matrix(x[:d])
        return np.concatenate([L.T @ np.asarray(x[d:], dtype=float), np.zeros(d)])

    def varpi(self) -> OneForm:
        return OneForm(self.dim, self.varpi_coeffs)

    def omega_gram(self, x) -> np.ndarray:
        """d(varpi) in closed form: <nu1, xi2> - <nu2, xi1> - <mu, [xi1, xi2]>, xi = q^-1 dq."""
        d = self.G.dim
        mu = np.asarray(x[d:], dtype=float)
        B = np.einsum("ijk,k->ij", self._c, mu)
        Gxi = np.block([[-B, -np.eye(d)], [np.eye(d), np.zeros((d, d))]])
        L = self.left_velocity_matrix(x[:d])
        T = np.block([[L, np.zeros((d, d))], [np.zeros((d, d)), np.eye(d)]])
        return T.T @ Gxi @ T

    def omega(self) -> TwoForm:
        return TwoForm(self.dim, self.omega_gram)

    def sample(self, rng, box: float = Q_BOX) -> np.ndarray:
        return np.concatenate([rng.uniform(-box, box, self.G.dim), rng.standard_normal(self.G.dim)])

    def space(self) -> HamiltonianSpace:
        """T*G as a Hamiltonian G-space under left translation."""
        return HamiltonianSpace(
            name=f"T*{self.G.name}",
            group=self.G,
            chart_dim=self.dim,
            action=self.left,
            omega=self.omega(),
            moment=self.phi,
            varpi=self.varpi(),
            sample=self.sample,
        )


def canonical_one_form(T: CotangentBundle, n, v, Y: HamiltonianSpace | None = None) -> float:
    """varpi on T*G x Y at n: <mu, q^-1 dq> plus the Y primitive when present."""
    n = np.asarray(n, dtype=float)
    v = np.asarray(v, dtype=float)
    val = T.varpi().eval(n[: T.dim], v[: T.dim])
    if Y is not None and Y.chart_dim:
        if Y.varpi is None:
            raise ValueError(f"{Y.name} has no primitive 1-form")
        val += Y.varpi.eval(n[T.dim :], v[T.dim :])
    return val


def induced_dim(G: LieGroup, H: LieGroup, Y: HamiltonianSpace) -> int:
    return 2 * (G.dim - H.dim) + Y.chart_dim


def _linear_lift(R: np.ndarray, target, free) -> np.ndarray:
    """A solution of R mu = target, displaced along ker R by ``free``."""
    Rp = np.linalg.pinv(R)
    mu = Rp @ np.asarray(target, dtype=float)
    return mu + (np.eye(R.shape[1]) - Rp @ R) @ np.asarray(free, dtype=float)


@dataclass(eq=False)
class InducedSpace:
    """Ind_H^G Y = psi^-1(0)/H on N = T*G x Y, chart ``(q, mu, y)``.

    ``coset_slice(q)``, when given, returns h in H with q h^-1 a canonical
    coset representative; it makes class comparison exact.
    """

    sub: Subgroup
    Y: HamiltonianSpace
    coset_slice: Callable[[GroupElement], GroupElement] | None = None
    q_box: float = Q_BOX
    T: CotangentBundle = field(init=False)
    N: HamiltonianSpace = field(init=False)

    def __post_init__(self):
        if self.Y.group is not self.sub.sub:
            raise ValueError("Y must be a space over the subgroup")
        self.T = CotangentBundle(self.G)
        self.N = self._build_N()

    @property
    def G(self) -> LieGroup:
        return self.sub.amb

    @property
    def H(self) -> LieGroup:
        return self.sub.sub

    @property
    def chart_dim(self) -> int:
        return self.T.dim + self.Y.chart_dim

    @property
    def periodic(self) -> tuple[bool, ...]:
        return (False,) * self.T.dim + tuple(self.Y.periodic)

    def _build_N(self) -> HamiltonianSpace:
        T, Y, d = self.T, self.Y, self.T.dim
        GH = direct_product(self.G, self.H)

        def action(gh, n):
            g, h = split_element(self.G, self.H, gh)
            return self.act(g, h, n)

        def gram(n):
            out = np.zeros((self.chart_dim, self.chart_dim))
            out[:d, :d] = T.omega_gram(n[:d])
            out[d:, d:] = Y.omega.gram(n[d:])
            return out

        varpi = None
        if Y.varpi is not None:
            varpi = OneForm(self.chart_dim, lambda n: np.concatenate([T.varpi_coeffs(n[:d]), Y.varpi.coeffs(n[d:])]))
        return HamiltonianSpace(
            name=f"T*{self.G.name} x {Y.name}",
            group=GH,
            chart_dim=self.chart_dim,
            action=action,
            omega=TwoForm(self.chart_dim, gram),
            moment=lambda n: np.concatenate([self.phi(n), self.psi(n)]),
            periodic=self.periodic,
            varpi=varpi,
            sample=lambda rng: np.concatenate([T.sample(rng, self.q_box), Y.sample(rng)]),
        )

    # --- the G x H action and momenta on N
    def act(self, g: GroupElement, h: GroupElement, n) -> np.ndarray:
        """(g, h)(p, y) = (g p h^-1, h(y))."""
        n = np.asarray(n, dtype=float)
        d = self.T.dim
        x = self.T.right(self.sub.include(h), self.T.left(g, n[:d]))
        return np.concatenate([x, self.Y.action(h, n[d:])])

    def act_G(self, g: GroupElement, n) -> np.ndarray:
        return self.act(g, self.H.identity(), n)

    def act_H(self, h: GroupElement, n) -> np.ndarray:
        return self.act(self.G.identity(), h, n)

    def phi(self, n) -> np.ndarray:
        return self.T.phi(np.asarray(n, dtype=float)[: self.T.dim])

    def psi(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        d = self.T.dim
        return np.asarray(self.Y.moment(n[d:])) - self.sub.restrict(n[self.G.dim : d])

    moment = phi

    # --- the level set and its quotient
    def sample_level(self, rng) -> np.ndarray:
        """A point of psi^-1(0): random q and y, mu solved linearly from mu|h = Psi(y)."""
        q = rng.uniform(-self.q_box, self.q_box, self.G.dim)
        y = self.Y.sample(rng)
        mu = _linear_lift(self.sub.algebra_inclusion.T, self.Y.moment(y), rng.standard_normal(self.G.dim))
        return np.concatenate([q, mu, y])

    def fibre_point(self, value, rng, attempts: int = 20) -> np.ndarray:
        """A level-set point with G-momentum ``value``: q and y solved so that psi vanishes at mu = coAd(q^-1, value)."""
        value = np.asarray(value, dtype=float)
        d = self.G.dim

        def point(z):
            q = self.G.element(z[:d])
            return np.concatenate([z[:d], self.G.coAd(q.inverse(), value), z[d:]])

        for _ in range(attempts):
            z0 = np.concatenate([rng.uniform(-self.q_box, self.q_box, d), self.Y.sample(rng)])
            try:
                z = project_to_level(lambda z: self.psi(point(z)), z0)
            except SamplerError:
                continue
            return point(z)
        raise SamplerError(f"no point of psi^-1(0) over the momentum value {value}")

    def quotient(self, **kw) -> QuotientSet:
        return QuotientSet(
            name=f"Ind_{self.H.name}^{self.G.name} {self.Y.name}",
            group=self.H,
            action=self.act_H,
            constraint=self.psi,
            chart_dim=self.chart_dim,
            periodic=self.periodic,
            sampler=self.sample_level,
            **kw,
        )

    def canonical(self, n) -> np.ndarray:
        """Slice representative of the H-orbit of n."""
        if self.coset_slice is None:
            raise ValueError("no coset slice registered; use quotient().equivalent")
        d = self.G.dim
        h = self.coset_slice(self.G.element(np.asarray(n, dtype=float)[:d]))
        return self.act_H(h, n)

    def same_class(self, n1, n2, tol: float = 1e-9) -> bool:
        d = np.asarray(self.canonical(n1)) - np.asarray(self.canonical(n2))
        mask = np.asarray(self.periodic, dtype=bool)
        d[mask] = forms.wrap_angle(d[mask])
        return bool(np.linalg.norm(d) < tol)

    def level_tangents(self, n, h: float = forms.FD_STEP) -> forms.Subspace:
        return forms.nullspace(forms.jacobian(self.psi, n, h), n=self.chart_dim)

    def h_orbit_directions(self, n, h: float = forms.FD_STEP) -> np.ndarray:
        return orbit_span(self.H, self.act_H, n, h)


def induce(sub: Subgroup, Y: HamiltonianSpace, coset_slice=None, q_box: float = Q_BOX) -> InducedSpace:
    return InducedSpace(sub, Y, coset_slice=coset_slice, q_box=q_box)


class NotTangentError(ValueError):
    pass


def reduced_form(S: InducedSpace, n, v, w, tol: float = 1e-8) -> float:
    """The pulled-back symplectic form of the induced space, on level-set tangents at n."""
    n = np.asarray(n, dtype=float)
    J = forms.jacobian(S.psi, n)
    for t in (v, w):
        t = np.asarray(t, dtype=float)
        if np.linalg.norm(J @ t) > tol * max(1.0, np.linalg.norm(t)):
            raise NotTangentError(f"vector not tangent to psi^-1(0): |Dpsi v| = {np.linalg.norm(J @ t):.3g}")
    return S.N.omega.eval(n, v, w)


# ---------------------------------------------------------------- stages


class ConstraintViolation(ValueError):
    pass


@dataclass(eq=False)
class Stages:
    """The chain H in K in G with the maps realizing induction in stages.

    M = T*G x T*K x Y with chart ``(q, mu, qbar, mubar, y)``, acted on by
    (g, k, h): (p, pbar, y) -> (g p k^-1, k pbar h^-1, h(y)).  ``big`` is the
    one-step induction Ind_H^G Y on N = T*G x Y.
    """

    K_in_G: Subgroup
    H_in_K: Subgroup
    H_in_G: Subgroup
    Y: HamiltonianSpace
    q_box: float = Q_BOX
    coset_slice: Callable[[GroupElement], GroupElement] | None = None
    big: InducedSpace = field(init=False)
    TG: CotangentBundle = field(init=False)
    TK: CotangentBundle = field(init=False)

    def __post_init__(self):
        if self.H_in_G.sub is not self.H_in_K.sub or self.H_in_G.amb is not self.K_in_G.amb:
            raise ValueError("inconsistent subgroup chain")
        self.TG = CotangentBundle(self.G)
        self.TK = CotangentBundle(self.K)
        self.big = InducedSpace(self.H_in_G, self.Y, coset_slice=self.coset_slice, q_box=self.q_box)

    G = property(lambda self: self.K_in_G.amb)
    K = property(lambda self: self.K_in_G.sub)
    H = property(lambda self: self.H_in_G.sub)

    @property
    def chart_dim(self) -> int:
        return self.TG.dim + self.TK.dim + self.Y.chart_dim

    @property
    def periodic(self) -> tuple[bool, ...]:
        return (False,) * (self.TG.dim + self.TK.dim) + tuple(self.Y.periodic)

    def split(self, m):
        m = np.asarray(m, dtype=float)
        a, b = self.TG.dim, self.TG.dim + self.TK.dim
        return m[:a], m[a:b], m[b:]

    def act(self, g, k, h, m) -> np.ndarray:
        xg, xk, y = self.split(m)
        xg = self.TG.right(self.K_in_G.include(k), self.TG.left(g, xg))
        xk = self.TK.right(self.H_in_K.include(h), self.TK.left(k, xk))
        return np.concatenate([xg, xk, self.Y.action(h, y)])

    def constraint(self, m) -> np.ndarray:
        """(phibar, psibar) = (pbar qbar^-1 - (q^-1 p)|k, Psi(y) - (qbar^-1 pbar)|h)."""
        xg, xk, y = self.split(m)
        mu = xg[self.G.dim :]
        mubar = xk[self.K.dim :]
        phibar = self.TK.phi(xk) - self.K_in_G.restrict(mu)
        psibar = np.asarray(self.Y.moment(y)) - self.H_in_K.restrict(mubar)
        return np.concatenate([phibar, psibar])

    def sample_level(self, rng) -> np.ndarray:
        """Independent sampler of (phibar x psibar)^-1(0) by two linear solves."""
        q = rng.uniform(-self.q_box, self.q_box, self.G.dim)
        qbar = rng.uniform(-self.q_box, self.q_box, self.K.dim)
        y = self.Y.sample(rng)
        mubar = _linear_lift(self.H_in_K.algebra_inclusion.T, self.Y.moment(y), rng.standard_normal(self.K.dim))
        target = self.K.coAd(self.K.element(qbar), mubar)
        mu = _linear_lift(self.K_in_G.algebra_inclusion.T, target, rng.standard_normal(self.G.dim))
        return np.concatenate([q, mu, qbar, mubar, y])

    def check_level(self, m, tol: float = 1e-9):
        r = np.linalg.norm(self.constraint(m))
        if r > tol:
            raise ConstraintViolation(f"point off (phibar x psibar)^-1(0): residual {r:.3g}")

    def s(self, m, check: bool = True) -> np.ndarray:
        """s(p, pbar, y) = (p qbar, y); in left trivialization (q qbar, coAd(qbar^-1, mu), y)."""
        if check:
            self.check_level(m)
        xg, xk, y = self.split(m)
        q = self.G.element(xg[: self.G.dim])
        qbar = self.K_in_G.include(self.K.element(xk[: self.K.dim]))
        mu = xg[self.G.dim :]
        return np.concatenate([self.TG.join(q * qbar, self.G.coAd(qbar.inverse(), mu)), y])

    def section(self, n) -> np.ndarray:
        """(p, y) -> (p, (q^-1 p)|k, y), with pbar in the fibre over the identity of K."""
        n = np.asarray(n, dtype=float)
        r = np.linalg.norm(self.big.psi(n))
        if r > 1e-9:
            raise ConstraintViolation(f"point off psi^-1(0): residual {r:.3g}")
        xg, y = n[: self.TG.dim], n[self.TG.dim :]
        mu = xg[self.G.dim :]
        xk = self.TK.join(self.K.identity(), self.K_in_G.restrict(mu))
        return np.concatenate([xg, xk, y])

    def varpi_M(self, m, v) -> float:
        """<p, dq> + <pbar, dqbar> + varpi_Y(dy)."""
        xg, xk, y = self.split(m)
        vg, vk, vy = self.split(v)
        val = self.TG.varpi().eval(xg, vg) + self.TK.varpi().eval(xk, vk)
        if self.Y.chart_dim:
            val += self.Y.varpi.eval(y, vy)
        return val

    def level_tangents(self, m, h: float = forms.FD_STEP) -> forms.Subspace:
        return forms.nullspace(forms.jacobian(self.constraint, m, h), n=self.chart_dim)

    def pullback_residual(self, m, v, h: float = forms.FD_STEP, tangent_tol: float = 1e-7) -> float:
        """|s^* varpi_N (v) - varpi_M (v)| for a level-set tangent v at m."""
        m = np.asarray(m, dtype=float)
        v = np.asarray(v, dtype=float)
        Jc = forms.jacobian(self.constraint, m, h)
        if np.linalg.norm(Jc @ v) > tangent_tol * max(1.0, np.linalg.norm(v)):
            raise NotTangentError("vector not tangent to the level set")
        n = self.s(m)
        ds = (self.s(m + h * v, check=False) - self.s(m - h * v, check=False)) / (2 * h)
        lhs = canonical_one_form(self.TG, n, ds, self.Y if self.Y.chart_dim else None)
        return abs(lhs - self.varpi_M(m, v))

    def quotient(self, **kw) -> QuotientSet:
        """(phibar x psibar)^-1(0) modulo K x H.

        Classes are prefiltered by the G-momentum, which is K x H invariant.
        With a coset slice on the one-step side, witnesses are proposed from
        it: if h s(m1) = s(m2) then (qbar2 h qbar1^-1, h) is the candidate.
        """
        KH = direct_product(self.K, self.H)

        def action(kh, m):
            k, h = split_element(self.K, self.H, kh)
            return self.act(self.G.identity(), k, h, m)

        def guess(m1, m2):
            if self.coset_slice is None:
                return ()
            n1, n2 = self.s(m1, check=False), self.s(m2, check=False)
            d = self.G.dim
            h1 = self.coset_slice(self.G.element(n1[:d]))
            h2 = self.coset_slice(self.G.element(n2[:d]))
            h = h2.inverse() * h1
            q1 = self.K.element(self.split(m1)[1][: self.K.dim])
            q2 = self.K.element(self.split(m2)[1][: self.K.dim])
            k = q2 * self.H_in_K.include(h) * q1.inverse()
            return [pair_element(KH, k, h)]

        return QuotientSet(
            name=f"Ind_{self.K.name}^{self.G.name} Ind_{self.H.name}^{self.K.name} {self.Y.name}",
            group=KH,
            action=action,
            constraint=self.constraint,
            chart_dim=self.chart_dim,
            periodic=self.periodic,
            sampler=self.sample_level,
            guess=guess,
            invariant=self.moment,
            **kw,
        )

    def moment(self, m) -> np.ndarray:
        """G-momentum of M: p q^-1."""
        return self.TG.phi(self.split(m)[0])


def stages_map(K_in_G: Subgroup, H_in_K: Subgroup, H_in_G: Subgroup, Y: HamiltonianSpace, coset_slice=None) -> Stages:
    return Stages(K_in_G, H_in_K, H_in_G, Y, coset_slice=coset_slice)


def stages_form_identity(stages: Stages, points, rng: np.random.Generator, n_tangents: int = 3) -> float:
    """Largest 1-form pullback residual over random level-set tangents at ``points``."""
    worst = 0.0
    for m in points:
        T = stages.level_tangents(m)
        for _ in range(n_tangents):
            v = T.basis @ rng.standard_normal(T.dim)
            worst = max(worst, stages.pullback_residual(m, v))
    return worst


# ---------------------------------------------------------------- Frobenius reciprocity


@dataclass(eq=False)
class Frobenius:
    """Hom_G(X, Ind_H^G Y) = Hom_H(Res_H^G X, Y) realized on representatives.

    The left side lives on M = X^- x T*G x Y with chart ``(x, qbar, mubar, y)``
    modulo G x H; the right side on X x Y modulo H.
    """

    X: HamiltonianSpace
    sub: Subgroup
    Y: HamiltonianSpace
    q_box: float = Q_BOX
    T: CotangentBundle = field(init=False)

    def __post_init__(self):
        if self.X.group is not self.sub.amb or self.Y.group is not self.sub.sub:
            raise ValueError("X must be a G-space and Y an H-space")
        self.T = CotangentBundle(self.G)

    G = property(lambda self: self.sub.amb)
    H = property(lambda self: self.sub.sub)

    @property
    def periodic(self):
        return tuple(self.X.periodic) + (False,) * self.T.dim + tuple(self.Y.periodic)

    def split(self, m):
        m = np.asarray(m, dtype=float)
        a, b = self.X.chart_dim, self.X.chart_dim + self.T.dim
        return m[:a], m[a:b], m[b:]

    def act(self, g, h, m) -> np.ndarray:
        """(k, h)(x, pbar, y) = (k(x), k pbar h^-1, h(y))."""
        x, xb, y = self.split(m)
        xb = self.T.right(self.sub.include(h), self.T.left(g, xb))
        return np.concatenate([self.X.action(g, x), xb, self.Y.action(h, y)])

    def constraint(self, m) -> np.ndarray:
        x, xb, y = self.split(m)
        phibar = self.T.phi(xb) - np.asarray(self.X.moment(x))
        psibar = np.asarray(self.Y.moment(y)) - self.sub.restrict(xb[self.G.dim :])
        return np.concatenate([phibar, psibar])

    def sample_level(self, rng, attempts: int = 20) -> np.ndarray:
        """Random x and y, then (qbar, mubar) solved from both constraints by Gauss-Newton."""
        nX, d = self.X.chart_dim, self.G.dim
        idx = np.arange(nX, nX + 2 * d)
        for _ in range(attempts):
            x, y = self.X.sample(rng), self.Y.sample(rng)
            qbar = self.G.element(rng.uniform(-self.q_box, self.q_box, d))
            # start with phibar = 0 exactly, so only psibar has to be driven to zero
            m0 = np.concatenate([x, self.T.join(qbar, self.G.coAd(qbar.inverse(), self.X.moment(x))), y])
            try:
                m = project_to_level(self.constraint, m0, idx)
            except SamplerError:
                continue
            # keep base points in a bounded window so witnesses stay inside the search box
            if np.max(np.abs(m[nX : nX + d])) <= 2 * self.q_box:
                return m
        raise SamplerError("Frobenius left-side sampler failed")

    def lhs(self, **kw) -> QuotientSet:
        GH = direct_product(self.G, self.H)

        def action(gh, m):
            g, h = split_element(self.G, self.H, gh)
            return self.act(g, h, m)

        rhs = self.rhs()

        def guess(m1, m2):
            # align the T*G base points with h = e, then route through the
            # right-hand side: if k r(m1) = r(m2) then (qbar2 k qbar1^-1, k) m1 = m2
            q1 = self.G.element(self.split(m1)[1][: self.G.dim])
            q2 = self.G.element(self.split(m2)[1][: self.G.dim])
            out = [pair_element(GH, q2 * q1.inverse(), self.H.identity())]
            try:
                k = rhs.equivalent(self.forward(m1, tol=1e-6), self.forward(m2, tol=1e-6))
            except ConstraintViolation:
                k = None
            if k is not None:
                out.insert(0, pair_element(GH, q2 * self.sub.include(k) * q1.inverse(), k))
            return out

        return QuotientSet(
            name=f"Hom_{self.G.name}({self.X.name}, Ind_{self.H.name}^{self.G.name} {self.Y.name})",
            group=GH,
            action=action,
            constraint=self.constraint,
            chart_dim=self.X.chart_dim + self.T.dim + self.Y.chart_dim,
            periodic=self.periodic,
            sampler=self.sample_level,
            guess=guess,
            **kw,
        )

    def rhs(self, **kw) -> QuotientSet:
        return hom_set(restrict_space(self.X, self.sub), self.Y, solve=1 if self.X.chart_dim else 2, **kw)

    def forward(self, m, tol: float = 1e-9) -> np.ndarray:
        """r(x, pbar, y) = (qbar^-1(x), y)."""
        r = np.linalg.norm(self.constraint(m))
        if r > tol:
            raise ConstraintViolation(f"representative off the level set: residual {r:.3g}")
        x, xb, y = self.split(m)
        qbar = self.G.element(xb[: self.G.dim])
        return np.concatenate([self.X.action(qbar.inverse(), x), y])

    def backward(self, n, tol: float = 1e-9) -> np.ndarray:
        """(x, y) -> (x, Phi(x), y), with pbar over the identity of G."""
        n = np.asarray(n, dtype=float)
        x, y = n[: self.X.chart_dim], n[self.X.chart_dim :]
        r = np.linalg.norm(np.asarray(self.Y.moment(y)) - self.sub.restrict(self.X.moment(x)))
        if r > tol:
            raise ConstraintViolation(f"representative off the level set: residual {r:.3g}")
        return np.concatenate([x, self.T.join(self.G.identity(), self.X.moment(x)), y])


def frobenius(X: HamiltonianSpace, sub: Subgroup, Y: HamiltonianSpace) -> Frobenius:
    return Frobenius(X, sub, Y)


def frobenius_forward(F: Frobenius, m) -> np.ndarray:
    return F.forward(m)


def frobenius_backward(F: Frobenius, n) -> np.ndarray:
    return F.backward(n)
