"""Prequantum (contact) G-spaces.

Every space here carries an explicit circle coordinate: an unwrapped angle
``theta`` at ``circle_index`` with the circle acting by
``theta -> theta + circle_sign * t`` for ``e^{it}``.  Circle values handed
out to callers are unit complex numbers built from these angles, so they
never drift off |z| = 1.

The momentum map follows ``<Phi(x), Z> = varpi(Z(x))`` with ``Z(x)`` the
fundamental vector field of ``Z``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import cache
from typing import Callable

import numpy as np

from . import forms
from .forms import OneForm
from .ham_spaces import (
    HamiltonianSpace,
    QuotientSet,
    SamplerError,
    chart_diff,
    fundamental_field,
    orbit_span,
    project_to_level,
)
from .induction import Q_BOX, ConstraintViolation, CotangentBundle, InducedSpace, _linear_lift, induce
from .lie_core import GroupElement, LieGroup, Subgroup, direct_product, split_element

log = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
TRANSVERSE_TOL = 1e-8
HOLONOMY_STEPS = 4096


class ContactError(ValueError):
    """varpi is not contact at a point: Ker(d varpi) is not a line transverse to Ker(varpi)."""


class UnsupportedSpaceError(ValueError):
    pass


@cache
def circle_group() -> LieGroup:
    """U(1) as 1x1 matrices e^{i theta}."""
    return LieGroup(
        name="U(1)",
        dim=1,
        to_matrix=lambda x: np.array([[np.exp(1j * x[0])]]),
        from_matrix=lambda M: np.array([np.angle(M[0, 0])]),
        algebra_basis=(np.array([[1j]]),),
    )


def unit(z) -> complex:
    z = complex(z)
    r = abs(z)
    if r == 0:
        raise ValueError("zero is not a circle value")
    return z / r


# ---------------------------------------------------------------- spaces


@dataclass(frozen=True, eq=False)
class PrequantumSpace:
    """A chart on a prequantum G-space with an explicit circle coordinate.

    ``moment`` is an optional closed-form momentum map; without it the
    momentum is evaluated from ``varpi`` on fundamental fields.  ``base``
    is the prequantized Hamiltonian space, whose chart is this chart with
    the circle coordinate dropped.
    """

    name: str
    group: LieGroup
    chart_dim: int
    varpi: OneForm
    action: Callable[[GroupElement, np.ndarray], np.ndarray]
    circle_index: int
    circle_sign: int = 1
    periodic: tuple[bool, ...] = ()
    sample: Callable[[np.random.Generator], np.ndarray] | None = None
    moment: Callable[[np.ndarray], np.ndarray] | None = None
    base: HamiltonianSpace | None = None

    def __post_init__(self):
        if not 0 <= self.circle_index < self.chart_dim:
            raise UnsupportedSpaceError(f"{self.name}: no circle coordinate")
        if self.circle_sign not in (1, -1):
            raise ValueError("circle_sign must be +1 or -1")
        per = list(self.periodic) if self.periodic else [False] * self.chart_dim
        if len(per) != self.chart_dim:
            raise ValueError(f"{self.name}: periodic mask has wrong length")
        per[self.circle_index] = True
        object.__setattr__(self, "periodic", tuple(per))
        if self.sample is None:
            object.__setattr__(self, "sample", _box_sampler(self.periodic))

    @property
    def base_index(self) -> np.ndarray:
        return np.delete(np.arange(self.chart_dim), self.circle_index)

    def rotate(self, t: float, x) -> np.ndarray:
        """Circle action of e^{it}."""
        x = np.array(x, dtype=float)
        x[self.circle_index] += self.circle_sign * t
        return x

    def circle_action(self, z, x) -> np.ndarray:
        return self.rotate(float(np.angle(unit(z))), x)

    def project(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float)[self.base_index]

    def with_circle(self, xb, theta: float = 0.0) -> np.ndarray:
        return np.insert(np.asarray(xb, dtype=float), self.circle_index, theta)

    def diff(self, x1, x2) -> np.ndarray:
        return chart_diff(self.periodic, x1, x2)

    def momentum(self, x) -> np.ndarray:
        if self.moment is not None:
            return np.asarray(self.moment(np.asarray(x, dtype=float)), dtype=float)
        return preq_moment_vector(self, x)

    def to_hamiltonian(self, name: str | None = None) -> HamiltonianSpace:
        """The chart itself with the presymplectic form d(varpi); used for orbit spans and momenta."""
        varpi = self.varpi
        return HamiltonianSpace(
            name=name or self.name,
            group=self.group,
            chart_dim=self.chart_dim,
            action=self.action,
            omega=forms.TwoForm(self.chart_dim, lambda x: forms.exterior_derivative_gram(varpi, x)),
            moment=self.momentum,
            periodic=self.periodic,
            varpi=varpi,
            sample=self.sample,
        )


def _box_sampler(periodic, box: float = 3.0):
    mask = np.asarray(periodic, dtype=bool)

    def sample(rng):
        x = rng.uniform(-box, box, mask.size)
        x[mask] = rng.uniform(0.0, TWO_PI, int(mask.sum()))
        return x

    return sample


# ---------------------------------------------------------------- Reeb field and momentum


def reeb(space: PrequantumSpace, x, h: float = forms.FD_STEP) -> np.ndarray:
    """The vector i with d(varpi)(i, .) = 0 and varpi(i) = 1."""
    x = np.asarray(x, dtype=float)
    gram = forms.exterior_derivative_gram(space.varpi, x, h)
    K = forms.nullspace(gram, n=space.chart_dim)
    if K.dim != 1:
        raise ContactError(f"{space.name}: Ker(d varpi) has dimension {K.dim} at {x}")
    v = K.basis[:, 0]
    w = space.varpi.eval(x, v)
    if abs(w) < TRANSVERSE_TOL:
        raise ContactError(f"{space.name}: Ker(d varpi) lies in Ker(varpi) at {x}")
    return v / w


def is_contact(space: PrequantumSpace, x, h: float = forms.FD_STEP) -> bool:
    try:
        reeb(space, x, h)
    except ContactError:
        return False
    return True


def reeb_residuals(space: PrequantumSpace, x, rng: np.random.Generator, n_vectors: int = 4, h: float = forms.FD_STEP):
    """(|varpi(i) - 1|, max |d varpi(i, v)| over random unit v)."""
    x = np.asarray(x, dtype=float)
    r = reeb(space, x, h)
    gram = forms.exterior_derivative_gram(space.varpi, x, h)
    V = rng.standard_normal((space.chart_dim, n_vectors))
    V /= np.linalg.norm(V, axis=0)
    return abs(space.varpi.eval(x, r) - 1.0), float(np.max(np.abs(r @ gram @ V)))


def reeb_flow(space: PrequantumSpace, x, t: float, n_steps: int = 64) -> np.ndarray:
    """RK4 integration of the Reeb field for time t."""
    y = np.array(x, dtype=float)
    dt = t / n_steps
    for _ in range(n_steps):
        k1 = reeb(space, y)
        k2 = reeb(space, y + dt / 2 * k1)
        k3 = reeb(space, y + dt / 2 * k2)
        k4 = reeb(space, y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def circle_flow_residual(space: PrequantumSpace, x, times=(np.pi / 3, np.pi, TWO_PI), n_steps: int = 64) -> float:
    """max over t of |Reeb flow(t) x - e^{it} x| in the chart."""
    worst = 0.0
    for t in times:
        flowed = reeb_flow(space, x, t, n_steps)
        worst = max(worst, float(np.linalg.norm(flowed - space.rotate(t, x))))
    return worst


def preq_moment(space: PrequantumSpace, Z, x, h: float = forms.FD_STEP) -> float:
    """<Phi(x), Z> = varpi(Z(x)), the fundamental field taken by central differences."""
    Z = np.asarray(Z, dtype=float)
    if not np.any(Z):
        return 0.0
    x = np.asarray(x, dtype=float)
    return space.varpi.eval(x, fundamental_field(space.group, space.action, Z, x, h))


def preq_moment_vector(space: PrequantumSpace, x, h: float = forms.FD_STEP) -> np.ndarray:
    return np.array([preq_moment(space, e, x, h) for e in np.eye(space.group.dim)])


def action_pullback_residual(space: PrequantumSpace, g: GroupElement, x, v, h: float = forms.FD_STEP) -> float:
    """|(g^* varpi)(v) - varpi(v)| at x."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    dgv = (space.action(g, x + h * v) - space.action(g, x - h * v)) / (2 * h)
    return abs(space.varpi.eval(space.action(g, x), dgv) - space.varpi.eval(x, v))


def circle_commutation_residual(space: PrequantumSpace, g: GroupElement, t: float, x) -> float:
    a = space.action(g, space.rotate(t, x))
    b = space.rotate(t, space.action(g, x))
    return float(np.linalg.norm(space.diff(a, b)))


# ---------------------------------------------------------------- constructions


def _dual_name(name: str) -> str:
    return name[:-1] if name.endswith("⁻") else name + "⁻"


def preq_dual(space: PrequantumSpace) -> PrequantumSpace:
    """Same manifold and action, opposite 1-form, reversed circle action."""
    moment = space.moment
    return replace(
        space,
        name=_dual_name(space.name),
        varpi=-space.varpi,
        circle_sign=-space.circle_sign,
        moment=(lambda x: -np.asarray(moment(x))) if moment is not None else None,
        base=None,
    )


def restrict_preq(space: PrequantumSpace, sub: Subgroup, name: str | None = None) -> PrequantumSpace:
    if sub.amb is not space.group:
        raise ValueError("subgroup does not sit in the acting group")
    act, moment = space.action, space.moment
    return replace(
        space,
        name=name or f"Res_{sub.sub.name} {space.name}",
        group=sub.sub,
        action=lambda h, x: act(sub.include(h), x),
        moment=(lambda x: sub.restrict(moment(x))) if moment is not None else None,
        base=None,
    )


def pull_back_group(space: PrequantumSpace, big: LieGroup, proj, proj_algebra: np.ndarray, name=None) -> PrequantumSpace:
    """The same space acted on by ``big`` through a homomorphism ``proj: big -> space.group``.

    ``proj_algebra`` is the matrix of the derived map on algebra coefficients;
    the momentum pulls back by its transpose.
    """
    act, moment = space.action, space.moment
    return replace(
        space,
        name=name or space.name,
        group=big,
        action=lambda g, x: act(proj(g), x),
        moment=(lambda x: proj_algebra.T @ np.asarray(moment(x))) if moment is not None else None,
        base=None,
    )


@dataclass(frozen=True, eq=False)
class BoxProduct:
    """(X1 x X2)/Delta on the slice where the first circle coordinate is 0.

    Delta = {(z^-1, z)} in the circle actions of the two factors; gauge fixing
    rotates by the element of Delta that zeroes the first circle angle.
    """

    S1: PrequantumSpace
    S2: PrequantumSpace
    space: PrequantumSpace = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "space", self._build())

    @property
    def n1(self) -> int:
        return self.S1.chart_dim - 1

    def lift(self, y) -> tuple[np.ndarray, np.ndarray]:
        """Slice chart -> (x1, x2) with the first circle angle 0."""
        y = np.asarray(y, dtype=float)
        return self.S1.with_circle(y[: self.n1], 0.0), y[self.n1 :]

    def gauge(self, x1, x2) -> np.ndarray:
        """(x1, x2) -> slice chart, moving along Delta."""
        x1 = np.asarray(x1, dtype=float)
        t = self.S1.circle_sign * x1[self.S1.circle_index]
        x2 = self.S2.rotate(t, x2)
        return np.concatenate([self.S1.project(x1), x2])

    def _build(self) -> PrequantumSpace:
        S1, S2 = self.S1, self.S2
        n1, keep = self.n1, S1.base_index
        diagonal = S1.group is S2.group

        def coeffs(y):
            x1, x2 = self.lift(y)
            return np.concatenate([np.asarray(S1.varpi.coeffs(x1))[keep], S2.varpi.coeffs(x2)])

        if diagonal:
            group = S1.group

            def action(g, y):
                x1, x2 = self.lift(y)
                return self.gauge(S1.action(g, x1), S2.action(g, x2))

        else:
            group = direct_product(S1.group, S2.group)

            def action(g, y):
                g1, g2 = split_element(S1.group, S2.group, g)
                x1, x2 = self.lift(y)
                return self.gauge(S1.action(g1, x1), S2.action(g2, x2))

        moment = None
        if S1.moment is not None and S2.moment is not None:
            def moment(y):
                x1, x2 = self.lift(y)
                m1, m2 = np.asarray(S1.moment(x1)), np.asarray(S2.moment(x2))
                return m1 + m2 if diagonal else np.concatenate([m1, m2])

        per = tuple(np.asarray(S1.periodic)[keep]) + tuple(S2.periodic)
        return PrequantumSpace(
            name=f"{S1.name} ⊠ {S2.name}",
            group=group,
            chart_dim=n1 + S2.chart_dim,
            varpi=OneForm(n1 + S2.chart_dim, coeffs),
            action=action,
            circle_index=n1 + S2.circle_index,
            circle_sign=S2.circle_sign,
            periodic=per,
            sample=lambda rng: self.gauge(S1.sample(rng), S2.sample(rng)),
            moment=moment,
        )


def box_product(S1: PrequantumSpace, S2: PrequantumSpace) -> BoxProduct:
    return BoxProduct(S1, S2)


# ---------------------------------------------------------------- reduction


def circle_extended_action(space: PrequantumSpace, action=None, group: LieGroup | None = None):
    """(group x U(1), action followed by the circle action of ``space``)."""
    group = group or space.group
    action = action or space.action
    T = circle_group()
    GT = direct_product(group, T)

    def act(gz, x):
        g, z = split_element(group, T, gz)
        return space.rotate(float(z.params[0]), action(g, x))

    return GT, act


@dataclass(eq=False)
class PrequantumReduction:
    """A prequantum level set modulo a group, regarded as a set.

    ``quotient`` is the G-quotient (its local dimension counts the circle
    directions); ``classes`` is the quotient by G x U(1), whose classes are
    the circles of the reduced space.
    """

    space: PrequantumSpace
    quotient: QuotientSet
    classes: QuotientSet
    freeness: dict = field(default_factory=dict)

    name = property(lambda self: self.quotient.name)

    def sample(self, seed: int, index: int) -> np.ndarray:
        return self.quotient.sample(seed, index)

    def count_classes(self, points, seed: int = 0):
        return self.classes.count_classes(points, seed)

    def local_dimension(self, x, **kw) -> int:
        return self.quotient.local_dimension(x, **kw)

    def orbit_form_residual(self, x, h: float = forms.FD_STEP) -> float:
        """max over orbit directions xi and level tangents v of |varpi(xi)| and |d varpi(xi, v)|."""
        x = np.asarray(x, dtype=float)
        O = orbit_span(self.quotient.group, self.quotient.action, x, h)
        T = self.quotient.tangent_space(x, h)
        gram = forms.exterior_derivative_gram(self.space.varpi, x, h)
        c = np.asarray(self.space.varpi.coeffs(x))
        a = np.max(np.abs(c @ O), initial=0.0)
        b = np.max(np.abs(O.T @ gram @ T.basis), initial=0.0)
        return float(max(a, b))

    def stabilizer_dim(self, x, h: float = forms.FD_STEP) -> int:
        O = orbit_span(self.quotient.group, self.quotient.action, x, h)
        return self.quotient.group.dim - forms.rank(O)

    def check_freeness(self, points) -> dict:
        dims = [self.stabilizer_dim(x) for x in points]
        report = {"free": not any(dims), "max_stabilizer_dim": max(dims, default=0)}
        if not report["free"]:
            log.info("%s: action on the level set is not free (stabilizer dim %d); treated as a set",
                     self.name, report["max_stabilizer_dim"])
        self.freeness = report
        return report

    def curve_closure(self, x, n_steps: int = 64) -> float:
        """Distance between x and its image after one period of the Reeb flow."""
        end = reeb_flow(self.space, x, TWO_PI, n_steps)
        return float(np.linalg.norm(self.space.diff(end, x)))


def preq_reduce(
    space: PrequantumSpace,
    name: str | None = None,
    solve_idx=None,
    sampler=None,
    guess=None,
    class_guess=None,
    attempts: int = 20,
    **kw,
) -> PrequantumReduction:
    """space//G = Phi^-1(0)/G, sampled by Gauss-Newton projection in the ``solve_idx`` coordinates."""
    moment = space.momentum

    def default_sampler(rng):
        last = None
        for _ in range(attempts):
            try:
                return project_to_level(moment, space.sample(rng), solve_idx)
            except SamplerError as exc:
                last = exc
        raise SamplerError(f"{space.name}: no level-set point after {attempts} attempts ({last})")

    sampler = sampler or default_sampler
    name = name or f"{space.name}//{space.group.name}"
    common = dict(constraint=moment, chart_dim=space.chart_dim, periodic=space.periodic, sampler=sampler, **kw)
    Q = QuotientSet(name=name, group=space.group, action=space.action, guess=guess, **common)
    GT, act = circle_extended_action(space)
    C = QuotientSet(name=f"{name} mod U(1)", group=GT, action=act, guess=class_guess, **common)
    return PrequantumReduction(space, Q, C)


def preq_hom(S1: PrequantumSpace, S2: PrequantumSpace, **kw) -> PrequantumReduction:
    """Hom_G(S1, S2) = (S1^- ⊠ S2)//G as a set."""
    if S1.group is not S2.group:
        raise ValueError("preq_hom: spaces over different groups")
    B = box_product(preq_dual(S1), S2)
    n1 = B.n1
    idx = np.arange(n1) if n1 else np.delete(np.arange(n1, B.space.chart_dim), S2.circle_index)

    def class_guess(y1, y2):
        # same G-orbit up to a rotation: try the circle offset that aligns the circle angles
        c = B.space.circle_index
        dt = S2.circle_sign * float(forms.wrap_angle(y2[c] - y1[c]))
        GT = R.classes.group
        return [GT.element(np.concatenate([np.zeros(S1.group.dim), [dt]]))]

    R = preq_reduce(B.space, name=f"Hom_{S1.group.name}({S1.name}, {S2.name})", solve_idx=idx,
                    class_guess=class_guess, **kw)
    R.box = B
    return R


# ---------------------------------------------------------------- induction


@dataclass(eq=False)
class PrequantumInduced:
    """Ind_H^G Y~ = N~//H with N~ = T*G x Y~, chart ``(q, mu, y~)``."""

    sub: Subgroup
    Y: PrequantumSpace
    q_box: float = Q_BOX
    T: CotangentBundle = field(init=False)
    N: PrequantumSpace = field(init=False)

    def __post_init__(self):
        if self.Y.group is not self.sub.sub:
            raise ValueError("Y~ must be a prequantum space over the subgroup")
        self.T = CotangentBundle(self.G)
        self.N = self._build_N()

    G = property(lambda self: self.sub.amb)
    H = property(lambda self: self.sub.sub)

    def _build_N(self) -> PrequantumSpace:
        T, Y, d = self.T, self.Y, self.T.dim
        GH = direct_product(self.G, self.H)

        def coeffs(n):
            return np.concatenate([T.varpi_coeffs(n[:d]), Y.varpi.coeffs(n[d:])])

        def action(gh, n):
            g, h = split_element(self.G, self.H, gh)
            return self.act(g, h, n)

        moment = None
        if Y.moment is not None:
            moment = lambda n: np.concatenate([self.phi(n), self.psi(n)])  # noqa: E731

        return PrequantumSpace(
            name=f"T*{self.G.name} x {Y.name}",
            group=GH,
            chart_dim=d + Y.chart_dim,
            varpi=OneForm(d + Y.chart_dim, coeffs),
            action=action,
            circle_index=d + Y.circle_index,
            circle_sign=Y.circle_sign,
            periodic=(False,) * d + tuple(Y.periodic),
            sample=lambda rng: np.concatenate([T.sample(rng, self.q_box), Y.sample(rng)]),
            moment=moment,
        )

    def act(self, g: GroupElement, h: GroupElement, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        d = self.T.dim
        x = self.T.right(self.sub.include(h), self.T.left(g, n[:d]))
        return np.concatenate([x, self.Y.action(h, n[d:])])

    def act_G(self, g, n):
        return self.act(g, self.H.identity(), n)

    def act_H(self, h, n):
        return self.act(self.G.identity(), h, n)

    def phi(self, n) -> np.ndarray:
        return self.T.phi(np.asarray(n, dtype=float)[: self.T.dim])

    def psi(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        d = self.T.dim
        return np.asarray(self.Y.momentum(n[d:])) - self.sub.restrict(n[self.G.dim : d])

    def sample_level(self, rng) -> np.ndarray:
        q = rng.uniform(-self.q_box, self.q_box, self.G.dim)
        y = self.Y.sample(rng)
        mu = _linear_lift(self.sub.algebra_inclusion.T, self.Y.momentum(y), rng.standard_normal(self.G.dim))
        return np.concatenate([q, mu, y])

    def N_H(self) -> PrequantumSpace:
        """N~ as a prequantum H-space, momentum psi."""
        return replace(self.N, group=self.H, action=self.act_H, moment=self.psi, name=f"{self.N.name} (H)")

    def reduction(self, **kw) -> PrequantumReduction:
        return preq_reduce(self.N_H(), name=f"Ind_{self.H.name}^{self.G.name} {self.Y.name}",
                           sampler=self.sample_level, **kw)

    def underlying(self, Y_base: HamiltonianSpace | None = None) -> InducedSpace:
        """The symplectically induced space Ind_H^G of the base of Y~."""
        base = Y_base or self.Y.base
        if base is None:
            raise ValueError("Y~ has no registered base space")
        return induce(self.sub, base)

    def level_tangents(self, n, h: float = forms.FD_STEP) -> forms.Subspace:
        return forms.nullspace(forms.jacobian(self.psi, n, h), n=self.N.chart_dim)

    def preq_moment_G(self, n, h: float = forms.FD_STEP) -> np.ndarray:
        """G-momentum of N~ from varpi on fundamental fields (no closed form used)."""
        n = np.asarray(n, dtype=float)
        return np.array([
            self.N.varpi.eval(n, fundamental_field(self.G, self.act_G, e, n, h)) for e in np.eye(self.G.dim)
        ])


def preq_induce(sub: Subgroup, Y: PrequantumSpace, q_box: float = Q_BOX) -> PrequantumInduced:
    return PrequantumInduced(sub, Y, q_box=q_box)


# ---------------------------------------------------------------- Frobenius reciprocity


@dataclass(eq=False)
class PrequantumFrobenius:
    """Hom_G(X~, Ind_H^G Y~) = Hom_H(Res X~, Y~) on representatives.

    Left side: (X~^- ⊠ (T*G x Y~))//(G x H), chart ``(x without circle, qbar,
    mubar, y~)``; right side: (Res X~^- ⊠ Y~)//H.
    """

    X: PrequantumSpace
    sub: Subgroup
    Y: PrequantumSpace
    q_box: float = Q_BOX

    def __post_init__(self):
        if self.X.group is not self.sub.amb or self.Y.group is not self.sub.sub:
            raise ValueError("X~ must be a G-space and Y~ an H-space")
        if self.X.moment is None:
            raise ValueError("X~ needs a closed-form momentum map")
        self.ind = PrequantumInduced(self.sub, self.Y, q_box=self.q_box)
        # share the G x H object with T*G x Y~ so the box product is diagonal
        self.GH = self.ind.N.group
        GH, G, H = self.GH, self.G, self.H
        proj_alg = np.hstack([np.eye(G.dim), np.zeros((G.dim, H.dim))])
        X_GH = pull_back_group(self.X, GH, lambda gh: split_element(G, H, gh)[0], proj_alg)
        self.left_box = box_product(preq_dual(X_GH), self.ind.N)
        self.rhs_reduction = preq_hom(restrict_preq(self.X, self.sub), self.Y)
        self.right_box = self.rhs_reduction.box

    G = property(lambda self: self.sub.amb)
    H = property(lambda self: self.sub.sub)

    def split(self, m):
        m = np.asarray(m, dtype=float)
        a = self.X.chart_dim - 1
        b = a + self.ind.T.dim
        return m[:a], m[a:b], m[b:]

    def constraint(self, m) -> np.ndarray:
        return self.left_box.space.momentum(m)

    def sample_level(self, rng, attempts: int = 20) -> np.ndarray:
        """Random x~ and y~, qbar in a box, mubar = coAd(qbar^-1, Phi(x~)), then Gauss-Newton on (qbar, mubar)."""
        nX, d = self.X.chart_dim - 1, self.G.dim
        idx = np.arange(nX, nX + 2 * d)
        for _ in range(attempts):
            x, y = self.X.sample(rng), self.Y.sample(rng)
            qbar = self.G.element(rng.uniform(-self.q_box, self.q_box, d))
            xb = self.ind.T.join(qbar, self.G.coAd(qbar.inverse(), self.X.moment(x)))
            m0 = self.left_box.gauge(x, np.concatenate([xb, y]))
            try:
                m = project_to_level(self.constraint, m0, idx)
            except SamplerError:
                continue
            if np.max(np.abs(m[nX : nX + d])) <= 2 * self.q_box:
                return m
        raise SamplerError("prequantum Frobenius left-side sampler failed")

    def lhs(self, **kw) -> PrequantumReduction:
        R = preq_reduce(self.left_box.space, name=f"Hom_{self.G.name}({self.X.name}, Ind {self.Y.name})",
                        sampler=self.sample_level, **kw)
        G, H = self.G, self.H
        T = circle_group()
        GHT = R.classes.group

        def guess(m1, m2):
            # route through the right-hand side: if (k, z) r(m1) = r(m2) then
            # (qbar2 k qbar1^-1, k, z) m1 = m2
            q1 = G.element(self.split(m1)[1][: G.dim])
            q2 = G.element(self.split(m2)[1][: G.dim])
            out = []
            w = self.rhs_reduction.classes.equivalent(self.forward(m1, tol=1e-6), self.forward(m2, tol=1e-6))
            if w is not None:
                k, z = split_element(H, T, w)
                g = q2 * self.sub.include(k) * q1.inverse()
                out.append(GHT.element(np.concatenate([g.params, k.params, z.params]), k.component))
            out.append(GHT.element(np.concatenate([(q2 * q1.inverse()).params, np.zeros(H.dim + 1)])))
            return out

        R.classes.guess = guess
        return R

    def rhs(self) -> PrequantumReduction:
        return self.rhs_reduction

    def forward(self, m, tol: float = 1e-9) -> np.ndarray:
        """(x~, pbar, y~) -> (qbar^-1 x~, y~), then Delta-gauge fixed."""
        r = np.linalg.norm(self.constraint(m))
        if r > tol:
            raise ConstraintViolation(f"representative off the level set: residual {r:.3g}")
        xs, xb, y = self.split(m)
        x = self.X.with_circle(xs, 0.0)
        qbar = self.G.element(xb[: self.G.dim])
        return self.right_box.gauge(self.X.action(qbar.inverse(), x), y)

    def backward(self, n, tol: float = 1e-9) -> np.ndarray:
        """(x~, y~) -> (x~, Phi(x~) over the identity, y~)."""
        n = np.asarray(n, dtype=float)
        r = np.linalg.norm(self.rhs_reduction.space.momentum(n))
        if r > tol:
            raise ConstraintViolation(f"representative off the level set: residual {r:.3g}")
        nX = self.X.chart_dim - 1
        x = self.X.with_circle(n[:nX], 0.0)
        xb = self.ind.T.join(self.G.identity(), self.X.moment(x))
        return self.left_box.gauge(x, np.concatenate([xb, n[nX:]]))


def preq_frobenius(X: PrequantumSpace, sub: Subgroup, Y: PrequantumSpace) -> PrequantumFrobenius:
    return PrequantumFrobenius(X, sub, Y)


def preq_frobenius_forward(F: PrequantumFrobenius, m) -> np.ndarray:
    return F.forward(m)


def preq_frobenius_backward(F: PrequantumFrobenius, n) -> np.ndarray:
    return F.backward(n)


# ---------------------------------------------------------------- holonomy


def holonomy(
    space: PrequantumSpace,
    base_loop: Callable[[float], np.ndarray],
    n_steps: int = HOLONOMY_STEPS,
    period: float = TWO_PI,
    closing: Callable[[np.ndarray], np.ndarray] | None = None,
    theta0: float = 0.0,
    h: float = 1e-5,
) -> complex:
    """Phase of the horizontal lift of a closed base loop.

    ``base_loop(t)`` gives the non-circle coordinates for t in [0, period].
    The lift solves varpi(lift') = 0 for the circle angle with RK4.  When
    the loop closes only up to a symmetry of the chart (a group element of a
    quotient, an unwrapped angle), ``closing`` maps the end point back into
    the start fibre.  The result z satisfies end = z . start.
    """
    c = space.circle_index

    def point(t, theta):
        return space.with_circle(base_loop(t), theta)

    def rate(t, theta):
        x = point(t, theta)
        gdot = (np.asarray(base_loop(t + h)) - np.asarray(base_loop(t - h))) / (2 * h)
        coeffs = np.asarray(space.varpi.coeffs(x), dtype=float)
        cb = np.delete(coeffs, c)
        if abs(coeffs[c]) < TRANSVERSE_TOL:
            raise ContactError("circle direction is horizontal; no lift")
        return -float(cb @ gdot) / coeffs[c]

    theta, dt = theta0, period / n_steps
    for i in range(n_steps):
        t = i * dt
        k1 = rate(t, theta)
        k2 = rate(t + dt / 2, theta + dt / 2 * k1)
        k3 = rate(t + dt / 2, theta + dt / 2 * k2)
        k4 = rate(t + dt, theta + dt * k3)
        theta += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    start = point(0.0, theta0)
    end = point(period, theta)
    if closing is not None:
        end = closing(end)
    mask = np.asarray(space.periodic)[space.base_index]
    gap = chart_diff(mask, space.project(end), space.project(start))
    if np.linalg.norm(gap) > 1e-6:
        raise ValueError(f"base loop does not close (gap {np.linalg.norm(gap):.3g})")
    dtheta = end[c] - start[c]
    return complex(np.exp(1j * space.circle_sign * dtheta))
