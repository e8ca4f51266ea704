"""Hamiltonian G-spaces, Marsden-Weinstein level sets and Hom sets.

Reduced spaces are represented intensionally by :class:`QuotientSet`: a
seeded sampler of level-set points together with an orbit-equivalence
predicate that returns a witnessing group element.  Nothing here builds a
global chart on a quotient.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
import scipy.optimize

from . import forms
from .forms import OneForm, Subspace, TwoForm
from .lie_core import (
    ChartDomainError,
    GroupElement,
    LieGroup,
    Subgroup,
    direct_product,
    split_element,
)

log = logging.getLogger(__name__)

Action = Callable[[GroupElement, np.ndarray], np.ndarray]

LEVEL_TOL = 1e-9
WITNESS_TOL = 1e-8
N_MAX = 8
N_STARTS = 16
SEARCH_BOX = 10.0
INVARIANT_TOL = 1e-6


class SamplerError(RuntimeError):
    """The level-set sampler could not reach the acceptance residual."""


@dataclass(frozen=True, eq=False)
class HamiltonianSpace:
    """A chart on a Hamiltonian G-space.

    ``periodic`` flags angle coordinates, which are stored unwrapped and
    compared modulo 2*pi.  ``varpi`` is an optional primitive of ``omega``.
    ``sample`` draws chart points from a seeded generator.
    """

    name: str
    group: LieGroup
    chart_dim: int
    action: Action
    omega: TwoForm
    moment: Callable[[np.ndarray], np.ndarray]
    periodic: tuple[bool, ...] = ()
    varpi: OneForm | None = None
    sample: Callable[[np.random.Generator], np.ndarray] | None = None

    def __post_init__(self):
        if not self.periodic:
            object.__setattr__(self, "periodic", (False,) * self.chart_dim)
        if len(self.periodic) != self.chart_dim:
            raise ValueError(f"{self.name}: periodic mask has wrong length")
        if self.sample is None:
            object.__setattr__(self, "sample", _box_sampler(self.periodic))

    def diff(self, x1, x2) -> np.ndarray:
        return chart_diff(self.periodic, x1, x2)

    def fundamental_field(self, xi, x, h: float = forms.FD_STEP) -> np.ndarray:
        return fundamental_field(self.group, self.action, xi, x, h)

    def orbit_span(self, x, h: float = forms.FD_STEP) -> np.ndarray:
        """Columns are the fundamental vector fields of the algebra basis at x."""
        return orbit_span(self.group, self.action, x, h)


def chart_diff(periodic: Sequence[bool], x1, x2) -> np.ndarray:
    d = np.asarray(x1, dtype=float) - np.asarray(x2, dtype=float)
    mask = np.asarray(periodic, dtype=bool)
    if mask.any():
        d = d.copy()
        d[mask] = forms.wrap_angle(d[mask])
    return d


def fundamental_field(group: LieGroup, action: Action, xi, x, h: float = forms.FD_STEP) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    x = np.asarray(x, dtype=float)
    plus = action(group.exp(h * xi), x)
    minus = action(group.exp(-h * xi), x)
    return (np.asarray(plus) - np.asarray(minus)) / (2 * h)


def orbit_span(group: LieGroup, action: Action, x, h: float = forms.FD_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    cols = [fundamental_field(group, action, e, x, h) for e in np.eye(group.dim)]
    return np.array(cols).T if cols else np.zeros((x.size, 0))


def _box_sampler(periodic, box: float = 3.0):
    mask = np.asarray(periodic, dtype=bool)

    def sample(rng):
        x = rng.uniform(-box, box, mask.size)
        x[mask] = rng.uniform(0.0, 2 * np.pi, int(mask.sum()))
        return x

    return sample


# ---------------------------------------------------------------- constructions


def point_space(group: LieGroup, value, name: str = "point") -> HamiltonianSpace:
    """A one-point H-space with constant momentum ``value`` (a fixed point of coAd)."""
    value = np.asarray(value, dtype=float)
    return HamiltonianSpace(
        name=name,
        group=group,
        chart_dim=0,
        action=lambda g, x: np.asarray(x, dtype=float),
        omega=TwoForm(0, lambda x: np.zeros((0, 0))),
        moment=lambda x: value.copy(),
        varpi=OneForm(0, lambda x: np.zeros(0)),
    )


def dual(X: HamiltonianSpace) -> HamiltonianSpace:
    moment = X.moment
    return replace(
        X,
        name=_dual_name(X.name),
        omega=-X.omega,
        moment=lambda x: -np.asarray(moment(x)),
        varpi=-X.varpi if X.varpi is not None else None,
    )


def _dual_name(name: str) -> str:
    return name[:-1] if name.endswith("⁻") else name + "⁻"


def restrict_space(X: HamiltonianSpace, H: Subgroup, name: str | None = None) -> HamiltonianSpace:
    """Res^G_H X: the same manifold with the action and momentum restricted to H."""
    if H.amb is not X.group:
        raise ValueError("subgroup does not sit in the acting group")
    act, moment = X.action, X.moment
    return replace(
        X,
        name=name or f"Res_{H.sub.name} {X.name}",
        group=H.sub,
        action=lambda h, x: act(H.include(h), x),
        moment=lambda x: H.restrict(moment(x)),
    )


def product(X1: HamiltonianSpace, X2: HamiltonianSpace, diagonal: bool | None = None) -> HamiltonianSpace:
    """X1 x X2 with summed forms.

    With a shared group (the default when both spaces have the same group)
    the action is diagonal and the moments add; otherwise the product group
    acts factorwise and the moments are concatenated.
    """
    if diagonal is None:
        diagonal = X1.group is X2.group
    n1, n2 = X1.chart_dim, X2.chart_dim

    def gram(x):
        out = np.zeros((n1 + n2, n1 + n2))
        out[:n1, :n1] = X1.omega.gram(x[:n1])
        out[n1:, n1:] = X2.omega.gram(x[n1:])
        return out

    varpi = None
    if X1.varpi is not None and X2.varpi is not None:
        c1, c2 = X1.varpi.coeffs, X2.varpi.coeffs
        varpi = OneForm(n1 + n2, lambda x: np.concatenate([c1(x[:n1]), c2(x[n1:])]))

    s1, s2 = X1.sample, X2.sample
    common = dict(
        chart_dim=n1 + n2,
        omega=TwoForm(n1 + n2, gram),
        periodic=tuple(X1.periodic) + tuple(X2.periodic),
        varpi=varpi,
        sample=lambda rng: np.concatenate([s1(rng), s2(rng)]),
    )
    if diagonal:
        if X1.group is not X2.group:
            raise ValueError("diagonal product needs a common group")
        return HamiltonianSpace(
            name=f"{X1.name} x {X2.name}",
            group=X1.group,
            action=lambda g, x: np.concatenate([X1.action(g, x[:n1]), X2.action(g, x[n1:])]),
            moment=lambda x: np.asarray(X1.moment(x[:n1])) + np.asarray(X2.moment(x[n1:])),
            **common,
        )
    G = direct_product(X1.group, X2.group)

    def action(g, x):
        g1, g2 = split_element(X1.group, X2.group, g)
        return np.concatenate([X1.action(g1, x[:n1]), X2.action(g2, x[n1:])])

    return HamiltonianSpace(
        name=f"{X1.name} x {X2.name}",
        group=G,
        action=action,
        moment=lambda x: np.concatenate([X1.moment(x[:n1]), X2.moment(x[n1:])]),
        **common,
    )


# ---------------------------------------------------------------- cardinal properties


def cardinal_a_subspaces(X: HamiltonianSpace, x, h: float = forms.FD_STEP) -> tuple[Subspace, Subspace]:
    """(Ker DPhi(x), orbit-tangent symplectic orthogonal) at x."""
    x = np.asarray(x, dtype=float)
    kernel = forms.nullspace(forms.jacobian(X.moment, x, h), n=X.chart_dim)
    orbit = Subspace.span(X.orbit_span(x, h), ambient_dim=X.chart_dim)
    return kernel, forms.symplectic_orthogonal(X.omega.gram(x), orbit)


def cardinal_b_subspaces(X: HamiltonianSpace, x, h: float = forms.FD_STEP) -> tuple[Subspace, Subspace]:
    """(Im DPhi(x), annihilator of the stabilizer algebra) at x."""
    x = np.asarray(x, dtype=float)
    image = Subspace.span(forms.jacobian(X.moment, x, h), ambient_dim=X.group.dim)
    stabilizer = forms.nullspace(X.orbit_span(x, h), n=X.group.dim)
    return image, forms.annihilator(stabilizer)


def check_cardinal_a(X: HamiltonianSpace, x, tol: float = 1e-6, h: float = forms.FD_STEP) -> bool:
    return forms.subspace_equal(*cardinal_a_subspaces(X, x, h), tol)


def check_cardinal_b(X: HamiltonianSpace, x, tol: float = 1e-6, h: float = forms.FD_STEP) -> bool:
    return forms.subspace_equal(*cardinal_b_subspaces(X, x, h), tol)


# ---------------------------------------------------------------- orbit matching


def component_offsets(n_components: int, n_max: int) -> list[tuple[int, ...]]:
    """All exponent tuples in [-n_max, n_max]^n, nearest to the identity component first."""
    if n_components == 0:
        return [()]
    rng = range(-n_max, n_max + 1)
    return sorted(itertools.product(rng, repeat=n_components), key=lambda k: (max(map(abs, k)), sum(map(abs, k)), k))


def orbit_equivalent(
    group: LieGroup,
    action: Action,
    x1,
    x2,
    *,
    diff: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
    tol: float = WITNESS_TOL,
    bounds: float = SEARCH_BOX,
    n_starts: int = N_STARTS,
    n_max: int = N_MAX,
    rng: np.random.Generator | None = None,
    guesses: Sequence[GroupElement] = (),
) -> GroupElement | None:
    """Search for g with |action(g, x1) - x2| < tol.

    Multi-start bounded least squares over the identity-component chart,
    crossed with the component exponents up to ``n_max``.  Returns None when
    no witness is found at this budget.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    diff = diff or (lambda a, b: np.asarray(a) - np.asarray(b))
    rng = rng if rng is not None else np.random.default_rng(0)

    for g in [group.identity(), *guesses]:
        if _residual_norm(group, action, diff, g, x1, x2) < tol:
            return g

    starts = [np.zeros(group.dim)] + [np.clip(g.params, -bounds, bounds) for g in guesses]
    starts += [rng.uniform(-bounds, bounds, group.dim) for _ in range(max(0, n_starts - len(starts)))]
    comps = component_offsets(group.n_components, n_max)
    for start in starts:
        for comp in comps:
            g = _solve_witness(group, action, diff, comp, start, x1, x2, bounds)
            if g is not None and _residual_norm(group, action, diff, g, x1, x2) < tol:
                return g
    return None


def _residual_norm(group, action, diff, g, x1, x2) -> float:
    try:
        return float(np.linalg.norm(diff(action(g, x1), x2)))
    except ChartDomainError:
        return np.inf


def _solve_witness(group, action, diff, comp, start, x1, x2, bounds):
    if group.dim == 0:
        return group.element([], comp)

    def resid(params):
        try:
            return np.asarray(diff(action(group.element(params, comp), x1), x2), dtype=float)
        except ChartDomainError:
            return np.full(x1.size, 1e6)

    try:
        sol = scipy.optimize.least_squares(
            resid, start, bounds=(-bounds, bounds), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=30 * (group.dim + 1)
        )
    except ValueError:
        return None
    return group.element(sol.x, comp)


# ---------------------------------------------------------------- level sets and quotient sets


def project_to_level(constraint, x0, solve_idx=None, tol: float = LEVEL_TOL, max_iter: int = 50) -> np.ndarray:
    """Gauss-Newton (minimum-norm steps) on the ``solve_idx`` coordinates until |constraint| < tol."""
    x = np.array(x0, dtype=float)
    idx = np.arange(x.size) if solve_idx is None else np.asarray(solve_idx, dtype=int)
    for _ in range(max_iter):
        r = np.atleast_1d(constraint(x))
        if np.linalg.norm(r) < tol * 1e-2:
            break
        J = forms.jacobian(lambda z: constraint(_put(x, idx, z)), x[idx], 1e-7)
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        x[idx] += step
        if np.linalg.norm(step) < 1e-15:
            break
    r = np.linalg.norm(np.atleast_1d(constraint(x)))
    if r >= tol:
        raise SamplerError(f"level-set projection stalled at residual {r:.3g}")
    return x


def _put(x, idx, z):
    y = x.copy()
    y[idx] = z
    return y


@dataclass
class ClassCount:
    n_samples: int
    n_classes: int
    labels: list[int]
    representatives: list[int]
    n_max: int
    witness_residual_max: float = 0.0


@dataclass(eq=False)
class QuotientSet:
    """A level set {constraint = 0} modulo a group, regarded as a set.

    ``sampler(rng)`` returns a level-set point.  Equivalence is the orbit
    relation of ``group`` under ``action``, realized by
    :func:`orbit_equivalent`; ``guess`` optionally proposes witnesses.
    ``invariant`` is an optional function constant on orbits: points whose
    invariants differ are not searched (a witness is still required to merge).
    """

    name: str
    group: LieGroup
    action: Action
    constraint: Callable[[np.ndarray], np.ndarray]
    chart_dim: int
    periodic: tuple[bool, ...]
    sampler: Callable[[np.random.Generator], np.ndarray]
    n_max: int = N_MAX
    n_starts: int = N_STARTS
    bounds: float = SEARCH_BOX
    tol: float = WITNESS_TOL
    guess: Callable[[np.ndarray, np.ndarray], Sequence[GroupElement]] | None = None
    invariant: Callable[[np.ndarray], np.ndarray] | None = None
    notes: dict = field(default_factory=dict)

    def diff(self, x1, x2):
        return chart_diff(self.periodic, x1, x2)

    def sample(self, seed: int, index: int) -> np.ndarray:
        """Deterministic per (seed, index)."""
        return self.sampler(np.random.default_rng([seed, index]))

    def residual(self, x) -> float:
        return float(np.linalg.norm(np.atleast_1d(self.constraint(np.asarray(x, dtype=float)))))

    def equivalent(self, x1, x2, seed: int = 0) -> GroupElement | None:
        guesses = self.guess(x1, x2) if self.guess is not None else ()
        return orbit_equivalent(
            self.group,
            self.action,
            x1,
            x2,
            diff=self.diff,
            tol=self.tol,
            bounds=self.bounds,
            n_starts=self.n_starts,
            n_max=self.n_max,
            rng=np.random.default_rng([seed, 7919]),
            guesses=guesses,
        )

    def count_classes(self, points: Sequence[np.ndarray], seed: int = 0) -> ClassCount:
        """Union-find over orbit equivalence; each point is tested against the current class roots."""
        parent = list(range(len(points)))
        roots: list[int] = []
        worst = 0.0

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        inv = [None] * len(points)
        if self.invariant is not None:
            inv = [np.asarray(self.invariant(x), dtype=float) for x in points]
        for i, x in enumerate(points):
            for r in roots:
                if inv[i] is not None and np.linalg.norm(inv[i] - inv[r]) > INVARIANT_TOL * max(1.0, np.linalg.norm(inv[r])):
                    continue
                g = self.equivalent(x, points[r], seed=seed)
                if g is not None:
                    worst = max(worst, float(np.linalg.norm(self.diff(self.action(g, x), points[r]))))
                    parent[find(i)] = find(r)
                    break
            else:
                roots.append(i)
        labels = [roots.index(find(i)) for i in range(len(points))]
        if len(roots) > 1:
            log.info("%s: %d classes at budget n_max=%d", self.name, len(roots), self.n_max)
        return ClassCount(len(points), len(roots), labels, roots, self.n_max, worst)

    def tangent_space(self, x, h: float = forms.FD_STEP) -> Subspace:
        return forms.nullspace(forms.jacobian(self.constraint, x, h), n=self.chart_dim)

    def local_dimension(self, x, cutoff: float = 1e-6, h: float = forms.FD_STEP, n_probe: int | None = None) -> int:
        """Local PCA estimate of the quotient dimension at x.

        Random level-set tangent displacements are projected orthogonally to
        the orbit directions; eigenvalues of their covariance above
        ``cutoff`` times the largest one are counted.
        """
        x = np.asarray(x, dtype=float)
        T = self.tangent_space(x, h)
        if T.dim == 0:
            return 0
        O = Subspace.span(orbit_span(self.group, self.action, x, h), ambient_dim=self.chart_dim)
        rng = np.random.default_rng(12345)
        n_probe = n_probe or 4 * T.dim + 4
        D = T.basis @ rng.standard_normal((T.dim, n_probe))
        D = D - O.basis @ (O.basis.T @ D)
        ev = np.linalg.eigvalsh(D @ D.T / n_probe)
        top = ev.max()
        if top <= 1e-14:
            return 0
        return int(np.sum(ev > cutoff * top))


def reduce_space(
    X: HamiltonianSpace,
    name: str | None = None,
    solve_idx=None,
    guess=None,
    n_max: int = N_MAX,
    attempts: int = 20,
) -> QuotientSet:
    """X//G = moment^-1(0)/G as a QuotientSet.

    The sampler draws a chart point with ``X.sample`` and projects it onto
    the zero level by Gauss-Newton in the ``solve_idx`` coordinates.
    """
    moment = X.moment

    def sampler(rng):
        last = None
        for _ in range(attempts):
            try:
                return project_to_level(moment, X.sample(rng), solve_idx)
            except SamplerError as exc:
                last = exc
        raise SamplerError(f"{X.name}: no level-set point after {attempts} attempts ({last})")

    return QuotientSet(
        name=name or f"{X.name}//{X.group.name}",
        group=X.group,
        action=X.action,
        constraint=moment,
        chart_dim=X.chart_dim,
        periodic=X.periodic,
        sampler=sampler,
        n_max=n_max,
        guess=guess,
    )


def hom_set(X1: HamiltonianSpace, X2: HamiltonianSpace, solve: int | None = None, **kw) -> QuotientSet:
    """Hom_G(X1, X2) = (X1^- x X2)//G.

    The level set is {moment1(x1) = moment2(x2)}.  ``solve`` picks which
    factor's coordinates are solved for when sampling (1 or 2); the other is
    drawn freely.  By default the first factor is solved unless it is a point.
    """
    if X1.group is not X2.group:
        raise ValueError("hom_set: spaces over different groups")
    if solve is None:
        solve = 1 if X1.chart_dim > 0 else 2
    n1 = X1.chart_dim
    idx = np.arange(n1) if solve == 1 else np.arange(n1, n1 + X2.chart_dim)
    P = product(dual(X1), X2, diagonal=True)
    Q = reduce_space(P, name=f"Hom_{X1.group.name}({X1.name}, {X2.name})", solve_idx=idx, **kw)
    Q.notes["factor_dims"] = (X1.chart_dim, X2.chart_dim)
    return Q
