"""Matrix Lie groups, their algebras and duals.

Algebra elements and dual vectors are plain coefficient arrays against the
group's ordered ``algebra_basis``; the pairing of a dual vector with an
algebra element is the dot product of the two coefficient arrays.

Groups may be disconnected.  An element is stored as identity-component
chart parameters plus an integer exponent for each component generator,
with matrix ``prod(gen_i ** k_i) @ to_matrix(params)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

ALGEBRA_RESIDUAL_TOL = 1e-10


class ChartDomainError(ValueError):
    """A matrix fell outside the chart of the group it was mapped into."""


@dataclass(frozen=True, eq=False)
class LieGroup:
    """A matrix Lie group with a global chart on its identity component.

    ``from_matrix`` is the partial inverse of ``to_matrix`` and must raise
    :class:`ChartDomainError` on matrices outside the chart.  When the group
    has component generators, ``component_of`` maps a matrix to the integer
    exponents of the generators.
    """

    name: str
    dim: int
    to_matrix: Callable[[np.ndarray], np.ndarray]
    from_matrix: Callable[[np.ndarray], np.ndarray]
    algebra_basis: tuple[np.ndarray, ...]
    component_generators: tuple[np.ndarray, ...] = ()
    component_of: Callable[[np.ndarray], tuple[int, ...]] | None = None
    _proj: np.ndarray = field(init=False, repr=False)
    _flat: np.ndarray = field(init=False, repr=False)
    _stack: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.algebra_basis) != self.dim:
            raise ValueError(f"{self.name}: need {self.dim} basis matrices")
        n = self.to_matrix(np.zeros(self.dim)).shape[0]
        stack = np.array(self.algebra_basis, dtype=complex).reshape(self.dim, n, n)
        flat = _realify_stack(stack).T
        if self.dim and np.linalg.matrix_rank(flat) != self.dim:
            raise ValueError(f"{self.name}: algebra basis is linearly dependent")
        object.__setattr__(self, "_stack", stack)
        object.__setattr__(self, "_flat", flat)
        object.__setattr__(self, "_proj", np.linalg.pinv(flat) if self.dim else np.zeros((0, flat.shape[0])))
        if self.component_generators and self.component_of is None:
            raise ValueError(f"{self.name}: component generators need component_of")

    @property
    def n_components(self) -> int:
        return len(self.component_generators)

    @property
    def matrix_size(self) -> int:
        return self.to_matrix(np.zeros(self.dim)).shape[0]

    def identity(self) -> GroupElement:
        return GroupElement(self, np.zeros(self.dim), (0,) * self.n_components)

    def element(self, params: Sequence[float], component: Sequence[int] = ()) -> GroupElement:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.dim,):
            raise ValueError(f"{self.name}: expected {self.dim} chart parameters, got {params.shape}")
        component = tuple(int(k) for k in component) or (0,) * self.n_components
        if len(component) != self.n_components:
            raise ValueError(f"{self.name}: expected {self.n_components} component indices")
        return GroupElement(self, params, component)

    def matrix(self, g: GroupElement) -> np.ndarray:
        M = self.to_matrix(g.params)
        for gen, k in zip(self.component_generators, g.component):
            if k:
                M = np.linalg.matrix_power(gen, k) @ M
        return M

    def from_full_matrix(self, M: np.ndarray) -> GroupElement:
        """Inverse of :meth:`matrix`, including the component search."""
        comp: tuple[int, ...] = ()
        if self.n_components:
            comp = tuple(self.component_of(M))
            for gen, k in zip(self.component_generators, comp):
                if k:
                    M = np.linalg.matrix_power(np.linalg.inv(gen), k) @ M
        params = np.asarray(self.from_matrix(M), dtype=float)
        err = np.max(np.abs(self.to_matrix(params) - M)) if M.size else 0.0
        if err > 1e-9 * max(1.0, np.max(np.abs(M))):
            raise ChartDomainError(f"{self.name}: matrix outside chart (residual {err:.3g})")
        return GroupElement(self, params, comp)

    def mul(self, g: GroupElement, h: GroupElement) -> GroupElement:
        return self.from_full_matrix(self.matrix(g) @ self.matrix(h))

    def inv(self, g: GroupElement) -> GroupElement:
        return self.from_full_matrix(np.linalg.inv(self.matrix(g)))

    def algebra_matrix(self, xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        n = self.matrix_size
        if self.dim == 0:
            return np.zeros((n, n), dtype=complex)
        return np.tensordot(xi, self._stack, axes=1)

    def algebra_coeffs(self, A: np.ndarray, tol: float = ALGEBRA_RESIDUAL_TOL) -> np.ndarray:
        """Coordinates of a matrix in the algebra basis; raises if it is not in the span."""
        return self._coeffs_many(np.asarray(A)[None], tol)[:, 0]

    def _coeffs_many(self, stack: np.ndarray, tol: float) -> np.ndarray:
        flat = _realify_stack(stack).T
        c = self._proj @ flat
        resid = np.max(np.abs(self._flat @ c - flat), initial=0.0)
        if resid > tol * max(1.0, np.max(np.abs(flat), initial=0.0)):
            raise ChartDomainError(f"{self.name}: matrix leaves the algebra span (residual {resid:.3g})")
        return c

    def exp(self, xi: np.ndarray) -> GroupElement:
        return self.from_full_matrix(scipy.linalg.expm(self.algebra_matrix(xi)))

    def bracket(self, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        X, Y = self.algebra_matrix(xi), self.algebra_matrix(eta)
        return self.algebra_coeffs(X @ Y - Y @ X)

    def Ad_matrix(self, g: GroupElement) -> np.ndarray:
        """Matrix of Ad(g) acting on algebra coefficients."""
        if self.dim == 0:
            return np.zeros((0, 0))
        M = self.matrix(g)
        return self._coeffs_many(M @ self._stack @ np.linalg.inv(M), ALGEBRA_RESIDUAL_TOL)

    def Ad(self, g: GroupElement, xi: np.ndarray) -> np.ndarray:
        return self.Ad_matrix(g) @ np.asarray(xi, dtype=float)

    def coAd(self, g: GroupElement, mu: np.ndarray) -> np.ndarray:
        # <coAd(g, mu), xi> = <mu, Ad(g^-1) xi>, and Ad(g^-1) = Ad(g)^-1
        return np.linalg.solve(self.Ad_matrix(g).T, np.asarray(mu, dtype=float))

    def left_velocity(self, params: np.ndarray, dparams: np.ndarray, h: float = 1e-6) -> np.ndarray:
        """Algebra coefficients of q^-1 dq for a chart velocity of the identity-component chart.

        Only identity-component parameters move; component exponents are
        locally constant so they drop out of ``q^-1 dq``.
        """
        params = np.asarray(params, dtype=float)
        dparams = np.asarray(dparams, dtype=float)
        Q = self.to_matrix(params)
        dQ = (self.to_matrix(params + h * dparams) - self.to_matrix(params - h * dparams)) / (2 * h)
        return self.algebra_coeffs(np.linalg.solve(Q, dQ), tol=1e-6)

    def random_element(self, rng: np.random.Generator, box: float = 10.0, n_max: int = 0) -> GroupElement:
        params = rng.uniform(-box, box, self.dim)
        comp = tuple(int(k) for k in rng.integers(-n_max, n_max + 1, self.n_components)) if n_max else ()
        return self.element(params, comp)


@dataclass(frozen=True, eq=False)
class GroupElement:
    group: LieGroup
    params: np.ndarray
    component: tuple[int, ...] = ()

    @property
    def matrix(self) -> np.ndarray:
        return self.group.matrix(self)

    def __mul__(self, other: GroupElement) -> GroupElement:
        return self.group.mul(self, other)

    def inverse(self) -> GroupElement:
        return self.group.inv(self)

    def __repr__(self):
        comp = f", component={self.component}" if self.component else ""
        return f"GroupElement({self.group.name}, {np.array2string(self.params, precision=6)}{comp})"


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A closed subgroup realized by matrices of the same size as the ambient group."""

    sub: LieGroup
    amb: LieGroup
    algebra_inclusion: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.sub.matrix_size != self.amb.matrix_size:
            raise ValueError("subgroup and ambient group must share the matrix size")
        cols = [self.amb.algebra_coeffs(B) for B in self.sub.algebra_basis]
        inc = np.array(cols).T if cols else np.zeros((self.amb.dim, 0))
        if np.linalg.matrix_rank(inc) != self.sub.dim:
            raise ValueError("algebra inclusion must have full column rank")
        object.__setattr__(self, "algebra_inclusion", inc)

    def include(self, h: GroupElement) -> GroupElement:
        return self.amb.from_full_matrix(self.sub.matrix(h))

    def contains(self, g: GroupElement) -> bool:
        try:
            self.sub.from_full_matrix(self.amb.matrix(g))
        except ChartDomainError:
            return False
        return True

    def to_sub(self, g: GroupElement) -> GroupElement:
        return self.sub.from_full_matrix(self.amb.matrix(g))

    def restrict(self, mu: np.ndarray) -> np.ndarray:
        return self.algebra_inclusion.T @ np.asarray(mu, dtype=float)


def direct_product(G1: LieGroup, G2: LieGroup, name: str | None = None) -> LieGroup:
    """G1 x G2 realized block-diagonally; chart and algebra basis are concatenated."""
    n1, n2 = G1.matrix_size, G2.matrix_size
    d1 = G1.dim

    def blocks(A, B):
        out = np.zeros((n1 + n2, n1 + n2), dtype=complex)
        out[:n1, :n1] = A
        out[n1:, n1:] = B
        return out

    def to_matrix(x):
        return blocks(G1.to_matrix(x[:d1]), G2.to_matrix(x[d1:]))

    def from_matrix(M):
        if np.max(np.abs(M[:n1, n1:]), initial=0.0) > 1e-9 or np.max(np.abs(M[n1:, :n1]), initial=0.0) > 1e-9:
            raise ChartDomainError("not block diagonal")
        return np.concatenate([G1.from_matrix(M[:n1, :n1]), G2.from_matrix(M[n1:, n1:])])

    gens = tuple(blocks(g, np.eye(n2)) for g in G1.component_generators) + tuple(
        blocks(np.eye(n1), g) for g in G2.component_generators
    )
    component_of = None
    if gens:
        def component_of(M):
            c1 = tuple(G1.component_of(M[:n1, :n1])) if G1.n_components else ()
            c2 = tuple(G2.component_of(M[n1:, n1:])) if G2.n_components else ()
            return c1 + c2

    basis = tuple(blocks(B, np.zeros((n2, n2))) for B in G1.algebra_basis) + tuple(
        blocks(np.zeros((n1, n1)), B) for B in G2.algebra_basis
    )
    return LieGroup(
        name=name or f"{G1.name}x{G2.name}",
        dim=G1.dim + G2.dim,
        to_matrix=to_matrix,
        from_matrix=from_matrix,
        algebra_basis=basis,
        component_generators=gens,
        component_of=component_of,
    )


def split_element(G1: LieGroup, G2: LieGroup, g: GroupElement) -> tuple[GroupElement, GroupElement]:
    """Inverse of :func:`pair_element` for a group built by :func:`direct_product`."""
    d1, c1 = G1.dim, G1.n_components
    return (
        G1.element(g.params[:d1], g.component[:c1]),
        G2.element(g.params[d1:], g.component[c1:]),
    )


def pair_element(G: LieGroup, g1: GroupElement, g2: GroupElement) -> GroupElement:
    """The element (g1, g2) of a direct product group."""
    c = tuple(g1.component) + tuple(g2.component)
    return G.element(np.concatenate([g1.params, g2.params]), c)


def trivial_group(matrix_size: int = 1) -> LieGroup:
    return LieGroup(
        name="trivial",
        dim=0,
        to_matrix=lambda x: np.eye(matrix_size, dtype=complex),
        from_matrix=lambda M: np.zeros(0),
        algebra_basis=(),
    )


def mul(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.group is not h.group:
        raise ValueError("mul: elements of different groups")
    return g.group.mul(g, h)


def exp(group: LieGroup, xi: np.ndarray) -> GroupElement:
    return group.exp(xi)


def pair(mu: np.ndarray, xi: np.ndarray) -> float:
    mu = np.asarray(mu, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if mu.shape != xi.shape:
        raise ValueError(f"pair: dimension mismatch {mu.shape} vs {xi.shape}")
    return float(mu @ xi)


def Ad(g: GroupElement, xi: np.ndarray) -> np.ndarray:
    return g.group.Ad(g, xi)


def coAd(g: GroupElement, mu: np.ndarray) -> np.ndarray:
    return g.group.coAd(g, mu)


def restrict(mu: np.ndarray, H: Subgroup) -> np.ndarray:
    return H.restrict(mu)


def _realify_stack(stack: np.ndarray) -> np.ndarray:
    """(k, n, n) complex -> (k, 2 n^2) real."""
    k = stack.shape[0]
    return np.concatenate([stack.real.reshape(k, -1), stack.imag.reshape(k, -1)], axis=1)
