"""Finite-difference differential forms and subspace linear algebra.

Charts are real coordinate vectors.  Circle-valued coordinates are carried as
unwrapped angles, so central differences never straddle a branch cut.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

FD_STEP = 1e-5
RANK_TOL = 1e-7


class DegenerateFormError(ValueError):
    pass


@dataclass(frozen=True)
class OneForm:
    """A 1-form given by its coefficient covector at each chart point."""

    dim: int
    coeffs: Callable[[np.ndarray], np.ndarray]

    def eval(self, x, v) -> float:
        return float(np.asarray(self.coeffs(np.asarray(x, dtype=float))) @ np.asarray(v, dtype=float))

    def __neg__(self) -> OneForm:
        c = self.coeffs
        return OneForm(self.dim, lambda x: -np.asarray(c(x)))


@dataclass(frozen=True)
class TwoForm:
    """A 2-form given by its Gram matrix at each chart point."""

    dim: int
    gram: Callable[[np.ndarray], np.ndarray]

    def eval(self, x, v, w) -> float:
        return float(np.asarray(v, dtype=float) @ self.gram(np.asarray(x, dtype=float)) @ np.asarray(w, dtype=float))

    def __neg__(self) -> TwoForm:
        g = self.gram
        return TwoForm(self.dim, lambda x: -np.asarray(g(x)))

    def __add__(self, other: TwoForm) -> TwoForm:
        g1, g2 = self.gram, other.gram
        return TwoForm(self.dim, lambda x: np.asarray(g1(x)) + np.asarray(g2(x)))


@dataclass(frozen=True)
class Subspace:
    ambient_dim: int
    basis: np.ndarray  # (ambient_dim, k), orthonormal columns

    @classmethod
    def span(cls, vectors, ambient_dim: int | None = None, tol_rel: float = RANK_TOL) -> Subspace:
        A = np.asarray(vectors, dtype=float)
        if A.ndim == 1:
            A = A[:, None]
        n = A.shape[0] if ambient_dim is None else ambient_dim
        if A.size == 0:
            return cls(n, np.zeros((n, 0)))
        U, s, _ = np.linalg.svd(A, full_matrices=False)
        k = _count_above(s, tol_rel)
        return cls(n, U[:, :k])

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls(n, np.zeros((n, 0)))

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls(n, np.eye(n))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project(self, v: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.T @ v)


def exterior_derivative(form: OneForm, x, v, w, h: float = FD_STEP, richardson: bool = False) -> float:
    """d(form)(v, w) at x by central differences with constant-coefficient extensions of v and w."""
    x, v, w = (np.asarray(a, dtype=float) for a in (x, v, w))

    def d(step):
        dv = (form.eval(x + step * v, w) - form.eval(x - step * v, w)) / (2 * step)
        dw = (form.eval(x + step * w, v) - form.eval(x - step * w, v)) / (2 * step)
        return dv - dw

    if richardson:
        return (4 * d(h / 2) - d(h)) / 3
    return d(h)


def exterior_derivative_gram(form: OneForm, x, h: float = FD_STEP) -> np.ndarray:
    """Gram matrix of d(form) at x: the antisymmetric part of the coefficient Jacobian."""
    J = jacobian(form.coeffs, x, h)
    return J.T - J


def jacobian(f: Callable[[np.ndarray], np.ndarray], x, h: float = FD_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    f0 = np.atleast_1d(np.asarray(f(x), dtype=float))
    J = np.zeros((f0.size, x.size))
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        J[:, i] = (np.atleast_1d(f(x + e)) - np.atleast_1d(f(x - e))) / (2 * h)
    return J


def rank(A, tol_rel: float = RANK_TOL) -> int:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0
    return _count_above(np.linalg.svd(A, compute_uv=False), tol_rel)


def nullspace(A, tol_rel: float = RANK_TOL, n: int | None = None) -> Subspace:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1] if n is None else n
    if A.size == 0:
        return Subspace.full(n)
    _, s, Vt = np.linalg.svd(A, full_matrices=True)
    k = _count_above(s, tol_rel)
    return Subspace(n, Vt[k:].T.copy())


def image(A, tol_rel: float = RANK_TOL) -> Subspace:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    return Subspace.span(A, ambient_dim=A.shape[0], tol_rel=tol_rel)


def symplectic_orthogonal(gram: np.ndarray, S: Subspace, tol_rel: float = RANK_TOL) -> Subspace:
    """{v : omega(v, s) = 0 for all s in S} for the 2-form with Gram matrix ``gram`` at a point."""
    gram = np.asarray(gram, dtype=float)
    n = gram.shape[0]
    if rank(gram, tol_rel) < n:
        raise DegenerateFormError(f"2-form has rank {rank(gram, tol_rel)} < {n}")
    if S.dim == 0:
        return Subspace.full(n)
    return nullspace((gram @ S.basis).T, tol_rel, n)


def annihilator(S: Subspace) -> Subspace:
    """Annihilator in dual coefficients; bases and dual bases are matched, so it is the orthogonal complement."""
    if S.dim == 0:
        return Subspace.full(S.ambient_dim)
    return nullspace(S.basis.T, n=S.ambient_dim)


def principal_angles(S1: Subspace, S2: Subspace) -> np.ndarray:
    if S1.dim == 0 or S2.dim == 0:
        return np.zeros(0)
    return scipy.linalg.subspace_angles(S1.basis, S2.basis)


def subspace_equal(S1: Subspace, S2: Subspace, tol: float = 1e-6) -> bool:
    if S1.ambient_dim != S2.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")
    if S1.dim != S2.dim:
        return False
    ang = principal_angles(S1, S2)
    return bool(np.all(ang < tol))


def wrap_angle(d):
    """Representative of an angle difference in [-pi, pi)."""
    return (np.asarray(d) + np.pi) % (2 * np.pi) - np.pi


def _count_above(s: np.ndarray, tol_rel: float) -> int:
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol_rel * s[0]))
