"""Canonical data model for linear programs with absolute values.

The canonical problem is ``max c^T x  s.t.  A x - D |x| <= b`` with D >= 0
entrywise.  This module provides the problem types, normalization of
sign-unrestricted D, restriction to a sign orthant (where the problem
becomes a plain LP), and membership evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simplex import LinearProgram

DEFAULT_FEAS_TOL = 1e-9


class DimensionError(ValueError):
    """Matrix/vector shapes do not agree."""


def sgn(x) -> np.ndarray:
    """Entrywise sign with the convention sgn(r) = 1 for r >= 0."""
    x = np.asarray(x, dtype=float)
    return np.where(x >= 0.0, 1.0, -1.0)


@dataclass(frozen=True)
class SignVector:
    """Element of {-1, 0, +1}^n selecting an orthant."""

    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if any(e not in (-1, 0, 1) for e in entries):
            raise ValueError("sign vector entries must be in {-1, 0, +1}")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def is_strict(self) -> bool:
        return all(e != 0 for e in self.entries)

    def diag(self) -> np.ndarray:
        return np.diag(np.array(self.entries, dtype=float))

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    @classmethod
    def from_point(cls, x) -> "SignVector":
        return cls(tuple(int(v) for v in sgn(x)))


def _check_shapes(A, D, b, c):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    D = np.atleast_2d(np.asarray(D, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    if A.shape != D.shape:
        raise DimensionError(f"A {A.shape} and D {D.shape} must share shape")
    if b.shape[0] != A.shape[0]:
        raise DimensionError(f"b has length {b.shape[0]}, expected {A.shape[0]}")
    if c.shape[0] != A.shape[1]:
        raise DimensionError(f"c has length {c.shape[0]}, expected {A.shape[1]}")
    return A, D, b, c


@dataclass(frozen=True)
class AvlpProblem:
    """max c^T x  s.t.  A x - D |x| <= b, with D >= 0."""

    A: np.ndarray
    D: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A, D, b, c = _check_shapes(self.A, self.D, self.b, self.c)
        if np.any(D < 0):
            raise ValueError("D must be nonnegative entrywise; use normalize() first")
        for name, arr in (("A", A), ("D", D), ("b", b), ("c", c)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def with_rhs(self, b) -> "AvlpProblem":
        return AvlpProblem(self.A, self.D, b, self.c)

    def with_objective(self, c) -> "AvlpProblem":
        return AvlpProblem(self.A, self.D, self.b, c)


@dataclass(frozen=True)
class RawProblem:
    """Same shape as AvlpProblem but with D unrestricted in sign."""

    A: np.ndarray
    D: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A, D, b, c = _check_shapes(self.A, self.D, self.b, self.c)
        for name, arr in (("A", A), ("D", D), ("b", b), ("c", c)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


def normalize(raw: RawProblem) -> AvlpProblem:
    """Rewrite a problem with sign-unrestricted D into canonical form.

    Splits D = D+ - D- and introduces y with -y <= x <= y, giving rows
    A x - D+|x| + D- y <= b over the doubled variable vector (x, y).
    If D is already nonnegative the problem is returned unchanged.
    """
    if np.all(raw.D >= 0):
        return AvlpProblem(raw.A, raw.D, raw.b, raw.c)
    m, n = raw.m, raw.n
    Dp = np.maximum(raw.D, 0.0)
    Dm = np.maximum(-raw.D, 0.0)
    eye = np.eye(n)
    zeros_mn = np.zeros((m, n))
    A2 = np.vstack(
        [
            np.hstack([raw.A, Dm]),
            np.hstack([eye, -eye]),
            np.hstack([-eye, -eye]),
        ]
    )
    D2 = np.vstack(
        [
            np.hstack([Dp, zeros_mn]),
            np.zeros((2 * n, 2 * n)),
        ]
    )
    b2 = np.concatenate([raw.b, np.zeros(2 * n)])
    c2 = np.concatenate([raw.c, np.zeros(n)])
    return AvlpProblem(A2, D2, b2, c2)


def orthant_restriction(p: AvlpProblem, s: SignVector) -> LinearProgram:
    """LP obtained by restricting the problem to the orthant diag(s) x >= 0.

    Within the orthant |x| = diag(s) x, so the constraints become
    (A - D diag(s)) x <= b together with -diag(s) x <= 0.

    A zero entry in s leaves that coordinate unconstrained; this is only
    sound when the matching column of D is zero, since then |x_j| never
    enters the system.
    """
    if s.n != p.n:
        raise DimensionError(f"sign vector length {s.n}, expected {p.n}")
    entries = np.asarray(s.entries)
    free = entries == 0
    if np.any(free & np.any(p.D != 0, axis=0)):
        raise ValueError(
            "zero sign entries are only allowed for coordinates whose column "
            "of D is zero"
        )
    S = s.diag()
    sign_rows = -S[~free]
    G = np.vstack([p.A - p.D @ S, sign_rows])
    h = np.concatenate([p.b, np.zeros(sign_rows.shape[0])])
    return LinearProgram(G, h, p.c)


def membership(
    p: AvlpProblem, x, tol: float = DEFAULT_FEAS_TOL
) -> tuple[bool, np.ndarray]:
    """Evaluate A x - D|x| <= b at x; returns (feasible, residual vector).

    Feasibility uses a relative tolerance tol * (1 + |b_i|) per row.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != p.n:
        raise DimensionError(f"point has length {x.shape[0]}, expected {p.n}")
    residual = p.A @ x - p.D @ np.abs(x) - p.b
    ok = bool(np.all(residual <= tol * (1.0 + np.abs(p.b))))
    return ok, residual


def nonzero_columns(D) -> list[int]:
    """Indices of nonzero columns of D; their count drives orthant enumeration."""
    D = np.atleast_2d(np.asarray(D, dtype=float))
    return [j for j in range(D.shape[1]) if np.any(D[:, j] != 0.0)]
