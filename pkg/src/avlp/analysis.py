"""Structural analyzers for the feasible set: boundedness for all right-hand
sides, universal feasibility, a sufficient connectedness condition, necessary
convexity conditions, and a brute-force vertex enumerator used as an oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import AvlpProblem, SignVector
from .exact import find_feasible_point, sign_vectors
from .simplex import LinearProgram, solve_lp

VERTEX_MAX_DIM = 4
VERTEX_MAX_ROWS = 12


class SizeLimitError(ValueError):
    """Enumeration limits for the brute-force routines exceeded."""


# ---------------------------------------------------------------------------
# exact rational helpers


def _solve_square_exact(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Gaussian elimination over Fractions; returns None when singular."""
    d = len(rhs)
    M = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(d):
        piv = next((r for r in range(col, d) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col]
        M[col] = [v / inv for v in M[col]]
        for r in range(d):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[r][d] for r in range(d)]


def enumerate_vertices(G, h, tol: float = 1e-9) -> list[tuple[np.ndarray, tuple[int, ...]]]:
    """All vertices of {x : G x <= h} with their active row sets.

    Candidate points are the solutions of every nonsingular d-subset of
    rows, solved in exact rational arithmetic, filtered by feasibility
    (G x <= h + tol) and deduplicated.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float).ravel()
    k, d = G.shape
    if d > VERTEX_MAX_DIM or k > VERTEX_MAX_ROWS:
        raise SizeLimitError(f"vertex enumeration limited to d<={VERTEX_MAX_DIM}, k<={VERTEX_MAX_ROWS}")
    GF = [[Fraction(v) for v in row] for row in G]
    hF = [Fraction(v) for v in h]
    tolF = Fraction(tol)
    seen: dict[tuple, tuple[np.ndarray, tuple[int, ...]]] = {}
    for S in itertools.combinations(range(k), d):
        x = _solve_square_exact([GF[i] for i in S], [hF[i] for i in S])
        if x is None:
            continue
        vals = [sum(GF[i][j] * x[j] for j in range(d)) for i in range(k)]
        if any(vals[i] > hF[i] + tolF for i in range(k)):
            continue
        active = tuple(i for i in range(k) if abs(vals[i] - hF[i]) <= tolF)
        key = tuple(round(float(v), 9) for v in x)
        if key not in seen:
            seen[key] = (np.array([float(v) for v in x]), active)
    return list(seen.values())


# ---------------------------------------------------------------------------
# verdict types


@dataclass(frozen=True)
class BoundednessVerdict:
    bounded: bool
    ray: np.ndarray | None = None
    sign: SignVector | None = None


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible_all_b: bool
    witness: np.ndarray | None = None


@dataclass(frozen=True)
class ConnectednessVerdict:
    holds: bool
    u: np.ndarray | None = None
    v: np.ndarray | None = None


@dataclass(frozen=True)
class ConvexityVerdict:
    consistent: bool
    row: int | None = None
    coordinate: int | None = None
    x1: np.ndarray | None = None
    x2: np.ndarray | None = None


@dataclass(frozen=True)
class AnalysisReport:
    boundedness: BoundednessVerdict | None = None
    feasibility: FeasibilityVerdict | None = None
    connectedness: ConnectednessVerdict | None = None
    convexity: ConvexityVerdict | None = None


# ---------------------------------------------------------------------------
# analyzers


def bounded_for_all_b(p: AvlpProblem) -> BoundednessVerdict:
    """Decide whether M(b) is bounded for every b.

    Equivalent to A x - D|x| <= 0 having only the trivial solution.  Every
    full orthant is checked with a box-capped LP: a positive optimum of
    max e^T diag(s) x over the homogeneous orthant system exposes a
    nontrivial ray (rays scale, so the cap diag(s) x <= e loses nothing).
    Signs on zero columns of D still matter here through the orthant rows,
    so all 2^n orthants are enumerated.
    """
    n = p.n
    for s in sign_vectors(n, list(range(n))):
        S = s.diag()
        G = np.vstack([p.A - p.D @ S, -S, S])
        h = np.concatenate([np.zeros(p.m + n), np.ones(n)])
        out = solve_lp(LinearProgram(G, h, s.as_array()))
        if out.is_optimal and out.value > 1e-8:
            return BoundednessVerdict(False, ray=out.x, sign=s)
    return BoundednessVerdict(True)


def feasible_for_all_b(p: AvlpProblem) -> FeasibilityVerdict:
    """M(b) is nonempty for every b iff it is nonempty for b = -e."""
    probe = p.with_rhs(-np.ones(p.m))
    witness = find_feasible_point(probe)
    if witness is None:
        return FeasibilityVerdict(False)
    return FeasibilityVerdict(True, witness=witness)


def connected_sufficient(p: AvlpProblem) -> ConnectednessVerdict:
    """Sufficient condition for connectedness of M:
    solvability of (A+D)u - (A-D)v <= b with u, v >= 0."""
    n = p.n
    G = np.vstack(
        [
            np.hstack([p.A + p.D, -(p.A - p.D)]),
            -np.eye(2 * n),
        ]
    )
    h = np.concatenate([p.b, np.zeros(2 * n)])
    out = solve_lp(LinearProgram(G, h, np.zeros(2 * n)))
    if out.is_optimal:
        return ConnectednessVerdict(True, u=out.x[:n], v=out.x[n:])
    return ConnectednessVerdict(False)


def convexity_active_pair_check(
    p: AvlpProblem, x1, x2, i: int, tol: float = 1e-8
) -> ConvexityVerdict:
    """Necessary convexity condition at a shared active row.

    Requires row i active at both feasible points.  A coordinate j with
    x1_j * x2_j < 0 and D_ij > 0 certifies that M is not convex.
    """
    x1 = np.asarray(x1, dtype=float).ravel()
    x2 = np.asarray(x2, dtype=float).ravel()
    from .core import membership

    scale = 1.0 + abs(p.b[i])
    for x in (x1, x2):
        ok, res = membership(p, x, tol)
        if not ok:
            raise ValueError("point is not feasible")
        if abs(res[i]) > tol * scale:
            raise ValueError(f"row {i} is not active at the point")
    for j in range(p.n):
        if x1[j] * x2[j] < -tol and p.D[i, j] > 0:
            return ConvexityVerdict(False, row=i, coordinate=j, x1=x1, x2=x2)
    return ConvexityVerdict(True)


def convexity_vertex_check(p: AvlpProblem, limit: int = 4, tol: float = 1e-8) -> ConvexityVerdict:
    """Necessary convexity condition over orthant-polyhedron vertices.

    Enumerates, per orthant s, the vertices of (A - D diag(s)) x <= b that
    lie in the orthant.  Two vertices from different orthants sharing an
    active row i while flipping the sign of a coordinate j with D_ij > 0
    certify that M is not convex.
    """
    if p.n > limit:
        raise SizeLimitError(f"convexity vertex check limited to n <= {limit}")
    found: list[tuple[SignVector, np.ndarray, tuple[int, ...]]] = []
    for s in sign_vectors(p.n, list(range(p.n))):
        S = s.diag()
        G = p.A - p.D @ S
        for x, active in enumerate_vertices(G, p.b, tol):
            if np.all(S @ x >= -tol):
                found.append((s, x, active))
    for (s1, x1, a1), (s2, x2, a2) in itertools.combinations(found, 2):
        shared = set(a1) & set(a2)
        if not shared:
            continue
        for j in range(p.n):
            if x1[j] * x2[j] < -tol:
                for i in shared:
                    if p.D[i, j] > 0:
                        return ConvexityVerdict(False, row=i, coordinate=j, x1=x1, x2=x2)
    return ConvexityVerdict(True)
