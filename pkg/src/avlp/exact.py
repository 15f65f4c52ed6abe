"""Exact solving by orthant enumeration, the LP relaxation bound, and the
vertex-candidacy test.

The feasible set is a union of convex polyhedra, one per sign orthant, so
the problem reduces to 2^l LPs where l counts the nonzero columns of D.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import AvlpProblem, SignVector, membership, nonzero_columns, sgn, orthant_restriction
from .simplex import LinearProgram, LpOutcome, LpStatus, SimplexError, solve_lp


class SolveStatus:
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class OrthantResult:
    sign: SignVector
    status: LpStatus
    value: float | None


@dataclass(frozen=True)
class SolveReport:
    status: str
    f_star: float | None = None
    x_star: np.ndarray | None = None
    witness_sign: SignVector | None = None
    orthants_solved: int = 0
    per_orthant: tuple[OrthantResult, ...] = field(default_factory=tuple)
    ray: np.ndarray | None = None


def sign_vectors(n: int, enumerated: list[int]) -> "itertools.chain":
    """All sign vectors in {+-1}^n, lexicographic (-1 < +1) over the
    enumerated indices, with the remaining entries set to 0 (meaning
    unconstrained; their absolute value never enters the system)."""

    def gen():
        for combo in itertools.product((-1, 1), repeat=len(enumerated)):
            s = [0] * n
            for idx, val in zip(enumerated, combo):
                s[idx] = val
            yield SignVector(tuple(s))

    return gen()


def solve_exact(p: AvlpProblem) -> SolveReport:
    """Solve the problem exactly by enumerating sign orthants.

    Signs are enumerated only on the nonzero columns of D (the orthant LP
    does not depend on the remaining signs, which are fixed to +1).
    Aggregation: any unbounded orthant makes the problem unbounded,
    otherwise the best optimal orthant wins; ties go to the
    lexicographically smallest sign vector.
    """
    cols = nonzero_columns(p.D)
    per_orthant: list[OrthantResult] = []
    best_value = None
    best_x = None
    best_sign = None
    unbounded_sign = None
    unbounded_ray = None

    for s in sign_vectors(p.n, cols):
        try:
            out = solve_lp(orthant_restriction(p, s))
        except SimplexError as exc:
            raise SimplexError(f"orthant {s.entries}: {exc}") from exc
        per_orthant.append(
            OrthantResult(s, out.status, out.value if out.is_optimal else None)
        )
        if out.status is LpStatus.UNBOUNDED and unbounded_sign is None:
            unbounded_sign = s
            unbounded_ray = out.ray
        elif out.is_optimal:
            if best_value is None or out.value > best_value:
                best_value = out.value
                best_x = out.x
                best_sign = s

    solved = len(per_orthant)
    if unbounded_sign is not None:
        return SolveReport(
            SolveStatus.UNBOUNDED,
            witness_sign=unbounded_sign,
            orthants_solved=solved,
            per_orthant=tuple(per_orthant),
            ray=unbounded_ray,
        )
    if best_value is None:
        return SolveReport(
            SolveStatus.INFEASIBLE,
            orthants_solved=solved,
            per_orthant=tuple(per_orthant),
        )
    return SolveReport(
        SolveStatus.OPTIMAL,
        f_star=float(best_value),
        x_star=best_x,
        witness_sign=best_sign,
        orthants_solved=solved,
        per_orthant=tuple(per_orthant),
    )


def find_feasible_point(p: AvlpProblem) -> np.ndarray | None:
    """First feasible point found during orthant enumeration, or None."""
    cols = nonzero_columns(p.D)
    zero_obj = p.with_objective(np.zeros(p.n))
    for s in sign_vectors(p.n, cols):
        out = solve_lp(orthant_restriction(zero_obj, s))
        if out.is_optimal:
            return out.x
        if out.status is LpStatus.UNBOUNDED:  # pragma: no cover - obj is zero
            raise SimplexError("zero-objective orthant LP reported unbounded")
    return None


def relaxation_bound(p: AvlpProblem) -> LpOutcome:
    """LP relaxation via the split x = x1 - x2, |x| ~ x1 + x2.

    Solves max c^T x1 - c^T x2 s.t. (A-D)x1 - (A+D)x2 <= b, x1, x2 >= 0.
    When optimal, its value is an upper bound on the exact optimum.
    """
    n = p.n
    G = np.vstack(
        [
            np.hstack([p.A - p.D, -(p.A + p.D)]),
            -np.eye(2 * n),
        ]
    )
    h = np.concatenate([p.b, np.zeros(2 * n)])
    obj = np.concatenate([p.c, -p.c])
    return solve_lp(LinearProgram(G, h, obj))


@dataclass(frozen=True)
class CandidacyResult:
    passed: bool
    reason: str = ""

    def __bool__(self) -> bool:  # pragma: no cover - convenience
        return self.passed


def vertex_candidacy(p: AvlpProblem, x, tol: float = 1e-8) -> CandidacyResult:
    """Necessary vertex condition: a vertex of conv(M) must be a vertex of
    the orthant polyhedron both without and with the orthant rows.

    fail certifies x is not a vertex of conv(M); pass is not sufficient.
    """
    x = np.asarray(x, dtype=float).ravel()
    ok, _ = membership(p, x, tol)
    if not ok:
        raise ValueError("point is not feasible")
    s = SignVector.from_point(x)
    S = s.diag()
    G1 = p.A - p.D @ S
    res1 = G1 @ x - p.b
    scale = 1.0 + np.abs(p.b)
    active1 = G1[np.abs(res1) <= tol * scale]
    rank1 = np.linalg.matrix_rank(active1) if active1.size else 0
    if rank1 < p.n:
        return CandidacyResult(
            False, "active rows of the orthant system have rank < n"
        )
    orth_rows = -S
    orth_active = orth_rows[np.abs(S @ x) <= tol]
    active2 = np.vstack([active1, orth_active]) if orth_active.size else active1
    if np.linalg.matrix_rank(active2) < p.n:
        return CandidacyResult(
            False, "active rows including orthant facets have rank < n"
        )
    return CandidacyResult(True)
