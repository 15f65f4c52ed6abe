"""Exact-arithmetic unimodularity checks deciding whether every vertex of
the feasible set is integral for all integral right-hand sides.

All arithmetic here runs over Python integers (fraction-free Bareiss
elimination); the whole point is distinguishing determinant values +-1
from +-2, which floating point cannot be trusted with.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np


class BudgetExceededError(RuntimeError):
    pass


DEFAULT_BUDGET = 10**7


def _to_int_matrix(M) -> list[list[int]]:
    M = np.asarray(M, dtype=object)
    if M.ndim != 2:
        raise ValueError("expected a matrix")
    out = []
    for row in M:
        ints = []
        for v in row:
            if int(v) != v:
                raise ValueError(f"matrix entry {v!r} is not an integer")
            ints.append(int(v))
        out.append(ints)
    return out


def det_exact(M) -> int:
    """Determinant of a square integer matrix by fraction-free Bareiss
    elimination; exact for any magnitude."""
    rows = _to_int_matrix(M)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    if n == 0:
        return 1
    a = [row[:] for row in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rank_exact(M) -> int:
    """Rank of an integer matrix over the rationals, exactly."""
    rows = [r[:] for r in _to_int_matrix(M)]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    col = 0
    while rank < len(rows) and col < ncols:
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        for i in range(rank + 1, len(rows)):
            if rows[i][col] != 0:
                f1, f2 = pr[col], rows[i][col]
                rows[i] = [f1 * rows[i][j] - f2 * pr[j] for j in range(ncols)]
        rank += 1
        col += 1
    return rank


@dataclass(frozen=True)
class UnimodularityResult:
    unimodular: bool
    bad_subset: tuple[int, ...] | None = None
    bad_det: int | None = None


def is_unimodular(M, budget: int = DEFAULT_BUDGET) -> UnimodularityResult:
    """Whether every nonsingular n x n column submatrix of the n x m
    matrix M has determinant +1 or -1."""
    rows = _to_int_matrix(M)
    n = len(rows)
    m = len(rows[0]) if rows else 0
    if n > m:
        raise ValueError(f"need at least as many columns ({m}) as rows ({n})")
    count = math.comb(m, n)
    if count > budget:
        raise BudgetExceededError(f"{count} column subsets exceed budget {budget}")
    for subset in itertools.combinations(range(m), n):
        sub = [[rows[i][j] for j in subset] for i in range(n)]
        d = det_exact(sub)
        if d not in (-1, 0, 1):
            return UnimodularityResult(False, subset, d)
    return UnimodularityResult(True)


@dataclass(frozen=True)
class IntegralityReport:
    integral_for_all_b: bool
    witness_sign: tuple[int, ...] | None
    witness_basis: tuple[int, ...] | None
    witness_det: int | None
    checked_signs: int
    method: str


def _as_int_arrays(A, D):
    A = np.asarray(_to_int_matrix(A), dtype=object)
    D = np.asarray(_to_int_matrix(D), dtype=object)
    if A.shape != D.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {D.shape}")
    return A, D


def _check_signs(A, D, signs, method, budget) -> IntegralityReport:
    n = A.shape[1]
    checked = 0
    for s in signs:
        sv = np.asarray(s, dtype=object)
        M = (A - D * sv).T  # n x m
        checked += 1
        res = is_unimodular(M.tolist(), budget=budget)
        if not res.unimodular:
            return IntegralityReport(
                False, tuple(int(v) for v in s), res.bad_subset, res.bad_det, checked, method
            )
    return IntegralityReport(True, None, None, None, checked, method)


def integrality_full(A, D, budget: int = DEFAULT_BUDGET) -> IntegralityReport:
    """Vertices of {x : Ax - D|x| <= b} are integral for every integral b
    iff (A - D diag(s))^T is unimodular for all s in {+-1}^n."""
    A, D = _as_int_arrays(A, D)
    m, n = A.shape
    total = (2**n) * math.comb(m, n) if n <= m else 0
    if n > m:
        raise ValueError(f"need m >= n, got m={m}, n={n}")
    if total > budget:
        raise BudgetExceededError(f"workload {total} exceeds budget {budget}")
    signs = itertools.product((-1, 1), repeat=n)
    return _check_signs(A, D, signs, "full", budget)


def integrality_rank_one(A, D, budget: int = DEFAULT_BUDGET) -> IntegralityReport:
    """For rank-one D the full check reduces to sign vectors with at most
    two nonzero entries (over {+-1, 0}^n)."""
    A, D = _as_int_arrays(A, D)
    if rank_exact(D.tolist()) != 1:
        raise ValueError("D must have rank exactly 1")
    n = A.shape[1]
    signs = [s for s in itertools.product((-1, 0, 1), repeat=n) if sum(v != 0 for v in s) <= 2]
    return _check_signs(A, D, signs, "rank_one", budget)


def extended_signs_check(A, D, budget: int = DEFAULT_BUDGET) -> bool:
    """Given that the strict-sign check passes, unimodularity extends to
    all s in {+-1, 0}^n by determinant linearity; verified directly."""
    A, D = _as_int_arrays(A, D)
    base = integrality_full(A, D, budget=budget)
    if not base.integral_for_all_b:
        raise ValueError("extended check requires the strict-sign check to pass")
    n = A.shape[1]
    signs = itertools.product((-1, 0, 1), repeat=n)
    return _check_signs(A, D, signs, "extended", budget).integral_for_all_b


def det_linearity_identity(A, D, s, i) -> bool:
    """Exact identity behind the extension to zero signs: with s_i = 0,
    twice the determinant equals the sum of the determinants at s_i = +1
    and s_i = -1, for every square basis."""
    A, D = _as_int_arrays(A, D)
    m, n = A.shape
    s = [int(v) for v in s]
    if len(s) != n or s[i] != 0:
        raise ValueError("sign vector must have a zero at position i")
    sp = s[:]
    sp[i] = 1
    sm = s[:]
    sm[i] = -1

    def bases(sig):
        sv = np.asarray(sig, dtype=object)
        return (A - D * sv).T.tolist()

    M0, Mp, Mm = bases(s), bases(sp), bases(sm)
    for subset in itertools.combinations(range(m), n):
        d0 = det_exact([[M0[r][j] for j in subset] for r in range(n)])
        dp = det_exact([[Mp[r][j] for j in subset] for r in range(n)])
        dm = det_exact([[Mm[r][j] for j in subset] for r in range(n)])
        if 2 * d0 != dp + dm:
            return False
    return True
