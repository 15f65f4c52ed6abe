"""Compilers from richer models into canonical absolute-value form.

Supported sources: 0-1 integer LPs, disjunctions of inequalities,
disjunctions of equation systems, unions of polyhedra (with logarithmically
many auxiliary variables), and per-orthant convex descriptions (no new
variables, verified per orthant).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import AvlpProblem, SignVector
from .exact import find_feasible_point, sign_vectors
from .simplex import LinearProgram, LpStatus, solve_lp


class ReformulationError(ValueError):
    pass


class OrthantConvexVerificationError(ReformulationError):
    """Raised when no admissible scaling makes the single-inequality
    construction valid; carries the offending orthant/row pairs."""

    def __init__(self, offending, alpha):
        self.offending = offending
        self.alpha = alpha
        super().__init__(
            f"orthant-convex encoding unverifiable up to alpha={alpha:g}; "
            f"offending (orthant, row) pairs: {offending}"
        )


@dataclass(frozen=True)
class VarRole:
    role: str
    indices: tuple[int, ...]


@dataclass(frozen=True)
class Encoding:
    problem: AvlpProblem
    original_vars: tuple[int, ...]
    aux_vars: tuple[VarRole, ...] = ()
    meta: dict = field(default_factory=dict)

    @property
    def num_aux(self) -> int:
        return sum(len(r.indices) for r in self.aux_vars)


def encoding_membership(enc: Encoding, x, tol: float = 1e-7) -> bool:
    """Projected membership: does some auxiliary completion of x satisfy
    the encoded system?  Decided by fixing the original variables with
    equality rows and running the orthant enumeration feasibility check."""
    x = np.asarray(x, dtype=float).ravel()
    p = enc.problem
    k = len(enc.original_vars)
    if x.shape[0] != k:
        raise ReformulationError(f"point has length {x.shape[0]}, expected {k}")
    sel = np.zeros((k, p.n))
    for r, j in enumerate(enc.original_vars):
        sel[r, j] = 1.0
    A = np.vstack([p.A, sel, -sel])
    D = np.vstack([p.D, np.zeros((2 * k, p.n))])
    b = np.concatenate([p.b, x + tol, -x + tol])
    fixed = AvlpProblem(A, D, b, np.zeros(p.n))
    return find_feasible_point(fixed) is not None


# ---------------------------------------------------------------------------
# 0-1 integer linear programs


def ilp01_to_avlp(A, b, c) -> Encoding:
    """Encode max c^T x s.t. A x <= b, x in {0,1}^n.

    Variables (x, y) with 2x - y = e and |y| = e; only the y-columns of D
    are nonzero, so orthant enumeration stays at 2^n.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    m, n = A.shape
    eye = np.eye(n)
    zmn = np.zeros((m, n))
    znn = np.zeros((n, n))
    e = np.ones(n)
    A2 = np.vstack(
        [
            np.hstack([A, zmn]),
            np.hstack([2 * eye, -eye]),
            np.hstack([-2 * eye, eye]),
            np.hstack([znn, znn]),
            np.hstack([znn, eye]),
            np.hstack([znn, -eye]),
        ]
    )
    D2 = np.zeros_like(A2)
    D2[m + 2 * n : m + 3 * n, n:] = eye
    b2 = np.concatenate([b, e, -e, -e, e, e])
    c2 = np.concatenate([c, np.zeros(n)])
    problem = AvlpProblem(A2, D2, b2, c2)
    return Encoding(
        problem,
        original_vars=tuple(range(n)),
        aux_vars=(VarRole("binary-indicators", tuple(range(n, 2 * n))),),
    )


# ---------------------------------------------------------------------------
# disjunctions


class _Affine:
    """Affine expression coef . v + const over a fixed variable space."""

    def __init__(self, nv: int, coef=None, const: float = 0.0):
        self.coef = np.zeros(nv) if coef is None else np.asarray(coef, dtype=float).copy()
        self.const = float(const)

    def __add__(self, other):
        return _Affine(len(self.coef), self.coef + other.coef, self.const + other.const)

    def __sub__(self, other):
        return _Affine(len(self.coef), self.coef - other.coef, self.const - other.const)

    def scaled(self, a: float):
        return _Affine(len(self.coef), a * self.coef, a * self.const)


class _RowBuilder:
    def __init__(self, nv: int):
        self.nv = nv
        self.A: list[np.ndarray] = []
        self.D: list[np.ndarray] = []
        self.b: list[float] = []

    def leq(self, expr: _Affine, abs_cols: dict[int, float] | None = None):
        """Append row expr(v) - sum d_j |v_j| <= 0."""
        drow = np.zeros(self.nv)
        for j, d in (abs_cols or {}).items():
            drow[j] = d
        self.A.append(expr.coef.copy())
        self.D.append(drow)
        self.b.append(-expr.const)

    def equal(self, expr: _Affine):
        """Append rows expr(v) = 0 (two inequalities)."""
        self.leq(expr)
        self.leq(expr.scaled(-1.0))

    def build(self, obj) -> AvlpProblem:
        return AvlpProblem(np.array(self.A), np.array(self.D), np.array(self.b), obj)


def _unit(nv, j, const=0.0):
    a = _Affine(nv)
    a.coef[j] = 1.0
    a.const = const
    return a


def disjunction_ineq_to_avlp(terms, n: int) -> Encoding:
    """Encode f_1(x) <= 0 OR ... OR f_k(x) <= 0 for affine terms
    f_i(x) = g_i^T x - h_i given as (g_i, h_i) pairs.

    Uses the identity 2 min(a, b) = a + b - |a - b| folded over the terms.
    Each fold introduces a residual variable t (an equality) whose absolute
    value enters a single row; inner folds also introduce a bound variable
    w <= |t| standing in for the nested absolute value.  The projection to
    x is exactly the disjunction.
    """
    terms = list(terms)
    k = len(terms)
    if k < 2:
        raise ReformulationError("disjunction needs at least two terms")
    num_t = k - 1
    num_w = max(k - 2, 0)
    nv = n + num_t + num_w
    t0, w0 = n, n + num_t

    def f(i) -> _Affine:
        g, h = terms[i]
        a = _Affine(nv)
        a.coef[:n] = np.asarray(g, dtype=float).ravel()
        a.const = -float(h)
        return a

    rb = _RowBuilder(nv)
    E = f(k - 1)
    scale = 1.0
    ti = num_t - 1
    wi = num_w - 1
    for j in range(k - 2, -1, -1):
        t = t0 + ti
        ti -= 1
        rb.equal(_unit(nv, t) - (f(j).scaled(scale) - E))
        if j > 0:
            w = w0 + wi
            wi -= 1
            rb.leq(_unit(nv, w), abs_cols={t: 1.0})  # w <= |t|
            E = f(j).scaled(scale) + E - _unit(nv, w)
            scale *= 2.0
        else:
            rb.leq(f(j).scaled(scale) + E, abs_cols={t: 1.0})
    problem = rb.build(np.zeros(nv))
    aux = [VarRole("min-residuals", tuple(range(t0, t0 + num_t)))]
    if num_w:
        aux.append(VarRole("abs-bounds", tuple(range(w0, w0 + num_w))))
    return Encoding(problem, original_vars=tuple(range(n)), aux_vars=tuple(aux))


def disjunction_eq_to_avlp(F, G, n: int, mode: str = "corrected") -> Encoding:
    """Encode (all f_i(x) = 0) OR (all g_j(x) = 0) for affine rows
    (g, h) meaning g^T x - h = 0.

    corrected (default): per pair asserts |t_i - r_j| = |t_i + r_j|,
    equivalent to t_i r_j = 0, so the projection is exactly the
    disjunction.  paper_literal: emits the pairwise equations
    t_i + r_j = |t_i - r_j| verbatim, which additionally forces
    t_i >= 0 and r_j >= 0 and therefore rejects points whose satisfied
    system leaves the other side's residuals negative.
    """
    if mode not in ("corrected", "paper_literal"):
        raise ReformulationError(f"unknown mode {mode!r}")
    F = list(F)
    G = list(G)
    m1, m2 = len(F), len(G)
    if m1 == 0 or m2 == 0:
        raise ReformulationError("both systems must be nonempty")
    pairs = m1 * m2
    per_pair = 2 if mode == "corrected" else 1
    nv = n + m1 + m2 + per_pair * pairs
    t0 = n
    r0 = n + m1
    p0 = n + m1 + m2

    def residual(row) -> _Affine:
        g, h = row
        a = _Affine(nv)
        a.coef[:n] = np.asarray(g, dtype=float).ravel()
        a.const = -float(h)
        return a

    rb = _RowBuilder(nv)
    for i, row in enumerate(F):
        rb.equal(_unit(nv, t0 + i) - residual(row))
    for j, row in enumerate(G):
        rb.equal(_unit(nv, r0 + j) - residual(row))

    if mode == "paper_literal":
        for i in range(m1):
            rb.leq(_unit(nv, t0 + i).scaled(-1.0))  # t_i >= 0
        for j in range(m2):
            rb.leq(_unit(nv, r0 + j).scaled(-1.0))  # r_j >= 0
        for idx, (i, j) in enumerate(itertools.product(range(m1), range(m2))):
            pq = p0 + idx
            rb.equal(_unit(nv, pq) - (_unit(nv, t0 + i) - _unit(nv, r0 + j)))
            rb.leq(_unit(nv, t0 + i) + _unit(nv, r0 + j), abs_cols={pq: 1.0})
        aux_roles = (
            VarRole("residuals-left", tuple(range(t0, r0))),
            VarRole("residuals-right", tuple(range(r0, p0))),
            VarRole("pair-differences", tuple(range(p0, nv))),
        )
    else:
        for idx, (i, j) in enumerate(itertools.product(range(m1), range(m2))):
            pp = p0 + 2 * idx
            qq = pp + 1
            rb.equal(_unit(nv, pp) - (_unit(nv, t0 + i) - _unit(nv, r0 + j)))
            rb.equal(_unit(nv, qq) - (_unit(nv, t0 + i) + _unit(nv, r0 + j)))
            # |q| <= |p| and |p| <= |q|  =>  |t - r| = |t + r|  =>  t r = 0
            rb.leq(_unit(nv, qq), abs_cols={pp: 1.0})
            rb.leq(_unit(nv, qq).scaled(-1.0), abs_cols={pp: 1.0})
            rb.leq(_unit(nv, pp), abs_cols={qq: 1.0})
            rb.leq(_unit(nv, pp).scaled(-1.0), abs_cols={qq: 1.0})
        aux_roles = (
            VarRole("residuals-left", tuple(range(t0, r0))),
            VarRole("residuals-right", tuple(range(r0, p0))),
            VarRole("pair-bounds", tuple(range(p0, nv))),
        )
    problem = rb.build(np.zeros(nv))
    return Encoding(
        problem,
        original_vars=tuple(range(n)),
        aux_vars=aux_roles,
        meta={"mode": mode},
    )


# ---------------------------------------------------------------------------
# unions of polyhedra


@dataclass(frozen=True)
class Polyhedron:
    """Set {x : G x <= h}."""

    G: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.G, dtype=float))
        h = np.asarray(self.h, dtype=float).ravel()
        if G.shape[0] != h.shape[0]:
            raise ReformulationError(f"polyhedron rows {G.shape[0]} != rhs {h.shape[0]}")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return self.G.shape[1]

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float).ravel()
        return bool(np.all(self.G @ x <= self.h + tol * (1.0 + np.abs(self.h))))


@dataclass(frozen=True)
class UnionOfPolyhedra:
    pieces: tuple[Polyhedron, ...]

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ReformulationError("union needs at least one piece")
        n = pieces[0].n
        if any(q.n != n for q in pieces):
            raise ReformulationError("pieces must share the ambient dimension")
        object.__setattr__(self, "pieces", pieces)

    @property
    def n(self) -> int:
        return self.pieces[0].n

    def contains(self, x, tol: float = 1e-9) -> bool:
        return any(q.contains(x, tol) for q in self.pieces)


def _selector_codes(m: int) -> list[tuple[int, ...]]:
    """Distinct prefix-free selector vectors over {+-1}, ceil(log2 m) long
    at most.  Bit 0 maps to +1.  The first 2^k - m pieces get the shorter
    codes, mirroring the three-piece layout with an omitted trailing term."""
    if m == 1:
        return [()]
    k = math.ceil(math.log2(m))
    short = 2**k - m
    codes = []
    for i in range(m):
        if i < short:
            value, length = i, k - 1
        else:
            value, length = 2 * short + (i - short), k
        bits = [(value >> (length - 1 - j)) & 1 for j in range(length)]
        codes.append(tuple(1 if bit == 0 else -1 for bit in bits))
    return codes


def union_to_avlp(u: UnionOfPolyhedra) -> Encoding:
    """Encode a union of m polyhedra with k = ceil(log2 m) extra variables.

    Piece i gets a selector s^i over z; its block reads
    A^i x + sum_j (s^i_j z_j - |z_j|) e <= b^i.  A point x is in the union
    iff some z makes the whole system feasible.
    """
    m = len(u.pieces)
    n = u.n
    k = math.ceil(math.log2(m)) if m > 1 else 0
    codes = _selector_codes(m)
    A_blocks = []
    D_blocks = []
    b_parts = []
    for piece, code in zip(u.pieces, codes):
        rows = piece.G.shape[0]
        zA = np.zeros((rows, k))
        zD = np.zeros((rows, k))
        for j, sj in enumerate(code):
            zA[:, j] = sj
            zD[:, j] = 1.0
        A_blocks.append(np.hstack([piece.G, zA]))
        D_blocks.append(np.hstack([np.zeros_like(piece.G), zD]))
        b_parts.append(piece.h)
    problem = AvlpProblem(
        np.vstack(A_blocks),
        np.vstack(D_blocks),
        np.concatenate(b_parts),
        np.zeros(n + k),
    )
    return Encoding(
        problem,
        original_vars=tuple(range(n)),
        aux_vars=(VarRole("piece-selectors", tuple(range(n, n + k))),),
        meta={"selectors": tuple(codes), "pieces": m},
    )


def union_membership(enc: Encoding, x, tol: float = 1e-9) -> bool:
    """Decide whether some z completes x in a union encoding by solving a
    small LP in z for each of the 2^k sign patterns of z."""
    p = enc.problem
    n = len(enc.original_vars)
    k = p.n - n
    x = np.asarray(x, dtype=float).ravel()
    Ax = p.A[:, :n] @ x
    if k == 0:
        return bool(np.all(Ax <= p.b + tol * (1.0 + np.abs(p.b))))
    Az = p.A[:, n:]
    Dz = p.D[:, n:]
    for sigma in itertools.product((-1, 1), repeat=k):
        sig = np.array(sigma, dtype=float)
        G = np.vstack([Az - Dz * sig, -np.diag(sig)])
        h = np.concatenate([p.b - Ax, np.zeros(k)])
        out = solve_lp(LinearProgram(G, h, np.zeros(k)))
        if out.is_feasible:
            return True
    return False


def union_count_bound(pieces) -> int:
    """Guaranteed inequality count of the per-orthant convex encoding:
    the sum of the per-orthant inequality counts."""
    return sum(len(rows) for _, rows in pieces)


# ---------------------------------------------------------------------------
# orthant-convex sets without extra variables


@dataclass(frozen=True)
class OrthantConvexReport:
    alpha: float
    rows_emitted: int


def _emit_orthant_convex(pieces, n, alpha):
    A_rows = []
    D_rows = []
    b_vals = []
    for s, rows in pieces:
        sa = s.as_array()
        for a, beta in rows:
            a = np.asarray(a, dtype=float).ravel()
            A_rows.append(alpha * sa + a)
            D_rows.append(alpha * np.ones(n))
            b_vals.append(float(beta))
    return np.array(A_rows), np.array(D_rows), np.array(b_vals)


def _verify_orthant_convex(pieces, n, A_rows, D_rows, b_vals, tol=1e-7):
    """Check each emitted row is implied by every orthant's description."""
    offending = []
    row_idx = 0
    piece_rows = {tuple(s.entries): rows for s, rows in pieces}
    for s, rows in pieces:
        for _ in rows:
            for sp in sign_vectors(n, list(range(n))):
                desc = piece_rows.get(tuple(sp.entries), [])
                Sp = sp.diag()
                G = np.vstack(
                    [np.array([np.asarray(a, dtype=float).ravel() for a, _ in desc]).reshape(len(desc), n), -Sp]
                )
                h = np.concatenate([np.array([float(beta) for _, beta in desc]), np.zeros(n)])
                obj = A_rows[row_idx] - D_rows[row_idx] * sp.as_array()
                out = solve_lp(LinearProgram(G, h, obj))
                if out.status is LpStatus.UNBOUNDED:
                    offending.append((tuple(sp.entries), row_idx))
                elif out.is_optimal and out.value > b_vals[row_idx] + tol * (1.0 + abs(b_vals[row_idx])):
                    offending.append((tuple(sp.entries), row_idx))
            row_idx += 1
    return offending


def orthant_convex_to_avlp(
    pieces, alpha="auto", cap_factor: float = 2.0**20
) -> tuple[Encoding, OrthantConvexReport]:
    """Encode a per-orthant convex description without extra variables.

    pieces: list of (SignVector s, [(a, beta), ...]) meaning a^T x <= beta
    describes the set inside orthant s; an orthant without rows is wholly
    contained, an empty orthant is cut with a row like 0^T x <= -1.  Each
    input row becomes (alpha diag(s) e + a)^T x - alpha e^T |x| <= beta.
    With alpha='auto' the scale doubles from 1 + max|a| until an LP per
    (orthant, row) certifies every emitted row is implied by each orthant's
    description; failure up to the cap raises, which happens exactly for
    sets with an unbounded boundary direction orthogonal to an axis.
    """
    pieces = [(s if isinstance(s, SignVector) else SignVector(tuple(s)), list(rows)) for s, rows in pieces]
    if not pieces:
        raise ReformulationError("need at least one orthant piece")
    n = pieces[0][0].n
    seen = set()
    for s, _ in pieces:
        if s.n != n or not s.is_strict:
            raise ReformulationError("orthant signs must be strict and share dimension")
        if tuple(s.entries) in seen:
            raise ReformulationError(f"duplicate orthant {s.entries}")
        seen.add(tuple(s.entries))

    max_coef = max(
        (abs(float(v)) for _, rows in pieces for a, _ in rows for v in np.ravel(a)),
        default=0.0,
    )
    alpha0 = 1.0 + max_coef
    candidates = [float(alpha)] if alpha != "auto" else None

    def attempt(a_val):
        A_rows, D_rows, b_vals = _emit_orthant_convex(pieces, n, a_val)
        return _verify_orthant_convex(pieces, n, A_rows, D_rows, b_vals), (A_rows, D_rows, b_vals)

    if candidates is None:
        a_val = alpha0
        cap = cap_factor * alpha0
        offending = None
        while a_val <= cap:
            offending, mats = attempt(a_val)
            if not offending:
                break
            a_val *= 2.0
        else:
            raise OrthantConvexVerificationError(offending, cap)
        if offending:
            raise OrthantConvexVerificationError(offending, a_val)
    else:
        a_val = candidates[0]
        if a_val <= 0:
            raise ReformulationError("alpha must be positive")
        offending, mats = attempt(a_val)
        if offending:
            raise OrthantConvexVerificationError(offending, a_val)

    A_rows, D_rows, b_vals = mats
    problem = AvlpProblem(A_rows, D_rows, b_vals, np.zeros(n))
    enc = Encoding(problem, original_vars=tuple(range(n)), aux_vars=())
    return enc, OrthantConvexReport(alpha=a_val, rows_emitted=len(b_vals))
