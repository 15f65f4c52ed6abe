"""Dense two-phase simplex for inequality-form LPs with certificates.

Problems are stated as ``max obj^T x subject to G x <= h`` with free
variables.  Internally the problem is converted to equality standard form
by splitting ``x = u - v`` and adding slacks.  Outcomes carry verifiable
certificates: a ray for unbounded problems and a Farkas vector for
infeasible ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-8


class SimplexError(RuntimeError):
    """Numerical failure (cycling guard or iteration limit exceeded)."""


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """max obj^T x  s.t.  G x <= h, x free."""

    G: np.ndarray
    h: np.ndarray
    obj: np.ndarray

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.G, dtype=float))
        h = np.asarray(self.h, dtype=float).ravel()
        obj = np.asarray(self.obj, dtype=float).ravel()
        if G.size == 0:
            G = G.reshape(h.shape[0], obj.shape[0])
        if G.shape != (h.shape[0], obj.shape[0]):
            raise ValueError(
                f"inconsistent LP dimensions: G {G.shape}, h {h.shape}, obj {obj.shape}"
            )
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "obj", obj)

    @property
    def num_constraints(self) -> int:
        return self.G.shape[0]

    @property
    def num_vars(self) -> int:
        return self.G.shape[1]


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    x: np.ndarray | None = None
    value: float | None = None
    ray: np.ndarray | None = None
    farkas: np.ndarray | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL

    @property
    def is_feasible(self) -> bool:
        return self.status is not LpStatus.INFEASIBLE


def _pivot(T: np.ndarray, red: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    piv = T[row]
    for r in range(T.shape[0]):
        if r != row and abs(T[r, col]) > 0.0:
            T[r] -= T[r, col] * piv
    if abs(red[col]) > 0.0:
        red -= red[col] * piv
    basis[row] = col


def _iterate(T, red, basis, bland_after: int, max_iters: int):
    """Run simplex pivots (minimization). Returns None at optimum or the
    entering column index if an unbounded direction is detected."""
    degen = 0
    for _ in range(max_iters):
        cols = np.where(red[:-1] < -PIVOT_TOL)[0]
        if cols.size == 0:
            return None
        if degen > bland_after:
            col = int(cols[0])  # Bland's rule
        else:
            col = int(cols[np.argmin(red[cols])])
        colvals = T[:, col]
        pos = np.where(colvals > PIVOT_TOL)[0]
        if pos.size == 0:
            return col
        ratios = T[pos, -1] / colvals[pos]
        rmin = ratios.min()
        scale = 1.0 + abs(rmin)
        ties = pos[ratios <= rmin + 1e-9 * scale]
        row = int(min(ties, key=lambda r: basis[r]))
        degen = degen + 1 if rmin <= PIVOT_TOL else 0
        _pivot(T, red, basis, row, col)
    raise SimplexError("simplex iteration limit exceeded")


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Solve an inequality-form LP, returning status plus certificate.

    Deterministic: Dantzig pricing with a switch to Bland's rule after
    2*(k+d) consecutive degenerate pivots.
    """
    G, h, obj = lp.G, lp.h, lp.obj
    k, d = G.shape

    if k == 0:
        if np.all(obj == 0.0):
            return LpOutcome(LpStatus.OPTIMAL, x=np.zeros(d), value=0.0)
        ray = np.sign(obj)
        return LpOutcome(LpStatus.UNBOUNDED, ray=ray)
    if d == 0:
        if np.all(h >= -FEAS_TOL * (1.0 + np.abs(h))):
            return LpOutcome(LpStatus.OPTIMAL, x=np.zeros(0), value=0.0)
        y = np.zeros(k)
        y[int(np.argmin(h))] = 1.0
        return LpOutcome(LpStatus.INFEASIBLE, farkas=y)

    # standard form [G, -G, I] z = h, z >= 0
    N = 2 * d + k
    A = np.hstack([G, -G, np.eye(k)])
    b = h.astype(float).copy()
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    T = np.hstack([A, np.eye(k), b[:, None]])
    basis = list(range(N, N + k))
    bland_after = 2 * (k + d)
    max_iters = 5000 + 200 * (k + N)

    # phase 1: minimize sum of artificials
    red = np.zeros(N + k + 1)
    red[N : N + k] = 1.0
    red[: N + k] -= T[:, : N + k].sum(axis=0)
    red[-1] = -T[:, -1].sum()
    if _iterate(T, red, basis, bland_after, max_iters) is not None:
        raise SimplexError("phase-1 problem reported unbounded")

    scale = 1.0 + float(np.max(np.abs(h), initial=0.0))
    if -red[-1] > FEAS_TOL * scale:
        # infeasible; recover Farkas vector from phase-1 duals
        y = 1.0 - red[N : N + k]
        p = np.where(flip, -y, y)
        farkas = np.clip(-p, 0.0, None)
        return LpOutcome(LpStatus.INFEASIBLE, farkas=farkas)

    # drive leftover artificials out of the basis
    drop_rows = []
    for r in range(len(basis)):
        if basis[r] >= N:
            piv_cols = np.where(np.abs(T[r, :N]) > PIVOT_TOL)[0]
            if piv_cols.size:
                _pivot(T, red, basis, r, int(piv_cols[0]))
            else:
                drop_rows.append(r)
    if drop_rows:
        keep = [r for r in range(T.shape[0]) if r not in drop_rows]
        T = T[keep]
        basis = [basis[r] for r in keep]

    # phase 2 on original cost (minimize -obj over split variables)
    T = np.hstack([T[:, :N], T[:, -1:]])
    cost = np.concatenate([-obj, obj, np.zeros(k)])
    red = np.zeros(N + 1)
    red[:N] = cost - cost[basis] @ T[:, :N]
    red[-1] = -(cost[basis] @ T[:, -1])
    entering = _iterate(T, red, basis, bland_after, max_iters)

    if entering is not None:
        rz = np.zeros(N)
        rz[entering] = 1.0
        for r, bi in enumerate(basis):
            rz[bi] = -T[r, entering]
        ray = rz[:d] - rz[d : 2 * d]
        norm = np.max(np.abs(ray))
        if norm > 0:
            ray = ray / norm
        return LpOutcome(LpStatus.UNBOUNDED, ray=ray)

    z = np.zeros(N)
    for r, bi in enumerate(basis):
        z[bi] = T[r, -1]
    x = z[:d] - z[d : 2 * d]
    return LpOutcome(LpStatus.OPTIMAL, x=x, value=float(obj @ x))


def solve_lp_with_equalities(G, h, E, f, obj) -> LpOutcome:
    """Solve max obj^T x s.t. G x <= h, E x = f by splitting equalities."""
    obj = np.asarray(obj, dtype=float).ravel()
    d = obj.shape[0]
    G = np.asarray(G, dtype=float).reshape(-1, d)
    h = np.asarray(h, dtype=float).ravel()
    E = np.asarray(E, dtype=float).reshape(-1, d)
    f = np.asarray(f, dtype=float).ravel()
    Gfull = np.vstack([G, E, -E])
    hfull = np.concatenate([h, f, -f])
    return solve_lp(LinearProgram(Gfull, hfull, obj))
