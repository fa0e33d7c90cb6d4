"""Dense two-phase simplex for small linear programs.

Minimizes ``c @ x`` subject to ``a_eq @ x == b_eq``, ``a_ub @ x <= b_ub`` and
``x >= 0``. Bland's smallest-index rule is used for both the entering and the
leaving choice, which rules out cycling on the degenerate, highly symmetric
instances the seed scheduler produces. Everything is a plain dense numpy
tableau; problem sizes here are a few dozen variables at most.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-10
MAX_ITER = 10_000


@dataclass(frozen=True)
class LpProblem:
    objective: np.ndarray
    a_eq: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    b_eq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    a_ub: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    b_ub: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        c = np.atleast_1d(np.asarray(self.objective, dtype=float))
        n = c.shape[0]
        if n < 1:
            raise ValueError("objective must have at least one variable")
        a_eq = np.asarray(self.a_eq, dtype=float).reshape(-1, n) \
            if np.size(self.a_eq) else np.zeros((0, n))
        b_eq = np.atleast_1d(np.asarray(self.b_eq, dtype=float)) \
            if np.size(self.b_eq) else np.zeros(0)
        a_ub = np.asarray(self.a_ub, dtype=float).reshape(-1, n) \
            if np.size(self.a_ub) else np.zeros((0, n))
        b_ub = np.atleast_1d(np.asarray(self.b_ub, dtype=float)) \
            if np.size(self.b_ub) else np.zeros(0)
        if a_eq.shape[0] != b_eq.shape[0] or a_ub.shape[0] != b_ub.shape[0]:
            raise ValueError("constraint matrix/vector shape mismatch")
        for arr in (c, a_eq, b_eq, a_ub, b_ub):
            if not np.all(np.isfinite(arr)):
                raise ValueError("coefficients must be finite")
        for name, arr in (("objective", c), ("a_eq", a_eq), ("b_eq", b_eq),
                          ("a_ub", a_ub), ("b_ub", b_ub)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]


@dataclass(frozen=True)
class LpSolution:
    status: str                      # optimal | infeasible | unbounded | failed
    x: Optional[np.ndarray]
    objective_value: Optional[float]
    message: str = ""


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]


def _bland_iterate(tableau: np.ndarray, basis: list[int],
                   allowed: int) -> str:
    """Run simplex iterations on a tableau whose last row holds reduced
    costs; columns >= ``allowed`` are never entered."""
    for _ in range(MAX_ITER):
        reduced = tableau[-1, :allowed]
        entering = -1
        for j in range(allowed):
            if reduced[j] < -FEAS_TOL:
                entering = j
                break
        if entering < 0:
            return "optimal"
        col = tableau[:-1, entering]
        best_ratio = None
        leaving = -1
        for i in range(col.shape[0]):
            if col[i] > PIVOT_TOL:
                ratio = tableau[i, -1] / col[i]
                if best_ratio is None or ratio < best_ratio - PIVOT_TOL or (
                        abs(ratio - best_ratio) <= PIVOT_TOL
                        and basis[i] < basis[leaving]):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            return "unbounded"
        _pivot(tableau, leaving, entering)
        basis[leaving] = entering
    return "failed"


def solve(problem: LpProblem) -> LpSolution:
    """Two-phase simplex; returns the vertex reached by Bland's rule."""
    n = problem.n_vars
    m_ub = problem.a_ub.shape[0]
    m_eq = problem.a_eq.shape[0]
    m = m_ub + m_eq

    rows = np.vstack([problem.a_ub, problem.a_eq]) if m else np.zeros((0, n))
    rhs = np.concatenate([problem.b_ub, problem.b_eq]) if m else np.zeros(0)
    is_ub = np.array([True] * m_ub + [False] * m_eq)

    # slack per inequality; artificial wherever the slack basis is not
    # readily feasible (negative rhs or equality row)
    n_slack = m_ub
    needs_artificial = [(not is_ub[i]) or rhs[i] < 0 for i in range(m)]
    n_art = sum(needs_artificial)
    total = n + n_slack + n_art

    tableau = np.zeros((m + 1, total + 1))
    basis: list[int] = []
    art_start = n + n_slack
    art_idx = art_start
    slack_idx = n
    for i in range(m):
        sign = -1.0 if rhs[i] < 0 else 1.0
        tableau[i, :n] = sign * rows[i]
        tableau[i, -1] = sign * rhs[i]
        if is_ub[i]:
            tableau[i, slack_idx] = sign * 1.0
            slack_col = slack_idx
            slack_idx += 1
        if needs_artificial[i]:
            tableau[i, art_idx] = 1.0
            basis.append(art_idx)
            art_idx += 1
        else:
            basis.append(slack_col)

    if n_art:
        # phase 1: minimize the sum of artificials
        cost = np.zeros(total + 1)
        cost[art_start:total] = 1.0
        tableau[-1] = cost
        for i, b in enumerate(basis):
            if b >= art_start:
                tableau[-1] -= tableau[i]
        status = _bland_iterate(tableau, basis, allowed=total)
        if status != "optimal":
            return LpSolution("failed", None, None,
                              f"phase-1 simplex returned {status}")
        phase1_value = -tableau[-1, -1]
        if phase1_value > FEAS_TOL:
            return LpSolution("infeasible", None, None,
                              f"phase-1 optimum {phase1_value:.3e}")
        # drive leftover artificials out of the basis
        drop_rows = []
        for i in range(m):
            if basis[i] >= art_start:
                pivot_col = -1
                for j in range(art_start):
                    if abs(tableau[i, j]) > PIVOT_TOL:
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    _pivot(tableau, i, pivot_col)
                    basis[i] = pivot_col
                else:
                    drop_rows.append(i)  # redundant constraint
        if drop_rows:
            keep = [i for i in range(m) if i not in drop_rows]
            tableau = np.vstack([tableau[keep], tableau[-1:]])
            basis = [basis[i] for i in keep]
            m = len(keep)

    # phase 2 on the original objective, artificial columns frozen out
    cost = np.zeros(tableau.shape[1])
    cost[:n] = problem.objective
    tableau[-1] = cost
    for i, b in enumerate(basis):
        if cost[b] != 0.0:
            tableau[-1] -= cost[b] * tableau[i]
    status = _bland_iterate(tableau, basis, allowed=art_start)
    if status == "unbounded":
        return LpSolution("unbounded", None, None)
    if status != "optimal":
        return LpSolution("failed", None, None, "iteration limit reached")

    x = np.zeros(n)
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tableau[i, -1]
    x[np.abs(x) < 1e-12] = 0.0
    return LpSolution("optimal", x, float(problem.objective @ x))
