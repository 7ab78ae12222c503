"""Self-contained dense linear-programming solver.

Solves   minimise c . v   subject to   A v <= h,  lower <= v <= upper
with a two-phase tableau simplex (Dantzig pricing, Bland's rule as the
anti-cycling fallback).  Problems with many more rows than variables are
solved through their dual, which keeps the tableau at V rows instead of R;
the primal point is recovered from the simplex multipliers and re-verified
against every constraint before the solution is reported Optimal.

solve_lp is a pure function of its inputs: concurrent calls on distinct
problems are safe, and identical problems yield identical solutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataError

DEFAULT_FEAS_TOL = 1e-9
DEFAULT_PIVOT_LIMIT = 50_000

# Eligibility threshold for ratio-test pivots; smaller entries are treated as
# zero to avoid dividing by noise.
_PIVOT_TOL = 1e-11
# A leaving ratio at or below this counts as a degenerate pivot.
_DEGEN_TOL = 1e-11
# Rows taller than this (and than 2x the variable count) are solved via the dual.
_DUAL_ROUTE_MIN_ROWS = 48


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class LpProblem:
    """Dense inequality-form LP: min c.v s.t. A v <= h, lower <= v <= upper."""

    c: np.ndarray
    A: np.ndarray
    h: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, c.shape[0])
        h = np.atleast_1d(np.asarray(self.h, dtype=float)) if np.size(self.h) else np.zeros(0)
        V = c.shape[0]
        if V < 1:
            raise DataError("LP needs at least one variable")
        if A.ndim != 2 or A.shape[1] != V:
            raise DataError(f"A must have shape (R, {V}), got {A.shape}")
        if h.shape[0] != A.shape[0]:
            raise DataError(f"h length {h.shape[0]} does not match {A.shape[0]} rows")
        lower = (np.full(V, -np.inf) if self.lower is None
                 else np.atleast_1d(np.asarray(self.lower, dtype=float)))
        upper = (np.full(V, np.inf) if self.upper is None
                 else np.atleast_1d(np.asarray(self.upper, dtype=float)))
        if lower.shape != (V,) or upper.shape != (V,):
            raise DataError("bound vectors must have one entry per variable")
        for name, arr in (("c", c), ("A", A), ("h", h)):
            if arr.size and not np.all(np.isfinite(arr)):
                raise DataError(f"{name} contains non-finite entries")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise DataError("bounds may be infinite but not NaN")
        if np.any(lower > upper):
            raise DataError("every lower bound must be <= the matching upper bound")
        for name, arr in (("c", c), ("A", A), ("h", h), ("lower", lower), ("upper", upper)):
            arr = np.array(arr, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_vars(self) -> int:
        return self.c.shape[0]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    values: np.ndarray | None = None
    objective_value: float | None = None
    pivots: int = 0
    message: str = ""

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _SimplexLimit(Exception):
    """Internal: pivot budget exhausted."""


class _Tableau:
    """Dense simplex tableau for min c.x s.t. A x = b, x >= 0.

    Artificial columns are appended for every row; phase 1 minimises their
    sum.  At extraction time the basic system is re-solved from the original
    data, so accumulated pivot drift never reaches the reported solution.
    """

    def __init__(self, A: np.ndarray, b: np.ndarray, c: np.ndarray,
                 feas_tol: float, pivot_limit: int, bland_after: int):
        self.m, self.n = A.shape
        self.feas_tol = feas_tol
        self.pivot_limit = pivot_limit
        self.bland_after = bland_after
        self.pivots = 0
        self.degenerate_pivots = 0
        self.bland = False
        self.signs = np.where(b < 0.0, -1.0, 1.0)
        self.c = np.asarray(c, dtype=float)
        self.A0 = np.asarray(A, dtype=float)
        self.b0 = np.asarray(b, dtype=float)

        body = np.empty((self.m, self.n + self.m + 1))
        body[:, :self.n] = A * self.signs[:, None]
        body[:, self.n:-1] = np.eye(self.m)
        body[:, -1] = b * self.signs
        self.T = np.vstack([body, np.zeros(self.n + self.m + 1)])
        self.basis = list(range(self.n, self.n + self.m))

    def _column_ext(self, cols) -> np.ndarray:
        """Columns of [A | artificials] in original (unsigned) row space."""
        out = np.zeros((self.m, len(cols)))
        for j, col in enumerate(cols):
            if col < self.n:
                out[:, j] = self.A0[:, col]
            else:
                out[col - self.n, j] = self.signs[col - self.n]
        return out

    # -- pivoting -----------------------------------------------------------

    def _pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        # keep the pivot column numerically exact
        T[:, col] = 0.0
        T[row, col] = 1.0
        self.basis[row] = col
        self.pivots += 1

    def _entering(self, allowed: np.ndarray) -> int:
        z = self.T[-1, :-1]
        candidates = np.where(allowed & (z < -self.feas_tol))[0]
        if candidates.size == 0:
            return -1
        if self.bland:
            return int(candidates[0])
        return int(candidates[np.argmin(z[candidates])])

    def _leaving(self, col: int) -> int:
        column = self.T[:-1, col]
        rhs = self.T[:-1, -1]
        eligible = np.where(column > _PIVOT_TOL)[0]
        if eligible.size == 0:
            return -1
        ratios = rhs[eligible] / column[eligible]
        best = np.min(ratios)
        ties = eligible[ratios <= best + _DEGEN_TOL]
        if self.bland:
            # smallest basis index among ties, per Bland's anti-cycling rule
            row = int(ties[np.argmin([self.basis[i] for i in ties])])
        else:
            # largest pivot magnitude among ties keeps the tableau stable
            row = int(ties[np.argmax(column[ties])])
        if best <= _DEGEN_TOL:
            self.degenerate_pivots += 1
            if self.degenerate_pivots > self.bland_after:
                self.bland = True
        return row

    def _run(self, allowed: np.ndarray, phase_one: bool = False) -> str:
        while True:
            if self.pivots >= self.pivot_limit:
                raise _SimplexLimit
            col = self._entering(allowed)
            if col < 0:
                return "optimal"
            row = self._leaving(col)
            if row < 0:
                if phase_one:
                    # a descent ray cannot exist here (the objective is a sum
                    # of artificials, bounded below): spurious pricing noise
                    allowed[col] = False
                    continue
                return "unbounded"
            self._pivot(row, col)

    def _set_costs(self, costs: np.ndarray) -> None:
        """Install a cost vector and price out the current basis."""
        z = np.concatenate([costs, [0.0]])
        for i, col in enumerate(self.basis):
            if z[col] != 0.0:
                z -= z[col] * self.T[i]
        self.T[-1] = z

    # -- the two phases -----------------------------------------------------

    def solve(self) -> str:
        art = np.zeros(self.n + self.m)
        art[self.n:] = 1.0
        self._set_costs(art)
        allowed = np.ones(self.n + self.m, dtype=bool)
        self._run(allowed, phase_one=True)
        if -self.T[-1, -1] > self.feas_tol * max(1.0, float(np.abs(self.T[:-1, -1]).sum())):
            return "infeasible"
        self._drive_out_artificials()
        full_costs = np.zeros(self.n + self.m)
        full_costs[:self.n] = self.c
        self._set_costs(full_costs)
        allowed = np.ones(self.n + self.m, dtype=bool)
        allowed[self.n:] = False
        return self._run(allowed)

    def _drive_out_artificials(self) -> None:
        for row in range(self.m):
            if self.basis[row] < self.n:
                continue
            body = self.T[row, :self.n]
            pick = int(np.argmax(np.abs(body)))
            if abs(body[pick]) > 1e-9:
                self._pivot(row, pick)
            # else: redundant row, artificial stays basic at level zero

    # -- extraction ---------------------------------------------------------

    def solution(self) -> np.ndarray:
        """Basic solution with the basic block re-solved from original data."""
        x = np.zeros(self.n + self.m)
        basic = self._column_ext(self.basis)
        try:
            x_b = np.linalg.solve(basic, self.b0)
        except np.linalg.LinAlgError:
            x_b = np.array([self.T[i, -1] for i in range(self.m)])
        for i, col in enumerate(self.basis):
            x[col] = x_b[i]
        return x[:self.n]

    def objective(self) -> float:
        return float(-self.T[-1, -1])

    def multipliers(self) -> np.ndarray:
        """Simplex multipliers of the original rows, re-solved from the basis.

        Solves basic_columns^T y = costs_of_basis freshly; phase-2 costs give
        artificial columns zero cost.
        """
        basic = self._column_ext(self.basis)
        costs = np.array([self.c[col] if col < self.n else 0.0
                          for col in self.basis])
        try:
            return np.linalg.solve(basic.T, costs)
        except np.linalg.LinAlgError:
            return -self.signs * self.T[-1, self.n:self.n + self.m]


def _solve_standard(A, b, c, feas_tol, pivot_limit, bland_after):
    """min c.x s.t. A x = b, x >= 0. Returns (status, tableau)."""
    tab = _Tableau(A, b, c, feas_tol, pivot_limit, bland_after)
    try:
        status = tab.solve()
    except _SimplexLimit:
        return "iteration_limit", tab
    return status, tab


def _inequality_form(p: LpProblem):
    """Fold the box bounds into rows, leaving all variables free."""
    rows = [p.A]
    rhs = [p.h]
    V = p.n_vars
    for j in range(V):
        if np.isfinite(p.upper[j]):
            e = np.zeros(V)
            e[j] = 1.0
            rows.append(e[None, :])
            rhs.append(np.array([p.upper[j]]))
        if np.isfinite(p.lower[j]):
            e = np.zeros(V)
            e[j] = -1.0
            rows.append(e[None, :])
            rhs.append(np.array([-p.lower[j]]))
    return np.vstack(rows), np.concatenate(rhs)


def _certificate_ok(p: LpProblem, x: np.ndarray, feas_tol: float) -> bool:
    if not np.all(np.isfinite(x)):
        return False
    if p.n_rows and np.max(p.A @ x - p.h) > feas_tol:
        return False
    if np.any(x < p.lower - feas_tol) or np.any(x > p.upper + feas_tol):
        return False
    return True


def solve_lp(p: LpProblem, feas_tol: float = DEFAULT_FEAS_TOL,
             pivot_limit: int = DEFAULT_PIVOT_LIMIT,
             _route: str | None = None) -> LpSolution:
    """Solve the LP; deterministic for identical inputs.

    ``_route`` forces "primal" or "dual" internally (testing hook); by default
    tall problems (rows >> variables) go through the dual.
    """
    if feas_tol <= 0 or pivot_limit < 1:
        raise DataError("feas_tol must be positive and pivot_limit >= 1")
    Abar, hbar = _inequality_form(p)
    R, V = Abar.shape
    # degenerate-pivot budget before Bland's rule takes over
    bland_after = 5 * (p.n_rows + p.n_vars)

    if R == 0:
        # no constraints at all: bounded only for a zero objective
        if np.any(p.c != 0.0):
            return LpSolution(LpStatus.UNBOUNDED)
        return LpSolution(LpStatus.OPTIMAL, np.zeros(V), 0.0)

    if _route is None:
        _route = "dual" if (R >= 2 * V and R >= _DUAL_ROUTE_MIN_ROWS) else "primal"

    if _route == "primal":
        return _solve_primal(p, Abar, hbar, feas_tol, pivot_limit, bland_after)
    return _solve_dual(p, Abar, hbar, feas_tol, pivot_limit, bland_after)


def _solve_primal(p, Abar, hbar, feas_tol, pivot_limit, bland_after) -> LpSolution:
    R, V = Abar.shape
    A_std = np.hstack([Abar, -Abar, np.eye(R)])
    c_std = np.concatenate([p.c, -p.c, np.zeros(R)])
    status, tab = _solve_standard(A_std, hbar, c_std, feas_tol, pivot_limit, bland_after)
    if status == "iteration_limit":
        return LpSolution(LpStatus.ITERATION_LIMIT, pivots=tab.pivots)
    if status == "infeasible":
        return LpSolution(LpStatus.INFEASIBLE, pivots=tab.pivots)
    if status == "unbounded":
        return LpSolution(LpStatus.UNBOUNDED, pivots=tab.pivots)
    xs = tab.solution()
    x = xs[:V] - xs[V:2 * V]
    # optimality: fresh reduced costs of every standard-form column
    y = tab.multipliers()
    reduced = c_std - A_std.T @ y
    opt_tol = 1e-7 * (1.0 + float(np.max(np.abs(p.c))))
    if not _certificate_ok(p, x, feas_tol) or float(np.min(reduced)) < -opt_tol:
        return LpSolution(LpStatus.ITERATION_LIMIT, pivots=tab.pivots,
                          message="solution failed the optimality certificate")
    return LpSolution(LpStatus.OPTIMAL, x, float(p.c @ x), pivots=tab.pivots)


def _solve_dual(p, Abar, hbar, feas_tol, pivot_limit, bland_after) -> LpSolution:
    """Solve min hbar.mu s.t. Abar^T mu = -c, mu >= 0; primal = multipliers."""
    R, V = Abar.shape
    status, tab = _solve_standard(Abar.T, -np.asarray(p.c), hbar, feas_tol,
                                  pivot_limit, bland_after)
    if status == "iteration_limit":
        return LpSolution(LpStatus.ITERATION_LIMIT, pivots=tab.pivots)
    if status == "unbounded":
        # dual unbounded: the primal admits no feasible point
        return LpSolution(LpStatus.INFEASIBLE, pivots=tab.pivots)
    if status == "infeasible":
        return _farkas_disambiguate(Abar, hbar, feas_tol, pivot_limit,
                                    bland_after, tab.pivots)
    x = tab.multipliers()
    mu = tab.solution()
    # a feasible primal-dual pair with matching objectives certifies optimality
    scale = 1.0 + float(np.max(np.abs(p.c)))
    dual_feasible = (float(np.min(mu)) >= -feas_tol
                     and float(np.max(np.abs(Abar.T @ mu + p.c))) <= 1e-7 * scale)
    gap = abs(float(p.c @ x) + float(hbar @ mu))
    if (not _certificate_ok(p, x, feas_tol) or not dual_feasible
            or gap > 1e-7 * (1.0 + abs(float(p.c @ x)))):
        return LpSolution(LpStatus.ITERATION_LIMIT, pivots=tab.pivots,
                          message="dual-recovered point failed the certificate")
    return LpSolution(LpStatus.OPTIMAL, x, float(p.c @ x), pivots=tab.pivots)


def _farkas_disambiguate(Abar, hbar, feas_tol, pivot_limit, bland_after,
                         pivots0) -> LpSolution:
    """Dual infeasible: decide between primal Unbounded and Infeasible.

    The primal has no feasible point iff some y >= 0 with Abar^T y = 0 has
    hbar . y < 0; search over the normalised slice sum(y) = 1.
    """
    R, V = Abar.shape
    A_f = np.vstack([Abar.T, np.ones((1, R))])
    b_f = np.concatenate([np.zeros(V), [1.0]])
    status, tab = _solve_standard(A_f, b_f, hbar, feas_tol, pivot_limit, bland_after)
    total = pivots0 + tab.pivots
    if status == "iteration_limit":
        return LpSolution(LpStatus.ITERATION_LIMIT, pivots=total)
    if status == "optimal" and tab.objective() < -feas_tol:
        return LpSolution(LpStatus.INFEASIBLE, pivots=total)
    return LpSolution(LpStatus.UNBOUNDED, pivots=total)
