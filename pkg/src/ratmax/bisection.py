"""Bisection trainer for the quasiconvex uniform-loss problem.

The optimal loss value is bracketed in [l, u] and halved: each probe value z
is accepted or rejected by a linear feasibility problem whose optimal value
is <= 0 exactly when some model achieves loss <= z with denominators >= delta.
Normalisation: the activation denominator has b0 = 1.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .core import (AffineModel, FitReport, RationalActivation, RatioProgram,
                   SampleSet, SolverConfig, network_program)
from .errors import ConfigError, SolverError
from .lp import LpProblem, LpStatus, solve_lp

# An LP optimum below this counts as "<= 0"; sits between the LP feasibility
# tolerance (1e-9) and the trainers' eps.
FEASIBLE_TOL = 1e-10


def init_bounds(act: RationalActivation, data: SampleSet) -> tuple[float, float]:
    """Initial bracket: l = 0, u = loss of the zero model (output a0)."""
    _require_unit_b0(act)
    u = float(np.max(np.abs(data.targets - act.a0)))
    return 0.0, u


def feasibility_lp(act: RationalActivation, data: SampleSet, z: float,
                   delta: float) -> LpProblem:
    """The LP deciding whether some (W, b) attains loss <= z.

    Variables (W in R^n, b, u), objective min u.  Per sample, with
    P = a0 + a1*(W.x+b) and Q = 1 + b1*(W.x+b):

        y*Q - P - z*Q - u <= 0
        P - y*Q - z*Q - u <= 0
        -Q <= -delta
    """
    _require_unit_b0(act)
    return program_feasibility_lp(network_program(act, data), z, delta)


def program_feasibility_lp(prog: RatioProgram, z: float, delta: float) -> LpProblem:
    """Generalised form of the feasibility LP over any ratio program."""
    N, d = prog.n_samples, prog.n_vars
    # row blocks: y*D - N_um <= z*D + u,  N_um - y*D <= z*D + u,  D >= delta
    lin_low = (prog.targets - z)[:, None] * prog.den_lin - prog.num_lin
    rhs_low = prog.num_const - (prog.targets - z) * prog.den_const
    lin_high = prog.num_lin - (prog.targets + z)[:, None] * prog.den_lin
    rhs_high = (prog.targets + z) * prog.den_const - prog.num_const
    A = np.zeros((3 * N, d + 1))
    A[:N, :d] = lin_low
    A[N:2 * N, :d] = lin_high
    A[2 * N:, :d] = -prog.den_lin
    A[:2 * N, d] = -1.0  # the slack variable u appears in the residual rows only
    h = np.concatenate([rhs_low, rhs_high, prog.den_const - delta])
    c = np.zeros(d + 1)
    c[d] = 1.0
    lower = np.concatenate([prog.lower, [-np.inf]])
    upper = np.concatenate([prog.upper, [np.inf]])
    return LpProblem(c=c, A=A, h=h, lower=lower, upper=upper)


def is_feasible(act: RationalActivation, data: SampleSet, z: float,
                delta: float) -> tuple[bool, AffineModel | None]:
    """Feasibility of loss <= z, with the witness model when it exists."""
    _require_unit_b0(act)
    feasible, v = _probe(network_program(act, data), z, delta)
    if not feasible:
        return False, None
    return True, AffineModel(v[:-1], v[-1])


def _probe(prog: RatioProgram, z: float, delta: float) -> tuple[bool, np.ndarray | None]:
    lp = program_feasibility_lp(prog, z, delta)
    sol = solve_lp(lp)
    if sol.status is LpStatus.UNBOUNDED:
        # u can be driven to -inf: trivially feasible; clamp u to recover a witness
        lower = lp.lower.copy()
        lower[-1] = -1.0
        sol = solve_lp(LpProblem(c=lp.c, A=lp.A, h=lp.h, lower=lower, upper=lp.upper))
    if sol.status is LpStatus.ITERATION_LIMIT:
        raise SolverError("feasibility LP hit its pivot limit")
    if sol.status is LpStatus.INFEASIBLE:
        # no model satisfies the denominator margin at all
        return False, None
    if sol.objective_value <= FEASIBLE_TOL:
        return True, sol.values[:-1]
    return False, None


def train_bisection(act: RationalActivation, data: SampleSet,
                    cfg: SolverConfig) -> FitReport:
    """Train (W, b) by bisection; see minimize_bisection for the mechanics."""
    _require_unit_b0(act)
    report = minimize_bisection(network_program(act, data), cfg)
    v = report.model
    model = AffineModel(v[: data.n_features], v[data.n_features])
    return FitReport(model=model, final_deviation=report.final_deviation,
                     iterations=report.iterations, trace=report.trace,
                     wall_time_seconds=report.wall_time_seconds,
                     status=report.status, lp_solves=report.lp_solves,
                     bracket_widths=report.bracket_widths,
                     final_bracket=report.final_bracket)


def minimize_bisection(prog: RatioProgram, cfg: SolverConfig) -> FitReport:
    """Bisection on a ratio program; the report's model is the raw vector.

    The bracket is held as (l, width) so that the width halves exactly in
    floating point.  The returned witness is the one from the last feasible
    probe, never a re-solve at the final upper bound.
    """
    if not isinstance(cfg, SolverConfig):
        raise ConfigError("cfg must be a SolverConfig")
    t0 = time.perf_counter()
    u0 = prog.loss(prog.start)
    l, width = 0.0, u0
    witness = prog.start
    witness_from_lp = False
    widths: list[float] = []
    u_trace: list[float] = []
    lp_solves = 0

    while width > cfg.eps:
        z = l + width / 2.0
        feasible, v = _probe(prog, z, cfg.delta)
        lp_solves += 1
        width /= 2.0
        if feasible:
            witness, witness_from_lp = v, True
        else:
            l += width
        widths.append(width)
        u_trace.append(l + width)

    if not witness_from_lp and u0 > cfg.eps:
        # every probe failed and the start model cannot certify the margin
        if np.min(prog.denominators(prog.start)) < cfg.delta:
            raise SolverError("bisection never found a feasible witness; "
                              "is delta larger than the start denominator?")
    return FitReport(model=np.asarray(witness),
                     final_deviation=prog.loss(np.asarray(witness)),
                     iterations=lp_solves,
                     trace=tuple(u_trace),
                     wall_time_seconds=time.perf_counter() - t0,
                     status="converged",
                     lp_solves=lp_solves,
                     bracket_widths=tuple(widths),
                     final_bracket=(l, l + width))


def expected_iterations(u0: float, eps: float) -> int:
    """Number of feasibility LPs bisection performs from a width-u0 bracket."""
    if u0 <= eps:
        return 0
    return math.ceil(math.log2(u0 / eps))


def _require_unit_b0(act: RationalActivation) -> None:
    if act.b0 != 1.0:
        raise ConfigError(f"bisection requires the b0 = 1 normalisation, got b0 = {act.b0}")
