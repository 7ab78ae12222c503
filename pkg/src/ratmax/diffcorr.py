"""Original differential correction trainer.

Each step solves one LP: minimise the worst weighted linearised deviation

    max_i ( |y_i*Q_i(v) - P_i(v)| - dev_prev*Q_i(v) ) / q_i

over the box-normalised decision variables, where q_i is the (known,
positive) denominator of the previous iterate.  The achieved maximal
deviation is non-increasing and the loop stops when it stalls within eps.
"""

from __future__ import annotations

import time

import numpy as np

from .core import (AffineModel, FitReport, RationalActivation, RatioProgram,
                   SampleSet, SolverConfig, network_program)
from .errors import ConfigError, SolverError, StateError
from .lp import LpProblem, LpStatus, solve_lp

# No-descent threshold: an auxiliary optimum above this means the previous
# model is kept and iteration stops, which guards against LP-noise oscillation.
STALL_TOL = -1e-12


def dc_step(act: RationalActivation, data: SampleSet, prev_model: AffineModel,
            prev_dev: float) -> tuple[AffineModel, float]:
    """One differential correction step from a feasible previous model.

    Returns the new model (respecting -1 <= w_j, b <= 1) and the optimal
    auxiliary value, which is <= 0 whenever prev_dev is the previous loss.
    """
    prog = network_program(act, data, boxed=True)
    v = np.concatenate([prev_model.weights, [prev_model.bias]])
    v_new, aux = step_program(prog, v, prev_dev)
    return AffineModel(v_new[:-1], v_new[-1]), aux


def step_program(prog: RatioProgram, v_prev: np.ndarray,
                 prev_dev: float) -> tuple[np.ndarray, float]:
    """Generalised step over any ratio program; returns (v_new, aux_value)."""
    q = prog.denominators(v_prev)
    if np.min(q) <= 0.0:
        i = int(np.argmin(q))
        raise StateError(f"previous iterate has nonpositive denominator {q[i]} "
                         f"at sample {i}")
    N, d = prog.n_samples, prog.n_vars
    # rows: +-(y*Q - P) - dev_prev*Q - zbar*q <= 0, with Q, P affine in v
    lin_low = (prog.targets - prev_dev)[:, None] * prog.den_lin - prog.num_lin
    rhs_low = prog.num_const - (prog.targets - prev_dev) * prog.den_const
    lin_high = prog.num_lin - (prog.targets + prev_dev)[:, None] * prog.den_lin
    rhs_high = (prog.targets + prev_dev) * prog.den_const - prog.num_const
    A = np.zeros((2 * N, d + 1))
    A[:N, :d] = lin_low
    A[N:, :d] = lin_high
    A[:N, d] = -q
    A[N:, d] = -q
    h = np.concatenate([rhs_low, rhs_high])
    c = np.zeros(d + 1)
    c[d] = 1.0
    lower = np.concatenate([prog.lower, [-np.inf]])
    upper = np.concatenate([prog.upper, [np.inf]])
    sol = solve_lp(LpProblem(c=c, A=A, h=h, lower=lower, upper=upper))
    if sol.status is not LpStatus.OPTIMAL:
        raise SolverError(f"differential correction LP ended with status "
                          f"{sol.status.value}")
    return sol.values[:-1], float(sol.objective_value)


def train_diffcorr(act: RationalActivation, data: SampleSet,
                   cfg: SolverConfig) -> FitReport:
    """Train (W, b) by differential correction from W = 0, b = 0."""
    if act.b0 <= 0.0:
        raise ConfigError(f"differential correction needs b0 > 0 so the zero "
                          f"model is feasible, got b0 = {act.b0}")
    report = minimize_diffcorr(network_program(act, data, boxed=True), cfg)
    v = report.model
    model = AffineModel(v[: data.n_features], v[data.n_features])
    return FitReport(model=model, final_deviation=report.final_deviation,
                     iterations=report.iterations, trace=report.trace,
                     wall_time_seconds=report.wall_time_seconds,
                     status=report.status, lp_solves=report.lp_solves)


def minimize_diffcorr(prog: RatioProgram, cfg: SolverConfig) -> FitReport:
    """Differential correction on a ratio program; model is the raw vector."""
    if not isinstance(cfg, SolverConfig):
        raise ConfigError("cfg must be a SolverConfig")
    t0 = time.perf_counter()
    v = np.asarray(prog.start, dtype=float)
    dev = prog.loss(v)
    trace = [dev]
    status = "max_iters"
    lp_solves = 0

    for _ in range(cfg.max_iters):
        v_new, aux = step_program(prog, v, dev)
        lp_solves += 1
        if aux >= STALL_TOL:
            status = "stagnated"
            break
        den = prog.denominators(v_new)
        if np.min(den) <= 0.0:
            raise StateError("differential correction step produced a "
                             "nonpositive denominator")
        dev_new = prog.loss(v_new)
        v = v_new
        trace.append(dev_new)
        if abs(dev - dev_new) <= cfg.eps:
            dev = dev_new
            status = "converged"
            break
        dev = dev_new

    return FitReport(model=v, final_deviation=dev, iterations=len(trace) - 1,
                     trace=tuple(trace),
                     wall_time_seconds=time.perf_counter() - t0,
                     status=status, lp_solves=lp_solves)
