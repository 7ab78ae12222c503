"""Fit the degree-(1,1) rational activation to ReLU-like targets on a grid.

The fit instantiates the generalised ratio-of-affine-forms problem with basis
(1, x) in both numerator and denominator, so the same two trainers apply:
bisection fixes q0 = 1, differential correction boxes the denominator
coefficients into [-1, 1] and the result is rescaled to b0 = 1 afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bisection, diffcorr
from .core import FitReport, RationalActivation, RatioProgram, SampleSet, SolverConfig
from .errors import ConfigError, DomainError, SolverError

METHODS = ("bisection", "diffcorr")

# Local extrema with magnitude at or below this floor are regarded as noise.
EXTREMUM_FLOOR = 1e-9
# An extremum "matches" the maximal deviation when within this relative band.
RIPPLE_RTOL = 0.05


@dataclass(frozen=True)
class TargetFunction:
    """A univariate target to approximate; ``fn`` must accept numpy arrays."""

    kind: str
    fn: Callable[[np.ndarray], np.ndarray]
    slope: float | None = None

    def values(self, x) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)


def relu_target() -> TargetFunction:
    return TargetFunction("relu", lambda t: np.maximum(t, 0.0))


def lrelu_target(slope: float) -> TargetFunction:
    """Leaky ReLU: t for t >= 0, slope*t below; slope must lie in (0, 1)."""
    if not (0.0 < slope < 1.0):
        raise ConfigError(f"lrelu slope must lie in (0, 1), got {slope}")
    return TargetFunction("lrelu", lambda t: np.where(t >= 0.0, t, slope * t),
                          slope=float(slope))


def custom_target(fn: Callable[[np.ndarray], np.ndarray],
                  kind: str = "custom") -> TargetFunction:
    return TargetFunction(kind, fn)


def build_grid_problem(target: TargetFunction, c: float, d: float,
                       points: int) -> SampleSet:
    """Uniform grid on [c, d], endpoints included, with target values."""
    if not (np.isfinite(c) and np.isfinite(d) and c < d):
        raise ConfigError(f"grid interval must satisfy c < d, got [{c}, {d}]")
    if points < 4:
        raise ConfigError(f"a (1,1) fit needs at least 4 points, got {points}")
    xs = np.linspace(c, d, points)
    return SampleSet(xs.reshape(-1, 1), target.values(xs))


def coefficient_program(xs: np.ndarray, ys: np.ndarray, method: str) -> RatioProgram:
    """The coefficient-fitting ratio program (p0 + p1*x) / (q0 + q1*x).

    bisection: variables (p0, p1, q1) with q0 fixed at 1, all free.
    diffcorr:  variables (p0, p1, q0, q1); q0, q1 boxed in [-1, 1];
               started from the constant-zero ratio 0/1.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    N = xs.shape[0]
    ones, zeros = np.ones(N), np.zeros(N)
    if method == "bisection":
        return RatioProgram(
            targets=ys,
            num_const=zeros, num_lin=np.column_stack([ones, xs, zeros]),
            den_const=ones, den_lin=np.column_stack([zeros, zeros, xs]),
            lower=np.full(3, -np.inf), upper=np.full(3, np.inf),
            start=np.zeros(3),
        )
    if method == "diffcorr":
        inf = np.inf
        return RatioProgram(
            targets=ys,
            num_const=zeros, num_lin=np.column_stack([ones, xs, zeros, zeros]),
            den_const=zeros, den_lin=np.column_stack([zeros, zeros, ones, xs]),
            lower=np.array([-inf, -inf, -1.0, -1.0]),
            upper=np.array([inf, inf, 1.0, 1.0]),
            start=np.array([0.0, 0.0, 1.0, 0.0]),
        )
    raise ConfigError(f"method must be one of {METHODS}, got {method!r}")


def fit_activation(target: TargetFunction, cfg: SolverConfig,
                   method: str = "bisection") -> tuple[RationalActivation, FitReport]:
    """Best uniform (1,1) approximation to the target over the config grid.

    The returned activation is always b0-normalised; for differential
    correction all four coefficients are divided by the solved q0.
    """
    c, d = cfg.interval
    data = build_grid_problem(target, c, d, cfg.grid_points)
    prog = coefficient_program(data.inputs[:, 0], data.targets, method)
    if method == "bisection":
        report = bisection.minimize_bisection(prog, cfg)
        p0, p1, q1 = report.model
        coeffs = np.array([p0, p1, 1.0, q1])
    else:
        report = diffcorr.minimize_diffcorr(prog, cfg)
        p0, p1, q0, q1 = report.model
        if q0 <= 0.0:
            raise SolverError(f"differential correction ended with q0 = {q0} <= 0")
        coeffs = np.array([p0, p1, q0, q1]) / q0
    act = RationalActivation(*coeffs)
    return act, FitReport(model=coeffs, final_deviation=report.final_deviation,
                          iterations=report.iterations, trace=report.trace,
                          wall_time_seconds=report.wall_time_seconds,
                          status=report.status, lp_solves=report.lp_solves,
                          bracket_widths=report.bracket_widths,
                          final_bracket=report.final_bracket)


def activation_curve(act: RationalActivation, xs: np.ndarray) -> np.ndarray:
    """Vectorised activation values; requires a positive denominator."""
    xs = np.asarray(xs, dtype=float)
    q = act.b0 + act.b1 * xs
    if np.min(q) <= 0.0:
        raise DomainError("activation denominator is not positive on the grid")
    return (act.a0 + act.a1 * xs) / q


@dataclass(frozen=True)
class EquioscillationReport:
    """Signed error extrema of f - R and the alternation diagnostic.

    ``optimal`` is set when at least four successive extrema alternate in
    sign with magnitudes within 5% of the maximal deviation, the classical
    certificate that a (1,1) fit cannot be improved.
    """

    extrema: tuple[tuple[float, float], ...]
    max_deviation: float
    alternations: int
    optimal: bool


def equioscillation_report(act: RationalActivation, target: TargetFunction,
                           c: float, d: float,
                           probe_points: int = 20001) -> EquioscillationReport:
    """Scan the error curve on a dense probe grid for alternating extrema."""
    xs = np.linspace(c, d, probe_points)
    err = target.values(xs) - activation_curve(act, xs)
    idx = _local_extrema(err)
    extrema = tuple((float(xs[i]), float(err[i])) for i in idx
                    if abs(err[i]) > EXTREMUM_FLOOR)
    dev = float(np.max(np.abs(err)))
    alternations = _alternation_count(extrema, dev)
    return EquioscillationReport(extrema=extrema, max_deviation=dev,
                                 alternations=alternations,
                                 optimal=alternations >= 4)


def _local_extrema(err: np.ndarray) -> list[int]:
    """Indices of local extrema by three-point comparison with plateau merging.

    Both endpoints count as one-sided extrema whenever the curve moves at all;
    interior extrema sit where the first difference changes sign, and a flat
    top or bottom is merged into its middle index.
    """
    signs = np.sign(np.diff(err))
    moves = np.where(signs != 0)[0]
    if moves.size == 0:
        return []
    out = [0]
    for k in range(moves.size - 1):
        if signs[moves[k]] != signs[moves[k + 1]]:
            lo, hi = moves[k] + 1, moves[k + 1]  # flat top/bottom span
            out.append((lo + hi) // 2)
    out.append(len(err) - 1)
    return out


def _alternation_count(extrema, dev: float) -> int:
    """Longest run of sign-alternating extrema whose magnitude tracks dev."""
    if dev <= EXTREMUM_FLOOR:
        return 0
    qualifying = [e for _, e in extrema if abs(e) >= (1.0 - RIPPLE_RTOL) * dev]
    best = run = 0
    prev_sign = 0.0
    for e in qualifying:
        sign = 1.0 if e > 0 else -1.0
        run = run + 1 if sign == -prev_sign or prev_sign == 0.0 else 1
        prev_sign = sign
        best = max(best, run)
    return best
