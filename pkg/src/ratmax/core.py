"""Domain types and evaluation of rational models under the uniform (max) loss.

Everything here is an immutable value object or a pure function, so all of it
is safe to share across threads without synchronisation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError, DomainError
from .validation import as_float_matrix, as_float_vector, check_same_length, readonly

# Below this magnitude a denominator is treated as an exact pole.  Solvers never
# rely on this guard; they enforce a positive margin delta explicitly.
POLE_EPS = 1e-300

# Additive slack for the quasiconvexity property check; the mathematical
# statement is exact, floating point is not.
QUASICONVEXITY_SLACK = 1e-12


@dataclass(frozen=True)
class SampleSet:
    """A discrete approximation domain: N input vectors with scalar targets.

    ``labels`` optionally carries per-sample class identifiers for
    classification sets; it plays no role in approximation itself.
    """

    inputs: np.ndarray
    targets: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        X = as_float_matrix(self.inputs, "inputs")
        y = as_float_vector(self.targets, "targets")
        if X.shape[0] < 1:
            raise DataError("a sample set needs at least one sample")
        if X.shape[1] < 1:
            raise DataError("a sample set needs at least one feature")
        check_same_length(X.shape[0], y.shape[0], "inputs vs targets")
        object.__setattr__(self, "inputs", readonly(X))
        object.__setattr__(self, "targets", readonly(y))
        if self.labels is not None:
            labels = tuple(self.labels)
            check_same_length(X.shape[0], len(labels), "inputs vs labels")
            object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_features(self) -> int:
        return self.inputs.shape[1]


@dataclass(frozen=True)
class RationalActivation:
    """Degree-(1,1) rational function t -> (a0 + a1*t) / (b0 + b1*t)."""

    a0: float
    a1: float
    b0: float
    b1: float

    def __post_init__(self):
        coeffs = (self.a0, self.a1, self.b0, self.b1)
        if not all(np.isfinite(c) for c in coeffs):
            raise DataError("activation coefficients must be finite")
        if all(c == 0.0 for c in coeffs):
            raise DataError("activation coefficients cannot all be zero")

    def __call__(self, t: float) -> float:
        return eval_activation(self, t)

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.b0, self.b1])


@dataclass(frozen=True)
class AffineModel:
    """The trainable part of the network: x -> weights . x + bias."""

    weights: np.ndarray
    bias: float

    def __post_init__(self):
        w = as_float_vector(self.weights, "weights")
        if not np.isfinite(self.bias):
            raise DataError("bias must be finite")
        object.__setattr__(self, "weights", readonly(w))
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def preimage(self, x) -> float:
        x = as_float_vector(x, "x")
        check_same_length(x.shape[0], self.n_features, "x vs weights")
        return float(self.weights @ x + self.bias)

    @staticmethod
    def zeros(n_features: int) -> "AffineModel":
        return AffineModel(np.zeros(n_features), 0.0)


def combine_models(m1: AffineModel, m2: AffineModel, lam: float) -> AffineModel:
    """Convex combination lam*m1 + (1-lam)*m2."""
    return AffineModel(lam * m1.weights + (1.0 - lam) * m2.weights,
                       lam * m1.bias + (1.0 - lam) * m2.bias)


@dataclass(frozen=True)
class SolverConfig:
    """Shared trainer configuration.

    eps          absolute precision for the maximal deviation
    delta        positivity margin enforced on rational denominators
    max_iters    hard iteration cap (differential correction)
    interval     [c, d] endpoints for activation-fitting grids
    grid_points  grid size for activation fitting; a (1,1) fit needs >= 4
    """

    eps: float = 1e-5
    delta: float = 1e-6
    max_iters: int = 500
    interval: tuple[float, float] = (-1.0, 1.0)
    grid_points: int = 2001

    def __post_init__(self):
        if not (np.isfinite(self.eps) and self.eps > 0):
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ConfigError(f"delta must be positive, got {self.delta}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        c, d = self.interval
        if not (np.isfinite(c) and np.isfinite(d) and c < d):
            raise ConfigError(f"interval endpoints must satisfy c < d, got {self.interval}")
        if self.grid_points < 4:
            raise ConfigError(f"a (1,1) fit needs at least 4 grid points, got {self.grid_points}")


@dataclass(frozen=True)
class FitReport:
    """Outcome of one training run.

    ``trace`` holds the per-iteration maximal deviation (the certified upper
    bound for bisection, the achieved deviation for differential correction).
    ``bracket_widths`` is bisection-only and halves exactly in each entry.
    """

    model: object
    final_deviation: float
    iterations: int
    trace: tuple[float, ...]
    wall_time_seconds: float
    status: str = "converged"
    lp_solves: int = 0
    bracket_widths: tuple[float, ...] = ()
    final_bracket: tuple[float, float] | None = None


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def eval_activation(act: RationalActivation, t: float) -> float:
    """Evaluate the rational activation at a scalar point.

    Raises DomainError when the denominator is at machine-scale zero, which
    signals evaluation at a pole.
    """
    q = act.b0 + act.b1 * t
    if abs(q) < POLE_EPS:
        raise DomainError(f"activation pole at t={t}: denominator {q}")
    return (act.a0 + act.a1 * t) / q


def eval_network(act: RationalActivation, model: AffineModel, x) -> float:
    """Evaluate the composite activation(weights . x + bias).

    Raises DomainError if the denominator is not strictly positive: the model
    is outside the feasible region of the training problem.
    """
    t = model.preimage(x)
    q = act.b0 + act.b1 * t
    if q <= 0.0:
        raise DomainError(f"nonpositive denominator {q} at preimage {t}")
    return (act.a0 + act.a1 * t) / q


def network_outputs(act: RationalActivation, model: AffineModel,
                    X: np.ndarray) -> np.ndarray:
    """Vectorised eval_network over the rows of X (same positivity contract)."""
    t = X @ model.weights + model.bias
    q = act.b0 + act.b1 * t
    if np.min(q) <= 0.0:
        i = int(np.argmin(q))
        raise DomainError(f"nonpositive denominator {q[i]} at sample {i}")
    return (act.a0 + act.a1 * t) / q


def uniform_loss(act: RationalActivation, model: AffineModel,
                 data: SampleSet) -> float:
    """Worst absolute residual max_i |y_i - activation(W.x_i + b)|."""
    check_same_length(model.n_features, data.n_features, "model vs data features")
    out = network_outputs(act, model, data.inputs)
    return float(np.max(np.abs(data.targets - out)))


def quasiconvexity_probe(act: RationalActivation, data: SampleSet,
                         m1: AffineModel, m2: AffineModel,
                         lambdas: Sequence[float]) -> bool:
    """Check the segment condition loss(lam*m1+(1-lam)*m2) <= max of endpoints.

    Infeasible combinations (nonpositive denominator somewhere) are skipped,
    not failed.  This is a property-test helper; no solver depends on it.
    """
    bound = max(uniform_loss(act, m1, data), uniform_loss(act, m2, data))
    ok = True
    for lam in lambdas:
        if not 0.0 <= lam <= 1.0:
            raise ConfigError(f"lambda must lie in [0, 1], got {lam}")
        try:
            value = uniform_loss(act, combine_models(m1, m2, lam), data)
        except DomainError:
            continue
        if value > bound + QUASICONVEXITY_SLACK:
            ok = False
    return ok


# ---------------------------------------------------------------------------
# Shared solver plumbing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatioProgram:
    """Uniform approximation by a ratio of affine forms on a sample set.

    For decision vector v the i-th approximant value is

        (num_const[i] + num_lin[i] . v) / (den_const[i] + den_lin[i] . v)

    and the objective is max_i |targets[i] - value_i| subject to positive
    denominators.  Both trainers consume this carrier: the network problem
    sets v = (weights, bias); activation fitting sets v to the rational
    coefficients themselves.
    """

    targets: np.ndarray     # (N,)
    num_const: np.ndarray   # (N,)
    num_lin: np.ndarray     # (N, d)
    den_const: np.ndarray   # (N,)
    den_lin: np.ndarray     # (N, d)
    lower: np.ndarray       # (d,), -inf for free
    upper: np.ndarray       # (d,), +inf for free
    start: np.ndarray       # (d,), must have positive denominators

    def __post_init__(self):
        for name in ("targets", "num_const", "num_lin", "den_const",
                     "den_lin", "lower", "upper", "start"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    @property
    def n_samples(self) -> int:
        return self.targets.shape[0]

    @property
    def n_vars(self) -> int:
        return self.num_lin.shape[1]

    def numerators(self, v: np.ndarray) -> np.ndarray:
        return self.num_const + self.num_lin @ v

    def denominators(self, v: np.ndarray) -> np.ndarray:
        return self.den_const + self.den_lin @ v

    def loss(self, v: np.ndarray) -> float:
        den = self.denominators(v)
        if np.min(den) <= 0.0:
            i = int(np.argmin(den))
            raise DomainError(f"nonpositive denominator {den[i]} at sample {i}")
        return float(np.max(np.abs(self.targets - self.numerators(v) / den)))


def network_program(act: RationalActivation, data: SampleSet,
                    boxed: bool = False) -> RatioProgram:
    """The training problem over v = (weights, bias) with fixed activation.

    ``boxed`` applies the normalisation -1 <= w_j, b <= 1 used by
    differential correction; bisection leaves the variables free.
    """
    n = data.n_features
    T = np.hstack([data.inputs, np.ones((data.n_samples, 1))])  # t_i = T_i . v
    d = n + 1
    bound = np.ones(d) if boxed else np.full(d, np.inf)
    return RatioProgram(
        targets=data.targets,
        num_const=np.full(data.n_samples, act.a0),
        num_lin=act.a1 * T,
        den_const=np.full(data.n_samples, act.b0),
        den_lin=act.b1 * T,
        lower=-bound,
        upper=bound,
        start=np.zeros(d),
    )
