"""Binary classification on top of the uniform-loss trainers.

Labels are encoded as targets 0.0 (class A, the smaller label) and 1.0
(class B); prediction thresholds the network output at 0.5 with ties going
to class A.  Test points are scored on the raw ratio value even where the
denominator is nonpositive, matching how the uniform loss is reported on
test sets; exact poles are flagged and assigned class A.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils.multiclass import type_of_target
from sklearn.utils.validation import validate_data

from . import activation as _activation
from .bisection import train_bisection
from .core import (POLE_EPS, AffineModel, FitReport, RationalActivation,
                   SampleSet, SolverConfig)
from .diffcorr import train_diffcorr
from .errors import ConfigError, DataError
from .validation import as_float_matrix, as_float_vector

THRESHOLD = 0.5

TRAINERS = {"bisection": train_bisection, "diffcorr": train_diffcorr}


@dataclass(frozen=True)
class LabeledDataset:
    """A sample set whose targets are the encoded class labels.

    ``classes`` is the ordered label pair (class A -> 0.0, class B -> 1.0);
    class A is always the smaller label so the encoding is deterministic
    without extra metadata.
    """

    samples: SampleSet
    classes: tuple
    provenance: str = ""

    def __post_init__(self):
        if len(self.classes) != 2 or self.classes[0] == self.classes[1]:
            raise DataError(f"need exactly two distinct classes, got {self.classes}")
        if self.samples.labels is None:
            raise DataError("labeled dataset needs per-sample labels")
        known = set(self.classes)
        for i, lab in enumerate(self.samples.labels):
            if lab not in known:
                raise DataError(f"label {lab!r} at sample {i} is not in "
                                f"the class map {self.classes}")

    @staticmethod
    def from_arrays(X, labels, classes: tuple | None = None,
                    provenance: str = "") -> "LabeledDataset":
        X = as_float_matrix(X, "X")
        labels = tuple(labels)
        if classes is None:
            distinct = sorted(set(labels))
            if len(distinct) != 2:
                plural = "class" if len(distinct) == 1 else "classes"
                raise DataError(f"expected exactly two distinct classes, "
                                f"found {len(distinct)} {plural}")
            classes = tuple(distinct)
        y = encode_targets(labels, classes)
        return LabeledDataset(SampleSet(X, y, labels), classes, provenance)

    def with_classes(self, classes: tuple) -> "LabeledDataset":
        """Re-bind to an explicit class pair (e.g. the one a model trained on)."""
        y = encode_targets(self.samples.labels, tuple(classes))
        samples = SampleSet(self.samples.inputs, y, self.samples.labels)
        return LabeledDataset(samples, tuple(classes), self.provenance)

    def subset(self, indices, provenance: str) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=int)
        samples = SampleSet(self.samples.inputs[idx],
                            self.samples.targets[idx],
                            tuple(self.samples.labels[i] for i in idx))
        return LabeledDataset(samples, self.classes, provenance)

    @property
    def n_samples(self) -> int:
        return self.samples.n_samples

    def class_counts(self) -> tuple[int, int]:
        labels = self.samples.labels
        a = sum(1 for lab in labels if lab == self.classes[0])
        return a, len(labels) - a


def encode_targets(labels, classes: tuple) -> np.ndarray:
    known = set(classes)
    bad = [lab for lab in labels if lab not in known]
    if bad:
        raise DataError(f"labels {sorted(set(map(repr, bad)))} missing from class map")
    return np.array([0.0 if lab == classes[0] else 1.0 for lab in labels])


@dataclass(frozen=True)
class ConfusionMatrix:
    """2x2 counts; rows are the actual class, columns the predicted class."""

    counts: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.counts, dtype=np.int64)
        if arr.shape != (2, 2) or np.any(arr < 0):
            raise DataError(f"confusion matrix must be 2x2 nonnegative, got {arr!r}")
        arr = np.array(arr, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.total) if self.total else 0.0

    def as_lists(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.counts]


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    confusion: ConfusionMatrix
    test_loss: float
    removed_outliers: int
    evaluated: int
    pole_flags: int = 0
    empty_after_filter: bool = False
    test_time_seconds: float = 0.0
    train_time_seconds: float | None = None
    provenance: dict = field(default_factory=dict)

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "accuracy": self.accuracy,
            "confusion": self.confusion.as_lists(),
            "test_loss": self.test_loss,
            "removed_outliers": self.removed_outliers,
            "evaluated": self.evaluated,
            "pole_flags": self.pole_flags,
            "empty_after_filter": self.empty_after_filter,
            "provenance": dict(self.provenance),
        }
        if include_timing:
            out["timing"] = {"test_seconds": self.test_time_seconds}
            if self.train_time_seconds is not None:
                out["timing"]["train_seconds"] = self.train_time_seconds
        return out


def train_classifier(data: LabeledDataset, act: RationalActivation,
                     method: str = "bisection",
                     cfg: SolverConfig | None = None) -> tuple[AffineModel, FitReport]:
    """Train the affine model on the encoded targets with the chosen method."""
    if method not in TRAINERS:
        raise ConfigError(f"method must be one of {sorted(TRAINERS)}, got {method!r}")
    present = set(data.samples.labels)
    if len(present) < 2:
        raise DataError(f"training set contains a single class {present}; "
                        "need both")
    cfg = cfg or SolverConfig()
    report = TRAINERS[method](act, data.samples, cfg)
    return report.model, report


def raw_scores(act: RationalActivation, model: AffineModel,
               X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Raw ratio scores and a pole mask; no positivity requirement here.

    Pole entries carry score 0.0 (the class-A target), consistent with the
    rule that a pole sample is assigned class A.
    """
    t = X @ model.weights + model.bias
    q = act.b0 + act.b1 * t
    poles = np.abs(q) < POLE_EPS
    safe_q = np.where(poles, 1.0, q)
    scores = np.where(poles, 0.0, (act.a0 + act.a1 * t) / safe_q)
    return scores, poles


def predict(act: RationalActivation, model: AffineModel, x,
            classes: tuple = (0.0, 1.0)) -> object:
    """Class of a single input: nearer encoded target, ties to class A.

    The score is the raw ratio value; an exact pole is assigned class A.
    """
    x = as_float_vector(x, "x")
    s, pole = raw_scores(act, model, x.reshape(1, -1))
    if pole[0]:
        return classes[0]
    return classes[0] if s[0] <= THRESHOLD else classes[1]


def predict_labels(act: RationalActivation, model: AffineModel, X,
                   classes: tuple) -> list:
    X = as_float_matrix(X, "X")
    scores, poles = raw_scores(act, model, X)
    side_b = (scores > THRESHOLD) & ~poles
    return [classes[1] if b else classes[0] for b in side_b]


def evaluate(act: RationalActivation, model: AffineModel, test: LabeledDataset,
             outlier_threshold: float | None = None) -> EvalReport:
    """Score a test set; optionally drop points whose residual exceeds the
    threshold before any accuracy, confusion, or loss is computed."""
    t0 = time.perf_counter()
    X = test.samples.inputs
    y = test.samples.targets
    scores, poles = raw_scores(act, model, X)
    residuals = np.abs(y - scores)
    residuals[poles] = np.inf
    if outlier_threshold is not None:
        if outlier_threshold < 0:
            raise ConfigError("outlier threshold must be nonnegative")
        keep = residuals <= outlier_threshold
    else:
        keep = np.ones(y.shape[0], dtype=bool)
    removed = int(np.sum(~keep))

    actual_b = y[keep] > 0.5
    predicted_b = (scores[keep] > THRESHOLD) & ~poles[keep]
    counts = np.zeros((2, 2), dtype=np.int64)
    for a in (False, True):
        for p in (False, True):
            counts[int(a), int(p)] = int(np.sum((actual_b == a) & (predicted_b == p)))
    confusion = ConfusionMatrix(counts)
    kept = int(np.sum(keep))
    loss = float(np.max(residuals[keep])) if kept else 0.0
    return EvalReport(
        accuracy=confusion.accuracy,
        confusion=confusion,
        test_loss=loss,
        removed_outliers=removed,
        evaluated=kept,
        pole_flags=int(np.sum(poles)),
        empty_after_filter=kept == 0,
        test_time_seconds=time.perf_counter() - t0,
        provenance={"dataset": test.provenance,
                    "outlier_threshold": outlier_threshold},
    )


# ---------------------------------------------------------------------------
# Subsampling protocols for the small-data experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RandomK:
    """Keep k points drawn uniformly without replacement."""
    k: int
    seed: int


@dataclass(frozen=True)
class Imbalance:
    """Keep every point of one class plus k random points of the other."""
    keep_class: object
    k_minority: int
    seed: int


def subsample_experiments(data: LabeledDataset,
                          spec: RandomK | Imbalance) -> LabeledDataset:
    """Seeded subset protocols; the seed is recorded in the provenance."""
    if isinstance(spec, RandomK):
        if spec.k < 1 or spec.k > data.n_samples:
            raise DataError(f"cannot draw {spec.k} of {data.n_samples} samples")
        rng = np.random.default_rng(spec.seed)
        idx = np.sort(rng.choice(data.n_samples, size=spec.k, replace=False))
        return data.subset(idx, f"{data.provenance}|random_k(k={spec.k},seed={spec.seed})")
    if isinstance(spec, Imbalance):
        if spec.keep_class not in data.classes:
            raise DataError(f"{spec.keep_class!r} is not one of {data.classes}")
        labels = data.samples.labels
        keep_idx = [i for i, lab in enumerate(labels) if lab == spec.keep_class]
        other_idx = [i for i, lab in enumerate(labels) if lab != spec.keep_class]
        if spec.k_minority < 1 or spec.k_minority > len(other_idx):
            raise DataError(f"cannot draw {spec.k_minority} of {len(other_idx)} "
                            "minority samples")
        rng = np.random.default_rng(spec.seed)
        drawn = rng.choice(len(other_idx), size=spec.k_minority, replace=False)
        idx = np.sort(np.array(keep_idx + [other_idx[i] for i in drawn]))
        return data.subset(
            idx, f"{data.provenance}|imbalance(keep={spec.keep_class!r},"
                 f"k={spec.k_minority},seed={spec.seed})")
    raise ConfigError(f"unknown subsample spec {spec!r}")


# ---------------------------------------------------------------------------
# Estimator facade
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def default_relu_activation() -> RationalActivation:
    """The (1,1) best uniform ReLU approximation on [-1, 1], fitted once."""
    act, _ = _activation.fit_activation(_activation.relu_target(), SolverConfig())
    return act


class MinimaxRationalClassifier(ClassifierMixin, BaseEstimator):
    """Binary classifier: affine map into a fixed (1,1) rational activation,
    trained by minimising the worst-case residual against 0/1 targets.

    Parameters
    ----------
    activation : RationalActivation or None
        Fixed activation coefficients; None fits the ReLU approximation.
    method : "bisection" or "diffcorr"
        Trainer; bisection leaves weights free, diffcorr boxes them in [-1, 1].
    eps, delta, max_iters
        Trainer precision, denominator margin, and iteration cap.
    """

    def __init__(self, activation: RationalActivation | None = None,
                 method: str = "bisection", eps: float = 1e-5,
                 delta: float = 1e-6, max_iters: int = 500):
        self.activation = activation
        self.method = method
        self.eps = eps
        self.delta = delta
        self.max_iters = max_iters

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.classifier_tags.multi_class = False  # two classes by construction
        return tags

    def fit(self, X, y):
        X, y = validate_data(self, X, y)
        y_type = type_of_target(y, input_name="y", raise_unknown=True)
        if y_type != "binary":
            raise ValueError("Only binary classification is supported. "
                             f"The type of the target is {y_type}.")
        labels = tuple(np.asarray(y).tolist())
        data = LabeledDataset.from_arrays(X, labels, provenance="estimator")
        self.activation_ = self.activation or default_relu_activation()
        cfg = SolverConfig(eps=self.eps, delta=self.delta, max_iters=self.max_iters)
        self.model_, self.report_ = train_classifier(data, self.activation_,
                                                     self.method, cfg)
        self.classes_ = np.asarray(data.classes)
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("call fit before predict")

    def decision_function(self, X) -> np.ndarray:
        """Network scores shifted so the class boundary sits at zero.

        Positive values predict classes_[1]; the raw network output equals
        the returned value plus 0.5.
        """
        self._check_fitted()
        X = validate_data(self, X, reset=False)
        scores, _ = raw_scores(self.activation_, self.model_, X)
        return scores - THRESHOLD

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        X = validate_data(self, X, reset=False)
        labels = predict_labels(self.activation_, self.model_, X,
                                tuple(self.classes_.tolist()))
        return np.asarray(labels)

    def training_loss_(self) -> float:
        self._check_fitted()
        return self.report_.final_deviation
