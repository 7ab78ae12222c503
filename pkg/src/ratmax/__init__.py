"""ratmax: uniform-norm (Chebyshev) rational approximation on sample sets.

Two trainers for the quasiconvex minimax problem over a ratio of affine
forms, a degree-(1,1) rational-activation fitter, and a binary classifier
with a worst-case loss, plus the LP machinery underneath.
"""

from .activation import (EquioscillationReport, TargetFunction,
                         build_grid_problem, custom_target,
                         equioscillation_report, fit_activation, lrelu_target,
                         relu_target)
from .bisection import (feasibility_lp, init_bounds, is_feasible,
                        train_bisection)
from .classify import (ConfusionMatrix, EvalReport, Imbalance, LabeledDataset,
                       MinimaxRationalClassifier, RandomK, evaluate, predict,
                       subsample_experiments, train_classifier)
from .core import (AffineModel, FitReport, RationalActivation, RatioProgram,
                   SampleSet, SolverConfig, eval_activation, eval_network,
                   network_program, quasiconvexity_probe, uniform_loss)
from .data_io import load_model, load_ucr, save_model
from .diffcorr import dc_step, train_diffcorr
from .errors import (ConfigError, DataError, DomainError, ParseError,
                     RatmaxError, SchemaError, SolverError, StateError)
from .lp import LpProblem, LpSolution, LpStatus, solve_lp

__version__ = "0.1.0"

__all__ = [
    "AffineModel", "ConfigError", "ConfusionMatrix", "DataError",
    "DomainError", "EquioscillationReport", "EvalReport", "FitReport",
    "Imbalance", "LabeledDataset", "LpProblem", "LpSolution", "LpStatus",
    "MinimaxRationalClassifier", "ParseError", "RandomK",
    "RationalActivation", "RatioProgram", "RatmaxError", "SampleSet",
    "SchemaError", "SolverConfig", "SolverError", "StateError",
    "TargetFunction", "build_grid_problem", "custom_target", "dc_step",
    "equioscillation_report", "eval_activation", "eval_network", "evaluate",
    "feasibility_lp", "fit_activation", "init_bounds", "is_feasible",
    "load_model", "load_ucr", "lrelu_target", "network_program", "predict",
    "quasiconvexity_probe", "relu_target", "save_model", "solve_lp",
    "subsample_experiments", "train_bisection", "train_classifier",
    "train_diffcorr", "uniform_loss",
]
