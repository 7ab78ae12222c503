"""Shared fixtures: stored reference coefficients, slow fits cached per
session, and discovery of the optional UCR dataset files."""

import os
from pathlib import Path

import numpy as np
import pytest

from ratmax import RationalActivation, SolverConfig, fit_activation, relu_target

# Reference (1,1) coefficients for the ReLU fit on [-1, 1] and the deviations
# each method reports, used as regression anchors throughout the suite.
TABLE1_BISECTION = RationalActivation(
    0.118033131217831, 0.309015630106715, 1.0, -0.618035002222233)
TABLE1_DIFFCORR = RationalActivation(
    0.118032919266854, 0.309014524918010, 1.0, -0.618036788697690)
TABLE1_BISECTION_DEV = 0.118033601638151
TABLE1_DIFFCORR_DEV = 0.118032919266855

# The continuous-optimum deviation for the ReLU (1,1) fit: (sqrt(5) - 2) / 2.
RELU_TRUE_DEV = 0.11803398874989485


@pytest.fixture(scope="session")
def relu_fit_bisection():
    return fit_activation(relu_target(), SolverConfig(), "bisection")


@pytest.fixture(scope="session")
def relu_fit_diffcorr():
    return fit_activation(relu_target(), SolverConfig(), "diffcorr")


def find_dataset(name: str, split: str):
    """Locate <name>_<split> UCR files under $RATMAX_DATA or ./data, if any."""
    roots = []
    if os.environ.get("RATMAX_DATA"):
        roots.append(Path(os.environ["RATMAX_DATA"]))
    roots.append(Path(__file__).resolve().parent.parent / "data")
    roots.append(Path.cwd() / "data")
    for root in roots:
        for sub in (root, root / name):
            for ext in ("", ".txt", ".tsv", ".csv"):
                candidate = sub / f"{name}_{split}{ext}"
                if candidate.is_file():
                    return str(candidate)
    return None


def require_dataset(name: str, split: str) -> str:
    path = find_dataset(name, split)
    if path is None:
        pytest.skip(f"dataset {name}_{split} not present "
                    "(place it under ./data or $RATMAX_DATA)")
    return path


def random_feasible_model(rng: np.random.Generator, act: RationalActivation,
                          X: np.ndarray, scale: float = 0.3):
    """Rejection-sample an AffineModel with positive denominators on X."""
    from ratmax import AffineModel
    n = X.shape[1]
    for _ in range(1000):
        w = rng.normal(0.0, scale, n)
        b = rng.normal(0.0, scale)
        t = X @ w + b
        if np.min(act.b0 + act.b1 * t) > 1e-6:
            return AffineModel(w, b)
    raise AssertionError("could not sample a feasible model")
