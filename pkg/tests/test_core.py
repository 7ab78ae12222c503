"""Core types, evaluation, the uniform loss, and the quasiconvexity property."""

import numpy as np
import pytest

from ratmax import (AffineModel, DataError, DomainError, RationalActivation,
                    SampleSet, SolverConfig, eval_activation, eval_network,
                    quasiconvexity_probe, uniform_loss)
from ratmax.core import combine_models, network_program

from conftest import TABLE1_BISECTION, random_feasible_model

IDENTITY = RationalActivation(0.0, 1.0, 1.0, 0.0)


class TestSampleSet:
    def test_basic_shape(self):
        s = SampleSet([[1.0, 2.0], [3.0, 4.0]], [0.5, -0.5])
        assert s.n_samples == 2 and s.n_features == 2

    def test_rejects_nan(self):
        with pytest.raises(DataError):
            SampleSet([[np.nan]], [0.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(DataError):
            SampleSet([[1.0], [2.0]], [0.0])

    def test_labels_must_match_length(self):
        with pytest.raises(DataError):
            SampleSet([[1.0], [2.0]], [0.0, 1.0], labels=("a",))

    def test_immutable(self):
        s = SampleSet([[1.0]], [2.0])
        with pytest.raises(ValueError):
            s.inputs[0, 0] = 9.0


class TestRationalActivation:
    def test_all_zero_rejected(self):
        with pytest.raises(DataError):
            RationalActivation(0.0, 0.0, 0.0, 0.0)

    def test_table_value_at_zero(self):
        # with b0 = 1 the value at the origin is a0 itself
        assert eval_activation(TABLE1_BISECTION, 0.0) == 0.118033131217831

    def test_identity_ratio(self):
        assert eval_activation(IDENTITY, 7.0) == 7.0

    def test_value_at_one_direct_arithmetic(self):
        # (a0 + a1) / (1 + b1) evaluated independently at high precision
        assert eval_activation(TABLE1_BISECTION, 1.0) == pytest.approx(
            1.1180311384788441, rel=1e-14)

    def test_pole_raises(self):
        act = RationalActivation(1.0, 0.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            eval_activation(act, 0.0)


class TestEvalNetwork:
    def test_zero_model_returns_a0(self):
        m = AffineModel.zeros(3)
        value = eval_network(TABLE1_BISECTION, m, [4.0, -1.0, 0.5])
        assert value == TABLE1_BISECTION.a0

    def test_affine_identity(self):
        m = AffineModel([2.0, -1.0], 3.0)
        assert eval_network(IDENTITY, m, [1.0, 1.0]) == 4.0

    def test_composition_equals_scalar_eval(self):
        m = AffineModel([1.0], 0.0)
        value = eval_network(TABLE1_BISECTION, m, [0.5])
        assert value == eval_activation(TABLE1_BISECTION, 0.5)
        # frozen from independent high-precision evaluation of the ratio
        assert value == pytest.approx(0.39442525202800494, rel=1e-15)

    def test_nonpositive_denominator_raises(self):
        m = AffineModel([1.0], 0.0)
        # t = 2 makes 1 + b1*t negative for the table coefficients
        with pytest.raises(DomainError):
            eval_network(TABLE1_BISECTION, m, [2.0])


class TestUniformLoss:
    def test_exact_interpolation_is_zero(self):
        X = np.array([[0.1], [0.2], [-0.3]])
        m = AffineModel([1.0], 0.0)
        y = [eval_network(TABLE1_BISECTION, m, x) for x in X]
        assert uniform_loss(TABLE1_BISECTION, m, SampleSet(X, y)) == 0.0

    def test_zero_model_loss_is_distance_to_a0(self):
        data = SampleSet([[1.0], [2.0], [3.0]], [0.0, 1.0, 0.4])
        m = AffineModel.zeros(1)
        expected = max(abs(y - TABLE1_BISECTION.a0) for y in data.targets)
        assert uniform_loss(TABLE1_BISECTION, m, data) == expected

    def test_matches_bruteforce_max(self):
        xs = np.array([[0.5], [-0.25], [0.75]])
        ys = np.array([0.4, 0.1, -0.2])
        m = AffineModel([0.5], 0.1)
        brute = max(abs(y - eval_network(IDENTITY, m, x)) for x, y in zip(xs, ys))
        assert uniform_loss(IDENTITY, m, SampleSet(xs, ys)) == pytest.approx(
            brute, abs=0.0)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(5)
        X = rng.uniform(-1, 1, size=(8, 2))
        y = rng.uniform(0, 1, size=8)
        m = random_feasible_model(rng, TABLE1_BISECTION, X)
        perm = rng.permutation(8)
        a = uniform_loss(TABLE1_BISECTION, m, SampleSet(X, y))
        b = uniform_loss(TABLE1_BISECTION, m, SampleSet(X[perm], y[perm]))
        assert a == b

    def test_nonnegative(self):
        rng = np.random.default_rng(6)
        X = rng.uniform(-1, 1, size=(5, 3))
        y = rng.normal(size=5)
        m = random_feasible_model(rng, TABLE1_BISECTION, X)
        assert uniform_loss(TABLE1_BISECTION, m, SampleSet(X, y)) >= 0.0


class TestQuasiconvexity:
    LAMBDAS = (0.0, 0.25, 0.5, 0.75, 1.0)

    def test_degenerate_segment(self):
        rng = np.random.default_rng(7)
        X = rng.uniform(-1, 1, size=(5, 1))
        y = rng.uniform(0, 1, size=5)
        data = SampleSet(X, y)
        m = random_feasible_model(rng, TABLE1_BISECTION, X)
        assert quasiconvexity_probe(TABLE1_BISECTION, data, m, m, self.LAMBDAS)

    def test_random_pairs_scalar(self):
        rng = np.random.default_rng(8)
        X = rng.uniform(-1, 1, size=(5, 1))
        y = rng.uniform(0, 1, size=5)
        data = SampleSet(X, y)
        for _ in range(50):
            m1 = random_feasible_model(rng, TABLE1_BISECTION, X)
            m2 = random_feasible_model(rng, TABLE1_BISECTION, X)
            assert quasiconvexity_probe(TABLE1_BISECTION, data, m1, m2, self.LAMBDAS)

    def test_endpoints_exact(self):
        rng = np.random.default_rng(9)
        X = rng.uniform(-1, 1, size=(6, 2))
        y = rng.uniform(0, 1, size=6)
        data = SampleSet(X, y)
        m1 = random_feasible_model(rng, TABLE1_BISECTION, X)
        m2 = random_feasible_model(rng, TABLE1_BISECTION, X)
        at0 = uniform_loss(TABLE1_BISECTION, data=data,
                           model=combine_models(m1, m2, 0.0))
        at1 = uniform_loss(TABLE1_BISECTION, data=data,
                           model=combine_models(m1, m2, 1.0))
        assert at0 == uniform_loss(TABLE1_BISECTION, m2, data)
        assert at1 == uniform_loss(TABLE1_BISECTION, m1, data)

    def test_lambda_outside_unit_interval_rejected(self):
        data = SampleSet([[0.0]], [5.0])
        m1 = AffineModel([0.0], -1.0)
        m2 = AffineModel([0.0], 1.0)
        with pytest.raises(Exception):
            quasiconvexity_probe(IDENTITY, data, m1, m2, [1.5])


class TestSolverConfig:
    def test_rejects_bad_eps(self):
        with pytest.raises(Exception):
            SolverConfig(eps=0.0)

    def test_rejects_bad_interval(self):
        with pytest.raises(Exception):
            SolverConfig(interval=(1.0, -1.0))

    def test_rejects_tiny_grid(self):
        with pytest.raises(Exception):
            SolverConfig(grid_points=3)


class TestNetworkProgram:
    def test_loss_matches_uniform_loss(self):
        rng = np.random.default_rng(10)
        X = rng.uniform(-1, 1, size=(7, 3))
        y = rng.uniform(0, 1, size=7)
        data = SampleSet(X, y)
        prog = network_program(TABLE1_BISECTION, data)
        m = random_feasible_model(rng, TABLE1_BISECTION, X)
        v = np.concatenate([m.weights, [m.bias]])
        assert prog.loss(v) == pytest.approx(
            uniform_loss(TABLE1_BISECTION, m, data), abs=1e-15)

    def test_start_loss_is_distance_to_a0(self):
        data = SampleSet([[0.3], [0.7]], [0.0, 1.0])
        prog = network_program(TABLE1_BISECTION, data)
        assert prog.loss(prog.start) == pytest.approx(
            max(abs(0.0 - TABLE1_BISECTION.a0), abs(1.0 - TABLE1_BISECTION.a0)),
            abs=0.0)
