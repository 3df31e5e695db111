"""
Tests for the heuristic network: forward pass, gradients, Adam, dataset, training and
the model file.
"""

import io
import struct

import numpy as np
import pytest

from src.core_linalg import RngStream
from src.errors import DimensionMismatch, EmptyBatch, FormatViolation, ShapeMismatch, SizeMismatch
from src.lattice_model import PSV, path_cost
from src.neural_heuristic import (
    AdamState,
    Gradients,
    MlpModel,
    NeuralHeuristic,
    TrainConfig,
    TrainingBatch,
    adam_step,
    backward,
    build_training_set,
    encode_model,
    forward,
    generate_dataset,
    heuristic_eval,
    init_model,
    l2_loss,
    load_model,
    loss_and_gradients,
    predicted_f,
    residual_input,
    save_loss_trace,
    save_model,
    train,
)
from src.tree_search import ZeroHeuristic, brute_force_ml, hats

from .conftest import make_problem

SMALL = TrainConfig(num_tx=2, num_rx=2, minibatch_time_slots=4, num_batches=2, epochs=3,
                    hidden_layers=(8, 4), learning_rate=1e-3, heldout_time_slots=4, seed=3)


def zero_model(sizes) -> MlpModel:
    return MlpModel(tuple(sizes), [np.zeros((sizes[l], sizes[l - 1])) for l in range(1, len(sizes))],
                    [np.zeros(sizes[l]) for l in range(1, len(sizes))])


def random_batch(rng, n: int, width: int) -> TrainingBatch:
    g = rng.uniform(0.0, 3.0, n)
    return TrainingBatch(rng.standard_normal((n, width)), g, g + rng.uniform(0.0, 5.0, n))


def flat_loss(model: MlpModel, batch: TrainingBatch) -> float:
    return float(np.mean((batch.target - predicted_f(model, batch)) ** 2))


class TestResidualInput:

    def test_root_is_z(self):
        p = make_problem(2, 5.0, seed=1)
        np.testing.assert_array_equal(residual_input(p, PSV.root()), p.z)

    def test_goal_norm_is_path_cost(self, rng):
        p = make_problem(4, 5.0, seed=2)
        goal = PSV(tuple(rng.choice([-1.0, 1.0], size=p.m)))
        r = residual_input(p, goal)
        np.testing.assert_allclose(r, p.z - p.R @ goal.level_order(), atol=1e-15)
        assert r @ r == pytest.approx(path_cost(p, goal), abs=1e-10)

    def test_partial_path_head_matches_path_cost(self, rng):
        p = make_problem(4, 5.0, seed=3)
        node = PSV(tuple(rng.choice([-1.0, 1.0], size=p.m))).prefix(3)
        head = residual_input(p, node)[:3]
        assert head @ head == pytest.approx(path_cost(p, node), abs=1e-10)


class TestForward:

    def test_zero_model(self):
        assert forward(zero_model((4, 3, 1)), np.ones(4)) == 0.0

    def test_rectifier_kill(self):
        model = MlpModel((1, 1), [np.array([[-1.0]])], [np.array([0.0])])
        assert forward(model, [3.0]) == 0.0

    def test_final_rectifier_switch(self):
        model = MlpModel((1, 1), [np.array([[-1.0]])], [np.array([0.0])], final_relu=False)
        assert forward(model, [3.0]) == -3.0

    def test_deterministic_and_finite(self, rng):
        model = init_model((8, 16, 8, 1), RngStream(4))
        inputs = rng.standard_normal((10 ** 4, 8)) * 3.0
        first = np.array([forward(model, x) for x in inputs[:200]])
        again = np.array([forward(model, x) for x in inputs[:200]])
        np.testing.assert_array_equal(first, again)
        assert np.all(np.isfinite([forward(model, x) for x in inputs]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            forward(zero_model((4, 1)), np.ones(3))

    def test_shape_validation(self):
        with pytest.raises(DimensionMismatch):
            MlpModel((2, 1), [np.zeros((1, 3))], [np.zeros(1)])


class TestHeuristicEval:

    def test_goal_is_zero(self):
        p = make_problem(2, 5.0, seed=4)
        model = init_model((p.m, 8, 1), RngStream(1))
        assert heuristic_eval(model, p, PSV((1.0, -1.0, -1.0, 1.0))) == 0.0

    def test_zero_model_at_root(self):
        p = make_problem(2, 5.0, seed=4)
        assert heuristic_eval(zero_model((p.m, 4, 1)), p, PSV.root()) == 0.0

    def test_f_recomposition(self, rng):
        p = make_problem(2, 5.0, seed=5)
        model = init_model((p.m, 8, 1), RngStream(2), final_relu=False)
        node = PSV(tuple(rng.choice([-1.0, 1.0], size=2)))
        batch = TrainingBatch(residual_input(p, node)[np.newaxis, :], np.array([path_cost(p, node)]), np.zeros(1))
        expected = path_cost(p, node) + heuristic_eval(model, p, node)
        assert predicted_f(model, batch)[0] == pytest.approx(expected, abs=1e-12)

    def test_dimension_mismatch(self):
        p = make_problem(2, 5.0, seed=6)
        with pytest.raises(DimensionMismatch):
            heuristic_eval(zero_model((6, 1)), p, PSV.root())

    def test_as_search_heuristic(self):
        p = make_problem(2, 12.0, seed=7)
        model = init_model((p.m, 8, 1), RngStream(3))
        out = hats(p, NeuralHeuristic(model), capacity=p.m + 1)
        assert out.success and p.is_goal(out.estimate)
        assert out.stats.flop_estimate > out.stats.visited


class TestLoss:

    def test_perfect_prediction(self):
        assert l2_loss([(1.0, 1.0), (2.5, 2.5)]) == 0.0

    def test_single_pair(self):
        assert l2_loss([(3.0, 5.0)]) == 4.0

    def test_permutation_invariant(self, rng):
        pairs = [tuple(v) for v in rng.standard_normal((20, 2))]
        assert l2_loss(pairs) == pytest.approx(l2_loss(pairs[::-1]), rel=1e-14)

    def test_empty(self):
        with pytest.raises(EmptyBatch):
            l2_loss([])


class TestGradients:

    def test_finite_differences(self, rng):
        step = 1e-6
        for seed in range(20):
            model = init_model((8, 16, 8, 1), RngStream(seed))
            for b in model.biases:
                b += 0.05
            batch = random_batch(rng, 6, 8)
            _, grads = loss_and_gradients(model, batch)
            for params, analytic in ((model.weights, grads.weights), (model.biases, grads.biases)):
                for param, grad in zip(params, analytic):
                    for idx in np.ndindex(param.shape):
                        saved = param[idx]
                        param[idx] = saved + step
                        up = flat_loss(model, batch)
                        param[idx] = saved - step
                        down = flat_loss(model, batch)
                        param[idx] = saved
                        numeric = (up - down) / (2 * step)
                        assert abs(grad[idx] - numeric) <= 1e-5 * max(abs(grad[idx]), abs(numeric)) + 1e-7

    def test_zero_loss_has_zero_gradient(self, rng):
        model = init_model((4, 6, 1), RngStream(7))
        batch = random_batch(rng, 5, 4)
        batch.target = predicted_f(model, batch)
        loss, grads = loss_and_gradients(model, batch)
        assert loss == 0.0
        assert all(not np.any(w) for w in grads.weights)
        assert all(not np.any(b) for b in grads.biases)

    def test_batch_gradient_is_mean_of_sample_gradients(self, rng):
        model = init_model((4, 6, 1), RngStream(8))
        for b in model.biases:
            b += 0.1
        batch = random_batch(rng, 4, 4)
        _, whole = loss_and_gradients(model, batch)
        singles = [loss_and_gradients(model, batch.subset([i]))[1] for i in range(4)]
        for l in range(model.num_layers):
            np.testing.assert_allclose(whole.weights[l], np.mean([s.weights[l] for s in singles], axis=0), atol=1e-12)
            np.testing.assert_allclose(whole.biases[l], np.mean([s.biases[l] for s in singles], axis=0), atol=1e-12)

    def test_goal_level_samples_do_not_train(self, rng):
        model = init_model((4, 6, 1), RngStream(9))
        batch = random_batch(rng, 3, 4)
        batch.at_goal = np.ones(3, dtype=bool)
        _, grads = loss_and_gradients(model, batch)
        assert all(not np.any(w) for w in grads.weights)

    def test_backward_from_samples(self):
        cfg = SMALL.model_copy(update={'num_batches': 1, 'minibatch_time_slots': 1})
        samples = list(generate_dataset(cfg))
        model = init_model(cfg.layer_sizes, RngStream(1))
        grads = backward(model, samples)
        assert [w.shape for w in grads.weights] == [w.shape for w in model.weights]
        with pytest.raises(DimensionMismatch):
            backward(init_model((6, 4, 1), RngStream(1)), samples)


class TestAdam:

    def test_zero_gradients_leave_parameters(self):
        model = init_model((4, 5, 1), RngStream(1))
        before = model.copy()
        state = AdamState.for_model(model)
        zeros = Gradients([np.zeros_like(w) for w in model.weights], [np.zeros_like(b) for b in model.biases])
        for _ in range(3):
            adam_step(model, zeros, state)
        for a, b in zip(model.weights, before.weights):
            np.testing.assert_array_equal(a, b)
        assert state.step == 3

    def test_constant_gradient_step_size(self):
        model = init_model((3, 2, 1), RngStream(2))
        state = AdamState.for_model(model, learning_rate=1e-3)
        grads = Gradients([np.full_like(w, 0.7) for w in model.weights], [np.full_like(b, -2.0) for b in model.biases])
        for _ in range(200):
            before = model.copy()
            adam_step(model, grads, state)
        for a, b in zip(model.weights, before.weights):
            np.testing.assert_allclose(np.abs(a - b), 1e-3, rtol=1e-4)
        for a, b in zip(model.biases, before.biases):
            np.testing.assert_allclose(np.abs(a - b), 1e-3, rtol=1e-4)

    def test_deterministic(self, rng):
        batch = random_batch(rng, 8, 4)
        runs = []
        for _ in range(2):
            model = init_model((4, 6, 1), RngStream(5))
            state = AdamState.for_model(model, learning_rate=1e-2)
            for _ in range(10):
                adam_step(model, loss_and_gradients(model, batch)[1], state)
            runs.append(model)
        for a, b in zip(runs[0].weights, runs[1].weights):
            np.testing.assert_array_equal(a, b)

    def test_shape_mismatch(self):
        model = init_model((4, 6, 1), RngStream(5))
        state = AdamState.for_model(model)
        bad = Gradients([np.zeros((2, 2))] * 2, [np.zeros(6), np.zeros(1)])
        with pytest.raises(ShapeMismatch):
            adam_step(model, bad, state)


class TestDataset:

    def test_samples_per_slot(self):
        cfg = TrainConfig(num_tx=4, num_rx=4, minibatch_time_slots=1, num_batches=1)
        samples = list(generate_dataset(cfg))
        assert len(samples) == 7
        assert [s.k for s in samples] == list(range(1, 8))

    def test_goal_level_variant(self):
        cfg = TrainConfig(num_tx=4, num_rx=4, minibatch_time_slots=1, num_batches=1, include_goal_level=True)
        assert len(list(generate_dataset(cfg))) == 8

    def test_targets_are_label_costs(self):
        for s in generate_dataset(SMALL):
            residual = s.z - s.R @ s.label_path.level_order()
            assert s.target >= 0.0
            assert s.target == pytest.approx(residual @ residual, abs=1e-10)
            assert 1 <= s.k <= s.problem.m - 1

    def test_deterministic(self):
        a = build_training_set(generate_dataset(SMALL))
        b = build_training_set(generate_dataset(SMALL))
        np.testing.assert_array_equal(a.inputs, b.inputs)
        np.testing.assert_array_equal(a.target, b.target)

    def test_slices_match_full_stream(self):
        full = build_training_set(generate_dataset(SMALL))
        head = build_training_set(generate_dataset(SMALL, num_slots=3))
        tail = build_training_set(generate_dataset(SMALL, first_slot=3, num_slots=SMALL.total_time_slots - 3))
        np.testing.assert_array_equal(full.inputs, np.vstack([head.inputs, tail.inputs]))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(snr_low=15.0, snr_high=5.0)
        with pytest.raises(ValueError):
            TrainConfig(num_tx=4, num_rx=2)


class TestTrain:

    def test_no_batches_returns_initialization(self):
        cfg = SMALL.model_copy(update={'num_batches': 0})
        model = train(cfg)
        fresh = init_model(cfg.layer_sizes, RngStream(cfg.seed, 1 << 63))
        for a, b in zip(model.weights, fresh.weights):
            np.testing.assert_array_equal(a, b)

    def test_reproducible_with_trace(self):
        trace_a, trace_b = [], []
        a = train(SMALL, trace=trace_a)
        b = train(SMALL, trace=trace_b)
        assert trace_a == trace_b
        assert len(trace_a) == SMALL.num_batches * SMALL.epochs
        for wa, wb in zip(a.weights, b.weights):
            np.testing.assert_array_equal(wa, wb)

    def test_trailing_loss_below_initial_loss(self):
        cfg = TrainConfig(num_tx=2, num_rx=2, minibatch_time_slots=16, num_batches=4, epochs=50,
                          hidden_layers=(16, 8), learning_rate=1e-2, final_relu=False,
                          heldout_time_slots=0, seed=5)
        trace = []
        train(cfg, trace=trace)
        losses = [loss for _, loss in trace]
        assert len(losses) == 200
        assert np.mean(losses[-20:]) < np.mean(losses[:20])

    def test_loss_trace_file(self, tmp_path):
        path = tmp_path / "trace.csv"
        save_loss_trace([(0, 1.5), (1, 0.25)], path)
        assert path.read_text() == "0,1.5\n1,0.25\n"


class TestModelFile:

    def test_round_trip(self, tmp_path):
        model = init_model((8, 5, 3, 1), RngStream(6))
        save_model(model, tmp_path / "m.bin")
        loaded = load_model(tmp_path / "m.bin")
        assert loaded.layer_sizes == model.layer_sizes
        for a, b in zip(model.weights + model.biases, loaded.weights + loaded.biases):
            np.testing.assert_array_equal(a, b)

    def test_layout(self):
        model = MlpModel((2, 1), [np.array([[1.5, -2.0]])], [np.array([0.25])])
        data = encode_model(model)
        assert data[:8] == b"HATSMLP1"
        assert len(data) == 8 + 4 + 2 * 4 + 3 * 8
        assert np.frombuffer(data[20:], dtype='<f8').tolist() == [1.5, -2.0, 0.25]

    def test_truncated(self):
        data = encode_model(init_model((4, 3, 1), RngStream(1)))
        with pytest.raises(FormatViolation):
            load_model(io.BytesIO(data[:-5]))
        with pytest.raises(FormatViolation):
            load_model(io.BytesIO(data[:10]))

    def test_huge_layer_sizes_are_a_format_violation(self):
        biggest = 2 ** 32 - 1
        data = b"HATSMLP1" + struct.pack('<4I', 3, biggest, biggest, 1)
        with pytest.raises(FormatViolation) as err:
            load_model(io.BytesIO(data))
        assert err.value.offset == len(data)

    def test_bad_magic(self):
        data = encode_model(init_model((4, 3, 1), RngStream(1)))
        with pytest.raises(FormatViolation) as err:
            load_model(io.BytesIO(b"XATSMLP1" + data[8:]))
        assert err.value.offset == 0

    def test_trailing_bytes(self):
        data = encode_model(init_model((4, 3, 1), RngStream(1)))
        with pytest.raises(SizeMismatch):
            load_model(io.BytesIO(data + b"\x00"))

    def test_expected_inputs(self):
        data = encode_model(init_model((4, 3, 1), RngStream(1)))
        with pytest.raises(SizeMismatch):
            load_model(io.BytesIO(data), expected_inputs=8)

    def test_final_relu_is_a_load_option(self):
        data = encode_model(init_model((4, 3, 1), RngStream(1)))
        assert load_model(io.BytesIO(data), final_relu=False).final_relu is False


class TestLearnedSearchIsExactWithEnoughMemory:

    def test_zero_heuristic_reference(self):
        p = make_problem(2, 10.0, seed=9)
        assert abs(hats(p, ZeroHeuristic(), p.m + 1).cost - brute_force_ml(p).cost) <= 1e-9
