"""
Tests for widening, level-order preprocessing, path costs, oracles and scene sampling.
"""

import itertools

import numpy as np
import pytest

from src.core_linalg import RngStream
from src.errors import ConfigError, LevelOutOfRange, NotDescendant, TooLargeToEnumerate
from src.lattice_model import (
    PSV,
    Alphabet,
    DetectionProblem,
    branch_cost,
    enumerate_goals,
    goal_costs,
    optimal_heuristic_oracle,
    path_cost,
    preprocess,
    quantize,
    remaining_cost,
    sample_scene,
    shortest_path,
    shortest_path_costs,
    snr_to_rho,
    widen_complex,
    widen_vector,
)

from .conftest import QPSK, make_problem, make_scene, scalar_problem


def random_goal(p: DetectionProblem, rng) -> PSV:
    return PSV(tuple(rng.choice([-1.0, 1.0], size=p.m)))


class TestWidening:

    def test_block_pattern(self):
        y, H = widen_complex([1 + 2j], [[3 + 4j]])
        np.testing.assert_array_equal(y, [1.0, 2.0])
        np.testing.assert_array_equal(H, [[3.0, -4.0], [4.0, 3.0]])

    def test_zero_inputs(self):
        y, H = widen_complex(np.zeros(2, complex), np.zeros((2, 2), complex))
        assert not y.any() and not H.any()

    def test_residual_norm_preserved(self):
        scene = make_scene(3, 10.0, seed=4)
        y, H = scene.widened()
        complex_norm = np.linalg.norm(scene.yc - scene.Hc @ scene.xc)
        real_norm = np.linalg.norm(y - H @ widen_vector(scene.xc))
        assert abs(complex_norm - real_norm) <= 1e-12


class TestPreprocess:

    def test_identity_channel(self):
        y = np.array([0.3, -1.2, 2.5, 0.7])
        p = preprocess(y, np.eye(4))
        np.testing.assert_allclose(p.R, np.eye(4), atol=1e-15)
        np.testing.assert_allclose(p.z, y[::-1], atol=1e-15)

    def test_goal_cost_is_residual_norm(self):
        p = make_problem(4, 5.0, seed=2)
        for symbols in itertools.product((-1.0, 1.0), repeat=p.m):
            x = PSV(symbols)
            direct = np.sum((p.z - p.R @ x.level_order()) ** 2)
            assert abs(path_cost(p, x) - direct) <= 1e-10

    def test_ml_argmin_preserved(self):
        scene = make_scene(4, 5.0, seed=3)
        y, H = scene.widened()
        p = preprocess(y, H)
        candidates = np.array(list(itertools.product((-1.0, 1.0), repeat=p.m)))
        channel = np.sum((y[np.newaxis, :] - candidates @ H.T) ** 2, axis=1)
        assert np.argmin(channel) == np.argmin(goal_costs(p, candidates))
        np.testing.assert_allclose(channel, goal_costs(p, candidates) + p.const_offset, atol=1e-9)


class TestCosts:

    def test_scalar_branch_cost(self):
        p = scalar_problem(3.0, 2.0)
        assert branch_cost(p, PSV((1.0,))) == pytest.approx(1.0)

    def test_exact_residual(self):
        p = DetectionProblem(z=np.array([2.0, -1.0]), R=np.array([[2.0, 0.0], [1.0, 1.0]]), alphabet=QPSK)
        assert branch_cost(p, PSV((1.0,))) == 0.0
        assert branch_cost(p, PSV((-2.0, 1.0))) == 0.0

    def test_branch_costs_sum_to_goal_cost(self, rng):
        p = make_problem(2, 8.0, seed=5)
        goal = random_goal(p, rng)
        total = sum(branch_cost(p, goal.prefix(k)) for k in range(1, p.m + 1))
        assert total == pytest.approx(np.sum((p.z - p.R @ goal.level_order()) ** 2), abs=1e-10)

    def test_path_cost_base_cases(self, rng):
        p = make_problem(2, 8.0, seed=6)
        goal = random_goal(p, rng)
        assert path_cost(p, PSV.root()) == 0.0
        assert path_cost(p, goal.prefix(1)) == pytest.approx(branch_cost(p, goal.prefix(1)), abs=1e-15)

    def test_remaining_cost(self, rng):
        p = make_problem(4, 8.0, seed=7)
        goal = random_goal(p, rng)
        assert remaining_cost(p, goal, goal) == pytest.approx(0.0, abs=1e-15)
        assert remaining_cost(p, PSV.root(), goal) == pytest.approx(path_cost(p, goal), abs=1e-10)
        for k in range(p.m + 1):
            node = goal.prefix(k)
            assert remaining_cost(p, node, goal) == pytest.approx(path_cost(p, goal) - path_cost(p, node), abs=1e-10)

    def test_remaining_cost_errors(self):
        p = make_problem(2, 8.0, seed=8)
        goal = PSV((1.0, 1.0, 1.0, 1.0))
        with pytest.raises(NotDescendant):
            remaining_cost(p, PSV((-1.0,)), goal)
        with pytest.raises(LevelOutOfRange):
            remaining_cost(p, PSV.root(), goal.prefix(2))


class TestOracles:

    def test_goal_heuristic_is_zero(self):
        p = make_problem(2, 8.0, seed=9)
        assert optimal_heuristic_oracle(p, PSV((1.0, -1.0, 1.0, -1.0))) == 0.0

    def test_two_level_enumeration(self):
        p = DetectionProblem(z=np.array([0.2, 0.0]), R=np.array([[1.0, 0.0], [0.5, 1.0]]), alphabet=QPSK)
        # level-2 residual 0.0 - 0.5 * x_1 - x_2 with x_1 = +1
        assert optimal_heuristic_oracle(p, PSV((1.0,))) == pytest.approx(min((-0.5 + 1.0) ** 2, (-0.5 - 1.0) ** 2))

    def test_oracle_below_every_completion(self, rng):
        p = make_problem(3, 6.0, seed=10)
        node = random_goal(p, rng).prefix(2)
        h = optimal_heuristic_oracle(p, node)
        for rest in itertools.product((-1.0, 1.0), repeat=p.m - 2):
            goal = PSV(tuple(rest) + node.symbols)
            assert h <= remaining_cost(p, node, goal) + 1e-12

    @pytest.mark.parametrize("m, count", [(1, 2), (4, 16), (8, 256)])
    def test_goal_counts(self, m, count):
        p = DetectionProblem(z=np.zeros(m), R=np.eye(m), alphabet=QPSK)
        goals = list(enumerate_goals(p))
        assert len(goals) == count
        assert len({g.symbols for g in goals}) == count

    def test_enumeration_guard(self):
        p = DetectionProblem(z=np.zeros(26), R=np.eye(26), alphabet=QPSK)
        with pytest.raises(TooLargeToEnumerate):
            next(enumerate_goals(p))

    def test_optimal_f_constant_along_shortest_path(self):
        for seed in range(10):
            p = make_problem(4, 10.0, seed=seed, stream=1)
            goal, f_costs = shortest_path_costs(p)
            np.testing.assert_allclose(f_costs, path_cost(p, goal), atol=1e-9)

    def test_shortest_path_minimizes(self):
        p = make_problem(4, 3.0, seed=12)
        best = path_cost(p, shortest_path(p))
        assert best <= goal_costs(p, np.array(list(itertools.product((-1.0, 1.0), repeat=p.m)))).min() + 1e-12


class TestQuantize:

    def test_fixed_point(self):
        assert quantize(QPSK, [1.0, -1.0, 1.0]).symbols == (1.0, -1.0, 1.0)

    def test_nearest_symbol(self):
        assert quantize(QPSK, [0.2, -3.0]).symbols == (1.0, -1.0)

    def test_tie_goes_low(self):
        assert quantize(QPSK, [0.0]).symbols == (-1.0,)

    def test_larger_alphabet(self):
        pam4 = Alphabet((-3.0, -1.0, 1.0, 3.0))
        assert quantize(pam4, [2.2, -0.4, 9.0]).symbols == (3.0, -1.0, 3.0)


class TestSceneSampling:

    def test_calibration_anchor(self):
        assert snr_to_rho(0.0, 1) == pytest.approx(1.0)

    def test_determinism(self):
        a, bits_a = sample_scene(2, 3, 7.0, RngStream(3, 1))
        b, bits_b = sample_scene(2, 3, 7.0, RngStream(3, 1))
        np.testing.assert_array_equal(a.yc, b.yc)
        np.testing.assert_array_equal(bits_a, bits_b)

    def test_bits_match_symbols(self):
        scene, bits = sample_scene(4, 4, 10.0, RngStream(0))
        np.testing.assert_array_equal(bits, (scene.x > 0).astype(np.int64))
        assert set(np.abs(scene.x)) == {1.0}

    def test_measured_snr(self):
        signal = noise = 0.0
        for i in range(20000):
            scene, _ = sample_scene(4, 4, 10.0, RngStream(21, i))
            signal += np.sum(np.abs(scene.Hc @ scene.xc) ** 2)
            noise += np.sum(np.abs(scene.wc) ** 2)
        assert signal / noise == pytest.approx(10.0, rel=0.04)

    def test_antenna_precondition(self):
        with pytest.raises(ConfigError):
            sample_scene(4, 2, 10.0, RngStream(0))
