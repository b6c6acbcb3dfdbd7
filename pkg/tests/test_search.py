"""Stochastic stepwise path: sizing formulas, steps, and full runs."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from st2e.linear_model import Dataset, aic
from st2e.rng import substream
from st2e.scenarios import builtin_scenario, generate
from st2e.search import (
    ModelEvaluator,
    PathResult,
    ST2Config,
    StepPlan,
    backward_step,
    forward_step,
    num_candidate_groups,
    plan_step,
    run_st2_path,
    sample_candidate_groups,
    sample_group_size,
)

from conftest import random_dataset

# kappa this close to 1 drives k to C(m, g): steps enumerate exhaustively
NEAR_GREEDY = 1.000001


def brute_force_k(m: int, g: int, kappa: float) -> int:
    c = math.comb(m, g)
    return min(max(1, math.floor(c ** (1.0 / kappa) + 0.5)), c)


class TestConfigValidation:
    def test_kappa_must_exceed_one(self):
        with pytest.raises(ValueError):
            ST2Config(kappa=1.0)
        with pytest.raises(ValueError):
            ST2Config(kappa=0.5)

    def test_lam_open_interval(self):
        with pytest.raises(ValueError):
            ST2Config(kappa=2.0, lam=0.0)
        with pytest.raises(ValueError):
            ST2Config(kappa=2.0, lam=1.0)

    def test_max_sweeps_positive(self):
        with pytest.raises(ValueError):
            ST2Config(kappa=2.0, max_sweeps=0)

    def test_step_plan_bounds(self):
        with pytest.raises(ValueError):
            StepPlan("forward", pool_size=3, group_size=4, group_count=1)
        with pytest.raises(ValueError):
            StepPlan("forward", pool_size=3, group_size=1, group_count=0)


class TestSampleGroupSize:
    def test_singleton_pool(self):
        rng = np.random.default_rng(0)
        assert all(sample_group_size(1, 0.5, rng) == 1 for _ in range(20))

    def test_m2_cap_rounds_to_one(self):
        # floor(2 * 0.5 + 0.5) = 1, so m=2 still forces g=1
        rng = np.random.default_rng(1)
        assert all(sample_group_size(2, 0.5, rng) == 1 for _ in range(20))

    def test_m20_support(self):
        rng = np.random.default_rng(2)
        draws = {sample_group_size(20, 0.5, rng) for _ in range(5000)}
        assert draws == set(range(1, 11))

    def test_m3_uniform_within_3_sigma(self):
        rng = np.random.default_rng(3)
        draws = np.array([sample_group_size(3, 0.5, rng) for _ in range(100_000)])
        assert set(draws.tolist()) == {1, 2}
        freq = np.mean(draws == 1)
        sigma = math.sqrt(0.5 * 0.5 / draws.size)
        assert abs(freq - 0.5) < 3 * sigma

    def test_empty_pool_rejected(self):
        with pytest.raises(ValueError):
            sample_group_size(0, 0.5, np.random.default_rng(0))


class TestNumCandidateGroups:
    def test_single_group_pool(self):
        for m in (1, 3, 9):
            assert num_candidate_groups(m, m, 2.0) == 1

    def test_huge_kappa_gives_one(self):
        assert num_candidate_groups(20, 5, 1e6) == 1
        assert num_candidate_groups(120, 30, 1e6) == 1

    def test_hand_value(self):
        # C(20,3)=1140, sqrt=33.76..., +0.5 floors to 34
        assert num_candidate_groups(20, 3, 2.0) == 34

    def test_matches_integer_brute_force(self):
        for m in range(1, 46):
            for g in range(1, m + 1):
                for kappa in (1.3, 1.5, 2.0, math.e, 7.0, 20.0):
                    assert num_candidate_groups(m, g, kappa) == brute_force_k(m, g, kappa)

    def test_never_exceeds_group_total(self):
        # near-greedy kappa saturates at C(m, g) exactly
        assert num_candidate_groups(8, 4, NEAR_GREEDY) == math.comb(8, 4)

    def test_validation(self):
        with pytest.raises(ValueError):
            num_candidate_groups(3, 4, 2.0)
        with pytest.raises(ValueError):
            num_candidate_groups(3, 0, 2.0)
        with pytest.raises(ValueError):
            num_candidate_groups(3, 2, 1.0)


class TestPlanStep:
    def test_fuzzed_bounds(self):
        rng = np.random.default_rng(10)
        config = ST2Config(kappa=2.5)
        for _ in range(300):
            m = int(rng.integers(1, 30))
            plan = plan_step("forward", m, config, rng)
            assert 1 <= plan.group_size <= max(1, math.floor(0.5 * m + 0.5))
            assert 1 <= plan.group_count <= math.comb(m, plan.group_size)


class TestSampleCandidateGroups:
    def test_whole_pool_single_group(self):
        groups = sample_candidate_groups(np.array([1, 2, 3]), 3, 1, np.random.default_rng(0))
        np.testing.assert_array_equal(groups, [[1, 2, 3]])

    def test_rows_are_sorted_distinct_members(self):
        rng = np.random.default_rng(1)
        pool = np.array([2, 5, 7, 11, 13, 17])
        groups = sample_candidate_groups(pool, 3, 200, rng)
        assert groups.shape == (200, 3)
        for row in groups:
            assert len(set(row.tolist())) == 3
            assert set(row.tolist()) <= set(pool.tolist())
            assert list(row) == sorted(row)

    def test_pairs_uniform_within_3_sigma(self):
        rng = np.random.default_rng(2)
        k = 100_000
        groups = sample_candidate_groups(np.arange(5), 2, k, rng)
        pairs = list(itertools.combinations(range(5), 2))
        codes = groups[:, 0] * 5 + groups[:, 1]
        sigma = math.sqrt(0.1 * 0.9 / k)
        for a, b in pairs:
            freq = np.mean(codes == a * 5 + b)
            assert abs(freq - 0.1) < 3 * sigma

    def test_chunked_uniform_draws_match_bulk(self):
        # streamed blocks rely on consecutive rng.random calls being
        # equivalent to one bulk call
        bulk = np.random.default_rng(9).random((10, 4))
        split_rng = np.random.default_rng(9)
        split = np.vstack([split_rng.random((6, 4)), split_rng.random((4, 4))])
        np.testing.assert_array_equal(bulk, split)


class TestModelEvaluator:
    def test_single_subset_matches_direct_aic(self):
        rng = np.random.default_rng(20)
        ds = random_dataset(rng, n=40, p=7)
        evaluator = ModelEvaluator(ds)
        for subset in ([], [0], [2, 5], [0, 1, 2, 3], list(range(7))):
            got = evaluator.aic_of(np.asarray(subset, dtype=np.intp))
            np.testing.assert_allclose(got, aic(ds, subset), rtol=1e-8)

    def test_forward_batch_matches_direct_aic(self):
        rng = np.random.default_rng(21)
        ds = random_dataset(rng, n=30, p=6)
        evaluator = ModelEvaluator(ds)
        current = np.array([1, 4], dtype=np.intp)
        pool = [0, 2, 3, 5]
        groups = np.array(list(itertools.combinations(pool, 2)), dtype=np.intp)
        scores = evaluator.aic_forward(current, groups)
        for row, score in zip(groups, scores):
            expected = aic(ds, sorted([1, 4] + row.tolist()))
            np.testing.assert_allclose(score, expected, rtol=1e-8)

    def test_backward_batch_matches_direct_aic(self):
        rng = np.random.default_rng(22)
        ds = random_dataset(rng, n=30, p=6)
        evaluator = ModelEvaluator(ds)
        current = np.array([0, 2, 3, 5], dtype=np.intp)
        groups = np.array(list(itertools.combinations([0, 2, 3, 5], 2)), dtype=np.intp)
        scores = evaluator.aic_backward(current, groups)
        for row, score in zip(groups, scores):
            remaining = sorted(set(current.tolist()) - set(row.tolist()))
            np.testing.assert_allclose(score, aic(ds, remaining), rtol=1e-8)

    def test_restrict_matches_column_subset_dataset(self):
        rng = np.random.default_rng(23)
        ds = random_dataset(rng, n=25, p=8)
        keep = np.array([1, 3, 6], dtype=np.intp)
        restricted = ModelEvaluator(ds).restrict(keep)
        small = ds.select_columns(keep)
        for subset in ([], [0], [0, 2], [1, 2]):
            np.testing.assert_allclose(
                restricted.aic_of(np.asarray(subset, dtype=np.intp)),
                aic(small, subset),
                rtol=1e-8,
            )

    def test_rank_deficient_candidate_scores_inf(self):
        rng = np.random.default_rng(24)
        x = rng.standard_normal((15, 4))
        x[:, 3] = x[:, 0]
        ds = Dataset.from_xy(x, rng.standard_normal(15))
        evaluator = ModelEvaluator(ds)
        assert evaluator.aic_of(np.array([0, 3], dtype=np.intp)) == np.inf
        scores = evaluator.aic_forward(
            np.array([0], dtype=np.intp), np.array([[3], [1]], dtype=np.intp)
        )
        assert scores[0] == np.inf
        assert np.isfinite(scores[1])

    def test_oversized_model_scores_inf(self):
        rng = np.random.default_rng(25)
        ds = random_dataset(rng, n=4, p=6)
        evaluator = ModelEvaluator(ds)
        assert evaluator.aic_of(np.array([0, 1, 2, 3], dtype=np.intp)) == np.inf


class TestForwardStep:
    def test_single_perfect_predictor_accepted(self):
        x = np.arange(10, dtype=float).reshape(-1, 1)
        ds = Dataset.from_xy(x, 5.0 * x[:, 0])
        new, accepted = forward_step(ds, [], ST2Config(kappa=2.0), np.random.default_rng(0))
        assert accepted
        np.testing.assert_array_equal(new, [0])

    def test_full_model_rejected_by_precondition(self):
        ds = random_dataset(np.random.default_rng(1), n=12, p=3)
        with pytest.raises(ValueError):
            forward_step(ds, [0, 1, 2], ST2Config(kappa=2.0), np.random.default_rng(0))

    def test_near_greedy_addition_is_exhaustively_optimal(self):
        config = ST2Config(kappa=NEAR_GREEDY)
        for seed in range(12):
            rng = np.random.default_rng(100 + seed)
            ds = random_dataset(rng, n=40, p=6, signal=3)
            current = [0] if seed % 2 else []
            pool = sorted(set(range(6)) - set(current))
            # twin generator reproduces the g drawn inside the step
            g = sample_group_size(len(pool), 0.5, np.random.default_rng(seed))
            new, accepted = forward_step(ds, current, config, np.random.default_rng(seed))
            best = min(aic(ds, sorted(current + list(grp)))
                       for grp in itertools.combinations(pool, g))
            if accepted:
                assert len(new) == len(current) + g
                np.testing.assert_allclose(aic(ds, new), best, rtol=1e-10)
                assert best < aic(ds, current)
            else:
                assert best >= aic(ds, current)


class TestBackwardStep:
    def test_noise_singleton_deleted(self):
        rng = np.random.default_rng(42)
        x = rng.standard_normal((200, 3))
        y = 2.0 * x[:, 0] + rng.standard_normal(200)
        ds = Dataset.from_xy(x, y)
        # dual route: deletion must mirror the direct AIC comparison
        assert aic(ds, []) < aic(ds, [2])
        new, accepted = backward_step(ds, [2], ST2Config(kappa=2.0), np.random.default_rng(7))
        assert accepted
        assert new.size == 0

    def test_empty_model_rejected_by_precondition(self):
        ds = random_dataset(np.random.default_rng(2), n=12, p=3)
        with pytest.raises(ValueError):
            backward_step(ds, [], ST2Config(kappa=2.0), np.random.default_rng(0))

    def test_near_greedy_deletion_is_exhaustively_optimal(self):
        config = ST2Config(kappa=NEAR_GREEDY)
        for seed in range(12):
            rng = np.random.default_rng(200 + seed)
            ds = random_dataset(rng, n=40, p=6, signal=2)
            current = [0, 1, 2, 3, 4]
            g = sample_group_size(len(current), 0.5, np.random.default_rng(seed))
            new, accepted = backward_step(ds, current, config, np.random.default_rng(seed))
            best = min(aic(ds, sorted(set(current) - set(grp)))
                       for grp in itertools.combinations(current, g))
            if accepted:
                assert len(new) == len(current) - g
                np.testing.assert_allclose(aic(ds, new), best, rtol=1e-10)
                assert best < aic(ds, current)
            else:
                assert best >= aic(ds, current)


class TestRunPath:
    def test_single_exact_predictor(self):
        x = np.linspace(-1.0, 1.0, 12).reshape(-1, 1)
        ds = Dataset.from_xy(x, 5.0 * x[:, 0])
        result = run_st2_path(ds, ST2Config(kappa=2.0), np.random.default_rng(0))
        np.testing.assert_array_equal(result.subset, [0])
        assert result.terminated_by == "converged"
        assert result.objective == aic(ds, [0])

    def test_accepted_moves_strictly_decrease_aic(self):
        # mirror the sweep loop so the intermediate objectives are visible
        config = ST2Config(kappa=2.0)
        for seed in range(6):
            ds = random_dataset(np.random.default_rng(300 + seed), n=35, p=7, signal=3)
            rng = np.random.default_rng(seed)
            evaluator = ModelEvaluator(ds)
            current = np.empty(0, dtype=np.intp)
            trace = [aic(ds, current)]
            for _ in range(config.max_sweeps):
                moved = False
                if current.size < ds.p:
                    current, accepted = forward_step(ds, current, config, rng, evaluator)
                    if accepted:
                        trace.append(aic(ds, current))
                        moved = True
                if current.size > 0:
                    current, accepted = backward_step(ds, current, config, rng, evaluator)
                    if accepted:
                        trace.append(aic(ds, current))
                        moved = True
                if not moved:
                    break
            assert all(b < a for a, b in zip(trace, trace[1:]))

    def test_reproducible_bit_identical(self):
        ds = random_dataset(np.random.default_rng(7), n=30, p=8, signal=3)
        config = ST2Config(kappa=3.0)
        first = run_st2_path(ds, config, np.random.default_rng(99))
        second = run_st2_path(ds, config, np.random.default_rng(99))
        np.testing.assert_array_equal(first.subset, second.subset)
        assert first.objective == second.objective
        assert first.sweeps == second.sweeps
        assert first.terminated_by == second.terminated_by

    def test_default_rng_comes_from_config_seed(self):
        ds = random_dataset(np.random.default_rng(8), n=30, p=6, signal=2)
        config = ST2Config(kappa=2.5, rng_seed=1234)
        auto = run_st2_path(ds, config)
        manual = run_st2_path(ds, config, np.random.default_rng(1234))
        np.testing.assert_array_equal(auto.subset, manual.subset)

    def test_subset_validity_fuzz(self):
        rng = np.random.default_rng(31)
        config = ST2Config(kappa=2.0)
        for _ in range(40):
            p = int(rng.integers(1, 9))
            ds = random_dataset(rng, n=25, p=p, signal=min(2, p))
            result = run_st2_path(ds, config, np.random.default_rng(int(rng.integers(1 << 30))))
            assert result.subset.size <= p
            assert len(set(result.subset.tolist())) == result.subset.size
            assert result.sweeps <= config.max_sweeps
            assert result.objective == aic(ds, result.subset)

    def test_guard_label_when_sweeps_exhausted(self):
        # with a single allowed sweep an improving first move ends as guard
        ds = random_dataset(np.random.default_rng(9), n=40, p=6, signal=3, sigma=0.1)
        result = run_st2_path(ds, ST2Config(kappa=2.0, max_sweeps=1), np.random.default_rng(0))
        assert result.sweeps == 1
        assert result.terminated_by == "guard"

    def test_termination_fuzz_converges(self):
        config = ST2Config(kappa=2.0, max_sweeps=200)
        rng = np.random.default_rng(55)
        for _ in range(100):
            p = int(rng.integers(1, 7))
            ds = random_dataset(rng, n=20, p=p, signal=min(2, p), sigma=float(rng.uniform(0.2, 3.0)))
            result = run_st2_path(ds, config, np.random.default_rng(int(rng.integers(1 << 30))))
            assert result.terminated_by == "converged"


class TestGlobalOptimumRate:
    """Frozen-seed comparison against the exhaustive best-subset oracle.

    With the eight-variable benchmark instance below (data seed 15) and
    path streams substream(123, i), 50 of 200 paths at kappa=e attain the
    global AIC optimum; the bar asserts the recorded rate with headroom.
    """

    def test_paths_bounded_by_and_sometimes_attain_best_subset(self):
        spec = builtin_scenario("benchmark8")
        ds = generate(spec, np.random.default_rng(15))
        best = min(
            aic(ds, list(s))
            for r in range(9)
            for s in itertools.combinations(range(8), r)
        )
        config = ST2Config(kappa=math.e)
        hits = 0
        for i in range(200):
            result = run_st2_path(ds, config, rng=substream(123, i))
            assert result.objective >= best - 1e-9
            if abs(result.objective - best) < 1e-9:
                hits += 1
        assert hits >= 45
