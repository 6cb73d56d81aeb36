import math

import numpy as np
import pytest

from influence_lab.core.exceptions import ConstantColumnError, NonDiscreteColumnError, ValidationError
from influence_lab.schemas.dataset import LabeledDataset
from influence_lab.schemas.screening import BdaConfig
from influence_lab.services.influence_service import InfluenceService
from influence_lab.services.screening_service import ScreeningService
from tests.conftest import make_xor


def exhaustive_best(x: np.ndarray, y: np.ndarray) -> float:
    service = InfluenceService()
    return max(service.iscore_for_column((x > t).astype(float), y).normalized for t in np.unique(x))


# -- discretization ----------------------------------------------------------------------


def test_discretize_finds_the_separating_threshold():
    x = np.array([0.1, 0.4, 0.35, 0.8, 0.9, 0.7])
    y = np.array([0, 0, 0, 1, 1, 1])
    ds = LabeledDataset(features=x.reshape(-1, 1), column_names=["Z"], response=y)
    rule = ScreeningService().discretize(ds, 0)
    assert rule.threshold == pytest.approx(0.4)
    assert rule.iscore_at_best == pytest.approx(3.0)


def test_discretize_attains_the_exhaustive_maximum():
    rng = np.random.default_rng(31)
    service = ScreeningService()
    for _ in range(100):
        n = int(rng.integers(4, 100))
        x = rng.integers(0, 30, n).astype(float) / 3.0
        y = rng.integers(0, 2, n).astype(float)
        if np.unique(x).size < 2 or y.min() == y.max():
            continue
        ds = LabeledDataset(features=x.reshape(-1, 1), column_names=["Z"], response=y)
        rule = service.discretize(ds, 0)
        assert rule.iscore_at_best == pytest.approx(exhaustive_best(x, y), rel=1e-9, abs=1e-12)


def test_discretize_ties_pick_the_smallest_threshold():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    y = np.array([1.0, 0.0, 0.0, 1.0])
    ds = LabeledDataset(features=x.reshape(-1, 1), column_names=["Z"], response=y)
    _, scores = ScreeningService().threshold_scores(ds, 0)
    rule = ScreeningService().discretize(ds, 0)
    assert rule.threshold == float(x[int(np.argmax(scores))])


def test_discretize_constant_column():
    ds = LabeledDataset(features=[[1.0], [1.0]], column_names=["Z"], response=[0, 1])
    with pytest.raises(ConstantColumnError):
        ScreeningService().discretize(ds, 0)


def test_discretize_all_skips_constant_columns():
    rng = np.random.default_rng(32)
    features = np.column_stack([rng.normal(size=50), np.ones(50)])
    ds = LabeledDataset(features=features, column_names=["Z", "C"], response=rng.integers(0, 2, 50))
    rules, binarized = ScreeningService().discretize_all(ds)
    assert [rule.column_name for rule in rules] == ["Z"]
    assert set(np.unique(binarized.features[:, 0])) <= {0.0, 1.0}
    np.testing.assert_array_equal(binarized.features[:, 1], 1.0)


# -- backward dropping -------------------------------------------------------------------


def test_bda_steps_are_recomputable(small_xor):
    service = ScreeningService()
    influence = InfluenceService()
    trace = service.bda_run(small_xor, [0, 1, 3, 4])
    assert len(trace.steps) == 4
    for step in trace.steps:
        expected = influence.score_subset(small_xor, step.subset).normalized
        assert step.score == expected, f"step {step.subset} recorded {step.score}, recomputed {expected}"
    assert trace.return_set == (0, 1)


def test_bda_single_variable_is_one_step(small_xor):
    trace = ScreeningService().bda_run(small_xor, [2])
    assert len(trace.steps) == 1
    assert trace.return_set == (2,)


def test_bda_rejects_continuous_columns():
    rng = np.random.default_rng(33)
    ds = LabeledDataset(
        features=rng.normal(size=(200, 2)), column_names=["A", "B"], response=rng.integers(0, 2, 200)
    )
    with pytest.raises(NonDiscreteColumnError):
        ScreeningService().bda_run(ds, [0, 1])


def test_bda_search_is_deterministic(small_xor):
    cfg = BdaConfig(subset_size=3, num_draws=10, seed=4)
    first = ScreeningService().bda_search(small_xor, cfg)
    second = ScreeningService(max_workers=4).bda_search(small_xor, cfg)
    assert [t.model_dump() for t in first] == [t.model_dump() for t in second]


def test_bda_search_rejects_oversized_subsets(small_xor):
    with pytest.raises(ValidationError):
        ScreeningService().bda_search(small_xor, BdaConfig(subset_size=7, num_draws=1))


@pytest.mark.parametrize("subset_size, num_draws", [(3, 100), (4, 50), (5, 50)])
def test_bda_recovers_the_xor_pair(subset_size, num_draws):
    successes = 0
    for seed in range(20):
        ds = make_xor(n=1000, p=10, seed=100 + seed)
        cfg = BdaConfig(subset_size=subset_size, num_draws=num_draws, seed=seed)
        successes += ScreeningService().bda_search(ds, cfg)[0].return_set == (0, 1)
    assert successes >= 19, f"XOR pair recovered in {successes}/20 seeds at k={subset_size}"


def null_dataset(rng, n: int = 2000, p: int = 10) -> LabeledDataset:
    return LabeledDataset(
        features=rng.integers(0, 2, size=(n, p)).astype(float),
        column_names=[f"X{j + 1}" for j in range(p)],
        response=rng.integers(0, 2, n),
    )


@pytest.mark.slow
def test_bda_return_gain_stays_within_the_null_spread():
    rng = np.random.default_rng(34)
    service = ScreeningService()
    initial, returned = [], []
    for _ in range(1000):
        ds = null_dataset(rng)
        trace = service.bda_run(ds, sorted(rng.choice(ds.p, size=4, replace=False).tolist()))
        initial.append(trace.steps[0].score)
        returned.append(trace.return_score)
    gain = np.mean(returned) - np.mean(initial)
    ceiling = np.percentile(initial, 99)
    assert gain <= ceiling, f"mean return gain {gain:.4f} above the null 99th percentile {ceiling:.4f}"


@pytest.mark.slow
def test_dropping_a_random_variable_lowers_the_mean_null_score():
    rng = np.random.default_rng(36)
    influence = InfluenceService()
    full, dropped = [], []
    for _ in range(1000):
        ds = null_dataset(rng)
        subset = sorted(rng.choice(ds.p, size=4, replace=False).tolist())
        kept = [c for c in subset if c != subset[int(rng.integers(0, 4))]]
        full.append(influence.score_subset(ds, subset).normalized)
        dropped.append(influence.score_subset(ds, kept).normalized)
    # about 1 - 2**-4 before the drop and 1 - 2**-3 after
    assert np.mean(dropped) < np.mean(full), f"mean {np.mean(dropped):.4f} after dropping vs {np.mean(full):.4f}"


@pytest.mark.slow
def test_null_singletons_score_below_three():
    rng = np.random.default_rng(35)
    service = InfluenceService()
    scores = [
        service.iscore_for_column(rng.integers(0, 2, 2000), rng.integers(0, 2, 2000)).normalized
        for _ in range(1000)
    ]
    assert np.mean(scores) < 3


# -- ranking and gating ------------------------------------------------------------------


def test_rank_marginal_orders_by_score_then_column(small_xor):
    ranked = ScreeningService().rank_marginal(small_xor)
    scores = [fs.score for fs in ranked]
    assert scores == sorted(scores, reverse=True)
    assert {fs.column for fs in ranked} == set(range(small_xor.p))


def test_gate_keeps_the_rounded_up_share():
    scores = list(np.linspace(0.0, 1.0, 400))
    gate = ScreeningService().gate_threshold(scores, 0.075)
    assert gate.kept_count == 30
    assert gate.kept == list(range(370, 400))


def test_gate_threshold_separates_distinct_scores():
    scores = [0.5, 3.0, 1.0, 2.0, 0.1]
    gate = ScreeningService().gate_threshold(scores, 0.4)
    assert gate.mask == [False, True, False, True, False]
    assert gate.threshold == 1.0
    assert all(m == (s > gate.threshold) for s, m in zip(scores, gate.mask))


def test_gate_breaks_ties_by_column_index():
    gate = ScreeningService().gate_threshold([2.5] * 7, 0.3)
    assert gate.kept_count == 3
    assert gate.kept == [0, 1, 2], f"kept {gate.kept}"


def test_gate_keeps_everything_at_fraction_one():
    gate = ScreeningService().gate_threshold([0.2, 0.1, 0.3], 1.0)
    assert all(gate.mask)
    assert gate.threshold == -math.inf


def test_gate_rejects_bad_fraction():
    with pytest.raises(ValidationError):
        ScreeningService().gate_threshold([1.0, 2.0], 0.0)


def test_rank_top_k():
    gate = ScreeningService().rank_top_k([0.5, 3.0, 1.0, 2.0], 2)
    assert gate.kept == [1, 3]
    assert ScreeningService().rank_top_k([0.5, 3.0], 5).kept_count == 2
