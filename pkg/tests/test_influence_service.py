import numpy as np
import pytest

from influence_lab.core.exceptions import ConstantResponseError, ValidationError
from influence_lab.schemas.dataset import LabeledDataset
from influence_lab.schemas.metrics import ConfusionTable
from influence_lab.services.influence_service import InfluenceService
from influence_lab.services.partition_service import PartitionService


def brute_force_iscore(x: np.ndarray, y: np.ndarray) -> float:
    """sum_j n_j^2 (Ybar_j - Ybar)^2 straight from the definition"""
    total = 0.0
    for key in {tuple(row) for row in x}:
        rows = np.all(x == np.array(key), axis=1)
        total += rows.sum() ** 2 * (y[rows].mean() - y.mean()) ** 2
    return total


def test_raw_matches_definition():
    rng = np.random.default_rng(11)
    service = InfluenceService()
    for _ in range(50):
        n = int(rng.integers(4, 80))
        x = rng.integers(0, 3, size=(n, 2)).astype(float)
        y = rng.integers(0, 2, n).astype(float)
        ds = LabeledDataset(features=x, column_names=["A", "B"], response=y)
        table = PartitionService().build_partitions(ds, [0, 1])
        assert service.iscore_raw(table) == pytest.approx(brute_force_iscore(x, y), rel=1e-9, abs=1e-9)


def test_deviation_form_equals_raw_exactly():
    rng = np.random.default_rng(12)
    service = InfluenceService()
    for _ in range(100):
        n = int(rng.integers(2, 60))
        ds = LabeledDataset(
            features=rng.integers(0, 2, size=(n, 3)),
            column_names=["A", "B", "C"],
            response=rng.integers(0, 2, n),
        )
        table = PartitionService().build_partitions(ds, [0, 1, 2])
        assert service.iscore_deviation_form(table) == service.iscore_raw(table)


def test_deviation_form_needs_binary_response():
    ds = LabeledDataset(features=[[0], [1], [1]], column_names=["A"], response=[0.5, 2.0, 1.0])
    table = PartitionService().build_partitions(ds, [0])
    with pytest.raises(ValidationError):
        InfluenceService().iscore_deviation_form(table)


def test_normalized_true_xor_partition(xor_dataset):
    y = xor_dataset.response
    n1 = y.sum()
    n = xor_dataset.n
    result = InfluenceService().iscore_for_column(y, y)
    assert result.normalized == pytest.approx(2 * n1 * (n - n1) / n, rel=1e-12)


def test_pair_partition_near_500(xor_dataset):
    result = InfluenceService().score_subset(xor_dataset, [0, 1])
    assert result.cell_count == 4
    assert result.normalized == pytest.approx(500, abs=15)


def test_uninformative_column_scores_low():
    x = np.array([0, 0, 1, 1] * 50, dtype=float)
    y = np.array([0, 1, 0, 1] * 50, dtype=float)
    assert InfluenceService().iscore_for_column(x, y).normalized == pytest.approx(0.0, abs=1e-12)


def test_constant_column_scores_zero():
    y = np.array([0, 1, 1, 0], dtype=float)
    assert InfluenceService().iscore_for_column(np.ones(4), y).raw == 0.0


def test_constant_response_is_an_error():
    with pytest.raises(ConstantResponseError):
        InfluenceService().iscore_for_column([0, 1, 0, 1], [1, 1, 1, 1])


def test_confusion_form_matches_partition_form():
    rng = np.random.default_rng(13)
    service = InfluenceService()
    for _ in range(200):
        a = rng.integers(0, 125, size=4)
        if a[0] + a[1] == 0:
            a[0] = 1
        ct = ConfusionTable(alpha1=int(a[0]), alpha2=int(a[1]), alpha3=int(a[2]), alpha4=int(a[3]))
        y = np.repeat([1.0, 1.0, 0.0, 0.0], a)
        yhat = np.repeat([1.0, 0.0, 1.0, 0.0], a)
        table = PartitionService.partition_codes(yhat, y)
        assert service.iscore_from_confusion(ct) == pytest.approx(service.iscore_raw(table), abs=1e-9, rel=1e-12)


def test_confusion_parts_sum_to_total():
    ct = ConfusionTable(alpha1=40, alpha2=10, alpha3=5, alpha4=45)
    parts = InfluenceService().iscore_confusion_parts(ct)
    assert parts.total == pytest.approx(parts.predicted_positive + parts.predicted_negative)
    # a1 - (a1+a3)(a1+a2)/n = 40 - 45*50/100
    assert parts.predicted_positive == pytest.approx(17.5**2)


def test_confusion_form_needs_positives():
    with pytest.raises(ValidationError):
        InfluenceService().iscore_from_confusion(ConfusionTable(alpha1=0, alpha2=0, alpha3=3, alpha4=4))


def test_duplicating_observations_doubles_the_normalized_score(small_xor):
    service = InfluenceService()
    doubled = LabeledDataset(
        features=np.vstack([small_xor.features, small_xor.features]),
        column_names=small_xor.column_names,
        response=np.concatenate([small_xor.response, small_xor.response]),
    )
    for subset in ([0], [0, 2], [0, 1, 3]):
        once, twice = service.score_subset(small_xor, subset), service.score_subset(doubled, subset)
        assert twice.normalized == pytest.approx(2 * once.normalized, rel=1e-12), f"subset {subset}"
        assert twice.raw == pytest.approx(4 * once.raw, rel=1e-12), f"subset {subset}"
