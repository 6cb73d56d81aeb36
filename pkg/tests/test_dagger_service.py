import numpy as np
import pytest

from influence_lab.core.exceptions import ValidationError
from influence_lab.schemas.dataset import LabeledDataset, SplitSpec
from influence_lab.services.dagger_service import DaggerService
from influence_lab.services.dataset_service import DatasetService
from influence_lab.services.metrics_service import MetricsService


def test_fit_stores_training_local_means():
    train = LabeledDataset(
        features=[[0, 0], [0, 0], [0, 1], [1, 1]],
        column_names=["A", "B"],
        response=[1, 0, 1, 0],
    )
    dagger_map = DaggerService().fit_dagger(train, [0, 1])
    assert dagger_map.table == {(0.0, 0.0): 0.5, (0.0, 1.0): 1.0, (1.0, 1.0): 0.0}
    assert dagger_map.fallback == pytest.approx(0.5)
    assert dagger_map.subset_names == ("A", "B")


def test_unseen_cell_gets_the_training_mean():
    train = LabeledDataset(features=[[0], [0], [1]], column_names=["A"], response=[1, 1, 0])
    test = LabeledDataset(features=[[2], [1]], column_names=["A"], response=[0, 0])
    service = DaggerService()
    values = service.transform_dagger(service.fit_dagger(train, [0]), test)
    np.testing.assert_allclose(values, [2 / 3, 0.0])


def test_transform_ignores_the_response():
    train = LabeledDataset(features=[[0], [1], [1]], column_names=["A"], response=[0, 1, 1])
    service = DaggerService()
    dagger_map = service.fit_dagger(train, [0])
    flipped = LabeledDataset(features=train.features, column_names=["A"], response=1 - train.response)
    np.testing.assert_array_equal(service.transform_dagger(dagger_map, train), service.transform_dagger(dagger_map, flipped))


def test_dagger_on_xor_is_the_response(xor_dataset):
    train, test = DatasetService().split(xor_dataset, SplitSpec(train_fraction=0.5, shuffle=False))
    dagger_map, (test_values,) = DaggerService().fit_transform(train, [test], [0, 1])
    np.testing.assert_array_equal(test_values, test.response)
    assert MetricsService().roc_auc(test.response, test_values).auc == 1.0
    assert set(dagger_map.table.values()) == {0.0, 1.0}


def test_empty_subset_is_rejected(small_xor):
    with pytest.raises(ValidationError):
        DaggerService().fit_dagger(small_xor, [])


def test_missing_source_column(small_xor):
    service = DaggerService()
    dagger_map = service.fit_dagger(small_xor, [4, 5])
    narrow = DatasetService.select_columns(small_xor, [0, 1])
    with pytest.raises(ValidationError):
        service.transform_dagger(dagger_map, narrow)


def test_training_rows_average_back_to_their_dagger_value():
    rng = np.random.default_rng(25)
    train = LabeledDataset(
        features=rng.integers(0, 3, size=(300, 3)), column_names=["A", "B", "C"], response=rng.integers(0, 2, 300)
    )
    service = DaggerService()
    values = service.transform_dagger(service.fit_dagger(train, [0, 2]), train)
    for value in np.unique(values):
        group_mean = train.response[values == value].mean()
        assert group_mean == pytest.approx(value, abs=1e-12), f"rows with dagger {value} average {group_mean}"
