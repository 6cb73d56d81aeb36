import csv
import math

from influence_lab.schemas.dataset import SplitSpec
from influence_lab.schemas.neural import TrainConfig
from influence_lab.schemas.screening import BdaConfig
from influence_lab.services.dagger_service import DaggerService
from influence_lab.services.dataset_service import DatasetService
from influence_lab.services.neural_service import NeuralService
from influence_lab.services.report_service import ReportService
from influence_lab.services.screening_service import ScreeningService


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


def test_format_cell(tmp_path):
    reports = ReportService(tmp_path)
    assert reports.format_cell(None) == "NA"
    assert reports.format_cell(True) == "1"
    assert reports.format_cell(math.inf) == "inf"
    assert reports.format_cell(-math.inf) == "-inf"
    assert reports.format_cell(1 / 3) == "0.3333333333"
    assert reports.format_cell(7) == "7"


def test_write_table_creates_nested_directories(tmp_path):
    path = ReportService(tmp_path).write_table("a/b/table.csv", ["x", "y"], [[1, None], [2.5, "z"]])
    assert path == tmp_path / "a" / "b" / "table.csv"
    assert path.read_text(encoding="utf-8") == "x,y\n1,NA\n2.5,z\n"


def test_marginal_table_uses_one_based_columns(tmp_path, small_xor):
    ranked = ScreeningService().rank_marginal(small_xor)
    rows = read_rows(ReportService(tmp_path).write_marginal(ranked, constant={2}))
    assert rows[0] == ["rank", "column", "name", "score", "constant"]
    flags = {row[1]: row[4] for row in rows[1:]}
    assert flags["3"] == "1" and flags["1"] == "0", f"constant flags {flags}"
    assert len(rows) == small_xor.p + 1
    assert rows[1][0] == "1"
    assert {row[1] for row in rows[1:]} == {str(j) for j in range(1, small_xor.p + 1)}


def test_bda_best_quotes_the_return_set(tmp_path, small_xor):
    traces = ScreeningService().bda_search(small_xor, BdaConfig(subset_size=3, num_draws=50, seed=1))
    path = ReportService(tmp_path).write_bda_best(traces, small_xor.column_names)
    assert path.read_text(encoding="utf-8").splitlines()[1].startswith('"X1,X2",')
    rows = read_rows(path)
    assert rows[1][0] == "X1,X2"
    assert len(rows) == 51


def test_bda_traces_list_every_step(tmp_path, small_xor):
    traces = ScreeningService().bda_search(small_xor, BdaConfig(subset_size=3, num_draws=4, seed=2))
    rows = read_rows(ReportService(tmp_path).write_bda_traces(traces, small_xor.column_names))
    assert rows[0] == ["draw", "step", "subset", "score"]
    assert len(rows) == 1 + 4 * 3
    assert [row[0] for row in rows[1:]] == sorted(row[0] for row in rows[1:])


def test_dagger_map_ends_with_the_fallback(tmp_path, small_xor):
    dagger_map = DaggerService().fit_dagger(small_xor, [0, 1])
    rows = read_rows(ReportService(tmp_path).write_dagger_map(dagger_map))
    assert rows[0] == ["X1", "X2", "dagger"]
    assert rows[-1][:2] == ["*", "*"]
    assert len(rows) == 1 + 4 + 1


def test_curve_file(tmp_path, small_xor):
    train, val = DatasetService().split(small_xor, SplitSpec(train_fraction=0.5, seed=3))
    _, curve = NeuralService().train_ffn(train, val, 3, TrainConfig(eta=0.5, epochs=4, seed=1))
    rows = read_rows(ReportService(tmp_path).write_curve(curve, "curve.csv"))
    assert rows[0] == ["epoch", "train_loss", "val_loss", "train_auc", "val_auc"]
    assert [row[0] for row in rows[1:]] == ["1", "2", "3", "4"]
