import csv

import numpy as np

from influence_lab.cli.main import main
from tests.conftest import write_csv


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


# -- iscore ------------------------------------------------------------------------------


def test_iscore_writes_marginal_and_subset_tables(tmp_path, xor_csv):
    out = tmp_path / "out"
    code = main(["iscore", "--data", str(xor_csv), "--subset", "X1,X2", "--out", str(out)])
    assert code == 0
    marginal = read_rows(out / "iscore_marginal.csv")
    assert len(marginal) == 1 + 6
    subset = read_rows(out / "iscore_subset.csv")
    assert subset[0] == ["subset", "raw", "normalized", "n", "cells"]
    assert subset[1][0] == "X1,X2"
    assert subset[1][3:] == ["400", "4"]


def test_iscore_flags_constant_columns(tmp_path):
    rng = np.random.default_rng(17)
    a, y = rng.integers(0, 2, 200), rng.integers(0, 2, 200)
    data = write_csv(tmp_path / "flat.csv", ["A", "C", "Y"], [[int(ai), 1, int(yi)] for ai, yi in zip(a, y)])
    out = tmp_path / "out"
    assert main(["iscore", "--data", str(data), "--out", str(out)]) == 0
    marginal = read_rows(out / "iscore_marginal.csv")
    assert marginal[0][-1] == "constant"
    flags = {row[2]: row[4] for row in marginal[1:]}
    assert flags == {"A": "0", "C": "1"}, f"constant flags {flags}"


def test_missing_data_file_is_a_usage_error(tmp_path, capsys):
    missing = tmp_path / "nowhere.csv"
    code = main(["iscore", "--data", str(missing), "--out", str(tmp_path / "out")])
    assert code == 2
    assert str(missing) in capsys.readouterr().err


def test_unknown_subset_column(tmp_path, xor_csv, capsys):
    code = main(["iscore", "--data", str(xor_csv), "--subset", "X1,Q", "--out", str(tmp_path / "out")])
    assert code == 2
    assert "'Q'" in capsys.readouterr().err


# -- bda ---------------------------------------------------------------------------------


def test_bda_finds_the_pair_and_is_reproducible(tmp_path, xor_csv):
    first, second = tmp_path / "first", tmp_path / "second"
    argv = ["bda", "--data", str(xor_csv), "--k", "3", "--draws", "50", "--seed", "11"]
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second), "--max-workers", "4"]) == 0
    assert read_rows(first / "bda_best.csv")[1][0] == "X1,X2"
    for name in ("bda_best.csv", "bda_traces.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes(), f"{name} differs between runs"


def test_bda_single_draw_of_one_column(tmp_path, xor_csv):
    out = tmp_path / "out"
    assert main(["bda", "--data", str(xor_csv), "--k", "1", "--draws", "1", "--out", str(out)]) == 0
    assert len(read_rows(out / "bda_traces.csv")) == 2


def test_bda_rejects_a_continuous_column(tmp_path, capsys):
    rng = np.random.default_rng(41)
    z, b, y = rng.normal(size=300), rng.integers(0, 2, 300), rng.integers(0, 2, 300)
    rows = [[f"{zi:.6f}", int(bi), int(yi)] for zi, bi, yi in zip(z, b, y)]
    data = write_csv(tmp_path / "mixed.csv", ["Z", "B", "Y"], rows)
    code = main(["bda", "--data", str(data), "--k", "2", "--draws", "3", "--out", str(tmp_path / "out")])
    assert code == 2
    assert "discretize" in capsys.readouterr().err


# -- configuration -----------------------------------------------------------------------


def test_flags_override_the_config_file(tmp_path, xor_csv):
    out = tmp_path / "out"
    config = tmp_path / "run.conf"
    config.write_text(f"data={xor_csv}\nk=2\ndraws=5\nseed=3\nout={out}\n", encoding="utf-8")
    assert main(["bda", "--config", str(config), "--draws", "3"]) == 0
    assert len(read_rows(out / "bda_traces.csv")) == 1 + 3 * 2


def test_missing_config_file(tmp_path, capsys):
    missing = tmp_path / "absent.conf"
    assert main(["toy", "--config", str(missing)]) == 2
    assert "config file not found" in capsys.readouterr().err


def test_misspelled_config_key(tmp_path, xor_csv, capsys):
    config = tmp_path / "run.conf"
    config.write_text(f"data={xor_csv}\ndrawz=5\n", encoding="utf-8")
    assert main(["bda", "--config", str(config), "--out", str(tmp_path / "out")]) == 2
    assert "drawz" in capsys.readouterr().err


def test_bad_global_values(tmp_path):
    assert main(["toy", "--seed", "-1", "--out", str(tmp_path)]) == 2
    assert main(["toy", "--log-level", "LOUD", "--out", str(tmp_path)]) == 2


def test_argparse_errors_return_their_code():
    assert main(["--version"]) == 0
    assert main(["no-such-command"]) == 2


# -- other commands ----------------------------------------------------------------------


def test_toy_command(tmp_path):
    out = tmp_path / "out"
    assert main(["toy", "--n", "200", "--p", "3", "--reps", "2", "--out", str(out)]) == 0
    rows = read_rows(out / "toy_report.csv")
    assert rows[0] == ["predictor", "group", "mean_auc", "sd_auc", "mean_iscore", "sd_iscore"]
    assert len(rows) == 1 + 3 + 7
    pair = next(row for row in rows if row[0] == "{X1,X2}")
    assert pair[2:4] == ["NA", "NA"]


def test_toy_rejects_an_odd_sample_size(tmp_path):
    assert main(["toy", "--n", "201", "--reps", "1", "--out", str(tmp_path)]) == 2


def test_discretize_command(tmp_path):
    rng = np.random.default_rng(42)
    z = rng.normal(size=200)
    y = (z > 0.3).astype(int)
    data = write_csv(tmp_path / "cont.csv", ["Z", "Y"], [[f"{a:.6f}", b] for a, b in zip(z, y)])
    out = tmp_path / "out"
    assert main(["discretize", "--data", str(data), "--out", str(out)]) == 0
    rules = read_rows(out / "rules.csv")
    assert rules[0] == ["column", "name", "threshold", "iscore"]
    assert abs(float(rules[1][2]) - z[z <= 0.3].max()) < 1e-6
    binarized = read_rows(out / "discretized.csv")
    assert {row[0] for row in binarized[1:]} == {"0.0", "1.0"}


def test_dagger_command(tmp_path, xor_csv):
    out = tmp_path / "out"
    assert main(["dagger", "--data", str(xor_csv), "--subset", "1,2", "--out", str(out)]) == 0
    summary = read_rows(out / "dagger_summary.csv")
    assert summary[1][:2] == ["train", "200"]
    assert summary[2][2] == "1"
    assert read_rows(out / "dagger_map.csv")[-1][:2] == ["*", "*"]
    assert "X_dagger" in read_rows(out / "dagger.csv")[0]


def test_train_command_ffn_and_rnn(tmp_path, xor_csv):
    for model in ("ffn", "rnn"):
        out = tmp_path / model
        argv = ["train", "--data", str(xor_csv), "--model", model, "--epochs", "3", "--hidden-width", "4"]
        assert main(argv + ["--top-fraction", "0.5", "--out", str(out)]) == 0
        assert len(read_rows(out / "curve.csv")) == 1 + 3
        metrics = dict(read_rows(out / "metrics.csv")[1:])
        assert "auc" in metrics and "accuracy" in metrics


def test_text_command_on_the_synthetic_corpus(tmp_path):
    out = tmp_path / "out"
    argv = [
        "text",
        "--synthetic-docs", "150",
        "--max-features", "40",
        "--epochs", "3",
        "--hidden-width", "3",
        "--arms", "full,gated,random",
        "--out", str(out),
    ]
    assert main(argv) == 0
    report = read_rows(out / "text_report.csv")
    assert [row[0] for row in report[1:]] == ["full", "gated", "random"]
    assert report[2][1] == report[3][1] == "4"
    assert len(read_rows(out / "curves" / "gated.csv")) == 1 + 3
    assert len(read_rows(out / "text_top_features.csv")) == 1 + 4
