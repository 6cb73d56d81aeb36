import numpy as np
import pytest

from influence_lab.schemas.dataset import LabeledDataset, TextCorpus, TextDocument


def make_xor(n: int = 2000, p: int = 10, seed: int = 0) -> LabeledDataset:
    rng = np.random.default_rng(seed)
    features = rng.integers(0, 2, size=(n, p)).astype(float)
    return LabeledDataset(
        features=features,
        column_names=[f"X{j + 1}" for j in range(p)],
        response=(features[:, 0] + features[:, 1]) % 2,
    )


def write_csv(path, header, rows):
    lines = [",".join(header)] if header else []
    lines += [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def xor_dataset() -> LabeledDataset:
    return make_xor()


@pytest.fixture
def small_xor() -> LabeledDataset:
    return make_xor(n=400, p=6, seed=3)


@pytest.fixture
def xor_csv(tmp_path, small_xor):
    rows = [list(map(int, x)) + [int(y)] for x, y in zip(small_xor.features, small_xor.response)]
    return write_csv(tmp_path / "xor.csv", small_xor.column_names + ["Y"], rows)


@pytest.fixture
def tiny_corpus() -> TextCorpus:
    texts = [
        ("a great movie, truly great", 1),
        ("great acting and a fine story", 1),
        ("loved it. great!", 1),
        ("a boring movie, truly boring", 0),
        ("poor acting and a dull story", 0),
        ("hated it. boring!", 0),
    ]
    return TextCorpus(documents=tuple(TextDocument(text=t, label=l) for t, l in texts))
