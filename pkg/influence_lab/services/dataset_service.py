"""
Dataset service: tabular and corpus ingestion, export and deterministic splits
"""

import csv
import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from influence_lab.core.config import settings
from influence_lab.core.exceptions import DataFormatError, NotFoundError, ValidationError
from influence_lab.schemas.dataset import LabeledDataset, SplitSpec, TextCorpus, TextDocument

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class DatasetService:
    """Service for reading, writing and splitting datasets"""

    def __init__(self, delimiter: Optional[str] = None):
        self.delimiter = delimiter or settings.DELIMITER

    def load_tabular(self, path: PathLike, has_header: bool = True) -> LabeledDataset:
        """Read a delimiter-separated file whose last column is the response"""
        path = Path(path)
        if not path.is_file():
            raise NotFoundError(f"data file not found: {path}")

        with path.open("r", encoding="utf-8-sig", newline="") as handle:
            rows = [row for row in csv.reader(handle, delimiter=self.delimiter) if row and any(c.strip() for c in row)]

        if not rows:
            raise DataFormatError(f"empty file: {path}")

        header: Optional[List[str]] = None
        if has_header:
            header = [name.strip() for name in rows[0]]
            rows = rows[1:]
        if not rows:
            raise DataFormatError("empty dataset")

        width = len(header) if header is not None else len(rows[0])
        if width < 2:
            raise DataFormatError("need at least one feature column and a response column")

        values = np.empty((len(rows), width), dtype=np.float64)
        first_data_row = 2 if has_header else 1
        for i, row in enumerate(rows):
            line = i + first_data_row
            if len(row) != width:
                raise DataFormatError(f"expected {width} columns, found {len(row)}", row=line)
            for j, cell in enumerate(row):
                values[i, j] = self._parse_cell(cell, line, j + 1)

        if header is None:
            header = [f"X{j + 1}" for j in range(width - 1)] + ["Y"]

        dataset = LabeledDataset(
            features=values[:, :-1],
            column_names=header[:-1],
            response=values[:, -1],
            response_name=header[-1],
        )
        logger.info(f"Loaded {path}: n={dataset.n}, p={dataset.p}, binary={dataset.is_binary}")
        return dataset

    @staticmethod
    def _parse_cell(cell: str, row: int, column: int) -> float:
        try:
            value = float(cell.strip())
        except ValueError:
            raise DataFormatError(f"non-numeric cell {cell!r}", row=row, column=column) from None
        if not math.isfinite(value):
            raise DataFormatError(f"non-finite cell {cell!r}", row=row, column=column)
        return value

    def write_tabular(self, ds: LabeledDataset, path: PathLike, has_header: bool = True) -> Path:
        """Write `ds` in the format `load_tabular` reads; floats use repr so values round-trip"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, delimiter=self.delimiter, lineterminator="\n")
            if has_header:
                writer.writerow(list(ds.column_names) + [ds.response_name])
            for features, response in zip(ds.features, ds.response):
                writer.writerow([repr(float(v)) for v in features] + [repr(float(response))])
        return path

    def load_text_corpus(self, root: PathLike) -> TextCorpus:
        """Read `<root>/pos/*.txt` (label 1) then `<root>/neg/*.txt` (label 0)"""
        root = Path(root)
        documents: List[TextDocument] = []
        for folder, label in (("pos", 1), ("neg", 0)):
            directory = root / folder
            if not directory.is_dir():
                raise NotFoundError(f"missing corpus subdirectory: {directory}")
            for file in sorted(directory.glob("*.txt"), key=lambda p: p.name):
                try:
                    text = file.read_text(encoding="utf-8")
                except (OSError, UnicodeDecodeError) as e:
                    logger.error(f"Error reading {file}: {e}")
                    raise DataFormatError(f"unreadable file {file}: {e}") from e
                if not text.strip():
                    logger.warning(f"Skipping blank document {file}")
                    continue
                documents.append(TextDocument(text=text, label=label, source=str(file)))

        if not documents:
            raise DataFormatError("empty corpus")
        corpus = TextCorpus(documents=tuple(documents))
        logger.info(f"Loaded corpus {root}: {len(corpus)} documents")
        return corpus

    def write_corpus(self, corpus: TextCorpus, root: PathLike) -> Path:
        """Write a corpus in the layout `load_text_corpus` reads"""
        root = Path(root)
        counters = {1: 0, 0: 0}
        for folder in ("pos", "neg"):
            (root / folder).mkdir(parents=True, exist_ok=True)
        for doc in corpus.documents:
            folder = "pos" if doc.label == 1 else "neg"
            (root / folder / f"{counters[doc.label]:06d}.txt").write_text(doc.text, encoding="utf-8")
            counters[doc.label] += 1
        return root

    def split(self, ds: LabeledDataset, spec: SplitSpec) -> Tuple[LabeledDataset, LabeledDataset]:
        """Partition rows into train (floor(n * fraction) rows) and test"""
        if ds.n < 2:
            raise ValidationError("split needs at least 2 observations")
        n_train = int(math.floor(ds.n * spec.train_fraction))
        if spec.shuffle:
            order = np.random.default_rng(spec.seed).permutation(ds.n)
        else:
            order = np.arange(ds.n)
        return self.take_rows(ds, order[:n_train]), self.take_rows(ds, order[n_train:])

    @staticmethod
    def take_rows(ds: LabeledDataset, rows: Sequence[int]) -> LabeledDataset:
        rows = np.asarray(rows, dtype=np.int64)
        return LabeledDataset(
            features=ds.features[rows],
            column_names=list(ds.column_names),
            response=ds.response[rows],
            response_name=ds.response_name,
        )

    @staticmethod
    def select_columns(ds: LabeledDataset, columns: Sequence[int]) -> LabeledDataset:
        columns = list(columns)
        for column in columns:
            if not 0 <= column < ds.p:
                raise ValidationError(f"column index {column} out of range for p={ds.p}")
        return LabeledDataset(
            features=ds.features[:, columns].reshape(ds.n, len(columns)),
            column_names=[ds.column_names[c] for c in columns],
            response=ds.response,
            response_name=ds.response_name,
        )

    @staticmethod
    def with_column(ds: LabeledDataset, name: str, values: Sequence[float]) -> LabeledDataset:
        """Append a column"""
        values = np.asarray(values, dtype=np.float64).reshape(-1, 1)
        if values.shape[0] != ds.n:
            raise ValidationError(f"column {name!r} has {values.shape[0]} values for {ds.n} rows")
        return LabeledDataset(
            features=np.hstack([ds.features, values]),
            column_names=list(ds.column_names) + [name],
            response=ds.response,
            response_name=ds.response_name,
        )

    @staticmethod
    def from_column(values: Sequence[float], response: Sequence[float], name: str = "X") -> LabeledDataset:
        """Single-column dataset"""
        values = np.asarray(values, dtype=np.float64).reshape(-1, 1)
        return LabeledDataset(features=values, column_names=[name], response=response)

    def resolve_columns(self, ds: LabeledDataset, names: Sequence[str]) -> List[int]:
        """Column names (or 1-based positions) to indices"""
        indices = []
        for name in names:
            if name in ds.column_names:
                indices.append(ds.column_index(name))
            elif name.isdigit() and 1 <= int(name) <= ds.p:
                indices.append(int(name) - 1)
            else:
                raise ValidationError(f"unknown column {name!r}")
        return indices
