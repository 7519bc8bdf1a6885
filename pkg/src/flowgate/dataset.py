"""Immutable columnar datasets: schema, label encoding, descriptive statistics.

A table is a column-major collection of float64 feature arrays plus an int64
class-id vector. Transforms elsewhere in the package always build new tables;
arrays are marked read-only at construction so accidental mutation fails fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError

KIND_NUMERIC = "numeric"
KIND_CATEGORICAL = "categorical"
KIND_TIMESTAMP = "timestamp"
KIND_LABEL = "label"

COLUMN_KINDS = (KIND_NUMERIC, KIND_CATEGORICAL, KIND_TIMESTAMP, KIND_LABEL)


@dataclass(frozen=True)
class ColumnSchema:
    """Name, kind, and ordinal position of one column."""

    name: str
    kind: str
    index: int

    def __post_init__(self) -> None:
        if self.kind not in COLUMN_KINDS:
            raise DataError(f"unknown column kind {self.kind!r} for column {self.name!r}")
        if self.index < 0:
            raise DataError(f"column {self.name!r} has negative index {self.index}")


def validate_schema(schema: Sequence[ColumnSchema]) -> None:
    """Column names unique, exactly one label column."""
    names = [c.name for c in schema]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise DataError(f"duplicate column names: {dupes}")
    n_label = sum(1 for c in schema if c.kind == KIND_LABEL)
    if n_label != 1:
        raise DataError(f"schema needs exactly one label column, found {n_label}")


@dataclass(frozen=True)
class LabelEncoding:
    """Bijective mapping between class names and contiguous integer ids.

    The id of a class is its position in ``class_names``; ``counts`` holds the
    per-class row counts of the table the encoding was computed from.
    """

    class_names: tuple[str, ...]
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.class_names:
            raise DataError("label encoding needs at least one class")
        if len(set(self.class_names)) != len(self.class_names):
            raise DataError("class names must be unique")
        if len(self.counts) != len(self.class_names):
            raise DataError("counts and class_names length mismatch")
        if any(c < 0 for c in self.counts):
            raise DataError("class counts must be non-negative")

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def id_of(self, name: str) -> int:
        try:
            return self.class_names.index(name)
        except ValueError:
            raise DataError(f"unknown class name {name!r}") from None

    @classmethod
    def from_labels(cls, class_names: Sequence[str], labels: np.ndarray) -> "LabelEncoding":
        counts = np.bincount(labels, minlength=len(class_names)) if labels.size else np.zeros(
            len(class_names), dtype=np.int64
        )
        return cls(tuple(class_names), tuple(int(c) for c in counts))


class ColumnarTable:
    """Immutable column-major dataset with encoded labels.

    Parameters
    ----------
    schema:
        One entry per column including the label column; indices must be the
        contiguous range 0..len(schema)-1 in order.
    columns:
        Float64 arrays for every non-label column, in schema order.
    labels:
        Int64 class ids, one per row, each in [0, n_classes).
    encoding:
        Class-name mapping; per-class counts are recomputed from ``labels``.
    """

    __slots__ = ("schema", "columns", "labels", "encoding", "_matrix")

    def __init__(
        self,
        schema: Sequence[ColumnSchema],
        columns: Sequence[np.ndarray],
        labels: np.ndarray,
        encoding: LabelEncoding,
    ) -> None:
        schema = tuple(schema)
        validate_schema(schema)
        for pos, col in enumerate(schema):
            if col.index != pos:
                raise DataError(f"schema indices must be contiguous, column {col.name!r} at {pos}")
        feature_schema = tuple(c for c in schema if c.kind != KIND_LABEL)
        if len(columns) != len(feature_schema):
            raise DataError(
                f"expected {len(feature_schema)} feature columns, got {len(columns)}"
            )
        labels = np.asarray(labels, dtype=np.int64)
        if labels.ndim != 1:
            raise DataError("labels must be one-dimensional")
        frozen = []
        for col_schema, arr in zip(feature_schema, columns):
            arr = np.ascontiguousarray(arr, dtype=np.float64)
            if arr.shape != labels.shape:
                raise DataError(f"column {col_schema.name!r} length differs from labels")
            arr.setflags(write=False)
            frozen.append(arr)
        if labels.size and (labels.min() < 0 or labels.max() >= encoding.n_classes):
            raise DataError("label ids out of range for the encoding")
        labels.setflags(write=False)

        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "columns", tuple(frozen))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(
            self, "encoding", LabelEncoding.from_labels(encoding.class_names, labels)
        )
        object.__setattr__(self, "_matrix", None)

    def __setattr__(self, name: str, value) -> None:  # pragma: no cover - guard
        raise AttributeError("ColumnarTable is immutable")

    # -- shape ------------------------------------------------------------

    @property
    def n_rows(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_features(self) -> int:
        return len(self.columns)

    @property
    def n_classes(self) -> int:
        return self.encoding.n_classes

    @property
    def feature_schema(self) -> tuple[ColumnSchema, ...]:
        return tuple(c for c in self.schema if c.kind != KIND_LABEL)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.feature_schema)

    @property
    def label_name(self) -> str:
        return next(c.name for c in self.schema if c.kind == KIND_LABEL)

    def column(self, name: str) -> np.ndarray:
        for col_schema, arr in zip(self.feature_schema, self.columns):
            if col_schema.name == name:
                return arr
        raise DataError(f"no feature column named {name!r}")

    def feature_matrix(self) -> np.ndarray:
        """Row-major (n_rows, n_features) view of the feature columns."""
        if self._matrix is None:
            mat = (
                np.column_stack(self.columns)
                if self.columns
                else np.empty((self.n_rows, 0), dtype=np.float64)
            )
            mat.setflags(write=False)
            object.__setattr__(self, "_matrix", mat)
        return self._matrix

    # -- derivation helpers ------------------------------------------------

    def replace_columns(self, new_columns: Sequence[np.ndarray]) -> "ColumnarTable":
        """New table with the same schema/labels and substituted feature data."""
        return ColumnarTable(self.schema, new_columns, self.labels, self.encoding)

    def take_rows(self, indices: np.ndarray) -> "ColumnarTable":
        """New table holding the given rows (in the given order)."""
        indices = np.asarray(indices, dtype=np.int64)
        return ColumnarTable(
            self.schema,
            [col[indices] for col in self.columns],
            self.labels[indices],
            self.encoding,
        )


@dataclass(frozen=True)
class ColumnSummary:
    """Descriptive statistics for one column; stats are None for non-numeric kinds."""

    name: str
    kind: str
    distinct: int
    minimum: float | None = None
    maximum: float | None = None
    mean: float | None = None
    std: float | None = None


@dataclass(frozen=True)
class DatasetSummary:
    n_rows: int
    n_features: int
    columns: tuple[ColumnSummary, ...]

    def column(self, name: str) -> ColumnSummary:
        for col in self.columns:
            if col.name == name:
                return col
        raise DataError(f"no summary for column {name!r}")


def column_stats(table: ColumnarTable) -> DatasetSummary:
    """Per-column min/max/mean/sample-std (ddof=1) and distinct counts.

    The sample standard deviation of a single row is taken as 0.0. Categorical
    columns report only their distinct-code count; the label column reports
    the number of observed classes.
    """
    if table.n_rows == 0:
        raise DataError("empty dataset")
    entries = []
    for col_schema, arr in zip(table.feature_schema, table.columns):
        distinct = int(np.unique(arr).size)
        if col_schema.kind in (KIND_NUMERIC, KIND_TIMESTAMP):
            std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
            entries.append(
                ColumnSummary(
                    name=col_schema.name,
                    kind=col_schema.kind,
                    distinct=distinct,
                    minimum=float(arr.min()),
                    maximum=float(arr.max()),
                    mean=float(arr.mean()),
                    std=std,
                )
            )
        else:
            entries.append(
                ColumnSummary(name=col_schema.name, kind=col_schema.kind, distinct=distinct)
            )
    entries.append(
        ColumnSummary(
            name=table.label_name,
            kind=KIND_LABEL,
            distinct=int(np.unique(table.labels).size),
        )
    )
    return DatasetSummary(table.n_rows, table.n_features, tuple(entries))


def _row_code_matrix(table: ColumnarTable) -> np.ndarray:
    """uint64 matrix whose rows are equal iff table rows are bitwise equal."""
    parts = [col.view(np.uint64) for col in table.columns]
    parts.append(table.labels.astype(np.uint64))
    return np.column_stack(parts)


def count_unique_rows(table: ColumnarTable) -> int:
    """Number of distinct (features, label) row tuples, by bitwise equality."""
    if table.n_rows == 0:
        return 0
    codes = _row_code_matrix(table)
    return int(np.unique(codes, axis=0).shape[0])


def class_distribution(table: ColumnarTable) -> list[tuple[str, int, float]]:
    """(class name, count, count/n_rows) for every class in id order."""
    if table.n_rows == 0:
        raise DataError("empty dataset")
    n = table.n_rows
    return [
        (name, count, count / n)
        for name, count in zip(table.encoding.class_names, table.encoding.counts)
    ]
