"""CSV ingestion and the fixed cleaning pipeline.

Stage order is fixed: load -> merge_timestamps -> drop_columns_by_name ->
drop_invalid_rows -> drop_duplicate_rows -> drop_zero_variance_columns ->
encode_categoricals -> minmax_normalize -> stratified_split. Each stage is
also usable on its own; the pipeline accumulates a PrepReport entry per stage
so zero-effect stages remain visible.
"""

from __future__ import annotations

import calendar
import csv
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import (
    KIND_CATEGORICAL,
    KIND_LABEL,
    KIND_NUMERIC,
    KIND_TIMESTAMP,
    ColumnSchema,
    ColumnarTable,
    LabelEncoding,
    validate_schema,
)
from .errors import DataError
from .profiles import DatasetProfile

FIT_FULL_DATASET = "full_dataset"
FIT_TRAIN_ONLY = "train_only"

STAGE_LOAD = "load"
STAGE_MERGE = "merge_timestamps"
STAGE_DROP_COLUMNS = "drop_columns"
STAGE_DROP_INVALID = "drop_invalid_rows"
STAGE_DROP_DUPLICATES = "drop_duplicate_rows"
STAGE_DROP_ZERO_VARIANCE = "drop_zero_variance_columns"
STAGE_ENCODE = "encode"
STAGE_NORMALIZE = "normalize"
STAGE_SPLIT = "split"


class RawTable:
    """Pre-encoding table: float64 arrays for numeric/timestamp columns,
    string token arrays for categorical and label columns."""

    __slots__ = ("schema", "cells")

    def __init__(self, schema: Sequence[ColumnSchema], cells: Sequence[np.ndarray]) -> None:
        schema = tuple(schema)
        validate_schema(schema)
        if len(cells) != len(schema):
            raise DataError(f"expected {len(schema)} columns of cells, got {len(cells)}")
        n_rows = None
        frozen = []
        for col, arr in zip(schema, cells):
            if col.kind in (KIND_NUMERIC, KIND_TIMESTAMP):
                arr = np.ascontiguousarray(arr, dtype=np.float64)
            else:
                arr = np.asarray(arr, dtype=object)
            if arr.ndim != 1:
                raise DataError(f"column {col.name!r} must be one-dimensional")
            if n_rows is None:
                n_rows = arr.shape[0]
            elif arr.shape[0] != n_rows:
                raise DataError(f"column {col.name!r} length differs from the others")
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "cells", tuple(frozen))

    def __setattr__(self, name: str, value) -> None:  # pragma: no cover - guard
        raise AttributeError("RawTable is immutable")

    @property
    def n_rows(self) -> int:
        return int(self.cells[0].shape[0]) if self.cells else 0

    @property
    def n_columns(self) -> int:
        return len(self.schema)

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.schema)

    @property
    def label_name(self) -> str:
        return next(c.name for c in self.schema if c.kind == KIND_LABEL)

    def column(self, name: str) -> np.ndarray:
        for col, arr in zip(self.schema, self.cells):
            if col.name == name:
                return arr
        raise DataError(f"no column named {name!r}")

    def kind_of(self, name: str) -> str:
        for col in self.schema:
            if col.name == name:
                return col.kind
        raise DataError(f"no column named {name!r}")

    def take_rows(self, indices: np.ndarray) -> "RawTable":
        indices = np.asarray(indices, dtype=np.int64)
        return RawTable(self.schema, [arr[indices] for arr in self.cells])

    def without_columns(self, names: set[str]) -> "RawTable":
        kept = [(c, a) for c, a in zip(self.schema, self.cells) if c.name not in names]
        schema = [
            ColumnSchema(c.name, c.kind, pos) for pos, (c, _) in enumerate(kept)
        ]
        return RawTable(schema, [a for _, a in kept])


@dataclass(frozen=True)
class PrepEntry:
    stage: str
    rows_before: int
    rows_after: int
    columns_before: int
    columns_after: int
    details: str = ""

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "rows_before": self.rows_before,
            "rows_after": self.rows_after,
            "columns_before": self.columns_before,
            "columns_after": self.columns_after,
            "details": self.details,
        }


@dataclass
class PrepReport:
    entries: list[PrepEntry] = field(default_factory=list)

    def add(self, entry: PrepEntry) -> None:
        self.entries.append(entry)

    def stage(self, name: str) -> PrepEntry:
        for entry in self.entries:
            if entry.stage == name:
                return entry
        raise DataError(f"no report entry for stage {name!r}")

    def rows_removed(self, name: str) -> int:
        entry = self.stage(name)
        return entry.rows_before - entry.rows_after

    def columns_removed(self, name: str) -> int:
        entry = self.stage(name)
        return entry.columns_before - entry.columns_after

    def to_dicts(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]

    def to_lines(self) -> list[str]:
        lines = []
        for e in self.entries:
            lines.append(
                f"{e.stage}: rows {e.rows_before} -> {e.rows_after}, "
                f"columns {e.columns_before} -> {e.columns_after}"
                + (f" ({e.details})" if e.details else "")
            )
        return lines


@dataclass(frozen=True)
class NormalizationStats:
    """Per-feature min/max fitted by minmax_normalize."""

    feature_names: tuple[str, ...]
    minimums: np.ndarray
    maximums: np.ndarray
    fit_scope: str

    def __post_init__(self) -> None:
        mins = np.ascontiguousarray(self.minimums, dtype=np.float64)
        maxs = np.ascontiguousarray(self.maximums, dtype=np.float64)
        if mins.shape != (len(self.feature_names),) or maxs.shape != mins.shape:
            raise DataError("normalization stats shape mismatch")
        if np.any(mins > maxs):
            raise DataError("normalization stats require min <= max per feature")
        mins.setflags(write=False)
        maxs.setflags(write=False)
        object.__setattr__(self, "minimums", mins)
        object.__setattr__(self, "maximums", maxs)


@dataclass(frozen=True)
class SplitPair:
    train: ColumnarTable
    test: ColumnarTable
    ratio: float
    seed: int


@dataclass(frozen=True)
class PrepOptions:
    split_ratio: float = 0.8
    seed: int = 0
    fit_scope: str = FIT_FULL_DATASET

    def __post_init__(self) -> None:
        if not 0.0 < self.split_ratio < 1.0:
            raise DataError(f"split_ratio must be in (0, 1), got {self.split_ratio}")
        if self.fit_scope not in (FIT_FULL_DATASET, FIT_TRAIN_ONLY):
            raise DataError(f"unknown fit_scope {self.fit_scope!r}")


# -- load --------------------------------------------------------------------


def _parse_cell(token: str) -> float:
    # Empty cells read as NaN; float() already accepts Infinity/-Infinity/NaN
    # spellings case-insensitively.
    if token == "":
        return float("nan")
    return float(token)


def load_csv(path: str | Path, profile: DatasetProfile) -> RawTable:
    """Read an RFC-4180 CSV with a header row into a RawTable.

    A column becomes numeric when every cell parses as a 64-bit real
    (empty -> NaN, Infinity/-Infinity -> signed infinities); otherwise its
    original tokens are kept as a categorical column. The profile's label
    column is always kept as tokens. Ragged rows raise an error naming the
    1-based line number.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing file: {path}")
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        width = len(header)
        columns: list[list[str]] = [[] for _ in range(width)]
        for lineno, row in enumerate(reader, start=2):
            if len(row) != width:
                raise DataError(
                    f"{path}: line {lineno}: expected {width} fields, found {len(row)}"
                )
            for i, token in enumerate(row):
                columns[i].append(token)
    if len(set(header)) != len(header):
        raise DataError(f"{path}: duplicate header names")
    if profile.label_column not in header:
        raise DataError(f"{path}: label column {profile.label_column!r} not present")

    schema: list[ColumnSchema] = []
    cells: list[np.ndarray] = []
    for idx, name in enumerate(header):
        tokens = columns[idx]
        if name == profile.label_column:
            schema.append(ColumnSchema(name, KIND_LABEL, idx))
            cells.append(np.asarray(tokens, dtype=object))
            continue
        try:
            values = np.asarray([_parse_cell(t) for t in tokens], dtype=np.float64)
        except ValueError:
            schema.append(ColumnSchema(name, KIND_CATEGORICAL, idx))
            cells.append(np.asarray(tokens, dtype=object))
        else:
            schema.append(ColumnSchema(name, KIND_NUMERIC, idx))
            cells.append(values)
    return RawTable(schema, cells)


# -- timestamp merge -----------------------------------------------------------


def _epoch_seconds(component_arrays: list[np.ndarray], names: Sequence[str]) -> np.ndarray:
    """Calendar components (year..second, UTC) to integral epoch seconds."""
    n = component_arrays[0].shape[0]
    out = np.empty(n, dtype=np.float64)
    cache: dict[tuple[int, ...], float] = {}
    for row in range(n):
        parts = []
        for arr, name in zip(component_arrays, names):
            value = arr[row]
            if not np.isfinite(value) or value != int(value):
                raise DataError(
                    f"row {row}: timestamp component {name!r} must be an integer, got {value!r}"
                )
            parts.append(int(value))
        key = tuple(parts)
        seconds = cache.get(key)
        if seconds is None:
            try:
                stamp = datetime(*key)
            except ValueError as exc:
                raise DataError(f"row {row}: invalid timestamp components {key}: {exc}") from exc
            seconds = float(calendar.timegm(stamp.timetuple()))
            cache[key] = seconds
        out[row] = seconds
    return out


def merge_timestamps(raw: RawTable, profile: DatasetProfile) -> RawTable:
    """Fold calendar component columns into epoch-seconds columns.

    The merged column replaces the first component column positionally; the
    remaining components are dropped. Without a configured merge the table is
    returned unchanged.
    """
    merge = profile.timestamp_merge
    if merge is None:
        return raw
    new_names = {"stimestamp": merge.start_columns, "etimestamp": merge.end_columns}
    merged: dict[str, np.ndarray] = {}
    for new_name, component_names in new_names.items():
        arrays = []
        for name in component_names:
            if name not in raw.column_names:
                raise DataError(f"timestamp component column {name!r} not present")
            if raw.kind_of(name) not in (KIND_NUMERIC, KIND_TIMESTAMP):
                raise DataError(f"timestamp component column {name!r} is not numeric")
            arrays.append(raw.column(name))
        merged[new_name] = _epoch_seconds(arrays, component_names)

    component_set = set(merge.start_columns) | set(merge.end_columns)
    first_of = {
        "stimestamp": merge.start_columns[0],
        "etimestamp": merge.end_columns[0],
    }
    schema: list[ColumnSchema] = []
    cells: list[np.ndarray] = []
    for col, arr in zip(raw.schema, raw.cells):
        if col.name in component_set:
            for new_name, anchor in first_of.items():
                if col.name == anchor:
                    schema.append(ColumnSchema(new_name, KIND_TIMESTAMP, len(schema)))
                    cells.append(merged[new_name])
            continue
        schema.append(ColumnSchema(col.name, col.kind, len(schema)))
        cells.append(arr)
    return RawTable(schema, cells)


# -- column drops -------------------------------------------------------------


def drop_columns_by_name(
    raw: RawTable, names: Sequence[str]
) -> tuple[RawTable, PrepEntry]:
    """Drop the named columns; absent names are noted, the label is protected."""
    requested = list(dict.fromkeys(names))
    present = set(raw.column_names)
    label = raw.label_name
    if label in requested:
        raise DataError(f"refusing to drop the label column {label!r}")
    to_drop = {n for n in requested if n in present}
    absent = [n for n in requested if n not in present]
    out = raw.without_columns(to_drop) if to_drop else raw
    details = f"dropped {sorted(to_drop)}" if to_drop else "dropped []"
    if absent:
        details += f"; absent (ignored): {absent}"
    entry = PrepEntry(
        STAGE_DROP_COLUMNS,
        raw.n_rows,
        out.n_rows,
        raw.n_columns,
        out.n_columns,
        details,
    )
    return out, entry


# -- row filters ---------------------------------------------------------------


def drop_invalid_rows(raw: RawTable) -> tuple[RawTable, PrepEntry]:
    """Remove every row holding NaN or an infinity in any numeric column."""
    mask = np.ones(raw.n_rows, dtype=bool)
    for col, arr in zip(raw.schema, raw.cells):
        if col.kind in (KIND_NUMERIC, KIND_TIMESTAMP):
            mask &= np.isfinite(arr)
    out = raw if mask.all() else raw.take_rows(np.flatnonzero(mask))
    removed = raw.n_rows - out.n_rows
    entry = PrepEntry(
        STAGE_DROP_INVALID,
        raw.n_rows,
        out.n_rows,
        raw.n_columns,
        out.n_columns,
        f"removed {removed} rows with NaN or infinite values",
    )
    return out, entry


def _raw_row_codes(raw: RawTable) -> np.ndarray:
    """uint64 matrix whose rows are equal iff raw rows are equal.

    Floats compare bitwise (so NaNs with identical bit patterns match);
    token columns compare by value.
    """
    parts = []
    for col, arr in zip(raw.schema, raw.cells):
        if col.kind in (KIND_NUMERIC, KIND_TIMESTAMP):
            parts.append(arr.view(np.uint64))
        else:
            _, inverse = np.unique(arr.astype(str), return_inverse=True)
            parts.append(inverse.astype(np.uint64))
    return np.column_stack(parts)


def drop_duplicate_rows(raw: RawTable) -> tuple[RawTable, PrepEntry]:
    """Remove repeated rows, keeping the first occurrence in original order."""
    if raw.n_rows == 0:
        out = raw
    else:
        codes = _raw_row_codes(raw)
        _, first_indices = np.unique(codes, axis=0, return_index=True)
        keep = np.sort(first_indices)
        out = raw if keep.size == raw.n_rows else raw.take_rows(keep)
    removed = raw.n_rows - out.n_rows
    entry = PrepEntry(
        STAGE_DROP_DUPLICATES,
        raw.n_rows,
        out.n_rows,
        raw.n_columns,
        out.n_columns,
        f"removed {removed} duplicate rows (first occurrence kept)",
    )
    return out, entry


def drop_zero_variance_columns(raw: RawTable) -> tuple[RawTable, PrepEntry]:
    """Remove feature columns whose values are all identical (label excluded)."""
    constant: list[str] = []
    if raw.n_rows > 0:
        for col, arr in zip(raw.schema, raw.cells):
            if col.kind == KIND_LABEL:
                continue
            if col.kind in (KIND_NUMERIC, KIND_TIMESTAMP):
                bits = arr.view(np.uint64)
                if bool(np.all(bits == bits[0])):
                    constant.append(col.name)
            else:
                if bool(np.all(arr == arr[0])):
                    constant.append(col.name)
    out = raw.without_columns(set(constant)) if constant else raw
    entry = PrepEntry(
        STAGE_DROP_ZERO_VARIANCE,
        raw.n_rows,
        out.n_rows,
        raw.n_columns,
        out.n_columns,
        f"removed constant columns {sorted(constant)}",
    )
    return out, entry


# -- encoding -----------------------------------------------------------------


def _first_occurrence_codes(tokens: np.ndarray) -> tuple[np.ndarray, tuple[str, ...]]:
    values = tokens.astype(str)
    uniq, first_idx, inverse = np.unique(values, return_index=True, return_inverse=True)
    order = np.argsort(first_idx, kind="stable")
    code_of_sorted = np.empty(uniq.size, dtype=np.int64)
    code_of_sorted[order] = np.arange(uniq.size)
    return code_of_sorted[inverse], tuple(str(v) for v in uniq[order])


def encode_categoricals(
    raw: RawTable, profile: DatasetProfile
) -> tuple[ColumnarTable, dict[str, LabelEncoding]]:
    """Encode token columns as integer codes and the label via the profile.

    Categorical codes follow first-occurrence order; the label column maps
    through profile.class_names, and an unseen label value is an error naming
    the value. Numeric columns pass through bit-for-bit.
    """
    encodings: dict[str, LabelEncoding] = {}
    feature_columns: list[np.ndarray] = []
    labels: np.ndarray | None = None
    schema: list[ColumnSchema] = []
    for col, arr in zip(raw.schema, raw.cells):
        if col.kind == KIND_LABEL:
            tokens = arr.astype(str)
            uniq, inverse = np.unique(tokens, return_inverse=True)
            mapping = {name: i for i, name in enumerate(profile.class_names)}
            ids = np.empty(uniq.size, dtype=np.int64)
            for i, value in enumerate(uniq):
                if value not in mapping:
                    raise DataError(f"unknown label value {str(value)!r}")
                ids[i] = mapping[value]
            labels = ids[inverse]
            schema.append(ColumnSchema(col.name, KIND_LABEL, len(schema)))
            continue
        if col.kind == KIND_CATEGORICAL:
            codes, ordered_values = _first_occurrence_codes(arr)
            counts = np.bincount(codes, minlength=len(ordered_values))
            encodings[col.name] = LabelEncoding(
                ordered_values, tuple(int(c) for c in counts)
            )
            feature_columns.append(codes.astype(np.float64))
        else:
            feature_columns.append(arr)
        schema.append(ColumnSchema(col.name, col.kind, len(schema)))
    if labels is None:  # pragma: no cover - schema validation forbids this
        raise DataError("no label column present")
    table = ColumnarTable(
        schema,
        feature_columns,
        labels,
        LabelEncoding(tuple(profile.class_names), tuple(0 for _ in profile.class_names)),
    )
    encodings[profile.label_column] = table.encoding
    return table, encodings


# -- normalization --------------------------------------------------------------


def minmax_normalize(
    table: ColumnarTable,
    stats: NormalizationStats | None = None,
    fit_scope: str = FIT_FULL_DATASET,
) -> tuple[ColumnarTable, NormalizationStats]:
    """Scale every feature to [0, 1] via (x - min) / (max - min).

    With stats given, those bounds are applied instead of fitting (values may
    then fall outside [0, 1]); a feature-name mismatch is an error. Constant
    features map to 0.
    """
    if stats is None:
        if table.n_rows == 0:
            raise DataError("cannot fit normalization on an empty table")
        mins = np.array([col.min() for col in table.columns], dtype=np.float64)
        maxs = np.array([col.max() for col in table.columns], dtype=np.float64)
        stats = NormalizationStats(table.feature_names, mins, maxs, fit_scope)
    elif stats.feature_names != table.feature_names:
        raise DataError(
            "normalization stats were fitted on different features: "
            f"{stats.feature_names} vs {table.feature_names}"
        )
    new_columns = []
    for j, col in enumerate(table.columns):
        lo = stats.minimums[j]
        hi = stats.maximums[j]
        span = hi - lo
        if span == 0.0:
            new_columns.append(np.zeros_like(col))
        else:
            new_columns.append((col - lo) / span)
    return table.replace_columns(new_columns), stats


# -- split -----------------------------------------------------------------------


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def stratified_split(table: ColumnarTable, ratio: float, seed: int) -> SplitPair:
    """Per-class 80:20-style split: round-half-up(ratio * n_c) rows to train,
    chosen by a seeded shuffle; the remainder goes to test. Row order within
    each side follows the original table order."""
    if not 0.0 < ratio < 1.0:
        raise DataError(f"split ratio must be in (0, 1), got {ratio}")
    counts = table.encoding.counts
    for name, count in zip(table.encoding.class_names, counts):
        if count == 0:
            raise DataError(f"class {name!r} has 0 rows, cannot stratify")
    rng = np.random.default_rng(seed)
    train_parts = []
    test_parts = []
    for class_id in range(table.n_classes):
        idx = np.flatnonzero(table.labels == class_id)
        perm = rng.permutation(idx)
        k = _round_half_up(ratio * idx.size)
        train_parts.append(perm[:k])
        test_parts.append(perm[k:])
    train_idx = np.sort(np.concatenate(train_parts))
    test_idx = np.sort(np.concatenate(test_parts))
    return SplitPair(
        train=table.take_rows(train_idx),
        test=table.take_rows(test_idx),
        ratio=ratio,
        seed=seed,
    )


# -- pipeline ----------------------------------------------------------------------


def preprocess_pipeline(
    source: str | Path | RawTable,
    profile: DatasetProfile,
    options: PrepOptions = PrepOptions(),
) -> tuple[SplitPair, PrepReport]:
    """Run the full fixed-order cleaning pipeline and split the result.

    ``source`` is a CSV path or an in-memory RawTable. With the default
    fit_scope the min/max bounds are fitted on the full dataset before the
    split (matching the published protocol); with train_only the split comes
    first and the bounds are fitted on the training side only.
    """
    report = PrepReport()
    if isinstance(source, RawTable):
        raw = source
        origin = "memory"
    else:
        raw = load_csv(source, profile)
        origin = str(source)
    report.add(
        PrepEntry(STAGE_LOAD, raw.n_rows, raw.n_rows, raw.n_columns, raw.n_columns,
                  f"source={origin}")
    )

    merged = merge_timestamps(raw, profile)
    merge_note = (
        "merged 12 component columns into stimestamp/etimestamp"
        if profile.timestamp_merge is not None
        else "no timestamp merge configured"
    )
    report.add(
        PrepEntry(STAGE_MERGE, raw.n_rows, merged.n_rows, raw.n_columns,
                  merged.n_columns, merge_note)
    )

    dropped, entry = drop_columns_by_name(merged, profile.drop_columns)
    report.add(entry)
    valid, entry = drop_invalid_rows(dropped)
    report.add(entry)
    unique, entry = drop_duplicate_rows(valid)
    report.add(entry)
    pruned, entry = drop_zero_variance_columns(unique)
    report.add(entry)

    table, encodings = encode_categoricals(pruned, profile)
    n_categorical = sum(
        1 for c in table.feature_schema if c.kind == KIND_CATEGORICAL
    )
    report.add(
        PrepEntry(
            STAGE_ENCODE,
            pruned.n_rows,
            table.n_rows,
            pruned.n_columns,
            len(table.schema),
            f"encoded {n_categorical} categorical columns; {table.n_classes} classes",
        )
    )

    if options.fit_scope == FIT_FULL_DATASET:
        normalized, stats = minmax_normalize(table, fit_scope=FIT_FULL_DATASET)
        report.add(
            PrepEntry(STAGE_NORMALIZE, table.n_rows, normalized.n_rows,
                      len(table.schema), len(normalized.schema),
                      f"fit_scope={FIT_FULL_DATASET}")
        )
        split = stratified_split(normalized, options.split_ratio, options.seed)
        report.add(_split_entry(normalized, split))
    else:
        split_raw = stratified_split(table, options.split_ratio, options.seed)
        report.add(_split_entry(table, split_raw))
        train_norm, stats = minmax_normalize(split_raw.train, fit_scope=FIT_TRAIN_ONLY)
        test_norm, _ = minmax_normalize(split_raw.test, stats=stats)
        split = SplitPair(train_norm, test_norm, split_raw.ratio, split_raw.seed)
        report.add(
            PrepEntry(STAGE_NORMALIZE, table.n_rows, table.n_rows,
                      len(table.schema), len(table.schema),
                      f"fit_scope={FIT_TRAIN_ONLY}")
        )
    return split, report


def _split_entry(table: ColumnarTable, split: SplitPair) -> PrepEntry:
    per_class = ", ".join(
        f"{name}:{tr}/{te}"
        for name, tr, te in zip(
            table.encoding.class_names, split.train.encoding.counts,
            split.test.encoding.counts
        )
    )
    return PrepEntry(
        STAGE_SPLIT,
        table.n_rows,
        table.n_rows,
        len(table.schema),
        len(table.schema),
        f"ratio={split.ratio} seed={split.seed} train/test per class: {per_class}",
    )


# -- CSV emission -----------------------------------------------------------------


def write_csv(table: RawTable | ColumnarTable, path: str | Path) -> None:
    """Serialize a table as CSV; reals carry 17 significant digits so they
    re-parse to the same 64-bit values."""
    path = Path(path)
    if isinstance(table, ColumnarTable):
        names = list(table.feature_names) + [table.label_name]
        label_tokens = [table.encoding.class_names[i] for i in table.labels]
        value_columns = list(table.columns)
        kinds = [c.kind for c in table.feature_schema]
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(names)
            for row in range(table.n_rows):
                out = [f"{col[row]:.17g}" for col in value_columns]
                out.append(label_tokens[row])
                writer.writerow(out)
        return
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(table.column_names)
        numeric = [c.kind in (KIND_NUMERIC, KIND_TIMESTAMP) for c in table.schema]
        for row in range(table.n_rows):
            out = []
            for is_num, arr in zip(numeric, table.cells):
                out.append(f"{arr[row]:.17g}" if is_num else str(arr[row]))
            writer.writerow(out)
