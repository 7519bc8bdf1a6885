"""Shared builders and independent oracles.

The oracles here recompute contracts from first principles with exact
rational arithmetic (fractions.Fraction) and deliberately naive algorithms,
so they share no code path with the library. Tests freeze their outputs or
compare them directly against the fast implementations.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from flowgate.dataset import (
    KIND_LABEL,
    KIND_NUMERIC,
    ColumnSchema,
    ColumnarTable,
    LabelEncoding,
)


# -- table builders ------------------------------------------------------------


def make_table(
    X: np.ndarray,
    y: np.ndarray,
    class_names: tuple[str, ...] | None = None,
) -> ColumnarTable:
    """Wrap a feature matrix and label vector in a ColumnarTable."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be (n, d) with one label per row")
    if class_names is None:
        n_classes = int(y.max()) + 1 if y.size else 1
        class_names = tuple(f"c{k}" for k in range(n_classes))
    schema = [
        ColumnSchema(f"f{j:02d}", KIND_NUMERIC, j) for j in range(X.shape[1])
    ]
    schema.append(ColumnSchema("label", KIND_LABEL, X.shape[1]))
    columns = [np.ascontiguousarray(X[:, j]) for j in range(X.shape[1])]
    encoding = LabelEncoding.from_labels(class_names, y)
    return ColumnarTable(schema, columns, y, encoding)


def random_table(
    n: int, d: int, k: int, seed: int, spread: float = 1.0
) -> ColumnarTable:
    rng = np.random.default_rng(seed)
    X = rng.normal(0.0, spread, size=(n, d))
    y = rng.integers(0, k, size=n)
    # every class id must appear at least once so n_classes is stable
    y[:k] = np.arange(k)
    return make_table(X, rng.permutation(y))


def conflict_free_table(n: int, d: int, k: int, seed: int) -> ColumnarTable:
    """Distinct feature vectors with arbitrary labels: memorizable exactly."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    while np.unique(X, axis=0).shape[0] != n:  # pragma: no cover - measure zero
        X = rng.normal(size=(n, d))
    y = rng.integers(0, k, size=n)
    y[:k] = np.arange(k)
    return make_table(X, rng.permutation(y))


# -- metric oracle -------------------------------------------------------------


def oracle_metrics(
    y_true: np.ndarray, y_pred: np.ndarray, n_classes: int, mode: str = "weighted"
) -> dict[str, float]:
    """Counting-based scores, exact until the final float conversion."""
    y_true = [int(v) for v in y_true]
    y_pred = [int(v) for v in y_pred]
    n = len(y_true)
    pairs = Counter(zip(y_true, y_pred))
    correct = sum(pairs[(c, c)] for c in range(n_classes))

    p_total = Fraction(0)
    r_total = Fraction(0)
    f_total = Fraction(0)
    for c in range(n_classes):
        tp = pairs[(c, c)]
        fp = sum(k for (t, p), k in pairs.items() if p == c and t != c)
        fn = sum(k for (t, p), k in pairs.items() if t == c and p != c)
        support = tp + fn
        precision = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
        recall = Fraction(tp, support) if support else Fraction(0)
        f1 = Fraction(2 * tp, 2 * tp + fp + fn) if 2 * tp + fp + fn else Fraction(0)
        if mode == "weighted":
            w = Fraction(support, n)
        else:
            w = Fraction(1, n_classes)
        p_total += w * precision
        r_total += w * recall
        f_total += w * f1
    return {
        "accuracy": correct / n,
        "precision": float(p_total),
        "recall": float(r_total),
        "f1": float(f_total),
    }


# -- split-search oracle ---------------------------------------------------------


def oracle_best_split(
    X: np.ndarray, y: np.ndarray, min_samples_leaf: int = 1
) -> tuple[int, float, float] | None:
    """Exhaustive split search with exact scoring.

    Candidates are midpoints between consecutive distinct sorted values of
    each feature; a midpoint that collapses onto the upper value (adjacent
    doubles) cannot separate the pair and is skipped. Rows route left on
    x <= threshold. The winner maximizes sum(left counts^2)/n_left +
    sum(right counts^2)/n_right exactly; ties prefer the lowest feature,
    then the lowest threshold. Returns None unless the winner strictly
    beats the unsplit node.
    """
    X = np.asarray(X, dtype=np.float64)
    y = [int(v) for v in y]
    n, d = X.shape
    classes = sorted(set(y))
    parent = Fraction(sum(y.count(c) ** 2 for c in classes), n)

    best: tuple[Fraction, int, float, int] | None = None
    for f in range(d):
        level = sorted(set(float(v) for v in X[:, f]))
        for lo, hi in zip(level, level[1:]):
            mid = (lo + hi) / 2.0
            if not mid < hi:
                continue
            left = [i for i in range(n) if X[i, f] <= mid]
            nl, nr = len(left), n - len(left)
            if nl < min_samples_leaf or nr < min_samples_leaf:
                continue
            left_set = set(left)
            yl = [y[i] for i in left]
            yr = [y[i] for i in range(n) if i not in left_set]
            score = Fraction(sum(yl.count(c) ** 2 for c in classes), nl) + Fraction(
                sum(yr.count(c) ** 2 for c in classes), nr
            )
            key = (score, f, mid)
            if best is None or score > best[0] or (
                score == best[0] and (f, mid) < (best[1], best[2])
            ):
                best = (score, f, mid, nl)
    if best is None or best[0] <= parent:
        return None
    score, f, mid, _ = best
    decrease = (score - parent) / n
    return f, mid, float(decrease)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)
