"""Versioned JSON serialization for every model kind.

Thresholds, leaf weights, and other learned reals are stored as C99 hex
float strings, so a save/load round trip reproduces the model bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import DataError
from .baseline import BaselineModel
from .forest import ForestModel
from .gbt import GbtModel, GbtParams, RegressionNode
from .tree import DecisionTreeModel, TreeHyperparams, TreeNode

FORMAT_NAME = "flowgate-model"
FORMAT_VERSION = 1

KIND_TREE = "decision_tree"
KIND_FOREST = "random_forest"
KIND_GBT = "gradient_boosting"
KIND_BASELINE = "majority_baseline"

AnyModel = DecisionTreeModel | ForestModel | GbtModel | BaselineModel


def _hex(value: float) -> str:
    return float(value).hex()


def _unhex(text: str) -> float:
    return float.fromhex(text)


def _tree_node_to_dict(node: TreeNode) -> dict:
    doc: dict = {"counts": [int(c) for c in node.counts]}
    if not node.is_leaf:
        doc["feature"] = int(node.feature)
        doc["threshold"] = _hex(node.threshold)
        doc["left"] = _tree_node_to_dict(node.left)
        doc["right"] = _tree_node_to_dict(node.right)
    return doc


def _tree_node_from_dict(doc: dict) -> TreeNode:
    counts = np.asarray(doc["counts"], dtype=np.int64)
    if "feature" not in doc:
        return TreeNode(counts)
    return TreeNode(
        counts,
        feature=int(doc["feature"]),
        threshold=_unhex(doc["threshold"]),
        left=_tree_node_from_dict(doc["left"]),
        right=_tree_node_from_dict(doc["right"]),
    )


def _params_to_dict(params: TreeHyperparams) -> dict:
    return {
        "max_depth": params.max_depth,
        "min_samples_split": params.min_samples_split,
        "min_samples_leaf": params.min_samples_leaf,
        "ccp_alpha": _hex(params.ccp_alpha),
        "criterion": params.criterion,
        "seed": params.seed,
    }


def _params_from_dict(doc: dict) -> TreeHyperparams:
    return TreeHyperparams(
        max_depth=doc["max_depth"],
        min_samples_split=int(doc["min_samples_split"]),
        min_samples_leaf=int(doc["min_samples_leaf"]),
        ccp_alpha=_unhex(doc["ccp_alpha"]),
        criterion=str(doc["criterion"]),
        seed=int(doc["seed"]),
    )


def _regression_node_to_dict(node: RegressionNode) -> dict:
    if node.is_leaf:
        return {"value": _hex(node.value)}
    return {
        "value": _hex(node.value),
        "feature": int(node.feature),
        "threshold": _hex(node.threshold),
        "left": _regression_node_to_dict(node.left),
        "right": _regression_node_to_dict(node.right),
    }


def _regression_node_from_dict(doc: dict) -> RegressionNode:
    if "feature" not in doc:
        return RegressionNode(value=_unhex(doc["value"]))
    return RegressionNode(
        value=_unhex(doc["value"]),
        feature=int(doc["feature"]),
        threshold=_unhex(doc["threshold"]),
        left=_regression_node_from_dict(doc["left"]),
        right=_regression_node_from_dict(doc["right"]),
    )


def model_to_dict(model: AnyModel) -> dict:
    header = {"format": FORMAT_NAME, "version": FORMAT_VERSION}
    if isinstance(model, DecisionTreeModel):
        return header | {
            "kind": KIND_TREE,
            "n_classes": model.n_classes,
            "n_features": model.n_features,
            "params": _params_to_dict(model.params),
            "root": _tree_node_to_dict(model.root),
        }
    if isinstance(model, ForestModel):
        return header | {
            "kind": KIND_FOREST,
            "n_classes": model.n_classes,
            "n_features": model.n_features,
            "features_per_split": model.features_per_split,
            "bootstrap": model.bootstrap,
            "seed": model.seed,
            "params": _params_to_dict(model.params),
            "trees": [_tree_node_to_dict(t.root) for t in model.trees],
        }
    if isinstance(model, GbtModel):
        return header | {
            "kind": KIND_GBT,
            "n_classes": model.n_classes,
            "n_features": model.n_features,
            "params": {
                "n_rounds": model.params.n_rounds,
                "learning_rate": _hex(model.params.learning_rate),
                "max_depth": model.params.max_depth,
                "l2_lambda": _hex(model.params.l2_lambda),
            },
            "base_score": [_hex(v) for v in model.base_score],
            "trees": [
                [_regression_node_to_dict(t) for t in round_trees]
                for round_trees in model.trees
            ],
        }
    if isinstance(model, BaselineModel):
        return header | {
            "kind": KIND_BASELINE,
            "n_classes": model.n_classes,
            "majority_class": model.majority_class,
            "train_ratio": _hex(model.train_ratio),
        }
    raise DataError(f"cannot serialize object of type {type(model).__name__}")


def model_from_dict(doc: dict) -> AnyModel:
    if doc.get("format") != FORMAT_NAME:
        raise DataError(f"not a {FORMAT_NAME} document")
    if doc.get("version") != FORMAT_VERSION:
        raise DataError(f"unsupported model document version {doc.get('version')!r}")
    kind = doc.get("kind")
    if kind == KIND_TREE:
        return DecisionTreeModel(
            root=_tree_node_from_dict(doc["root"]),
            params=_params_from_dict(doc["params"]),
            n_classes=int(doc["n_classes"]),
            n_features=int(doc["n_features"]),
        )
    if kind == KIND_FOREST:
        params = _params_from_dict(doc["params"])
        n_classes = int(doc["n_classes"])
        n_features = int(doc["n_features"])
        trees = tuple(
            DecisionTreeModel(
                root=_tree_node_from_dict(t),
                params=params,
                n_classes=n_classes,
                n_features=n_features,
            )
            for t in doc["trees"]
        )
        return ForestModel(
            trees=trees,
            params=params,
            n_classes=n_classes,
            n_features=n_features,
            features_per_split=int(doc["features_per_split"]),
            bootstrap=bool(doc["bootstrap"]),
            seed=int(doc["seed"]),
        )
    if kind == KIND_GBT:
        params = GbtParams(
            n_rounds=int(doc["params"]["n_rounds"]),
            learning_rate=_unhex(doc["params"]["learning_rate"]),
            max_depth=int(doc["params"]["max_depth"]),
            l2_lambda=_unhex(doc["params"]["l2_lambda"]),
        )
        base = np.asarray([_unhex(v) for v in doc["base_score"]], dtype=np.float64)
        trees = tuple(
            tuple(_regression_node_from_dict(t) for t in round_trees)
            for round_trees in doc["trees"]
        )
        return GbtModel(
            base_score=base,
            trees=trees,
            params=params,
            n_classes=int(doc["n_classes"]),
            n_features=int(doc["n_features"]),
        )
    if kind == KIND_BASELINE:
        return BaselineModel(
            majority_class=int(doc["majority_class"]),
            train_ratio=_unhex(doc["train_ratio"]),
            n_classes=int(doc["n_classes"]),
        )
    raise DataError(f"unknown model kind {kind!r}")


def save_model(model: AnyModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> AnyModel:
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing model file: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from exc
    return model_from_dict(doc)
