"""End-to-end experiment runs and artifact emission."""

import json

import numpy as np
import pytest

from flowgate.config import ExperimentConfig
from flowgate.errors import ConfigError, DataError
from flowgate.harness import (
    METRIC_COLUMNS,
    TUNED_DT_NAME,
    StageFailure,
    build_source,
    emit_reports,
    fit_model,
    format_real,
    run_and_emit,
    run_experiment,
)
from flowgate.metrics import ConfusionMatrix, evaluate


def _config(**overrides):
    doc = {
        "seed": 11,
        "dataset": {
            "kind": "synthetic",
            "n_rows": 1200,
            "class_names": ["calm", "burst", "probe"],
            "class_ratios": [0.8, 0.15, 0.05],
            "n_features": 5,
            "cluster_separation": 8.0,
        },
        "models": ["baseline", "dt"],
    }
    doc.update(overrides)
    return ExperimentConfig.from_dict(doc)


def test_run_produces_one_row_per_model():
    manifest = run_experiment(_config(models=["baseline", "dt", "rf"]))
    assert [m.name for m in manifest.models] == ["Baseline", "DT", "RF"]
    assert manifest.class_names == ("calm", "burst", "probe")
    assert manifest.prep_report is not None
    assert set(manifest.timings) >= {"dataset", "preprocess", "model:DT"}


def test_separated_clusters_are_nearly_learnable():
    manifest = run_experiment(_config())
    dt = manifest.model_named("DT")
    assert dt.report.accuracy >= 0.99
    baseline = manifest.model_named("Baseline")
    assert baseline.report.accuracy < dt.report.accuracy


def test_metrics_document_is_identical_across_reruns():
    config = _config(models=["baseline", "dt", "gbt"])
    a = run_experiment(config).metrics_document()
    b = run_experiment(config).metrics_document()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_corruption_ledger_matches_prep_report():
    config = _config(
        corruption={"dup_rate": 0.05, "nan_rate": 0.01, "n_constant_cols": 2}
    )
    manifest = run_experiment(config)
    ledger = manifest.ledger
    assert ledger is not None
    by_stage = {e.stage: e for e in manifest.prep_report.entries}
    assert (
        by_stage["drop_invalid_rows"].rows_before
        - by_stage["drop_invalid_rows"].rows_after
        == ledger.n_invalid_rows
    )
    assert (
        by_stage["drop_duplicate_rows"].rows_before
        - by_stage["drop_duplicate_rows"].rows_after
        == ledger.n_duplicate_rows
    )
    assert (
        by_stage["drop_zero_variance_columns"].columns_before
        - by_stage["drop_zero_variance_columns"].columns_after
        == ledger.n_constant_columns
    )


def test_tuning_produces_trace_and_tuned_model():
    config = _config(
        models=["dt"],
        tuning={"enabled": True, "n_particles": 6, "n_iterations": 5},
    )
    manifest = run_experiment(config)
    assert manifest.tuning is not None
    assert len(manifest.tuning.trace) == 5
    fits = [t.fitness for t in manifest.tuning.trace]
    assert fits == sorted(fits)
    assert manifest.tuning.best_fitness >= manifest.tuning.default_fitness
    names = [m.name for m in manifest.models]
    assert names == ["DT", TUNED_DT_NAME]


def test_stage_failure_carries_stage_and_partial_manifest():
    config = _config(
        dataset={
            "kind": "csv",
            "path": "/nonexistent/rows.csv",
            "profile": "cse2018",
        }
    )
    # the csv path is only opened once the cleaning pipeline starts
    with pytest.raises(StageFailure) as info:
        run_experiment(config)
    assert info.value.stage == "preprocess"
    assert isinstance(info.value.cause, DataError)
    assert info.value.manifest.config_hash == config.config_hash()


def test_csv_source_refuses_synthetic_corruption(tmp_path):
    path = tmp_path / "rows.csv"
    path.write_text("a,Label\n1,Benign\n", encoding="utf-8")
    config = _config(
        dataset={"kind": "csv", "path": str(path), "profile": "cse2018"},
        corruption={"dup_rate": 0.1},
    )
    with pytest.raises(ConfigError, match="synthetic"):
        build_source(config)


def test_fit_model_resolves_hyperparameters():
    config = _config()
    source, profile, _ = build_source(config)
    from flowgate.prep import PrepOptions, preprocess_pipeline

    split, _ = preprocess_pipeline(
        source, profile, PrepOptions(split_ratio=0.8, seed=config.seed + 2)
    )
    from flowgate.config import ModelSpec

    model, resolved = fit_model(
        ModelSpec.from_value({"type": "rf", "n_trees": 3}, "models[0]"),
        split.train,
        config.seed,
    )
    assert resolved["n_trees"] == 3
    assert len(model.trees) == 3
    with pytest.raises(ConfigError):
        fit_model(
            ModelSpec.from_value({"type": "dt", "bogus": 1}, "models[0]"),
            split.train,
            config.seed,
        )


# -- formatting and artifacts ---------------------------------------------------


def test_format_real_nine_decimals():
    assert format_real(0.5) == "0.500000000"
    assert format_real(1.0) == "1.000000000"
    assert format_real(0.8875171777) == "0.887517178"


def test_majority_row_closed_forms_at_published_imbalance():
    # benign share 0.8875171777: every prediction lands on the majority class
    m = ConfusionMatrix(
        np.array([[8_875_171_777, 0], [1_124_828_223, 0]], dtype=np.int64),
        class_names=("majority", "rest"),
    )
    report = evaluate(m, mode="weighted")
    rendered = [format_real(v) for v in report.as_row()]
    assert rendered == [
        "0.887517178",
        "0.787686741",
        "0.887517178",
        "0.834627361",
    ]


def test_emitted_tables_and_series(tmp_path):
    config = _config(models=["baseline", "dt", "rf"])
    manifest, paths = run_and_emit(config, tmp_path)
    names = {p.name for p in paths}
    assert {
        "table_metrics.csv",
        "table_metrics.md",
        "table_metrics.json",
        "table_average.csv",
        "figure_bar_series.csv",
        "figure_radar_series.csv",
        "metrics.json",
        "manifest.json",
    } <= names

    text = (tmp_path / "table_metrics.csv").read_bytes().decode("utf-8")
    lines = text.split("\r\n")
    assert lines[0] == "Classifier,Accuracy,Precision,Recall,F1-Score"
    assert len([l for l in lines if l]) == 4  # header + 3 classifiers
    first = lines[1].split(",")
    assert first[0] == "Baseline"
    for cell in first[1:]:
        assert len(cell.split(".")[1]) == 9

    radar = (tmp_path / "figure_radar_series.csv").read_bytes().decode("utf-8")
    assert radar.split("\r\n")[0] == (
        "Classifier,Accuracy,Precision,Recall,F1-Score,Average"
    )

    bar = (tmp_path / "figure_bar_series.csv").read_bytes().decode("utf-8")
    bar_lines = [l for l in bar.split("\r\n") if l]
    assert bar_lines[0] == "classifier,metric,value"
    assert len(bar_lines) == 1 + 3 * len(METRIC_COLUMNS)


def test_average_column_is_the_mean_of_the_four():
    config = _config(models=["baseline"])
    manifest = run_experiment(config)
    report = manifest.model_named("Baseline").report
    from flowgate.harness import _table_rows

    rows = _table_rows(manifest, True)
    assert rows[0][-1] == "Average"
    assert rows[1][-1] == format_real(report.average_of_four)


def test_tuning_trace_artifact(tmp_path):
    config = _config(
        models=[],
        tuning={"enabled": True, "n_particles": 5, "n_iterations": 4},
    )
    _, paths = run_and_emit(config, tmp_path)
    trace_path = tmp_path / "figure_tuning_trace.csv"
    assert trace_path in paths
    lines = [l for l in trace_path.read_bytes().decode("utf-8").split("\r\n") if l]
    assert lines[0] == (
        "iteration,best_fitness,max_depth,min_samples_split,min_samples_leaf"
    )
    assert len(lines) == 5
    assert lines[1].split(",")[0] == "1"


def test_metrics_json_excludes_timings(tmp_path):
    config = _config()
    run_and_emit(config, tmp_path)
    doc = json.loads((tmp_path / "metrics.json").read_text(encoding="utf-8"))
    assert "timings_seconds" not in doc
    assert doc["config_hash"] == config.config_hash()
    # per-class rows carry the configured class names, not indices
    per_class = doc["models"][0]["per_class"]
    assert [e["class"] for e in per_class] == ["calm", "burst", "probe"]
    manifest_doc = json.loads((tmp_path / "manifest.json").read_text(encoding="utf-8"))
    assert "timings_seconds" in manifest_doc
    assert manifest_doc["metrics"]["config_hash"] == config.config_hash()


def test_formats_filter_table_outputs(tmp_path):
    config = _config(formats=["csv"])
    _, paths = run_and_emit(config, tmp_path)
    names = {p.name for p in paths}
    assert "table_metrics.csv" in names
    assert "table_metrics.md" not in names
    assert "metrics.json" in names  # the canonical documents always appear


def test_markdown_table_shape(tmp_path):
    config = _config(models=["dt"], formats=["md"])
    run_and_emit(config, tmp_path)
    lines = (tmp_path / "table_metrics.md").read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("| Classifier |")
    assert set(lines[1].replace("|", "").strip()) <= {"-", " ", ":"}
    assert lines[2].startswith("| DT |")
