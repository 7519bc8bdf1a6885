"""Command-line surface: exit codes, artifacts, end-to-end round trips."""

import json

import pytest

from flowgate.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _write_config(tmp_path, **overrides):
    doc = {
        "seed": 3,
        "dataset": {
            "kind": "synthetic",
            "n_rows": 600,
            "class_names": ["calm", "burst", "probe"],
            "class_ratios": [0.7, 0.2, 0.1],
            "n_features": 4,
            "cluster_separation": 7.0,
        },
        "models": ["baseline", "dt"],
        "output_dir": str(tmp_path / "out"),
    }
    doc.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_report_writes_artifacts_and_exits_zero(tmp_path, capsys):
    config = _write_config(tmp_path)
    code, out, err = _run(capsys, "report", "--config", str(config))
    assert code == 0, err
    assert (tmp_path / "out" / "table_metrics.csv").exists()
    assert (tmp_path / "out" / "metrics.json").exists()
    assert "Baseline:" in out
    assert "DT:" in out


def test_unknown_subcommand_is_a_usage_error(capsys):
    code, _, err = _run(capsys, "transmogrify")
    assert code == 1
    assert "usage error" in err


def test_missing_config_file_is_a_usage_error(tmp_path, capsys):
    code, _, err = _run(capsys, "report", "--config", str(tmp_path / "ghost.json"))
    assert code == 1
    assert "configuration error" in err


def test_invalid_config_key_is_a_usage_error(tmp_path, capsys):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"seed": 1, "mystery": True}), encoding="utf-8")
    code, _, err = _run(capsys, "report", "--config", str(path))
    assert code == 1


def test_missing_csv_is_a_data_error(tmp_path, capsys):
    code, _, err = _run(
        capsys,
        "ingest",
        "--csv",
        str(tmp_path / "absent.csv"),
        "--profile",
        "cse2018",
    )
    assert code == 2
    assert "missing file" in err


def test_malformed_thread_cap_is_a_usage_error(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("FLOWGATE_THREADS", "many")
    config = _write_config(tmp_path)
    code, _, err = _run(capsys, "report", "--config", str(config))
    assert code == 1
    assert "FLOWGATE_THREADS" in err
    monkeypatch.setenv("FLOWGATE_THREADS", "0")
    code, _, _ = _run(capsys, "report", "--config", str(config))
    assert code == 1


def test_seed_and_out_overrides(tmp_path, capsys):
    config = _write_config(tmp_path)
    other = tmp_path / "elsewhere"
    code, _, _ = _run(
        capsys, "report", "--config", str(config), "--seed", "9", "--out", str(other)
    )
    assert code == 0
    manifest = json.loads((other / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["config"]["seed"] == 9


def test_synth_then_ingest_round_trip(tmp_path, capsys):
    out_csv = tmp_path / "flows.csv"
    code, out, _ = _run(
        capsys,
        "synth",
        "--rows",
        "500",
        "--profile",
        "cse2018",
        "--seed",
        "4",
        "--dup-rate",
        "0.04",
        "--nan-rate",
        "0.01",
        "--constant-cols",
        "1",
        "--out",
        str(out_csv),
    )
    assert code == 0
    assert out_csv.exists()
    sidecar = json.loads((tmp_path / "flows.csv.spec.json").read_text(encoding="utf-8"))
    assert sidecar["corruption"]["constant_columns"] == ["const_00"]
    n_dups = len(sidecar["corruption"]["duplicate_rows"])
    n_invalid = len(sidecar["corruption"]["nan_cells"]) + len(
        sidecar["corruption"]["inf_cells"]
    )
    assert n_dups == 20  # floor(0.04 * 500)
    assert n_invalid == 5  # floor(0.01 * 500)

    code, out, _ = _run(
        capsys,
        "ingest",
        "--csv",
        str(out_csv),
        "--profile",
        str(tmp_path / "flows.csv.profile.json"),
        "--split-ratio",
        "0.8",
        "--seed",
        "4",
    )
    assert code == 0
    assert "drop_invalid_rows" in out
    assert "removed 5 rows" in out
    assert "removed 20 duplicate rows" in out


def test_stats_reports_columns_and_classes(tmp_path, capsys):
    csv_path = tmp_path / "mini.csv"
    csv_path.write_text("f,Label\n1,Benign\n2,DDoS\n3,Benign\n", encoding="utf-8")
    code, out, _ = _run(
        capsys, "stats", "--csv", str(csv_path), "--profile", "cse2018"
    )
    assert code == 0
    assert "rows: 3" in out
    assert "class distribution:" in out
    assert "Benign: 2" in out


def test_train_saves_models_and_eval_scores_them(tmp_path, capsys):
    config = _write_config(tmp_path, models=["dt"])
    code, out, _ = _run(
        capsys, "train", "--config", str(config), "--save-models"
    )
    assert code == 0
    model_path = tmp_path / "out" / "model_dt.json"
    assert model_path.exists()

    # score the model on a tiny probe sharing the training class vocabulary
    probe = tmp_path / "probe.csv"
    lines = ["f00,f01,f02,f03,label"]
    lines += ["0.1,0.1,0.1,0.1,calm", "0.9,0.9,0.9,0.9,probe"]
    probe.write_text("\n".join(lines) + "\n", encoding="utf-8")
    profile_doc = {
        "name": "probe",
        "label_column": "label",
        "class_names": ["calm", "burst", "probe"],
    }
    profile_path = tmp_path / "probe.profile.json"
    profile_path.write_text(json.dumps(profile_doc), encoding="utf-8")
    code, out, _ = _run(
        capsys,
        "eval",
        "--model",
        str(model_path),
        "--csv",
        str(probe),
        "--profile",
        str(profile_path),
    )
    assert code == 0
    doc = json.loads(out)
    assert set(doc) >= {"accuracy", "precision", "recall", "f1", "per_class"}
    assert [e["class"] for e in doc["per_class"]] == ["calm", "burst", "probe"]


def test_tune_prints_best_point(tmp_path, capsys):
    config = _write_config(
        tmp_path,
        models=[],
        tuning={"enabled": True, "n_particles": 4, "n_iterations": 3},
    )
    code, out, _ = _run(capsys, "tune", "--config", str(config))
    assert code == 0
    assert "best point" in out
    assert "default fitness" in out
    assert (tmp_path / "out" / "figure_tuning_trace.csv").exists()


def test_report_determinism_across_thread_caps(tmp_path, capsys, monkeypatch):
    config = _write_config(tmp_path, models=["baseline", "dt", "rf"])
    monkeypatch.setenv("FLOWGATE_THREADS", "1")
    code, _, _ = _run(capsys, "report", "--config", str(config), "--out", str(tmp_path / "a"))
    assert code == 0
    monkeypatch.setenv("FLOWGATE_THREADS", "8")
    code, _, _ = _run(capsys, "report", "--config", str(config), "--out", str(tmp_path / "b"))
    assert code == 0
    for name in ("metrics.json", "table_metrics.csv", "table_average.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
