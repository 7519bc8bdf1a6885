"""Experiment runner: data → cleaning → models → optional tuning → artifacts.

run_experiment executes the stages of one configured experiment and collects
everything reproducible into a RunManifest. Metric values depend only on the
configuration (seeds included), never on wall clock or worker count, so the
manifest splits into a deterministic metrics document and a timing/provenance
wrapper. emit_reports writes the publication-shaped artifacts: per-classifier
metric tables, the average table, chart series files, and the tuning trace.

Seed plumbing from the one configured seed: generation uses seed, hazard
injection seed+1, the train/test split seed+2, and tuning (swarm plus its
holdout carve-out) seed+3. Stages that do not run leave their seeds unused.
"""

from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable

from . import __version__
from .config import (
    MODEL_BASELINE,
    MODEL_DT,
    MODEL_GBT,
    MODEL_RF,
    ExperimentConfig,
    ModelSpec,
)
from .dataset import ColumnarTable
from .errors import ConfigError, DataError, FlowgateError
from .metrics import EvalReport, confusion_matrix, evaluate
from .models import (
    GbtParams,
    TreeHyperparams,
    fit_forest,
    fit_gbt,
    fit_tree,
    majority_baseline,
)
from .prep import PrepOptions, PrepReport, SplitPair, preprocess_pipeline
from .swarm import (
    DT_DEFAULT_POINT,
    EpsoConfig,
    TraceEntry,
    dt_objective,
    dt_search_space,
    optimize,
)
from .synth import CorruptionLedger, corrupt, generate_flows

TUNED_DT_NAME = "EPSO DT"

METRIC_COLUMNS = ("Accuracy", "Precision", "Recall", "F1-Score")


@dataclass(frozen=True)
class ModelResult:
    """One evaluated classifier row."""

    name: str
    model_type: str
    hyperparams: dict
    report: EvalReport
    seconds: float

    def metric_dict(self) -> dict:
        doc: dict[str, Any] = {"classifier": self.name, "model_type": self.model_type}
        doc["hyperparams"] = dict(sorted(self.hyperparams.items()))
        doc.update(self.report.to_dict())
        return doc


@dataclass(frozen=True)
class TuningOutcome:
    best_point: tuple[int, ...]
    best_fitness: float
    default_point: tuple[int, ...]
    default_fitness: float
    trace: tuple[TraceEntry, ...]
    seconds: float

    def metric_dict(self) -> dict:
        return {
            "best_point": list(self.best_point),
            "best_fitness": self.best_fitness,
            "default_point": list(self.default_point),
            "default_fitness": self.default_fitness,
            "trace": [
                {"iteration": t.iteration, "fitness": t.fitness, "point": list(t.point)}
                for t in self.trace
            ],
        }


@dataclass
class RunManifest:
    """Everything one run produced, timings separated from metric content.

    metrics_document() is the deterministic part: byte-identical JSON for
    identical configs regardless of thread count. to_dict() wraps it with
    timings and tool provenance for the manifest file.
    """

    config: ExperimentConfig
    config_hash: str
    tool_version: str
    class_names: tuple[str, ...] = ()
    prep_report: PrepReport | None = None
    ledger: CorruptionLedger | None = None
    models: list[ModelResult] | None = None
    tuning: TuningOutcome | None = None
    timings: dict[str, float] | None = None

    def __post_init__(self) -> None:
        if self.models is None:
            self.models = []
        if self.timings is None:
            self.timings = {}

    def model_named(self, name: str) -> ModelResult:
        for result in self.models:
            if result.name == name:
                return result
        raise DataError(f"manifest has no classifier named {name!r}")

    def metrics_document(self) -> dict:
        doc: dict[str, Any] = {
            "config_hash": self.config_hash,
            "metric_mode": self.config.metric_mode,
            "class_names": list(self.class_names),
            "prep": self.prep_report.to_dicts() if self.prep_report else [],
            "models": [m.metric_dict() for m in self.models],
        }
        if self.ledger is not None:
            doc["corruption"] = self.ledger.to_dict()
        if self.tuning is not None:
            doc["tuning"] = self.tuning.metric_dict()
        return doc

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "config": self.config.to_dict(),
            "timings_seconds": {k: round(v, 6) for k, v in self.timings.items()},
            "metrics": self.metrics_document(),
        }


class StageFailure(FlowgateError):
    """A pipeline stage failed; carries the stage name and partial results."""

    def __init__(self, stage: str, cause: Exception, manifest: RunManifest) -> None:
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.manifest = manifest


def _tree_params(spec_params: dict, where: str) -> TreeHyperparams:
    allowed = set(TreeHyperparams.__dataclass_fields__)
    unknown = set(spec_params) - allowed
    if unknown:
        raise ConfigError(f"{where} has unknown hyperparameters {sorted(unknown)}")
    return TreeHyperparams(**spec_params)


def fit_model(spec: ModelSpec, train: ColumnarTable, master_seed: int):
    """Fit one configured classifier; returns (model, resolved hyperparameters)."""
    params = spec.params_dict()
    if spec.type == MODEL_BASELINE:
        if params:
            raise ConfigError(f"baseline takes no hyperparameters, got {sorted(params)}")
        model = majority_baseline(train)
        resolved: dict[str, Any] = {"majority_class": model.majority_class}
        return model, resolved
    if spec.type == MODEL_DT:
        tree_params = _tree_params(params, "dt")
        model = fit_tree(train, tree_params)
        resolved = {k: getattr(tree_params, k) for k in TreeHyperparams.__dataclass_fields__}
        return model, resolved
    if spec.type == MODEL_RF:
        forest_keys = {"n_trees", "features_per_split", "bootstrap"}
        tree_part = {k: v for k, v in params.items() if k not in forest_keys}
        tree_params = _tree_params(tree_part, "rf")
        model = fit_forest(
            train,
            n_trees=params.get("n_trees", 25),
            params=tree_params,
            features_per_split=params.get("features_per_split"),
            bootstrap=params.get("bootstrap", True),
            seed=master_seed,
        )
        resolved = {
            "n_trees": len(model.trees),
            "features_per_split": model.features_per_split,
            "bootstrap": model.bootstrap,
            "seed": model.seed,
        }
        resolved.update(
            {k: getattr(tree_params, k) for k in TreeHyperparams.__dataclass_fields__}
        )
        return model, resolved
    if spec.type == MODEL_GBT:
        allowed = set(GbtParams.__dataclass_fields__)
        unknown = set(params) - allowed
        if unknown:
            raise ConfigError(f"gbt has unknown hyperparameters {sorted(unknown)}")
        gbt_params = GbtParams(**params)
        model = fit_gbt(train, gbt_params)
        resolved = {k: getattr(gbt_params, k) for k in GbtParams.__dataclass_fields__}
        return model, resolved
    raise ConfigError(f"unknown model type {spec.type!r}")  # pragma: no cover


def _fit_and_eval(
    spec: ModelSpec, split: SplitPair, mode: str, master_seed: int
) -> ModelResult:
    start = time.perf_counter()
    model, resolved = fit_model(spec, split.train, master_seed)
    predicted = model.predict(split.test)
    matrix = confusion_matrix(
        split.test.labels,
        predicted,
        split.test.n_classes,
        class_names=split.test.encoding.class_names,
    )
    report = evaluate(matrix, mode)
    return ModelResult(
        name=spec.display_name,
        model_type=spec.type,
        hyperparams=resolved,
        report=report,
        seconds=time.perf_counter() - start,
    )


def build_source(config: ExperimentConfig):
    """Resolve the configured dataset into (pipeline source, profile, ledger)."""
    if config.dataset.kind == "synthetic":
        spec = config.dataset.synth_spec(config.seed)
        table = generate_flows(spec)
        co = config.corruption
        # zero-rate corruption doubles as the table -> raw-format conversion
        raw, ledger = corrupt(
            table,
            dup_rate=co.dup_rate,
            nan_rate=co.nan_rate,
            inf_rate=co.inf_rate,
            n_constant_cols=co.n_constant_cols,
            seed=config.seed + 1,
        )
        return raw, spec.profile(), (None if co.is_noop else ledger)
    if not config.corruption.is_noop:
        raise ConfigError("corruption is only supported for synthetic datasets")
    return config.dataset.path, config.dataset.resolve_profile(), None


def run_experiment(config: ExperimentConfig) -> RunManifest:
    """Execute all configured stages; abort wraps the failing stage name."""
    manifest = RunManifest(
        config=config,
        config_hash=config.config_hash(),
        tool_version=__version__,
    )

    def run_stage(stage: str, fn: Callable[[], Any]) -> Any:
        start = time.perf_counter()
        try:
            value = fn()
        except Exception as exc:
            raise StageFailure(stage, exc, manifest) from exc
        manifest.timings[stage] = time.perf_counter() - start
        return value

    source, profile, ledger = run_stage("dataset", lambda: build_source(config))
    manifest.ledger = ledger

    def do_prep() -> SplitPair:
        options = PrepOptions(
            split_ratio=config.split_ratio,
            seed=config.seed + 2,
            fit_scope=config.fit_scope,
        )
        split, report = preprocess_pipeline(source, profile, options)
        manifest.prep_report = report
        manifest.class_names = split.train.encoding.class_names
        return split

    split = run_stage("preprocess", do_prep)

    for spec in config.models:
        result = run_stage(
            f"model:{spec.display_name}",
            lambda spec=spec: _fit_and_eval(spec, split, config.metric_mode, config.seed),
        )
        manifest.models.append(result)

    if config.tuning.enabled:
        tuning = config.tuning

        def do_tune() -> TuningOutcome:
            start = time.perf_counter()
            objective = dt_objective(
                split, holdout_fraction=tuning.holdout_fraction, seed=config.seed + 3
            )
            space = dt_search_space()
            epso = EpsoConfig(
                n_particles=tuning.n_particles,
                n_iterations=tuning.n_iterations,
                w_start=tuning.inertia_start,
                w_end=tuning.inertia_end,
                c1=tuning.cognitive,
                c2=tuning.social,
                v_max_fraction=tuning.velocity_fraction,
                seed=config.seed + 3,
                memoize=tuning.memoize,
                inertia_decay=tuning.inertia_decay,
                velocity_clamp=tuning.velocity_clamp,
                seed_point=DT_DEFAULT_POINT if tuning.seed_default_point else None,
            )
            best_point, best_fitness, trace = optimize(space, epso, objective)
            default_fitness = objective(DT_DEFAULT_POINT)
            return TuningOutcome(
                best_point=best_point,
                best_fitness=best_fitness,
                default_point=DT_DEFAULT_POINT,
                default_fitness=default_fitness,
                trace=tuple(trace),
                seconds=time.perf_counter() - start,
            )

        manifest.tuning = run_stage("tune", do_tune)

        def do_tuned_fit() -> ModelResult:
            depth, min_split, min_leaf = manifest.tuning.best_point
            spec = ModelSpec(
                type=MODEL_DT,
                params=(
                    ("max_depth", depth),
                    ("min_samples_leaf", min_leaf),
                    ("min_samples_split", min_split),
                ),
            )
            result = _fit_and_eval(spec, split, config.metric_mode, config.seed)
            return ModelResult(
                name=TUNED_DT_NAME,
                model_type=result.model_type,
                hyperparams=result.hyperparams,
                report=result.report,
                seconds=result.seconds,
            )

        manifest.models.append(run_stage(f"model:{TUNED_DT_NAME}", do_tuned_fit))

    return manifest


# -- report emission -----------------------------------------------------------


def format_real(value: float) -> str:
    return f"{value:.9f}"


def _table_rows(manifest: RunManifest, with_average: bool) -> list[list[str]]:
    header = ["Classifier", *METRIC_COLUMNS]
    if with_average:
        header.append("Average")
    rows = [header]
    for result in manifest.models:
        cells = [result.name]
        cells.extend(format_real(v) for v in result.report.as_row())
        if with_average:
            cells.append(format_real(result.report.average_of_four))
        rows.append(cells)
    return rows


def _write_csv_rows(path: Path, rows: Iterable[Iterable[str]]) -> None:
    buf = io.StringIO()
    for row in rows:
        buf.write(",".join(str(c) for c in row))
        buf.write("\r\n")
    path.write_bytes(buf.getvalue().encode("utf-8"))


def _write_markdown_table(path: Path, rows: list[list[str]]) -> None:
    header, *body = rows
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    lines.extend("| " + " | ".join(row) + " |" for row in body)
    path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def _write_json_table(path: Path, rows: list[list[str]]) -> None:
    header, *body = rows
    doc = [dict(zip(header, row)) for row in body]
    path.write_bytes((json.dumps(doc, indent=2) + "\n").encode("utf-8"))


def _write_table(out_dir: Path, stem: str, rows: list[list[str]], formats: tuple[str, ...]) -> list[Path]:
    written = []
    if "csv" in formats:
        target = out_dir / f"{stem}.csv"
        _write_csv_rows(target, rows)
        written.append(target)
    if "md" in formats:
        target = out_dir / f"{stem}.md"
        _write_markdown_table(target, rows)
        written.append(target)
    if "json" in formats:
        target = out_dir / f"{stem}.json"
        _write_json_table(target, rows)
        written.append(target)
    return written


def emit_reports(
    manifest: RunManifest, out_dir: str | Path, formats: tuple[str, ...] | None = None
) -> list[Path]:
    """Write all artifacts for one run; returns the paths written.

    table_metrics.*: one row per classifier with the four metrics.
    table_average.*: the same plus the per-classifier Average column.
    figure_bar_series.csv: long-form (classifier, metric, value) series.
    figure_radar_series.csv: wide per-classifier series with Average.
    figure_tuning_trace.csv: per-iteration best fitness and best point.
    metrics.json: the deterministic metric document.
    manifest.json: metrics plus timings, configuration, and tool version.
    """
    formats = tuple(formats) if formats is not None else manifest.config.formats
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create output directory {out}: {exc}") from None

    written: list[Path] = []
    written += _write_table(out, "table_metrics", _table_rows(manifest, False), formats)
    written += _write_table(out, "table_average", _table_rows(manifest, True), formats)

    bar_rows: list[list[str]] = [["classifier", "metric", "value"]]
    for result in manifest.models:
        for metric, value in zip(METRIC_COLUMNS, result.report.as_row()):
            bar_rows.append([result.name, metric, format_real(value)])
    target = out / "figure_bar_series.csv"
    _write_csv_rows(target, bar_rows)
    written.append(target)

    radar_rows = _table_rows(manifest, True)
    target = out / "figure_radar_series.csv"
    _write_csv_rows(target, radar_rows)
    written.append(target)

    if manifest.tuning is not None:
        trace_rows: list[list[str]] = [
            ["iteration", "best_fitness", "max_depth", "min_samples_split", "min_samples_leaf"]
        ]
        for entry in manifest.tuning.trace:
            trace_rows.append(
                [
                    str(entry.iteration),
                    format_real(entry.fitness),
                    *(str(v) for v in entry.point),
                ]
            )
        target = out / "figure_tuning_trace.csv"
        _write_csv_rows(target, trace_rows)
        written.append(target)

    target = out / "metrics.json"
    target.write_bytes(
        (json.dumps(manifest.metrics_document(), indent=2, sort_keys=True) + "\n").encode("utf-8")
    )
    written.append(target)

    target = out / "manifest.json"
    target.write_bytes(
        (json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8")
    )
    written.append(target)
    return written


def run_and_emit(config: ExperimentConfig, out_dir: str | Path | None = None) -> tuple[RunManifest, list[Path]]:
    manifest = run_experiment(config)
    paths = emit_reports(manifest, out_dir if out_dir is not None else config.output_dir)
    return manifest, paths
