"""Experiment configuration: parsing, validation, canonical hashing.

A run is described by one JSON document. The document is validated into an
ExperimentConfig up front so a bad field fails before any work starts, and
the canonical re-serialization is hashed into the run manifest so two runs
can be compared by configuration identity.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError
from .prep import FIT_FULL_DATASET, PrepOptions
from .profiles import BUILTIN_PROFILES, DatasetProfile, builtin_profile
from .synth import SynthSpec

MODEL_BASELINE = "baseline"
MODEL_DT = "dt"
MODEL_RF = "rf"
MODEL_GBT = "gbt"
MODEL_TYPES = (MODEL_BASELINE, MODEL_DT, MODEL_RF, MODEL_GBT)

DISPLAY_NAMES = {
    MODEL_BASELINE: "Baseline",
    MODEL_DT: "DT",
    MODEL_RF: "RF",
    MODEL_GBT: "GBT",
}

_DATASET_KINDS = ("synthetic", "csv")
_FORMATS = ("csv", "md", "json")


def _require(doc: Mapping, key: str, where: str) -> Any:
    if key not in doc:
        raise ConfigError(f"{where} is missing required key {key!r}")
    return doc[key]


def _as_int(value: Any, where: str) -> int:
    # bools are ints in Python; reject them so "true" seeds fail loudly
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    return value


def _as_float(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class ModelSpec:
    """One classifier to train: a type tag plus keyword overrides."""

    type: str
    params: tuple[tuple[str, Any], ...] = ()

    def __post_init__(self) -> None:
        if self.type not in MODEL_TYPES:
            raise ConfigError(
                f"unknown model type {self.type!r}; expected one of {list(MODEL_TYPES)}"
            )

    @property
    def display_name(self) -> str:
        return DISPLAY_NAMES[self.type]

    def params_dict(self) -> dict[str, Any]:
        return dict(self.params)

    @classmethod
    def from_value(cls, value: Any, where: str) -> "ModelSpec":
        if isinstance(value, str):
            return cls(type=value)
        if isinstance(value, Mapping):
            doc = dict(value)
            kind = _require(doc, "type", where)
            doc.pop("type")
            return cls(type=str(kind), params=tuple(sorted(doc.items())))
        raise ConfigError(f"{where} must be a model name or an object with a 'type' key")

    def to_value(self) -> Any:
        if not self.params:
            return self.type
        doc: dict[str, Any] = {"type": self.type}
        doc.update(self.params_dict())
        return doc


@dataclass(frozen=True)
class DatasetConfig:
    """Where the rows come from: a seeded generator or a CSV file."""

    kind: str
    n_rows: int = 0
    profile_name: str | None = None
    class_names: tuple[str, ...] = ()
    class_ratios: tuple[float, ...] = ()
    n_features: int = 6
    cluster_separation: float = 8.0
    path: str | None = None
    profile: DatasetProfile | None = None

    def __post_init__(self) -> None:
        if self.kind not in _DATASET_KINDS:
            raise ConfigError(
                f"dataset.kind must be one of {list(_DATASET_KINDS)}, got {self.kind!r}"
            )
        if self.kind == "synthetic":
            if self.n_rows < 1:
                raise ConfigError("dataset.n_rows must be >= 1 for synthetic data")
            if self.profile_name is None and not self.class_names:
                raise ConfigError(
                    "synthetic dataset needs either 'profile' or class_names/class_ratios"
                )
        else:
            if not self.path:
                raise ConfigError("dataset.path is required when kind is 'csv'")
            if self.profile is None and self.profile_name is None:
                raise ConfigError("csv dataset needs a 'profile'")

    def synth_spec(self, seed: int) -> SynthSpec:
        if self.kind != "synthetic":
            raise ConfigError("synth_spec is only defined for synthetic datasets")
        if self.profile_name is not None:
            return SynthSpec.from_profile_name(
                self.profile_name,
                n_rows=self.n_rows,
                n_features=self.n_features,
                cluster_separation=self.cluster_separation,
                seed=seed,
            )
        return SynthSpec(
            n_rows=self.n_rows,
            class_names=self.class_names,
            class_ratios=self.class_ratios,
            n_features=self.n_features,
            cluster_separation=self.cluster_separation,
            seed=seed,
        )

    def resolve_profile(self) -> DatasetProfile:
        if self.profile is not None:
            return self.profile
        if self.kind == "synthetic":
            return self.synth_spec(0).profile()
        assert self.profile_name is not None
        return builtin_profile(self.profile_name)

    @classmethod
    def from_dict(cls, doc: Mapping, base_dir: Path) -> "DatasetConfig":
        kind = str(_require(doc, "kind", "dataset"))
        if kind == "synthetic":
            ratios = doc.get("class_ratios")
            names = doc.get("class_names")
            profile_name = doc.get("profile")
            if profile_name is not None and not isinstance(profile_name, str):
                raise ConfigError("dataset.profile must be a builtin profile name")
            if (ratios is None) != (names is None):
                raise ConfigError("class_names and class_ratios must be given together")
            return cls(
                kind=kind,
                n_rows=_as_int(_require(doc, "n_rows", "dataset"), "dataset.n_rows"),
                profile_name=profile_name,
                class_names=tuple(str(n) for n in names) if names else (),
                class_ratios=tuple(_as_float(r, "dataset.class_ratios") for r in ratios)
                if ratios
                else (),
                n_features=_as_int(doc.get("n_features", 6), "dataset.n_features"),
                cluster_separation=_as_float(
                    doc.get("cluster_separation", 8.0), "dataset.cluster_separation"
                ),
            )
        if kind == "csv":
            profile_value = _require(doc, "profile", "dataset")
            profile_name: str | None = None
            profile: DatasetProfile | None = None
            if isinstance(profile_value, str) and profile_value in BUILTIN_PROFILES:
                profile_name = profile_value
            elif isinstance(profile_value, str):
                profile_path = base_dir / profile_value
                try:
                    loaded = json.loads(profile_path.read_text(encoding="utf-8"))
                except FileNotFoundError:
                    raise ConfigError(
                        f"dataset.profile {profile_value!r} is neither a builtin name "
                        f"({sorted(BUILTIN_PROFILES)}) nor a readable JSON file"
                    ) from None
                except json.JSONDecodeError as exc:
                    raise ConfigError(f"profile file {profile_path}: {exc}") from None
                profile = DatasetProfile.from_dict(loaded)
            elif isinstance(profile_value, Mapping):
                profile = DatasetProfile.from_dict(profile_value)
            else:
                raise ConfigError("dataset.profile must be a name, path, or object")
            path = str(_require(doc, "path", "dataset"))
            resolved = Path(path)
            if not resolved.is_absolute():
                resolved = base_dir / resolved
            return cls(kind=kind, path=str(resolved), profile_name=profile_name, profile=profile)
        raise ConfigError(f"dataset.kind must be one of {list(_DATASET_KINDS)}, got {kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "synthetic":
            doc: dict[str, Any] = {"kind": self.kind, "n_rows": self.n_rows}
            if self.profile_name is not None:
                doc["profile"] = self.profile_name
            if self.class_names:
                doc["class_names"] = list(self.class_names)
                doc["class_ratios"] = list(self.class_ratios)
            doc["n_features"] = self.n_features
            doc["cluster_separation"] = self.cluster_separation
            return doc
        doc = {"kind": self.kind, "path": self.path}
        if self.profile_name is not None:
            doc["profile"] = self.profile_name
        elif self.profile is not None:
            doc["profile"] = self.profile.to_dict()
        return doc


@dataclass(frozen=True)
class CorruptionConfig:
    dup_rate: float = 0.0
    nan_rate: float = 0.0
    inf_rate: float = 0.0
    n_constant_cols: int = 0

    def __post_init__(self) -> None:
        for name in ("dup_rate", "nan_rate", "inf_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate < 1.0:
                raise ConfigError(f"corruption.{name} must be in [0, 1), got {rate}")
        if self.n_constant_cols < 0:
            raise ConfigError("corruption.n_constant_cols must be >= 0")

    @property
    def is_noop(self) -> bool:
        return (
            self.dup_rate == 0.0
            and self.nan_rate == 0.0
            and self.inf_rate == 0.0
            and self.n_constant_cols == 0
        )

    @classmethod
    def from_dict(cls, doc: Mapping) -> "CorruptionConfig":
        unknown = set(doc) - {"dup_rate", "nan_rate", "inf_rate", "n_constant_cols"}
        if unknown:
            raise ConfigError(f"corruption has unknown keys {sorted(unknown)}")
        return cls(
            dup_rate=_as_float(doc.get("dup_rate", 0.0), "corruption.dup_rate"),
            nan_rate=_as_float(doc.get("nan_rate", 0.0), "corruption.nan_rate"),
            inf_rate=_as_float(doc.get("inf_rate", 0.0), "corruption.inf_rate"),
            n_constant_cols=_as_int(
                doc.get("n_constant_cols", 0), "corruption.n_constant_cols"
            ),
        )

    def to_dict(self) -> dict:
        return {
            "dup_rate": self.dup_rate,
            "nan_rate": self.nan_rate,
            "inf_rate": self.inf_rate,
            "n_constant_cols": self.n_constant_cols,
        }


@dataclass(frozen=True)
class TuningConfig:
    enabled: bool = False
    n_particles: int = 20
    n_iterations: int = 30
    holdout_fraction: float = 0.25
    inertia_start: float = 0.9
    inertia_end: float = 0.4
    cognitive: float = 2.0
    social: float = 2.0
    velocity_fraction: float = 0.2
    memoize: bool = True
    inertia_decay: bool = True
    velocity_clamp: bool = True
    seed_default_point: bool = True

    def __post_init__(self) -> None:
        if self.n_particles < 1:
            raise ConfigError("tuning.n_particles must be >= 1")
        if self.n_iterations < 0:
            raise ConfigError("tuning.n_iterations must be >= 0")
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ConfigError("tuning.holdout_fraction must be in (0, 1)")

    @classmethod
    def from_dict(cls, doc: Mapping) -> "TuningConfig":
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"tuning has unknown keys {sorted(unknown)}")
        return cls(**dict(doc))

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    dataset: DatasetConfig
    models: tuple[ModelSpec, ...]
    corruption: CorruptionConfig = CorruptionConfig()
    split_ratio: float = 0.8
    fit_scope: str = FIT_FULL_DATASET
    tuning: TuningConfig = TuningConfig()
    metric_mode: str = "weighted"
    output_dir: str = "out"
    formats: tuple[str, ...] = ("csv", "md", "json")

    def __post_init__(self) -> None:
        if not self.models and not self.tuning.enabled:
            raise ConfigError("config needs at least one model or tuning enabled")
        if self.metric_mode not in ("weighted", "macro"):
            raise ConfigError(
                f"metric_mode must be 'weighted' or 'macro', got {self.metric_mode!r}"
            )
        seen = set()
        for spec in self.models:
            if spec.type in seen:
                raise ConfigError(f"model {spec.type!r} listed twice")
            seen.add(spec.type)
        for fmt in self.formats:
            if fmt not in _FORMATS:
                raise ConfigError(f"unknown output format {fmt!r}; expected {list(_FORMATS)}")
        # PrepOptions re-validates ratio/scope ranges
        PrepOptions(split_ratio=self.split_ratio, fit_scope=self.fit_scope)

    @classmethod
    def from_dict(cls, doc: Mapping, base_dir: str | Path = ".") -> "ExperimentConfig":
        if not isinstance(doc, Mapping):
            raise ConfigError("config document must be a JSON object")
        base = Path(base_dir)
        known = {
            "seed", "dataset", "models", "corruption", "preprocess",
            "tuning", "metric_mode", "output_dir", "formats",
        }
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"config has unknown keys {sorted(unknown)}")
        seed = _as_int(_require(doc, "seed", "config"), "seed")
        dataset = DatasetConfig.from_dict(_require(doc, "dataset", "config"), base)
        models_value = doc.get("models", [])
        if not isinstance(models_value, (list, tuple)):
            raise ConfigError("models must be a list")
        models = tuple(
            ModelSpec.from_value(v, f"models[{i}]") for i, v in enumerate(models_value)
        )
        corruption = CorruptionConfig.from_dict(doc.get("corruption", {}))
        prep_doc = doc.get("preprocess", {})
        if not isinstance(prep_doc, Mapping):
            raise ConfigError("preprocess must be an object")
        prep_unknown = set(prep_doc) - {"split_ratio", "fit_scope"}
        if prep_unknown:
            raise ConfigError(f"preprocess has unknown keys {sorted(prep_unknown)}")
        tuning_doc = doc.get("tuning", {})
        if not isinstance(tuning_doc, Mapping):
            raise ConfigError("tuning must be an object")
        return cls(
            seed=seed,
            dataset=dataset,
            models=models,
            corruption=corruption,
            split_ratio=_as_float(prep_doc.get("split_ratio", 0.8), "preprocess.split_ratio"),
            fit_scope=str(prep_doc.get("fit_scope", FIT_FULL_DATASET)),
            tuning=TuningConfig.from_dict(tuning_doc),
            metric_mode=str(doc.get("metric_mode", "weighted")),
            output_dir=str(doc.get("output_dir", "out")),
            formats=tuple(str(f) for f in doc.get("formats", ["csv", "md", "json"])),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        return cls.from_dict(doc, base_dir=path.parent)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "dataset": self.dataset.to_dict(),
            "models": [m.to_value() for m in self.models],
            "corruption": self.corruption.to_dict(),
            "preprocess": {"split_ratio": self.split_ratio, "fit_scope": self.fit_scope},
            "tuning": self.tuning.to_dict(),
            "metric_mode": self.metric_mode,
            "output_dir": self.output_dir,
            "formats": list(self.formats),
        }

    def canonical_json(self) -> str:
        # output_dir and formats steer artifact placement, not results, so
        # they stay out of the hashed identity
        doc = self.to_dict()
        del doc["output_dir"]
        del doc["formats"]
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()
