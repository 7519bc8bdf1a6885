"""Declarative dataset profiles.

A profile tells the ingestion pipeline everything dataset-specific: which
columns to drop outright, which timestamp component columns to merge into
epoch-seconds columns, which column carries the class label, and the class
vocabulary. Two profiles ship built in, covering the two public flow-record
benchmarks this package targets; both are plain documents, so variant column
spellings can be handled with an inline or file-based profile instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import ConfigError

# Component order is fixed: year, month, day, hour, minute, second.
TIMESTAMP_COMPONENTS = ("year", "month", "day", "hour", "minute", "second")


@dataclass(frozen=True)
class TimestampMerge:
    """Six start-component and six end-component column names to fold into
    'stimestamp' / 'etimestamp' epoch-seconds columns."""

    start_columns: tuple[str, ...]
    end_columns: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.start_columns) != 6 or len(self.end_columns) != 6:
            raise ConfigError("timestamp merge needs 6 start and 6 end component columns")


@dataclass(frozen=True)
class DatasetProfile:
    name: str
    label_column: str
    class_names: tuple[str, ...]
    drop_columns: tuple[str, ...] = ()
    zero_columns_expected: tuple[str, ...] = ()
    timestamp_merge: TimestampMerge | None = None

    def to_dict(self) -> dict:
        doc: dict = {
            "name": self.name,
            "label_column": self.label_column,
            "class_names": list(self.class_names),
            "drop_columns": list(self.drop_columns),
            "zero_columns_expected": list(self.zero_columns_expected),
        }
        if self.timestamp_merge is not None:
            doc["timestamp_merge"] = {
                "start_columns": list(self.timestamp_merge.start_columns),
                "end_columns": list(self.timestamp_merge.end_columns),
            }
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "DatasetProfile":
        try:
            merge = None
            if doc.get("timestamp_merge") is not None:
                merge = TimestampMerge(
                    tuple(doc["timestamp_merge"]["start_columns"]),
                    tuple(doc["timestamp_merge"]["end_columns"]),
                )
            return cls(
                name=str(doc["name"]),
                label_column=str(doc["label_column"]),
                class_names=tuple(str(c) for c in doc["class_names"]),
                drop_columns=tuple(str(c) for c in doc.get("drop_columns", ())),
                zero_columns_expected=tuple(
                    str(c) for c in doc.get("zero_columns_expected", ())
                ),
                timestamp_merge=merge,
            )
        except KeyError as exc:
            raise ConfigError(f"profile document missing key {exc.args[0]!r}") from exc


# -- built-in profiles ------------------------------------------------------

# 2018 enterprise flow capture: 7 consolidated classes. The timestamp column
# is dropped to avoid learning collection order; the two rate columns carry
# divide-by-zero infinities in the wild and are dropped for parity with the
# row-level invalid filter.
CSE2018_CLASS_COUNTS: dict[str, int] = {
    "Benign": 13_484_708,
    "DDoS": 1_263_933,
    "DoS": 654_300,
    "Brute Force": 380_949,
    "Botnet": 286_191,
    "Infiltration": 161_934,
    "Web attacks": 987,
}

CSE2018_PROFILE = DatasetProfile(
    name="cse2018",
    label_column="Label",
    class_names=tuple(CSE2018_CLASS_COUNTS),
    drop_columns=("Timestamp", "Flow Byts/s", "Flow Pkts/s"),
    zero_columns_expected=(
        "Bwd PSH Flags",
        "Bwd URG Flags",
        "Fwd Byts/b Avg",
        "Fwd Pkts/b Avg",
        "Fwd Blk Rate Avg",
        "Bwd Byts/b Avg",
        "Bwd Pkts/b Avg",
        "Bwd Blk Rate Avg",
    ),
)

# 2020 academic-network flow capture: 13 classes, start/end timestamps stored
# as six calendar component columns each.
LITNET2020_CLASS_COUNTS: dict[str, int] = {
    "none": 36_423_860,
    "Smurf": 118_958,
    "ICMP-flood": 23_256,
    "UDP-flood": 93_583,
    "TCP SYN-flood": 1_580_016,
    "HTTP-flood": 22_959,
    "LAND attack": 52_417,
    "Blaster Worm": 24_291,
    "Code Red Worm": 1_255_702,
    "Spam bot's detection": 747,
    "Reaper Worm": 1_176,
    "Scanning/Spread": 6_232,
    "Packet fragmentation attack": 477,
}

_LITNET_ZERO_VARIANCE = (
    "fwd",
    "opkt",
    "obyt",
    "smk",
    "dmk",
    "dtos",
    "_dir",
    "nh",
    "nhb",
    "svln",
    "dvl",
    "ismc",
    "odmc",
    "idmc",
    "osmc",
    "mpls1",
    "mpls2",
    "mpls3",
    "mpls4",
    "mpls5",
    "mpls6",
    "mpls7",
    "mpls8",
    "mpls9",
    "mpls10",
    "cl",
    "sl",
    "al",
    "ra",
    "eng",
    "tr",
)

LITNET2020_PROFILE = DatasetProfile(
    name="litnet2020",
    label_column="attack_t",
    class_names=tuple(LITNET2020_CLASS_COUNTS),
    drop_columns=("ID", "attack_a"),
    zero_columns_expected=_LITNET_ZERO_VARIANCE,
    timestamp_merge=TimestampMerge(
        start_columns=tuple(f"ts_{c}" for c in TIMESTAMP_COMPONENTS),
        end_columns=tuple(f"te_{c}" for c in TIMESTAMP_COMPONENTS),
    ),
)

BUILTIN_PROFILES: dict[str, DatasetProfile] = {
    CSE2018_PROFILE.name: CSE2018_PROFILE,
    LITNET2020_PROFILE.name: LITNET2020_PROFILE,
}

BUILTIN_CLASS_COUNTS: dict[str, dict[str, int]] = {
    CSE2018_PROFILE.name: CSE2018_CLASS_COUNTS,
    LITNET2020_PROFILE.name: LITNET2020_CLASS_COUNTS,
}


def builtin_profile(name: str) -> DatasetProfile:
    try:
        return BUILTIN_PROFILES[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_PROFILES))
        raise ConfigError(f"unknown profile {name!r} (built in: {known})") from None


def builtin_class_ratios(name: str) -> dict[str, float]:
    """Class ratios derived from the published per-class record counts."""
    counts = BUILTIN_CLASS_COUNTS.get(name)
    if counts is None:
        known = ", ".join(sorted(BUILTIN_CLASS_COUNTS))
        raise ConfigError(f"unknown profile {name!r} (built in: {known})")
    total = sum(counts.values())
    return {cls: c / total for cls, c in counts.items()}
