"""Corrupt a synthetic flow table on purpose, then watch the pipeline clean it.

Every hazard the corruptor injects is written down in a ledger, so after the
preprocessing stages run we can check the cleaning counts line up exactly.

    python3 demos/clean_corrupted_flows.py
"""

from flowgate.profiles import builtin_profile
from flowgate.prep import PrepOptions, preprocess_pipeline
from flowgate.synth import SynthSpec, corrupt, generate_flows

profile = builtin_profile("cse2018")
spec = SynthSpec.from_profile_name(
    "cse2018", n_rows=20_000, cluster_separation=8.0, seed=7
)

table = generate_flows(spec)
print(f"generated {table.n_rows} rows, {len(profile.class_names)} classes")

raw, ledger = corrupt(
    table, dup_rate=0.05, nan_rate=0.01, inf_rate=0.002, n_constant_cols=2, seed=8
)
print(f"injected: {ledger.n_duplicate_rows} duplicate rows, "
      f"{len(ledger.nan_cells)} NaN cells, {len(ledger.inf_cells)} Inf cells, "
      f"constant columns {list(ledger.constant_columns)}")
print(f"corrupted table has {raw.n_rows} rows\n")

options = PrepOptions(split_ratio=0.8, seed=9)
split, report = preprocess_pipeline(raw, profile, options)

print("pipeline stages:")
for line in report.to_lines():
    print("  " + line)

# the poked rows are appended copies, so cleaning must recover every original
by_stage = {e.stage: e for e in report.entries}
invalid = by_stage["drop_invalid_rows"]
dups = by_stage["drop_duplicate_rows"]
const = by_stage["drop_zero_variance_columns"]
print()
print(f"invalid rows removed:   {invalid.rows_before - invalid.rows_after} "
      f"(ledger says {ledger.n_invalid_rows})")
print(f"duplicate rows removed: {dups.rows_before - dups.rows_after} "
      f"(ledger says {ledger.n_duplicate_rows})")
print(f"constant columns cut:   {const.columns_before - const.columns_after} "
      f"(ledger says {ledger.n_constant_columns})")
print(f"rows after cleaning:    {const.rows_after} "
      f"(started from {ledger.n_original_rows} pristine rows)")
print(f"train/test split:       {split.train.n_rows}/{split.test.n_rows}")
