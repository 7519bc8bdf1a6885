"""Fit the whole model family on one synthetic dataset and print the table.

The baseline row shows what class imbalance alone buys; the tree rows show
what the features are actually worth.

    python3 demos/compare_tree_family.py
"""

from flowgate.config import ExperimentConfig
from flowgate.harness import format_real, run_experiment

config = ExperimentConfig.from_dict(
    {
        "seed": 11,
        "dataset": {
            "kind": "synthetic",
            "n_rows": 8_000,
            "class_names": ["benign", "flood", "scan", "bruteforce"],
            "class_ratios": [0.82, 0.10, 0.05, 0.03],
            "n_features": 8,
            "cluster_separation": 6.0,
        },
        "models": [
            "baseline",
            "dt",
            {"type": "rf", "n_trees": 25},
            {"type": "gbt", "n_rounds": 40, "learning_rate": 0.3},
        ],
    }
)

manifest = run_experiment(config)

header = ("classifier", "accuracy", "precision", "recall", "f1")
print(f"{header[0]:<12} {header[1]:>12} {header[2]:>12} {header[3]:>12} {header[4]:>12}")
for result in manifest.models:
    cells = [format_real(v) for v in result.report.as_row()]
    print(f"{result.name:<12} {cells[0]:>12} {cells[1]:>12} {cells[2]:>12} {cells[3]:>12}")

print()
worst = min(manifest.models, key=lambda m: m.report.accuracy)
best = max(manifest.models, key=lambda m: m.report.accuracy)
print(f"spread: {worst.name} {format_real(worst.report.accuracy)} -> "
      f"{best.name} {format_real(best.report.accuracy)}")
print(f"timings: " + ", ".join(f"{k.split(':')[-1]} {v:.2f}s"
                               for k, v in manifest.timings.items()
                               if k.startswith("model:")))
