"""Show what an always-majority classifier scores under weighted averaging.

With benign share r the weighted metrics collapse to closed forms:
accuracy r, precision r^2, recall r, f1 2r^2/(1+r). High accuracy on an
imbalanced test set is therefore the starting line, not an achievement.

    python3 demos/imbalance_baseline.py
"""

import numpy as np

from flowgate.metrics import confusion_matrix, evaluate
from flowgate.models.baseline import majority_baseline
from flowgate.models.tree import fit_tree, predict_tree
from flowgate.synth import SynthSpec, generate_flows

print(f"{'benign share':>12} {'accuracy':>10} {'precision':>10} "
      f"{'recall':>10} {'f1':>10}")
for share in (0.5, 0.7, 0.83, 0.887517178, 0.95, 0.99):
    n = 200_000
    n_benign = round(share * n)
    y_true = np.zeros(n, dtype=np.int64)
    y_true[n_benign:] = 1
    y_pred = np.zeros(n, dtype=np.int64)  # what a majority model emits
    report = evaluate(confusion_matrix(y_true, y_pred, 2))
    r = n_benign / n
    closed = (r, r * r, r, 2 * r * r / (1 + r))
    measured = report.as_row()
    assert all(abs(m - c) < 1e-12 for m, c in zip(measured, closed))
    print(f"{r:>12.6f} " + " ".join(f"{v:>10.6f}" for v in measured))

print("\nclosed forms hold to 1e-12 on every row above")

# a real model on the same imbalance, for contrast
spec = SynthSpec(
    n_rows=20_000,
    class_names=("benign", "attack"),
    class_ratios=(0.887517178, 0.112482822),
    cluster_separation=6.0,
    seed=1,
)
table = generate_flows(spec)
train = table.take_rows(np.arange(0, 16_000))
test = table.take_rows(np.arange(16_000, 20_000))

base = majority_baseline(train)
base_report = evaluate(confusion_matrix(test.labels, base.predict(test), 2))
tree = fit_tree(train)
tree_report = evaluate(
    confusion_matrix(test.labels, predict_tree(tree, test), 2)
)
print(f"\nmajority baseline f1 {base_report.f1:.6f} vs "
      f"decision tree f1 {tree_report.f1:.6f} on the same split")
