"""
Precision and recall as the list grows
======================================

Sweeps the list length from 1 to 100 on one MovieLens split and prints
a coarse precision/recall table per method, plus an ASCII sketch of the
recall axis.
"""

import numpy as np

from csirec import datasets
from csirec.experiment import ExperimentConfig, run_experiment

config = ExperimentConfig(
    dataset=str(datasets.movielens_100k()),
    runs=1,
    auc_samples=0,
    pr_lengths=tuple(range(1, 101)),
)
result = run_experiment(config, want_auc=False)
curves = result.mean_curves()

# %%
# Table at a few list lengths.
show = [1, 5, 10, 20, 50, 100]
print(f"{'method':<8s} " + "  ".join(f"{f'L={l} P / R':<15s}" for l in show))
for method, curve in curves.items():
    cells = []
    for l in show:
        i = l - 1
        cells.append(f"{curve.precision[i]:.4f} / {curve.recall[i]:.4f}")
    print(f"{method:<8s} " + "  ".join(cells))

# %%
# Recall at L=100, scaled to 60 characters.
top = max(c.recall[-1] for c in curves.values())
for method, curve in curves.items():
    bar = "#" * int(np.round(60 * curve.recall[-1] / top))
    print(f"{method:<8s} {bar} {curve.recall[-1]:.3f}")
