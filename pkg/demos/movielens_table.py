"""
Comparing five recommenders on MovieLens 100k
=============================================

Downloads (once) the public MovieLens 100k ratings, keeps ratings of 3
or more as likes, and evaluates the popularity baseline, collaborative
filtering, mass diffusion, degree-reweighted diffusion and the corrected
similarity on seeded 90/10 splits.

``python demos/movielens_table.py [runs]``; one run takes about 20 s.
The full ten-run table is what ``csirec run --dataset builtin:ml-100k``
prints.
"""

import sys

from csirec import datasets
from csirec.experiment import ExperimentConfig, format_table, run_experiment

runs = int(sys.argv[1]) if len(sys.argv) > 1 else 2

config = ExperimentConfig(dataset=str(datasets.movielens_100k()), runs=runs, auc_samples=1_000_000)
result = run_experiment(config, progress=print)

# %%
# Mean (standard deviation) over runs. Lower is better for ranking
# score, intra-similarity and popularity.
print()
print(format_table(result))

# %%
# Which beta did the reweighted diffusion pick on each run?
for r, chosen in enumerate(result.betas, start=1):
    print(f"run {r}: " + ", ".join(f"{k}: {v:+.1f}" for k, v in chosen.items()))
