"""
From ratings to similarity matrices
===================================

Parses a handful of ratings, keeps the likes, and walks through every
similarity structure the library builds: diffusion weights, forward and
backward proportions, the corrected similarity, degree-reweighted
diffusion and the user cosine used by collaborative filtering.
"""

import io

import numpy as np

from csirec import (
    RatingFormat,
    backward_proportions,
    csi_closed_form,
    csi_similarity,
    forward_proportions,
    icnbi_weights,
    nbi_weights,
    parse_ratings,
    threshold_links,
    user_cosine,
)

np.set_printoptions(precision=3, suppress=True)

RATINGS = b"""alice\tdune\t5\t0
alice\tsolaris\t4\t0
bob\tdune\t4\t0
bob\tsolaris\t2\t0
bob\tsolaris\t5\t0
carol\tneuromancer\t5\t0
carol\tdune\t3\t0
dave\tneuromancer\t1\t0
"""

# %%
# Any record at or above the threshold makes a like-link. Bob's two
# ratings of solaris collapse into one link; dave only dislikes, so he
# is dropped.
records = parse_ratings(io.BytesIO(RATINGS), RatingFormat.parse("ml-100k"))
graph, summary, ids = threshold_links(records, 3)
print(summary.to_text())
print("objects:", ids.objects)
print("users:  ", ids.users)

# %%
# Diffusion weights and the two proportion matrices.
w = nbi_weights(graph)
fsp = forward_proportions(w)
bsp = backward_proportions(w)
print("\nW (columns sum to 1):\n", w.toarray())
print("column sums:", w.toarray().sum(axis=0))

# %%
# The corrected similarity is symmetric and has a closed form.
s = csi_similarity(fsp, bsp)
print("\nS:\n", s.toarray())
print("max |S - closed form| =", np.abs(s.toarray() - csi_closed_form(graph).toarray()).max())

# %%
# Degree reweighting: negative beta favours unpopular targets.
for beta in (-1.0, 0.0, 1.0):
    print(f"\nIC-NBI beta={beta:+.0f}:\n", icnbi_weights(graph, beta).toarray())

# %%
# User-user cosine.
print("\nuser cosine:\n", user_cosine(graph).toarray())
