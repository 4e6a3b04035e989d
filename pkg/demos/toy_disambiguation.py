"""
Breaking a diffusion tie with corrected similarity
==================================================

Three objects and six users. User u1 holds only o1, and o1 meets both
o2 and o3 through the same neighbour u2. Mass diffusion hands o2 and o3
the same weight, so it cannot say which one u1 should see first. The
corrected similarity also looks at how much of o2's mass comes back,
and o2 is popular, so its claim on o1 is weaker.

Run with ``python demos/toy_disambiguation.py``.
"""

import math

import numpy as np

from csirec import csi_from_graph, nbi_weights, score_propagation, top_l, UserHistory
from csirec.verify import toy_graph

g = toy_graph()
print("object degrees:", g.object_degree.tolist())
print("user degrees:  ", g.user_degree.tolist())

# %%
# Diffusion weights. Column j says where object j's resource ends up.
w = nbi_weights(g)
np.set_printoptions(precision=4, suppress=True)
print("\nNBI weights W:\n", w.toarray())
print(f"w21 = {w[1, 0]:.6f}, w31 = {w[2, 0]:.6f}  (tie)")

# %%
# Corrected similarity: geometric mean of the forward and backward shares.
s = csi_from_graph(g)
print("\nCSI similarity S:\n", s.toarray())
print(f"s21 = {s[1, 0]:.6f} (sqrt(1/90) = {math.sqrt(1 / 90):.6f})")
print(f"s31 = {s[2, 0]:.6f} (1/6 = {1 / 6:.6f})")

# %%
# Recommend to u1 with each matrix.
history = UserHistory.from_graph(g, 0)
for name, matrix in (("NBI", w), ("CSI", s)):
    rec = top_l(score_propagation(matrix, history), 2)
    items = ", ".join(f"o{o + 1}={v:.4f}" for o, v in rec.items)
    print(f"{name} list for u1: {items}")
