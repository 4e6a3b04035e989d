"""Dense brute-force reference implementations.

Deliberately naive: explicit loops over a dense 0/1 adjacency, no shared
code with the sparse paths. Only suitable for small graphs; used by the
test-suite and by ``csirec verify``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def nbi(adj: np.ndarray) -> np.ndarray:
    n, m = adj.shape
    ko = adj.sum(axis=1)
    ku = adj.sum(axis=0)
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if ko[j] == 0:
                continue
            total = 0.0
            for l in range(m):
                if adj[i, l] and adj[j, l]:
                    total += 1.0 / ku[l]
            w[i, j] = total / ko[j]
    return w


def csi(adj: np.ndarray) -> np.ndarray:
    """Proportions by explicit sums, then the geometric-mean combination."""
    w = nbi(adj)
    n = w.shape[0]
    fsp = np.zeros_like(w)
    bsp = np.zeros_like(w)
    for i in range(n):
        for j in range(n):
            col_j = sum(w[x, j] for x in range(n))
            fsp[i, j] = w[i, j] / col_j if col_j else 0.0
            col_i = sum(w[x, i] for x in range(n))
            bsp[j, i] = w[j, i] / col_i if col_i else 0.0
    s = np.zeros_like(w)
    for i in range(n):
        for j in range(n):
            s[i, j] = math.sqrt(fsp[i, j] * bsp[j, i])
    return s


def csi_closed(adj: np.ndarray) -> np.ndarray:
    n, m = adj.shape
    ko = adj.sum(axis=1)
    ku = adj.sum(axis=0)
    s = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if ko[i] == 0 or ko[j] == 0:
                continue
            total = sum(1.0 / ku[l] for l in range(m) if adj[i, l] and adj[j, l])
            s[i, j] = total / math.sqrt(ko[i] * ko[j])
    return s


def user_cosine(adj: np.ndarray) -> np.ndarray:
    n, m = adj.shape
    ku = adj.sum(axis=0)
    s = np.zeros((m, m))
    for a in range(m):
        for b in range(m):
            if ku[a] and ku[b]:
                s[a, b] = sum(adj[l, a] * adj[l, b] for l in range(n)) / math.sqrt(ku[a] * ku[b])
    return s


def cf_scores(adj: np.ndarray, user: int) -> np.ndarray:
    n, m = adj.shape
    s = user_cosine(adj)
    den = sum(s[l, user] for l in range(m) if l != user)
    out = np.zeros(n)
    if den == 0:
        return out
    for j in range(n):
        out[j] = sum(s[l, user] * adj[j, l] for l in range(m) if l != user) / den
    return out


def pairwise_overlap(lists: list[list[int]]) -> int:
    """Sum over unordered list pairs of the number of shared items."""
    return sum(len(set(a) & set(b)) for a, b in itertools.combinations(lists, 2))


def hamming(lists: list[list[int]], length: int) -> float:
    pairs = list(itertools.combinations(range(len(lists)), 2))
    total = 0.0
    for a, b in pairs:
        q = len(set(lists[a]) & set(lists[b]))
        total += 1.0 - q / length
    return total / len(pairs)


def exact_auc(scores: np.ndarray, train: np.ndarray, test: np.ndarray) -> float:
    """Mean over test links of P(relevant beats a uniform never-collected object).

    ``scores``, ``train`` and ``test`` are dense ``(objects, users)`` arrays.
    """
    values = []
    n, m = scores.shape
    for u in range(m):
        irrelevant = [o for o in range(n) if not train[o, u] and not test[o, u]]
        if not irrelevant:
            continue
        for o in range(n):
            if not test[o, u]:
                continue
            credit = 0.0
            for x in irrelevant:
                if scores[o, u] > scores[x, u]:
                    credit += 1.0
                elif scores[o, u] == scores[x, u]:
                    credit += 0.5
            values.append(credit / len(irrelevant))
    return float(np.mean(values))


def mean_rank_over_permutations(scores: list[float], target: int) -> float:
    """Average 1-based position of ``target`` over every tie-breaking order."""
    n = len(scores)
    positions = []
    for perm in itertools.permutations(range(n)):
        order = sorted(perm, key=lambda i: -scores[i])  # stable: perm breaks ties
        positions.append(order.index(target) + 1)
    return float(np.mean(positions))
