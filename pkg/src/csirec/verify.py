"""Self-check suite behind ``csirec verify``.

Runs structural identities and dense brute-force comparisons on the
built-in toy network and on seeded random graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import metrics, oracle
from . import similarity as simmod
from .graph import BipartiteGraph, build_graph, split
from .recommend import (
    CFRecommender,
    ModelCache,
    RecommendationList,
    ScoreVector,
    UserHistory,
    score_propagation,
)

TOL = 1e-12

# objects o1..o3 -> 0..2, users u1..u6 -> 0..5
TOY_LINKS = [(0, 0), (0, 1), (1, 1), (2, 1), (1, 2), (1, 3), (1, 4), (1, 5), (2, 5)]


def toy_graph() -> BipartiteGraph:
    """Three objects, six users: o2 has five users, o1 and o3 two each, one shared via u2."""
    return build_graph(3, 6, TOY_LINKS)


def random_graph(rng: np.random.Generator, max_objects: int = 30, max_users: int = 30) -> BipartiteGraph:
    n = int(rng.integers(2, max_objects + 1))
    m = int(rng.integers(2, max_users + 1))
    density = rng.uniform(0.1, 0.5)
    adj = rng.random((n, m)) < density
    o, u = np.nonzero(adj)
    return build_graph(n, m, np.column_stack([o, u]))


def random_graphs(count: int, seed: int = 0, **kw) -> Iterator[BipartiteGraph]:
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield random_graph(rng, **kw)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


def _max_diff(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def check_toy() -> Check:
    g = toy_graph()
    w = simmod.nbi_weights(g)
    s = simmod.csi_from_graph(g)
    expected = {
        "w21": (w[1, 0], 1 / 6),
        "w31": (w[2, 0], 1 / 6),
        "s21": (s[1, 0], math.sqrt(1 / 90)),
        "s31": (s[2, 0], 1 / 6),
    }
    bad = {k: v for k, v in expected.items() if abs(v[0] - v[1]) > TOL}
    history = UserHistory.from_graph(g, 0)
    csi_scores = score_propagation(s, history).as_dict()
    nbi_scores = score_propagation(w, history).as_dict()
    ok = not bad and csi_scores[2] > csi_scores[1] and nbi_scores[1] == nbi_scores[2]
    return Check("toy network: NBI ties o2/o3 for u1, CSI prefers o3", ok, f"mismatches={bad}" if bad else "")


def _over_graphs(name: str, graphs: list[BipartiteGraph], fn: Callable[[BipartiteGraph], float]) -> Check:
    worst = max(fn(g) for g in graphs)
    return Check(name, worst <= TOL, f"max deviation {worst:.3g}")


def _adj(g: BipartiteGraph) -> np.ndarray:
    return g.adjacency.toarray()


def check_nbi_oracle(graphs) -> Check:
    return _over_graphs(
        "NBI weights equal dense oracle", graphs, lambda g: _max_diff(simmod.nbi_weights(g).toarray(), oracle.nbi(_adj(g)))
    )


def check_csi_oracle(graphs) -> Check:
    return _over_graphs(
        "CSI pipeline equals dense oracle", graphs, lambda g: _max_diff(simmod.csi_from_graph(g).toarray(), oracle.csi(_adj(g)))
    )


def check_csi_closed_form(graphs) -> Check:
    def dev(g):
        pipe = simmod.csi_from_graph(g).toarray()
        return max(_max_diff(pipe, simmod.csi_closed_form(g).toarray()), _max_diff(pipe, oracle.csi_closed(_adj(g))))

    return _over_graphs("CSI pipeline equals closed form", graphs, dev)


def check_normalization(graphs) -> Check:
    def dev(g):
        sums = np.asarray(simmod.nbi_weights(g).matrix.sum(axis=0)).ravel()
        live = g.object_degree > 0
        return float(np.max(np.abs(sums[live] - 1.0), initial=0.0)) + float(np.abs(sums[~live]).sum())

    return _over_graphs("NBI columns of live objects sum to 1", graphs, dev)


def check_degree_balance(graphs) -> Check:
    def dev(g):
        w = simmod.nbi_weights(g).toarray()
        k = g.object_degree.astype(float)
        return _max_diff(w * k[None, :], (w * k[None, :]).T)

    return _over_graphs("k(o_j) w_ij = k(o_i) w_ji", graphs, dev)


def check_symmetry(graphs) -> Check:
    def dev(g):
        s = simmod.csi_from_graph(g).toarray()
        u = simmod.user_cosine(g).toarray()
        return max(_max_diff(s, s.T), _max_diff(u, u.T))

    return _over_graphs("CSI and user cosine symmetric", graphs, dev)


def check_ranges(graphs) -> Check:
    def dev(g):
        worst = 0.0
        for m in (simmod.csi_from_graph(g).toarray(), simmod.user_cosine(g).toarray()):
            worst = max(worst, float(np.max(m - 1.0, initial=0.0)), float(np.max(-m, initial=0.0)))
        return worst

    return _over_graphs("CSI and user cosine within [0, 1]", graphs, dev)


def check_sparsity(graphs) -> Check:
    def dev(g):
        s = simmod.csi_from_graph(g).toarray() != 0
        a = _adj(g)
        share = (a @ a.T) > 0
        return float(np.count_nonzero(s != share))

    return _over_graphs("CSI nonzero iff objects share a user", graphs, dev)


def check_cf_oracle(graphs) -> Check:
    def dev(g):
        a = _adj(g)
        worst = _max_diff(simmod.user_cosine(g).toarray(), oracle.user_cosine(a))
        rec = CFRecommender(g)
        for u in range(g.num_users):
            sv = rec.scores(u)
            worst = max(worst, _max_diff(sv.scores, oracle.cf_scores(a, u)[sv.candidates]))
        return worst

    return _over_graphs("CF similarity and scores equal dense oracle", graphs, dev)


def check_batch_equals_lazy(graphs) -> Check:
    def dev(g):
        cache = ModelCache(g)
        users = np.arange(g.num_users)
        worst = 0.0
        for method, beta in (("GRM", None), ("CF", None), ("NBI", None), ("IC-NBI", -0.5), ("CSI", None)):
            rec = cache.recommender(method, beta)
            block = rec.score_block(users)
            for u in users.tolist():
                sv = rec.scores(u)
                worst = max(worst, _max_diff(sv.scores, block[sv.candidates, u]))
        return worst

    return _over_graphs("per-user and batch scores agree", graphs, dev)


def check_hamming(seed: int) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    exact = True
    for _ in range(50):
        m = int(rng.integers(2, 51))
        n = int(rng.integers(6, 40))
        length = int(rng.integers(1, 6))
        lists = [rng.choice(n, size=length, replace=False) for _ in range(m)]
        recs = [RecommendationList(u, lst, np.zeros(length)) for u, lst in enumerate(lists)]
        fast = metrics.hamming(recs, length)
        slow = oracle.hamming([lst.tolist() for lst in lists], length)
        worst = max(worst, abs(fast - slow))
        exact &= metrics.total_overlap(lists) == oracle.pairwise_overlap([lst.tolist() for lst in lists])
    return Check(
        "Hamming aggregation equals pairwise brute force",
        exact and worst <= TOL,
        f"overlap sums {'identical' if exact else 'differ'}; H max deviation {worst:.3g}",
    )


def check_midrank(seed: int) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(30):
        size = int(rng.integers(1, 7))
        scores = rng.integers(0, 3, size=size).astype(float).tolist()
        target = int(rng.integers(0, size))
        sv = ScoreVector(0, np.arange(size), np.array(scores), np.zeros(size, dtype=bool))
        mid = metrics._user_rank_values(sv, np.array([target]))[0] * size
        worst = max(worst, abs(mid - oracle.mean_rank_over_permutations(scores, target)))
    return Check("mid-rank equals mean position over tie orders", worst <= TOL, f"max deviation {worst:.3g}")


def check_auc(seed: int, instances: int = 100, samples: int = 2000) -> Check:
    """Sampled AUC inside the 3-sigma binomial band of the exact value."""
    rng = np.random.default_rng(seed)
    inside = 0
    done = 0
    while done < instances:
        g = random_graph(rng, max_objects=12, max_users=8)
        if g.num_links < 4:
            continue
        data = split(g, 0.3, int(rng.integers(1 << 30)))
        cache = ModelCache(data.training)
        rec = cache.recommender("CSI")
        vectors = [rec.scores(u) for u in range(g.num_users)]
        pool = g.num_objects - g.user_degree[data.test_users]
        if pool.sum() == 0 or pool.sum() > 200:
            continue
        exact = metrics.auc(vectors, data, exact=True)
        sampled = metrics.auc(vectors, data, n_samples=samples, seed=int(rng.integers(1 << 30)))
        band = 3 * math.sqrt(exact * (1 - exact) / samples)
        inside += abs(sampled - exact) <= band + TOL
        done += 1
    return Check("sampled AUC within 3 sigma of exact", inside >= 0.99 * instances, f"{inside}/{instances} inside")


def check_split(graphs) -> Check:
    bad = 0
    for i, g in enumerate(graphs):
        if g.num_links < 10:
            continue
        a = split(g, 0.1, i)
        b = split(g, 0.1, i)
        train = set(zip(a.training.objects.tolist(), a.training.users.tolist()))
        test = a.test_links
        ok = (
            a == b
            and not (train & test)
            and (train | test) == g.links
            and abs(len(test) - round(0.1 * g.num_links)) <= 1
        )
        bad += not ok
    return Check("split disjoint, exhaustive, deterministic", bad == 0, f"{bad} failures")


def run_checks(graphs: int = 100, seed: int = 0) -> list[Check]:
    sample = list(random_graphs(graphs, seed))
    return [
        check_toy(),
        check_nbi_oracle(sample),
        check_csi_oracle(sample),
        check_csi_closed_form(sample),
        check_normalization(sample),
        check_degree_balance(sample),
        check_symmetry(sample),
        check_ranges(sample),
        check_sparsity(sample),
        check_cf_oracle(sample[:20]),
        check_batch_equals_lazy(sample[:20]),
        check_split(sample),
        check_hamming(seed),
        check_midrank(seed),
        check_auc(seed),
    ]
