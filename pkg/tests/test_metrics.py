import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import graphs, make_split
from csirec import oracle
from csirec.graph import build_graph, split
from csirec.metrics import (
    ProtocolError,
    auc,
    draw_auc_pairs,
    evaluate,
    hamming,
    intra_similarity,
    mean_std,
    popularity,
    pr_curve,
    precision_at,
    ranking_score,
    total_overlap,
)
from csirec.recommend import METHODS, ModelCache, RecommendationList, ScoreVector, read_lists, write_lists
from csirec.verify import random_graph

TOL = 1e-12


def vec(user, candidates, scores):
    candidates = np.asarray(candidates)
    return ScoreVector(user, candidates, np.asarray(scores, dtype=float), np.zeros(candidates.size, dtype=bool))


def lst(user, objects):
    return RecommendationList(user, np.asarray(objects, dtype=np.int64), np.zeros(len(objects)))


def ten_candidate_split():
    # one user, object 10 collected in training, object 2 held out
    training = build_graph(11, 1, [(10, 0)])
    return make_split(training, [(2, 0)])


def test_rank_third_of_ten():
    data = ten_candidate_split()
    scores = np.arange(10, 0, -1, dtype=float)  # candidate 2 sits third
    assert ranking_score([vec(0, range(10), scores)], data) == pytest.approx(0.3, abs=TOL)


def test_rank_full_tie():
    training = build_graph(5, 1, [(4, 0)])
    data = make_split(training, [(1, 0)])
    r = ranking_score([vec(0, range(4), np.zeros(4))], data)
    assert r == pytest.approx(0.625, abs=TOL)
    assert r * 4 == pytest.approx(oracle.mean_rank_over_permutations([0.0] * 4, 1), abs=TOL)


def test_rank_invariant_under_tie_permutations():
    scores = [2.0, 1.0, 1.0, 1.0, 0.0]
    training = build_graph(6, 1, [(5, 0)])
    for target in range(1, 4):
        data = make_split(training, [(target, 0)])
        values = set()
        for perm in itertools.permutations([1, 2, 3]):
            s = list(scores)
            for pos, obj in zip([1, 2, 3], perm):
                s[obj] = scores[pos]
            values.add(ranking_score([vec(0, range(5), s)], data))
        assert len(values) == 1 and values.pop() == pytest.approx(3 / 5, abs=TOL)


def test_rank_rejects_collected_test_object():
    training = build_graph(3, 1, [(0, 0)])
    data = make_split(training, [(0, 0)])
    with pytest.raises(ProtocolError):
        ranking_score([vec(0, [1, 2], [1.0, 0.0])], data)


def test_precision_examples():
    training = build_graph(60, 1, [(59, 0)])
    data = make_split(training, [(0, 0), (1, 0), (2, 0), (55, 0)])
    assert precision_at([lst(0, list(range(50)))], data, 50) == pytest.approx(0.06)
    assert precision_at([lst(0, list(range(3, 53)))], data, 50) == 0.0


def test_precision_averages_over_all_users():
    training = build_graph(4, 2, [(3, 0), (3, 1)])
    data = make_split(training, [(0, 0), (1, 1)])
    assert precision_at([lst(0, [0, 2])], data, 2) == pytest.approx(0.25)


def two_user_split():
    training = build_graph(5, 2, [(0, 0), (0, 1)])
    return make_split(training, [(1, 0), (2, 1)])


def test_auc_perfect_and_tied():
    data = two_user_split()
    perfect = [vec(0, [1, 2, 3, 4], [1, 0, 0, 0]), vec(1, [1, 2, 3, 4], [0, 1, 0, 0])]
    flat = [vec(u, [1, 2, 3, 4], np.zeros(4)) for u in (0, 1)]
    assert auc(perfect, data, n_samples=500, seed=1) == 1.0
    assert auc(perfect, data, exact=True) == 1.0
    assert auc(flat, data, n_samples=500, seed=1) == 0.5
    assert auc(flat, data, exact=True) == 0.5


def test_auc_pairs_are_irrelevant_and_reproducible():
    data = two_user_split()
    links, others = draw_auc_pairs(data, 2000, seed=3)
    l2, o2 = draw_auc_pairs(data, 2000, seed=3)
    assert np.array_equal(links, l2) and np.array_equal(others, o2)
    users = data.test_users[links]
    for u, o in zip(users.tolist(), others.tolist()):
        assert o not in {0, 1 if u == 0 else 2}
    # each user has three irrelevant objects, drawn uniformly
    counts = np.bincount(others[users == 0], minlength=5)
    assert counts[[2, 3, 4]].min() > 250


def test_exact_auc_matches_oracle():
    rng = np.random.default_rng(4)
    for _ in range(20):
        g = random_graph(rng, 10, 6)
        if g.num_links < 5:
            continue
        data = split(g, 0.3, 0)
        rec = ModelCache(data.training).recommender("NBI")
        vectors = [rec.scores(u) for u in range(g.num_users)]
        full = rec.score_block(np.arange(g.num_users))
        train = data.training.adjacency.toarray().astype(bool)
        test = data.test_graph.adjacency.toarray().astype(bool)
        try:
            got = auc(vectors, data, exact=True)
        except ProtocolError:
            continue
        assert got == pytest.approx(oracle.exact_auc(full, train, test), abs=TOL)


def test_intra_similarity_extremes():
    g = build_graph(4, 3, [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (3, 1)])
    assert intra_similarity([lst(0, [0, 1])], g) == pytest.approx(1.0, abs=TOL)
    assert intra_similarity([lst(0, [0, 2])], g) == 0.0


@given(graphs(max_objects=8, max_users=6))
@settings(max_examples=60, deadline=None)
def test_intra_similarity_matches_pairwise(g):
    a = g.adjacency.toarray()
    k = a.sum(axis=1)
    rng = np.random.default_rng(g.num_links)
    lists = [lst(u, rng.permutation(g.num_objects)[: min(3, g.num_objects)]) for u in range(g.num_users)]
    lists = [l for l in lists if len(l) >= 2]
    if not lists:
        return
    expected = []
    for l in lists:
        objs = l.objects.tolist()
        pairs = [(i, j) for i in objs for j in objs if i != j]
        vals = [a[i] @ a[j] / np.sqrt(k[i] * k[j]) if k[i] and k[j] else 0.0 for i, j in pairs]
        expected.append(sum(vals) / len(pairs))
    assert intra_similarity(lists, g) == pytest.approx(np.mean(expected), abs=TOL)


def test_hamming_examples():
    three = [lst(0, [0, 1]), lst(1, [0, 2]), lst(2, [1, 2])]
    assert hamming(three, 2) == pytest.approx(0.5, abs=TOL)
    assert hamming(three, 2) == oracle.hamming([[0, 1], [0, 2], [1, 2]], 2)
    counts = np.bincount(np.concatenate([l.objects for l in three]))
    assert int((counts * (counts - 1) // 2).sum()) == 3
    assert hamming([lst(u, [4, 5, 6]) for u in range(5)], 3) == 0.0
    assert np.isnan(hamming([lst(0, [1])], 1))


def test_hamming_exact_against_brute_force():
    rng = np.random.default_rng(9)
    for m in (2, 7, 50):
        lists = [rng.choice(30, size=5, replace=False) for _ in range(m)]
        assert total_overlap(lists) == oracle.pairwise_overlap([l.tolist() for l in lists])
        fast = hamming([lst(u, l) for u, l in enumerate(lists)], 5)
        assert fast == pytest.approx(oracle.hamming([l.tolist() for l in lists], 5), abs=TOL)


def test_popularity_constant():
    g = build_graph(2, 8, [(0, u) for u in range(7)] + [(1, 7)])
    assert popularity([lst(u, [0]) for u in range(3)], g) == 7.0


def test_grm_maximizes_popularity():
    rng = np.random.default_rng(11)
    for _ in range(25):
        g = random_graph(rng, 15, 10)
        cache = ModelCache(g)
        values = {}
        for method in METHODS:
            rec = cache.recommender(method, -0.7 if method == "IC-NBI" else None)
            lists = [rec.recommend(u, 4) for u in range(g.num_users)]
            if any(len(l) == 0 for l in lists):
                break
            values[method] = popularity(lists, g)
        else:
            assert values["GRM"] >= max(values.values()) - TOL


def test_pr_curve_shape():
    rng = np.random.default_rng(2)
    g = random_graph(rng, 20, 15)
    data = split(g, 0.2, 1)
    rec = ModelCache(data.training).recommender("CSI")
    vectors = [rec.scores(u) for u in range(g.num_users)]
    lengths = np.arange(1, g.num_objects + 1)
    curve = pr_curve(vectors, data, lengths)
    assert curve.recall[-1] == pytest.approx(1.0)
    assert np.all(np.diff(curve.recall) >= 0)
    hits = curve.recall * data.num_test
    assert np.allclose(curve.precision, hits / (g.num_users * lengths))
    with pytest.raises(ValueError):
        pr_curve(vectors, data, [3, 2])


@pytest.mark.parametrize("method", METHODS)
def test_evaluate_matches_standalone(method, tmp_path):
    rng = np.random.default_rng(5)
    g = random_graph(rng, 25, 25)
    data = split(g, 0.1, 3)
    rec = ModelCache(data.training).recommender(method, 0.3 if method == "IC-NBI" else None)
    pairs = draw_auc_pairs(data, 3000, seed=8)
    ev = evaluate(rec, data, length=5, auc_pairs=pairs, pr_lengths=[1, 2, 5, 10], exact_auc=True, chunk=7)
    vectors = [rec.scores(u) for u in range(g.num_users)]
    lists = [rec.recommend(u, 5) for u in range(g.num_users)]
    r = ev.report
    assert r.ranking_score == ranking_score(vectors, data)
    assert r.precision == precision_at(lists, data, 5)
    assert r.auc == auc(vectors, data, n_samples=3000, seed=8)
    assert ev.auc_exact == pytest.approx(auc(vectors, data, exact=True), abs=TOL)
    assert r.intra_similarity == intra_similarity(lists, data.training)
    assert r.hamming == hamming(lists, 5)
    assert r.popularity == popularity(lists, data.training)
    curve = pr_curve(vectors, data, [1, 2, 5, 10])
    assert np.array_equal(ev.curve.precision, curve.precision)

    # list-based measures recompute bit-for-bit from the dumped lists
    path = tmp_path / "lists.tsv"
    write_lists(path, ev.lists)
    back = read_lists(path)
    assert precision_at(back, data, 5) == r.precision
    assert hamming(back, 5) == r.hamming
    assert popularity(back, data.training) == r.popularity


def test_mean_std():
    assert mean_std([1.0]) == (1.0, 0.0)
    m, s = mean_std([1.0, 2.0, 3.0])
    assert m == 2.0 and s == pytest.approx(1.0)
