"""Accuracy, diversity and popularity measures for top-L recommendation.

Score-based measures (ranking score, AUC, precision-recall curve) take an
iterable of per-user :class:`~csirec.recommend.ScoreVector`; list-based
measures (precision, intra-similarity, Hamming distance, popularity) take
:class:`~csirec.recommend.RecommendationList` objects. :func:`evaluate` runs
everything for one recommender in a single chunked pass over users and
produces the same numbers.

Tie handling: the ranking score uses mid-ranks, AUC gives half credit to
exact ties, so neither depends on the list tie-break rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from . import _rng
from .graph import BipartiteGraph, SplitDataset
from .recommend import RecommendationList, Recommender, ScoreVector

METRIC_NAMES = ("ranking_score", "precision", "auc", "intra_similarity", "hamming", "popularity")


class ProtocolError(RuntimeError):
    """The split or the scores violate the evaluation protocol."""


@dataclass
class MetricReport:
    ranking_score: float
    precision: float
    auc: float
    intra_similarity: float
    hamming: float
    popularity: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


@dataclass
class PRCurve:
    lengths: np.ndarray
    precision: np.ndarray
    recall: np.ndarray

    def rows(self):
        return zip(self.lengths.tolist(), self.precision.tolist(), self.recall.tolist())


def _test_by_user(split: SplitDataset) -> list[np.ndarray]:
    """Test objects of every user, ascending."""
    tg = split.test_graph.adjacency_csc
    return [tg.indices[tg.indptr[u]:tg.indptr[u + 1]] for u in range(split.num_users)]


def _user_rank_values(sv: ScoreVector, test_objects: np.ndarray) -> np.ndarray:
    """``p / |O_j|`` per test object, ``p`` the 1-based mid-rank among candidates."""
    if test_objects.size == 0:
        return np.empty(0)
    loc = np.searchsorted(sv.candidates, test_objects)
    if np.any(loc >= sv.candidates.size) or np.any(sv.candidates[np.minimum(loc, sv.candidates.size - 1)] != test_objects):
        raise ProtocolError(f"user {sv.user}: test object is not a candidate (already collected)")
    srt = np.sort(sv.scores)
    vals = sv.scores[loc]
    right = np.searchsorted(srt, vals, side="right")
    left = np.searchsorted(srt, vals, side="left")
    greater = srt.size - right
    mid = greater + (right - left + 1) / 2.0
    return mid / sv.candidates.size


def _user_hit_positions(sv: ScoreVector, test_objects: np.ndarray) -> np.ndarray:
    """0-based positions of the test objects in the user's full ranking."""
    if test_objects.size == 0:
        return np.empty(0, dtype=np.int64)
    order = sv.order()
    pos = np.empty(order.size, dtype=np.int64)
    pos[order] = np.arange(order.size)
    return pos[np.searchsorted(sv.candidates, test_objects)]


def _user_exact_auc(sv: ScoreVector, test_objects: np.ndarray) -> np.ndarray:
    """Per test object, mean credit against every never-collected object."""
    if test_objects.size == 0:
        return np.empty(0)
    irrelevant = np.ones(sv.candidates.size, dtype=bool)
    irrelevant[np.searchsorted(sv.candidates, test_objects)] = False
    pool = np.sort(sv.scores[irrelevant])
    if pool.size == 0:
        return np.empty(0)
    vals = sv.scores[np.searchsorted(sv.candidates, test_objects)]
    below = np.searchsorted(pool, vals, side="left")
    tied = np.searchsorted(pool, vals, side="right") - below
    return (below + 0.5 * tied) / pool.size


def _as_vectors(scores: Mapping[int, ScoreVector] | Iterable[ScoreVector]) -> list[ScoreVector]:
    if isinstance(scores, Mapping):
        vectors = list(scores.values())
    else:
        vectors = list(scores)
    return sorted(vectors, key=lambda sv: sv.user)


def ranking_score(scores, split: SplitDataset) -> float:
    """Mean over test links of the link's relative mid-rank position."""
    by_user = _test_by_user(split)
    vectors = _as_vectors(scores)
    seen = {sv.user for sv in vectors}
    missing = [u for u in range(split.num_users) if by_user[u].size and u not in seen]
    if missing:
        raise ProtocolError(f"no scores for users with test links: {missing[:5]}")
    values = [_user_rank_values(sv, by_user[sv.user]) for sv in vectors]
    values = np.concatenate(values) if values else np.empty(0)
    if values.size == 0:
        raise ProtocolError("no test links to rank")
    return float(values.mean())


def precision_at(
    lists: Sequence[RecommendationList], split: SplitDataset, length: int, num_users: int | None = None
) -> float:
    """``(1/m) sum_j N_j / L`` over all ``m`` users (users without lists count 0)."""
    by_user = _test_by_user(split)
    m = split.num_users if num_users is None else num_users
    per_user = np.zeros(m)
    for rec in lists:
        top = rec.objects[:length]
        per_user[rec.user] = np.isin(top, by_user[rec.user], assume_unique=True).sum() / length
    return float(per_user.sum() / m)


def draw_auc_pairs(split: SplitDataset, n_samples: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``(test link index, irrelevant object)`` pairs.

    Test links are drawn uniformly from the test set; a draw whose user has
    no never-collected object is rejected and redrawn. The irrelevant object
    is uniform over objects the user has in neither training nor test.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    n = split.num_objects
    m = split.num_users
    pool = n - split.training.user_degree - np.bincount(split.test_users, minlength=m)
    valid = pool[split.test_users] > 0
    if not valid.any():
        raise ProtocolError("no test link has a non-empty irrelevant pool")
    bitgen = _rng.bit_generator(seed, _rng.AUC_STREAM)
    links = np.empty(n_samples, dtype=np.int64)
    todo = np.arange(n_samples)
    while todo.size:
        draw = _rng.uniform_below_many(bitgen, np.full(todo.size, split.num_test))
        ok = valid[draw]
        links[todo[ok]] = draw[ok]
        todo = todo[~ok]
    full_keys = np.sort(np.concatenate([split.training.link_keys(), split.test_graph.link_keys()]))
    users = split.test_users[links].astype(np.int64)
    others = np.empty(n_samples, dtype=np.int64)
    todo = np.arange(n_samples)
    while todo.size:
        draw = _rng.uniform_below_many(bitgen, np.full(todo.size, n))
        keys = draw * np.int64(m) + users[todo]
        hit = np.searchsorted(full_keys, keys)
        taken = (hit < full_keys.size) & (full_keys[np.minimum(hit, full_keys.size - 1)] == keys)
        others[todo[~taken]] = draw[~taken]
        todo = todo[taken]
    return links, others


def _lookup(sv: ScoreVector, objects: np.ndarray) -> np.ndarray:
    return sv.scores[np.searchsorted(sv.candidates, objects)]


def auc(
    scores,
    split: SplitDataset,
    n_samples: int = 1_000_000,
    seed: int = 0,
    exact: bool = False,
) -> float:
    """``(n' + 0.5 n'') / n`` over sampled relevant/irrelevant pairs.

    ``exact=True`` returns the expectation of the sampled estimator instead:
    the mean over test links of the win rate against the user's whole
    irrelevant pool.
    """
    vectors = {sv.user: sv for sv in _as_vectors(scores)}
    if exact:
        by_user = _test_by_user(split)
        parts = [_user_exact_auc(vectors[u], by_user[u]) for u in sorted(vectors)]
        values = np.concatenate(parts) if parts else np.empty(0)
        if values.size == 0:
            raise ProtocolError("no test link has a non-empty irrelevant pool")
        return float(values.mean())
    links, others = draw_auc_pairs(split, n_samples, seed)
    return _sampled_auc(vectors.get, split, links, others)


def _sampled_auc(get_vector, split: SplitDataset, links: np.ndarray, others: np.ndarray) -> float:
    users = split.test_users[links]
    rel = split.test_objects[links]
    order = np.argsort(users, kind="stable")
    bounds = np.flatnonzero(np.diff(users[order])) + 1
    wins = ties = 0
    for group in np.split(order, bounds):
        if group.size == 0:
            continue
        sv = get_vector(int(users[group[0]]))
        a = _lookup(sv, rel[group])
        b = _lookup(sv, others[group])
        wins += int(np.count_nonzero(a > b))
        ties += int(np.count_nonzero(a == b))
    return (wins + 0.5 * ties) / links.size


def intra_similarity(lists: Sequence[RecommendationList], training: BipartiteGraph) -> float:
    """Mean over users of the average pairwise Sørensen similarity inside each list.

    Uses ``sum_{i != j in R} s_ij = ||A^T D^{-1/2} 1_R||^2 - #{live i in R}``;
    lists shorter than two are skipped.
    """
    lists = [rec for rec in lists if len(rec) >= 2]
    if not lists:
        return float("nan")
    deg = training.object_degree.astype(np.float64)
    inv_sqrt = np.zeros_like(deg)
    np.divide(1.0, np.sqrt(deg), out=inv_sqrt, where=deg > 0)
    rows = np.concatenate([rec.objects for rec in lists])
    cols = np.repeat(np.arange(len(lists)), [len(rec) for rec in lists])
    x = sp.csc_matrix((inv_sqrt[rows], (rows, cols)), shape=(training.num_objects, len(lists)))
    y = (training.adjacency.T @ x).tocsc()
    sq = np.asarray(y.multiply(y).sum(axis=0)).ravel()
    live = np.bincount(cols, weights=(deg[rows] > 0).astype(np.float64), minlength=len(lists))
    lengths = np.array([len(rec) for rec in lists], dtype=np.float64)
    per_user = np.maximum(sq - live, 0.0) / (lengths * (lengths - 1))
    return float(per_user.mean())


def total_overlap(lists: Sequence[np.ndarray]) -> int:
    """``sum_o C(c_o, 2)``: shared items summed over all unordered list pairs."""
    if not lists:
        return 0
    counts = np.bincount(np.concatenate(lists)).astype(np.int64)
    return int((counts * (counts - 1) // 2).sum())


def hamming(lists: Sequence[RecommendationList], length: int) -> float:
    """Mean ``1 - Q/L`` over unordered pairs of users whose list has exactly ``L`` items.

    ``sum_{pairs} Q = sum_o C(c_o, 2)`` with ``c_o`` the number of lists
    holding object ``o``. Returns NaN with fewer than two such users.
    """
    full = [rec.objects for rec in lists if len(rec) == length]
    users = len(full)
    if users < 2:
        return float("nan")
    overlap = total_overlap(full)
    pairs = users * (users - 1) // 2
    return 1.0 - overlap / (length * pairs)


def popularity(lists: Sequence[RecommendationList], training: BipartiteGraph) -> float:
    """Mean training degree over every recommended item."""
    items = [rec.objects for rec in lists if len(rec)]
    if not items:
        raise ValueError("no recommended items")
    objs = np.concatenate(items)
    return float(training.object_degree[objs].sum() / objs.size)


def _curve(hit_positions: np.ndarray, lengths: np.ndarray, num_users: int, num_test: int) -> PRCurve:
    hist = np.bincount(hit_positions, minlength=int(lengths.max()) if lengths.size else 0)
    cum = np.concatenate([[0], np.cumsum(hist)])
    hits = cum[np.minimum(lengths, cum.size - 1)]
    return PRCurve(lengths.copy(), hits / (num_users * lengths), hits / num_test)


def pr_curve(scores, split: SplitDataset, lengths: Sequence[int]) -> PRCurve:
    """Precision (all-user average) and recall ``l/|E^P|`` at each list length."""
    lengths = np.asarray(lengths, dtype=np.int64)
    if lengths.size == 0 or np.any(np.diff(lengths) <= 0) or lengths[0] < 1:
        raise ValueError("lengths must be a non-empty ascending sequence of positive ints")
    by_user = _test_by_user(split)
    parts = [_user_hit_positions(sv, by_user[sv.user]) for sv in _as_vectors(scores)]
    pos = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    return _curve(pos, lengths, split.num_users, split.num_test)


@dataclass
class Evaluation:
    method: str
    report: MetricReport
    lists: list[RecommendationList] = field(repr=False)
    curve: PRCurve | None = field(default=None, repr=False)
    auc_exact: float | None = None


def vector_from_column(user: int, column: np.ndarray, training: BipartiteGraph) -> ScoreVector:
    a = training.adjacency_csc
    collected = a.indices[a.indptr[user]:a.indptr[user + 1]]
    mask = np.ones(column.size, dtype=bool)
    mask[collected] = False
    cand = np.flatnonzero(mask)
    return ScoreVector(user, cand, column[cand], training.object_degree[cand] == 0)


def evaluate(
    rec: Recommender,
    split: SplitDataset,
    length: int = 50,
    auc_pairs: tuple[np.ndarray, np.ndarray] | None = None,
    pr_lengths: Sequence[int] | None = None,
    exact_auc: bool = False,
    chunk: int = 2048,
) -> Evaluation:
    """All six measures (plus optional PR curve) in one pass over user chunks.

    ``auc_pairs`` comes from :func:`draw_auc_pairs`; sharing one draw across
    methods compares them on identical samples.
    """
    training = split.training
    m = split.num_users
    by_user = _test_by_user(split)
    rank_parts: list[np.ndarray] = []
    hit_parts: list[np.ndarray] = []
    exact_parts: list[np.ndarray] = []
    lists: list[RecommendationList] = []
    if auc_pairs is not None:
        links, others = auc_pairs
        s_users = split.test_users[links]
        s_order = np.argsort(s_users, kind="stable")
        s_sorted = s_users[s_order]
        rel = split.test_objects[links]
        wins = ties = 0
    for start in range(0, m, chunk):
        users = np.arange(start, min(start + chunk, m))
        block = rec.score_block(users)
        for c, u in enumerate(users.tolist()):
            column = block[:, c]
            sv = vector_from_column(u, column, training)
            tests = by_user[u]
            rank_parts.append(_user_rank_values(sv, tests))
            order = sv.order()
            pick = order[:length]
            lists.append(RecommendationList(u, sv.candidates[pick], sv.scores[pick]))
            if pr_lengths is not None and tests.size:
                pos = np.empty(order.size, dtype=np.int64)
                pos[order] = np.arange(order.size)
                hit_parts.append(pos[np.searchsorted(sv.candidates, tests)])
            if exact_auc:
                exact_parts.append(_user_exact_auc(sv, tests))
            if auc_pairs is not None:
                lo, hi = np.searchsorted(s_sorted, [u, u + 1])
                if hi > lo:
                    idx = s_order[lo:hi]
                    # sampled objects are never collected, so the raw column holds their scores
                    a = column[rel[idx]]
                    b = column[others[idx]]
                    wins += int(np.count_nonzero(a > b))
                    ties += int(np.count_nonzero(a == b))
    ranks = np.concatenate(rank_parts)
    if ranks.size == 0:
        raise ProtocolError("no test links to rank")
    auc_value = (wins + 0.5 * ties) / links.size if auc_pairs is not None else float("nan")
    report = MetricReport(
        ranking_score=float(ranks.mean()),
        precision=precision_at(lists, split, length),
        auc=auc_value,
        intra_similarity=intra_similarity(lists, training),
        hamming=hamming(lists, length),
        popularity=popularity(lists, training),
    )
    curve = None
    if pr_lengths is not None:
        lengths = np.asarray(pr_lengths, dtype=np.int64)
        pos = np.concatenate(hit_parts) if hit_parts else np.empty(0, dtype=np.int64)
        curve = _curve(pos, lengths, m, split.num_test)
    exact = None
    if exact_auc:
        values = np.concatenate(exact_parts)
        exact = float(values.mean()) if values.size else float("nan")
    return Evaluation(rec.name, report, lists, curve, exact)


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (0 for a single value)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return math.nan, math.nan
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), std
