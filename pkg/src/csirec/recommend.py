"""Scoring and top-L lists for GRM, CF, NBI, IC-NBI and CSI.

Ranking order everywhere is: higher score first, then objects with training
degree > 0 before cold ones, then ascending object index.

Each recommender exposes two equivalent paths:

* ``scores(user)`` builds one user's :class:`ScoreVector` lazily by
  gathering matrix columns for the collected objects;
* ``score_block(users)`` returns raw scores for a batch of users as a dense
  ``(num_objects, len(users))`` array. Collected objects are *not* masked
  there; callers mask with the training adjacency.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .graph import BipartiteGraph
from .similarity import (
    Kind,
    SimilarityMatrix,
    csi_from_graph,
    icnbi_weights,
    nbi_weights,
    user_cosine,
)

METHODS = ("GRM", "CF", "NBI", "IC-NBI", "CSI")
PROPAGATION_KINDS = (Kind.NBI, Kind.ICNBI, Kind.CSI)


@dataclass(frozen=True, eq=False)
class UserHistory:
    user: int
    collected: np.ndarray

    @classmethod
    def from_graph(cls, graph: BipartiteGraph, user: int) -> "UserHistory":
        return cls(user, graph.collected(user))


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """Scores over a user's candidates (uncollected objects, ascending index)."""

    user: int
    candidates: np.ndarray
    scores: np.ndarray
    cold: np.ndarray

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.candidates.tolist(), self.scores.tolist()))

    def order(self) -> np.ndarray:
        """Positions into ``candidates`` sorted by the global ranking order."""
        return np.lexsort((self.candidates, self.cold, -self.scores))


@dataclass(frozen=True, eq=False)
class RecommendationList:
    user: int
    objects: np.ndarray
    scores: np.ndarray

    @property
    def items(self) -> list[tuple[int, float]]:
        return list(zip(self.objects.tolist(), self.scores.tolist()))

    def __len__(self) -> int:
        return int(self.objects.size)


def _candidates(num_objects: int, collected: np.ndarray) -> np.ndarray:
    mask = np.ones(num_objects, dtype=bool)
    mask[collected] = False
    return np.flatnonzero(mask)


def score_propagation(matrix: SimilarityMatrix, history: UserHistory) -> ScoreVector:
    """``f' = M f``: sum of the matrix columns of the collected objects."""
    if matrix.kind not in PROPAGATION_KINDS:
        raise TypeError(f"cannot propagate with a {matrix.kind.value} matrix")
    m = matrix.matrix
    n = matrix.dim
    cols = m[:, history.collected] if history.collected.size else None
    full = np.asarray(cols.sum(axis=1)).ravel() if cols is not None else np.zeros(n)
    cand = _candidates(n, history.collected)
    # objects without any stored row entry never co-occur with anything: cold
    cold = np.diff(m.indptr) == 0
    return ScoreVector(history.user, cand, full[cand], cold[cand])


def score_cf(user_sim: SimilarityMatrix, graph: BipartiteGraph, user: int) -> ScoreVector:
    """Similarity-weighted vote of the other users; zero denominator gives 0."""
    if user_sim.kind is not Kind.USER_COSINE:
        raise TypeError(f"expected USER-COSINE, got {user_sim.kind.value}")
    if not 0 <= user < graph.num_users:
        raise IndexError(f"user {user} out of range")
    col = user_sim.matrix[:, [user]].toarray().ravel()
    col[user] = 0.0
    den = col.sum()
    num = graph.adjacency @ col
    full = num / den if den > 0 else np.zeros(graph.num_objects)
    cand = _candidates(graph.num_objects, graph.collected(user))
    return ScoreVector(user, cand, full[cand], graph.object_degree[cand] == 0)


def score_grm(graph: BipartiteGraph, user: int) -> ScoreVector:
    if not 0 <= user < graph.num_users:
        raise IndexError(f"user {user} out of range")
    cand = _candidates(graph.num_objects, graph.collected(user))
    deg = graph.object_degree[cand]
    return ScoreVector(user, cand, deg.astype(np.float64), deg == 0)


def top_l(scores: ScoreVector, length: int) -> RecommendationList:
    if length < 1:
        raise ValueError("list length must be at least 1")
    pick = scores.order()[:length]
    return RecommendationList(scores.user, scores.candidates[pick], scores.scores[pick])


class Recommender:
    """Base for batch/lazy scoring over one training graph."""

    name: str

    def __init__(self, training: BipartiteGraph):
        self.training = training

    def scores(self, user: int) -> ScoreVector:
        raise NotImplementedError

    def score_block(self, users: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def recommend(self, user: int, length: int) -> RecommendationList:
        return top_l(self.scores(user), length)


class PropagationRecommender(Recommender):
    def __init__(self, training: BipartiteGraph, matrix: SimilarityMatrix, name: str | None = None):
        super().__init__(training)
        if matrix.kind not in PROPAGATION_KINDS:
            raise TypeError(f"cannot propagate with a {matrix.kind.value} matrix")
        self.matrix = matrix
        self.name = name or matrix.kind.value

    def scores(self, user: int) -> ScoreVector:
        return score_propagation(self.matrix, UserHistory.from_graph(self.training, user))

    def score_block(self, users: np.ndarray) -> np.ndarray:
        history = self.training.adjacency_csc[:, users]
        return (self.matrix.matrix @ history).toarray()


class CFRecommender(Recommender):
    name = "CF"

    def __init__(self, training: BipartiteGraph, user_sim: SimilarityMatrix | None = None):
        super().__init__(training)
        self.user_sim = user_sim if user_sim is not None else user_cosine(training)
        off = self.user_sim.matrix.tolil()
        off.setdiag(0.0)
        self._offdiag = off.tocsc()
        self._offdiag.eliminate_zeros()

    def scores(self, user: int) -> ScoreVector:
        return score_cf(self.user_sim, self.training, user)

    def score_block(self, users: np.ndarray) -> np.ndarray:
        sims = self._offdiag[:, users]
        num = (self.training.adjacency @ sims).toarray()
        den = np.asarray(sims.sum(axis=0)).ravel()
        out = np.zeros_like(num)
        live = den > 0
        out[:, live] = num[:, live] / den[live]
        return out


class GRMRecommender(Recommender):
    name = "GRM"

    def scores(self, user: int) -> ScoreVector:
        return score_grm(self.training, user)

    def score_block(self, users: np.ndarray) -> np.ndarray:
        deg = self.training.object_degree.astype(np.float64)
        return np.repeat(deg[:, None], len(users), axis=1)


class ModelCache:
    """Builds and memoises the similarity structures of one training graph."""

    def __init__(self, training: BipartiteGraph):
        self.training = training
        self._nbi: SimilarityMatrix | None = None
        self._csi: SimilarityMatrix | None = None

    @property
    def nbi(self) -> SimilarityMatrix:
        if self._nbi is None:
            self._nbi = nbi_weights(self.training)
        return self._nbi

    @property
    def csi(self) -> SimilarityMatrix:
        if self._csi is None:
            self._csi = csi_from_graph(self.training)
        return self._csi

    def recommender(self, method: str, beta: float | None = None) -> Recommender:
        if method == "GRM":
            return GRMRecommender(self.training)
        if method == "CF":
            return CFRecommender(self.training)
        if method == "NBI":
            return PropagationRecommender(self.training, self.nbi, "NBI")
        if method == "IC-NBI":
            if beta is None:
                raise ValueError("IC-NBI needs beta")
            w = icnbi_weights(self.training, beta, nbi=self.nbi)
            return PropagationRecommender(self.training, w, "IC-NBI")
        if method == "CSI":
            return PropagationRecommender(self.training, self.csi, "CSI")
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def write_lists(path: str | Path, lists: Iterable[RecommendationList]) -> None:
    """``userIndex<TAB>rank<TAB>objectIndex<TAB>score`` with 1-based rank."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in lists:
            for rank, (o, s) in enumerate(rec.items, start=1):
                fh.write(f"{rec.user}\t{rank}\t{o}\t{s:.17g}\n")


def read_lists(path: str | Path) -> list[RecommendationList]:
    rows: dict[int, list[tuple[int, float]]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            u, _, o, s = line.rstrip("\n").split("\t")
            rows.setdefault(int(u), []).append((int(o), float(s)))
    return [
        RecommendationList(u, np.array([o for o, _ in items], dtype=np.int64), np.array([s for _, s in items]))
        for u, items in sorted(rows.items())
    ]


def recommend_all(rec: Recommender, length: int, users: Sequence[int] | None = None) -> list[RecommendationList]:
    users = range(rec.training.num_users) if users is None else users
    return [rec.recommend(u, length) for u in users]
