"""Object-user bipartite graph and the random link split."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from . import _rng


class GraphError(ValueError):
    """Raised on out-of-range indices or an impossible split."""


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Unweighted undirected object-user network.

    ``objects[k], users[k]`` is the k-th link; links are unique and sorted by
    ``(object, user)``. Use :func:`build_graph` rather than the constructor.
    """

    num_objects: int
    num_users: int
    objects: np.ndarray
    users: np.ndarray
    object_degree: np.ndarray = field(repr=False)
    user_degree: np.ndarray = field(repr=False)

    @property
    def num_links(self) -> int:
        return int(self.objects.size)

    @property
    def links(self) -> set[tuple[int, int]]:
        return set(zip(self.objects.tolist(), self.users.tolist()))

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """``A`` with ``A[i, l] = 1`` iff object i is collected by user l."""
        data = np.ones(self.num_links, dtype=np.float64)
        return sp.csr_matrix(
            (data, (self.objects, self.users)), shape=(self.num_objects, self.num_users)
        )

    @cached_property
    def adjacency_csc(self) -> sp.csc_matrix:
        return self.adjacency.tocsc()

    def collected(self, user: int) -> np.ndarray:
        """Object indices collected by ``user`` (ascending)."""
        a = self.adjacency_csc
        return a.indices[a.indptr[user]:a.indptr[user + 1]].copy()

    def link_keys(self) -> np.ndarray:
        """Links encoded as ``object * num_users + user``; sorted ascending."""
        return self.objects * np.int64(self.num_users) + self.users

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (
            self.num_objects == other.num_objects
            and self.num_users == other.num_users
            and np.array_equal(self.objects, other.objects)
            and np.array_equal(self.users, other.users)
        )

    __hash__ = None  # type: ignore[assignment]


def _from_unique_keys(num_objects: int, num_users: int, keys: np.ndarray) -> BipartiteGraph:
    keys = np.asarray(keys, dtype=np.int64)
    objects = keys // max(num_users, 1)
    users = keys % max(num_users, 1)
    objects.setflags(write=False)
    users.setflags(write=False)
    ko = np.bincount(objects, minlength=num_objects).astype(np.int64)
    ku = np.bincount(users, minlength=num_users).astype(np.int64)
    ko.setflags(write=False)
    ku.setflags(write=False)
    return BipartiteGraph(num_objects, num_users, objects, users, ko, ku)


def build_graph(
    num_objects: int, num_users: int, links: Iterable[tuple[int, int]]
) -> BipartiteGraph:
    """Build a graph from ``(object, user)`` pairs; duplicates collapse."""
    if num_objects < 0 or num_users < 0:
        raise GraphError("counts must be non-negative")
    pairs = np.asarray(list(links) if not isinstance(links, np.ndarray) else links, dtype=np.int64)
    if pairs.size == 0:
        pairs = pairs.reshape(0, 2)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise GraphError("links must be (object, user) pairs")
    bad = (
        (pairs[:, 0] < 0) | (pairs[:, 0] >= num_objects) | (pairs[:, 1] < 0) | (pairs[:, 1] >= num_users)
    )
    if bad.any():
        o, u = pairs[np.argmax(bad)]
        raise GraphError(
            f"link (object={o}, user={u}) out of range for {num_objects} objects, {num_users} users"
        )
    keys = np.unique(pairs[:, 0] * np.int64(num_users) + pairs[:, 1])
    return _from_unique_keys(num_objects, num_users, keys)


@dataclass(frozen=True, eq=False)
class SplitDataset:
    """Training graph plus held-out test links over a shared index space."""

    training: BipartiteGraph
    test_objects: np.ndarray
    test_users: np.ndarray
    seed: int

    @property
    def num_objects(self) -> int:
        return self.training.num_objects

    @property
    def num_users(self) -> int:
        return self.training.num_users

    @property
    def num_test(self) -> int:
        return int(self.test_objects.size)

    @property
    def test_links(self) -> set[tuple[int, int]]:
        return set(zip(self.test_objects.tolist(), self.test_users.tolist()))

    @cached_property
    def test_graph(self) -> BipartiteGraph:
        return build_graph(
            self.num_objects, self.num_users, np.column_stack([self.test_objects, self.test_users])
        )

    def full_graph(self) -> BipartiteGraph:
        keys = np.union1d(self.training.link_keys(), self.test_graph.link_keys())
        return _from_unique_keys(self.num_objects, self.num_users, keys)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SplitDataset):
            return NotImplemented
        return (
            self.seed == other.seed
            and self.training == other.training
            and np.array_equal(self.test_objects, other.test_objects)
            and np.array_equal(self.test_users, other.test_users)
        )

    __hash__ = None  # type: ignore[assignment]


def split(graph: BipartiteGraph, test_fraction: float, seed: int) -> SplitDataset:
    """Hold out ``round(test_fraction * |E|)`` links drawn uniformly at random.

    The draw is a partial Fisher-Yates shuffle over the links in canonical
    ``(object, user)`` order, driven by ``PCG64(SeedSequence([seed, 0]))``;
    identical arguments give identical splits on every platform.
    """
    if not 0.0 < test_fraction < 1.0:
        raise GraphError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    total = graph.num_links
    if total == 0:
        raise GraphError("cannot split an empty graph")
    k = int(round(test_fraction * total))
    if k == 0 or k == total:
        raise GraphError(
            f"test_fraction={test_fraction} on {total} links leaves an empty "
            f"{'test' if k == 0 else 'training'} set"
        )
    bitgen = _rng.bit_generator(seed, _rng.SPLIT_STREAM)
    chosen = np.sort(_rng.sample_without_replacement(bitgen, total, k))
    mask = np.zeros(total, dtype=bool)
    mask[chosen] = True
    keys = graph.link_keys()
    training = _from_unique_keys(graph.num_objects, graph.num_users, keys[~mask])
    test_objects = graph.objects[mask].copy()
    test_users = graph.users[mask].copy()
    test_objects.setflags(write=False)
    test_users.setflags(write=False)
    return SplitDataset(training, test_objects, test_users, int(seed))
