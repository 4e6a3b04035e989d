"""Rating files to like-link graphs.

A :class:`RatingFormat` describes a delimited text layout. The format string
accepted by :meth:`RatingFormat.parse` is either a preset name
(``ml-100k``, ``ml-1m``, ``csv``) or ``key=value`` pairs joined by ``;``::

    sep=tab;fields=user,object,rating,-;header=0;scale=1:5

``-`` marks a column to ignore. ``sep`` accepts ``tab``, ``comma``,
``space``, ``semicolon``, ``pipe`` or a literal string.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Sequence

import numpy as np

from .graph import BipartiteGraph, build_graph


class IngestError(ValueError):
    """Malformed rating input or format string."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


_SEPARATORS = {"tab": "\t", "comma": ",", "space": " ", "semicolon": ";", "pipe": "|"}


@dataclass(frozen=True)
class RatingFormat:
    sep: str = "\t"
    fields: tuple[str, ...] = ("user", "object", "rating", "-")
    header: int = 0
    scale: tuple[float, float] = (1.0, 5.0)

    def __post_init__(self):
        for name in ("user", "object", "rating"):
            if self.fields.count(name) != 1:
                raise IngestError(f"format needs exactly one '{name}' field, got {self.fields}")
        if self.scale[0] > self.scale[1]:
            raise IngestError(f"empty rating scale {self.scale}")

    @classmethod
    def parse(cls, spec: str) -> "RatingFormat":
        if spec in PRESETS:
            return PRESETS[spec]
        kwargs: dict = {}
        for part in filter(None, (p.strip() for p in spec.split(";"))):
            key, eq, value = part.partition("=")
            if not eq:
                raise IngestError(f"bad format component {part!r}")
            key = key.strip()
            if key == "sep":
                kwargs["sep"] = _SEPARATORS.get(value, value)
            elif key == "fields":
                kwargs["fields"] = tuple(f.strip() for f in value.split(","))
            elif key == "header":
                kwargs["header"] = int(value)
            elif key == "scale":
                lo, _, hi = value.partition(":")
                kwargs["scale"] = (float(lo), float(hi))
            else:
                raise IngestError(f"unknown format key {key!r}")
        return cls(**kwargs)

    def describe(self) -> str:
        sep = next((k for k, v in _SEPARATORS.items() if v == self.sep), self.sep)
        lo, hi = self.scale
        return f"sep={sep};fields={','.join(self.fields)};header={self.header};scale={lo:g}:{hi:g}"


PRESETS = {
    "ml-100k": RatingFormat("\t", ("user", "object", "rating", "-"), 0, (1.0, 5.0)),
    "ml-1m": RatingFormat("::", ("user", "object", "rating", "-"), 0, (1.0, 5.0)),
    "csv": RatingFormat(",", ("user", "object", "rating"), 1, (1.0, 5.0)),
}


@dataclass(frozen=True)
class RatingRecord:
    user: str
    object: str
    rating: float


@dataclass(frozen=True)
class DatasetSummary:
    users: int
    objects: int
    links: int

    @property
    def sparsity(self) -> float:
        return self.links / (self.users * self.objects) if self.users and self.objects else 0.0

    def to_text(self) -> str:
        return (
            f"users\t{self.users}\nobjects\t{self.objects}\nlinks\t{self.links}\n"
            f"sparsity\t{self.sparsity!r}\n"
        )


@dataclass(frozen=True)
class IdMap:
    """Dense index -> original id, for objects and users."""

    objects: tuple[str, ...]
    users: tuple[str, ...]


def _open_text(source) -> io.TextIOBase:
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8", newline="")
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def parse_ratings(source: BinaryIO | str | os.PathLike, fmt: RatingFormat) -> list[RatingRecord]:
    """Parse every non-blank line after the header into a record.

    Raises :class:`IngestError` carrying the 1-based line number on arity
    mismatch, non-numeric rating, or a rating outside ``fmt.scale``.
    """
    iu, io_, ir = (fmt.fields.index(n) for n in ("user", "object", "rating"))
    lo, hi = fmt.scale
    records = []
    stream = _open_text(source)
    try:
        for lineno, raw in enumerate(stream, start=1):
            if lineno <= fmt.header:
                continue
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split(fmt.sep)
            if len(parts) != len(fmt.fields):
                raise IngestError(
                    f"expected {len(fmt.fields)} fields separated by {fmt.sep!r}, got {len(parts)}",
                    lineno,
                )
            try:
                rating = float(parts[ir])
            except ValueError:
                raise IngestError(f"rating {parts[ir]!r} is not a number", lineno) from None
            if not lo <= rating <= hi:
                raise IngestError(f"rating {rating:g} outside scale [{lo:g}, {hi:g}]", lineno)
            records.append(RatingRecord(parts[iu].strip(), parts[io_].strip(), rating))
    finally:
        if isinstance(source, (str, os.PathLike)):
            stream.close()
        elif stream is not source:
            stream.detach()
    return records


def threshold_links(
    records: Sequence[RatingRecord], like_threshold: float
) -> tuple[BipartiteGraph, DatasetSummary, IdMap]:
    """Keep a link (o, u) iff some record for (u, o) rates at least ``like_threshold``.

    Entities without a like-link are dropped. Dense indices follow the
    order of first appearance in ``records``.
    """
    liked = [r for r in records if r.rating >= like_threshold]
    liked_users = {r.user for r in liked}
    liked_objects = {r.object for r in liked}
    user_index: dict[str, int] = {}
    object_index: dict[str, int] = {}
    for r in records:
        if r.user in liked_users and r.user not in user_index:
            user_index[r.user] = len(user_index)
        if r.object in liked_objects and r.object not in object_index:
            object_index[r.object] = len(object_index)
    pairs = np.array(
        [(object_index[r.object], user_index[r.user]) for r in liked], dtype=np.int64
    ).reshape(-1, 2)
    graph = build_graph(len(object_index), len(user_index), pairs)
    summary = DatasetSummary(graph.num_users, graph.num_objects, graph.num_links)
    return graph, summary, IdMap(tuple(object_index), tuple(user_index))


def write_links(path: str | os.PathLike, graph: BipartiteGraph, ids: IdMap | None = None) -> None:
    """Write ``objectIndex<TAB>userIndex`` lines, plus ``<path>.ids`` if ``ids`` given."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for o, u in zip(graph.objects.tolist(), graph.users.tolist()):
            fh.write(f"{o}\t{u}\n")
    if ids is not None:
        with open(_ids_path(path), "w", encoding="utf-8", newline="\n") as fh:
            for i, name in enumerate(ids.objects):
                fh.write(f"object\t{i}\t{name}\n")
            for i, name in enumerate(ids.users):
                fh.write(f"user\t{i}\t{name}\n")


def _ids_path(path: Path) -> Path:
    return path.with_name(path.name + ".ids")


def read_ids(path: str | os.PathLike) -> IdMap:
    objects: list[str] = []
    users: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            kind, idx, name = line.rstrip("\n").split("\t", 2)
            target = objects if kind == "object" else users if kind == "user" else None
            if target is None or int(idx) != len(target):
                raise IngestError(f"bad id map entry {line.strip()!r}", lineno)
            target.append(name)
    return IdMap(tuple(objects), tuple(users))


def read_links(
    path: str | os.PathLike, num_objects: int | None = None, num_users: int | None = None
) -> tuple[BipartiteGraph, IdMap | None]:
    """Read a canonical link file; sizes come from the sidecar id map when present."""
    path = Path(path)
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise IngestError("expected 'object<TAB>user'", lineno)
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise IngestError(f"non-integer index in {line.strip()!r}", lineno) from None
    ids = read_ids(_ids_path(path)) if _ids_path(path).exists() else None
    arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    if num_objects is None:
        num_objects = len(ids.objects) if ids else int(arr[:, 0].max(initial=-1)) + 1
    if num_users is None:
        num_users = len(ids.users) if ids else int(arr[:, 1].max(initial=-1)) + 1
    return build_graph(num_objects, num_users, arr), ids


def load_like_graph(
    path: str | os.PathLike, fmt: RatingFormat, like_threshold: float
) -> tuple[BipartiteGraph, DatasetSummary, IdMap]:
    lo, hi = fmt.scale
    if not lo <= like_threshold <= hi:
        raise IngestError(f"threshold {like_threshold:g} outside scale [{lo:g}, {hi:g}]")
    return threshold_links(parse_ratings(path, fmt), like_threshold)


def summarize(graph: BipartiteGraph) -> DatasetSummary:
    users = int(np.count_nonzero(graph.user_degree))
    objects = int(np.count_nonzero(graph.object_degree))
    return DatasetSummary(users, objects, graph.num_links)

