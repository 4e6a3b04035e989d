"""Object-object and user-user similarity structures.

All object matrices are indexed ``[i, j]`` with ``j`` the source (collected)
object and ``i`` the target, so a user's scores are ``M @ f`` for the
0/1 history vector ``f``.

Construction goes through the co-occurrence product ``A diag(1/k(u)) A^T``
evaluated by sparse multiplication: only object pairs that share a user
are ever touched.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .graph import BipartiteGraph


class Kind(str, enum.Enum):
    NBI = "NBI"
    FSP = "FSP"
    BSP = "BSP"
    CSI = "CSI"
    ICNBI = "IC-NBI"
    USER_COSINE = "USER-COSINE"


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Square non-negative sparse matrix tagged with what it holds."""

    kind: Kind
    matrix: sp.csr_matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __getitem__(self, ij: tuple[int, int]) -> float:
        return float(self.matrix[ij])

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _safe_reciprocal(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    np.divide(1.0, x, out=out, where=x > 0)
    return out


def _csr(m) -> sp.csr_matrix:
    m = sp.csr_matrix(m)
    m.sum_duplicates()
    m.sort_indices()
    return m


def resource_overlap(graph: BipartiteGraph) -> sp.csr_matrix:
    """``C[i, j] = sum_l a_il a_jl / k(u_l)``, symmetric."""
    a = graph.adjacency
    c = a @ sp.diags(_safe_reciprocal(graph.user_degree)) @ a.T
    return _csr(c)


def common_users(graph: BipartiteGraph) -> sp.csr_matrix:
    """``[i, j]`` = number of users who collected both objects."""
    a = graph.adjacency
    return _csr(a @ a.T)


def nbi_weights(graph: BipartiteGraph) -> SimilarityMatrix:
    """Mass-diffusion weights ``w_ij = C_ij / k(o_j)``; columns of live objects sum to 1."""
    c = resource_overlap(graph)
    w = c @ sp.diags(_safe_reciprocal(graph.object_degree))
    return SimilarityMatrix(Kind.NBI, _csr(w))


def _column_normalize(m: sp.csr_matrix) -> sp.csr_matrix:
    sums = np.asarray(m.sum(axis=0)).ravel()
    return _csr(m @ sp.diags(_safe_reciprocal(sums)))


def forward_proportions(w: SimilarityMatrix) -> SimilarityMatrix:
    """``r_ij = w_ij / sum_i w_ij``: share of object j's outflow that reaches i."""
    if w.kind is not Kind.NBI:
        raise TypeError(f"expected NBI weights, got {w.kind.value}")
    return SimilarityMatrix(Kind.FSP, _column_normalize(w.matrix))


def backward_proportions(w: SimilarityMatrix) -> SimilarityMatrix:
    """Backward proportions, stored so that entry ``[j, i]`` is ``w_ji / sum_j w_ji``.

    The combination step reads entry ``[j, i]`` when correcting pair ``(i, j)``.
    """
    if w.kind is not Kind.NBI:
        raise TypeError(f"expected NBI weights, got {w.kind.value}")
    # the normalising sum runs over the first index of w_ji for fixed i,
    # i.e. over column i
    return SimilarityMatrix(Kind.BSP, _column_normalize(w.matrix))


def csi_similarity(fsp: SimilarityMatrix, bsp: SimilarityMatrix) -> SimilarityMatrix:
    """Corrected similarity ``s_ij = sqrt(r^FSP_ij * r^BSP_ji)``.

    Each unordered pair is computed once from the upper triangle and
    mirrored, so the result is exactly symmetric.
    """
    if fsp.kind is not Kind.FSP or bsp.kind is not Kind.BSP:
        raise TypeError(f"expected (FSP, BSP), got ({fsp.kind.value}, {bsp.kind.value})")
    if fsp.matrix.shape != bsp.matrix.shape:
        raise ValueError("FSP and BSP dimensions differ")
    prod = _csr(fsp.matrix.multiply(bsp.matrix.T))
    upper = sp.triu(prod, k=0, format="csr")
    upper.data = np.sqrt(upper.data)
    strict = sp.triu(upper, k=1, format="csr")
    s = _csr(upper + strict.T)
    s.eliminate_zeros()
    return SimilarityMatrix(Kind.CSI, s)


def csi_from_graph(graph: BipartiteGraph) -> SimilarityMatrix:
    """Full pipeline: NBI weights, both proportions, then the corrected similarity."""
    w = nbi_weights(graph)
    return csi_similarity(forward_proportions(w), backward_proportions(w))


def csi_closed_form(graph: BipartiteGraph) -> SimilarityMatrix:
    """``s_ij = C_ij / sqrt(k(o_i) k(o_j))``, algebraically equal to :func:`csi_from_graph`."""
    c = resource_overlap(graph)
    d = sp.diags(np.sqrt(_safe_reciprocal(graph.object_degree)))
    return SimilarityMatrix(Kind.CSI, _csr(d @ c @ d))


def degree_power(degree: np.ndarray, beta: float) -> np.ndarray:
    """``k**beta`` with zero for ``k == 0`` at every ``beta`` (including negative)."""
    degree = np.asarray(degree, dtype=np.float64)
    out = np.zeros_like(degree)
    live = degree > 0
    out[live] = degree[live] ** beta
    return out


def icnbi_weights(graph: BipartiteGraph, beta: float = 1.0, nbi: SimilarityMatrix | None = None) -> SimilarityMatrix:
    """``w^IC_ij = k(o_j)**beta * w_ij``; ``beta=0`` reproduces NBI."""
    w = nbi if nbi is not None else nbi_weights(graph)
    if w.kind is not Kind.NBI:
        raise TypeError(f"expected NBI weights, got {w.kind.value}")
    m = w.matrix @ sp.diags(degree_power(graph.object_degree, beta))
    return SimilarityMatrix(Kind.ICNBI, _csr(m))


def user_cosine(graph: BipartiteGraph) -> SimilarityMatrix:
    """User-user cosine ``s_ij = |Γ(u_i) ∩ Γ(u_j)| / sqrt(k(u_i) k(u_j))``."""
    a = graph.adjacency_csc
    d = sp.diags(np.sqrt(_safe_reciprocal(graph.user_degree)))
    overlap = _csr(a.T @ a)
    return SimilarityMatrix(Kind.USER_COSINE, _csr(d @ overlap @ d))


def sorensen(graph: BipartiteGraph) -> sp.csr_matrix:
    """Object-object ``|Γ(o_i) ∩ Γ(o_j)| / sqrt(k(o_i) k(o_j))`` used by intra-similarity."""
    d = sp.diags(np.sqrt(_safe_reciprocal(graph.object_degree)))
    return _csr(d @ common_users(graph) @ d)


def dump_matrix(path: str | Path, m: SimilarityMatrix) -> None:
    """Write stored entries as ``i<TAB>j<TAB>weight`` with 17 significant digits."""
    coo = m.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, j, v in zip(coo.row[order].tolist(), coo.col[order].tolist(), coo.data[order].tolist()):
            fh.write(f"{i}\t{j}\t{v:.17g}\n")
