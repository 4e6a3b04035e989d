"""Corrected-similarity inference (CSI) and network-based recommendation baselines."""

__version__ = "0.1.0"

from .graph import BipartiteGraph, GraphError, SplitDataset, build_graph, split
from .ingest import DatasetSummary, IngestError, RatingFormat, RatingRecord, parse_ratings, threshold_links
from .similarity import (
    Kind,
    SimilarityMatrix,
    backward_proportions,
    csi_closed_form,
    csi_from_graph,
    csi_similarity,
    forward_proportions,
    icnbi_weights,
    nbi_weights,
    user_cosine,
)
from .recommend import (
    METHODS,
    CFRecommender,
    GRMRecommender,
    ModelCache,
    PropagationRecommender,
    RecommendationList,
    ScoreVector,
    UserHistory,
    score_cf,
    score_grm,
    score_propagation,
    top_l,
)
from .metrics import (
    MetricReport,
    PRCurve,
    ProtocolError,
    auc,
    evaluate,
    hamming,
    intra_similarity,
    popularity,
    pr_curve,
    precision_at,
    ranking_score,
)

__all__ = [
    "BipartiteGraph", "GraphError", "SplitDataset", "build_graph", "split",
    "DatasetSummary", "IngestError", "RatingFormat", "RatingRecord", "parse_ratings", "threshold_links",
    "Kind", "SimilarityMatrix", "nbi_weights", "forward_proportions", "backward_proportions",
    "csi_similarity", "csi_from_graph", "csi_closed_form", "icnbi_weights", "user_cosine",
    "METHODS", "UserHistory", "ScoreVector", "RecommendationList", "score_propagation", "score_cf",
    "score_grm", "top_l", "PropagationRecommender", "CFRecommender", "GRMRecommender", "ModelCache",
    "MetricReport", "PRCurve", "ProtocolError", "ranking_score", "precision_at", "auc",
    "intra_similarity", "hamming", "popularity", "pr_curve", "evaluate",
]
