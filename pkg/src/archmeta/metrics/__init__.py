"""Quality metrics: embeddings, structural deltas, and the score report."""

from .delta import (
    DEFAULT_DELTA_RELATIONS,
    GraphDelta,
    NamedGraph,
    graph_delta,
    model_delta,
    named_dependency_graph,
)
from .embedding import EmbeddingVector, cosine, dense_vector, lexical_embed, tokenize
from .scores import (
    DOCUMENT_GROUPS,
    METRIC_KEYS,
    METRIC_LABELS,
    MetricReport,
    completeness,
    completeness_ratio,
    constraint_effectiveness,
    document_groups,
    machine_readability,
    ordinal_score,
    pattern_coverage,
    score_report,
    semantic_fidelity,
    semantic_fidelity_between,
)

__all__ = [
    "DEFAULT_DELTA_RELATIONS",
    "GraphDelta",
    "NamedGraph",
    "graph_delta",
    "model_delta",
    "named_dependency_graph",
    "EmbeddingVector",
    "cosine",
    "dense_vector",
    "lexical_embed",
    "tokenize",
    "DOCUMENT_GROUPS",
    "METRIC_KEYS",
    "METRIC_LABELS",
    "MetricReport",
    "completeness",
    "completeness_ratio",
    "constraint_effectiveness",
    "document_groups",
    "machine_readability",
    "ordinal_score",
    "pattern_coverage",
    "score_report",
    "semantic_fidelity",
    "semantic_fidelity_between",
]
