"""archmeta: a layered architecture metamodel you can compute with.

Lift PlantUML/Mermaid/canonical-JSON diagrams into one typed multi-layer
graph, validate architectural constraints against it, measure traceability,
score regenerated architectures on seven quality metrics, and assemble
diagram-constrained prompt contexts for transformation workflows.
"""

from .constraints import (
    Constraint,
    ConstraintResult,
    consistency_score,
    constraints_from_json,
    evaluate_constraint,
    evaluate_constraints,
    load_preset_constraints,
    validate_constraint_params,
    violation_counts,
)
from .errors import ArchmetaError
from .model import (
    AbstractionLayer,
    ConstraintKind,
    DiagramRef,
    Entity,
    EntityKind,
    MappingClass,
    Metamodel,
    Relation,
    RelationKind,
    TraceLink,
    build_metamodel,
    dependency_graph,
    layer_of,
    validate_well_formed,
)
from .diagrams import (
    Diagram,
    DiagramFormat,
    DiagramType,
    check_parsability,
    detect_format,
    dumps_model,
    lift_diagram,
    lift_to_metamodel,
    loads_model,
    parse_diagram,
    render_diagram_view,
    serialize_metamodel,
)
from .extract import (
    ExpectedEntity,
    MatchReport,
    PatternHit,
    detect_patterns,
    detected_names,
    load_aliases,
    match_expected,
    match_names,
    normalize_name,
    scan_expected,
)
from .metrics import (
    GraphDelta,
    MetricReport,
    completeness,
    constraint_effectiveness,
    cosine,
    document_groups,
    graph_delta,
    lexical_embed,
    machine_readability,
    model_delta,
    named_dependency_graph,
    pattern_coverage,
    score_report,
    semantic_fidelity,
    semantic_fidelity_between,
)
from .prompts import (
    ContextBlock,
    assemble_prompt,
    render_context_block,
    select_diagram_set,
)
from .traces import TraceReport, matrix_to_tsv, trace_matrix, traceability_coverage

__version__ = "0.1.0"

__all__ = [
    "ArchmetaError",
    "AbstractionLayer",
    "ConstraintKind",
    "DiagramRef",
    "Entity",
    "EntityKind",
    "MappingClass",
    "Metamodel",
    "Relation",
    "RelationKind",
    "TraceLink",
    "build_metamodel",
    "dependency_graph",
    "layer_of",
    "validate_well_formed",
    "Constraint",
    "ConstraintResult",
    "consistency_score",
    "constraints_from_json",
    "evaluate_constraint",
    "evaluate_constraints",
    "load_preset_constraints",
    "validate_constraint_params",
    "violation_counts",
    "Diagram",
    "DiagramFormat",
    "DiagramType",
    "check_parsability",
    "detect_format",
    "dumps_model",
    "lift_diagram",
    "lift_to_metamodel",
    "loads_model",
    "parse_diagram",
    "render_diagram_view",
    "serialize_metamodel",
    "ExpectedEntity",
    "MatchReport",
    "PatternHit",
    "detect_patterns",
    "detected_names",
    "load_aliases",
    "match_expected",
    "match_names",
    "normalize_name",
    "scan_expected",
    "GraphDelta",
    "MetricReport",
    "completeness",
    "constraint_effectiveness",
    "cosine",
    "document_groups",
    "graph_delta",
    "lexical_embed",
    "machine_readability",
    "model_delta",
    "named_dependency_graph",
    "pattern_coverage",
    "score_report",
    "semantic_fidelity",
    "semantic_fidelity_between",
    "ContextBlock",
    "assemble_prompt",
    "render_context_block",
    "select_diagram_set",
    "TraceReport",
    "matrix_to_tsv",
    "trace_matrix",
    "traceability_coverage",
    "__version__",
]
