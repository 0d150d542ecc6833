"""Front door for diagram parsing.

parse_diagram() is total: it never raises on bad input text, it returns a
Diagram with parse_status="failed" and a structured reason instead. Format
detection looks at the text itself; diagram type is inferred from the parsed
family where that is unambiguous (class, sequence, state, er) and left None
otherwise unless the caller supplies a hint.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from ..errors import (
    DiagramParseError,
    DiagramSyntaxError,
    UnsupportedConstructError,
)
from .canonical import parse_canonical
from .mermaid import parse_mermaid
from .plantuml import parse_plantuml
from .types import (
    ArtifactSet,
    ArtifactStatus,
    Diagram,
    DiagramEdge,
    DiagramElement,
    DiagramFormat,
    DiagramType,
    source_digest,
)

_MERMAID_HEADS = ("graph", "flowchart", "erDiagram", "sequenceDiagram", "stateDiagram-v2")

# family -> diagram type, where the notation alone pins the view type down.
_PLANTUML_FAMILY_TYPE = {
    "class": DiagramType.ClassModuleStructure,
    "sequence": DiagramType.SequenceInteraction,
    "state": DiagramType.StateMachine,
    "component": None,
}
_MERMAID_FAMILY_TYPE = {
    "er": DiagramType.DataModelSchema,
    "sequence": DiagramType.SequenceInteraction,
    "state": DiagramType.StateMachine,
    "graph": None,
}


def detect_format(text: str) -> DiagramFormat | None:
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("{"):
            return DiagramFormat.canonical
        if line == "@startuml":
            return DiagramFormat.plantuml
        head = line.split()[0]
        if head in _MERMAID_HEADS or line.rstrip(";") in _MERMAID_HEADS:
            return DiagramFormat.mermaid
        if line.startswith("'") or line.startswith("%%"):
            continue
        return None
    return None


def _coerce_format(format: DiagramFormat | str | None, text: str) -> DiagramFormat | None:
    if isinstance(format, DiagramFormat):
        return format
    if isinstance(format, str):
        return DiagramFormat(format)
    return detect_format(text)


def _coerce_type(type_hint: DiagramType | str | None) -> DiagramType | None:
    if type_hint is None or isinstance(type_hint, DiagramType):
        return type_hint
    return DiagramType(type_hint)


def _as_element(raw: dict) -> DiagramElement:
    props = raw.get("properties")
    if props is None:
        members = raw.get("members") or ()
        props = {"members": tuple(members)} if members else {}
    return DiagramElement(
        local_id=raw["local_id"],
        display_name=raw["display"],
        element_class=raw["cls"],
        properties=props,
    )


def _as_edge(raw: dict) -> DiagramEdge:
    return DiagramEdge(
        source=raw["source"],
        target=raw["target"],
        edge_class=raw["cls"],
        label=raw.get("label", ""),
        properties=raw.get("properties") or {},
    )


def _failure_reason(err: DiagramParseError) -> str:
    if isinstance(err, DiagramSyntaxError):
        return f"syntax: line {err.line}, col {err.col}: expected {err.expected}"
    if isinstance(err, UnsupportedConstructError):
        return f"unsupported: {err.construct} (line {err.line})"
    return str(err)


def parse_diagram(
    text: str,
    format: DiagramFormat | str | None = None,
    type_hint: DiagramType | str | None = None,
) -> Diagram:
    """Parse one diagram text. Never raises on malformed input."""
    digest = source_digest(text)
    hinted = _coerce_type(type_hint)
    fmt = _coerce_format(format, text)
    if fmt is None:
        return Diagram(
            format=DiagramFormat.plantuml,
            type=hinted,
            source_digest=digest,
            parse_status="failed",
            failure_reason="unrecognized format: expected canonical JSON, @startuml, or a mermaid header",
        )
    try:
        if fmt is DiagramFormat.canonical:
            elements, edges = parse_canonical(text)
            inferred = None
        elif fmt is DiagramFormat.plantuml:
            family, elements, edges = parse_plantuml(text)
            inferred = _PLANTUML_FAMILY_TYPE[family]
        else:
            family, elements, edges = parse_mermaid(text)
            inferred = _MERMAID_FAMILY_TYPE[family]
    except DiagramParseError as err:
        return Diagram(
            format=fmt,
            type=hinted,
            source_digest=digest,
            parse_status="failed",
            failure_reason=_failure_reason(err),
        )
    return Diagram(
        format=fmt,
        type=hinted if hinted is not None else inferred,
        elements=tuple(_as_element(e) for e in elements),
        edges=tuple(_as_edge(e) for e in edges),
        source_digest=digest,
    )


def check_parsability(
    artifacts: Iterable[tuple[str, str]],
    formats: Sequence[DiagramFormat | str | None] | None = None,
) -> ArtifactSet:
    """Audit a batch of (name, text) pairs; formats may pin each entry."""
    items = list(artifacts)
    fmts: list[DiagramFormat | str | None]
    if formats is None:
        fmts = [None] * len(items)
    else:
        fmts = list(formats)
        if len(fmts) != len(items):
            raise ValueError("formats must align one-to-one with artifacts")
    statuses = []
    for (name, text), fmt in zip(items, fmts):
        diagram = parse_diagram(text, format=fmt)
        statuses.append(
            ArtifactStatus(
                name=name,
                format=diagram.format,
                parse_status=diagram.parse_status,
                failure_reason=diagram.failure_reason,
            )
        )
    return ArtifactSet(artifacts=tuple(statuses))
