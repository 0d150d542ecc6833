"""Canonical JSON interchange format (.archmeta.json).

One document fully describes a model: schema_version, system, entities,
relations, traces, constraints, diagrams. Serialization is deterministic
(fixed key order, arrays sorted, two-space indent, trailing newline) so equal
models produce byte-identical documents. Strict parsing rejects unknown
fields; non-strict ignores them.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from ..errors import DiagramSyntaxError
from ..model import (
    AbstractionLayer,
    Constraint,
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
    layer_of,
)

SCHEMA_VERSION = "1.0"

_TOP_KEYS = ("schema_version", "system", "entities", "relations", "traces",
             "constraints", "diagrams")
_ENTITY_KEYS = ("id", "kind", "name", "layer", "layer_override", "description",
                "attributes")
_RELATION_KEYS = ("id", "source", "target", "kind", "label")
_TRACE_KEYS = ("source", "target", "mapping_class")
_CONSTRAINT_KEYS = ("id", "kind", "scope", "params")
_DIAGRAM_KEYS = ("name", "type", "format", "source_digest")


def _fail(reason: str) -> DiagramSyntaxError:
    return DiagramSyntaxError(0, 0, reason)


def _check_keys(obj: Mapping[str, Any], allowed: tuple[str, ...], where: str,
                strict: bool) -> None:
    if not isinstance(obj, dict):
        raise _fail(f"{where}: object")
    if strict:
        unknown = sorted(set(obj) - set(allowed))
        if unknown:
            raise _fail(f"{where}: no unknown fields (got {', '.join(unknown)})")


def _str_field(obj: Mapping[str, Any], key: str, where: str,
               required: bool = True, default: str = "") -> str:
    if key not in obj:
        if required:
            raise _fail(f"{where}: field {key!r}")
        return default
    val = obj[key]
    if not isinstance(val, str):
        raise _fail(f"{where}: string value for {key!r}")
    return val


def _entity_from(obj: Mapping[str, Any], strict: bool) -> Entity:
    _check_keys(obj, _ENTITY_KEYS, "entity", strict)
    eid = _str_field(obj, "id", "entity")
    kind_name = _str_field(obj, "kind", f"entity {eid!r}")
    try:
        kind = EntityKind(kind_name)
    except ValueError:
        raise _fail(f"entity {eid!r}: known kind (got {kind_name!r})") from None
    name = _str_field(obj, "name", f"entity {eid!r}")
    layer_name = _str_field(obj, "layer", f"entity {eid!r}", required=False)
    if layer_name:
        try:
            layer = AbstractionLayer[layer_name]
        except KeyError:
            raise _fail(f"entity {eid!r}: known layer (got {layer_name!r})") from None
    else:
        layer = layer_of(kind)
    override = obj.get("layer_override", False)
    if not isinstance(override, bool):
        raise _fail(f"entity {eid!r}: boolean layer_override")
    attributes = obj.get("attributes", {})
    if not isinstance(attributes, dict):
        raise _fail(f"entity {eid!r}: object attributes")
    return Entity(
        id=eid, kind=kind, name=name, layer=layer, layer_override=override,
        description=_str_field(obj, "description", f"entity {eid!r}", required=False),
        attributes=attributes,
    )


def _relation_from(obj: Mapping[str, Any], strict: bool) -> Relation:
    _check_keys(obj, _RELATION_KEYS, "relation", strict)
    rid = _str_field(obj, "id", "relation")
    kind_name = _str_field(obj, "kind", f"relation {rid!r}")
    try:
        kind = RelationKind(kind_name)
    except ValueError:
        raise _fail(f"relation {rid!r}: known kind (got {kind_name!r})") from None
    return Relation(
        id=rid,
        source=_str_field(obj, "source", f"relation {rid!r}"),
        target=_str_field(obj, "target", f"relation {rid!r}"),
        kind=kind,
        label=_str_field(obj, "label", f"relation {rid!r}", required=False),
    )


def _trace_from(obj: Mapping[str, Any], strict: bool) -> TraceLink:
    _check_keys(obj, _TRACE_KEYS, "trace", strict)
    cls_name = _str_field(obj, "mapping_class", "trace")
    try:
        cls = MappingClass(cls_name)
    except ValueError:
        raise _fail(f"trace: known mapping_class (got {cls_name!r})") from None
    return TraceLink(
        source=_str_field(obj, "source", "trace"),
        target=_str_field(obj, "target", "trace"),
        mapping_class=cls,
    )


def _constraint_from(obj: Mapping[str, Any], strict: bool) -> Constraint:
    _check_keys(obj, _CONSTRAINT_KEYS, "constraint", strict)
    cid = _str_field(obj, "id", "constraint")
    kind_name = _str_field(obj, "kind", f"constraint {cid!r}")
    try:
        kind = ConstraintKind(kind_name)
    except ValueError:
        raise _fail(f"constraint {cid!r}: known kind (got {kind_name!r})") from None
    scope_obj = obj.get("scope") or {}
    if not isinstance(scope_obj, dict):
        raise _fail(f"constraint {cid!r}: object or null scope")
    scope: dict[str, tuple[str, ...]] = {}
    for key in ("layers", "entities"):
        if key in scope_obj:
            vals = scope_obj[key]
            if not isinstance(vals, list) or not all(isinstance(v, str) for v in vals):
                raise _fail(f"constraint {cid!r}: string array scope.{key}")
            scope[key] = tuple(vals)
    if strict:
        unknown = sorted(set(scope_obj) - {"layers", "entities"})
        if unknown:
            raise _fail(f"constraint {cid!r}: no unknown scope fields ({', '.join(unknown)})")
    params = obj.get("params", {})
    if not isinstance(params, dict):
        raise _fail(f"constraint {cid!r}: object params")
    return Constraint(id=cid, kind=kind, scope=scope, params=params)


def _diagram_ref_from(obj: Mapping[str, Any], strict: bool) -> DiagramRef:
    _check_keys(obj, _DIAGRAM_KEYS, "diagram reference", strict)
    return DiagramRef(
        name=_str_field(obj, "name", "diagram reference"),
        type=_str_field(obj, "type", "diagram reference"),
        format=_str_field(obj, "format", "diagram reference"),
        source_digest=_str_field(obj, "source_digest", "diagram reference",
                                 required=False),
    )


def _document(text: str, strict: bool) -> dict[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramSyntaxError(exc.lineno, exc.colno, "valid JSON") from None
    if not isinstance(doc, dict):
        raise _fail("top-level object")
    _check_keys(doc, _TOP_KEYS, "document", strict)
    version = _str_field(doc, "schema_version", "document")
    if version != SCHEMA_VERSION:
        raise _fail(f"schema_version {SCHEMA_VERSION!r} (got {version!r})")
    for key in ("entities", "relations", "traces", "constraints", "diagrams"):
        if key in doc and not isinstance(doc[key], list):
            raise _fail(f"document: array {key!r}")
    return doc


def loads_model(text: str, strict: bool = True) -> Metamodel:
    """Parse a canonical document into a validated Metamodel."""
    doc = _document(text, strict)
    return build_metamodel(
        entities=[_entity_from(o, strict) for o in doc.get("entities", ())],
        relations=[_relation_from(o, strict) for o in doc.get("relations", ())],
        traces=[_trace_from(o, strict) for o in doc.get("traces", ())],
        constraints=[_constraint_from(o, strict) for o in doc.get("constraints", ())],
        diagrams=[_diagram_ref_from(o, strict) for o in doc.get("diagrams", ())],
        system=_str_field(doc, "system", "document", required=False),
    )


def parse_canonical(text: str, strict: bool = True) -> tuple[list[dict], list[dict]]:
    """Diagram view of a canonical document: entities as elements, relations
    as edges. Element properties carry everything needed for exact lifting."""
    doc = _document(text, strict)
    entities = [_entity_from(o, strict) for o in doc.get("entities", ())]
    relations = [_relation_from(o, strict) for o in doc.get("relations", ())]
    ids = {e.id for e in entities}
    for r in relations:
        for end in (r.source, r.target):
            if end not in ids:
                raise _fail(f"relation {r.id!r}: declared endpoint (got {end!r})")
    elements = [
        {
            "local_id": e.id,
            "display": e.name,
            "cls": e.kind.value,
            "properties": {
                "layer": e.layer.name,
                "layer_override": e.layer_override,
                "description": e.description,
                "attributes": dict(e.attributes),
            },
        }
        for e in entities
    ]
    edges = [
        {
            "source": r.source, "target": r.target, "cls": r.kind.value,
            "label": r.label, "properties": {"id": r.id},
        }
        for r in relations
    ]
    return elements, edges


# --- serialization ---------------------------------------------------------

def _entity_obj(e: Entity) -> dict[str, Any]:
    return {
        "id": e.id,
        "kind": e.kind.value,
        "name": e.name,
        "layer": e.layer.name,
        "layer_override": e.layer_override,
        "description": e.description,
        "attributes": {k: e.attributes[k] for k in sorted(e.attributes)},
    }


def _relation_obj(r: Relation) -> dict[str, Any]:
    return {"id": r.id, "source": r.source, "target": r.target,
            "kind": r.kind.value, "label": r.label}


def _trace_obj(t: TraceLink) -> dict[str, Any]:
    return {"source": t.source, "target": t.target,
            "mapping_class": t.mapping_class.value}


def _constraint_obj(c: Constraint) -> dict[str, Any]:
    scope: dict[str, list[str]] = {}
    for key in ("layers", "entities"):
        vals = c.scope.get(key)
        if vals:
            scope[key] = sorted(vals)
    return {"id": c.id, "kind": c.kind.value, "scope": scope or None,
            "params": _normalize_params(c.params)}


def _normalize_params(params: Mapping[str, Any]) -> dict[str, Any]:
    return {k: params[k] for k in sorted(params)}


def _diagram_obj(d: DiagramRef) -> dict[str, Any]:
    return {"name": d.name, "type": d.type, "format": d.format,
            "source_digest": d.source_digest}


def dumps_model(model: Metamodel) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "system": model.system,
        "entities": [_entity_obj(e) for e in sorted(model.entities, key=lambda e: e.id)],
        "relations": [_relation_obj(r) for r in sorted(model.relations, key=lambda r: r.id)],
        "traces": [
            _trace_obj(t)
            for t in sorted(model.traces,
                            key=lambda t: (t.mapping_class.value, t.source, t.target))
        ],
        "constraints": [_constraint_obj(c) for c in sorted(model.constraints, key=lambda c: c.id)],
        "diagrams": [_diagram_obj(d) for d in sorted(model.diagrams, key=lambda d: d.name)],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
