"""Canonical JSON serialization: fixpoint, structure preservation, strictness."""

from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from archmeta.diagrams import dumps_model, loads_model
from archmeta.errors import DanglingReferenceError, DiagramParseError
from archmeta.model import Entity, EntityKind, Relation, RelationKind, build_metamodel

from tests.support.strategies import random_model


def _structural_view(model):
    return (
        model.system,
        tuple((e.id, e.kind, e.name, e.layer, e.description) for e in sorted(model.entities, key=lambda e: e.id)),
        tuple(sorted((r.id, r.source, r.target, r.kind, r.label) for r in model.relations)),
        tuple(sorted((t.source, t.target, t.mapping_class.value, t.validity) for t in model.traces)),
        tuple(sorted(c.id for c in model.constraints)),
        tuple(sorted(d.name for d in model.diagrams)),
    )


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_roundtrip_reaches_fixpoint(seed):
    model = random_model(random.Random(seed))
    once = dumps_model(model)
    reparsed = loads_model(once)
    assert dumps_model(reparsed) == once
    assert _structural_view(reparsed) == _structural_view(model)


def test_dump_is_sorted_and_newline_terminated():
    ents = [
        Entity("z", EntityKind.Container, "Last"),
        Entity("a", EntityKind.Container, "First"),
    ]
    rels = [Relation("r2", "z", "a", RelationKind.dependency),
            Relation("r1", "a", "z", RelationKind.data_flow)]
    text = dumps_model(build_metamodel(ents, rels))
    doc = json.loads(text)
    assert [e["id"] for e in doc["entities"]] == ["a", "z"]
    assert [r["id"] for r in doc["relations"]] == ["r1", "r2"]
    assert doc["schema_version"] == "1.0"
    assert text.endswith("\n")


def test_loads_rejects_bad_documents():
    good = dumps_model(build_metamodel([Entity("a", EntityKind.System, "A")]))
    doc = json.loads(good)

    with pytest.raises(DiagramParseError):
        loads_model("not json at all {")

    wrong_version = dict(doc, schema_version="9.9")
    with pytest.raises(DiagramParseError):
        loads_model(json.dumps(wrong_version))

    unknown_key = dict(doc, surprise=True)
    with pytest.raises(DiagramParseError):
        loads_model(json.dumps(unknown_key))

    bad_kind = json.loads(good)
    bad_kind["entities"][0]["kind"] = "Starship"
    with pytest.raises(DiagramParseError):
        loads_model(json.dumps(bad_kind))


def test_loads_rejects_semantic_breakage():
    base = build_metamodel(
        [Entity("a", EntityKind.System, "A"), Entity("b", EntityKind.Container, "B")],
        [Relation("r", "a", "b", RelationKind.dependency)],
    )
    doc = json.loads(dumps_model(base))
    doc["relations"][0]["target"] = "ghost"
    with pytest.raises(DanglingReferenceError):
        loads_model(json.dumps(doc))


def test_lenient_mode_tolerates_unknown_keys():
    good = dumps_model(build_metamodel([Entity("a", EntityKind.System, "A")]))
    doc = json.loads(good)
    doc["entities"][0]["annotation"] = "kept out of the model"
    model = loads_model(json.dumps(doc), strict=False)
    assert model.entity("a").name == "A"
