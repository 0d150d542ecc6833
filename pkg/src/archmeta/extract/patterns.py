"""Detect architectural patterns structurally.

Every detector is a pure predicate over the model graph returning evidence
ids when it fires. Detection is intentionally conservative: a pattern is
reported only when its structural signature is complete, so renames or edge
edits that break the signature drop the pattern rather than degrade it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..model import EntityKind, Metamodel, RelationKind

LAYERED_MIN_LAYERS = 2
MICROSERVICES_MIN_CONTAINERS = 2
FACADE_MIN_CLIENTS = 3
FACADE_MIN_DELEGATES = 2

_GROUP_ORDER = {
    # coarse group ordinal, business innermost
    "Business": 0, "BusinessConceptual": 0, "BusinessSystem": 0,
    "System": 1, "SystemPattern": 1, "SystemStructural": 1,
    "SystemRuntime": 1, "Runtime": 1,
    "Implementation": 2, "ImplementationBehavioral": 2, "Behavioral": 2,
    "Evolutionary": 2,
}


@dataclass(frozen=True)
class PatternHit:
    name: str
    evidence: tuple[str, ...]


def _role(entity) -> str:
    return str(entity.attributes.get("role", "")).lower()


def _dependency_edges(model: Metamodel):
    return [r for r in model.relations if r.kind is RelationKind.dependency]


def _detect_layered(model: Metamodel) -> PatternHit | None:
    deps = _dependency_edges(model)
    if not deps:
        return None
    layers = {int(e.layer) for e in model.entities}
    if len(layers) < LAYERED_MIN_LAYERS:
        return None
    cross = []
    for rel in deps:
        src = int(model.entity(rel.source).layer)
        tgt = int(model.entity(rel.target).layer)
        if tgt > src:
            return None
        if tgt < src:
            cross.append(rel.id)
    if not cross:
        return None
    return PatternHit("layered", tuple(sorted(cross)))


def _detect_clean_onion(model: Metamodel) -> PatternHit | None:
    deps = _dependency_edges(model)
    if not deps:
        return None
    cross = []
    for rel in deps:
        src = _GROUP_ORDER[model.entity(rel.source).layer.name]
        tgt = _GROUP_ORDER[model.entity(rel.target).layer.name]
        if tgt > src:
            return None
        if tgt < src:
            cross.append(rel.id)
    if not cross:
        return None
    return PatternHit("clean-onion", tuple(sorted(cross)))


def _detect_cqrs(model: Metamodel) -> PatternHit | None:
    commands = model.entities_of_kind(EntityKind.Command)
    queries = model.entities_of_kind(EntityKind.Query)
    if not commands or not queries:
        return None
    command_ids = {e.id for e in commands}
    query_ids = {e.id for e in queries}
    written: set[str] = set()
    read: set[str] = set()
    for rel in model.relations:
        if rel.kind not in (RelationKind.dependency, RelationKind.data_flow):
            continue
        target = model.entity_index.get(rel.target)
        if target is None or target.kind is not EntityKind.DataStore:
            continue
        if rel.source in command_ids:
            written.add(rel.target)
        elif rel.source in query_ids:
            read.add(rel.target)
    if written & read:
        return None
    evidence = sorted(command_ids | query_ids)
    return PatternHit("cqrs", tuple(evidence))


def _detect_event_driven(model: Metamodel) -> PatternHit | None:
    events = {e.id for e in model.entities_of_kind(EntityKind.Event)}
    if not events:
        return None
    produced: set[str] = set()
    consumed: set[str] = set()
    flow_ids: dict[str, list[str]] = {}
    for rel in model.relations:
        if rel.kind is not RelationKind.message_flow:
            continue
        if rel.target in events:
            produced.add(rel.target)
            flow_ids.setdefault(rel.target, []).append(rel.id)
        if rel.source in events:
            consumed.add(rel.source)
            flow_ids.setdefault(rel.source, []).append(rel.id)
    brokered = sorted(produced & consumed)
    if not brokered:
        return None
    evidence = sorted(set(brokered) | {rid for b in brokered for rid in flow_ids[b]})
    return PatternHit("event-driven", tuple(evidence))


def _detect_microservices(model: Metamodel) -> PatternHit | None:
    containers = model.entities_of_kind(EntityKind.Container)
    if len(containers) < MICROSERVICES_MIN_CONTAINERS:
        return None
    cross = []
    for rel in _dependency_edges(model):
        src_box = model.ancestor_of_kind(rel.source, EntityKind.Container)
        tgt_box = model.ancestor_of_kind(rel.target, EntityKind.Container)
        if src_box and tgt_box and src_box != tgt_box:
            cross.append(rel.id)
    if not cross:
        return None
    return PatternHit("microservices", tuple(sorted(cross)))


def _detect_hexagonal(model: Metamodel) -> PatternHit | None:
    core = {e.id for e in model.entities if _role(e) == "core"}
    adapters = {e.id for e in model.entities if _role(e) == "adapter"}
    if not core or not adapters:
        return None
    for rel in _dependency_edges(model):
        if rel.source in core and rel.target not in core:
            return None
    return PatternHit("hexagonal", tuple(sorted(core | adapters)))


def _detect_mvc(model: Metamodel) -> PatternHit | None:
    buckets = {"model": [], "view": [], "controller": []}
    for entity in model.entities:
        role = _role(entity)
        if role in buckets:
            buckets[role].append(entity.id)
    if not all(buckets.values()):
        return None
    return PatternHit("mvc", tuple(sorted(i for ids in buckets.values() for i in ids)))


def _detect_repository(model: Metamodel) -> PatternHit | None:
    repos = {e.id for e in model.entities if _role(e) == "repository"}
    if not repos:
        return None
    store_kinds = (EntityKind.DataStore, EntityKind.Table)
    backed = set()
    for rel in model.relations:
        if rel.kind not in (RelationKind.dependency, RelationKind.data_flow):
            continue
        if rel.source in repos:
            target = model.entity_index.get(rel.target)
            if target is not None and target.kind in store_kinds:
                backed.add(rel.source)
                backed.add(rel.target)
    if not backed:
        return None
    return PatternHit("repository", tuple(sorted(backed)))


def _detect_facade(model: Metamodel) -> PatternHit | None:
    incoming: dict[str, set[str]] = {}
    outgoing: dict[str, set[str]] = {}
    for rel in _dependency_edges(model):
        incoming.setdefault(rel.target, set()).add(rel.source)
        outgoing.setdefault(rel.source, set()).add(rel.target)
    hits = []
    for entity in model.entities:
        clients = incoming.get(entity.id, set())
        delegates = outgoing.get(entity.id, set()) - clients
        if len(clients) >= FACADE_MIN_CLIENTS and len(delegates) >= FACADE_MIN_DELEGATES:
            hits.append(entity.id)
    if not hits:
        return None
    return PatternHit("facade", tuple(sorted(hits)))


def _detect_strangler(model: Metamodel) -> PatternHit | None:
    legacy = model.entities_of_kind(EntityKind.LegacySystem)
    fresh = model.entities_of_kind(EntityKind.System)
    routing = model.entities_of_kind(EntityKind.RoutingRule)
    if not legacy or not fresh or not routing:
        return None
    evidence = sorted(e.id for group in (legacy, fresh, routing) for e in group)
    return PatternHit("strangler", tuple(evidence))


_DETECTORS: tuple[Callable[[Metamodel], PatternHit | None], ...] = (
    _detect_layered,
    _detect_clean_onion,
    _detect_cqrs,
    _detect_event_driven,
    _detect_microservices,
    _detect_hexagonal,
    _detect_mvc,
    _detect_repository,
    _detect_facade,
    _detect_strangler,
)

PATTERN_NAMES = (
    "clean-onion", "cqrs", "event-driven", "facade", "hexagonal",
    "layered", "microservices", "mvc", "repository", "strangler",
)


def detect_patterns(model: Metamodel) -> tuple[PatternHit, ...]:
    hits = [h for h in (d(model) for d in _DETECTORS) if h is not None]
    hits.sort(key=lambda h: h.name)
    return tuple(hits)


def detected_names(model: Metamodel) -> frozenset[str]:
    return frozenset(h.name for h in detect_patterns(model))
