"""Traceability coverage and matrices over the four mapping classes.

A slot is one source-side entity of a mapping class (the business capability,
domain entity, component, or business process). The slot is filled when at
least one kind-valid trace link of that class touches the entity on its
source side. Links whose endpoint kinds do not fit the class are carried as
invalid and never fill anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import NoTraceableEntitiesError
from .model import (
    MAPPING_CLASS_KINDS,
    MappingClass,
    Metamodel,
    TraceLink,
)

UNMAPPED = "UNMAPPED"


@dataclass(frozen=True)
class ClassCoverage:
    mapping_class: MappingClass
    filled: int
    total: int
    unfilled_ids: tuple[str, ...]


@dataclass(frozen=True)
class TraceReport:
    per_class: tuple[ClassCoverage, ...]
    invalid_links: tuple[TraceLink, ...]

    @property
    def slots_total(self) -> int:
        return sum(c.total for c in self.per_class)

    @property
    def slots_filled(self) -> int:
        return sum(c.filled for c in self.per_class)

    @property
    def coverage(self) -> float:
        return self.slots_filled / self.slots_total


@dataclass(frozen=True)
class MatrixRow:
    mapping_class: MappingClass
    source_id: str
    source_name: str
    targets: tuple[str, ...]  # empty means unmapped


def _valid_links_by_source(model: Metamodel) -> dict[MappingClass, dict[str, set[str]]]:
    """mapping class -> source-side entity id -> linked target ids."""
    out: dict[MappingClass, dict[str, set[str]]] = {mc: {} for mc in MappingClass}
    for link in model.traces:
        if link.validity != "valid":
            continue
        src_kinds, _tgt_kinds = MAPPING_CLASS_KINDS[link.mapping_class]
        a = model.entity_index.get(link.source)
        b = model.entity_index.get(link.target)
        if a is None or b is None:
            continue
        # orientation is free; credit whichever endpoint is source-side
        if a.kind in src_kinds:
            out[link.mapping_class].setdefault(a.id, set()).add(b.id)
        if b.kind in src_kinds:
            out[link.mapping_class].setdefault(b.id, set()).add(a.id)
    return out


def traceability_coverage(model: Metamodel) -> TraceReport:
    """Coverage over every slot in the model. Raises NoTraceableEntitiesError
    when no entity of any source-side kind exists."""
    links = _valid_links_by_source(model)
    per_class = []
    for mc in MappingClass:
        src_kinds, _ = MAPPING_CLASS_KINDS[mc]
        sources = [e for e in model.entities if e.kind in src_kinds]
        filled_ids = links[mc]
        unfilled = tuple(sorted(e.id for e in sources if e.id not in filled_ids))
        per_class.append(
            ClassCoverage(
                mapping_class=mc,
                filled=sum(1 for e in sources if e.id in filled_ids),
                total=len(sources),
                unfilled_ids=unfilled,
            )
        )
    report = TraceReport(
        per_class=tuple(per_class),
        invalid_links=tuple(l for l in model.traces if l.validity != "valid"),
    )
    if report.slots_total == 0:
        raise NoTraceableEntitiesError(
            "no entities of any mapping-class source kind are present"
        )
    return report


def trace_matrix(model: Metamodel) -> tuple[MatrixRow, ...]:
    """One row per slot, ordered by (mapping class, source id)."""
    links = _valid_links_by_source(model)
    rows = []
    for mc in MappingClass:
        src_kinds, _ = MAPPING_CLASS_KINDS[mc]
        sources = sorted(
            (e for e in model.entities if e.kind in src_kinds), key=lambda e: e.id
        )
        for entity in sources:
            targets = tuple(sorted(links[mc].get(entity.id, ())))
            rows.append(
                MatrixRow(
                    mapping_class=mc,
                    source_id=entity.id,
                    source_name=entity.name,
                    targets=targets,
                )
            )
    return tuple(rows)


def matrix_to_tsv(rows: tuple[MatrixRow, ...]) -> str:
    """Tab-separated export; multiple targets joined with commas."""
    lines = ["mapping_class\tsource_id\tsource_name\ttargets"]
    for row in rows:
        targets = ",".join(row.targets) if row.targets else UNMAPPED
        name = " ".join(row.source_name.split())
        lines.append(f"{row.mapping_class.value}\t{row.source_id}\t{name}\t{targets}")
    return "\n".join(lines) + "\n"
