"""Transformation prompt templates for the two regeneration workflows.

Workflow A moves between plain-text artifacts (code, technical docs,
business docs); workflow B carries machine-readable diagrams alongside the
text at every stage. The eight bodies live as data files so editing one is
a reviewable data change, not a code change. Placeholders look like
[INSERT TD + DIAGRAMS] and normalize to snake_case slot names
(td_and_diagrams); rendering substitutes slots verbatim and touches nothing
else.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from typing import Mapping

from ..errors import MissingSlotError, UnknownStageError

PROCESSES = ("A", "B")
STAGES = ("code-to-td", "td-to-bd", "bd-to-td", "td-to-code")

_SLOT = re.compile(r"\[INSERT ([^\]]+)\]")

_TEMPLATE_FILES = {
    ("A", "code-to-td"): "a_code_to_td.txt",
    ("A", "td-to-bd"): "a_td_to_bd.txt",
    ("A", "bd-to-td"): "a_bd_to_td.txt",
    ("A", "td-to-code"): "a_td_to_code.txt",
    ("B", "code-to-td"): "b_code_to_td.txt",
    ("B", "td-to-bd"): "b_td_to_bd.txt",
    ("B", "bd-to-td"): "b_bd_to_td.txt",
    ("B", "td-to-code"): "b_td_to_code.txt",
}

_MANDATORY_SECTIONS = {
    ("A", "code-to-td"): ("INPUT", "TASK", "STRICT REQUIREMENTS", "OUTPUT FORMAT"),
    ("A", "td-to-bd"): ("INPUT", "TASK", "STRICT REQUIREMENTS", "OUTPUT"),
    ("A", "bd-to-td"): ("INPUT", "TASK", "STRICT REQUIREMENTS", "OUTPUT"),
    ("A", "td-to-code"): ("INPUT", "TASK", "STRICT REQUIREMENTS", "OUTPUT"),
    ("B", "code-to-td"): (
        "INPUT",
        "TASK",
        "MANDATORY DIAGRAM SET",
        "BUSINESS / CONTEXT LAYER",
        "SYSTEM LAYER",
        "IMPLEMENTATION LAYER",
        "BEHAVIORAL LAYER",
        "RUNTIME LAYER",
        "STRICT RULES",
        "OUTPUT",
    ),
    ("B", "td-to-bd"): ("INPUT", "TASK", "MANDATORY BUSINESS DIAGRAMS", "STRICT RULES", "OUTPUT"),
    ("B", "bd-to-td"): (
        "INPUT",
        "TASK",
        "MANDATORY DIAGRAMS",
        "SYSTEM STRUCTURE",
        "PATTERN LAYER",
        "IMPLEMENTATION LAYER",
        "BEHAVIORAL LAYER",
        "RUNTIME",
        "STRICT RULES",
        "OUTPUT",
    ),
    ("B", "td-to-code"): ("INPUT", "TASK", "MANDATORY CONSTRAINT SOURCES", "STRICT RULES", "OUTPUT"),
}


def slot_name(placeholder: str) -> str:
    """[INSERT CODE / MODULES / REPO] -> code; [INSERT TD + DIAGRAMS] -> td_and_diagrams."""
    first_alternative = placeholder.split("/")[0].strip()
    joined = first_alternative.replace(" + ", "_and_").replace("+", "_and_")
    return re.sub(r"\s+", "_", joined.strip()).lower()


@dataclass(frozen=True)
class PromptTemplate:
    process: str
    stage: str
    body: str
    slots: tuple[str, ...]
    mandatory_sections: tuple[str, ...]


def _canonical_stage(stage: str) -> str:
    token = stage.strip().lower().replace("→", "-to-").replace("->", "-to-")
    token = re.sub(r"-+", "-", token.replace(" ", "-"))
    return token


def load_template(process: str, stage: str) -> PromptTemplate:
    proc = process.strip().upper()
    stage_token = _canonical_stage(stage)
    key = (proc, stage_token)
    if key not in _TEMPLATE_FILES:
        raise UnknownStageError(f"no template for process {process!r}, stage {stage!r}")
    body = (
        resources.files("archmeta.prompts")
        .joinpath("templates", _TEMPLATE_FILES[key])
        .read_text("utf-8")
    )
    slots = tuple(dict.fromkeys(slot_name(m) for m in _SLOT.findall(body)))
    return PromptTemplate(
        process=proc,
        stage=stage_token,
        body=body,
        slots=slots,
        mandatory_sections=_MANDATORY_SECTIONS[key],
    )


def all_templates() -> tuple[PromptTemplate, ...]:
    return tuple(load_template(p, s) for p, s in _TEMPLATE_FILES)


def assemble_prompt(process: str, stage: str, inputs: Mapping[str, str]) -> str:
    """Fill every placeholder; unknown extra inputs are ignored."""
    template = load_template(process, stage)
    for slot in template.slots:
        if slot not in inputs:
            raise MissingSlotError(slot)

    def _sub(match: re.Match[str]) -> str:
        return inputs[slot_name(match.group(1))]

    return _SLOT.sub(_sub, template.body)


def _normalize_heading(line: str) -> str:
    text = line.strip()
    if text.startswith("•"):
        text = text[1:].strip()
    text = re.sub(r"\s*\([^)]*\)\s*:?\s*$", "", text)
    return text.rstrip(":").strip()


def missing_sections(rendered: str, template: PromptTemplate) -> tuple[str, ...]:
    """Mandatory headings not appearing exactly once in the rendered text."""
    counts: dict[str, int] = {h: 0 for h in template.mandatory_sections}
    for line in rendered.splitlines():
        heading = _normalize_heading(line)
        if heading in counts:
            counts[heading] += 1
    return tuple(h for h, n in counts.items() if n != 1)


def prompt_filename(process: str, stage: str, when: datetime | None = None) -> str:
    moment = when if when is not None else datetime.now(timezone.utc)
    stamp = moment.strftime("%Y%m%dT%H%M%SZ")
    return f"{process.strip().upper()}_{_canonical_stage(stage)}_{stamp}.prompt.txt"
