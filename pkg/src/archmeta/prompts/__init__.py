"""Prompt templates and architectural context assembly."""

from .context import (
    DEFAULT_INSTRUCTIONS,
    PURPOSE_DIAGRAMS,
    ContextBlock,
    describe_constraint,
    render_context_block,
    section_end_marker,
    section_marker,
    select_diagram_set,
)
from .templates import (
    PROCESSES,
    STAGES,
    PromptTemplate,
    all_templates,
    assemble_prompt,
    load_template,
    missing_sections,
    prompt_filename,
    slot_name,
)

__all__ = [
    "DEFAULT_INSTRUCTIONS",
    "PURPOSE_DIAGRAMS",
    "ContextBlock",
    "describe_constraint",
    "render_context_block",
    "section_end_marker",
    "section_marker",
    "select_diagram_set",
    "PROCESSES",
    "STAGES",
    "PromptTemplate",
    "all_templates",
    "assemble_prompt",
    "load_template",
    "missing_sections",
    "prompt_filename",
    "slot_name",
]
