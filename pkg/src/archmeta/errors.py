"""Exception hierarchy shared by every archmeta module.

All library errors derive from ArchmetaError so callers can catch one base
class at API boundaries (the CLI maps them onto exit code 2 unless a command
defines a more specific behavior).
"""

from __future__ import annotations


class ArchmetaError(Exception):
    """Base class for all archmeta errors."""


# model construction / validation

class DuplicateIdError(ArchmetaError):
    """Two entities or relations share an id."""


class DanglingReferenceError(ArchmetaError):
    """A relation or trace link endpoint names a missing entity."""


class ContainmentCycleError(ArchmetaError):
    """Containment relations form a cycle."""


# diagram parsing / lifting / rendering

class DiagramParseError(ArchmetaError):
    """Base for strict-parser failures."""


class DiagramSyntaxError(DiagramParseError):
    def __init__(self, line: int, col: int, expected: str):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"line {line}, col {col}: expected {expected}")


class UnsupportedConstructError(DiagramParseError):
    def __init__(self, construct: str, line: int = 0):
        self.construct = construct
        self.line = line
        super().__init__(f"line {line}: unsupported construct: {construct}")


class UnknownDiagramTypeError(ArchmetaError):
    """Lifting needs a diagram type but none was given or inferable."""


class AmbiguousElementClassError(ArchmetaError):
    """The lifting table has no rule for (diagram type, element class)."""


class UnrepresentableConstructError(ArchmetaError):
    def __init__(self, format: str, construct: str):
        self.format = format
        self.construct = construct
        super().__init__(f"cannot represent {construct} in {format}")


class NotParsedError(ArchmetaError):
    """An operation required a successfully parsed diagram."""


# constraints

class InvalidConstraintParamsError(ArchmetaError):
    def __init__(self, constraint_id: str, reason: str):
        self.constraint_id = constraint_id
        super().__init__(f"constraint {constraint_id!r}: {reason}")


class NoConstraintsDefinedError(ArchmetaError):
    """A consistency score was requested over zero constraints."""


# traces

class NoTraceableEntitiesError(ArchmetaError):
    """The model has no source-side entities for any mapping class."""


# extraction

class UnreadableRootError(ArchmetaError):
    """The scan root does not exist or is not a directory."""


class InvalidRulesError(ArchmetaError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"rules line {line}: {reason}")


# metrics

class EmptyExpectedSetError(ArchmetaError):
    """Completeness needs a non-empty expected entity set."""


class NoComparableGroupsError(ArchmetaError):
    """Semantic fidelity needs at least one group non-empty on both sides."""


class EmptyArtifactSetError(ArchmetaError):
    """Machine readability needs at least one artifact."""


class EmptyExpectedPatternsError(ArchmetaError):
    """Pattern coverage needs a non-empty expected pattern set."""


class OutOfRangeRawError(ArchmetaError):
    def __init__(self, metric: str, value: float):
        self.metric = metric
        self.value = value
        super().__init__(f"raw value for {metric} out of [0, 1]: {value}")


# prompt assembly

class MissingSlotError(ArchmetaError):
    def __init__(self, slot: str):
        self.slot = slot
        super().__init__(f"missing required slot: {slot}")


class UnknownStageError(ArchmetaError):
    """No template exists for the requested (process, stage) pair."""


class UnknownPurposeError(ArchmetaError):
    """No diagram selection rule exists for the requested purpose."""


# remote endpoints

class EndpointProtocolError(ArchmetaError):
    """A remote endpoint response did not match the wire contract."""
