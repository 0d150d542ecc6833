"""Codebase scanning, name matching, and pattern detection."""

from .matching import (
    Match,
    MatchReport,
    load_aliases,
    match_expected,
    match_names,
    normalize_name,
)
from .patterns import (
    PATTERN_NAMES,
    PatternHit,
    detect_patterns,
    detected_names,
)
from .scan import ExpectedEntity, ScanRule, load_rules, scan_expected

__all__ = [
    "Match",
    "MatchReport",
    "load_aliases",
    "match_expected",
    "match_names",
    "normalize_name",
    "PATTERN_NAMES",
    "PatternHit",
    "detect_patterns",
    "detected_names",
    "ExpectedEntity",
    "ScanRule",
    "load_rules",
    "scan_expected",
]
