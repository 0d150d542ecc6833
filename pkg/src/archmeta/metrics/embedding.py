"""Deterministic lexical embedding and cosine similarity.

The default embedder is a term-frequency bag over lowercase word unigrams
plus adjacent bigrams (bigram keys are the two tokens joined by one space).
It is fully reproducible offline; an external dense embedder can be swapped
in anywhere an embedder callable is accepted.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Mapping

_TOKEN = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class EmbeddingVector:
    terms: Mapping[str, float]
    norm: float

    @property
    def is_zero(self) -> bool:
        return self.norm == 0.0


def _vector(terms: Mapping[str, float]) -> EmbeddingVector:
    norm_sq = sum(v * v for v in terms.values())
    if isinstance(norm_sq, int) and math.isqrt(norm_sq) ** 2 == norm_sq:
        norm = float(math.isqrt(norm_sq))
    else:
        norm = math.sqrt(norm_sq)
    return EmbeddingVector(terms=dict(terms), norm=norm)


def lexical_embed(text: str) -> EmbeddingVector:
    tokens = tokenize(text)
    counts: Counter[str] = Counter(tokens)
    counts.update(" ".join(pair) for pair in zip(tokens, tokens[1:]))
    return _vector(counts)


def dense_vector(values: list[float]) -> EmbeddingVector:
    """Wrap an external provider's dense vector in the shared shape."""
    return _vector({str(i): v for i, v in enumerate(values) if v != 0.0})


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity clamped to [0, 1]; zero vectors compare as 0."""
    if a.is_zero or b.is_zero:
        return 0.0
    small, large = (a.terms, b.terms) if len(a.terms) <= len(b.terms) else (b.terms, a.terms)
    dot = sum(w * large[t] for t, w in small.items() if t in large)
    # integer TF weights allow an exact denominator when the product of
    # squared norms is a perfect square (always true for identical texts)
    na_sq = sum(v * v for v in a.terms.values())
    nb_sq = sum(v * v for v in b.terms.values())
    if isinstance(na_sq, int) and isinstance(nb_sq, int):
        product = na_sq * nb_sq
        root = math.isqrt(product)
        denom = float(root) if root * root == product else math.sqrt(product)
    else:
        denom = a.norm * b.norm
    value = dot / denom
    return min(1.0, max(0.0, value))
