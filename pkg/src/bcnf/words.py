"""Symbolic itineraries over the alphabet {L, R}.

A word is a plain nonempty string of ``L``/``R`` characters.  Index 0 is the
leftmost character and is the first symbol applied, so ``"RRL"`` means: apply
the right half-map twice, then the left half-map.  The matrix of the composed
map consequently carries the index-0 factor rightmost.
"""

from __future__ import annotations

import warnings

Word = str

ALPHABET = frozenset("LR")


class WordError(ValueError):
    """Raised for empty words or words with characters outside {L, R}."""


def parse_word(text: str) -> Word:
    if not text:
        raise WordError("word must be nonempty")
    bad = set(text) - ALPHABET
    if bad:
        raise WordError(f"word may contain only 'L' and 'R', got {sorted(bad)!r}")
    return text


def is_primitive(w: Word) -> bool:
    """True iff w is not a proper power of a shorter word.

    Rotation test: w is primitive iff it occurs exactly twice in w + w,
    i.e. the first occurrence past index 0 is at index len(w).
    """
    parse_word(w)
    return (w + w).find(w, 1) == len(w)


def shift(w: Word, m: int) -> Word:
    """Cyclic left shift by m places, 0 <= m < len(w)."""
    parse_word(w)
    if not 0 <= m < len(w):
        raise ValueError(f"shift amount {m} out of range for word of length {len(w)}")
    return w[m:] + w[:m]


def family_word(x: Word, k: int, y: Word) -> Word:
    """The word x^k y driving the k-indexed cycle families."""
    parse_word(x)
    parse_word(y)
    if k < 0:
        raise ValueError("k must be non-negative")
    if x[0] == y[0]:
        warnings.warn(
            "first symbols of the repeated and closing words coincide; "
            "the multistability diagnostics assume they differ",
            stacklevel=2,
        )
    return x * k + y


def symbol_counts(w: Word) -> tuple[int, int]:
    """(#L, #R) occurrences."""
    n_l = w.count("L")
    return n_l, len(w) - n_l
