"""Masking and marker conventions, replicated character-for-character from
the corrector's exchange format: span characters become one [MASK] token
each, [ES] sits immediately before the first [MASK] and [EE] immediately
after the last, and the entity encoder input is
[CLS]surface[SEP]description[SEP]. Parity with the corrector is pinned by
a shared fixture file in the test suite.
"""

from __future__ import annotations

MASK = "[MASK]"
SPAN_START = "[ES]"
SPAN_END = "[EE]"
CLS = "[CLS]"
SEP = "[SEP]"

SPECIAL_TOKENS = (MASK, SPAN_START, SPAN_END, CLS, SEP)


def mask_span(hypothesis: str, start: int, end: int) -> str:
    if not (0 <= start < end <= len(hypothesis)):
        raise ValueError(f"span [{start}, {end}) out of range")
    return hypothesis[:start] + MASK * (end - start) + hypothesis[end:]


def insert_markers(masked: str) -> str:
    first = masked.find(MASK)
    if first < 0:
        raise ValueError("no [MASK] run to mark")
    last = first
    while masked.startswith(MASK, last):
        last += len(MASK)
    return masked[:first] + SPAN_START + masked[first:last] + SPAN_END + masked[last:]


def masked_context(hypothesis: str, start: int, end: int) -> str:
    return insert_markers(mask_span(hypothesis, start, end))


def entity_input(surface: str, description: str) -> str:
    return f"{CLS}{surface}{SEP}{description}{SEP}"


def tokenize(text: str) -> list[str]:
    """Split into special tokens and single characters."""
    tokens = []
    i = 0
    while i < len(text):
        for special in SPECIAL_TOKENS:
            if text.startswith(special, i):
                tokens.append(special)
                i += len(special)
                break
        else:
            tokens.append(text[i])
            i += 1
    return tokens
