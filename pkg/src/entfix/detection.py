"""Corrupted-entity detection: BIO codecs, an alignment-based labeler for
training data, a lexicon-driven baseline detector, and detector scoring.

Detection proper is pluggable (external tags, baseline, or gold-by-alignment);
everything here is pure and parallelizable across utterances.
"""

from __future__ import annotations

from dataclasses import dataclass

from entfix.alignment import char_align
from entfix.phonetics import (
    PhoneticSequence,
    PronunciationLexicon,
    batch_similarities,
    phoneticize,
)
from entfix.store import EntityCatalog

_VALID_TAGS = frozenset("BIO")


@dataclass(frozen=True)
class CorruptedSpan:
    """Character span [start, end) of a suspect entity in one hypothesis."""

    start: int
    end: int
    surface: str

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span [{self.start}, {self.end})")


def spans_from_offsets(offsets: list[tuple[int, int]], text: str) -> list[CorruptedSpan]:
    """Validate [start, end) pairs against text: in range, sorted, disjoint."""
    spans = []
    last_end = 0
    for start, end in sorted(offsets):
        if not (0 <= start < end <= len(text)):
            raise ValueError(f"span [{start}, {end}) out of range for length {len(text)}")
        if start < last_end:
            raise ValueError(f"span [{start}, {end}) overlaps a previous span")
        last_end = end
        spans.append(CorruptedSpan(start, end, text[start:end]))
    return spans


def bio_decode(tags: str, text: str) -> tuple[list[CorruptedSpan], int]:
    """Decode per-character B/I/O tags into spans.

    Lenient: an I following O or at sequence start is repaired to B; the
    repair count is returned alongside the spans.
    """
    if len(tags) != len(text):
        raise ValueError(f"{len(tags)} tags for {len(text)} characters")
    if not set(tags) <= _VALID_TAGS:
        raise ValueError(f"invalid tag in {tags!r}")
    spans = []
    repairs = 0
    start = None
    for i, tag in enumerate(tags):
        if tag == "I" and start is None:
            repairs += 1
            tag = "B"
        if tag == "B":
            if start is not None:
                spans.append(CorruptedSpan(start, i, text[start:i]))
            start = i
        elif tag == "O" and start is not None:
            spans.append(CorruptedSpan(start, i, text[start:i]))
            start = None
    if start is not None:
        spans.append(CorruptedSpan(start, len(text), text[start:]))
    return spans, repairs


def bio_encode(spans: list[CorruptedSpan], length: int) -> str:
    """Inverse codec: disjoint spans to a B/I/O tag string."""
    tags = ["O"] * length
    for span in spans:
        if span.end > length:
            raise ValueError(f"span [{span.start}, {span.end}) exceeds length {length}")
        tags[span.start] = "B"
        for i in range(span.start + 1, span.end):
            tags[i] = "I"
    return "".join(tags)


def label_bio_by_alignment(
    hypothesis: str,
    reference: str,
    reference_ne_spans: list[tuple[int, int]],
    strict: bool = False,
) -> str:
    """Tag hypothesis characters that align into reference NE regions.

    A hypothesis character is in an entity region when it is matched or
    substituted onto a reference NE character, or inserted strictly inside
    one. By default whole regions are tagged even when they equal the
    reference (entity regions, not errors); strict mode keeps only regions
    touched by at least one edit, so an NE deleted wholesale from the
    hypothesis yields no span in either mode.
    """
    for start, end in reference_ne_spans:
        if not (0 <= start < end <= len(reference)):
            raise ValueError(f"NE span [{start}, {end}) out of range")
    marked = [False] * len(hypothesis)
    span_edited = {i: False for i in range(len(reference_ne_spans))}
    span_positions: dict[int, list[int]] = {i: [] for i in range(len(reference_ne_spans))}

    def span_of(ref_pos: int, strictly_inside: bool) -> int | None:
        for idx, (start, end) in enumerate(reference_ne_spans):
            if strictly_inside:
                if start < ref_pos < end:
                    return idx
            elif start <= ref_pos < end:
                return idx
        return None

    for op in char_align(hypothesis, reference):
        if op.kind in ("match", "sub"):
            idx = span_of(op.ref_pos, strictly_inside=False)
            if idx is not None:
                marked[op.hyp_pos] = True
                span_positions[idx].append(op.hyp_pos)
                if op.kind == "sub":
                    span_edited[idx] = True
        elif op.kind == "ins":
            idx = span_of(op.ref_pos, strictly_inside=True)
            if idx is not None:
                marked[op.hyp_pos] = True
                span_positions[idx].append(op.hyp_pos)
                span_edited[idx] = True
        else:  # del
            idx = span_of(op.ref_pos, strictly_inside=False)
            if idx is not None:
                span_edited[idx] = True

    if strict:
        for idx, edited in span_edited.items():
            if not edited:
                for pos in span_positions[idx]:
                    marked[pos] = False

    tags = []
    for i, inside in enumerate(marked):
        if not inside:
            tags.append("O")
        elif i > 0 and marked[i - 1]:
            tags.append("I")
        else:
            tags.append("B")
    return "".join(tags)


def detect_baseline(
    hypothesis: str,
    catalog: EntityCatalog,
    lex: PronunciationLexicon,
    min_sim: float = 0.7,
    window_slack: int = 1,
) -> list[CorruptedSpan]:
    """Sliding-window detector: flag windows phonetically close to an entity.

    For each entity length class L the windows of width L-slack .. L+slack
    are scored by their best SIM against entities of that class; windows at
    or above min_sim are kept greedily by SIM, then leftmost start, then
    wider width, and must not overlap.
    """
    if not catalog.entities or not hypothesis:
        return []
    by_length: dict[int, list] = {}
    for entity in catalog.entities:
        by_length.setdefault(len(entity.surface), []).append(entity)
    hyp_phonetic = phoneticize(hypothesis, lex).syllables
    scored: dict[tuple[int, int], float] = {}
    for length, entities in by_length.items():
        phonetics = [e.phonetic for e in entities]
        widths = range(max(1, length - window_slack), length + window_slack + 1)
        for width in widths:
            for start in range(0, len(hypothesis) - width + 1):
                window = PhoneticSequence(hyp_phonetic[start:start + width])
                best = max(batch_similarities(window, phonetics))
                key = (start, width)
                if best >= min_sim and best > scored.get(key, -1.0):
                    scored[key] = best
    ranked = sorted(scored.items(), key=lambda kv: (-kv[1], kv[0][0], -kv[0][1]))
    chosen: list[tuple[int, int]] = []
    for (start, width), _sim in ranked:
        end = start + width
        if all(end <= s or start >= s + w for s, w in chosen):
            chosen.append((start, width))
    chosen.sort()
    return [CorruptedSpan(s, s + w, hypothesis[s:s + w]) for s, w in chosen]


def eval_detector(
    predicted_spans: list[CorruptedSpan],
    gold_spans: list[CorruptedSpan],
) -> dict[str, float]:
    """Exact-span precision/recall/F1."""
    predicted = {(s.start, s.end) for s in predicted_spans}
    gold = {(s.start, s.end) for s in gold_spans}
    tp = len(predicted & gold)
    if predicted:
        precision = tp / len(predicted)
    else:
        precision = 1.0 if not gold else 0.0
    recall = tp / len(gold) if gold else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}
