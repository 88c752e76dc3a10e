"""Pronunciation lexicon, text-to-syllable transform, and phonetic distances.

Every similarity judgement in the corrector reduces to a unit-cost
Levenshtein distance over syllable tokens produced here. The normalized
distance divides by the longer sequence length, which keeps NED in [0, 1]
and makes SIM exactly 1 for homophones (identical syllable sequences).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable

from entfix import kernels


class LexiconParseError(ValueError):
    """Raised for malformed lexicon lines; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class PhoneticSequence:
    """Ordered syllable tokens for one text; the unit of all distance math."""

    syllables: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.syllables)

    def __iter__(self):
        return iter(self.syllables)

    def __getitem__(self, i):
        return self.syllables[i]


EMPTY_SEQUENCE = PhoneticSequence(())


@dataclass
class PronunciationLexicon:
    """Character -> ordered syllable alternatives; first entry is the default.

    Immutable after load; ``toneless`` strips the trailing tone digit at
    lookup time so one lexicon file serves both modes.
    """

    entries: dict[str, tuple[str, ...]] = field(default_factory=dict)
    toneless: bool = False

    def __len__(self) -> int:
        return len(self.entries)

    def default_syllable(self, char: str) -> str | None:
        alts = self.entries.get(char)
        if alts is None:
            return None
        syl = alts[0]
        return _strip_tone(syl) if self.toneless else syl

    def with_tone_mode(self, toneless: bool) -> "PronunciationLexicon":
        return PronunciationLexicon(self.entries, toneless)


def _strip_tone(syllable: str) -> str:
    return syllable[:-1] if syllable and syllable[-1].isdigit() else syllable


def load_lexicon(source: IO[str] | Iterable[str],
                 toneless: bool = False) -> PronunciationLexicon:
    """Parse a tab-separated lexicon stream: ``char<TAB>syl1[ syl2 ...]``.

    Duplicate characters merge, later lines appending alternates in order.
    Lines starting with ``#`` in column 0 are comments. An empty stream is a
    valid, empty lexicon.
    """
    entries: dict[str, list[str]] = {}
    for line_no, raw in enumerate(source, 1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        if line.startswith("#"):
            continue
        if "\t" not in line:
            raise LexiconParseError(line_no, "missing tab separator")
        char, _, pron = line.partition("\t")
        if len(char) != 1:
            raise LexiconParseError(line_no, f"key {char!r} is not a single character")
        syllables = pron.split()
        if not syllables:
            raise LexiconParseError(line_no, f"no pronunciation for {char!r}")
        for syl in syllables:
            if syl not in entries.setdefault(char, []):
                entries[char].append(syl)
    return PronunciationLexicon(
        {char: tuple(alts) for char, alts in entries.items()}, toneless)


def phoneticize(text: str, lex: PronunciationLexicon) -> PhoneticSequence:
    """Map each character to its default syllable; OOV characters get a
    per-character ``<unk:CHAR>`` token so distinct unknowns never match."""
    out = []
    for char in text:
        syl = lex.default_syllable(char)
        out.append(syl if syl is not None else f"<unk:{char}>")
    return PhoneticSequence(tuple(out))


def edit_distance(a: PhoneticSequence, b: PhoneticSequence) -> int:
    """Unit-cost Levenshtein distance over syllable tokens."""
    return kernels.levenshtein(a.syllables, b.syllables)


def normalized_distance(a: PhoneticSequence, b: PhoneticSequence) -> float:
    """NED = edit_distance / max(len); NED of two empty sequences is 0."""
    denom = max(len(a), len(b))
    if denom == 0:
        return 0.0
    return edit_distance(a, b) / denom


def similarity(a: PhoneticSequence, b: PhoneticSequence) -> float:
    """SIM = 1 - NED; equals 1 exactly iff the syllable sequences match."""
    return 1.0 - normalized_distance(a, b)


def batch_distances(query: PhoneticSequence,
                    refs: list[PhoneticSequence]) -> list[int]:
    """Edit distances from one query to many references (kernel batch path)."""
    return kernels.levenshtein_batch(query.syllables, [r.syllables for r in refs])


def batch_similarities(query: PhoneticSequence,
                       refs: list[PhoneticSequence]) -> list[float]:
    """SIM from one query to many references."""
    qlen = len(query)
    sims = []
    for ref, dist in zip(refs, batch_distances(query, refs)):
        denom = max(qlen, len(ref))
        sims.append(1.0 - (dist / denom if denom else 0.0))
    return sims
