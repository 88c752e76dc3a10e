"""Entity catalog: surfaces, cached pronunciations, and descriptions.

The catalog is build-then-freeze: ingest and attach descriptions from one
writer, then treat it as immutable for concurrent scoring.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

from entfix.phonetics import (
    PhoneticSequence,
    PronunciationLexicon,
    phoneticize,
    similarity,
)

DESCRIPTION_WORD_LIMIT = 100

# Control tokens of the encoder input format; stripped out of free text.
_CONTROL_TOKENS = ("[CLS]", "[SEP]", "[MASK]", "[ES]", "[EE]")


class UnknownEntityError(KeyError):
    pass


@dataclass(frozen=True)
class Entity:
    id: int
    surface: str
    phonetic: PhoneticSequence


@dataclass
class EntityCatalog:
    """The entity list plus optional per-entity descriptions."""

    entities: list[Entity] = field(default_factory=list)
    descriptions: dict[int, str] = field(default_factory=dict)
    lexicon: PronunciationLexicon = field(default_factory=PronunciationLexicon)
    duplicates_dropped: int = 0
    _by_surface: dict[str, int] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.entities)

    def __iter__(self):
        return iter(self.entities)

    def by_surface(self, surface: str) -> Entity | None:
        idx = self._by_surface.get(surface)
        return self.entities[idx] if idx is not None else None

    def by_id(self, entity_id: int) -> Entity:
        return self.entities[entity_id]

    def description(self, entity_id: int) -> str | None:
        return self.descriptions.get(entity_id)

    def described_only(self) -> "EntityCatalog":
        """Strict-mode view: drop entities without descriptions, keep ids."""
        kept = [e for e in self.entities if e.id in self.descriptions]
        sub = EntityCatalog(kept, dict(self.descriptions), self.lexicon)
        sub._by_surface = {e.surface: i for i, e in enumerate(kept)}
        return sub


def ingest_entities(lines: Iterable[str], lex: PronunciationLexicon) -> EntityCatalog:
    """Build a catalog from one surface per line.

    Duplicate surfaces are dropped (count kept on the catalog); ids follow
    first-occurrence order. An empty stream yields an empty catalog, which
    turns correction into a no-op downstream.
    """
    catalog = EntityCatalog(lexicon=lex)
    for raw in lines:
        surface = raw.strip()
        if not surface:
            continue
        if surface in catalog._by_surface:
            catalog.duplicates_dropped += 1
            continue
        entity = Entity(len(catalog.entities), surface, phoneticize(surface, lex))
        catalog._by_surface[surface] = len(catalog.entities)
        catalog.entities.append(entity)
    return catalog


def strip_control_tokens(text: str) -> str:
    for token in _CONTROL_TOKENS:
        text = text.replace(token, "")
    return text


def truncate_description(raw_text: str, limit: int = DESCRIPTION_WORD_LIMIT) -> str:
    """Keep the first `limit` words of an article-style description.

    "Word" means whitespace token when the text contains any internal
    whitespace, otherwise (unspaced CJK prose) a single character. Idempotent.
    """
    text = raw_text.strip()
    words = text.split()
    if len(words) > 1:
        return " ".join(words[:limit])
    return text[:limit]


def attach_description(catalog: EntityCatalog, surface: str, raw_text: str) -> None:
    """Attach (or overwrite) the truncated description for one entity."""
    entity = catalog.by_surface(surface)
    if entity is None:
        raise UnknownEntityError(f"no catalog entity with surface {surface!r}")
    catalog.descriptions[entity.id] = truncate_description(strip_control_tokens(raw_text))


def homophone_pairs(catalog: EntityCatalog) -> list[tuple[int, int]]:
    """All unordered id pairs of distinct-surface entities with SIM = 1.

    Entities are pre-bucketed by (length, syllable multiset); sequences can
    only be identical when the buckets match, so the pruning is exact.
    """
    buckets: dict[tuple, list[Entity]] = defaultdict(list)
    for entity in catalog.entities:
        key = (len(entity.phonetic), tuple(sorted(entity.phonetic.syllables)))
        buckets[key].append(entity)
    pairs = []
    for group in buckets.values():
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                if a.surface != b.surface and similarity(a.phonetic, b.phonetic) == 1.0:
                    pairs.append((min(a.id, b.id), max(a.id, b.id)))
    pairs.sort()
    return pairs


def occurrence_counts(
    training_utterances: Iterable[tuple[str, list[tuple[int, int]]]],
    catalog: EntityCatalog,
) -> dict[int, int]:
    """Count gold NE-span occurrences per catalog entity (0 when absent)."""
    counts = {entity.id: 0 for entity in catalog.entities}
    for text, spans in training_utterances:
        for start, end in spans:
            entity = catalog.by_surface(text[start:end])
            if entity is not None:
                counts[entity.id] += 1
    return counts
