import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from entfix.phonetics import load_lexicon, similarity
from entfix.store import (
    UnknownEntityError,
    attach_description,
    homophone_pairs,
    ingest_entities,
    occurrence_counts,
    truncate_description,
)

LEX = load_lexicon(io.StringIO(
    "他\tta1\n她\tta1\n它\tta1\n在\tzai4\n再\tzai4\n明\tming2\n天\ttian1\n"))


def catalog_of(*surfaces: str):
    return ingest_entities(list(surfaces), LEX)


class TestIngest:
    def test_three_distinct_lines(self):
        assert len(catalog_of("他在", "她在", "明天")) == 3

    def test_duplicates_dropped_with_count(self):
        catalog = catalog_of("他在", "明天", "他在")
        assert len(catalog) == 2
        assert catalog.duplicates_dropped == 1

    def test_empty_stream(self):
        catalog = catalog_of()
        assert len(catalog) == 0

    def test_ids_follow_first_occurrence(self):
        catalog = catalog_of("明天", "他在")
        assert catalog.by_surface("明天").id == 0
        assert catalog.by_surface("他在").id == 1

    def test_phonetic_cached_under_store_lexicon(self):
        catalog = catalog_of("他在")
        assert catalog.by_surface("他在").phonetic.syllables == ("ta1", "zai4")


class TestDescriptions:
    def test_attach_truncates_and_stores(self):
        catalog = catalog_of("他在")
        attach_description(catalog, "他在", "  word " * 5)
        assert catalog.description(0) == "word word word word word"

    def test_reattach_overwrites(self):
        catalog = catalog_of("他在")
        attach_description(catalog, "他在", "one")
        attach_description(catalog, "他在", "two")
        assert catalog.description(0) == "two"

    def test_unknown_surface_raises(self):
        with pytest.raises(UnknownEntityError):
            attach_description(catalog_of("他在"), "不在", "text")

    def test_control_tokens_stripped(self):
        catalog = catalog_of("他在")
        attach_description(catalog, "他在", "a[SEP]b [CLS]c")
        assert catalog.description(0) == "ab c"

    def test_described_only_view_keeps_ids(self):
        catalog = catalog_of("他在", "她在", "明天")
        attach_description(catalog, "明天", "desc")
        strict = catalog.described_only()
        assert [e.id for e in strict] == [2]
        assert strict.by_surface("明天").id == 2


class TestTruncateDescription:
    def test_250_spaced_words_truncate_to_100(self):
        text = " ".join(f"w{i}" for i in range(250))
        out = truncate_description(text)
        assert out.split() == [f"w{i}" for i in range(100)]

    def test_short_article_unchanged(self):
        text = " ".join(f"w{i}" for i in range(40))
        assert truncate_description(text) == text

    def test_unspaced_cjk_truncates_by_character(self):
        text = "字" * 250
        out = truncate_description(text)
        assert len(out) == 100

    def test_strips_surrounding_whitespace(self):
        assert truncate_description("  靠谱  ") == "靠谱"

    @given(st.text(alphabet="ab 字", max_size=300))
    def test_idempotent(self, text):
        once = truncate_description(text)
        assert truncate_description(once) == once


class TestHomophonePairs:
    def test_full_sequence_homophones_found(self):
        catalog = catalog_of("他在", "她在")
        assert homophone_pairs(catalog) == [(0, 1)]

    def test_all_distinct_pronunciations(self):
        assert homophone_pairs(catalog_of("明天", "他在")) == []

    def test_three_mutual_homophones_give_three_pairs(self):
        catalog = catalog_of("他在", "她在", "它再")
        # brute force over all unordered pairs
        ents = list(catalog)
        expected = sorted(
            (a.id, b.id)
            for i, a in enumerate(ents) for b in ents[i + 1:]
            if a.surface != b.surface and similarity(a.phonetic, b.phonetic) == 1.0)
        assert len(expected) == 3
        assert homophone_pairs(catalog) == expected

    def test_order_independent_under_permutation(self):
        surfaces = ["他在", "明天", "她在", "它再"]
        by_orig = {e.id: e.surface for e in catalog_of(*surfaces)}
        pairs_orig = {(by_orig[i], by_orig[j]) for i, j in homophone_pairs(catalog_of(*surfaces))}
        perm = list(reversed(surfaces))
        by_perm = {e.id: e.surface for e in catalog_of(*perm)}
        pairs_perm = {(by_perm[i], by_perm[j]) for i, j in homophone_pairs(catalog_of(*perm))}
        assert {frozenset(p) for p in pairs_orig} == {frozenset(p) for p in pairs_perm}

    def test_matches_brute_force_on_random_catalogs(self):
        import random

        rng = random.Random(7)
        chars = list(LEX.entries)
        surfaces = list({"".join(rng.choices(chars, k=rng.randint(1, 3))) for _ in range(120)})
        catalog = ingest_entities(surfaces, LEX)
        ents = list(catalog)
        brute = sorted(
            (a.id, b.id)
            for i, a in enumerate(ents) for b in ents[i + 1:]
            if a.surface != b.surface and similarity(a.phonetic, b.phonetic) == 1.0)
        assert homophone_pairs(catalog) == brute


class TestOccurrenceCounts:
    def test_absent_entity_counts_zero(self):
        catalog = catalog_of("他在", "明天")
        counts = occurrence_counts([("今天如何", [])], catalog)
        assert counts == {0: 0, 1: 0}

    def test_five_spans(self):
        catalog = catalog_of("明天")
        utts = [("明天明天", [(0, 2), (2, 4)]), ("去明天吧", [(1, 3)]),
                ("明天", [(0, 2)]), ("又明天了", [(1, 3)])]
        assert occurrence_counts(utts, catalog)[0] == 5

    def test_matches_linear_scan(self):
        catalog = catalog_of("他在", "明天")
        utts = [("他在明天", [(0, 2), (2, 4)]), ("明天他在", [(0, 2), (2, 4)]),
                ("明天", [(0, 2)])]
        counts = occurrence_counts(utts, catalog)
        scan = {e.id: 0 for e in catalog}
        for text, spans in utts:
            for s, e in spans:
                ent = catalog.by_surface(text[s:e])
                if ent:
                    scan[ent.id] += 1
        assert counts == scan
