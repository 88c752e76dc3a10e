"""Regenerate the committed fixture files under tests/data/.

Run from the tests directory: python3 gen_fixtures.py
The golden correction file is produced by the standalone phonetic-only
baseline, which the alpha=1 pipeline must reproduce byte-for-byte.
"""

from __future__ import annotations

import json

import synth
from entfix.corrector import CorrectionConfig, correct_utterance_phonetic_only
from entfix.detection import CorruptedSpan
from entfix.formats import corrected_record, parse_nbest_record, write_jsonl
from entfix.semantic import insert_markers, mask_span
from entfix.store import attach_description, ingest_entities

SEED = 11
CORPUS_SIZE = 200


def main() -> None:
    missing = synth.check_lexicon_coverage()
    assert not missing, f"lexicon missing {missing}"
    data = synth.DATA_DIR

    with open(data / "nelist.txt", "w", encoding="utf-8") as fh:
        for surface, _topic in synth.GOLD_ENTITIES:
            fh.write(surface + "\n")

    with open(data / "descriptions.jsonl", "w", encoding="utf-8") as fh:
        for surface, desc in synth.entity_descriptions():
            fh.write(json.dumps({"entity": surface, "description": desc},
                                ensure_ascii=False) + "\n")

    corpus = synth.make_corpus(CORPUS_SIZE, SEED)
    with open(data / "synth200.jsonl", "w", encoding="utf-8") as fh:
        for record in corpus:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    with open(data / "fixture10.jsonl", "w", encoding="utf-8") as fh:
        for record in corpus[:10]:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    lex = synth.load_fixture_lexicon()
    pool = synth.padding_pool(lex, {s for s, _ in synth.GOLD_ENTITIES})
    with open(data / "pad_pool.jsonl", "w", encoding="utf-8") as fh:
        for surface, desc in pool:
            fh.write(json.dumps({"entity": surface, "description": desc},
                                ensure_ascii=False) + "\n")

    catalog = ingest_entities([s for s, _ in synth.GOLD_ENTITIES], lex)
    for surface, desc in synth.entity_descriptions():
        attach_description(catalog, surface, desc)
    config = CorrectionConfig(alpha=1.0, top_k=10, nbest_size=10,
                              detector="external")
    utterances = [parse_nbest_record(json.dumps(r, ensure_ascii=False), i)
                  for i, r in enumerate(corpus[:10], 1)]
    records = []
    for utt in utterances:
        text, results = correct_utterance_phonetic_only(utt, catalog, config)
        records.append(corrected_record(utt, text, results))
    with open(data / "golden_alpha1.jsonl", "w", encoding="utf-8") as fh:
        write_jsonl(records, fh)

    mask_cases = []
    for text, start, end in [
        ("记者报道张伟在全国游泳比赛夺冠", 4, 6),
        ("章伟出版文学小说作品", 0, 2),
        ("教授江雨桐在大学教课程", 2, 5),
        ("医生海梅完成医院手术", 2, 4),
    ]:
        span = CorruptedSpan(start, end, text[start:end])
        masked = mask_span(text, span)
        marked = insert_markers(masked)
        mask_cases.append({"hypothesis": text, "span": [start, end],
                           "masked": masked.text, "marked": marked.text})
    with open(data / "mask_fixture.jsonl", "w", encoding="utf-8") as fh:
        write_jsonl(mask_cases, fh)

    print(f"wrote fixtures for {CORPUS_SIZE} utterances into {data}")


if __name__ == "__main__":
    main()
