import json

from entfix_trainer import corpus
from entfix_trainer.train_ced import (
    augment_nbest_records,
    decode_spans,
    predict_ced_spans,
    span_f1,
)


class TestDecode:
    def test_runs_and_orphan_repair(self):
        assert decode_spans("OBIO") == [[1, 3]]
        assert decode_spans("IIO") == [[0, 2]]
        assert decode_spans("OOO") == []
        assert decode_spans("BIBI") == [[0, 2], [2, 4]]

    def test_matches_consumer_decoder(self):
        from entfix.detection import bio_decode

        for tags in ("OBIO", "IIO", "OOO", "BIBI", "OIB", "BOB"):
            text = "x" * len(tags)
            theirs = [[s.start, s.end] for s in bio_decode(tags, text)[0]]
            assert decode_spans(tags) == theirs


class TestTagger:
    def test_loss_trend(self, ced_checkpoint):
        losses = ced_checkpoint.epoch_losses
        assert losses[-1] < losses[0]

    def test_held_out_span_quality(self, ced_checkpoint):
        held = corpus.make_tagged(60, seed=5)
        scores = [span_f1(predict_ced_spans(ced_checkpoint, item.text),
                          decode_spans(item.tags))
                  for item in held]
        assert sum(scores) / len(scores) >= 0.5

    def test_augmented_records_parse_in_consumer(self, ced_checkpoint):
        from entfix.formats import parse_nbest_record

        records = corpus.make_nbest_records(20, seed=7)
        augmented = augment_nbest_records(ced_checkpoint, records)
        parsed = 0
        for record in augmented:
            line = json.dumps(record, ensure_ascii=False)
            utt = parse_nbest_record(line, 1)
            assert utt.ced_spans is not None
            parsed += 1
        assert parsed == 20
        assert any(r["ced_spans"] for r in augmented)
