"""Offline batch entry points: python -m entfix_trainer <command>."""

from __future__ import annotations

import argparse
import json
import sys

from entfix_trainer import corpus
from entfix_trainer.export import export_context_vectors, export_entity_embeddings
from entfix_trainer.train_biencoder import retrieval_accuracy, train_biencoder
from entfix_trainer.train_ced import augment_nbest_records, train_ced


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="entfix-trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-biencoder",
                       help="train encoders on the synthetic corpus and export")
    p.add_argument("--triples", type=int, default=200)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--memory-out", required=True, help="entity memory (EDAM binary)")
    p.add_argument("--context-out", help="context-vector JSONL for --nbest records")
    p.add_argument("--nbest-out", help="write the synthetic n-best JSONL here")

    p = sub.add_parser("train-ced", help="train the B/I/O tagger and tag a corpus")
    p.add_argument("--samples", type=int, default=300)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nbest-out", required=True,
                   help="ced_spans-augmented n-best JSONL output")

    args = parser.parse_args(argv)
    if args.command == "train-biencoder":
        triples = corpus.make_triples(args.triples, seed=args.seed)
        checkpoint = train_biencoder(triples, epochs=args.epochs,
                                     batch_size=args.batch_size,
                                     dim=args.dim, seed=args.seed)
        print("epoch losses:", " ".join(f"{x:.4f}" for x in checkpoint.epoch_losses))
        held_out = corpus.make_triples(40, seed=args.seed + 1)
        acc = retrieval_accuracy(checkpoint, held_out, corpus.ENTITIES)
        print(f"held-out retrieval accuracy@1: {acc:.3f} "
              f"(random {1 / len(corpus.ENTITIES):.3f})")
        export_entity_embeddings(checkpoint, corpus.ENTITIES, args.memory_out)
        print("wrote", args.memory_out)
        if args.nbest_out or args.context_out:
            records = corpus.make_nbest_records(40, seed=args.seed + 2)
            for record in records:
                record["ced_spans"] = record["ne_spans"]
            if args.nbest_out:
                with open(args.nbest_out, "w", encoding="utf-8") as fh:
                    for record in records:
                        fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                print("wrote", args.nbest_out)
            if args.context_out:
                n = export_context_vectors(checkpoint, records, args.context_out)
                print(f"wrote {n} context vectors to {args.context_out}")
        return 0

    tagged = corpus.make_tagged(args.samples, seed=args.seed)
    checkpoint = train_ced(tagged, epochs=args.epochs, seed=args.seed)
    print("epoch losses:", " ".join(f"{x:.4f}" for x in checkpoint.epoch_losses))
    records = corpus.make_nbest_records(40, seed=args.seed + 2)
    augmented = augment_nbest_records(checkpoint, records)
    with open(args.nbest_out, "w", encoding="utf-8") as fh:
        for record in augmented:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    print("wrote", args.nbest_out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
