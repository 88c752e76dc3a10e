"""Desk-scale training for the entfix correction pipeline.

Trains a contrastive bi-encoder (masked-context encoder with span head,
entity+description encoder) and a BIO corrupted-entity tagger on a
synthetic corpus, then exports artifacts in the formats the corrector
consumes: the binary entity-embedding memory, context-vector JSONL, and
`ced_spans`-augmented n-best JSONL. File handoff only; this package never
imports the corrector.
"""

__version__ = "0.1.0"
