"""Export trained artifacts in the corrector's exchange formats.

The binary memory layout is written independently here (little-endian:
magic EDAM, u32 version=1, u32 count, u32 dim, then per row u16 surface
byte length, UTF-8 surface, dim float32s); round-trip equality against the
consumer is pinned in the test suite.
"""

from __future__ import annotations

import json
import struct

import numpy as np
import torch

from entfix_trainer.masking import entity_input, masked_context
from entfix_trainer.train_biencoder import BiEncoderCheckpoint

EDAM_MAGIC = b"EDAM"
EDAM_VERSION = 1


@torch.no_grad()
def entity_embedding_matrix(checkpoint: BiEncoderCheckpoint,
                            catalog: list[tuple[str, str]]) -> np.ndarray:
    checkpoint.entity_encoder.eval()
    vecs = checkpoint.entity_encoder([entity_input(s, d) for s, d in catalog])
    return vecs.cpu().numpy().astype(np.float32)


def write_edam(surfaces: list[str], matrix: np.ndarray, path: str) -> None:
    count, dim = matrix.shape
    with open(path, "wb") as fh:
        fh.write(EDAM_MAGIC)
        fh.write(struct.pack("<III", EDAM_VERSION, count, dim))
        for surface, row in zip(surfaces, matrix):
            raw = surface.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(struct.pack(f"<{dim}f", *row.tolist()))


def export_entity_embeddings(checkpoint: BiEncoderCheckpoint,
                             catalog: list[tuple[str, str]], path: str) -> np.ndarray:
    matrix = entity_embedding_matrix(checkpoint, catalog)
    write_edam([s for s, _ in catalog], matrix, path)
    return matrix


@torch.no_grad()
def export_context_vectors(checkpoint: BiEncoderCheckpoint,
                           records: list[dict], path: str) -> int:
    """One vector per (utt_id, span_index) over each record's ced_spans,
    in the corrector's context-vector JSONL format."""
    checkpoint.context_encoder.eval()
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            top1 = record["nbest"][0]["text"]
            for span_index, (start, end) in enumerate(record.get("ced_spans") or []):
                context = masked_context(top1, start, end)
                vec = checkpoint.context_encoder([context])[0].cpu().numpy()
                fh.write(json.dumps({
                    "utt_id": record["utt_id"],
                    "span_index": span_index,
                    "vector": [float(v) for v in vec],
                }, ensure_ascii=False))
                fh.write("\n")
                count += 1
    return count


def rank_catalog(matrix: np.ndarray, query: np.ndarray) -> list[int]:
    """Trainer-side exact ranking by dot product, ties toward the lower row
    index (mirrors the consumer's tie rule over ids)."""
    scores = matrix.astype(np.float64) @ np.asarray(query, dtype=np.float64)
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))
