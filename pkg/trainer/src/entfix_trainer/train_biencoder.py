"""Contrastive bi-encoder training with in-batch negatives.

Optimizer defaults are DPR-toolkit-style (Adam, 1e-3 at this scale) and
recorded in the returned run config; they are tuning choices, not contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import torch

from entfix_trainer.corpus import TrainingTriple
from entfix_trainer.masking import entity_input
from entfix_trainer.models import (
    CharVocab,
    ContextEncoder,
    EntityEncoder,
    in_batch_infonce,
)


@dataclass
class BiEncoderCheckpoint:
    vocab: CharVocab
    context_encoder: ContextEncoder
    entity_encoder: EntityEncoder
    run_config: dict
    epoch_losses: list[float] = field(default_factory=list)


def build_vocab(triples: list[TrainingTriple]) -> CharVocab:
    texts = [t.context for t in triples]
    texts += [entity_input(t.entity, t.description) for t in triples]
    return CharVocab(texts)


def train_biencoder(
    triples: list[TrainingTriple],
    epochs: int = 10,
    batch_size: int = 32,
    dim: int = 64,
    lr: float = 1e-3,
    seed: int = 0,
) -> BiEncoderCheckpoint:
    torch.manual_seed(seed)
    vocab = build_vocab(triples)
    context_encoder = ContextEncoder(vocab, dim=dim)
    entity_encoder = EntityEncoder(vocab, dim=dim)
    params = list(context_encoder.parameters()) + list(entity_encoder.parameters())
    optimizer = torch.optim.Adam(params, lr=lr)
    generator = torch.Generator().manual_seed(seed)

    epoch_losses: list[float] = []
    for _epoch in range(epochs):
        context_encoder.train()
        entity_encoder.train()
        order = torch.randperm(len(triples), generator=generator).tolist()
        total = 0.0
        batches = 0
        for start in range(0, len(order), batch_size):
            batch = [triples[i] for i in order[start:start + batch_size]]
            if len(batch) < 2:
                continue
            contexts = context_encoder([t.context for t in batch])
            entities = entity_encoder(
                [entity_input(t.entity, t.description) for t in batch])
            loss = in_batch_infonce(contexts, entities)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += float(loss.detach())
            batches += 1
        epoch_losses.append(total / batches)

    return BiEncoderCheckpoint(
        vocab=vocab,
        context_encoder=context_encoder,
        entity_encoder=entity_encoder,
        run_config={"epochs": epochs, "batch_size": batch_size, "dim": dim,
                    "lr": lr, "seed": seed, "optimizer": "adam"},
        epoch_losses=epoch_losses,
    )


@torch.no_grad()
def retrieval_accuracy(checkpoint: BiEncoderCheckpoint,
                       held_out: list[TrainingTriple],
                       catalog: list[tuple[str, str]]) -> float:
    """Accuracy@1 of ranking the full catalog for each held-out context."""
    checkpoint.context_encoder.eval()
    checkpoint.entity_encoder.eval()
    entity_vecs = checkpoint.entity_encoder(
        [entity_input(s, d) for s, d in catalog])
    context_vecs = checkpoint.context_encoder([t.context for t in held_out])
    scores = context_vecs @ entity_vecs.T
    picks = scores.argmax(dim=1).tolist()
    surfaces = [catalog[p][0] for p in picks]
    hits = sum(got == t.entity for got, t in zip(surfaces, held_out))
    return hits / len(held_out)
