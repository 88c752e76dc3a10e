"""BIO corrupted-entity tagger: per-character cross-entropy over B/I/O."""

from __future__ import annotations

from dataclasses import dataclass, field

import torch
from torch import nn

from entfix_trainer.corpus import TaggedHypothesis
from entfix_trainer.models import CedTagger, CharVocab

TAG_INDEX = {tag: i for i, tag in enumerate(CedTagger.TAGS)}


@dataclass
class CedCheckpoint:
    tagger: CedTagger
    run_config: dict
    epoch_losses: list[float] = field(default_factory=list)


def train_ced(
    tagged: list[TaggedHypothesis],
    epochs: int = 10,
    batch_size: int = 32,
    dim: int = 64,
    lr: float = 1e-3,
    seed: int = 0,
) -> CedCheckpoint:
    torch.manual_seed(seed)
    vocab = CharVocab([t.text for t in tagged])
    tagger = CedTagger(vocab, dim=dim)
    optimizer = torch.optim.Adam(tagger.parameters(), lr=lr)
    generator = torch.Generator().manual_seed(seed)
    loss_fn = nn.CrossEntropyLoss(ignore_index=-100)

    epoch_losses = []
    for _epoch in range(epochs):
        tagger.train()
        order = torch.randperm(len(tagged), generator=generator).tolist()
        total = 0.0
        batches = 0
        for start in range(0, len(order), batch_size):
            batch = [tagged[i] for i in order[start:start + batch_size]]
            logits, mask = tagger([t.text for t in batch])
            labels = torch.full(mask.shape, -100, dtype=torch.long)
            for row, item in enumerate(batch):
                for pos, tag in enumerate(item.tags):
                    labels[row, pos] = TAG_INDEX[tag]
            loss = loss_fn(logits.reshape(-1, 3), labels.reshape(-1))
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += float(loss.detach())
            batches += 1
        epoch_losses.append(total / batches)

    return CedCheckpoint(
        tagger=tagger,
        run_config={"epochs": epochs, "batch_size": batch_size, "dim": dim,
                    "lr": lr, "seed": seed, "optimizer": "adam"},
        epoch_losses=epoch_losses,
    )


def decode_spans(tags: str) -> list[list[int]]:
    """Maximal B(I)* runs as [start, end) pairs; orphan I repairs to B."""
    spans = []
    start = None
    for i, tag in enumerate(tags):
        if tag == "I" and start is None:
            tag = "B"
        if tag == "B":
            if start is not None:
                spans.append([start, i])
            start = i
        elif tag == "O" and start is not None:
            spans.append([start, i])
            start = None
    if start is not None:
        spans.append([start, len(tags)])
    return spans


def predict_ced_spans(checkpoint: CedCheckpoint, hypothesis: str) -> list[list[int]]:
    return decode_spans(checkpoint.tagger.predict_tags(hypothesis))


def span_f1(predicted: list[list[int]], gold: list[list[int]]) -> float:
    pred = {tuple(s) for s in predicted}
    want = {tuple(s) for s in gold}
    tp = len(pred & want)
    precision = tp / len(pred) if pred else (1.0 if not want else 0.0)
    recall = tp / len(want) if want else 1.0
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def augment_nbest_records(checkpoint: CedCheckpoint,
                          records: list[dict]) -> list[dict]:
    """Attach predicted ced_spans (on the top-1 hypothesis) to each record."""
    out = []
    for record in records:
        augmented = dict(record)
        top1 = record["nbest"][0]["text"]
        augmented["ced_spans"] = predict_ced_spans(checkpoint, top1)
        out.append(augmented)
    return out
