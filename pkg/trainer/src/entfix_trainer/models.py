"""Toy encoders standing in for the full pretrained stacks: character-level
transformer encoders sized for a desk-scale corpus. Only the interface
contracts matter to the corrector: the context encoder reads a masked
hypothesis with [ES]/[EE] markers and emits one vector per span via a
bias-free linear span head over the concatenated marker states; the entity
encoder pools the [CLS] position of [CLS]surface[SEP]description[SEP].
"""

from __future__ import annotations

import torch
from torch import nn

from entfix_trainer.masking import CLS, SPAN_END, SPAN_START, SPECIAL_TOKENS, tokenize

PAD = "[PAD]"
UNK = "[UNK]"


class CharVocab:
    def __init__(self, texts: list[str]):
        symbols = [PAD, UNK, *SPECIAL_TOKENS]
        seen = set(symbols)
        for text in texts:
            for token in tokenize(text):
                if token not in seen:
                    seen.add(token)
                    symbols.append(token)
        self.symbols = symbols
        self.index = {s: i for i, s in enumerate(symbols)}

    def __len__(self) -> int:
        return len(self.symbols)

    def encode(self, text: str) -> list[int]:
        unk = self.index[UNK]
        return [self.index.get(tok, unk) for tok in tokenize(text)]


def pad_batch(seqs: list[list[int]], pad_id: int = 0) -> tuple[torch.Tensor, torch.Tensor]:
    width = max(len(s) for s in seqs)
    ids = torch.full((len(seqs), width), pad_id, dtype=torch.long)
    mask = torch.zeros((len(seqs), width), dtype=torch.bool)
    for row, seq in enumerate(seqs):
        ids[row, :len(seq)] = torch.tensor(seq, dtype=torch.long)
        mask[row, :len(seq)] = True
    return ids, mask


class CharTransformer(nn.Module):
    """Shared trunk: embeddings + positional embeddings + transformer."""

    def __init__(self, vocab_size: int, dim: int = 64, layers: int = 2,
                 heads: int = 4, max_len: int = 128):
        super().__init__()
        self.embed = nn.Embedding(vocab_size, dim, padding_idx=0)
        self.position = nn.Embedding(max_len, dim)
        layer = nn.TransformerEncoderLayer(
            d_model=dim, nhead=heads, dim_feedforward=4 * dim,
            batch_first=True, dropout=0.1)
        self.encoder = nn.TransformerEncoder(layer, num_layers=layers,
                                             enable_nested_tensor=False)
        self.dim = dim

    def forward(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.shape[1], device=ids.device)
        hidden = self.embed(ids) + self.position(positions)[None, :, :]
        return self.encoder(hidden, src_key_padding_mask=~mask)


class ContextEncoder(nn.Module):
    """Masked-hypothesis encoder: concat the [ES] and [EE] hidden states and
    apply the bias-free linear span head."""

    def __init__(self, vocab: CharVocab, dim: int = 64, layers: int = 2):
        super().__init__()
        self.vocab = vocab
        self.trunk = CharTransformer(len(vocab), dim=dim, layers=layers)
        self.span_head = nn.Linear(2 * dim, dim, bias=False)

    def forward(self, contexts: list[str]) -> torch.Tensor:
        encoded = [self.vocab.encode(text) for text in contexts]
        ids, mask = pad_batch(encoded)
        device = next(self.parameters()).device
        ids, mask = ids.to(device), mask.to(device)
        hidden = self.trunk(ids, mask)
        es_id = self.vocab.index[SPAN_START]
        ee_id = self.vocab.index[SPAN_END]
        starts = (ids == es_id).float().argmax(dim=1)
        ends = (ids == ee_id).float().argmax(dim=1)
        rows = torch.arange(ids.shape[0], device=device)
        concat = torch.cat([hidden[rows, starts], hidden[rows, ends]], dim=1)
        return self.span_head(concat)


class EntityEncoder(nn.Module):
    """Entity+description encoder pooled at the [CLS] position."""

    def __init__(self, vocab: CharVocab, dim: int = 64, layers: int = 2):
        super().__init__()
        self.vocab = vocab
        self.trunk = CharTransformer(len(vocab), dim=dim, layers=layers)

    def forward(self, inputs: list[str]) -> torch.Tensor:
        encoded = [self.vocab.encode(text) for text in inputs]
        ids, mask = pad_batch(encoded)
        device = next(self.parameters()).device
        ids, mask = ids.to(device), mask.to(device)
        hidden = self.trunk(ids, mask)
        cls_positions = (ids == self.vocab.index[CLS]).float().argmax(dim=1)
        rows = torch.arange(ids.shape[0], device=device)
        return hidden[rows, cls_positions]


class CedTagger(nn.Module):
    """Per-character B/I/O classifier over the raw hypothesis."""

    TAGS = "BIO"

    def __init__(self, vocab: CharVocab, dim: int = 64, layers: int = 2):
        super().__init__()
        self.vocab = vocab
        self.trunk = CharTransformer(len(vocab), dim=dim, layers=layers)
        self.head = nn.Linear(dim, len(self.TAGS))

    def forward(self, texts: list[str]) -> tuple[torch.Tensor, torch.Tensor]:
        encoded = [self.vocab.encode(text) for text in texts]
        ids, mask = pad_batch(encoded)
        device = next(self.parameters()).device
        ids, mask = ids.to(device), mask.to(device)
        return self.head(self.trunk(ids, mask)), mask

    @torch.no_grad()
    def predict_tags(self, text: str) -> str:
        self.eval()
        logits, _mask = self([text])
        picks = logits[0, :len(tokenize(text))].argmax(dim=-1).tolist()
        return "".join(self.TAGS[p] for p in picks)


def in_batch_infonce(context_vecs: torch.Tensor,
                     entity_vecs: torch.Tensor) -> torch.Tensor:
    """Mean over rows of -log softmax on the diagonal of the pairwise
    dot-product matrix (in-batch negatives)."""
    scores = context_vecs @ entity_vecs.T
    labels = torch.arange(scores.shape[0], device=scores.device)
    return nn.functional.cross_entropy(scores, labels)
