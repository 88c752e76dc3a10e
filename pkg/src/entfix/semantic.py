"""Semantic channel: masked-context transforms, bi-encoder scoring math,
the entity-description embedding memory, and a deterministic reference
embedder that stands in for trained encoders.

Encoders are providers: the default reference embedder hashes character
n-grams so the semantic score reflects lexical overlap between a masked
context and an entity description; trained vectors can be swapped in from
files without touching any scoring code.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, replace

import numpy as np

from entfix.detection import CorruptedSpan

MASK = "[MASK]"
SPAN_START = "[ES]"
SPAN_END = "[EE]"
CLS = "[CLS]"
SEP = "[SEP]"

_CONTROL_TOKENS = (MASK, SPAN_START, SPAN_END, CLS, SEP)

EDAM_MAGIC = b"EDAM"
EDAM_VERSION = 1


@dataclass(frozen=True)
class MaskedContext:
    """A hypothesis with one corrupted span masked out.

    ``text`` carries literal [MASK] tokens (and [ES]/[EE] once markers are
    inserted); ``span_len`` is the masked character count; ``origin``
    identifies the (utterance id, span index) the context came from.
    """

    text: str
    span_len: int
    origin: tuple[str, int] | None = None

    @property
    def has_markers(self) -> bool:
        return SPAN_START in self.text


def mask_span(hypothesis: str, span: CorruptedSpan) -> MaskedContext:
    """Replace the span's characters with exactly span-length [MASK] tokens."""
    if not (0 <= span.start < span.end <= len(hypothesis)):
        raise ValueError(f"span [{span.start}, {span.end}) out of range")
    length = span.end - span.start
    text = hypothesis[:span.start] + MASK * length + hypothesis[span.end:]
    return MaskedContext(text, length)


def insert_markers(masked: MaskedContext) -> MaskedContext:
    """Insert [ES] before the first [MASK] and [EE] after the last one."""
    if masked.has_markers:
        raise ValueError("markers already inserted")
    first = masked.text.find(MASK)
    if first < 0:
        raise ValueError("no [MASK] run to mark")
    last = first + len(MASK) * masked.span_len
    text = (masked.text[:first] + SPAN_START + masked.text[first:last]
            + SPAN_END + masked.text[last:])
    return replace(masked, text=text)


def entity_input(entity_surface: str, description: str) -> str:
    """Render the entity-encoder input ``[CLS]surface[SEP]description[SEP]``.

    Control-token literals inside the fields would corrupt the frame, so
    they are stripped (ingestion already removes them; this is the backstop).
    """
    surface = _strip_controls(entity_surface)
    desc = _strip_controls(description)
    return f"{CLS}{surface}{SEP}{desc}{SEP}"


def _strip_controls(text: str) -> str:
    for token in _CONTROL_TOKENS:
        text = text.replace(token, "")
    return text


def span_encode(h_s: np.ndarray, h_e: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Linear span encoder: weights (d x 2d) applied to [h_s; h_e]."""
    h_s = np.asarray(h_s, dtype=np.float64)
    h_e = np.asarray(h_e, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape[1] != h_s.shape[0] + h_e.shape[0]:
        raise ValueError(f"weight shape {weights.shape} does not take "
                         f"concat({h_s.shape[0]}, {h_e.shape[0]})")
    return weights @ np.concatenate([h_s, h_e])


def semantic_distribution(
    context_vec: np.ndarray,
    candidates: list[tuple[int, np.ndarray]],
) -> dict[int, float]:
    """Softmax over dot products between the context vector and each
    candidate vector, restricted to the candidate subset."""
    if not candidates:
        raise ValueError("empty candidate set")
    context = np.asarray(context_vec, dtype=np.float64)
    dots = np.array([float(context @ np.asarray(vec, dtype=np.float64))
                     for _id, vec in candidates])
    dots -= dots.max()  # max-subtraction for stability
    expd = np.exp(dots)
    probs = expd / expd.sum()
    return {cid: float(p) for (cid, _), p in zip(candidates, probs)}


def infonce_loss(context_batch: np.ndarray, entity_batch: np.ndarray) -> float:
    """In-batch contrastive loss: mean over rows of -log softmax on the
    diagonal of the pairwise dot-product matrix."""
    loss, _, _ = infonce_loss_and_grad(context_batch, entity_batch)
    return loss


def infonce_loss_and_grad(
    context_batch: np.ndarray,
    entity_batch: np.ndarray,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss plus analytic gradients with respect to both batches.

    With S = C @ E^T and P the row softmax of S,
    dL/dS = (P - I) / B, dL/dC = dL/dS @ E, dL/dE = dL/dS^T @ C.
    """
    contexts = np.asarray(context_batch, dtype=np.float64)
    entities = np.asarray(entity_batch, dtype=np.float64)
    if contexts.shape != entities.shape or contexts.ndim != 2:
        raise ValueError(f"batch shapes differ: {contexts.shape} vs {entities.shape}")
    batch = contexts.shape[0]
    scores = contexts @ entities.T
    shifted = scores - scores.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    log_probs = shifted - log_norm[:, None]
    loss = -float(np.trace(log_probs)) / batch
    probs = np.exp(log_probs)
    dscores = (probs - np.eye(batch)) / batch
    return loss, dscores @ entities, dscores.T @ contexts


@dataclass
class EmbeddingMemory:
    """Immutable matrix of entity-description embeddings with an id map."""

    dim: int
    ids: np.ndarray  # int64, row -> entity id
    surfaces: list[str]
    rows: np.ndarray  # float32, C x dim

    def __post_init__(self):
        self._row_of = {int(eid): i for i, eid in enumerate(self.ids)}

    def __len__(self) -> int:
        return self.rows.shape[0]

    def vector_for(self, entity_id: int) -> np.ndarray | None:
        row = self._row_of.get(entity_id)
        return self.rows[row] if row is not None else None


def build_memory(
    ids: list[int],
    surfaces: list[str],
    vectors: np.ndarray,
) -> EmbeddingMemory:
    """Freeze entity vectors into a memory; validates shapes and finiteness."""
    rows = np.ascontiguousarray(np.asarray(vectors, dtype=np.float32))
    if rows.ndim != 2 or rows.shape[0] != len(ids) or len(ids) != len(surfaces):
        raise ValueError("ids, surfaces, and vector rows must line up")
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate entity ids in memory")
    if rows.size and not np.isfinite(rows).all():
        raise ValueError("non-finite embedding component")
    return EmbeddingMemory(rows.shape[1], np.asarray(ids, dtype=np.int64),
                           list(surfaces), rows)


def save_memory(memory: EmbeddingMemory, path: str) -> None:
    """Write the little-endian binary memory format."""
    with open(path, "wb") as fh:
        fh.write(EDAM_MAGIC)
        fh.write(struct.pack("<III", EDAM_VERSION, len(memory), memory.dim))
        for surface, row in zip(memory.surfaces, memory.rows):
            raw = surface.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise ValueError(f"surface too long: {surface[:16]!r}...")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(struct.pack(f"<{memory.dim}f", *row.tolist()))


def load_memory(path: str, catalog=None, normalize: bool = False) -> EmbeddingMemory:
    """Read the binary memory format back.

    With a catalog, row ids are resolved by surface (unknown surfaces are an
    error); standalone, ids are the row indices. ``normalize`` L2-normalizes
    rows on load for encoders that emit unnormalized vectors.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != EDAM_MAGIC:
        raise ValueError(f"{path}: bad magic {blob[:4]!r}")
    version, count, dim = struct.unpack_from("<III", blob, 4)
    if version != EDAM_VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    offset = 16
    ids: list[int] = []
    surfaces: list[str] = []
    rows = np.empty((count, dim), dtype=np.float32)
    for row_index in range(count):
        (surface_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        surface = blob[offset:offset + surface_len].decode("utf-8")
        offset += surface_len
        rows[row_index] = np.frombuffer(blob, dtype="<f4", count=dim, offset=offset)
        offset += 4 * dim
        if catalog is not None:
            entity = catalog.by_surface(surface)
            if entity is None:
                raise ValueError(f"{path}: row {row_index} surface {surface!r} "
                                 "not in catalog")
            ids.append(entity.id)
        else:
            ids.append(row_index)
        surfaces.append(surface)
    if offset != len(blob):
        raise ValueError(f"{path}: {len(blob) - offset} trailing bytes")
    if rows.size and not np.isfinite(rows).all():
        raise ValueError(f"{path}: non-finite embedding component")
    if normalize and rows.size:
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        rows = (rows / norms).astype(np.float32)
    return EmbeddingMemory(dim, np.asarray(ids, dtype=np.int64), surfaces, rows)


def topk_inner_product(
    memory: EmbeddingMemory,
    query: np.ndarray,
    k: int,
) -> list[tuple[int, float]]:
    """Exact top-k rows by dot product; ties break toward the lower entity
    id; k beyond the row count returns everything."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(memory) == 0:
        return []
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (memory.dim,):
        raise ValueError(f"query dim {q.shape} != memory dim {memory.dim}")
    scores = memory.rows.astype(np.float64) @ q
    order = np.lexsort((memory.ids, -scores))
    top = order[:min(k, len(memory))]
    return [(int(memory.ids[i]), float(scores[i])) for i in top]


def hashed_ngram_buckets(text: str, dim: int, seed: int) -> dict[int, int]:
    """Bucket counts of character 1/2/3-grams under a seeded stable hash;
    control tokens are removed before n-gram extraction."""
    content = _strip_controls(text)
    key = seed.to_bytes(8, "little", signed=True)
    buckets: dict[int, int] = {}
    for n in (1, 2, 3):
        for i in range(len(content) - n + 1):
            gram = content[i:i + n]
            digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8, key=key).digest()
            bucket = int.from_bytes(digest, "little") % dim
            buckets[bucket] = buckets.get(bucket, 0) + 1
    return buckets


def reference_embed(text: str, dim: int = 256, seed: int = 0) -> np.ndarray:
    """Deterministic stand-in encoder: hashed n-gram counts, L2-normalized.

    Masked contexts and entity inputs go through the same hashing, so
    lexical overlap between a span's surroundings and a candidate's
    description shows up as a positive dot product.
    """
    vec = np.zeros(dim, dtype=np.float64)
    for bucket, count in hashed_ngram_buckets(text, dim, seed).items():
        vec[bucket] += count
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


class ReferenceEncoder:
    """Provider pairing the hash embedder for contexts and entities."""

    def __init__(self, dim: int = 256, seed: int = 0):
        self.dim = dim
        self.seed = seed

    def encode_context(self, masked: MaskedContext) -> np.ndarray:
        return reference_embed(masked.text, self.dim, self.seed)

    def encode_entity(self, surface: str, description: str) -> np.ndarray:
        return reference_embed(entity_input(surface, description), self.dim, self.seed)

    def memory_for(self, catalog) -> EmbeddingMemory:
        """Embed every described catalog entity into a frozen memory."""
        ids, surfaces, vectors = [], [], []
        for entity in catalog:
            desc = catalog.description(entity.id)
            if desc is None:
                continue
            ids.append(entity.id)
            surfaces.append(entity.surface)
            vectors.append(self.encode_entity(entity.surface, desc))
        matrix = (np.vstack(vectors) if vectors
                  else np.zeros((0, self.dim), dtype=np.float32))
        return build_memory(ids, surfaces, matrix)


class FileContextProvider:
    """Context vectors precomputed by a trained encoder, keyed by
    (utterance id, span index)."""

    def __init__(self, vectors: dict[tuple[str, int], np.ndarray], dim: int):
        self.vectors = vectors
        self.dim = dim

    def encode_context(self, masked: MaskedContext) -> np.ndarray:
        if masked.origin is None or masked.origin not in self.vectors:
            raise KeyError(f"no precomputed context vector for {masked.origin}")
        return self.vectors[masked.origin]
