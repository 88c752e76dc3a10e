"""The correction pipeline: detect corrupted spans in the top hypothesis,
retrieve phonetically similar entities, rerank with description-based
semantic scores, fuse the two signals, and gate each replacement against
the n-best acoustic evidence.

A phonetic-only path (no semantic channel, no fusion) is kept as a
standalone baseline built from the same detection, retrieval, and rejection
parts; the full pipeline at alpha = 1 must reproduce it exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from entfix.alignment import char_align, project_span
from entfix.detection import (
    CorruptedSpan,
    bio_decode,
    detect_baseline,
    label_bio_by_alignment,
    spans_from_offsets,
)
from entfix.phonetics import batch_similarities, normalized_distance, phoneticize
from entfix.semantic import insert_markers, mask_span, semantic_distribution
from entfix.store import EntityCatalog

LOG_FLOOR = 1e-12  # probabilities are floored here before taking logs


@dataclass(frozen=True)
class Hypothesis:
    text: str
    score: float


@dataclass(frozen=True)
class NBestList:
    """Ranked ASR hypotheses with beam scores; index 0 is the top-1."""

    hypotheses: tuple[Hypothesis, ...]

    def __post_init__(self):
        if not self.hypotheses:
            raise ValueError("n-best list must contain at least one hypothesis")
        for hyp in self.hypotheses:
            if not math.isfinite(hyp.score):
                raise ValueError(f"non-finite beam score {hyp.score!r}")

    def __len__(self) -> int:
        return len(self.hypotheses)

    @property
    def top1(self) -> str:
        return self.hypotheses[0].text

    def truncated(self, n: int) -> "NBestList":
        return NBestList(self.hypotheses[:max(1, n)])


@dataclass(frozen=True)
class Utterance:
    """One input record: n-best list plus optional reference and span fields."""

    utt_id: str
    nbest: NBestList
    ref: str | None = None
    ne_spans: tuple[tuple[int, int], ...] = ()
    ced_spans: tuple[tuple[int, int], ...] | None = None


@dataclass
class Candidate:
    entity_id: int
    surface: str
    p_phonetic: float
    p_semantic: float | None = None
    fused: float | None = None


@dataclass
class CorrectionResult:
    """Per-span outcome: candidates, decision, and the span's final text."""

    span: CorruptedSpan
    candidates: list[Candidate]
    chosen_id: int | None
    chosen_surface: str | None
    rejected: bool
    reject_score_candidate: float | None
    reject_score_original: float | None
    corrected_text: str


@dataclass
class CorrectionConfig:
    alpha: float = 0.6
    top_k: int = 10
    nbest_size: int = 10
    detector: str = "external"  # external | baseline | gold
    rejection: bool = True
    raw_beam_weights: bool = False
    require_descriptions: bool = False
    min_sim: float = 0.7
    window_slack: int = 1

    def validate(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")
        if self.nbest_size < 1:
            raise ValueError(f"nbest_size must be >= 1, got {self.nbest_size}")
        if self.detector not in ("external", "baseline", "gold"):
            raise ValueError(f"unknown detector {self.detector!r}")


def phonetic_scores(span_surface: str, catalog: EntityCatalog) -> np.ndarray:
    """Normalized phonetic similarity of every catalog entity to the span:
    SIM divided by the sum of SIM over the whole catalog. All-zero
    similarity degenerates to the uniform distribution so the scores stay
    defined."""
    if len(catalog) == 0:
        raise ValueError("empty catalog")
    query = phoneticize(span_surface, catalog.lexicon)
    sims = np.array(batch_similarities(query, [e.phonetic for e in catalog]))
    total = sims.sum()
    if total == 0.0:
        return np.full(len(sims), 1.0 / len(sims))
    return sims / total


def phonetic_retrieve(span_surface: str, catalog: EntityCatalog,
                      k: int = 10) -> list[Candidate]:
    """Top-k entities by normalized phonetic score.

    Ties rank an exact surface match first (a span that already is a
    catalog entity must head its own candidate list), then lower id.
    Zero-probability entities never enter the candidate set unless the
    whole catalog degenerated to uniform."""
    probs = phonetic_scores(span_surface, catalog)
    order = sorted(
        range(len(probs)),
        key=lambda i: (-probs[i], catalog.entities[i].surface != span_surface,
                       catalog.entities[i].id))
    out = []
    for i in order:
        if probs[i] <= 0.0:
            break
        entity = catalog.entities[i]
        out.append(Candidate(entity.id, entity.surface, float(probs[i])))
        if len(out) == k:
            break
    return out


def semantic_candidate_scores(candidates: list[Candidate], context_vec,
                              memory) -> dict[int, float]:
    """Semantic probabilities over the candidate subset.

    Candidates with stored vectors share the softmax mass proportionally;
    candidates without descriptions (non-strict catalogs) each take a
    uniform 1/t share, the softmax scaling into the residual."""
    if not candidates:
        raise ValueError("empty candidate set")
    with_vec: list[tuple[int, np.ndarray]] = []
    missing: list[int] = []
    for cand in candidates:
        vec = memory.vector_for(cand.entity_id) if memory is not None else None
        if vec is None:
            missing.append(cand.entity_id)
        else:
            with_vec.append((cand.entity_id, vec))
    total = len(candidates)
    if not with_vec:
        return {c.entity_id: 1.0 / total for c in candidates}
    softmax = semantic_distribution(context_vec, with_vec)
    described_mass = (total - len(missing)) / total
    scores = {cid: p * described_mass for cid, p in softmax.items()}
    for cid in missing:
        scores[cid] = 1.0 / total
    return scores


def fuse_scores(candidates: list[Candidate], alpha: float) -> list[Candidate]:
    """Rank candidates by alpha * log(p_phonetic) + (1 - alpha) * log(p_semantic).

    The sort is stable, so fused ties keep the retrieval order (exact
    surface match first, then lower id). Candidates must carry both scores."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    for cand in candidates:
        if cand.p_semantic is None:
            raise ValueError(f"candidate {cand.entity_id} lacks a semantic score")
        cand.fused = (alpha * math.log(max(cand.p_phonetic, LOG_FLOOR))
                      + (1.0 - alpha) * math.log(max(cand.p_semantic, LOG_FLOOR)))
    return sorted(candidates, key=lambda c: -c.fused)


def beam_weights(nbest: NBestList, raw: bool = False) -> list[float]:
    """Per-hypothesis weights for the rejection sum: softmax over the beam
    scores (treated as log-probabilities), or the raw scores when asked."""
    scores = [h.score for h in nbest.hypotheses]
    if raw:
        return scores
    peak = max(scores)
    exps = [math.exp(s - peak) for s in scores]
    norm = sum(exps)
    return [e / norm for e in exps]


def align_spans_across_nbest(
    top1_span: CorruptedSpan,
    nbest: NBestList,
    _alignments=None,
) -> list[tuple[int, int, str]]:
    """Project the top-1 span into every hypothesis via character alignment.

    Hypotheses missing the span region entirely yield a zero-length
    projection, which the rejection score treats as maximally distant."""
    top1 = nbest.top1
    out = []
    for idx, hyp in enumerate(nbest.hypotheses):
        ops = _alignments[idx] if _alignments is not None else char_align(hyp.text, top1)
        start, end = project_span(ops, top1_span.start, top1_span.end)
        out.append((start, end, hyp.text[start:end]))
    return out


def rejection_score(candidate_surface: str,
                    aligned_surfaces: list[str],
                    weights: list[float],
                    lex) -> float:
    """Beam-weighted phonetic distance between the candidate and the span's
    realization in each hypothesis."""
    cand = phoneticize(candidate_surface, lex)
    total = 0.0
    for surface, weight in zip(aligned_surfaces, weights):
        total += weight * normalized_distance(phoneticize(surface, lex), cand)
    return total


def should_reject(reject_candidate: float, reject_original: float) -> bool:
    """Reject a replacement only when it is strictly farther from the
    acoustic evidence than the original span; equality accepts."""
    return reject_candidate > reject_original


def _detect(utt: Utterance, top1: str, catalog: EntityCatalog,
            config: CorrectionConfig) -> list[CorruptedSpan]:
    if config.detector == "external":
        if utt.ced_spans is None:
            raise ValueError(f"{utt.utt_id}: detector=external requires ced_spans")
        return spans_from_offsets(list(utt.ced_spans), top1)
    if config.detector == "gold":
        if utt.ref is None:
            raise ValueError(f"{utt.utt_id}: detector=gold requires a reference")
        tags = label_bio_by_alignment(top1, utt.ref, list(utt.ne_spans), strict=True)
        return bio_decode(tags, top1)[0]
    return detect_baseline(top1, catalog, catalog.lexicon,
                           min_sim=config.min_sim, window_slack=config.window_slack)


def _apply_decisions(top1: str, spans: list[CorruptedSpan],
                     results: list[CorrectionResult]) -> str:
    parts = []
    cursor = 0
    for span, result in zip(spans, results):
        parts.append(top1[cursor:span.start])
        parts.append(result.corrected_text)
        cursor = span.end
    parts.append(top1[cursor:])
    return "".join(parts)


def correct_utterance(
    utt: Utterance,
    catalog: EntityCatalog,
    memory,
    context_provider,
    config: CorrectionConfig,
) -> tuple[str, list[CorrectionResult]]:
    """Run the full pipeline on one utterance; returns the corrected top-1
    text and one result record per detected span."""
    config.validate()
    work = catalog.described_only() if config.require_descriptions else catalog
    nbest = utt.nbest.truncated(config.nbest_size)
    top1 = nbest.top1
    if len(work) == 0:
        return top1, []
    spans = _detect(utt, top1, work, config)
    if not spans:
        return top1, []
    weights = beam_weights(nbest, raw=config.raw_beam_weights)
    alignments = [char_align(h.text, top1) for h in nbest.hypotheses]
    results = []
    for span_index, span in enumerate(spans):
        candidates = phonetic_retrieve(span.surface, work, config.top_k)
        masked = replace(insert_markers(mask_span(top1, span)),
                         origin=(utt.utt_id, span_index))
        context_vec = context_provider.encode_context(masked)
        semantic = semantic_candidate_scores(candidates, context_vec, memory)
        for cand in candidates:
            cand.p_semantic = semantic[cand.entity_id]
        ranked = fuse_scores(candidates, config.alpha)
        results.append(_decide_span(span, ranked, nbest, weights, alignments,
                                    work, config))
    return _apply_decisions(top1, spans, results), results


def correct_utterance_phonetic_only(
    utt: Utterance,
    catalog: EntityCatalog,
    config: CorrectionConfig,
) -> tuple[str, list[CorrectionResult]]:
    """Standalone phonetic baseline: same detection, same retrieval, same
    rejection gate, no semantic channel, replacement by best phonetic score."""
    config.validate()
    work = catalog.described_only() if config.require_descriptions else catalog
    nbest = utt.nbest.truncated(config.nbest_size)
    top1 = nbest.top1
    if len(work) == 0:
        return top1, []
    spans = _detect(utt, top1, work, config)
    if not spans:
        return top1, []
    weights = beam_weights(nbest, raw=config.raw_beam_weights)
    alignments = [char_align(h.text, top1) for h in nbest.hypotheses]
    results = []
    for span in spans:
        ranked = phonetic_retrieve(span.surface, work, config.top_k)
        results.append(_decide_span(span, ranked, nbest, weights, alignments,
                                    work, config))
    return _apply_decisions(top1, spans, results), results


def _decide_span(span: CorruptedSpan, ranked: list[Candidate], nbest: NBestList,
                 weights: list[float], alignments, catalog: EntityCatalog,
                 config: CorrectionConfig) -> CorrectionResult:
    chosen = ranked[0]
    aligned = align_spans_across_nbest(span, nbest, _alignments=alignments)
    surfaces = [surface for _s, _e, surface in aligned]
    lex = catalog.lexicon
    reject_cand = rejection_score(chosen.surface, surfaces, weights, lex)
    reject_orig = rejection_score(span.surface, surfaces, weights, lex)
    rejected = config.rejection and should_reject(reject_cand, reject_orig)
    if (config.rejection and not rejected and chosen.surface != span.surface
            and reject_orig == 0.0 and catalog.by_surface(span.surface) is not None):
        # exact-match guard: a span that already is a catalog entity, with
        # all n-best phonetically agreeing, is never swapped for a tie
        rejected = True
    return CorrectionResult(
        span=span,
        candidates=ranked,
        chosen_id=chosen.entity_id,
        chosen_surface=chosen.surface,
        rejected=rejected,
        reject_score_candidate=reject_cand,
        reject_score_original=reject_orig,
        corrected_text=span.surface if rejected else chosen.surface,
    )


def correct_corpus(
    utterances: list[Utterance],
    catalog: EntityCatalog,
    memory,
    context_provider,
    config: CorrectionConfig,
    jobs: int = 1,
) -> list[tuple[str, list[CorrectionResult]]]:
    """Batch driver; output order always equals input order."""
    if jobs <= 1:
        return [correct_utterance(u, catalog, memory, context_provider, config)
                for u in utterances]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(
            lambda u: correct_utterance(u, catalog, memory, context_provider, config),
            utterances))
