"""Metrics and analysis harnesses.

All four metrics are computed on one shared minimal alignment with the
fixed tie-break, so the integer edit counts decompose exactly: entity edits
plus non-entity edits equal the total, attributed positionally on the
reference side.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from entfix.alignment import EditOp, char_align
from entfix.corrector import (
    CorrectionConfig,
    Utterance,
    correct_corpus,
    correct_utterance_phonetic_only,
)
from entfix.semantic import ReferenceEncoder
from entfix.store import EntityCatalog, attach_description, homophone_pairs, ingest_entities


@dataclass(frozen=True)
class ScoredUtterance:
    """Reference with gold NE spans plus one hypothesis to score."""

    utt_id: str
    ref: str
    ne_spans: tuple[tuple[int, int], ...]
    hyp: str


@dataclass
class MetricReport:
    cer: float
    nne_cer: float
    ne_cer: float
    ne_recall: float
    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0
    edits_inside: int = 0
    edits_outside: int = 0
    ref_chars: int = 0
    inside_chars: int = 0
    outside_chars: int = 0
    ne_total: int = 0
    ne_recalled: int = 0


def cer(hyp: str, ref: str) -> float:
    """(S + D + I) / reference length."""
    ops = char_align(hyp, ref)
    edits = sum(op.kind != "match" for op in ops)
    return _rate(edits, len(ref))


def _rate(edits: int, denom: int) -> float:
    if denom == 0:
        return 0.0 if edits == 0 else float("inf")
    return edits / denom


def _inside_positions(ne_spans) -> set[int]:
    inside: set[int] = set()
    for start, end in ne_spans:
        inside.update(range(start, end))
    return inside


def _attribute(ops: list[EditOp], ref_len: int, inside: set[int]) -> tuple[int, int]:
    """Split edits into (inside, outside) by reference-side position.

    Substitutions and deletions go to their reference character's scope;
    insertions go to the scope of the reference position they precede,
    end-of-string counting as outside."""
    edits_in = edits_out = 0
    for op in ops:
        if op.kind == "match":
            continue
        if op.kind == "ins":
            scope_in = op.ref_pos < ref_len and op.ref_pos in inside
        else:
            scope_in = op.ref_pos in inside
        if scope_in:
            edits_in += 1
        else:
            edits_out += 1
    return edits_in, edits_out


def span_scoped_cer(hyp: str, ref: str, ne_spans, scope: str) -> float:
    """CER restricted to entity ("inside") or non-entity ("outside")
    reference characters."""
    if scope not in ("inside", "outside"):
        raise ValueError(f"scope must be inside or outside, got {scope!r}")
    inside = _inside_positions(ne_spans)
    edits_in, edits_out = _attribute(char_align(hyp, ref), len(ref), inside)
    if scope == "inside":
        return _rate(edits_in, len(inside))
    return _rate(edits_out, len(ref) - len(inside))


def _span_recalled(ops: list[EditOp], start: int, end: int) -> bool:
    # recalled iff the aligned region reproduces the span exactly: no
    # substitution or deletion on its characters, no insertion strictly inside
    for op in ops:
        if op.kind in ("sub", "del") and start <= op.ref_pos < end:
            return False
        if op.kind == "ins" and start < op.ref_pos < end:
            return False
    return True


def ne_recall(hyp: str, ref: str, ne_spans) -> float:
    """Fraction of gold NE occurrences reproduced exactly in the aligned
    hypothesis region; 1.0 when there are no entities to recall."""
    if not ne_spans:
        return 1.0
    ops = char_align(hyp, ref)
    recalled = sum(_span_recalled(ops, s, e) for s, e in ne_spans)
    return recalled / len(ne_spans)


def score_utterance(scored: ScoredUtterance) -> MetricReport:
    """All four metrics from one shared alignment."""
    ops = char_align(scored.hyp, scored.ref)
    subs = sum(op.kind == "sub" for op in ops)
    dels = sum(op.kind == "del" for op in ops)
    ins = sum(op.kind == "ins" for op in ops)
    inside = _inside_positions(scored.ne_spans)
    edits_in, edits_out = _attribute(ops, len(scored.ref), inside)
    recalled = sum(_span_recalled(ops, s, e) for s, e in scored.ne_spans)
    total = len(scored.ne_spans)
    n_in, n_out = len(inside), len(scored.ref) - len(inside)
    return MetricReport(
        cer=_rate(edits_in + edits_out, len(scored.ref)),
        nne_cer=_rate(edits_out, n_out),
        ne_cer=_rate(edits_in, n_in),
        ne_recall=recalled / total if total else 1.0,
        substitutions=subs, deletions=dels, insertions=ins,
        edits_inside=edits_in, edits_outside=edits_out,
        ref_chars=len(scored.ref), inside_chars=n_in, outside_chars=n_out,
        ne_total=total, ne_recalled=recalled,
    )


def score_corpus(scored: list[ScoredUtterance]) -> MetricReport:
    """Micro-averaged corpus metrics: pooled edit and character counts."""
    reports = [score_utterance(s) for s in scored]
    agg = MetricReport(0.0, 0.0, 0.0, 0.0)
    for rep in reports:
        agg.substitutions += rep.substitutions
        agg.deletions += rep.deletions
        agg.insertions += rep.insertions
        agg.edits_inside += rep.edits_inside
        agg.edits_outside += rep.edits_outside
        agg.ref_chars += rep.ref_chars
        agg.inside_chars += rep.inside_chars
        agg.outside_chars += rep.outside_chars
        agg.ne_total += rep.ne_total
        agg.ne_recalled += rep.ne_recalled
    agg.cer = _rate(agg.edits_inside + agg.edits_outside, agg.ref_chars)
    agg.nne_cer = _rate(agg.edits_outside, agg.outside_chars)
    agg.ne_cer = _rate(agg.edits_inside, agg.inside_chars)
    agg.ne_recall = agg.ne_recalled / agg.ne_total if agg.ne_total else 1.0
    return agg


def build_homophone_set(corpus: list[ScoredUtterance],
                        catalog: EntityCatalog) -> list[ScoredUtterance]:
    """Utterances whose gold NE spans contain any phonetically confusable
    entity (one that shares its full syllable sequence with another).
    Output order is fixed by utterance id, independent of corpus order."""
    confusable_ids = {i for pair in homophone_pairs(catalog) for i in pair}
    confusable_surfaces = {catalog.by_id(i).surface for i in confusable_ids}
    selected = [
        utt for utt in corpus
        if any(utt.ref[s:e] in confusable_surfaces for s, e in utt.ne_spans)
    ]
    return sorted(selected, key=lambda u: u.utt_id)


def fewshot_report(
    corpus: list[ScoredUtterance],
    occurrence_counts: dict[int, int],
    catalog: EntityCatalog,
    thresholds: tuple[int, ...] = (0, 5, 100),
) -> dict[int, tuple[int, int, float]]:
    """Cumulative few-shot buckets: threshold t covers every gold NE
    occurrence whose entity was seen at most t times in training.

    ``occurrence_counts`` maps entity id to training count (the shape
    store.occurrence_counts emits); span surfaces outside the catalog or
    the map count as unseen. Returns threshold -> (recalled, total, recall)."""
    out = {}
    for threshold in thresholds:
        recalled = total = 0
        for utt in corpus:
            ops = None
            for start, end in utt.ne_spans:
                entity = catalog.by_surface(utt.ref[start:end])
                count = occurrence_counts.get(entity.id, 0) if entity else 0
                if count > threshold:
                    continue
                if ops is None:
                    ops = char_align(utt.hyp, utt.ref)
                total += 1
                recalled += _span_recalled(ops, start, end)
        out[threshold] = (recalled, total, recalled / total if total else 1.0)
    return out


@dataclass
class PipelineSpec:
    """One correction method to evaluate in a harness run."""

    name: str
    config: CorrectionConfig
    phonetic_only: bool = False
    embed_dim: int = 256
    seed: int = 0


def _run_pipeline(utterances: list[Utterance], catalog: EntityCatalog,
                  spec: PipelineSpec) -> list[str]:
    if spec.phonetic_only:
        return [correct_utterance_phonetic_only(u, catalog, spec.config)[0]
                for u in utterances]
    encoder = ReferenceEncoder(dim=spec.embed_dim, seed=spec.seed)
    memory = encoder.memory_for(catalog)
    return [text for text, _ in
            correct_corpus(utterances, catalog, memory, encoder, spec.config)]


def corrected_corpus_metrics(utterances: list[Utterance], catalog: EntityCatalog,
                             spec: PipelineSpec) -> MetricReport:
    """Correct every utterance and score the corrected top-1 texts."""
    corrected = _run_pipeline(utterances, catalog, spec)
    scored = [
        ScoredUtterance(u.utt_id, u.ref, tuple(u.ne_spans), hyp)
        for u, hyp in zip(utterances, corrected)
    ]
    for utt in utterances:
        if utt.ref is None:
            raise ValueError(f"{utt.utt_id}: evaluation requires a reference")
    return score_corpus(scored)


def scaling_curve(
    utterances: list[Utterance],
    gold_catalog: EntityCatalog,
    padding_pool: list[tuple[str, str]],
    sizes: list[int],
    specs: list[PipelineSpec],
    seed: int = 0,
) -> list[tuple[int, str, float]]:
    """NE-Recall per catalog size and method.

    Each size keeps every gold entity and pads with entities sampled
    deterministically from the pool; the combined list is shuffled with the
    seed so padding competes with gold entities in id order."""
    rows = []
    gold_surfaces = [(e.surface, gold_catalog.description(e.id)) for e in gold_catalog]
    pool = [(s, d) for s, d in padding_pool if gold_catalog.by_surface(s) is None]
    for size in sizes:
        rng = random.Random(seed)
        need = max(0, size - len(gold_surfaces))
        if need > len(pool):
            raise ValueError(f"padding pool too small for size {size}")
        padding = rng.sample(pool, need)
        combined = gold_surfaces + padding
        rng.shuffle(combined)
        catalog = ingest_entities([s for s, _ in combined], gold_catalog.lexicon)
        for surface, desc in combined:
            if desc is not None:
                attach_description(catalog, surface, desc)
        for spec in specs:
            report = corrected_corpus_metrics(utterances, catalog, spec)
            rows.append((size, spec.name, report.ne_recall))
    return rows


def sweep(
    utterances: list[Utterance],
    catalog: EntityCatalog,
    alphas: list[float],
    ks: list[int],
    base_config: CorrectionConfig,
    embed_dim: int = 256,
    seed: int = 0,
) -> list[tuple[float, int, float]]:
    """Cross-product evaluation over alpha and top-k; rows of (alpha, k, cer)."""
    rows = []
    for alpha in alphas:
        for k in ks:
            config = CorrectionConfig(
                alpha=alpha, top_k=k, nbest_size=base_config.nbest_size,
                detector=base_config.detector, rejection=base_config.rejection,
                raw_beam_weights=base_config.raw_beam_weights,
                require_descriptions=base_config.require_descriptions,
                min_sim=base_config.min_sim, window_slack=base_config.window_slack)
            spec = PipelineSpec("sweep", config, embed_dim=embed_dim, seed=seed)
            report = corrected_corpus_metrics(utterances, catalog, spec)
            rows.append((alpha, k, report.cer))
    return rows
