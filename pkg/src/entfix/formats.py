"""File formats: the n-best JSONL exchanged with ASR front-ends and trainer
tooling, corrected-output JSONL, context-vector JSONL, and report CSVs.

Validation errors always name the offending record or line.
"""

from __future__ import annotations

import json
import math
from typing import IO

import numpy as np

from entfix.corrector import CorrectionResult, Hypothesis, NBestList, Utterance


class ValidationError(ValueError):
    pass


def _check_span_list(raw, text: str, utt_id: str, what: str) -> tuple[tuple[int, int], ...]:
    if not isinstance(raw, list):
        raise ValidationError(f"{utt_id}: {what} must be a list of [start, end] pairs")
    spans = []
    for item in raw:
        if (not isinstance(item, list) or len(item) != 2
                or not all(isinstance(v, int) for v in item)):
            raise ValidationError(f"{utt_id}: bad {what} entry {item!r}")
        start, end = item
        if not (0 <= start < end <= len(text)):
            raise ValidationError(
                f"{utt_id}: {what} [{start}, {end}) out of range for length {len(text)}")
        spans.append((start, end))
    spans.sort()
    for (s1, e1), (s2, _e2) in zip(spans, spans[1:]):
        if s2 < e1:
            raise ValidationError(f"{utt_id}: overlapping {what} at [{s2}, ...)")
    return tuple(spans)


def parse_nbest_record(line: str, line_no: int) -> Utterance:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"line {line_no}: invalid JSON ({exc})") from exc
    utt_id = obj.get("utt_id")
    if not isinstance(utt_id, str) or not utt_id:
        raise ValidationError(f"line {line_no}: missing utt_id")
    raw_nbest = obj.get("nbest")
    if not isinstance(raw_nbest, list) or not raw_nbest:
        raise ValidationError(f"{utt_id}: nbest must be a non-empty list")
    hyps = []
    for item in raw_nbest:
        text = item.get("text") if isinstance(item, dict) else None
        score = item.get("score") if isinstance(item, dict) else None
        if not isinstance(text, str) or not isinstance(score, (int, float)) \
                or not math.isfinite(score):
            raise ValidationError(f"{utt_id}: bad nbest entry {item!r}")
        hyps.append(Hypothesis(text, float(score)))
    nbest = NBestList(tuple(hyps))
    ref = obj.get("ref")
    if ref is not None and not isinstance(ref, str):
        raise ValidationError(f"{utt_id}: ref must be a string")
    ne_spans = ()
    if obj.get("ne_spans") is not None:
        if ref is None:
            raise ValidationError(f"{utt_id}: ne_spans given without ref")
        ne_spans = _check_span_list(obj["ne_spans"], ref, utt_id, "ne_spans")
    ced_spans = None
    if obj.get("ced_spans") is not None:
        ced_spans = _check_span_list(obj["ced_spans"], nbest.top1, utt_id, "ced_spans")
    return Utterance(utt_id, nbest, ref, ne_spans, ced_spans)


def read_nbest_jsonl(path: str, require_ref: bool = False) -> list[Utterance]:
    """Load and validate the n-best JSONL; rejects invalid UTF-8, malformed
    records, and out-of-range or overlapping spans."""
    utterances = []
    try:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                utterances.append(parse_nbest_record(line, line_no))
    except UnicodeDecodeError as exc:
        raise ValidationError(f"{path}: invalid UTF-8 ({exc})") from exc
    if require_ref:
        for utt in utterances:
            if utt.ref is None:
                raise ValidationError(f"{utt.utt_id}: reference text required")
    seen = set()
    for utt in utterances:
        if utt.utt_id in seen:
            raise ValidationError(f"{utt.utt_id}: duplicate utterance id")
        seen.add(utt.utt_id)
    return utterances


def corrected_record(utt: Utterance, corrected: str,
                     results: list[CorrectionResult], detail: bool = False) -> dict:
    spans = []
    for res in results:
        entry = {
            "start": res.span.start,
            "end": res.span.end,
            "surface": res.span.surface,
            "replacement": None if res.rejected else res.chosen_surface,
            "rejected": res.rejected,
        }
        if detail:
            entry["reject_score_candidate"] = res.reject_score_candidate
            entry["reject_score_original"] = res.reject_score_original
            entry["candidates"] = [
                {"id": c.entity_id, "surface": c.surface,
                 "p_phonetic": c.p_phonetic, "p_semantic": c.p_semantic,
                 "fused": c.fused}
                for c in res.candidates
            ]
        spans.append(entry)
    return {"utt_id": utt.utt_id, "corrected": corrected, "spans": spans}


def write_jsonl(records: list[dict], fh: IO[str]) -> None:
    for record in records:
        fh.write(json.dumps(record, ensure_ascii=False))
        fh.write("\n")


def read_context_vectors(path: str, dim: int,
                         normalize: bool = False) -> dict[tuple[str, int], np.ndarray]:
    """Context-vector JSONL from the trainer: one vector per (utt_id,
    span_index); dimensions must match the entity memory."""
    vectors: dict[tuple[str, int], np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"line {line_no}: invalid JSON ({exc})") from exc
            utt_id = obj.get("utt_id")
            span_index = obj.get("span_index")
            values = obj.get("vector")
            if not isinstance(utt_id, str) or not isinstance(span_index, int) \
                    or not isinstance(values, list):
                raise ValidationError(f"line {line_no}: bad context-vector record")
            vec = np.asarray(values, dtype=np.float64)
            if vec.shape != (dim,):
                raise ValidationError(
                    f"{utt_id}[{span_index}]: vector dim {vec.shape[0]} != memory dim {dim}")
            if not np.isfinite(vec).all():
                raise ValidationError(f"{utt_id}[{span_index}]: non-finite vector")
            if normalize:
                norm = np.linalg.norm(vec)
                if norm > 0:
                    vec = vec / norm
            vectors[(utt_id, span_index)] = vec
    return vectors


def write_metrics_csv(report, fh: IO[str]) -> None:
    fh.write("metric,value\n")
    for name in ("cer", "nne_cer", "ne_cer", "ne_recall"):
        fh.write(f"{name},{getattr(report, name)!r}\n")
    for name in ("substitutions", "deletions", "insertions",
                 "edits_inside", "edits_outside", "ref_chars",
                 "inside_chars", "outside_chars", "ne_total", "ne_recalled"):
        fh.write(f"{name},{getattr(report, name)}\n")
