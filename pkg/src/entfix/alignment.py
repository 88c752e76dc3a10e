"""Character-level Levenshtein alignment with a fixed deterministic tie-break.

One implementation serves BIO labeling, n-best span projection, and the
error-rate metrics, so all three agree on ambiguous alignments. Costs are
match 0 / substitute 1 / delete 1 / insert 1; ties resolve in the order
match > substitute > delete > insert during backtrace.

Op coordinates, with hyp the hypothesis and ref the reference side:
  match/sub: hyp_pos and ref_pos index the aligned characters.
  del:       ref_pos indexes the dropped reference character; hyp_pos is the
             number of hypothesis characters consumed before it.
  ins:       hyp_pos indexes the extra hypothesis character; ref_pos is the
             reference position it precedes (len(ref) at end of string).
"""

from __future__ import annotations

from typing import NamedTuple


class EditOp(NamedTuple):
    kind: str  # "match" | "sub" | "del" | "ins"
    hyp_pos: int
    ref_pos: int


def char_align(hyp: str, ref: str) -> list[EditOp]:
    """Minimal-cost alignment of hyp against ref, ops in forward order."""
    n, m = len(hyp), len(ref)
    width = m + 1
    dp = [0] * ((n + 1) * width)
    for j in range(width):
        dp[j] = j
    for i in range(1, n + 1):
        row = i * width
        prev = row - width
        dp[row] = i
        hc = hyp[i - 1]
        for j in range(1, width):
            best = dp[prev + j - 1] + (0 if hc == ref[j - 1] else 1)
            if dp[row + j - 1] + 1 < best:
                best = dp[row + j - 1] + 1
            if dp[prev + j] + 1 < best:
                best = dp[prev + j] + 1
            dp[row + j] = best
    ops: list[EditOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = dp[i * width + j]
        if i > 0 and j > 0 and hyp[i - 1] == ref[j - 1] and here == dp[(i - 1) * width + j - 1]:
            ops.append(EditOp("match", i - 1, j - 1))
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and here == dp[(i - 1) * width + j - 1] + 1:
            ops.append(EditOp("sub", i - 1, j - 1))
            i -= 1
            j -= 1
        elif j > 0 and here == dp[i * width + j - 1] + 1:
            ops.append(EditOp("del", i, j - 1))
            j -= 1
        else:
            ops.append(EditOp("ins", i - 1, j))
            i -= 1
    ops.reverse()
    return ops


def edit_counts(ops: list[EditOp]) -> tuple[int, int, int]:
    """(substitutions, deletions, insertions) in an op list."""
    subs = sum(op.kind == "sub" for op in ops)
    dels = sum(op.kind == "del" for op in ops)
    ins = sum(op.kind == "ins" for op in ops)
    return subs, dels, ins


def project_span(ops: list[EditOp], start: int, end: int) -> tuple[int, int]:
    """Project a reference-side span [start, end) onto the hypothesis side.

    Returns the envelope of hypothesis characters aligned (match or sub)
    into the span; hypothesis insertions inside the envelope are covered by
    construction. If nothing aligns into the span, returns the zero-length
    hypothesis position where the span region sits.
    """
    lo = hi = None
    fallback = 0
    for op in ops:
        if op.kind == "ins":
            continue
        if op.ref_pos < start:
            # hyp position just after the last char before the span
            fallback = op.hyp_pos + (1 if op.kind in ("match", "sub") else 0)
            continue
        if op.ref_pos >= end:
            break
        if op.kind in ("match", "sub"):
            if lo is None:
                lo = op.hyp_pos
            hi = op.hyp_pos
    if lo is None:
        return fallback, fallback
    return lo, hi + 1
