"""Pure-Python fallback for the edit-distance kernels.

Same call contract as the compiled module; ``entfix.kernels`` picks this one
when the extension is unavailable or ``ENTFIX_PURE_PYTHON`` is set.
"""

from __future__ import annotations


def levenshtein(a, b) -> int:
    """Unit-cost Levenshtein distance between two token sequences."""
    if len(a) < len(b):
        a, b = b, a
    if len(b) == 0:
        return len(a)
    prev = list(range(len(b) + 1))
    cur = [0] * (len(b) + 1)
    for i, ta in enumerate(a, 1):
        cur[0] = i
        for j, tb in enumerate(b, 1):
            if ta == tb:
                cur[j] = prev[j - 1]
            else:
                cur[j] = 1 + min(prev[j - 1], prev[j], cur[j - 1])
        prev, cur = cur, prev
    return prev[len(b)]


def levenshtein_batch(query, refs) -> list[int]:
    """Distances from one query sequence to each sequence in ``refs``."""
    return [levenshtein(query, r) for r in refs]
