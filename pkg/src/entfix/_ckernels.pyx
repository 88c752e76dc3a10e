# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled edit-distance kernels.

These are the hot loops of the whole package: candidate retrieval scores a
query span against every catalog entity, and homophone mining compares
entities pairwise. Tokens are interned into C ints per call, the DP itself
runs without the GIL.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc


cdef int _lev_ids(const int* a, Py_ssize_t n, const int* b, Py_ssize_t m,
                  int* prev, int* cur) noexcept nogil:
    # Two-row unit-cost Levenshtein over interned token ids. prev/cur are
    # caller-owned scratch buffers of length m + 1.
    cdef Py_ssize_t i, j
    cdef int best
    cdef int* tmp
    if n == 0:
        return <int> m
    if m == 0:
        return <int> n
    for j in range(m + 1):
        prev[j] = <int> j
    for i in range(1, n + 1):
        cur[0] = <int> i
        for j in range(1, m + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1]
            else:
                best = prev[j - 1]
                if prev[j] < best:
                    best = prev[j]
                if cur[j - 1] < best:
                    best = cur[j - 1]
                cur[j] = best + 1
        tmp = prev
        prev = cur
        cur = tmp
    return prev[m]


cdef int* _encode(seq, dict vocab) except? NULL:
    # Intern hashable tokens into a malloc'd int buffer (caller frees).
    cdef Py_ssize_t n = len(seq)
    cdef Py_ssize_t i
    cdef int* out = <int*> PyMem_Malloc(max(n, 1) * sizeof(int))
    if out == NULL:
        raise MemoryError()
    for i in range(n):
        tok = seq[i]
        code = vocab.get(tok)
        if code is None:
            code = len(vocab)
            vocab[tok] = code
        out[i] = <int> code
    return out


def levenshtein(a, b):
    """Unit-cost Levenshtein distance between two token sequences."""
    cdef dict vocab = {}
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t m = len(b)
    cdef int* ea = NULL
    cdef int* eb = NULL
    cdef int* prev = NULL
    cdef int* cur = NULL
    cdef int dist
    try:
        ea = _encode(a, vocab)
        eb = _encode(b, vocab)
        prev = <int*> PyMem_Malloc((m + 1) * sizeof(int))
        cur = <int*> PyMem_Malloc((m + 1) * sizeof(int))
        if prev == NULL or cur == NULL:
            raise MemoryError()
        with nogil:
            dist = _lev_ids(ea, n, eb, m, prev, cur)
        return dist
    finally:
        PyMem_Free(ea)
        PyMem_Free(eb)
        PyMem_Free(prev)
        PyMem_Free(cur)


def levenshtein_batch(query, refs):
    """Distances from one query sequence to each sequence in ``refs``.

    Interns tokens once for the query and incrementally for each ref, so a
    catalog sweep does no per-pair re-encoding of the query.
    """
    cdef dict vocab = {}
    cdef Py_ssize_t n = len(query)
    cdef Py_ssize_t m, scratch_len
    cdef int* eq = NULL
    cdef int* er = NULL
    cdef int* prev = NULL
    cdef int* cur = NULL
    cdef int dist
    cdef list out = []
    scratch_len = n + 1
    for r in refs:
        if len(r) + 1 > scratch_len:
            scratch_len = len(r) + 1
    try:
        eq = _encode(query, vocab)
        prev = <int*> PyMem_Malloc(scratch_len * sizeof(int))
        cur = <int*> PyMem_Malloc(scratch_len * sizeof(int))
        if prev == NULL or cur == NULL:
            raise MemoryError()
        for r in refs:
            m = len(r)
            er = _encode(r, vocab)
            with nogil:
                dist = _lev_ids(eq, n, er, m, prev, cur)
            PyMem_Free(er)
            er = NULL
            out.append(dist)
        return out
    finally:
        PyMem_Free(eq)
        PyMem_Free(er)
        PyMem_Free(prev)
        PyMem_Free(cur)
