# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled string kernels: Levenshtein distance and fuzzy label scans.

Mirror of tabkg._kernels_py; results are bit-identical. The label scan is
the hot loop of fuzzy entity lookup, hence the C implementation.
"""

from libc.stdlib cimport free, malloc


cdef inline void _fill(unicode s, Py_UCS4 *buf, Py_ssize_t n):
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = s[i]


cdef Py_ssize_t _lev(Py_UCS4 *a, Py_ssize_t la, Py_UCS4 *b, Py_ssize_t lb,
                     Py_ssize_t k, Py_ssize_t *row0, Py_ssize_t *row1) nogil:
    """Distance if <= k, else any value > k. Rows are scratch of size lb+1."""
    cdef Py_ssize_t i, j, cost, d, other, row_min
    cdef Py_ssize_t *prev = row0
    cdef Py_ssize_t *cur = row1
    cdef Py_ssize_t *tmp
    for j in range(lb + 1):
        prev[j] = j
    for i in range(1, la + 1):
        cur[0] = i
        row_min = i
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            d = prev[j] + 1
            other = cur[j - 1] + 1
            if other < d:
                d = other
            other = prev[j - 1] + cost
            if other < d:
                d = other
            cur[j] = d
            if d < row_min:
                row_min = d
        if row_min > k:
            return row_min
        tmp = prev
        prev = cur
        cur = tmp
    return prev[lb]


cdef inline Py_ssize_t _cutoff(Py_ssize_t longest, double floor):
    return <Py_ssize_t>(longest * (1.0 - floor) + 1e-9)


def levenshtein(a: unicode, b: unicode) -> int:
    """Edit distance (insert/delete/substitute, unit costs)."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    if a == b:
        return 0
    if la == 0:
        return lb
    if lb == 0:
        return la
    if lb > la:
        a, b = b, a
        la, lb = lb, la
    cdef Py_UCS4 *abuf = <Py_UCS4 *>malloc(la * sizeof(Py_UCS4))
    cdef Py_UCS4 *bbuf = <Py_UCS4 *>malloc(lb * sizeof(Py_UCS4))
    cdef Py_ssize_t *row0 = <Py_ssize_t *>malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *row1 = <Py_ssize_t *>malloc((lb + 1) * sizeof(Py_ssize_t))
    if abuf == NULL or bbuf == NULL or row0 == NULL or row1 == NULL:
        free(abuf); free(bbuf); free(row0); free(row1)
        raise MemoryError
    _fill(a, abuf, la)
    _fill(b, bbuf, lb)
    cdef Py_ssize_t dist = _lev(abuf, la, bbuf, lb, la + lb, row0, row1)
    free(abuf); free(bbuf); free(row0); free(row1)
    return dist


def similarity(a: unicode, b: unicode) -> float:
    """Normalized Levenshtein similarity: 1 - distance / longer length."""
    cdef Py_ssize_t longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / <double>longest


def bounded_similarity(a: unicode, b: unicode, floor: double) -> float:
    """Similarity if it reaches `floor`, else -1.0."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    cdef Py_ssize_t longest = la if la > lb else lb
    if longest == 0:
        return 1.0
    cdef Py_ssize_t k = _cutoff(longest, floor)
    cdef Py_ssize_t diff = la - lb if la > lb else lb - la
    if diff > k:
        return -1.0
    if a == b:
        return 1.0
    if lb > la:
        a, b = b, a
        la, lb = lb, la
    cdef Py_UCS4 *abuf = <Py_UCS4 *>malloc(la * sizeof(Py_UCS4))
    cdef Py_UCS4 *bbuf = <Py_UCS4 *>malloc(lb * sizeof(Py_UCS4))
    cdef Py_ssize_t *row0 = <Py_ssize_t *>malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *row1 = <Py_ssize_t *>malloc((lb + 1) * sizeof(Py_ssize_t))
    if abuf == NULL or bbuf == NULL or row0 == NULL or row1 == NULL:
        free(abuf); free(bbuf); free(row0); free(row1)
        raise MemoryError
    _fill(a, abuf, la)
    _fill(b, bbuf, lb)
    cdef Py_ssize_t dist = _lev(abuf, la, bbuf, lb, k, row0, row1)
    free(abuf); free(bbuf); free(row0); free(row1)
    if dist > k:
        return -1.0
    # k is a loose integer bound; the exact verdict is sim vs floor
    cdef double sim = 1.0 - dist / <double>longest
    return sim if sim >= floor else -1.0


def scan_labels(query: unicode, labels: list, floor: double) -> list:
    """Indexes and similarities of all labels scoring at least `floor`."""
    out = []
    cdef Py_ssize_t lq = len(query)
    cdef Py_ssize_t maxlab = 0, n
    for label in labels:
        n = len(<unicode>label)
        if n > maxlab:
            maxlab = n
    cdef Py_ssize_t rowlen = (lq if lq > maxlab else maxlab) + 1
    cdef Py_UCS4 *qbuf = <Py_UCS4 *>malloc((lq or 1) * sizeof(Py_UCS4))
    cdef Py_UCS4 *lbuf = <Py_UCS4 *>malloc((maxlab or 1) * sizeof(Py_UCS4))
    cdef Py_ssize_t *row0 = <Py_ssize_t *>malloc(rowlen * sizeof(Py_ssize_t))
    cdef Py_ssize_t *row1 = <Py_ssize_t *>malloc(rowlen * sizeof(Py_ssize_t))
    if qbuf == NULL or lbuf == NULL or row0 == NULL or row1 == NULL:
        free(qbuf); free(lbuf); free(row0); free(row1)
        raise MemoryError
    _fill(query, qbuf, lq)

    cdef Py_ssize_t idx = -1, ll, longest, k, diff, dist
    cdef double sim
    cdef unicode lab
    try:
        for label in labels:
            idx += 1
            lab = <unicode>label
            ll = len(lab)
            longest = lq if lq > ll else ll
            if longest == 0:
                out.append((idx, 1.0))
                continue
            k = _cutoff(longest, floor)
            diff = lq - ll if lq > ll else ll - lq
            if diff > k:
                continue
            if lab == query:
                out.append((idx, 1.0))
                continue
            _fill(lab, lbuf, ll)
            # keep the shorter string on the inner axis
            if ll > lq:
                dist = _lev(lbuf, ll, qbuf, lq, k, row0, row1)
            else:
                dist = _lev(qbuf, lq, lbuf, ll, k, row0, row1)
            if dist <= k:
                sim = 1.0 - dist / <double>longest
                if sim >= floor:
                    out.append((idx, sim))
    finally:
        free(qbuf); free(lbuf); free(row0); free(row1)
    return out
