"""Pure-Python string kernels.

Fallback for :mod:`tabkg._ckernels`; both expose the same four functions
with identical results, so either backend can serve `tabkg.kernels`.
"""

from __future__ import annotations


def levenshtein(a: str, b: str) -> int:
    """Edit distance (insert/delete/substitute, unit costs)."""
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    if lb > la:
        a, b = b, a
        la, lb = lb, la
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        ca = a[i - 1]
        cur = [i] + [0] * lb
        for j in range(1, lb + 1):
            cost = 0 if ca == b[j - 1] else 1
            d = prev[j] + 1
            ins = cur[j - 1] + 1
            if ins < d:
                d = ins
            sub = prev[j - 1] + cost
            if sub < d:
                d = sub
            cur[j] = d
        prev = cur
    return prev[lb]


def similarity(a: str, b: str) -> float:
    """Normalized Levenshtein similarity: 1 - distance / longer length.

    Two empty strings are identical, hence 1.0.
    """
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _distance_cutoff(longest: int, floor: float) -> int:
    # d <= longest*(1-floor) <=> similarity >= floor; epsilon guards the
    # float representation of the product (e.g. 5*0.4 -> 2.0000000000000004).
    return int(longest * (1.0 - floor) + 1e-9)


def bounded_similarity(a: str, b: str, floor: float) -> float:
    """Similarity if it reaches `floor`, else -1.0.

    Abandons the distance computation as soon as the running row minimum
    proves the result will fall below the cutoff.
    """
    la, lb = len(a), len(b)
    longest = max(la, lb)
    if longest == 0:
        return 1.0
    k = _distance_cutoff(longest, floor)
    if abs(la - lb) > k:
        return -1.0
    if a == b:
        return 1.0
    if lb > la:
        a, b = b, a
        la, lb = lb, la
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        ca = a[i - 1]
        cur = [i] + [0] * lb
        row_min = i
        for j in range(1, lb + 1):
            cost = 0 if ca == b[j - 1] else 1
            d = prev[j] + 1
            ins = cur[j - 1] + 1
            if ins < d:
                d = ins
            sub = prev[j - 1] + cost
            if sub < d:
                d = sub
            cur[j] = d
            if d < row_min:
                row_min = d
        if row_min > k:
            return -1.0
        prev = cur
    dist = prev[lb]
    if dist > k:
        return -1.0
    sim = 1.0 - dist / longest
    # k is a loose integer bound; the exact verdict is sim vs floor
    return sim if sim >= floor else -1.0


def scan_labels(query: str, labels: list[str], floor: float) -> list[tuple[int, float]]:
    """Indexes and similarities of all labels scoring at least `floor`."""
    out = []
    for idx, label in enumerate(labels):
        sim = bounded_similarity(query, label, floor)
        if sim >= 0.0:
            out.append((idx, sim))
    return out
