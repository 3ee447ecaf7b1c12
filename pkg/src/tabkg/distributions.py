"""Candidate distributions: normalization, thresholding, signal fusion.

A distribution is a plain dict mapping candidate ids to probabilities in
[0, 1] that sum to 1 when the dict is nonempty. Every probability map the
engine emits goes through :func:`normalize`, which is also the hook point
for instrumentation (see :func:`observe_normalizations`).
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from typing import Callable, Iterator, Mapping, Sequence

from .errors import ConfigError

Distribution = dict[str, float]

_observer: Callable[[Distribution], None] | None = None


@contextmanager
def observe_normalizations(callback: Callable[[Distribution], None]) -> Iterator[None]:
    """Invoke `callback` with every nonempty distribution normalize() emits."""
    global _observer
    previous = _observer
    _observer = callback
    try:
        yield
    finally:
        _observer = previous


def normalize(raw: Mapping[str, float]) -> Distribution:
    """Scale positive raw scores into probabilities summing to 1.

    Non-positive entries are dropped; an all-empty input yields an empty
    distribution. Uses math.fsum so the total does not depend on key order.
    """
    positive = {key: value for key, value in raw.items() if value > 0.0}
    if not positive:
        return {}
    total = math.fsum(positive.values())
    dist = {key: value / total for key, value in positive.items()}
    if _observer is not None:
        _observer(dist)
    return dist


def threshold(dist: Mapping[str, float], beta: float) -> Distribution:
    """Drop candidates whose probability falls below `beta`.

    A candidate sitting exactly at `beta` survives.
    """
    return {key: value for key, value in dist.items() if value >= beta}


def combine(
    signals: Sequence[tuple[Mapping[str, float], float]],
    mode: str = "sum",
) -> Distribution:
    """Fuse weighted signals into one normalized distribution.

    Empty signals are omitted. "sum" takes the weighted sum of each
    candidate's probabilities over the surviving signals; "product" takes
    the literal product of the weighted probabilities, so a candidate
    missing from any surviving signal drops out entirely.
    """
    alive = [(dist, weight) for dist, weight in signals if dist]
    if not alive:
        return {}
    if all(weight == 0.0 for _, weight in alive):
        raise ConfigError("all signal weights are zero")
    raw: dict[str, float] = {}
    if mode == "sum":
        for dist, weight in alive:
            for key, value in dist.items():
                raw[key] = raw.get(key, 0.0) + weight * value
    elif mode == "product":
        shared = set(alive[0][0])
        for dist, _ in alive[1:]:
            shared &= set(dist)
        for key in shared:
            product = 1.0
            for dist, weight in alive:
                product *= weight * dist[key]
            raw[key] = product
    else:
        raise ConfigError(f"unknown aggregation mode: {mode!r}")
    return normalize(raw)


def argmax(dist: Mapping[str, float], tie_break: Callable[[str], tuple] | None = None) -> str | None:
    """Highest-probability candidate; ties resolved by `tie_break` then id."""
    if not dist:
        return None
    if tie_break is None:
        return min(dist, key=lambda key: (-dist[key], key))
    return min(dist, key=lambda key: (-dist[key], *tie_break(key), key))
