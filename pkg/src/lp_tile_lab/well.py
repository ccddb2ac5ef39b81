"""Well-distributed refinements of frequency collections."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from lp_tile_lab.grid import FreqInterval
from lp_tile_lab.grid import IntervalCollection


logger = logging.getLogger(__name__)

#: Half-width of the central piece of the model family on [-1/2, 1/2].
MODEL_CENTRE = 1 / 18


def model_breakpoint(k: int) -> float:
    """The k-th breakpoint ``1/2 - (4/9)(4/5)^k`` of the model family on the right.

    Breakpoint 0 is the edge ``1/18`` of the central piece; piece k spans
    breakpoints k and k + 1.
    """
    return 0.5 - (4 / 9) * (4 / 5) ** k


def model_family(pieces: int) -> list[tuple[float, float]]:
    """The first ``pieces`` right-hand pieces of the model family, their mirrors and the centre.

    >>> len(model_family(3))
    7
    """
    right = [(model_breakpoint(k), model_breakpoint(k + 1)) for k in range(pieces)]
    left = [(-b, -a) for a, b in reversed(right)]
    return [*left, (-MODEL_CENTRE, MODEL_CENTRE), *right]


def _round(x: float) -> int:
    return math.floor(x + 0.5)


def _doubles_inside(piece: FreqInterval, omega: FreqInterval) -> bool:
    """True when the concentric double of ``piece`` lies in ``omega``."""
    return 3 * piece.lo - piece.hi >= 2 * omega.lo and 3 * piece.hi - piece.lo <= 2 * omega.hi


@dataclass(frozen=True)
class Refinement:
    """Output of :func:`refine` with the pieces that break the doubling property."""

    collection: IntervalCollection
    lumped: frozenset[FreqInterval]
    passthrough: tuple[FreqInterval, ...]

    def __iter__(self) -> Iterator[FreqInterval]:
        return iter(self.collection)


def refine_interval(omega: FreqInterval) -> tuple[list[FreqInterval], list[FreqInterval]] | None:
    """Transport the model family to ``omega``.

    Returns the pieces and the lumped tails, or None when ``omega`` is too
    narrow for the central piece to span an integer frequency.
    """

    def at(t: float) -> int:
        return _round(omega.lo + (t + 0.5) * omega.width)

    lo, hi = at(-MODEL_CENTRE), at(MODEL_CENTRE)
    if hi - lo < 1:
        return None
    centre = FreqInterval(lo, hi)
    if not _doubles_inside(centre, omega):
        return None
    pieces = [centre]
    lumped = []

    edge = hi
    for k in range(1, 10_000):
        nxt = at(model_breakpoint(k))
        if nxt - edge < 1 or nxt >= omega.hi or not _doubles_inside(FreqInterval(edge, nxt), omega):
            break
        pieces.append(FreqInterval(edge, nxt))
        edge = nxt
    lumped.append(FreqInterval(edge, omega.hi))

    edge = lo
    for k in range(1, 10_000):
        nxt = at(-model_breakpoint(k))
        if edge - nxt < 1 or nxt <= omega.lo or not _doubles_inside(FreqInterval(nxt, edge), omega):
            break
        pieces.append(FreqInterval(nxt, edge))
        edge = nxt
    lumped.append(FreqInterval(omega.lo, edge))

    return sorted(pieces + lumped), lumped


def refine(omegas: IntervalCollection) -> Refinement:
    """Replace each arc by its well-distributed decomposition.

    Arcs too narrow to carry the decomposition pass through unchanged and are
    reported in ``passthrough``.
    """
    out: list[FreqInterval] = []
    lumped: set[FreqInterval] = set()
    passthrough = []
    for omega in omegas:
        result = refine_interval(omega)
        if result is None:
            logger.warning("%s is too narrow to refine; passing through", omega)
            passthrough.append(omega)
            out.append(omega)
            continue
        pieces, tails = result
        out.extend(pieces)
        lumped.update(tails)
    logger.info(
        "refined %d arcs into %d (%d lumped tails)", len(omegas), len(out), len(lumped)
    )
    return Refinement(IntervalCollection(tuple(out)), frozenset(lumped), tuple(passthrough))


def overlap_bound(omegas: IntervalCollection, n: int) -> int:
    """``max_k sum_omega 1_{3 omega}(k)`` over the integer frequencies of the grid."""
    counts = np.zeros(n + 1, dtype=np.int64)
    for omega in omegas:
        triple = omega.scaled(3).clipped(n)
        counts[triple.lo + n // 2] += 1
        counts[triple.hi + n // 2] -= 1
    return int(np.cumsum(counts[:n]).max()) if len(omegas) else 0


def is_well_distributed(omegas: IntervalCollection, n: int, bound: int = 100) -> bool:
    """True when :func:`overlap_bound` is at most BOUND."""
    return overlap_bound(omegas, n) <= bound
