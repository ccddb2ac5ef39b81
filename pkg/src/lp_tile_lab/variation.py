"""q-variation norms, step multipliers and the martingale decomposition."""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator
from typing import Sequence

import numpy as np
import numpy.typing as npt

from lp_tile_lab.errors import DomainError
from lp_tile_lab.grid import ComplexArray
from lp_tile_lab.grid import FreqInterval
from lp_tile_lab.grid import IntArray
from lp_tile_lab.grid import IntervalCollection
from lp_tile_lab.grid import RealArray
from lp_tile_lab.grid import frequencies


logger = logging.getLogger(__name__)

#: Column subsets enumerated by the exact grid search in two variables.
EXACT_COLUMN_SUBSETS = 4096

#: Largest side for which every tensor partition is enumerated.
BRUTE_SIDE = 5


def _check_q(q: float) -> None:
    if not q > 0:
        raise DomainError(f"q must be positive, got {q}")


def _values(m: npt.ArrayLike) -> npt.NDArray[np.complex128]:
    a = np.asarray(m, dtype=np.complex128).ravel()
    if a.size == 0:
        raise DomainError("at least one sample is needed")
    return a


def _chain_dp(features: RealArray | ComplexArray, q: float) -> tuple[RealArray, IntArray]:
    """Best ``sum |x_{k+1} - x_k|^q`` over chains ending at each index.

    ``features`` has one row per index; the jump between rows is the sum of
    the coordinatewise powers. Returns the values and the predecessor links.
    """
    count = features.shape[0]
    best = np.zeros(count)
    prev = np.full(count, -1, dtype=np.int64)
    rows = features.reshape(count, -1)
    for j in range(1, count):
        costs = best[:j] + (np.abs(rows[j] - rows[:j]) ** q).sum(axis=1)
        i = int(np.argmax(costs))
        if costs[i] > 0:
            best[j], prev[j] = costs[i], i
    return best, prev


def _chain_path(best: RealArray, prev: IntArray) -> list[int]:
    path = [int(np.argmax(best))]
    while prev[path[-1]] >= 0:
        path.append(int(prev[path[-1]]))
    return path[::-1]


def var_q(m: npt.ArrayLike, q: float) -> float:
    """``sup (sum_k |m(xi_{k+1}) - m(xi_k)|^q)^{1/q}`` over increasing index chains.

    >>> var_q([0, 1, 0, 1], 1.0)
    3.0
    """
    _check_q(q)
    best, _ = _chain_dp(_values(m), q)
    return float(best.max() ** (1.0 / q))


def var_q_brute(m: npt.ArrayLike, q: float) -> float:
    """``var_q`` by enumerating every index subsequence; at most 16 samples."""
    _check_q(q)
    values = _values(m)
    if values.size > 16:
        raise DomainError(f"brute force needs at most 16 samples, got {values.size}")
    best = 0.0
    for chain in _subsets(values.size):
        jumps = np.abs(np.diff(values[list(chain)]))
        best = max(best, float((jumps**q).sum()))
    return best ** (1.0 / q)


def vq_norm(m: npt.ArrayLike, q: float) -> float:
    """``||m||_inf + Var_q(m)``."""
    return float(np.abs(_values(m)).max()) + var_q(m, q)


@dataclass(frozen=True, eq=False)
class VariationProfile:
    """``mu(x_i) = Var_q(m on [x_0, x_i])^q`` at every sample index."""

    points: IntArray
    mu: RealArray

    @property
    def total(self) -> float:
        """``Var_q(m)^q`` over the whole domain."""
        return float(self.mu[-1])


def variation_profile(m: npt.ArrayLike, q: float) -> VariationProfile:
    """Running ``Var_q^q`` of M, nondecreasing in the sample index."""
    _check_q(q)
    values = _values(m)
    best, _ = _chain_dp(values, q)
    return VariationProfile(np.arange(values.size), np.maximum.accumulate(best))


@dataclass(frozen=True, eq=False)
class StepMultiplier:
    """A function of frequency constant on the cells ``[b_i, b_{i+1})`` of ``domain``.

    ``breakpoints[0]`` is ``domain.lo``; the last cell ends at ``domain.hi``.
    """

    domain: FreqInterval
    breakpoints: tuple[int, ...]
    values: ComplexArray

    def __post_init__(self) -> None:
        points = tuple(int(b) for b in self.breakpoints)
        values = np.array(self.values, dtype=np.complex128, copy=True).ravel()
        if not points or points[0] != self.domain.lo:
            raise DomainError(f"breakpoints must start at {self.domain.lo}")
        if any(a >= b for a, b in zip(points, points[1:])) or points[-1] >= self.domain.hi:
            raise DomainError(f"breakpoints {points} are not increasing inside {self.domain}")
        if values.shape != (len(points),):
            raise DomainError(f"{len(points)} cells need as many values, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise DomainError("multiplier values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "breakpoints", points)
        object.__setattr__(self, "values", values)

    @property
    def cells(self) -> tuple[FreqInterval, ...]:
        """The constancy cells ``[b_i, b_{i+1})``."""
        ends = self.breakpoints[1:] + (self.domain.hi,)
        return tuple(FreqInterval(a, b) for a, b in zip(self.breakpoints, ends))

    def __len__(self) -> int:
        return len(self.breakpoints)

    def sample(self, n: int) -> ComplexArray:
        """Values at the frequencies of the grid, zero outside the domain."""
        self.domain.check(n)
        k = frequencies(n)
        out = np.zeros(n, dtype=np.complex128)
        inside = (k >= self.domain.lo) & (k < self.domain.hi)
        cell = np.searchsorted(self.breakpoints, k[inside], side="right") - 1
        out[inside] = self.values[cell]
        return out

    def refine(self, points: Sequence[int]) -> StepMultiplier:
        """The same function on a partition with extra breakpoints."""
        extra = {int(b) for b in points if self.domain.lo < b < self.domain.hi}
        merged = sorted(set(self.breakpoints) | extra)
        cell = np.searchsorted(self.breakpoints, merged, side="right") - 1
        return StepMultiplier(self.domain, tuple(merged), self.values[cell])

    @classmethod
    def from_blocks(
        cls, blocks: IntervalCollection, values: npt.ArrayLike
    ) -> StepMultiplier:
        """A step function on consecutive arcs, which must leave no gaps."""
        ordered = sorted(zip(blocks, np.asarray(values, dtype=np.complex128).ravel()))
        if len(ordered) != len(blocks):
            raise DomainError("one value per block is needed")
        for (a, _), (b, _) in zip(ordered, ordered[1:]):
            if a.hi != b.lo:
                raise DomainError(f"blocks {a} and {b} leave a gap")
        domain = FreqInterval(ordered[0][0].lo, ordered[-1][0].hi)
        return cls(domain, tuple(a.lo for a, _ in ordered), np.array([v for _, v in ordered]))

    @classmethod
    def constant(cls, domain: FreqInterval, value: complex = 1.0) -> StepMultiplier:
        """The multiplier equal to VALUE on all of DOMAIN."""
        return cls(domain, (domain.lo,), np.array([value]))


def block_step_norm(m: StepMultiplier, q: float) -> float:
    """``(sum_cells |b_j|^q)^{1/q}`` over the cells of the multiplier's own partition."""
    _check_q(q)
    if math.isinf(q):
        return float(np.abs(m.values).max())
    return float((np.abs(m.values) ** q).sum() ** (1.0 / q))


def nested_block_norm(values: npt.ArrayLike, q_outer: float, q_inner: float) -> float:
    """Block norm of the inner block norms along the last axis of a 2D table."""
    _check_q(q_outer)
    _check_q(q_inner)
    table = np.abs(np.asarray(values, dtype=np.complex128))
    if table.ndim != 2:
        raise DomainError(f"a 2D table of block values is needed, got shape {table.shape}")
    inner = (table**q_inner).sum(axis=1) ** (1.0 / q_inner)
    return float((inner**q_outer).sum() ** (1.0 / q_outer))


@dataclass(frozen=True, eq=False)
class MartingaleLevel:
    """Partition ``Pi_j`` (first index of each cell) and the difference ``m_j``."""

    level: int
    starts: IntArray
    piece: ComplexArray

    @property
    def cells(self) -> int:
        """Number of cells at this level."""
        return int(self.starts.size)

    def block_values(self) -> ComplexArray:
        """The constant value of the piece on each cell."""
        return self.piece[self.starts]


@dataclass(frozen=True, eq=False)
class MartingaleDecomposition:
    """``m ~ sum_j m_j`` with partial sums equal to cell averages on nested partitions."""

    q: float
    scale: float
    profile: VariationProfile
    levels: tuple[MartingaleLevel, ...]
    residual: ComplexArray
    constant: float

    def __iter__(self) -> Iterator[MartingaleLevel]:
        return iter(self.levels)

    def partial_sum(self, level: int) -> ComplexArray:
        """``sum_{k <= level} m_k``."""
        out = np.zeros_like(self.residual)
        for piece in self.levels[:level]:
            out = out + piece.piece
        return out


def _labels(mu: RealArray, total: float, level: int) -> IntArray:
    if total == 0:
        return np.zeros(mu.size, dtype=np.int64)
    labels = np.ceil(mu / total * 2**level) - 1
    return np.clip(labels, 0, 2**level - 1).astype(np.int64)


def _cell_means(values: ComplexArray, starts: IntArray) -> ComplexArray:
    counts = np.diff(np.append(starts, values.size))
    return np.repeat(np.add.reduceat(values, starts) / counts, counts)


def martingale_decompose(m: npt.ArrayLike, q: float, j_max: int) -> MartingaleDecomposition:
    """Split ``m`` along the level sets of its variation profile.

    ``Pi_j`` groups the indices whose profile value lies in the same of ``2^j``
    equal cells of ``[0, mu_total]``; ``m_j = E_j m - E_{j-1} m`` with
    ``E_0 m = 0``. The reported constant is ``max_j 2^{j/q} ||m_j||_inf``
    for ``m`` rescaled to ``V_q`` norm one.
    """
    if q < 1:
        raise DomainError(f"the decomposition needs q >= 1, got {q}")
    if j_max < 1:
        raise DomainError(f"j_max must be at least 1, got {j_max}")
    values = _values(m)
    scale = vq_norm(values, q)
    normalized = values / scale if scale > 0 else values
    profile = variation_profile(normalized, q)
    previous = np.zeros_like(values)
    levels = []
    for j in range(1, j_max + 1):
        labels = _labels(profile.mu, profile.total, j)
        starts = np.concatenate([[0], np.flatnonzero(np.diff(labels)) + 1]).astype(np.int64)
        expectation = _cell_means(normalized, starts)
        levels.append(MartingaleLevel(j, starts, (expectation - previous) * scale))
        previous = expectation
    residual = (normalized - previous) * scale
    constant = max(
        2 ** (level.level / q) * float(np.abs(level.piece).max()) for level in levels
    )
    if scale > 0:
        constant /= scale
    logger.debug("martingale decomposition q=%g: constant %.4g", q, constant)
    return MartingaleDecomposition(q, scale, profile, tuple(levels), residual, constant)


def u_q_upper_bound(m: npt.ArrayLike, q: float, j_max: int) -> float:
    """``sum_j <<m_j>>_q + ||residual||_inf`` for the decomposition of ``m``."""
    decomposition = martingale_decompose(m, q, j_max)
    total = sum(
        float((np.abs(level.block_values()) ** q).sum() ** (1.0 / q))
        for level in decomposition
    )
    return total + float(np.abs(decomposition.residual).max())


class Var2Mode(Enum):
    """Search strategy of :func:`var_q_2d`."""

    Grid = "grid"
    Brute = "brute"


def _mixed_sum(m: ComplexArray, rows: Sequence[int], cols: Sequence[int], q: float) -> float:
    block = m[np.ix_(rows, cols)]
    diff = np.diff(np.diff(block, axis=0), axis=1)
    return float((np.abs(diff) ** q).sum())


def _subsets(size: int) -> Iterator[tuple[int, ...]]:
    for count in range(2, size + 1):
        yield from itertools.combinations(range(size), count)


def _best_rows(m: ComplexArray, cols: Sequence[int], q: float) -> tuple[float, list[int]]:
    best, prev = _chain_dp(np.diff(m[:, cols], axis=1), q)
    return float(best.max()), _chain_path(best, prev)


def _best_cols(m: ComplexArray, rows: Sequence[int], q: float) -> tuple[float, list[int]]:
    best, prev = _chain_dp(np.diff(m[rows, :], axis=0).T, q)
    return float(best.max()), _chain_path(best, prev)


def _alternating(m: ComplexArray, q: float, starts: int, seed: int) -> float:
    n2 = m.shape[1]
    rng = np.random.default_rng(seed)
    initial = [list(range(n2)), [0, n2 - 1]]
    for _ in range(starts):
        size = int(rng.integers(2, n2 + 1))
        initial.append(sorted(int(c) for c in rng.choice(n2, size=size, replace=False)))
    best = 0.0
    for cols in initial:
        value = -1.0
        while True:
            row_value, rows = _best_rows(m, cols, q)
            if len(rows) < 2:
                break
            col_value, cols = _best_cols(m, rows, q)
            current = max(row_value, col_value)
            if current <= value * (1 + 1e-12):
                break
            value = current
        best = max(best, value)
    return best


def var_q_2d(
    m: npt.ArrayLike, q: float, mode: Var2Mode | str = Var2Mode.Grid, starts: int = 8, seed: int = 0
) -> float:
    """``sup (sum_R |Diff_R m|^q)^{1/q}`` over tensor partitions of the sample grid.

    ``Diff_R`` is the mixed difference over the corners of ``R``. The ``grid``
    mode is exact while the column subsets can be enumerated and otherwise
    alternates row and column searches from several starts. ``brute``
    enumerates every pair of row and column subsets and needs at most 5x5.
    """
    _check_q(q)
    table = np.asarray(m, dtype=np.complex128)
    if table.ndim != 2:
        raise DomainError(f"a 2D table is needed, got shape {table.shape}")
    n1, n2 = table.shape
    if n1 < 2 or n2 < 2:
        return 0.0
    mode = Var2Mode(mode)
    if mode is Var2Mode.Brute:
        if max(n1, n2) > BRUTE_SIDE:
            raise DomainError(f"brute force needs at most {BRUTE_SIDE}x{BRUTE_SIDE}, got {n1}x{n2}")
        total = max(
            _mixed_sum(table, rows, cols, q)
            for rows in _subsets(n1)
            for cols in _subsets(n2)
        )
    elif 2**n2 <= EXACT_COLUMN_SUBSETS:
        total = max(_best_rows(table, list(cols), q)[0] for cols in _subsets(n2))
    else:
        total = _alternating(table, q, starts, seed)
    return float(total ** (1.0 / q))


def vq_norm_2d(m: npt.ArrayLike, q: float) -> float:
    """Sup norm, plus the largest row or column variation, plus the mixed variation."""
    table = np.asarray(m, dtype=np.complex128)
    if table.ndim != 2:
        raise DomainError(f"a 2D table is needed, got shape {table.shape}")
    lines = [var_q(row, q) for row in table] + [var_q(col, q) for col in table.T]
    return float(np.abs(table).max()) + max(lines) + var_q_2d(table, q)
