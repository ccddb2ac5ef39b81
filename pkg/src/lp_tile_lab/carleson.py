"""Dyadic BMO, Carleson sequences and John-Nirenberg checks."""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any
from typing import Iterator
from typing import Mapping
from typing import Sequence

import numpy as np
import numpy.typing as npt
import scipy.optimize

from lp_tile_lab.errors import DomainError
from lp_tile_lab.errors import NumericalFailure
from lp_tile_lab.grid import BoolArray
from lp_tile_lab.grid import DyadicInterval
from lp_tile_lab.grid import RealArray
from lp_tile_lab.grid import TorusSignal
from lp_tile_lab.grid import array_lp_norm
from lp_tile_lab.grid import max_level
from lp_tile_lab.projections import strong_maximal_array


logger = logging.getLogger(__name__)

#: Largest grid (in finest cells) for which every union of cells is enumerated.
ENUMERATION_CELLS = 16

#: Largest grid (in finest cells) for which the exact product norm is computed.
EXACT_CELLS = 64

DyadicRectangle = tuple[DyadicInterval, DyadicInterval]


def _checked_level(values: npt.ArrayLike, size: int, name: str) -> RealArray:
    a = np.array(values, dtype=np.float64, copy=True)
    if a.shape != (size,):
        raise DomainError(f"{name} must have shape {size}, got {a.shape}")
    if not np.all(np.isfinite(a)) or np.any(a < 0):
        raise DomainError(f"{name} must be finite and nonnegative")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CarlesonSeq:
    """Nonnegative weights ``alpha(I)`` on dyadic intervals down to a fixed depth.

    ``levels[k][j]`` is the weight of ``DyadicInterval(k, j)``.
    """

    levels: tuple[RealArray, ...]

    def __post_init__(self) -> None:
        if not self.levels:
            raise DomainError("a Carleson sequence needs at least the unit interval")
        levels = tuple(
            _checked_level(values, 2**k, f"level {k}") for k, values in enumerate(self.levels)
        )
        object.__setattr__(self, "levels", levels)

    @property
    def depth(self) -> int:
        """Finest level carried."""
        return len(self.levels) - 1

    @classmethod
    def zeros(cls, depth: int) -> CarlesonSeq:
        """The zero sequence down to DEPTH."""
        return cls(tuple(np.zeros(2**k) for k in range(depth + 1)))

    @classmethod
    def from_mapping(
        cls, entries: Mapping[DyadicInterval, float], depth: int | None = None
    ) -> CarlesonSeq:
        """Collect ENTRIES by interval; repeated intervals add up.

        Raises:
            DomainError: DEPTH is coarser than some entry.
        """
        deepest = max((i.level for i in entries), default=0)
        if depth is None:
            depth = deepest
        elif depth < deepest:
            raise DomainError(f"depth {depth} is coarser than the entries ({deepest})")
        levels = [np.zeros(2**k) for k in range(depth + 1)]
        for interval, value in entries.items():
            levels[interval.level][interval.offset] += value
        return cls(tuple(levels))

    def entries(self) -> Iterator[tuple[DyadicInterval, float]]:
        """The nonzero weights, coarse to fine."""
        for k, values in enumerate(self.levels):
            for j in np.flatnonzero(values):
                yield DyadicInterval(k, int(j)), float(values[j])

    def padded(self, depth: int) -> CarlesonSeq:
        """The same weights with zero levels appended down to DEPTH."""
        if depth < self.depth:
            raise DomainError(f"cannot pad depth {self.depth} to {depth}")
        extra = tuple(np.zeros(2**k) for k in range(self.depth + 1, depth + 1))
        return CarlesonSeq(self.levels + extra)

    def __add__(self, other: CarlesonSeq) -> CarlesonSeq:
        depth = max(self.depth, other.depth)
        a, b = self.padded(depth), other.padded(depth)
        return CarlesonSeq(tuple(x + y for x, y in zip(a.levels, b.levels)))

    def restricted(self, interval: DyadicInterval) -> CarlesonSeq:
        """Keep only the weights of intervals inside ``interval``."""
        levels = []
        for k, values in enumerate(self.levels):
            kept = np.zeros_like(values)
            if k >= interval.level:
                inside = (np.arange(2**k) >> (k - interval.level)) == interval.offset
                kept[inside] = values[inside]
            levels.append(kept)
        return CarlesonSeq(tuple(levels))

    def subtree_sums(self) -> list[RealArray]:
        """``sum_{I in J} alpha(I)`` for every ``J``, level by level, in one bottom-up pass."""
        sums = [self.levels[-1].copy()]
        for values in reversed(self.levels[:-1]):
            sums.append(values + sums[-1].reshape(-1, 2).sum(axis=1))
        return sums[::-1]

    def density(self, interval: DyadicInterval | None = None) -> RealArray:
        """``sum_{I in J} alpha(I)/|I| 1_I`` on the ``2^depth`` finest cells."""
        depth = self.depth if interval is None else max(self.depth, interval.level)
        source = self if interval is None else self.restricted(interval)
        out = np.zeros(2**depth)
        for k, values in enumerate(source.levels):
            out += np.repeat(values * 2.0**k, 2 ** (depth - k))
        return out


def cm_norm(alpha: CarlesonSeq) -> float:
    """``sup_J |J|^-1 sum_{I in J} alpha(I)`` over dyadic ``J``."""
    return max(float(s.max()) * 2.0**k for k, s in enumerate(alpha.subtree_sums()))


def _levels_of(g: TorusSignal) -> Iterator[tuple[int, npt.NDArray[Any]]]:
    """The samples of ``g`` reshaped to one row per dyadic interval at each level."""
    for k in range(max_level(g.n) + 1):
        yield k, g.samples.reshape(2**k, -1)


def dyadic_bmo(g: TorusSignal) -> float:
    """``sup_I (1/|I|) int_I |g - g_I|`` over the dyadic intervals of the grid."""
    best = 0.0
    for _, rows in _levels_of(g):
        mean = rows.mean(axis=1, keepdims=True)
        best = max(best, float(np.abs(rows - mean).mean(axis=1).max()))
    return best


def sharp_function(g: TorusSignal) -> TorusSignal:
    """Dyadic sharp function ``sup_{I ni x} ((1/|I|) int_I |g - g_I|^2)^{1/2}``."""
    out = np.zeros(g.n)
    for _, rows in _levels_of(g):
        mean = rows.mean(axis=1, keepdims=True)
        oscillation = np.sqrt((np.abs(rows - mean) ** 2).mean(axis=1))
        np.maximum(out, np.repeat(oscillation, rows.shape[1]), out=out)
    return TorusSignal(out)


def jn_check(alpha: CarlesonSeq, p: float, interval: DyadicInterval | None = None) -> float:
    """``||sum_{I in J} alpha(I)/|I| 1_I||_p / (||alpha||_CM |J|^{1/p})``.

    >>> alpha = CarlesonSeq.from_mapping({DyadicInterval(1, 0): 0.5})
    >>> round(jn_check(alpha, 3.0, DyadicInterval(1, 0)), 12)
    1.0
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    interval = interval or DyadicInterval(0, 0)
    norm = cm_norm(alpha)
    if norm == 0:
        return 0.0
    density = array_lp_norm(alpha.density(interval), p)
    return density / (norm * interval.length ** (1.0 / p))


def random_carleson(depth: int, rng: np.random.Generator, kind: str = "spread") -> CarlesonSeq:
    """A random sequence of one of two shapes.

    ``spread`` puts ``|I| u`` on about half the intervals, with ``u`` uniform
    on ``(0, 1)``. ``path`` puts ``|I|`` on every ancestor of one random leaf.
    """
    if kind == "spread":
        levels = tuple(
            2.0**-k * rng.uniform(size=2**k) * (rng.uniform(size=2**k) < 0.5)
            for k in range(depth + 1)
        )
        return CarlesonSeq(levels)
    if kind == "path":
        leaf = int(rng.integers(2**depth))
        return CarlesonSeq.from_mapping(
            {DyadicInterval(k, leaf >> (depth - k)): 2.0**-k for k in range(depth + 1)}, depth
        )
    raise DomainError(f"unknown Carleson sequence kind {kind!r}")


@dataclass(frozen=True)
class JnBattery:
    """Largest John-Nirenberg ratio per exponent over a random battery."""

    depth: int
    trials: int
    max_ratio: Mapping[float, float]
    worst_kind: Mapping[float, str]


def jn_battery(
    depth: int, exponents: Sequence[float], trials: int, seed: int
) -> JnBattery:
    """Run :func:`jn_check` on ``trials`` random sequences per kind.

    Each sequence is tested on the unit interval and on one random ``J`` in the
    coarse half of the tree.
    """
    best = {float(p): 0.0 for p in exponents}
    worst = {float(p): "" for p in exponents}
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        for kind in ("spread", "path"):
            alpha = random_carleson(depth, rng, kind)
            level = int(rng.integers(depth // 2 + 1))
            intervals = (DyadicInterval(0, 0), DyadicInterval(level, int(rng.integers(2**level))))
            norm = cm_norm(alpha)
            if norm == 0:
                continue
            for interval in intervals:
                density = alpha.density(interval)
                for p in best:
                    ratio = array_lp_norm(density, p) / (norm * interval.length ** (1.0 / p))
                    if ratio > best[p]:
                        best[p], worst[p] = ratio, kind
    logger.info("jn battery depth %d: %s", depth, best)
    return JnBattery(depth, trials, best, worst)


@dataclass(frozen=True, eq=False)
class ProductCarlesonSeq:
    """Nonnegative weights on dyadic rectangles ``I1 x I2``.

    ``blocks[k1][k2]`` has shape ``(2^k1, 2^k2)``.
    """

    blocks: tuple[tuple[RealArray, ...], ...]

    def __post_init__(self) -> None:
        if not self.blocks or not self.blocks[0]:
            raise DomainError("a product Carleson sequence needs the unit square")
        width = len(self.blocks[0])
        rows = []
        for k1, row in enumerate(self.blocks):
            if len(row) != width:
                raise DomainError("every row of blocks must have the same depth")
            checked = []
            for k2, values in enumerate(row):
                a = np.array(values, dtype=np.float64, copy=True)
                if a.shape != (2**k1, 2**k2):
                    raise DomainError(f"block ({k1}, {k2}) has shape {a.shape}")
                if not np.all(np.isfinite(a)) or np.any(a < 0):
                    raise DomainError("weights must be finite and nonnegative")
                a.setflags(write=False)
                checked.append(a)
            rows.append(tuple(checked))
        object.__setattr__(self, "blocks", tuple(rows))

    @property
    def depth(self) -> tuple[int, int]:
        """Finest levels ``(d1, d2)`` of the two factors."""
        return len(self.blocks) - 1, len(self.blocks[0]) - 1

    @property
    def cells(self) -> tuple[int, int]:
        """Shape ``(2^d1, 2^d2)`` of the finest cell grid."""
        d1, d2 = self.depth
        return 2**d1, 2**d2

    @classmethod
    def zeros(cls, depth: tuple[int, int]) -> ProductCarlesonSeq:
        """The zero sequence of the given depths."""
        d1, d2 = depth
        return cls(
            tuple(tuple(np.zeros((2**k1, 2**k2)) for k2 in range(d2 + 1)) for k1 in range(d1 + 1))
        )

    @classmethod
    def from_mapping(
        cls, entries: Mapping[DyadicRectangle, float], depth: tuple[int, int]
    ) -> ProductCarlesonSeq:
        """Collect ENTRIES by rectangle; repeated rectangles add up."""
        blocks = [[b.copy() for b in row] for row in cls.zeros(depth).blocks]
        for (first, second), value in entries.items():
            if first.level > depth[0] or second.level > depth[1]:
                raise DomainError(f"{first} x {second} is finer than depth {depth}")
            blocks[first.level][second.level][first.offset, second.offset] += value
        return cls(tuple(tuple(row) for row in blocks))

    def entries(self) -> Iterator[tuple[DyadicRectangle, float]]:
        """The nonzero weights, coarse to fine."""
        for k1, row in enumerate(self.blocks):
            for k2, values in enumerate(row):
                for j1, j2 in zip(*np.nonzero(values)):
                    rect = (DyadicInterval(k1, int(j1)), DyadicInterval(k2, int(j2)))
                    yield rect, float(values[j1, j2])

    def scaled(self, factor: float) -> ProductCarlesonSeq:
        """Every weight multiplied by FACTOR."""
        return ProductCarlesonSeq(tuple(tuple(b * factor for b in row) for row in self.blocks))

    def contained_mass(self, union: BoolArray) -> float:
        """``sum_{R in U} alpha(R)`` for a union ``U`` of finest cells."""
        mask = np.asarray(union, dtype=bool)
        if mask.shape != self.cells:
            raise DomainError(f"cell mask must have shape {self.cells}, got {mask.shape}")
        total = 0.0
        for k1, row in enumerate(self.blocks):
            for k2, values in enumerate(row):
                inside = mask.reshape(2**k1, -1, 2**k2, mask.shape[1] >> k2).all(axis=(1, 3))
                total += float(values[inside].sum())
        return total

    def density(self, union: BoolArray | None = None) -> RealArray:
        """``sum_{R in U} alpha(R)/|R| 1_R`` on the finest cells."""
        mask = np.ones(self.cells, dtype=bool) if union is None else np.asarray(union, dtype=bool)
        out = np.zeros(self.cells)
        c1, c2 = self.cells
        for k1, row in enumerate(self.blocks):
            for k2, values in enumerate(row):
                inside = mask.reshape(2**k1, c1 >> k1, 2**k2, c2 >> k2).all(axis=(1, 3))
                kept = np.where(inside, values, 0.0) * 2.0 ** (k1 + k2)
                out += np.repeat(np.repeat(kept, c1 >> k1, axis=0), c2 >> k2, axis=1)
        return out


def _union_value(alpha: ProductCarlesonSeq, union: BoolArray) -> float:
    count = int(np.count_nonzero(union))
    if count == 0:
        return 0.0
    c1, c2 = alpha.cells
    return alpha.contained_mass(union) * c1 * c2 / count


class CmMode(Enum):
    """How the supremum over sets is taken in :func:`product_cm_norm`."""

    Rect = "rect"
    Exhaustive = "exhaustive"
    Heuristic = "heuristic"


def _rect_norm(alpha: ProductCarlesonSeq) -> float:
    d1, d2 = alpha.depth
    best = 0.0
    for j1, j2 in itertools.product(range(d1 + 1), range(d2 + 1)):
        sums = np.zeros((2**j1, 2**j2))
        for k1 in range(j1, d1 + 1):
            for k2 in range(j2, d2 + 1):
                block = alpha.blocks[k1][k2]
                sums += block.reshape(2**j1, 2 ** (k1 - j1), 2**j2, 2 ** (k2 - j2)).sum(axis=(1, 3))
        best = max(best, float(sums.max()) * 2.0 ** (j1 + j2))
    return best


def _rectangle_masks(alpha: ProductCarlesonSeq) -> Iterator[tuple[BoolArray, float]]:
    c1, c2 = alpha.cells
    for (first, second), value in alpha.entries():
        mask = np.zeros((c1, c2), dtype=bool)
        mask[first.sample_slice(c1), second.sample_slice(c2)] = True
        yield mask, value


def _enumerated_norm(alpha: ProductCarlesonSeq) -> float:
    c1, c2 = alpha.cells
    count = c1 * c2
    unions = np.arange(1, 2**count, dtype=np.int64)
    mass = np.zeros(unions.shape)
    for mask, value in _rectangle_masks(alpha):
        bits = int(sum(1 << int(i) for i in np.flatnonzero(mask.ravel())))
        mass += value * ((unions & bits) == bits)
    sizes = np.zeros(unions.shape)
    for i in range(count):
        sizes += (unions >> i) & 1
    return float((mass * count / sizes).max())


def _linprog_norm(alpha: ProductCarlesonSeq) -> float:
    """Exact supremum over unions via the layer-cake linear program."""
    c1, c2 = alpha.cells
    count = c1 * c2
    rects = list(_rectangle_masks(alpha))
    if not rects:
        return 0.0
    size = count + len(rects)
    rows = []
    for r, (mask, _) in enumerate(rects):
        for cell in np.flatnonzero(mask.ravel()):
            row = np.zeros(size)
            row[count + r] = 1.0
            row[cell] = -1.0
            rows.append(row)
    objective = np.concatenate([np.zeros(count), -np.array([v for _, v in rects])])
    equality = np.concatenate([np.full(count, 1.0 / count), np.zeros(len(rects))])
    result = scipy.optimize.linprog(
        objective,
        A_ub=np.array(rows),
        b_ub=np.zeros(len(rows)),
        A_eq=equality[np.newaxis, :],
        b_eq=[1.0],
        bounds=(0, None),
        method="highs",
    )
    if result.status != 0:
        raise NumericalFailure(f"product Carleson linear program failed: {result.message}")
    x = result.x[:count].reshape(c1, c2)
    best = 0.0
    for level in np.unique(x[x > 1e-12]):
        best = max(best, _union_value(alpha, x >= level * (1 - 1e-9)))
    logger.debug("linear program optimum %.6g, best level set %.6g", -result.fun, best)
    return best


def _heuristic_norm(alpha: ProductCarlesonSeq, starts: int = 8) -> float:
    """Greedy add-or-remove local search started from the heaviest rectangles."""
    ranked = sorted(
        _rectangle_masks(alpha), key=lambda item: -item[1] / max(int(item[0].sum()), 1)
    )
    best = 0.0
    for mask, _ in ranked[:starts]:
        union = mask.copy()
        value = _union_value(alpha, union)
        while True:
            candidates = []
            for cell in np.ndindex(union.shape):
                trial = union.copy()
                trial[cell] = not trial[cell]
                if trial.any():
                    candidates.append((_union_value(alpha, trial), cell))
            top, cell = max(candidates, default=(value, None))
            if cell is None or top <= value * (1 + 1e-12):
                break
            union[cell] = not union[cell]
            value = top
        best = max(best, value)
    return best


def product_cm_norm(alpha: ProductCarlesonSeq, mode: CmMode | str = CmMode.Rect) -> float:
    """Product Carleson norm ``sup_U |U|^-1 sum_{R in U} alpha(R)``.

    ``rect`` takes the supremum over dyadic rectangles only. ``exhaustive`` is
    exact over unions of finest cells and needs a grid of at most 8x8 cells.
    ``heuristic`` is a local-search lower bound.
    """
    mode = CmMode(mode)
    if mode is CmMode.Rect:
        return _rect_norm(alpha)
    if mode is CmMode.Heuristic:
        return _heuristic_norm(alpha)
    c1, c2 = alpha.cells
    if c1 * c2 <= ENUMERATION_CELLS:
        return _enumerated_norm(alpha)
    if c1 * c2 > EXACT_CELLS:
        raise DomainError(f"exhaustive product norm needs at most 8x8 cells, got {c1}x{c2}")
    return max(_linprog_norm(alpha), _heuristic_norm(alpha), _rect_norm(alpha))


def separating_instance() -> ProductCarlesonSeq:
    """A 4x4 sequence whose product norm exceeds its rectangle norm.

    Two full strips of width 1/4 cross at a corner cell; their union carries
    mass 1/2 on area 7/16.

    >>> round(product_cm_norm(separating_instance(), "exhaustive"), 6)
    1.142857
    """
    unit = DyadicInterval(0, 0)
    strip = DyadicInterval(2, 0)
    return ProductCarlesonSeq.from_mapping({(strip, unit): 0.25, (unit, strip): 0.25}, (2, 2))


@dataclass(frozen=True, eq=False)
class JnStep:
    """One Chang-Fefferman step ``||F_U||_p <= C (|U|^{1/p} + ||F_V||_p)``."""

    union: BoolArray
    next_union: BoolArray
    threshold: float
    measure: float
    next_measure: float
    norm: float
    next_norm: float
    constant: float


def _default_cm(alpha: ProductCarlesonSeq) -> float:
    c1, c2 = alpha.cells
    mode = CmMode.Exhaustive if c1 * c2 <= EXACT_CELLS else CmMode.Heuristic
    return product_cm_norm(alpha, mode)


def product_jn_step(
    alpha: ProductCarlesonSeq,
    union: npt.ArrayLike,
    p: float,
    threshold: float = 4.0,
    cm: float | None = None,
    max_doublings: int = 64,
) -> JnStep:
    """Build ``V = {M g > K |U|^{-1/p'}}`` from the dual witness ``g`` of ``F_U``.

    ``alpha`` is normalized to product Carleson norm one first; pass ``cm`` to
    skip recomputing it. ``K`` doubles until ``|V| < |U|/2``.
    """
    if p <= 1:
        raise DomainError(f"p must be > 1, got {p}")
    if threshold <= 0:
        raise DomainError(f"K must be positive, got {threshold}")
    mask = np.asarray(union, dtype=bool)
    if mask.shape != alpha.cells:
        raise DomainError(f"cell mask must have shape {alpha.cells}, got {mask.shape}")
    cm = _default_cm(alpha) if cm is None else cm
    normalized = alpha.scaled(1.0 / cm) if cm > 0 else alpha
    measure = float(mask.mean())
    density = normalized.density(mask)
    norm = array_lp_norm(density, p)
    empty = np.zeros_like(mask)
    if norm == 0 or measure == 0:
        return JnStep(mask, empty, threshold, measure, 0.0, norm, 0.0, 0.0)
    dual = p / (p - 1)
    witness = density ** (p - 1) / norm ** (p - 1)
    maximal = strong_maximal_array(witness)
    for _ in range(max_doublings):
        level = threshold * measure ** (-1.0 / dual)
        nxt = maximal > level
        if nxt.mean() < measure / 2:
            break
        threshold *= 2
    else:
        raise NumericalFailure(f"no K up to {threshold:g} shrinks V below |U|/2")
    next_norm = array_lp_norm(normalized.density(nxt), p)
    constant = norm / (measure ** (1.0 / p) + next_norm)
    logger.debug(
        "jn step: |U|=%.4g |V|=%.4g K=%g C=%.4g", measure, float(nxt.mean()), threshold, constant
    )
    return JnStep(
        union=mask,
        next_union=nxt,
        threshold=threshold,
        measure=measure,
        next_measure=float(nxt.mean()),
        norm=norm,
        next_norm=next_norm,
        constant=constant,
    )


@dataclass(frozen=True)
class JnRecursion:
    """Iterated :func:`product_jn_step` down to an empty set."""

    steps: tuple[JnStep, ...]
    ratio: float
    constant: float
    bound: float

    @property
    def depth(self) -> int:
        """Number of steps taken."""
        return len(self.steps)


def product_jn_recursion(
    alpha: ProductCarlesonSeq, union: npt.ArrayLike, p: float, threshold: float = 4.0
) -> JnRecursion:
    """Iterate the step with ``U <- V`` until ``V`` or ``F_V`` vanishes.

    ``ratio`` is ``||F_U||_p / |U|^{1/p}`` for the normalized sequence and
    ``bound`` the composed estimate ``sum_i C^{i+1} (|U_i|/|U|)^{1/p}`` with
    ``C`` the largest step constant.
    """
    cm = _default_cm(alpha)
    mask = np.asarray(union, dtype=bool)
    steps: list[JnStep] = []
    limit = int(math.log2(mask.size)) + 2
    while len(steps) < limit:
        step = product_jn_step(alpha, mask, p, threshold, cm=cm)
        steps.append(step)
        if step.next_norm == 0 or not step.next_union.any():
            break
        mask = step.next_union
    else:
        raise NumericalFailure(f"John-Nirenberg recursion did not end in {limit} steps")
    first = steps[0]
    if first.measure == 0:
        return JnRecursion(tuple(steps), 0.0, 0.0, 0.0)
    ratio = first.norm / first.measure ** (1.0 / p)
    constant = max(step.constant for step in steps)
    bound = sum(
        constant ** (i + 1) * (step.measure / first.measure) ** (1.0 / p)
        for i, step in enumerate(steps)
    )
    return JnRecursion(tuple(steps), ratio, constant, bound)


def random_product_carleson(
    depth: tuple[int, int], rng: np.random.Generator, density: float = 0.25
) -> ProductCarlesonSeq:
    """Weights ``|R| u`` on a random fraction ``density`` of the dyadic rectangles."""
    d1, d2 = depth
    blocks = []
    for k1 in range(d1 + 1):
        row = []
        for k2 in range(d2 + 1):
            shape = (2**k1, 2**k2)
            keep = rng.uniform(size=shape) < density
            row.append(2.0 ** -(k1 + k2) * rng.uniform(size=shape) * keep)
        blocks.append(tuple(row))
    return ProductCarlesonSeq(tuple(blocks))
