"""Time-frequency tiles, wave packets and the tile square function."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from dataclasses import field
from typing import Iterator
from typing import Sequence

import numpy as np
import numpy.typing as npt
import scipy.linalg

from lp_tile_lab.carleson import CarlesonSeq
from lp_tile_lab.carleson import cm_norm
from lp_tile_lab.errors import DomainError
from lp_tile_lab.grid import BoolArray
from lp_tile_lab.grid import ComplexArray
from lp_tile_lab.grid import DyadicInterval
from lp_tile_lab.grid import FreqInterval
from lp_tile_lab.grid import FreqRectangle
from lp_tile_lab.grid import IntervalCollection
from lp_tile_lab.grid import RealArray
from lp_tile_lab.grid import TorusSignal
from lp_tile_lab.grid import TorusSignal2
from lp_tile_lab.grid import apply_symbol
from lp_tile_lab.grid import array_lp_norm
from lp_tile_lab.grid import check_disjoint_rectangles
from lp_tile_lab.grid import frequencies
from lp_tile_lab.grid import max_level
from lp_tile_lab.grid import samples_of
from lp_tile_lab.grid import spectrum_of
from lp_tile_lab.projections import Window
from lp_tile_lab.projections import maximal_array
from lp_tile_lab.projections import strong_maximal_array


logger = logging.getLogger(__name__)


def dual_level(width: int, n: int) -> int:
    """The dyadic level ``k`` with ``1 <= 2^-k * width < 2``."""
    level = int(width).bit_length() - 1
    if level > max_level(n):
        raise DomainError(f"frequency width {width} is too wide for the grid of n={n}")
    return level


@dataclass(frozen=True, order=True)
class Tile:
    """A dyadic interval paired with a dual frequency arc."""

    spatial: DyadicInterval
    freq: FreqInterval

    def __post_init__(self) -> None:
        area = self.spatial.length * self.freq.width
        if not 1 <= area < 2:
            raise DomainError(f"tile {self.spatial} x {self.freq} has area {area}")


@dataclass(frozen=True, eq=False)
class TileFamily:
    """All tiles sharing one frequency arc, with their wave packets.

    The packet of the tile at ``offset`` has spectrum
    ``amplitude * profile(k) * exp(-2 pi i k c(I))``, so every packet has the
    same L^2 norm and the family is invariant under translation by ``|I|``.
    """

    freq: FreqInterval
    level: int
    n: int
    profile: RealArray
    amplitude: float

    @property
    def count(self) -> int:
        """Number of tiles, ``2^level``."""
        return 2**self.level

    @property
    def block(self) -> int:
        """Samples per spatial interval."""
        return self.n >> self.level

    @property
    def tiles(self) -> tuple[Tile, ...]:
        """The tiles left to right."""
        return tuple(Tile(DyadicInterval(self.level, j), self.freq) for j in range(self.count))

    def _half_shift(self) -> ComplexArray:
        return np.exp(1j * np.pi * frequencies(self.n) / self.count)

    def atom(self, offset: int) -> TorusSignal:
        """The wave packet ``phi_s``."""
        centre = (offset + 0.5) / self.count
        spectrum = self.amplitude * self.profile * np.exp(-2j * np.pi * frequencies(self.n) * centre)
        return TorusSignal(samples_of(spectrum))

    def coefficients(self, samples: npt.ArrayLike) -> ComplexArray:
        """``<f, phi_s>`` for every tile, by one inverse FFT."""
        spectrum = spectrum_of(samples) * self.profile * self._half_shift()
        return self.amplitude * samples_of(spectrum)[:: self.block]

    def synthesize(self, coeffs: npt.ArrayLike) -> ComplexArray:
        """``sum_s c_s phi_s``, the adjoint of :meth:`coefficients`."""
        c = np.asarray(coeffs, dtype=np.complex128)
        k = frequencies(self.n)
        folded = np.fft.fft(c)[k % self.count]
        spectrum = self.amplitude * self.profile * np.conj(self._half_shift()) * folded
        return samples_of(spectrum)

    def gram(self) -> ComplexArray:
        """``G[j, j'] = <phi_j', phi_j>``; circulant because the family is."""
        k = frequencies(self.n)
        d = np.arange(self.count)[:, None]
        weights = self.amplitude**2 * self.profile**2
        row = np.exp(2j * np.pi * k[None, :] * d / self.count) @ weights
        return scipy.linalg.circulant(row)

    def symbol(self) -> RealArray:
        """``|phi_s^|^2 / |I_s|``, the multiplier of the translation-averaged frame operator."""
        return self.count * (self.amplitude * self.profile) ** 2


def tile_family(omega: FreqInterval, window: Window, n: int) -> TileFamily:
    """Wave packets for ``omega`` normalized to ``||phi_s||_2 = ||phi||_2``."""
    omega.check(n)
    level = dual_level(omega.width, n)
    profile = window.transported(omega, n)
    energy = float(np.sum(profile**2))
    if energy == 0:
        raise DomainError(f"window vanishes on {omega}")
    return TileFamily(omega, level, n, profile, window.l2_norm() / math.sqrt(energy))


@dataclass(frozen=True, eq=False)
class TileSet:
    """The tiles of every arc of a collection, grouped by arc."""

    families: tuple[TileFamily, ...]
    source: IntervalCollection
    window: Window

    @property
    def n(self) -> int:
        """Grid size."""
        return self.window.n if not self.families else self.families[0].n

    @property
    def tiles(self) -> tuple[Tile, ...]:
        """Every tile, family by family."""
        return tuple(tile for family in self.families for tile in family.tiles)

    def __len__(self) -> int:
        return sum(family.count for family in self.families)

    @property
    def depth(self) -> int:
        """The finest spatial level of any family."""
        return max((family.level for family in self.families), default=0)


def build_tiles(omegas: IntervalCollection, window: Window, n: int | None = None) -> TileSet:
    """Tiles ``s`` with ``omega_s`` in the collection, one dyadic level per arc."""
    size = window.n if n is None else n
    families = tuple(tile_family(omega, window, size) for omega in omegas)
    logger.debug("built %d tiles over %d arcs", sum(f.count for f in families), len(families))
    return TileSet(families, omegas, window)


@dataclass(frozen=True, eq=False)
class TileCoefficients:
    """``<f, phi_s>`` for a tile set, one array per family."""

    tiles: TileSet
    values: tuple[ComplexArray, ...]

    def rows(self) -> Iterator[tuple[int, int, int, int, float, float]]:
        """``(omega_lo, omega_hi, level, offset, re, im)`` in family order."""
        for family, values in zip(self.tiles.families, self.values):
            for offset, value in enumerate(values):
                yield (
                    family.freq.lo,
                    family.freq.hi,
                    family.level,
                    offset,
                    float(value.real),
                    float(value.imag),
                )

    def energy(self) -> float:
        """``sum_s |<f, phi_s>|^2``."""
        return float(sum(np.sum(np.abs(v) ** 2) for v in self.values))


def tile_coefficients(f: TorusSignal, tiles: TileSet) -> TileCoefficients:
    """``<f, phi_s>`` for every tile of TILES."""
    return TileCoefficients(tiles, tuple(fam.coefficients(f.samples) for fam in tiles.families))


def tile_operator(f: TorusSignal, tiles: TileSet) -> tuple[TorusSignal, TileCoefficients]:
    """``T f = (sum_s |<f, phi_s>|^2 / |I_s| 1_{I_s})^{1/2}`` and its coefficients."""
    coefficients = tile_coefficients(f, tiles)
    total = np.zeros(f.n)
    for family, values in zip(tiles.families, coefficients.values):
        total += np.repeat(np.abs(values) ** 2 * family.count, family.block)
    return TorusSignal(np.sqrt(total)), coefficients


def power_iteration(
    matrix: npt.ArrayLike, iters: int = 1000, tol: float = 1e-13, seed: int = 0
) -> float:
    """Largest eigenvalue of a Hermitian positive semidefinite matrix.

    Iterates ``v <- A v / ||A v||`` and returns the Rayleigh quotient once
    it stops moving.
    """
    a = np.asarray(matrix)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(a.shape[0]) + 1j * rng.standard_normal(a.shape[0])
    v /= np.linalg.norm(v)
    value = 0.0
    for it in range(iters):
        w = a @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0
        v = w / norm
        updated = float(np.real(np.vdot(v, a @ v)))
        if abs(updated - value) <= tol * max(abs(updated), 1.0):
            logger.debug("power iteration converged after %d steps", it + 1)
            return updated
        value = updated
    return value


def bessel_constant(omega: FreqInterval, window: Window, n: int | None = None) -> float:
    """Sharp constant in ``sum_s |<f, phi_s>|^2 <= C ||f||_2^2`` for one arc."""
    family = tile_family(omega, window, window.n if n is None else n)
    return float(scipy.linalg.eigh(family.gram(), eigvals_only=True)[-1])


def bessel_constant_power(omega: FreqInterval, window: Window, n: int | None = None) -> float:
    """Same constant as :func:`bessel_constant`, by power iteration."""
    family = tile_family(omega, window, window.n if n is None else n)
    return power_iteration(family.gram())


def _tripled_symbol(omega: FreqInterval, window: Window, n: int) -> RealArray:
    return window.transported(omega.scaled(3).clipped(n), n)


@dataclass(frozen=True)
class TailProbeReport:
    """Worst ratios found for each dilation of the spatial interval."""

    rho: float
    rows: tuple[tuple[float, float, float], ...]
    slope: float


def _cyclic_distance(n: int, centre: float) -> RealArray:
    x = np.arange(n) / n
    d = np.abs(x - centre)
    return np.minimum(d, 1.0 - d)


def tail_decay_probe(
    omega: FreqInterval,
    interval: DyadicInterval,
    t_grid: Sequence[float],
    window: Window,
    starts: int = 20,
    steps: int = 200,
    seed: int = 0,
) -> TailProbeReport:
    """Lower-bound ``sup_f sum_{I_s in I} |<f, phi_s>|^2 / ||phi^{3 omega} * f||^2``.

    ``f`` ranges over signals vanishing on ``tI``. Each ``t`` is searched by
    normalized projected gradient ascent from random starts; values of
    ``t`` are visited in decreasing order and the previous best witness
    seeds the next search, so the reported ratios never increase with ``t``.
    """
    n = window.n
    family = tile_family(omega, window, n)
    interval.check(n)
    rho = interval.length * omega.width
    if rho <= 1:
        raise DomainError(f"rho = |I||omega| = {rho} must exceed 1")
    if family.level < interval.level:
        raise DomainError("tiles of omega are longer than I")
    shift = family.level - interval.level
    inside = (np.arange(family.count) >> shift) == interval.offset
    denominator = _tripled_symbol(omega, window, n) ** 2
    distance = _cyclic_distance(n, interval.center)

    def numerator_terms(x: ComplexArray) -> tuple[float, ComplexArray]:
        c = family.coefficients(x) * inside
        return float(np.sum(np.abs(c) ** 2)), family.synthesize(c)

    def ratio_and_gradient(x: ComplexArray, allowed: BoolArray) -> tuple[float, ComplexArray]:
        num, a_x = numerator_terms(x)
        b_x = apply_symbol(x, denominator)
        den = float(np.real(np.mean(x * np.conj(b_x))))
        if den <= 0:
            return 0.0, np.zeros_like(x)
        ratio = num / den
        return ratio, (a_x - ratio * b_x) * allowed

    rows = []
    best_prev: ComplexArray | None = None
    for t in sorted(t_grid, reverse=True):
        if t * interval.length >= 1:
            raise DomainError(f"tI covers the torus for t={t}")
        allowed = distance >= t * interval.length / 2
        best_ratio, best_x = 0.0, None
        seeds = [] if best_prev is None else [best_prev * allowed]
        for start in range(starts):
            rng = np.random.default_rng([seed, start, int(1000 * t)])
            seeds.append((rng.standard_normal(n) + 1j * rng.standard_normal(n)) * allowed)
        for x in seeds:
            x = x / (np.linalg.norm(x) or 1.0)
            ratio, grad = ratio_and_gradient(x, allowed)
            eta = 0.5
            for _ in range(steps):
                gnorm = np.linalg.norm(grad)
                if gnorm == 0:
                    break
                trial = x + eta * grad / gnorm
                trial /= np.linalg.norm(trial)
                trial_ratio, trial_grad = ratio_and_gradient(trial, allowed)
                if trial_ratio > ratio:
                    x, ratio, grad = trial, trial_ratio, trial_grad
                    eta = min(2 * eta, 1.0)
                else:
                    eta /= 2
                    if eta < 1e-8:
                        break
            if ratio > best_ratio or best_x is None:
                best_ratio, best_x = ratio, x
        best_prev = best_x
        rows.append((float(t), float(t * rho), best_ratio))
        logger.debug("tail probe t=%g ratio=%.3e", t, best_ratio)
    rows.reverse()
    usable = [(tr, r) for _, tr, r in rows if r > 0]
    slope = float("nan")
    if len(usable) >= 2:
        xs, ys = np.log([u[0] for u in usable]), np.log([u[1] for u in usable])
        slope = float(np.polyfit(xs, ys, 1)[0])
    return TailProbeReport(rho, tuple(rows), slope)


def translation_average_check(
    omega: FreqInterval, window: Window, f: TorusSignal
) -> float:
    """``max |avg_y Tr_{-y} H Tr_y f - psi * f|`` with ``H = sum <., phi_s> phi_s``."""
    n = f.n
    family = tile_family(omega, window, n)
    x = np.asarray(f.samples, dtype=np.complex128)
    total = np.zeros(n, dtype=np.complex128)
    for y in range(n):
        shifted = np.roll(x, y)
        frame = family.synthesize(family.coefficients(shifted))
        total += np.roll(frame, -y)
    averaged = total / n
    convolved = apply_symbol(x, family.symbol())
    return float(np.max(np.abs(averaged - convolved)))


@dataclass(frozen=True)
class PointwiseMaxReport:
    """Smallest ``C`` with ``sup_s 1_{I_s} |<f, phi_s>| / |I_s|^{1/2} <= C M f``."""

    constant: float
    per_signal: tuple[float, ...]


def pointwise_max_check(signals: Sequence[TorusSignal], tiles: TileSet) -> PointwiseMaxReport:
    """Compare the tile supremum with the centred maximal function ``M f``.

    Raises:
        DomainError: ``M f`` vanishes at a point where some coefficient does not.
    """
    constants = []
    for f in signals:
        _, coefficients = tile_operator(f, tiles)
        lhs = np.zeros(f.n)
        for family, values in zip(tiles.families, coefficients.values):
            lhs = np.maximum(lhs, np.repeat(np.abs(values) * math.sqrt(family.count), family.block))
        mf = maximal_array(f.samples)
        positive = mf > 0
        if np.any(lhs[~positive] > 0):
            raise DomainError("maximal function vanishes where the tile supremum does not")
        constants.append(float(np.max(lhs[positive] / mf[positive])) if positive.any() else 0.0)
    return PointwiseMaxReport(max(constants, default=0.0), tuple(constants))


@dataclass(frozen=True)
class SplitResult:
    """Tiles separated by the greedy Carleson split of ``1_F``."""

    big: tuple[Tile, ...]
    small: tuple[Tile, ...]
    intervals: tuple[DyadicInterval, ...]
    small_carleson: CarlesonSeq
    cm_small: float
    shadow: float
    measure: float
    beta: float

    def to_json(self) -> dict[str, list[list[int]]]:
        """Tiles as ``[lo, hi, level, offset]`` rows and ``J`` as ``[level, offset]``."""
        def tile_row(tile: Tile) -> list[int]:
            return [tile.freq.lo, tile.freq.hi, tile.spatial.level, tile.spatial.offset]

        return {
            "big": [tile_row(t) for t in self.big],
            "small": [tile_row(t) for t in self.small],
            "J": [[j.level, j.offset] for j in self.intervals],
        }


def _stock_carleson(
    tiles: TileSet, masses: Sequence[RealArray], stock: Sequence[BoolArray]
) -> CarlesonSeq:
    levels = [np.zeros(2**k) for k in range(tiles.depth + 1)]
    for family, mass, keep in zip(tiles.families, masses, stock):
        levels[family.level] += mass * keep
    return CarlesonSeq(tuple(levels))


def greedy_bmo_split(tiles: TileSet, subset: npt.ArrayLike, beta: float) -> SplitResult:
    """Split tiles so the Carleson norm of the remainder drops below ``beta/4``.

    While the stock's Carleson norm of ``alpha(J) = sum_{I_s = J} |<1_F, phi_s>|^2``
    is at least ``beta/4``, the coarsest (then leftmost) dyadic ``J`` with
    ``sum_{I_s in J} |<1_F, phi_s>|^2 >= beta/4 |J|`` is found and every stock
    tile inside it moves to the big part.
    """
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    mask = np.asarray(subset, dtype=bool)
    if not mask.any():
        raise DomainError("F must be nonempty")
    indicator = TorusSignal(mask.astype(np.float64))
    masses = [np.abs(fam.coefficients(indicator.samples)) ** 2 for fam in tiles.families]
    stock = [np.ones(fam.count, dtype=bool) for fam in tiles.families]
    threshold = beta / 4
    chosen: list[DyadicInterval] = []
    while True:
        alpha = _stock_carleson(tiles, masses, stock)
        sums = alpha.subtree_sums()
        scaled = [s * 2**k for k, s in enumerate(sums)]
        current = cm_norm(alpha)
        if current < threshold:
            break
        level = next(k for k, s in enumerate(scaled) if s.max() >= threshold)
        offset = int(np.flatnonzero(scaled[level] >= threshold)[0])
        chosen.append(DyadicInterval(level, offset))
        for family, keep in zip(tiles.families, stock):
            if family.level >= level:
                keep[(np.arange(family.count) >> (family.level - level)) == offset] = False
        logger.debug("split: J=(%d, %d), stock CM %.4g", level, offset, current)
    big, small = [], []
    covered = np.zeros(tiles.n, dtype=bool)
    for family, keep in zip(tiles.families, stock):
        for tile, kept in zip(family.tiles, keep):
            (small if kept else big).append(tile)
            if not kept:
                covered[tile.spatial.sample_slice(tiles.n)] = True
    return SplitResult(
        big=tuple(big),
        small=tuple(small),
        intervals=tuple(chosen),
        small_carleson=alpha,
        cm_small=current,
        shadow=float(covered.mean()),
        measure=float(mask.mean()),
        beta=beta,
    )


def indicator_battery(n: int, seed: int, levels: Sequence[int] = (1, 2, 3, 4, 5, 6)) -> list[tuple[str, BoolArray]]:
    """Indicator sets: dyadic intervals, pairs of dyadic intervals and random sets.

    Every set at level ``k`` has measure ``2^-k``.
    """
    rng = np.random.default_rng(seed)
    battery = []
    for k in levels:
        if 2 ** (k + 1) > n:
            continue
        size = n >> k
        interval = np.zeros(n, dtype=bool)
        j = int(rng.integers(2**k))
        interval[j * size : (j + 1) * size] = True
        battery.append((f"dyadic-{k}", interval))
        pair = np.zeros(n, dtype=bool)
        a, b = rng.choice(2 ** (k + 1), size=2, replace=False)
        for j in (int(a), int(b)):
            pair[j * (size // 2) : (j + 1) * (size // 2)] = True
        battery.append((f"union-{k}", pair))
        scattered = np.zeros(n, dtype=bool)
        scattered[rng.choice(n, size=size, replace=False)] = True
        battery.append((f"random-{k}", scattered))
    return battery


@dataclass(frozen=True)
class RestrictedTypeReport:
    """``||T 1_F||_p / |F|^{1/p}`` over a battery of sets."""

    p: float
    rows: tuple[tuple[str, float, float], ...]
    max_ratio: float


def restricted_type_check(
    tiles: TileSet, sets: Sequence[tuple[str, npt.ArrayLike]], p: float
) -> RestrictedTypeReport:
    """Restricted weak-type ratios of the tile operator on indicators, for ``p > 2``."""
    if p <= 2:
        raise DomainError(f"restricted type is checked for p > 2, got {p}")
    rows = []
    for label, subset in sets:
        mask = np.asarray(subset, dtype=bool)
        measure = float(mask.mean())
        if measure == 0:
            rows.append((label, 0.0, 0.0))
            continue
        out, _ = tile_operator(TorusSignal(mask.astype(np.float64)), tiles)
        rows.append((label, measure, array_lp_norm(out.samples, p) / measure ** (1 / p)))
    return RestrictedTypeReport(p, tuple(rows), max((r[2] for r in rows), default=0.0))


@dataclass(frozen=True, order=True)
class Tile2:
    """A dyadic rectangle paired with a frequency rectangle, dual per coordinate."""

    spatial: tuple[DyadicInterval, DyadicInterval]
    freq: FreqRectangle

    def __post_init__(self) -> None:
        for interval, omega in zip(self.spatial, self.freq):
            Tile(interval, omega)


@dataclass(frozen=True, eq=False)
class TileFamily2:
    """Tensor products of two one-dimensional families."""

    first: TileFamily
    second: TileFamily

    @property
    def freq(self) -> FreqRectangle:
        """The frequency rectangle."""
        return (self.first.freq, self.second.freq)

    @property
    def tiles(self) -> tuple[Tile2, ...]:
        """Every product of a tile of each factor."""
        return tuple(
            Tile2((a.spatial, b.spatial), self.freq)
            for a in self.first.tiles
            for b in self.second.tiles
        )

    def coefficients(self, samples: npt.ArrayLike) -> ComplexArray:
        """``<f, phi_s1 (x) phi_s2>`` on the grid of tile positions."""
        one, two = self.first, self.second
        weights = np.outer(one.profile * one._half_shift(), two.profile * two._half_shift())
        values = samples_of(spectrum_of(samples) * weights)
        return one.amplitude * two.amplitude * values[:: one.block, :: two.block]

    def bessel_constant(self) -> float:
        """Product of the largest Gram eigenvalues of the two factors."""
        top = [float(scipy.linalg.eigh(f.gram(), eigvals_only=True)[-1]) for f in (self.first, self.second)]
        return top[0] * top[1]


@dataclass(frozen=True, eq=False)
class TileSet2:
    """Product tiles of a family of disjoint frequency rectangles."""

    families: tuple[TileFamily2, ...]
    source: tuple[FreqRectangle, ...]
    window: Window
    shape: tuple[int, int]

    @property
    def tiles(self) -> tuple[Tile2, ...]:
        """Every tile, family by family."""
        return tuple(tile for family in self.families for tile in family.tiles)


def build_tiles_2d(
    rectangles: Sequence[FreqRectangle], window: Window, shape: tuple[int, int]
) -> TileSet2:
    """Tensor families for RECTANGLES on a grid of the given shape.

    Raises:
        DomainError: Two rectangles overlap.
    """
    check_disjoint_rectangles(rectangles)
    n1, n2 = shape
    families = tuple(
        TileFamily2(tile_family(a, window, n1), tile_family(b, window, n2)) for a, b in rectangles
    )
    return TileSet2(families, tuple(rectangles), window, shape)


@dataclass(frozen=True, eq=False)
class ProductTileOutput:
    """The product tile operator, its coefficients and the per-family Bessel constants."""

    signal: TorusSignal2
    values: tuple[ComplexArray, ...]
    bessel: tuple[float, ...] = field(default=())


def product_tile_operator(
    f: TorusSignal2, rectangles: Sequence[FreqRectangle], window: Window
) -> tuple[ProductTileOutput, TileSet2]:
    """``T f = (sum_s |<f, phi_s>|^2 / |R_s| 1_{R_s})^{1/2}`` for tensor tiles."""
    tiles = build_tiles_2d(rectangles, window, f.shape)
    total = np.zeros(f.shape)
    values = []
    for family in tiles.families:
        c = family.coefficients(f.samples)
        values.append(c)
        weight = np.abs(c) ** 2 * family.first.count * family.second.count
        total += np.repeat(np.repeat(weight, family.first.block, axis=0), family.second.block, axis=1)
    bessel = tuple(family.bessel_constant() for family in tiles.families)
    return ProductTileOutput(TorusSignal2(np.sqrt(total)), tuple(values), bessel), tiles


def product_tail_probe(
    rectangle: FreqRectangle,
    region: npt.ArrayLike,
    a: float,
    window: Window,
    shape: tuple[int, int],
    trials: int = 20,
    seed: int = 0,
) -> float:
    """``max_f sum_{R_s in U} |<f, phi_s>|^2 / ||phi^{3 omega} * f||^2`` over random ``f``.

    Each ``f`` is Gaussian noise restricted to the complement of
    ``{M 1_U > a}``, where ``M`` is the strong maximal function.
    """
    u = np.asarray(region, dtype=bool)
    if u.shape != shape:
        raise DomainError("region must match the grid shape")
    tiles = build_tiles_2d([rectangle], window, shape)
    family = tiles.families[0]
    one, two = family.first, family.second
    inside = u.reshape(one.count, one.block, two.count, two.block).all(axis=(1, 3))
    allowed = strong_maximal_array(u.astype(np.float64)) <= a
    n1, n2 = shape
    symbol = np.outer(
        _tripled_symbol(rectangle[0], window, n1), _tripled_symbol(rectangle[1], window, n2)
    )
    worst = 0.0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        x = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * allowed
        den = float(np.sum(np.abs(spectrum_of(x) * symbol) ** 2))
        if den == 0:
            continue
        num = float(np.sum(np.abs(family.coefficients(x)[inside]) ** 2))
        worst = max(worst, num / den)
    return worst
