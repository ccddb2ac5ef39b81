"""Fourier projections, maximal functions, windows and square functions."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterator
from typing import Sequence

import numpy as np
import numpy.typing as npt

from lp_tile_lab.errors import DomainError
from lp_tile_lab.grid import ComplexArray
from lp_tile_lab.grid import FreqInterval
from lp_tile_lab.grid import FreqRectangle
from lp_tile_lab.grid import IntervalCollection
from lp_tile_lab.grid import RealArray
from lp_tile_lab.grid import Spectrum
from lp_tile_lab.grid import TorusSignal
from lp_tile_lab.grid import TorusSignal2
from lp_tile_lab.grid import apply_symbol
from lp_tile_lab.grid import array_lp_norm
from lp_tile_lab.grid import check_disjoint_rectangles
from lp_tile_lab.grid import frequencies
from lp_tile_lab.grid import idft
from lp_tile_lab.well import overlap_bound


logger = logging.getLogger(__name__)

#: Number of frequency bands synthesized per batched inverse FFT.
BAND_CHUNK = 256

#: Overlap of concentric triples below which a collection is well distributed.
WELL_DISTRIBUTED_BOUND = 100


def project(f: TorusSignal, omega: FreqInterval) -> TorusSignal:
    """The Fourier restriction ``S_omega f``."""
    omega.check(f.n)
    return TorusSignal(apply_symbol(f.samples, omega.indicator(f.n)))


def hilbert_symbol(n: int) -> ComplexArray:
    """``-i sign(k)``, zero at ``k = 0`` and at the unpaired ``k = -n/2``."""
    k = frequencies(n)
    symbol = -1j * np.sign(k).astype(np.complex128)
    symbol[0] = 0.0
    return symbol


def hilbert(f: TorusSignal) -> TorusSignal:
    """The periodic Hilbert transform."""
    return TorusSignal(apply_symbol(f.samples, hilbert_symbol(f.n)))


def _centered_means(values: RealArray, axis: int) -> Iterator[RealArray]:
    """Averages over centred cyclic windows of every radius along ``axis``.

    The last window is the full period, whose mean counts every sample once.
    """
    a = np.moveaxis(values, axis, -1)
    n = a.shape[-1]
    yield np.moveaxis(a, -1, axis)
    if n == 1:
        return
    tripled = np.concatenate([a, a, a], axis=-1)
    zeros = np.zeros(a.shape[:-1] + (1,))
    sums = np.concatenate([zeros, np.cumsum(tripled, axis=-1)], axis=-1)
    idx = np.arange(n)
    for r in range(1, n // 2):
        window = sums[..., idx + r + n + 1] - sums[..., idx - r + n]
        yield np.moveaxis(window / (2 * r + 1), -1, axis)
    full = np.broadcast_to(a.mean(axis=-1, keepdims=True), a.shape)
    yield np.moveaxis(full, -1, axis)


def maximal_array(values: npt.ArrayLike) -> RealArray:
    """Centred Hardy-Littlewood maximal function of a 1D array, radii 0..n/2.

    Radii below ``n/2`` average ``2r + 1`` samples. The radius ``n/2`` window
    is the whole torus, so it is taken as the global mean and the antipodal
    sample is counted once.
    """
    a = np.abs(np.asarray(values, dtype=np.complex128))
    out = np.zeros(a.shape)
    for means in _centered_means(a, -1):
        np.maximum(out, means, out=out)
    return out


def strong_maximal_array(values: npt.ArrayLike) -> RealArray:
    """Strong maximal function over centred axis-parallel windows of a 2D array."""
    a = np.abs(np.asarray(values, dtype=np.complex128))
    if a.ndim != 2:
        raise DomainError("the strong maximal function needs a 2D array")
    out = np.zeros(a.shape)
    for row_means in _centered_means(a, 0):
        for means in _centered_means(row_means, 1):
            np.maximum(out, means, out=out)
    return out


def maximal(f: TorusSignal | TorusSignal2) -> TorusSignal | TorusSignal2:
    """Centred maximal function in 1D, strong maximal function in 2D."""
    if isinstance(f, TorusSignal2):
        return TorusSignal2(strong_maximal_array(f.samples))
    return TorusSignal(maximal_array(f.samples))


def _bands(samples: ComplexArray, omegas: Sequence[FreqInterval]) -> Iterator[ComplexArray]:
    """Yield ``S_omega f`` for batches of arcs, one row per arc."""
    n = samples.shape[-1]
    spectrum = np.fft.fft(samples)
    k = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
    for start in range(0, len(omegas), BAND_CHUNK):
        chunk = omegas[start : start + BAND_CHUNK]
        lo = np.array([w.lo for w in chunk])[:, None]
        hi = np.array([w.hi for w in chunk])[:, None]
        masks = (k[None, :] >= lo) & (k[None, :] < hi)
        yield np.fft.ifft(spectrum[None, :] * masks, axis=-1)


def square_sharp(f: TorusSignal, omegas: IntervalCollection) -> TorusSignal:
    """The rough square function ``(sum |S_omega f|^2)^{1/2}``."""
    omegas.check(f.n)
    total = np.zeros(f.n)
    for band in _bands(np.asarray(f.samples, dtype=np.complex128), omegas.intervals):
        total += np.sum(np.abs(band) ** 2, axis=0)
    return TorusSignal(np.sqrt(total))


def square_lq(f: TorusSignal, omegas: IntervalCollection, q: float) -> TorusSignal:
    """The ``l^q`` variant ``(sum |S_omega f|^q)^{1/q}``; ``q = inf`` takes the max."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    omegas.check(f.n)
    total = np.zeros(f.n)
    for band in _bands(np.asarray(f.samples, dtype=np.complex128), omegas.intervals):
        if math.isinf(q):
            np.maximum(total, np.abs(band).max(axis=0), out=total)
        else:
            total += np.sum(np.abs(band) ** q, axis=0)
    return TorusSignal(total if math.isinf(q) else total ** (1.0 / q))


def square_sharp_2d(
    f: TorusSignal2, rectangles: Sequence[FreqRectangle]
) -> TorusSignal2:
    """The rough square function over disjoint frequency rectangles."""
    check_disjoint_rectangles(rectangles)
    n1, n2 = f.shape
    total = np.zeros((n1, n2))
    for first, second in rectangles:
        first.check(n1)
        second.check(n2)
        mask = np.outer(first.indicator(n1), second.indicator(n2))
        total += np.abs(apply_symbol(f.samples, mask)) ** 2
    return TorusSignal2(np.sqrt(total))


def _transition(t: RealArray) -> RealArray:
    """``g(t) / (g(t) + g(1 - t))`` with ``g(t) = exp(-1/t)`` for ``t > 0``."""

    def g(s: RealArray) -> RealArray:
        positive = s > 0
        return np.where(positive, np.exp(-1.0 / np.where(positive, s, 1.0)), 0.0)

    rising, falling = g(t), g(1.0 - t)
    return rising / (rising + falling)


def smooth_bump(
    k: npt.ArrayLike, plateau: tuple[float, float], support: tuple[float, float]
) -> RealArray:
    """A profile equal to 1 on ``[a, b]`` and 0 outside ``(A, B)``.

    The two transition bands use the infinite-order smoothstep, so the
    profile is monotone on each band and even about the common centre when
    the plateau and support are concentric.
    """
    a, b = plateau
    lo, hi = support
    if not lo < a <= b < hi:
        raise DomainError(f"plateau {plateau} is not strictly inside support {support}")
    x = np.asarray(k, dtype=np.float64)
    left = _transition((x - lo) / (a - lo))
    right = _transition((hi - x) / (hi - b))
    return np.minimum(left, right)


@dataclass(frozen=True, eq=False)
class Window:
    """Frequency profile ``phi^`` sandwiched between two arcs."""

    n: int
    hat: RealArray
    plateau: FreqInterval
    support: FreqInterval

    @property
    def ratio(self) -> float:
        """Support width over plateau width."""
        return self.support.width / self.plateau.width

    @property
    def sharp(self) -> bool:
        """True for an indicator window."""
        return self.plateau == self.support

    def l2_norm(self) -> float:
        """``||phi||_2``, by Plancherel the l^2 norm of the profile."""
        return float(np.sqrt(np.sum(self.hat**2)))

    def signal(self) -> TorusSignal:
        """The kernel ``phi`` on the torus."""
        return idft(Spectrum(self.hat))

    def transported(self, omega: FreqInterval, n: int) -> RealArray:
        """The profile moved to ``omega``: plateau ``omega``, support scaled by ``ratio``.

        Values stay in ``[0, 1]``; frequencies outside the grid are dropped.
        """
        k = frequencies(n)
        if self.sharp:
            return ((k >= omega.lo) & (k < omega.hi)).astype(np.float64)
        support = omega.scaled(self.ratio)
        return smooth_bump(k, (omega.lo, omega.hi), (support.lo, support.hi))

    @classmethod
    def indicator(cls, plateau: FreqInterval, n: int) -> Window:
        """A sharp window, ``phi^ = 1_plateau``."""
        plateau.check(n)
        hat = plateau.indicator(n).astype(np.float64)
        return cls(n, hat, plateau, plateau)


def make_window(plateau: FreqInterval, support: FreqInterval, n: int) -> Window:
    """Build a smooth window with ``1_plateau <= phi^ <= 1_support``."""
    support.check(n)
    if not (support.lo < plateau.lo and plateau.hi < support.hi):
        raise DomainError(f"plateau {plateau} is not strictly inside support {support}")
    hat = smooth_bump(frequencies(n), (plateau.lo, plateau.hi), (support.lo, support.hi))
    hat.setflags(write=False)
    return Window(n, hat, plateau, support)


def default_window(n: int) -> Window:
    """The window with plateau ``[-4, 4)`` and support ``[-8, 8)``."""
    return make_window(FreqInterval(-4, 4), FreqInterval(-8, 8), n)


@dataclass(frozen=True, eq=False)
class SmoothSquare:
    """Result of :func:`square_smooth`."""

    signal: TorusSignal
    constant: float
    overlap: int
    well_distributed: bool
    overridden: bool


def square_smooth(
    f: TorusSignal,
    omegas: IntervalCollection,
    window: Window,
    override: bool = False,
) -> SmoothSquare:
    """The smooth square function ``G f = (sum |phi^omega * f|^2)^{1/2}``.

    Each ``phi^omega`` is the window transported to ``omega``; the returned
    constant ``sup_k sum_omega |phi^omega^(k)|^2`` bounds ``||G||_{2 -> 2}``.
    """
    n = f.n
    omegas.check(n)
    overlap = overlap_bound(omegas, n)
    well = overlap <= WELL_DISTRIBUTED_BOUND
    if not well and not override:
        logger.warning("collection is not well distributed (overlap %d)", overlap)
    total = np.zeros(n)
    coverage = np.zeros(n)
    for omega in omegas:
        profile = window.transported(omega, n)
        coverage += profile**2
        total += np.abs(apply_symbol(f.samples, profile)) ** 2
    return SmoothSquare(
        signal=TorusSignal(np.sqrt(total)),
        constant=float(coverage.max()) if len(omegas) else 0.0,
        overlap=overlap,
        well_distributed=well,
        overridden=override,
    )


def khintchine_profiles(n: int) -> list[tuple[int, int, RealArray]]:
    """The G-function profiles ``(scale, sign, psi^)`` representable on the grid.

    At scale ``j`` the positive profile has plateau ``[2^j, 2^{j+1}]`` and
    support ``(2^{j-1}, 5 * 2^{j-1})``; the negative one is its mirror.
    """
    k = frequencies(n)
    profiles = []
    j = 0
    while 5 * 2**j <= n:
        positive = smooth_bump(k, (2**j, 2 ** (j + 1)), (2 ** (j - 1), 5 * 2 ** (j - 1)))
        profiles.append((j, 1, positive))
        profiles.append((j, -1, smooth_bump(-k, (2**j, 2 ** (j + 1)), (2 ** (j - 1), 5 * 2 ** (j - 1)))))
        j += 1
    return profiles


@dataclass(frozen=True)
class KhintchineReport:
    """Random-sign kernel and G-function ratios."""

    exponents: tuple[float, ...]
    trial_ratios: tuple[float, ...]
    max_ratio: float
    min_ratio: float
    gfunction_ratios: dict[float, float]
    scales: int


def khintchine_gfunction(
    f: TorusSignal,
    trials: int,
    seed: int,
    exponents: Sequence[float] = (2.0, 3.0, 4.0),
    signs: npt.ArrayLike | None = None,
) -> KhintchineReport:
    """Random-sign kernels ``K = sum eps psi`` against the dyadic G-function.

    Each trial draws independent signs (or uses ``signs``), applies ``K`` by
    convolution and records ``max_p ||K*f||_p / ||f||_p``.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    profiles = khintchine_profiles(f.n)
    stack = np.array([profile for _, _, profile in profiles])
    norms = {p: array_lp_norm(f.samples, p) for p in exponents}
    if any(value == 0 for value in norms.values()):
        raise DomainError("f must be nonzero")
    ratios = []
    for trial in range(trials):
        if signs is None:
            rng = np.random.default_rng([seed, trial])
            eps = rng.choice([-1.0, 1.0], size=len(profiles))
        else:
            eps = np.asarray(signs, dtype=np.float64)
        kernel = eps @ stack
        out = apply_symbol(f.samples, kernel)
        ratios.append(max(array_lp_norm(out, p) / norms[p] for p in exponents))
        logger.debug("khintchine trial %d ratio %.6g", trial, ratios[-1])
    bands = np.array([apply_symbol(f.samples, profile) for profile in stack])
    g = np.sqrt(np.sum(np.abs(bands) ** 2, axis=0))
    return KhintchineReport(
        exponents=tuple(exponents),
        trial_ratios=tuple(ratios),
        max_ratio=max(ratios),
        min_ratio=min(ratios),
        gfunction_ratios={p: array_lp_norm(g, p) / norms[p] for p in exponents},
        scales=len(profiles) // 2,
    )
