"""The discrete torus: signals, spectra, frequency arcs and dyadic intervals.

Samples sit at ``x_j = j/n`` on a torus of total measure one, so every
spatial norm uses the normalized measure ``1/n`` per sample. Frequencies
are the integers in ``[-n/2, n/2)`` with counting measure and are stored
in that symmetric order. With these conventions Plancherel holds exactly::

    ||f||_2 = (1/n * sum |f(x_j)|^2)^(1/2) = (sum |f^(k)|^2)^(1/2)
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any
from typing import Callable
from typing import Iterator
from typing import Sequence
from typing import TypeAlias

import numpy as np
import numpy.typing as npt

from lp_tile_lab.errors import DomainError


logger = logging.getLogger(__name__)

ComplexArray: TypeAlias = npt.NDArray[np.complex128]
RealArray: TypeAlias = npt.NDArray[np.float64]
IntArray: TypeAlias = npt.NDArray[np.int64]
BoolArray: TypeAlias = npt.NDArray[np.bool_]
Norm: TypeAlias = float


def is_power_of_two(n: int) -> bool:
    """Return True if ``n`` is a positive power of two."""
    return n > 0 and n & (n - 1) == 0


def check_length(n: int, minimum: int = 8) -> None:
    """Raise DomainError unless ``n`` is a power of two no smaller than ``minimum``."""
    if not is_power_of_two(n) or n < minimum:
        raise DomainError(f"length {n} is not a power of two >= {minimum}")


def frequencies(n: int) -> IntArray:
    """Integer frequencies ``-n/2 .. n/2 - 1`` in symmetric order."""
    return np.arange(-(n // 2), n - n // 2, dtype=np.int64)


def signed_positions(n: int) -> IntArray:
    """Signed sample offsets from the origin, in storage order."""
    return np.fft.fftfreq(n, 1.0 / n).astype(np.int64)


def spectrum_of(samples: npt.ArrayLike) -> ComplexArray:
    """Fourier coefficients of ``samples`` in symmetric order (all axes)."""
    x = np.asarray(samples)
    return np.fft.fftshift(np.fft.fftn(x, norm="forward"))


def samples_of(coeffs: npt.ArrayLike) -> ComplexArray:
    """Inverse of :func:`spectrum_of`."""
    c = np.asarray(coeffs)
    return np.fft.ifftn(np.fft.ifftshift(c), norm="forward")


def apply_symbol(samples: npt.ArrayLike, symbol: npt.ArrayLike) -> ComplexArray:
    """Multiply the spectrum of ``samples`` by ``symbol`` (symmetric order).

    The symbol acts on the trailing axes of ``samples`` that it spans, so a
    stack of signals of shape ``(m, n)`` can share one symbol of length ``n``.
    """
    x = np.asarray(samples)
    s = np.asarray(symbol)
    axes = tuple(range(x.ndim - s.ndim, x.ndim))
    shifted = np.fft.ifftshift(s)
    return np.fft.ifftn(np.fft.fftn(x, axes=axes) * shifted, axes=axes)


def array_lp_norm(values: npt.ArrayLike, p: float) -> Norm:
    """L^p norm of an array of samples under the normalized counting measure."""
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    a = np.abs(np.asarray(values))
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    return float(np.mean(a**p) ** (1.0 / p))


def _frozen(values: npt.ArrayLike, ndim: int, name: str) -> npt.NDArray[Any]:
    a = np.array(values, copy=True)
    if a.ndim != ndim:
        raise DomainError(f"{name} must be {ndim}-dimensional, got shape {a.shape}")
    a = a.astype(np.complex128 if np.iscomplexobj(a) else np.float64)
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must be finite")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TorusSignal:
    """Samples of a function on the torus at the points ``j/n``."""

    samples: npt.NDArray[Any]

    def __post_init__(self) -> None:
        samples = _frozen(self.samples, 1, "samples")
        check_length(samples.shape[0])
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        """Number of samples."""
        return int(self.samples.shape[0])

    @classmethod
    def from_function(
        cls, n: int, func: Callable[[RealArray], npt.ArrayLike]
    ) -> TorusSignal:
        """Sample ``func`` at the grid points ``j/n``."""
        check_length(n)
        return cls(np.asarray(func(np.arange(n) / n)))

    @classmethod
    def constant(cls, n: int, value: complex = 1.0) -> TorusSignal:
        """The signal equal to VALUE at every sample."""
        return cls(np.full(n, value))

    @classmethod
    def indicator(cls, mask: npt.ArrayLike) -> TorusSignal:
        """The 0/1 signal of a boolean MASK over the samples."""
        return cls(np.asarray(mask, dtype=np.float64))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> TorusSignal:
        """A complex Gaussian signal."""
        return cls(rng.standard_normal(n) + 1j * rng.standard_normal(n))

    def __add__(self, other: TorusSignal) -> TorusSignal:
        return TorusSignal(self.samples + other.samples)

    def __sub__(self, other: TorusSignal) -> TorusSignal:
        return TorusSignal(self.samples - other.samples)

    def __mul__(self, scalar: complex) -> TorusSignal:
        return TorusSignal(self.samples * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> TorusSignal:
        return TorusSignal(-self.samples)

    def __abs__(self) -> TorusSignal:
        return TorusSignal(np.abs(self.samples))


@dataclass(frozen=True, eq=False)
class TorusSignal2:
    """Samples on the two-dimensional torus, axis lengths powers of two."""

    samples: npt.NDArray[Any]

    def __post_init__(self) -> None:
        samples = _frozen(self.samples, 2, "samples")
        for length in samples.shape:
            check_length(length)
        object.__setattr__(self, "samples", samples)

    @property
    def shape(self) -> tuple[int, int]:
        """Axis lengths ``(n1, n2)``."""
        n1, n2 = self.samples.shape
        return int(n1), int(n2)

    @classmethod
    def tensor(cls, first: TorusSignal, second: TorusSignal) -> TorusSignal2:
        """The separable signal ``g(x) h(y)``."""
        return cls(np.outer(first.samples, second.samples))

    @classmethod
    def random(cls, shape: tuple[int, int], rng: np.random.Generator) -> TorusSignal2:
        """A complex Gaussian signal of the given shape."""
        return cls(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Fourier coefficients indexed by ``k`` in ``[-n/2, n/2)``."""

    coeffs: npt.NDArray[Any]

    def __post_init__(self) -> None:
        coeffs = _frozen(self.coeffs, 1, "coeffs")
        check_length(coeffs.shape[0])
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def n(self) -> int:
        """Number of coefficients."""
        return int(self.coeffs.shape[0])

    def __getitem__(self, k: int) -> complex:
        """Coefficient at the integer frequency ``k``."""
        if not -(self.n // 2) <= k < self.n // 2:
            raise DomainError(f"frequency {k} outside [-{self.n // 2}, {self.n // 2})")
        return complex(self.coeffs[k + self.n // 2])


def dft(signal: TorusSignal) -> Spectrum:
    """Fourier coefficients ``f^(k) = 1/n sum_j f(x_j) e^{-2 pi i k x_j}``."""
    return Spectrum(spectrum_of(signal.samples))


def idft(spectrum: Spectrum) -> TorusSignal:
    """Synthesize ``f(x_j) = sum_k f^(k) e^{2 pi i k x_j}``."""
    return TorusSignal(samples_of(spectrum.coeffs))


def lp_norm(signal: TorusSignal | TorusSignal2, p: float) -> Norm:
    """Return ``||f||_p`` for the probability measure on the torus.

    >>> lp_norm(TorusSignal.constant(8, 3.0), 4)
    3.0
    """
    return array_lp_norm(signal.samples, p)


def spectral_norm(spectrum: Spectrum) -> Norm:
    """The counting-measure 2-norm of the coefficients."""
    return float(np.sqrt(np.sum(np.abs(spectrum.coeffs) ** 2)))


def inner(f: TorusSignal, g: TorusSignal) -> complex:
    """``<f, g> = 1/n sum f(x_j) conj(g(x_j))``."""
    return complex(np.mean(f.samples * np.conj(g.samples)))


@dataclass(frozen=True, order=True)
class FreqInterval:
    """The half-open integer arc ``[lo, hi)``."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if int(self.lo) != self.lo or int(self.hi) != self.hi:
            raise DomainError("interval endpoints must be integers")
        object.__setattr__(self, "lo", int(self.lo))
        object.__setattr__(self, "hi", int(self.hi))
        if self.lo >= self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi})")

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi})"

    @property
    def width(self) -> int:
        """Number of integer frequencies in the arc."""
        return self.hi - self.lo

    @property
    def center(self) -> float:
        """Midpoint ``(lo + hi) / 2``."""
        return (self.lo + self.hi) / 2

    def __contains__(self, k: object) -> bool:
        return isinstance(k, (int, np.integer)) and self.lo <= k < self.hi

    def check(self, n: int) -> None:
        """Raise DomainError unless the arc lies in ``[-n/2, n/2)``."""
        if self.lo < -(n // 2) or self.hi > n // 2:
            raise DomainError(f"{self} lies outside the frequency range of n={n}")

    @classmethod
    def full(cls, n: int) -> FreqInterval:
        """The whole frequency range ``[-n/2, n/2)``."""
        return cls(-(n // 2), n // 2)

    def indicator(self, n: int) -> BoolArray:
        """Boolean mask over ``frequencies(n)``."""
        k = frequencies(n)
        return (k >= self.lo) & (k < self.hi)

    def overlaps(self, other: FreqInterval) -> bool:
        """True when the two arcs share an integer frequency."""
        return self.lo < other.hi and other.lo < self.hi

    def is_within(self, other: FreqInterval) -> bool:
        """True when the arc is contained in OTHER."""
        return other.lo <= self.lo and self.hi <= other.hi

    def scaled(self, factor: float) -> FreqInterval:
        """Concentric dilation by ``factor``, rounded outward to integers."""
        if factor <= 0:
            raise DomainError("scale factor must be positive")
        centre2 = Fraction(self.lo + self.hi)
        span = Fraction(factor) * self.width
        return FreqInterval(math.floor((centre2 - span) / 2), math.ceil((centre2 + span) / 2))

    def clipped(self, n: int) -> FreqInterval:
        """The arc cut down to ``[-n/2, n/2)``."""
        return FreqInterval(max(self.lo, -(n // 2)), min(self.hi, n // 2))

    def shifted(self, k: int) -> FreqInterval:
        """The arc translated by K."""
        return FreqInterval(self.lo + k, self.hi + k)


FreqRectangle: TypeAlias = tuple[FreqInterval, FreqInterval]


@dataclass(frozen=True)
class IntervalCollection:
    """A finite family of pairwise disjoint frequency arcs."""

    intervals: tuple[FreqInterval, ...]

    def __post_init__(self) -> None:
        intervals = tuple(self.intervals)
        object.__setattr__(self, "intervals", intervals)
        ordered = sorted(intervals)
        for left, right in zip(ordered, ordered[1:]):
            if right.lo < left.hi:
                raise DomainError(f"overlapping intervals {left} and {right}")

    def __iter__(self) -> Iterator[FreqInterval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def check(self, n: int) -> None:
        """Raise DomainError unless every arc lies in ``[-n/2, n/2)``."""
        for omega in self.intervals:
            omega.check(n)

    def partitions(self, n: int) -> bool:
        """True when the arcs tile ``[-n/2, n/2)`` exactly."""
        ordered = sorted(self.intervals)
        if not ordered or ordered[0].lo != -(n // 2) or ordered[-1].hi != n // 2:
            return False
        return all(a.hi == b.lo for a, b in zip(ordered, ordered[1:]))

    def sorted(self) -> IntervalCollection:
        """The same arcs in increasing order."""
        return IntervalCollection(tuple(sorted(self.intervals)))

    @classmethod
    def full(cls, n: int) -> IntervalCollection:
        """The collection holding the whole frequency range."""
        return cls((FreqInterval.full(n),))

    @classmethod
    def unit_arcs(cls, lo: int, hi: int) -> IntervalCollection:
        """The singletons ``{k}`` for ``lo <= k < hi``."""
        return cls(tuple(FreqInterval(k, k + 1) for k in range(lo, hi)))

    @classmethod
    def from_breakpoints(cls, points: Sequence[int]) -> IntervalCollection:
        """Consecutive arcs between sorted distinct breakpoints."""
        return cls(tuple(FreqInterval(a, b) for a, b in zip(points, points[1:])))

    @classmethod
    def lacunary(cls, n: int) -> IntervalCollection:
        """Dyadic blocks ``[2^k, 2^{k+1})``, their mirrors and a centre block.

        The centre block ``[-1, 2)`` holds the zero frequency and the two
        unit singletons; the unpaired frequency ``-n/2`` joins the most
        negative block, so the collection partitions the full range.

        >>> [str(w) for w in IntervalCollection.lacunary(16)]
        ['[-8, -3)', '[-3, -1)', '[-1, 2)', '[2, 4)', '[4, 8)']
        """
        check_length(n)
        top = n.bit_length() - 3
        positive = [FreqInterval(2**k, 2 ** (k + 1)) for k in range(1, top + 1)]
        negative = [FreqInterval(1 - 2 ** (k + 1), 1 - 2**k) for k in range(1, top + 1)]
        negative[-1] = FreqInterval(-(n // 2), negative[-1].hi)
        blocks = sorted([*negative, FreqInterval(-1, 2), *positive])
        return cls(tuple(blocks))

    @classmethod
    def random_disjoint(
        cls, n: int, count: int, rng: np.random.Generator
    ) -> IntervalCollection:
        """``count`` disjoint arcs with random endpoints."""
        endpoints = np.arange(-(n // 2), n // 2 + 1)
        cuts = np.sort(rng.choice(endpoints, size=2 * count, replace=False))
        return cls(
            tuple(FreqInterval(int(a), int(b)) for a, b in zip(cuts[0::2], cuts[1::2]))
        )

    @classmethod
    def random_partition(
        cls, n: int, count: int, rng: np.random.Generator
    ) -> IntervalCollection:
        """A random partition of the full range into ``count`` arcs."""
        inner_points = rng.choice(frequencies(n)[1:], size=count - 1, replace=False)
        points = [-(n // 2), *sorted(int(k) for k in inner_points), n // 2]
        return cls.from_breakpoints(points)


def tensor_rectangles(
    first: IntervalCollection, second: IntervalCollection
) -> tuple[FreqRectangle, ...]:
    """All products ``w1 x w2``; disjoint whenever both factors are."""
    return tuple((a, b) for a in first for b in second)


def check_disjoint_rectangles(rectangles: Sequence[FreqRectangle]) -> None:
    """Raise DomainError if two frequency rectangles share an integer point."""
    for i, (a1, a2) in enumerate(rectangles):
        for b1, b2 in rectangles[i + 1 :]:
            if a1.overlaps(b1) and a2.overlaps(b2):
                raise DomainError(f"overlapping rectangles {a1}x{a2} and {b1}x{b2}")


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """``[j 2^-k, (j+1) 2^-k)`` inside the torus ``[0, 1)``."""

    level: int
    offset: int

    def __post_init__(self) -> None:
        if self.level < 0 or not 0 <= self.offset < 2**self.level:
            raise DomainError(f"invalid dyadic interval ({self.level}, {self.offset})")

    def __str__(self) -> str:
        return f"[{self.start:g}, {self.end:g})"

    @property
    def length(self) -> float:
        """``2^-level``."""
        return 2.0**-self.level

    @property
    def start(self) -> float:
        """Left endpoint."""
        return self.offset * self.length

    @property
    def end(self) -> float:
        """Right endpoint, excluded."""
        return (self.offset + 1) * self.length

    @property
    def center(self) -> float:
        """Midpoint."""
        return (self.offset + 0.5) * self.length

    def check(self, n: int) -> None:
        """Raise DomainError if the interval holds no sample of a grid of size N."""
        if 2**self.level > n:
            raise DomainError(f"{self} is finer than the grid of n={n}")

    def sample_slice(self, n: int) -> slice:
        """The samples of a grid of size ``n`` lying in the interval."""
        self.check(n)
        step = n >> self.level
        return slice(self.offset * step, (self.offset + 1) * step)

    def contains(self, other: DyadicInterval) -> bool:
        """True when OTHER is this interval or one of its descendants."""
        shift = other.level - self.level
        return shift >= 0 and other.offset >> shift == self.offset

    def parent(self) -> DyadicInterval:
        """The dyadic interval of twice the length containing this one."""
        if self.level == 0:
            raise DomainError("the unit interval has no parent")
        return DyadicInterval(self.level - 1, self.offset >> 1)

    def children(self) -> tuple[DyadicInterval, DyadicInterval]:
        """The left and right halves."""
        return (
            DyadicInterval(self.level + 1, 2 * self.offset),
            DyadicInterval(self.level + 1, 2 * self.offset + 1),
        )

    @classmethod
    def at_level(cls, level: int) -> Iterator[DyadicInterval]:
        """All ``2^level`` intervals of one level, left to right."""
        for offset in range(2**level):
            yield cls(level, offset)


def max_level(n: int) -> int:
    """The finest dyadic level with at least one sample per interval."""
    return n.bit_length() - 1


class SymmetryKind(Enum):
    """The three symmetry operators of the torus."""

    Modulate = "modulate"
    Translate = "translate"
    Dilate = "dilate"


def modulate(signal: TorusSignal, xi: int) -> TorusSignal:
    """``Mod_xi f(x) = e^{2 pi i xi x} f(x)``; shifts the spectrum by ``xi``."""
    if int(xi) != xi:
        raise DomainError(f"modulation frequency must be an integer, got {xi}")
    n = signal.n
    phase = np.exp(2j * np.pi * (int(xi) % n) * np.arange(n) / n)
    return TorusSignal(signal.samples * phase)


def translate(signal: TorusSignal, y: float) -> TorusSignal:
    """``Tr_y f(x) = f(x - y)`` for a grid point ``y``."""
    n = signal.n
    steps = y * n
    if not math.isclose(steps, round(steps), abs_tol=1e-9):
        raise DomainError(f"translation {y} is not a multiple of 1/{n}")
    return TorusSignal(np.roll(signal.samples, int(round(steps))))


def _dyadic_exponent(lam: float, n: int) -> int:
    if lam <= 0:
        raise DomainError(f"dilation scale must be positive, got {lam}")
    a = math.log2(lam)
    if not a.is_integer() or 2 ** abs(int(a)) > n // 2:
        raise DomainError(f"dilation scale {lam} is not a power of two compatible with n={n}")
    return int(a)


def dilate(signal: TorusSignal, lam: float, p: float = 2.0) -> TorusSignal:
    """``Dil^p_lam f(x) = lam^{-1/p} f(x / lam)`` about the origin.

    For ``lam > 1`` each sample is held over ``lam`` grid points, which
    requires the signal to vanish outside ``|x| < 1/(2 lam)``; the result is
    then an exact L^p isometry. For ``lam < 1`` the signal is decimated into
    ``|x| < lam/2``, which is the exact inverse of the expansion.
    """
    n = signal.n
    a = _dyadic_exponent(lam, n)
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    scale = 1.0 if math.isinf(p) else lam ** (-1.0 / p)
    x = signal.samples
    pos = signed_positions(n)
    if a >= 0:
        factor = 1 << a
        half = n // (2 * factor)
        outside = (pos < -half) | (pos >= half)
        if np.any(x[outside] != 0):
            raise DomainError(
                f"signal support does not fit in |x| < {half}/{n} for dilation by {lam}"
            )
        return TorusSignal(scale * x[np.floor_divide(pos, factor) % n])
    factor = 1 << -a
    half = n // (2 * factor)
    inside = (pos >= -half) & (pos < half)
    out = np.zeros_like(x)
    out[inside] = scale * x[(pos[inside] * factor) % n]
    return TorusSignal(out)


def symmetry(
    signal: TorusSignal, kind: SymmetryKind, value: float, p: float = 2.0
) -> TorusSignal:
    """Apply one of the symmetry operators selected by ``kind``."""
    if kind is SymmetryKind.Modulate:
        return modulate(signal, int(value))
    if kind is SymmetryKind.Translate:
        return translate(signal, value)
    return dilate(signal, value, p)
