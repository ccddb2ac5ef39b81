"""Fourier multipliers, L^p norm estimates and the two counterexample families."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence
from typing import Union

import numpy as np
import numpy.typing as npt

from lp_tile_lab.errors import DomainError
from lp_tile_lab.grid import ComplexArray
from lp_tile_lab.grid import FreqInterval
from lp_tile_lab.grid import IntervalCollection
from lp_tile_lab.grid import TorusSignal
from lp_tile_lab.grid import apply_symbol
from lp_tile_lab.grid import array_lp_norm
from lp_tile_lab.grid import check_length
from lp_tile_lab.grid import frequencies
from lp_tile_lab.grid import samples_of
from lp_tile_lab.projections import smooth_bump
from lp_tile_lab.projections import square_sharp
from lp_tile_lab.variation import StepMultiplier
from lp_tile_lab.variation import var_q
from lp_tile_lab.variation import vq_norm


logger = logging.getLogger(__name__)

Multiplier = Union[StepMultiplier, npt.ArrayLike]


def symbol_of(m: Multiplier, n: int) -> ComplexArray:
    """Sample a multiplier at the ``n`` grid frequencies in symmetric order."""
    if isinstance(m, StepMultiplier):
        if m.domain != FreqInterval.full(n):
            raise DomainError(f"multiplier domain {m.domain} is not the full range of n={n}")
        return m.sample(n)
    symbol = np.asarray(m, dtype=np.complex128)
    if symbol.shape != (n,):
        raise DomainError(f"multiplier must have shape ({n},), got {symbol.shape}")
    if not np.all(np.isfinite(symbol)):
        raise DomainError("multiplier values must be finite")
    return symbol


def _length(m: Multiplier, n: int | None) -> int:
    if n is not None:
        return n
    if isinstance(m, StepMultiplier):
        return m.domain.width
    return int(np.asarray(m).shape[0])


def apply_multiplier(f: TorusSignal, m: Multiplier) -> TorusSignal:
    """``A_m f``, the pointwise product of the spectrum of ``f`` with ``m``."""
    return TorusSignal(apply_symbol(f.samples, symbol_of(m, f.n)))


def norm_ratio(m: Multiplier, f: TorusSignal, p: float) -> float:
    """``||A_m f||_p / ||f||_p``."""
    denominator = array_lp_norm(f.samples, p)
    if denominator == 0:
        return 0.0
    return array_lp_norm(apply_multiplier(f, m).samples, p) / denominator


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``; nan when undetermined."""
    x = np.log(np.asarray(xs, dtype=np.float64))
    y = np.asarray(ys, dtype=np.float64)
    if x.size < 2 or np.ptp(x) == 0 or np.any(y <= 0):
        return math.nan
    return float(np.polyfit(x, np.log(y), 1)[0])


@dataclass(frozen=True, eq=False)
class NormEstimate:
    """A lower bound for ``||A_m||_p`` together with the signal attaining it."""

    value: float
    witness: TorusSignal
    p: float
    history: tuple[float, ...]


def _dual(values: ComplexArray, p: float) -> ComplexArray:
    """``|x|^{p-1} sign(x)``, the direction of the dual witness in ``L^{p'}``."""
    magnitude = np.abs(values)
    phase = np.where(magnitude > 0, values / np.where(magnitude > 0, magnitude, 1.0), 0.0)
    return magnitude ** (p - 1) * phase


def _normalized(values: ComplexArray, p: float) -> ComplexArray:
    norm = array_lp_norm(values, p)
    return values / norm if norm > 0 else values


def op_norm_p(
    m: Multiplier,
    p: float,
    n: int | None = None,
    restarts: int = 20,
    iters: int = 200,
    seed: int = 0,
    tol: float = 1e-10,
) -> NormEstimate:
    """Estimate ``||A_m||_{L^p -> L^p}`` from below.

    For ``p = 2`` the value is exactly ``max |m|``. Otherwise each restart runs
    the fixed-point iteration ``f <- dual_{p'}(A_m^* dual_p(A_m f))`` from a
    random start, renormalizing in ``L^p``. ``history`` holds the best ratio
    after every iteration and never decreases.
    """
    if not 1 < p < math.inf:
        raise DomainError(f"p must lie in (1, inf), got {p}")
    size = _length(m, n)
    check_length(size)
    symbol = symbol_of(m, size)
    if p == 2:
        k = int(np.argmax(np.abs(symbol)))
        spectrum = np.zeros(size, dtype=np.complex128)
        spectrum[k] = 1.0
        witness = TorusSignal(samples_of(spectrum))
        value = norm_ratio(symbol, witness, p)
        return NormEstimate(value, witness, p, (value,))
    adjoint = np.conj(symbol)
    dual = p / (p - 1)
    best_value, best_samples = -1.0, np.zeros(size, dtype=np.complex128)
    history = []
    for restart in range(restarts):
        rng = np.random.default_rng([seed, restart])
        x = _normalized(rng.standard_normal(size) + 1j * rng.standard_normal(size), p)
        previous = 0.0
        for _ in range(iters):
            y = apply_symbol(x, symbol)
            ratio = array_lp_norm(y, p)
            if ratio > best_value:
                best_value, best_samples = ratio, x
            history.append(best_value)
            z = apply_symbol(_dual(y, p), adjoint)
            x = _normalized(_dual(z, dual), p)
            if abs(ratio - previous) <= tol * max(ratio, 1.0):
                break
            previous = ratio
        logger.debug("restart %d: best %.6g after %d steps", restart, best_value, len(history))
    witness = TorusSignal(best_samples)
    value = norm_ratio(symbol, witness, p)
    return NormEstimate(value, witness, p, tuple(history))


@dataclass(frozen=True)
class DualityReport:
    """Norm estimates at ``p`` and at the dual exponent for the adjoint."""

    p: float
    dual: float
    value: float
    dual_value: float

    @property
    def gap(self) -> float:
        """Relative difference of the two estimates, 0 when both vanish."""
        top = max(self.value, self.dual_value)
        return abs(self.value - self.dual_value) / top if top > 0 else 0.0


def duality_check(
    m: Multiplier, p: float, n: int | None = None, restarts: int = 20, iters: int = 200, seed: int = 0
) -> DualityReport:
    """Estimate ``||T_m||_{p->p}`` and ``||T_{conj m}||_{p'->p'}`` with the same seed.

    The two agree for an exact operator norm, so ``gap`` measures how far the
    search is from converging.
    """
    size = _length(m, n)
    symbol = symbol_of(m, size)
    dual = p / (p - 1)
    value = op_norm_p(symbol, p, size, restarts, iters, seed).value
    dual_value = op_norm_p(np.conj(symbol), dual, size, restarts, iters, seed).value
    return DualityReport(p, dual, value, dual_value)


@dataclass(frozen=True)
class CrsReport:
    """``||A_m||_p`` against the largest ``V_q`` norm over lacunary blocks."""

    p: float
    q: float
    lhs_estimate: float
    rhs: float

    @property
    def ratio(self) -> float:
        """``lhs_estimate / rhs``, 0 when the lacunary norm vanishes."""
        return self.lhs_estimate / self.rhs if self.rhs > 0 else 0.0


def lacunary_vq(symbol: ComplexArray, q: float) -> float:
    """``sup_I ||m restricted to I||_{V_q}`` over the lacunary blocks of the grid."""
    n = symbol.shape[0]
    offset = n // 2
    return max(
        vq_norm(symbol[block.lo + offset : block.hi + offset], q)
        for block in IntervalCollection.lacunary(n)
    )


def crs_check(
    m: Multiplier,
    p: float,
    q: float,
    n: int | None = None,
    restarts: int = 20,
    iters: int = 200,
    seed: int = 0,
) -> CrsReport:
    """Compare the estimated ``L^p`` norm with the lacunary ``V_q`` norm of ``m``.

    Requires ``|1/2 - 1/p| < 1/q``.
    """
    if not 1 < p < math.inf or not q > 0:
        raise DomainError(f"p must lie in (1, inf) and q be positive, got p={p}, q={q}")
    if not abs(0.5 - 1.0 / p) < 1.0 / q:
        raise DomainError(f"|1/2 - 1/p| < 1/q fails for p={p}, q={q}")
    size = _length(m, n)
    symbol = symbol_of(m, size)
    estimate = op_norm_p(symbol, p, size, restarts, iters, seed)
    return CrsReport(p, q, estimate.value, lacunary_vq(symbol, q))


def refined_lacunary(n: int, cells: int) -> IntervalCollection:
    """Each lacunary block split into at most ``cells`` consecutive arcs."""
    if cells < 1:
        raise DomainError(f"each block needs at least one cell, got {cells}")
    arcs = []
    for block in IntervalCollection.lacunary(n):
        for part in np.array_split(np.arange(block.lo, block.hi), min(cells, block.width)):
            arcs.append(FreqInterval(int(part[0]), int(part[-1]) + 1))
    return IntervalCollection(tuple(arcs))


@dataclass(frozen=True)
class DecoupleReport:
    """``||A_m||_p`` for step multipliers on refined lacunary partitions."""

    p: float
    q: float
    rows: tuple[tuple[int, float, float], ...]
    slope: float
    constant: float


def decouple_check(
    n: int,
    p: float,
    q: float,
    cells: Sequence[int] = (1, 2, 4, 8, 16),
    coefficients: str = "signs",
    seed: int = 0,
    restarts: int = 8,
    iters: int = 100,
) -> DecoupleReport:
    """Measure how the norm grows with the number of cells per lacunary block.

    ``coefficients`` is ``ones`` or ``signs`` (independent random signs per
    cell). Rows are ``(cells, estimate, sup |a|)``; the constant is the
    largest ``estimate / (cells^{1/q} sup |a|)``.
    """
    if coefficients not in ("ones", "signs"):
        raise DomainError(f"unknown coefficient family {coefficients!r}")
    rows = []
    for count in cells:
        arcs = refined_lacunary(n, count)
        rng = np.random.default_rng([seed, count])
        if coefficients == "ones":
            values = np.ones(len(arcs))
        else:
            values = rng.choice([-1.0, 1.0], size=len(arcs))
        m = StepMultiplier.from_blocks(arcs, values)
        estimate = op_norm_p(m, p, n, restarts, iters, seed)
        rows.append((int(count), estimate.value, float(np.abs(values).max())))
    slope = loglog_slope([r[0] for r in rows], [r[1] for r in rows]) if len(rows) > 1 else 0.0
    constant = max(value / (count ** (1.0 / q) * top) for count, value, top in rows)
    return DecoupleReport(p, q, tuple(rows), slope, constant)


@dataclass(frozen=True)
class RubioReport:
    """Ratios ``||S f||_p / ||f||_p`` for ``f^ = 1_[0, N)`` and unit arcs."""

    p: float
    n: int
    rows: tuple[tuple[int, float, float, float], ...]
    slope: float
    norm_exponent: float
    witness_constant: float


def counterexample_rubio(n_values: Sequence[int], p: float, n: int = 2**14) -> RubioReport:
    """Square function over unit arcs of a Dirichlet kernel below ``L^2``.

    Rows are ``(N, ratio, ||f||_p, S f(0) / sqrt N)``. ``norm_exponent`` is
    the fitted growth of ``||f||_p`` in ``N``.
    """
    if not 1 < p < 2:
        raise DomainError(f"the counterexample needs 1 < p < 2, got {p}")
    check_length(n)
    rows = []
    for count in n_values:
        if not 1 <= count <= n // 4:
            raise DomainError(f"N must lie in [1, n/4] = [1, {n // 4}], got {count}")
        band = FreqInterval(0, count)
        f = TorusSignal(samples_of(band.indicator(n).astype(np.complex128)))
        square = square_sharp(f, IntervalCollection.unit_arcs(0, count))
        f_norm = array_lp_norm(f.samples, p)
        ratio = array_lp_norm(square.samples, p) / f_norm
        witness = float(np.abs(square.samples[0])) / math.sqrt(count)
        rows.append((int(count), ratio, f_norm, witness))
        logger.info("rubio N=%d: ratio %.6g", count, ratio)
    counts = [r[0] for r in rows]
    return RubioReport(
        p=p,
        n=n,
        rows=tuple(rows),
        slope=loglog_slope(counts, [r[1] for r in rows]),
        norm_exponent=loglog_slope(counts, [r[2] for r in rows]),
        witness_constant=min((r[3] for r in rows), default=math.nan),
    )


def bump_train(
    signs: npt.ArrayLike, spacing: int, n: int, support: float = 0.5
) -> ComplexArray:
    """``sum_k eps_k psi^(. - (k - 1/2) spacing)`` with a smooth bump ``psi^``.

    The bump has plateau ``support/2`` and support ``support`` in units of
    ``spacing``.
    """
    if not 0 < support < 1:
        raise DomainError(f"bumps with support {support} x spacing overlap")
    eps = np.asarray(signs, dtype=np.float64)
    half, core = support * spacing / 2, support * spacing / 4
    k = frequencies(n)
    symbol = np.zeros(n)
    for index, sign in enumerate(eps, start=1):
        centre = (index - 0.5) * spacing
        if centre + half > n // 2:
            raise DomainError(f"bump {index} leaves the grid of n={n}")
        symbol += sign * smooth_bump(k, (centre - core, centre + core), (centre - half, centre + half))
    return symbol.astype(np.complex128)


@dataclass(frozen=True)
class MultiplierCounterReport:
    """Witness ratios for random-sign bump multipliers.

    Rows are ``(N, best ratio, mean ||A_m f||_p / sqrt N, var_q of m)``.
    """

    p: float
    q: float
    exponent: float
    rows: tuple[tuple[int, float, float, float], ...]
    slope: float


def counterexample_multiplier(
    n_values: Sequence[int],
    p: float,
    trials: int,
    seed: int,
    spacing: int = 16,
    n: int | None = None,
    q: float = 2.0,
    support: float = 0.5,
) -> MultiplierCounterReport:
    """Show that ``||A_m||_p`` grows like ``N^{|1/2 - 1/p|}`` for bounded ``V_q``-scale multipliers.

    The witness is ``f^ = 1_[0, N spacing)``. The multiplier is real, so the
    ratio is taken at ``min(p, p')``, where the growth is visible.
    """
    if p == 2 or not 1 < p < math.inf:
        raise DomainError(f"the counterexample needs p in (1, inf) other than 2, got {p}")
    largest = max(n_values)
    size = n or 2 ** math.ceil(math.log2(4 * largest * spacing))
    check_length(size)
    exponent = min(p, p / (p - 1))
    rows = []
    for count in n_values:
        f = TorusSignal(samples_of(FreqInterval(0, count * spacing).indicator(size).astype(np.complex128)))
        f_norm = array_lp_norm(f.samples, exponent)
        best, total, variation = 0.0, 0.0, 0.0
        for trial in range(trials):
            rng = np.random.default_rng([seed, count, trial])
            symbol = bump_train(rng.choice([-1.0, 1.0], size=count), spacing, size, support)
            out = apply_symbol(f.samples, symbol)
            best = max(best, array_lp_norm(out, exponent) / f_norm)
            total += array_lp_norm(out, p)
            offset = size // 2
            marks = np.arange(0, 2 * count + 1) * spacing // 2 + offset
            variation = max(variation, var_q(symbol[marks], q))
        rows.append((int(count), best, total / trials / math.sqrt(count), variation))
        logger.info("multiplier N=%d: witness %.6g", count, best)
    slope = loglog_slope([r[0] for r in rows], [r[1] for r in rows])
    return MultiplierCounterReport(p, q, exponent, tuple(rows), slope)
