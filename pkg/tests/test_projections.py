"""Test cases for the projections module."""
import logging
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st

from lp_tile_lab.errors import DomainError
from lp_tile_lab.grid import FreqInterval
from lp_tile_lab.grid import IntervalCollection
from lp_tile_lab.grid import TorusSignal
from lp_tile_lab.grid import TorusSignal2
from lp_tile_lab.grid import array_lp_norm
from lp_tile_lab.grid import dft
from lp_tile_lab.grid import frequencies
from lp_tile_lab.grid import lp_norm
from lp_tile_lab.grid import tensor_rectangles
from lp_tile_lab.grid import translate
from lp_tile_lab.projections import Window
from lp_tile_lab.projections import default_window
from lp_tile_lab.projections import hilbert
from lp_tile_lab.projections import khintchine_gfunction
from lp_tile_lab.projections import khintchine_profiles
from lp_tile_lab.projections import make_window
from lp_tile_lab.projections import maximal
from lp_tile_lab.projections import project
from lp_tile_lab.projections import smooth_bump
from lp_tile_lab.projections import square_lq
from lp_tile_lab.projections import square_sharp
from lp_tile_lab.projections import square_sharp_2d
from lp_tile_lab.projections import square_smooth


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def signal() -> TorusSignal:
    """A random complex signal on 64 points."""
    return TorusSignal.random(64, np.random.default_rng(0))


def test_project_is_idempotent(signal: TorusSignal) -> None:
    """It leaves an already projected signal unchanged."""
    omega = FreqInterval(-5, 9)
    once = project(signal, omega)
    np.testing.assert_allclose(project(once, omega).samples, once.samples, atol=1e-12)


def test_project_keeps_only_the_arc(signal: TorusSignal) -> None:
    """It zeroes every coefficient outside the arc."""
    spectrum = dft(project(signal, FreqInterval(2, 6))).coeffs
    inside = (frequencies(64) >= 2) & (frequencies(64) < 6)
    assert np.all(np.abs(spectrum[~inside]) < 1e-12)


@given(seed=seeds, count=st.integers(min_value=1, max_value=30))
@settings(deadline=None, max_examples=50)
def test_projections_reassemble(seed: int, count: int) -> None:
    """It recovers f by summing its projections over a partition."""
    rng = np.random.default_rng(seed)
    f = TorusSignal.random(64, rng)
    omegas = IntervalCollection.random_partition(64, count, rng)
    total = sum(project(f, omega).samples for omega in omegas)
    np.testing.assert_allclose(total, f.samples, atol=1e-12)


def test_project_rejects_outside_arc(signal: TorusSignal) -> None:
    """It refuses arcs beyond the grid."""
    with pytest.raises(DomainError):
        project(signal, FreqInterval(0, 40))


def test_hilbert_squares_to_minus_identity() -> None:
    """It satisfies H H f = -f when f has no zero or Nyquist component."""
    n = 32
    rng = np.random.default_rng(4)
    coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    coeffs[0] = 0
    coeffs[n // 2] = 0
    f = TorusSignal(np.fft.ifft(np.fft.ifftshift(coeffs), norm="forward"))
    np.testing.assert_allclose(hilbert(hilbert(f)).samples, -f.samples, atol=1e-12)


def test_hilbert_of_cosine() -> None:
    """It sends cos to sin."""
    f = TorusSignal.from_function(64, lambda x: np.cos(2 * np.pi * 3 * x))
    expected = np.sin(2 * np.pi * 3 * np.arange(64) / 64)
    np.testing.assert_allclose(hilbert(f).samples, expected, atol=1e-12)


@given(seed=seeds, n=st.sampled_from([8, 32, 128]), data=st.data())
@settings(deadline=None, max_examples=50)
def test_hilbert_commutes_with_translation(seed: int, n: int, data: st.DataObject) -> None:
    """It gives the same result before or after a grid translation."""
    f = TorusSignal.random(n, np.random.default_rng(seed))
    y = data.draw(st.integers(min_value=0, max_value=n - 1)) / n
    np.testing.assert_allclose(
        hilbert(translate(f, y)).samples, translate(hilbert(f), y).samples, atol=1e-12
    )


def test_maximal_dominates(signal: TorusSignal) -> None:
    """It is at least |f| pointwise and at least the mean."""
    m = maximal(signal).samples
    assert np.all(m >= np.abs(signal.samples) - 1e-12)
    assert np.all(m >= np.abs(signal.samples).mean() - 1e-12)


def test_maximal_of_constant() -> None:
    """It leaves constants unchanged in one and two dimensions."""
    np.testing.assert_allclose(maximal(TorusSignal.constant(16, 2.0)).samples, 2.0)
    np.testing.assert_allclose(maximal(TorusSignal2(np.full((8, 16), 3.0))).samples, 3.0)


def test_maximal_of_spike() -> None:
    """It decays like the reciprocal of the window size away from a spike."""
    samples = np.zeros(32)
    samples[0] = 1.0
    m = maximal(TorusSignal(samples)).samples
    assert m[0] == 1.0
    assert m[1] == pytest.approx(1 / 3)
    assert m[4] == pytest.approx(1 / 9)


def test_maximal_full_window_is_the_mean() -> None:
    """It averages the whole torus once at the antipode of a spike."""
    samples = np.zeros(32)
    samples[0] = 1.0
    m = maximal(TorusSignal(samples)).samples
    assert m[16] == pytest.approx(1 / 32)


@given(seed=seeds)
@settings(deadline=None, max_examples=30)
def test_maximal_is_sublinear(seed: int) -> None:
    """It satisfies M(f + g) <= Mf + Mg pointwise in one and two dimensions."""
    rng = np.random.default_rng(seed)
    f, g = TorusSignal.random(64, rng), TorusSignal.random(64, rng)
    total = maximal(TorusSignal(f.samples + g.samples)).samples
    assert np.all(total <= maximal(f).samples + maximal(g).samples + 1e-12)
    f2, g2 = TorusSignal2.random((8, 16), rng), TorusSignal2.random((8, 16), rng)
    total2 = maximal(TorusSignal2(f2.samples + g2.samples)).samples
    assert np.all(total2 <= maximal(f2).samples + maximal(g2).samples + 1e-12)


@given(seed=seeds, count=st.integers(min_value=1, max_value=40))
@settings(deadline=None)
def test_square_sharp_l2_identity(seed: int, count: int) -> None:
    """It preserves the L^2 norm over a partition."""
    rng = np.random.default_rng(seed)
    omegas = IntervalCollection.random_partition(128, count, rng)
    f = TorusSignal.random(128, rng)
    assert lp_norm(square_sharp(f, omegas), 2) == pytest.approx(lp_norm(f, 2), rel=1e-10)


def test_square_sharp_bessel(signal: TorusSignal) -> None:
    """It never exceeds the L^2 norm on disjoint arcs."""
    omegas = IntervalCollection.random_disjoint(64, 6, np.random.default_rng(5))
    assert lp_norm(square_sharp(signal, omegas), 2) <= lp_norm(signal, 2) + 1e-12


def test_square_sharp_single_arc(signal: TorusSignal) -> None:
    """It equals |S_omega f| for one arc."""
    omega = FreqInterval(-3, 7)
    out = square_sharp(signal, IntervalCollection((omega,)))
    np.testing.assert_allclose(out.samples, np.abs(project(signal, omega).samples), atol=1e-12)


def test_square_lq(signal: TorusSignal) -> None:
    """It matches the rough square function at q = 2 and shrinks as q grows."""
    omegas = IntervalCollection.lacunary(64)
    np.testing.assert_allclose(
        square_lq(signal, omegas, 2).samples, square_sharp(signal, omegas).samples, atol=1e-12
    )
    assert np.all(
        square_lq(signal, omegas, float("inf")).samples
        <= square_lq(signal, omegas, 4).samples + 1e-12
    )
    with pytest.raises(DomainError):
        square_lq(signal, omegas, 0.5)


def test_square_sharp_2d_l2_identity() -> None:
    """It preserves the L^2 norm over a tensor partition."""
    rng = np.random.default_rng(6)
    rectangles = tensor_rectangles(
        IntervalCollection.random_partition(16, 3, rng),
        IntervalCollection.random_partition(32, 5, rng),
    )
    f = TorusSignal2.random((16, 32), rng)
    assert lp_norm(square_sharp_2d(f, rectangles), 2) == pytest.approx(lp_norm(f, 2))


def test_square_sharp_2d_rejects_overlap() -> None:
    """It refuses overlapping rectangles."""
    f = TorusSignal2(np.ones((8, 8)))
    a = FreqInterval(0, 2)
    with pytest.raises(DomainError):
        square_sharp_2d(f, [(a, a), (FreqInterval(1, 3), a)])


def test_smooth_bump() -> None:
    """It is one on the plateau, zero off the support and in between elsewhere."""
    k = np.linspace(-10, 10, 401)
    bump = smooth_bump(k, (-2, 3), (-6, 7))
    assert np.all(bump[(k >= -2) & (k <= 3)] == 1.0)
    assert np.all(bump[(k <= -6) | (k >= 7)] == 0.0)
    assert np.all((bump >= 0) & (bump <= 1))
    with pytest.raises(DomainError):
        smooth_bump(k, (-2, 3), (-2, 7))


@given(edges=st.lists(st.integers(min_value=-32, max_value=32), min_size=4, max_size=4, unique=True))
@settings(deadline=None)
def test_make_window_sandwich(edges: list[int]) -> None:
    """It lies between the plateau and support indicators at every frequency."""
    lo, a, b, hi = sorted(edges)
    plateau, support = FreqInterval(a, b), FreqInterval(lo, hi)
    window = make_window(plateau, support, 64)
    assert np.all(window.hat >= plateau.indicator(64))
    assert np.all(window.hat <= support.indicator(64))
    assert np.all(window.hat[plateau.indicator(64)] == 1.0)


def test_default_window() -> None:
    """It has plateau [-4, 4), support [-8, 8) and support ratio two."""
    window = default_window(64)
    assert window.plateau == FreqInterval(-4, 4)
    assert window.support == FreqInterval(-8, 8)
    assert window.ratio == 2
    assert not window.sharp
    assert window.l2_norm() == pytest.approx(lp_norm(window.signal(), 2))


def test_make_window_rejects() -> None:
    """It refuses a plateau touching the support."""
    with pytest.raises(DomainError):
        make_window(FreqInterval(-4, 4), FreqInterval(-4, 8), 64)


def test_transported_window() -> None:
    """It puts the plateau on the arc and the support on its dilate."""
    window = default_window(128)
    profile = window.transported(FreqInterval(10, 20), 128)
    k = frequencies(128)
    assert np.all(profile[(k >= 10) & (k < 20)] == 1.0)
    assert np.all(profile[(k <= 5) | (k >= 25)] == 0.0)


def test_sharp_window_transports_to_indicator() -> None:
    """It transports a sharp window to the indicator of the arc."""
    window = Window.indicator(FreqInterval(-2, 2), 32)
    profile = window.transported(FreqInterval(3, 5), 32)
    assert profile.tolist() == FreqInterval(3, 5).indicator(32).astype(float).tolist()


def test_square_smooth_bound(signal: TorusSignal) -> None:
    """It respects the reported L^2 constant."""
    omegas = IntervalCollection.random_disjoint(64, 4, np.random.default_rng(7))
    result = square_smooth(signal, omegas, default_window(64))
    assert result.constant >= 1.0
    assert lp_norm(result.signal, 2) ** 2 <= result.constant * lp_norm(signal, 2) ** 2 + 1e-9
    assert result.well_distributed
    assert not result.overridden


def test_square_smooth_with_sharp_window(signal: TorusSignal) -> None:
    """It reduces to the rough square function for a sharp window."""
    omegas = IntervalCollection.lacunary(64)
    result = square_smooth(signal, omegas, Window.indicator(FreqInterval(-1, 1), 64))
    np.testing.assert_allclose(result.signal.samples, square_sharp(signal, omegas).samples, atol=1e-12)
    assert result.constant == 1.0


def test_square_smooth_warns(
    signal: TorusSignal, monkeypatch: pytest.MonkeyPatch, caplog: pytest.LogCaptureFixture
) -> None:
    """It warns about a badly distributed collection unless overridden."""
    monkeypatch.setattr("lp_tile_lab.projections.WELL_DISTRIBUTED_BOUND", 1)
    omegas = IntervalCollection.unit_arcs(-8, 8)
    with caplog.at_level(logging.WARNING, logger="lp_tile_lab"):
        result = square_smooth(signal, omegas, default_window(64))
    assert not result.well_distributed
    assert "not well distributed" in caplog.text
    caplog.clear()
    with caplog.at_level(logging.WARNING, logger="lp_tile_lab"):
        square_smooth(signal, omegas, default_window(64), override=True)
    assert caplog.text == ""


def test_khintchine_gfunction(signal: TorusSignal) -> None:
    """It reports one ratio per trial and reproduces under a fixed seed."""
    first = khintchine_gfunction(signal, 5, seed=3)
    second = khintchine_gfunction(signal, 5, seed=3)
    assert len(first.trial_ratios) == 5
    assert first.trial_ratios == second.trial_ratios
    assert first.min_ratio <= first.max_ratio
    assert first.scales >= 1
    assert set(first.gfunction_ratios) == {2.0, 3.0, 4.0}


def test_khintchine_rejects_zero() -> None:
    """It refuses a zero signal."""
    with pytest.raises(DomainError):
        khintchine_gfunction(TorusSignal.constant(64, 0.0), 3, seed=0)


@pytest.mark.parametrize("k0", [3, -5, 12])
def test_khintchine_pure_frequency(k0: int) -> None:
    """It scales a pure frequency by the kernel and G-function values at that frequency."""
    n = 64
    f = TorusSignal.from_function(n, lambda x: np.exp(2j * np.pi * k0 * x))
    values = np.array([profile[k0 + n // 2] for _, _, profile in khintchine_profiles(n)])
    signs = np.where(np.arange(values.size) % 3 == 0, -1.0, 1.0)
    for eps in (np.ones(values.size), signs):
        report = khintchine_gfunction(f, 1, seed=0, signs=eps)
        assert report.trial_ratios[0] == pytest.approx(abs(eps @ values), abs=1e-12)
    expected = math.sqrt(float(np.sum(values**2)))
    for ratio in report.gfunction_ratios.values():
        assert ratio == pytest.approx(expected, abs=1e-12)


def test_khintchine_delta() -> None:
    """It reports the norm of the kernel itself for a delta and all signs positive."""
    n = 64
    delta = np.zeros(n)
    delta[0] = 1.0
    profiles = khintchine_profiles(n)
    kernel = np.sum([profile for _, _, profile in profiles], axis=0)
    samples = np.fft.ifft(np.fft.ifftshift(kernel))
    expected = max(array_lp_norm(samples, p) / array_lp_norm(delta, p) for p in (2.0, 3.0, 4.0))
    report = khintchine_gfunction(TorusSignal(delta), 1, seed=0, signs=np.ones(len(profiles)))
    assert report.trial_ratios[0] == pytest.approx(expected, rel=1e-12)
