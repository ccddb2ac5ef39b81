"""Test cases for the grid module."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st

from lp_tile_lab.errors import DomainError
from lp_tile_lab.grid import DyadicInterval
from lp_tile_lab.grid import FreqInterval
from lp_tile_lab.grid import IntervalCollection
from lp_tile_lab.grid import Spectrum
from lp_tile_lab.grid import SymmetryKind
from lp_tile_lab.grid import TorusSignal
from lp_tile_lab.grid import array_lp_norm
from lp_tile_lab.grid import check_disjoint_rectangles
from lp_tile_lab.grid import check_length
from lp_tile_lab.grid import dft
from lp_tile_lab.grid import dilate
from lp_tile_lab.grid import frequencies
from lp_tile_lab.grid import idft
from lp_tile_lab.grid import lp_norm
from lp_tile_lab.grid import max_level
from lp_tile_lab.grid import modulate
from lp_tile_lab.grid import spectral_norm
from lp_tile_lab.grid import symmetry
from lp_tile_lab.grid import translate


sizes = st.sampled_from([8, 16, 32, 64, 128, 256])
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@given(n=sizes, seed=seeds)
@settings(deadline=None)
def test_plancherel(n: int, seed: int) -> None:
    """It gives equal spatial and spectral 2-norms."""
    f = TorusSignal.random(n, np.random.default_rng(seed))
    assert lp_norm(f, 2) == pytest.approx(spectral_norm(dft(f)), rel=1e-12)


@given(n=sizes, seed=seeds)
@settings(deadline=None)
def test_idft_inverts_dft(n: int, seed: int) -> None:
    """It recovers the samples from their spectrum."""
    f = TorusSignal.random(n, np.random.default_rng(seed))
    np.testing.assert_allclose(idft(dft(f)).samples, f.samples, atol=1e-12)


def test_dft_of_constant() -> None:
    """It puts a constant entirely at frequency zero."""
    spectrum = dft(TorusSignal.constant(16, 2.0))
    assert spectrum[0] == pytest.approx(2.0)
    assert spectral_norm(spectrum) == pytest.approx(2.0)


def test_spectrum_rejects_unrepresentable_frequency() -> None:
    """It refuses frequencies outside [-n/2, n/2)."""
    spectrum = Spectrum(np.zeros(8))
    with pytest.raises(DomainError):
        spectrum[4]


def test_frequencies_are_symmetric() -> None:
    """It lists -n/2 .. n/2 - 1."""
    assert frequencies(8).tolist() == [-4, -3, -2, -1, 0, 1, 2, 3]


@pytest.mark.parametrize("n", [0, 6, 12, 4])
def test_check_length_rejects(n: int) -> None:
    """It rejects lengths that are not powers of two of at least eight."""
    with pytest.raises(DomainError):
        check_length(n)


def test_signal_rejects_bad_length() -> None:
    """It refuses samples whose length is not a power of two."""
    with pytest.raises(DomainError):
        TorusSignal(np.zeros(12))


def test_signal_rejects_nan() -> None:
    """It refuses non-finite samples."""
    samples = np.zeros(8)
    samples[3] = np.nan
    with pytest.raises(DomainError):
        TorusSignal(samples)


def test_array_lp_norm() -> None:
    """It uses the probability measure and takes the max at infinity."""
    values = np.array([3.0, 0.0, 0.0, 0.0])
    assert array_lp_norm(values, 1) == pytest.approx(0.75)
    assert array_lp_norm(values, 2) == pytest.approx(1.5)
    assert array_lp_norm(values, float("inf")) == 3.0
    with pytest.raises(DomainError):
        array_lp_norm(values, 0.5)


def test_empty_interval_rejected() -> None:
    """It refuses empty arcs."""
    with pytest.raises(DomainError):
        FreqInterval(3, 3)


def test_interval_scaled() -> None:
    """It dilates concentrically and rounds outward."""
    assert FreqInterval(2, 4).scaled(3) == FreqInterval(0, 6)
    assert FreqInterval(0, 1).scaled(2) == FreqInterval(-1, 2)


def test_interval_check() -> None:
    """It refuses arcs that leave the frequency range."""
    FreqInterval(-4, 4).check(8)
    with pytest.raises(DomainError):
        FreqInterval(-4, 5).check(8)


def test_collection_rejects_overlap() -> None:
    """It refuses overlapping arcs."""
    with pytest.raises(DomainError):
        IntervalCollection((FreqInterval(0, 3), FreqInterval(2, 5)))


def test_lacunary_example() -> None:
    """It builds the dyadic blocks with a centre block."""
    blocks = [str(w) for w in IntervalCollection.lacunary(16)]
    assert blocks == ["[-8, -3)", "[-3, -1)", "[-1, 2)", "[2, 4)", "[4, 8)"]


@pytest.mark.parametrize("n", [8, 16, 64, 1024, 4096])
def test_lacunary_partitions(n: int) -> None:
    """It covers the full range exactly."""
    assert IntervalCollection.lacunary(n).partitions(n)


@given(seed=seeds, count=st.integers(min_value=1, max_value=32))
@settings(deadline=None)
def test_random_disjoint(seed: int, count: int) -> None:
    """It draws disjoint arcs inside the grid."""
    omegas = IntervalCollection.random_disjoint(256, count, np.random.default_rng(seed))
    assert len(omegas) == count
    omegas.check(256)


@given(seed=seeds, count=st.integers(min_value=1, max_value=64))
@settings(deadline=None)
def test_random_partition(seed: int, count: int) -> None:
    """It splits the full range into the requested number of arcs."""
    omegas = IntervalCollection.random_partition(128, count, np.random.default_rng(seed))
    assert len(omegas) == count
    assert omegas.partitions(128)


def test_unit_arcs() -> None:
    """It gives one arc per integer."""
    arcs = IntervalCollection.unit_arcs(0, 4)
    assert [w.width for w in arcs] == [1, 1, 1, 1]
    assert not arcs.partitions(8)


def test_check_disjoint_rectangles() -> None:
    """It accepts rectangles disjoint in one factor and rejects overlaps."""
    a = FreqInterval(0, 2)
    b = FreqInterval(2, 4)
    check_disjoint_rectangles([(a, a), (a, b), (b, a)])
    with pytest.raises(DomainError):
        check_disjoint_rectangles([(a, a), (FreqInterval(1, 3), FreqInterval(1, 3))])


def test_dyadic_interval_tree() -> None:
    """It moves between parents and children."""
    interval = DyadicInterval(2, 3)
    assert interval.length == 0.25
    assert interval.start == 0.75
    assert interval.parent() == DyadicInterval(1, 1)
    assert all(interval.contains(child) for child in interval.children())
    assert not interval.contains(DyadicInterval(2, 2))
    assert len(list(DyadicInterval.at_level(3))) == 8


def test_dyadic_interval_samples() -> None:
    """It maps to contiguous sample ranges."""
    assert DyadicInterval(2, 1).sample_slice(16) == slice(4, 8)
    with pytest.raises(DomainError):
        DyadicInterval(5, 0).sample_slice(16)
    with pytest.raises(DomainError):
        DyadicInterval(1, 2)


def test_max_level() -> None:
    """It gives the finest level with one sample per interval."""
    assert max_level(1024) == 10


def test_modulate_shifts_spectrum() -> None:
    """It moves every coefficient up by the modulation frequency."""
    f = TorusSignal.random(32, np.random.default_rng(1))
    before = dft(f)
    after = dft(modulate(f, 3))
    for k in range(-16, 13):
        assert after[k + 3] == pytest.approx(before[k], abs=1e-12)


def test_translate_is_a_phase() -> None:
    """It multiplies the spectrum by exp(-2 pi i k y)."""
    f = TorusSignal.random(32, np.random.default_rng(2))
    shifted = translate(f, 5 / 32)
    phase = np.exp(-2j * np.pi * frequencies(32) * 5 / 32)
    np.testing.assert_allclose(dft(shifted).coeffs, dft(f).coeffs * phase, atol=1e-12)
    with pytest.raises(DomainError):
        translate(f, 0.01)


@given(n=sizes, seed=seeds, data=st.data())
@settings(deadline=None, max_examples=50)
def test_translations_compose(n: int, seed: int, data: st.DataObject) -> None:
    """It adds shifts when two translations are applied in turn."""
    f = TorusSignal.random(n, np.random.default_rng(seed))
    y, z = (data.draw(st.integers(min_value=-2 * n, max_value=2 * n)) for _ in range(2))
    twice = translate(translate(f, z / n), y / n)
    np.testing.assert_allclose(twice.samples, translate(f, (y + z) / n).samples, atol=1e-12)


@given(n=sizes, seed=seeds, xi=st.integers(-300, 300), eta=st.integers(-300, 300))
@settings(deadline=None, max_examples=50)
def test_modulations_compose(n: int, seed: int, xi: int, eta: int) -> None:
    """It adds frequencies when two modulations are applied in turn."""
    f = TorusSignal.random(n, np.random.default_rng(seed))
    twice = modulate(modulate(f, eta), xi)
    np.testing.assert_allclose(twice.samples, modulate(f, xi + eta).samples, atol=1e-9)


@given(n=sizes, seed=seeds)
@settings(deadline=None, max_examples=50)
def test_lp_norm_grows_with_p(n: int, seed: int) -> None:
    """It never decreases as p grows on the probability torus."""
    f = TorusSignal.random(n, np.random.default_rng(seed))
    norms = [lp_norm(f, p) for p in (1.0, 4 / 3, 2.0, 3.0, 4.0, 8.0, float("inf"))]
    for smaller, larger in zip(norms, norms[1:]):
        assert smaller <= larger * (1 + 1e-12)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0, float("inf")])
def test_dilate_is_an_isometry(p: float) -> None:
    """It preserves L^p norms and inverts itself."""
    n = 64
    samples = np.zeros(n, dtype=np.complex128)
    samples[:8] = np.arange(1, 9)
    samples[-8:] = -np.arange(1, 9)
    f = TorusSignal(samples)
    wide = dilate(f, 2.0, p)
    assert lp_norm(wide, p) == pytest.approx(lp_norm(f, p))
    np.testing.assert_allclose(dilate(wide, 0.5, p).samples, f.samples)


def test_dilate_rejects() -> None:
    """It refuses scales other than powers of two and signals that do not fit."""
    f = TorusSignal.constant(16)
    with pytest.raises(DomainError):
        dilate(f, 3.0)
    with pytest.raises(DomainError):
        dilate(f, 2.0)


def test_symmetry_dispatch() -> None:
    """It selects the operator from its kind."""
    f = TorusSignal.random(16, np.random.default_rng(3))
    np.testing.assert_allclose(
        symmetry(f, SymmetryKind.Translate, 0.25).samples, translate(f, 0.25).samples
    )
    np.testing.assert_allclose(
        symmetry(f, SymmetryKind.Modulate, 2).samples, modulate(f, 2).samples
    )
