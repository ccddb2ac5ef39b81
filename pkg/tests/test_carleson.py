"""Test cases for the carleson module."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st

from lp_tile_lab.carleson import CarlesonSeq
from lp_tile_lab.carleson import CmMode
from lp_tile_lab.carleson import ProductCarlesonSeq
from lp_tile_lab.carleson import cm_norm
from lp_tile_lab.carleson import dyadic_bmo
from lp_tile_lab.carleson import jn_battery
from lp_tile_lab.carleson import jn_check
from lp_tile_lab.carleson import product_cm_norm
from lp_tile_lab.carleson import product_jn_recursion
from lp_tile_lab.carleson import product_jn_step
from lp_tile_lab.carleson import random_carleson
from lp_tile_lab.carleson import random_product_carleson
from lp_tile_lab.carleson import separating_instance
from lp_tile_lab.carleson import sharp_function
from lp_tile_lab.errors import DomainError
from lp_tile_lab.grid import DyadicInterval
from lp_tile_lab.grid import TorusSignal


seeds = st.integers(min_value=0, max_value=2**32 - 1)
unit = DyadicInterval(0, 0)


def test_from_mapping() -> None:
    """It places weights by level and offset and lists them back."""
    alpha = CarlesonSeq.from_mapping({DyadicInterval(2, 1): 0.5, unit: 1.0})
    assert alpha.depth == 2
    assert alpha.levels[2].tolist() == [0.0, 0.5, 0.0, 0.0]
    assert list(alpha.entries()) == [(unit, 1.0), (DyadicInterval(2, 1), 0.5)]
    with pytest.raises(DomainError):
        CarlesonSeq.from_mapping({DyadicInterval(3, 0): 1.0}, depth=2)


def test_rejects_bad_levels() -> None:
    """It refuses negative weights and misshapen levels."""
    with pytest.raises(DomainError):
        CarlesonSeq((np.array([-1.0]),))
    with pytest.raises(DomainError):
        CarlesonSeq((np.array([1.0]), np.array([1.0, 2.0, 3.0])))
    with pytest.raises(DomainError):
        CarlesonSeq(())


def test_add_pads() -> None:
    """It adds sequences of different depths."""
    a = CarlesonSeq.from_mapping({unit: 1.0})
    b = CarlesonSeq.from_mapping({DyadicInterval(1, 1): 2.0})
    total = a + b
    assert total.depth == 1
    assert total.levels[0].tolist() == [1.0]
    assert total.levels[1].tolist() == [0.0, 2.0]


def test_restricted() -> None:
    """It keeps only the weights inside the interval."""
    alpha = CarlesonSeq.from_mapping(
        {unit: 1.0, DyadicInterval(1, 0): 2.0, DyadicInterval(2, 3): 3.0}
    )
    kept = alpha.restricted(DyadicInterval(1, 1))
    assert dict(kept.entries()) == {DyadicInterval(2, 3): 3.0}


def test_subtree_sums() -> None:
    """It accumulates every descendant into its ancestors."""
    alpha = random_carleson(6, np.random.default_rng(0))
    sums = alpha.subtree_sums()
    assert sums[0][0] == pytest.approx(sum(level.sum() for level in alpha.levels))
    np.testing.assert_allclose(sums[-1], alpha.levels[-1])


def test_cm_norm_of_path() -> None:
    """It sums the geometric weights of a path at the root."""
    depth = 5
    alpha = random_carleson(depth, np.random.default_rng(1), kind="path")
    assert cm_norm(alpha) == pytest.approx(2 - 2.0**-depth)


def cm_norm_brute(alpha: CarlesonSeq) -> float:
    """Scan every dyadic interval and every weight inside it."""
    weights = list(alpha.entries())
    best = 0.0
    for level in range(alpha.depth + 1):
        for offset in range(2**level):
            interval = DyadicInterval(level, offset)
            mass = sum(value for i, value in weights if interval.contains(i))
            best = max(best, mass / interval.length)
    return best


@given(seed=seeds, kind=st.sampled_from(["spread", "path"]))
@settings(deadline=None, max_examples=25)
def test_cm_norm_matches_scan(seed: int, kind: str) -> None:
    """It agrees with a scan over every dyadic interval."""
    alpha = random_carleson(6, np.random.default_rng(seed), kind)
    assert cm_norm(alpha) == pytest.approx(cm_norm_brute(alpha), rel=1e-12)


def test_cm_norm_of_zeros() -> None:
    """It is zero for the zero sequence, as is every ratio."""
    assert cm_norm(CarlesonSeq.zeros(4)) == 0.0
    assert jn_check(CarlesonSeq.zeros(4), 2.0) == 0.0


def test_density_integrates_to_mass() -> None:
    """It has integral equal to the contained mass."""
    alpha = random_carleson(5, np.random.default_rng(2))
    interval = DyadicInterval(2, 1)
    mass = sum(value for i, value in alpha.entries() if interval.contains(i))
    assert alpha.density(interval).mean() == pytest.approx(mass)


@given(seed=seeds, kind=st.sampled_from(["spread", "path"]))
@settings(deadline=None)
def test_jn_p1_bounded_by_one(seed: int, kind: str) -> None:
    """It never exceeds one at p = 1."""
    rng = np.random.default_rng(seed)
    alpha = random_carleson(7, rng, kind)
    level = int(rng.integers(4))
    interval = DyadicInterval(level, int(rng.integers(2**level)))
    assert jn_check(alpha, 1.0, interval) <= 1 + 1e-12


def test_jn_check_single_interval() -> None:
    """It gives ratio one for a single weight on the tested interval."""
    alpha = CarlesonSeq.from_mapping({DyadicInterval(1, 0): 0.5})
    assert jn_check(alpha, 3.0, DyadicInterval(1, 0)) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        jn_check(alpha, 0.5)


def test_jn_battery() -> None:
    """It reports bounded ratios for every exponent."""
    battery = jn_battery(6, (1.0, 2.0, 4.0), trials=20, seed=0)
    assert battery.max_ratio[1.0] <= 1 + 1e-12
    assert 0 < battery.max_ratio[4.0]
    assert set(battery.worst_kind.values()) <= {"spread", "path"}


def test_random_carleson_rejects_kind() -> None:
    """It refuses unknown shapes."""
    with pytest.raises(DomainError):
        random_carleson(3, np.random.default_rng(0), kind="tree")


def test_dyadic_bmo() -> None:
    """It measures the oscillation of a half-interval indicator."""
    samples = np.zeros(16)
    samples[:8] = 1.0
    assert dyadic_bmo(TorusSignal(samples)) == pytest.approx(0.5)
    assert dyadic_bmo(TorusSignal.constant(16)) == 0.0


def test_sharp_function() -> None:
    """It vanishes on constants and dominates the mean oscillation."""
    np.testing.assert_allclose(sharp_function(TorusSignal.constant(16)).samples, 0.0)
    g = TorusSignal.random(32, np.random.default_rng(3))
    assert sharp_function(g).samples.max() >= dyadic_bmo(g) - 1e-12


def test_separating_instance() -> None:
    """It has product norm 8/7 but rectangle norm one."""
    alpha = separating_instance()
    assert product_cm_norm(alpha, CmMode.Rect) == pytest.approx(1.0)
    assert product_cm_norm(alpha, "exhaustive") == pytest.approx(8 / 7)
    assert product_cm_norm(alpha, "heuristic") <= 8 / 7 + 1e-12


def test_single_rectangle() -> None:
    """It agrees across modes for one weighted rectangle."""
    rect = (DyadicInterval(1, 1), DyadicInterval(2, 0))
    alpha = ProductCarlesonSeq.from_mapping({rect: 0.3}, (2, 2))
    expected = 0.3 / (0.5 * 0.25)
    for mode in CmMode:
        assert product_cm_norm(alpha, mode) == pytest.approx(expected)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(3))
def test_modes_are_ordered(seed: int) -> None:
    """It bounds the rectangle and heuristic values by the exact norm."""
    alpha = random_product_carleson((3, 3), np.random.default_rng(seed))
    exact = product_cm_norm(alpha, CmMode.Exhaustive)
    assert product_cm_norm(alpha, CmMode.Rect) <= exact + 1e-12
    assert product_cm_norm(alpha, CmMode.Heuristic) <= exact + 1e-12


def test_exhaustive_limit() -> None:
    """It refuses grids beyond 8x8 cells."""
    alpha = ProductCarlesonSeq.zeros((4, 3))
    with pytest.raises(DomainError):
        product_cm_norm(alpha, CmMode.Exhaustive)


def test_product_density() -> None:
    """It integrates to the mass of the rectangles inside the union."""
    alpha = random_product_carleson((2, 3), np.random.default_rng(4), density=0.5)
    mask = np.zeros(alpha.cells, dtype=bool)
    mask[:2, 3:] = True
    assert alpha.density(mask).mean() == pytest.approx(alpha.contained_mass(mask))
    with pytest.raises(DomainError):
        alpha.contained_mass(np.ones((2, 2), dtype=bool))


def test_product_jn_step() -> None:
    """It finds V with less than half the measure of U."""
    alpha = random_product_carleson((2, 2), np.random.default_rng(5), density=0.6)
    union = np.ones(alpha.cells, dtype=bool)
    step = product_jn_step(alpha, union, 2.0)
    assert step.measure == 1.0
    assert step.next_measure < 0.5
    assert step.norm > 0
    with pytest.raises(DomainError):
        product_jn_step(alpha, union, 1.0)
    with pytest.raises(DomainError):
        product_jn_step(alpha, union[:2], 2.0)


def test_product_jn_recursion() -> None:
    """It halves the union at every step and ends with nothing left."""
    alpha = random_product_carleson((2, 2), np.random.default_rng(6), density=0.6)
    recursion = product_jn_recursion(alpha, np.ones(alpha.cells, dtype=bool), 2.0)
    assert 1 <= recursion.depth <= 6
    for step in recursion.steps:
        assert step.next_measure < step.measure / 2
    last = recursion.steps[-1]
    assert last.next_norm == 0 or not last.next_union.any()
    assert recursion.ratio > 0
