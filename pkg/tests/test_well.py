"""Test cases for the well module."""
import logging

import numpy as np
import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st

from lp_tile_lab.grid import FreqInterval
from lp_tile_lab.grid import IntervalCollection
from lp_tile_lab.well import MODEL_CENTRE
from lp_tile_lab.well import is_well_distributed
from lp_tile_lab.well import model_breakpoint
from lp_tile_lab.well import model_family
from lp_tile_lab.well import overlap_bound
from lp_tile_lab.well import refine
from lp_tile_lab.well import refine_interval


def test_model_family() -> None:
    """It starts at the central piece and approaches the edge geometrically."""
    assert model_breakpoint(0) == pytest.approx(MODEL_CENTRE)
    family = model_family(4)
    assert family[4] == (-MODEL_CENTRE, MODEL_CENTRE)
    for (_, b), (c, _) in zip(family, family[1:]):
        assert b == pytest.approx(c)
    assert all(b < 0.5 for _, b in family)


@given(lo=st.integers(min_value=-500, max_value=400), width=st.integers(min_value=1, max_value=600))
@settings(deadline=None)
def test_refine_partitions_each_arc(lo: int, width: int) -> None:
    """It splits an arc into consecutive pieces covering it exactly."""
    omega = FreqInterval(lo, lo + width)
    refinement = refine(IntervalCollection((omega,)))
    pieces = sorted(refinement.collection)
    assert pieces[0].lo == omega.lo
    assert pieces[-1].hi == omega.hi
    assert all(a.hi == b.lo for a, b in zip(pieces, pieces[1:]))


def test_refined_pieces_double_inside() -> None:
    """It keeps the double of every piece except the lumped tails inside the arc."""
    omega = FreqInterval(-300, 500)
    pieces, tails = refine_interval(omega) or ([], [])
    assert len(tails) == 2
    assert len(pieces) > 10
    for piece in pieces:
        if piece in tails:
            continue
        double = piece.scaled(2)
        assert double.is_within(omega)


def test_narrow_arcs_pass_through(caplog: pytest.LogCaptureFixture) -> None:
    """It keeps arcs too narrow to refine and warns about them."""
    omegas = IntervalCollection((FreqInterval(0, 2), FreqInterval(10, 200)))
    with caplog.at_level(logging.WARNING, logger="lp_tile_lab"):
        refinement = refine(omegas)
    assert refinement.passthrough == (FreqInterval(0, 2),)
    assert FreqInterval(0, 2) in refinement.collection.intervals
    assert "too narrow" in caplog.text
    assert len(refinement.lumped) == 2


def test_overlap_of_unit_arcs() -> None:
    """It counts three overlapping triples for consecutive unit arcs."""
    assert overlap_bound(IntervalCollection.unit_arcs(-8, 8), 64) == 3
    assert overlap_bound(IntervalCollection(()), 64) == 0


def test_overlap_of_nested_scales() -> None:
    """It counts every arc whose triple reaches a common point."""
    arcs = IntervalCollection(tuple(FreqInterval(2**k, 2 ** (k + 1)) for k in range(8)))
    assert overlap_bound(arcs, 1024) == 8
    lacunary = IntervalCollection.lacunary(1024)
    assert overlap_bound(lacunary, 1024) == len(lacunary)


def test_refinement_is_well_distributed() -> None:
    """It produces collections with a bounded overlap of triples."""
    rng = np.random.default_rng(41)
    omegas = IntervalCollection.random_disjoint(2048, 6, rng)
    refined = refine(omegas).collection
    assert is_well_distributed(refined, 2048)
    assert len(refined) >= len(omegas)
