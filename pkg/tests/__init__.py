"""Test suite for the lp_tile_lab package."""
