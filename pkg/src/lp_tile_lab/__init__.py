"""Lp Tile Lab."""
