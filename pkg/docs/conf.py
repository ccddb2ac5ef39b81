"""Sphinx configuration."""
project = "lp-tile-lab"
author = "lp-tile-lab developers"
copyright = "2026, lp-tile-lab developers"
extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
    "sphinx_click",
    "myst_parser",
]
myst_enable_extensions = ["dollarmath"]
autodoc_typehints = "description"
autodoc_member_order = "bysource"
html_theme = "furo"
