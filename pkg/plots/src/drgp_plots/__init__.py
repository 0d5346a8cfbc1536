"""Render drgp experiment CSV outputs into figures.

This package is a pure file-to-file consumer: it reads a run's
``manifest.json`` plus the CSV files it lists and writes raster images.  No
model quantity is recomputed here.
"""

__version__ = "0.1.0"

from .render import FigureSpec, MissingColumnError, build_specs, render, render_manifest

__all__ = [
    "__version__",
    "FigureSpec",
    "MissingColumnError",
    "build_specs",
    "render",
    "render_manifest",
]
