"""Exact combinatorics of curves, twists and positivity obstructions on surfaces."""

from .surfaces import Surface, SurfaceError, build_surface
from .paths import Mark, PathError, TracedPath, parse_path, format_path
from .overlay import (
    Overlay,
    OverlayError,
    geometric_intersection,
    is_embedded,
    reduce_to_minimal,
    self_intersection,
)

__all__ = [
    "Surface", "SurfaceError", "build_surface",
    "Mark", "PathError", "TracedPath", "parse_path", "format_path",
    "Overlay", "OverlayError", "geometric_intersection", "is_embedded",
    "reduce_to_minimal", "self_intersection",
]

__version__ = "0.1.0"
