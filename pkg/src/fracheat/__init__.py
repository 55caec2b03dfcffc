"""Fractional Gauss-Weierstrass semigroup toolkit on periodic grids."""

from ._kernels import BACKEND
from .grid import (
    GridSpec,
    SpatialField,
    SpectralField,
    forward_transform,
    inverse_transform,
    lp_norm,
    make_grid,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "GridSpec",
    "SpatialField",
    "SpectralField",
    "forward_transform",
    "inverse_transform",
    "lp_norm",
    "make_grid",
]
