"""User-drawn lasso regions and their rasterization to a screen mask.

A lasso is either a circle or a polygon in pixel coordinates. Rasterizing
fills one boolean per pixel: set iff the pixel center lies inside the
region (circles by Euclidean distance, polygons by the even-odd rule).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatchError, InvalidLassoError


@dataclass(frozen=True)
class CircleLasso:
    center: tuple[float, float]
    radius: float


@dataclass(frozen=True)
class PolygonLasso:
    vertices: np.ndarray   # (V, 2) pixel coordinates

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=np.float64))


LassoRegion = CircleLasso | PolygonLasso


@dataclass
class ScreenMask:
    width: int
    height: int
    bits: np.ndarray     # (height, width) bool

    @property
    def set_pixel_count(self) -> int:
        return int(self.bits.sum())


def _pixel_centers(width: int, height: int):
    xs = np.arange(width) + 0.5
    ys = np.arange(height) + 0.5
    return xs, ys


def _fill_circle(lasso: CircleLasso, width: int, height: int) -> np.ndarray:
    xs, ys = _pixel_centers(width, height)
    cx, cy = lasso.center
    dx2 = (xs - cx) ** 2
    dy2 = (ys - cy) ** 2
    return dy2[:, None] + dx2[None, :] <= lasso.radius ** 2


def _fill_polygon(vertices: np.ndarray, width: int, height: int) -> np.ndarray:
    """Even-odd fill at pixel centers, vectorized one edge at a time."""
    xs, ys = _pixel_centers(width, height)
    inside = np.zeros((height, width), dtype=bool)
    x0s = vertices
    x1s = np.roll(vertices, -1, axis=0)
    for (ax, ay), (bx, by) in zip(x0s, x1s):
        if ay == by:
            continue  # horizontal edges never cross a scan ray
        crosses_row = (ys >= min(ay, by)) & (ys < max(ay, by))
        if not crosses_row.any():
            continue
        # x of the edge at each crossing row; ray goes toward +x
        t = (ys[crosses_row] - ay) / (by - ay)
        x_at = ax + t * (bx - ax)
        inside[crosses_row] ^= xs[None, :] > x_at[:, None]
    return inside


def rasterize_lasso(lasso: LassoRegion, viewport: tuple[int, int]) -> ScreenMask:
    """Render a lasso region into a boolean screen mask."""
    width, height = viewport
    if width < 1 or height < 1:
        raise DimensionMismatchError("viewport dimensions must be >= 1")
    if isinstance(lasso, CircleLasso):
        if not lasso.radius > 0:
            raise InvalidLassoError("circle radius must be positive")
        bits = _fill_circle(lasso, width, height)
    elif isinstance(lasso, PolygonLasso):
        if len(lasso.vertices) < 3:
            raise InvalidLassoError("polygon needs at least 3 vertices")
        if not np.isfinite(lasso.vertices).all():
            raise InvalidLassoError("polygon vertices must be finite")
        bits = _fill_polygon(lasso.vertices, width, height)
    else:
        raise InvalidLassoError(f"unknown lasso type {type(lasso).__name__}")
    return ScreenMask(width=width, height=height, bits=bits)
