"""Step 1 of the selection pipeline: mark particles whose projection
lands on a set mask pixel."""

from __future__ import annotations

import numpy as np

from ..camera import CameraPose, project_points
from ..errors import DimensionMismatchError
from .grid import NUMBA_AVAILABLE, njit
from .lasso import ScreenMask


@njit(cache=True)
def _mark_kernel(positions, eye, right, up, fwd, near, far,
                 scale, width, height, bits):   # pragma: no cover - jitted
    n = positions.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    half_w = width / 2.0
    half_h = height / 2.0
    for i in range(n):
        rx = positions[i, 0] - eye[0]
        ry = positions[i, 1] - eye[1]
        rz = positions[i, 2] - eye[2]
        d = rx * fwd[0] + ry * fwd[1] + rz * fwd[2]
        if d < near or d > far:
            continue
        px = half_w + (rx * right[0] + ry * right[1] + rz * right[2]) / d * scale
        py = half_h - (rx * up[0] + ry * up[1] + rz * up[2]) / d * scale
        ix = int(np.floor(px))
        iy = int(np.floor(py))
        if 0 <= ix < width and 0 <= iy < height:
            out[i] = bits[iy, ix]
    return out


def mark_positions(positions: np.ndarray, camera: CameraPose, mask: ScreenMask) -> np.ndarray:
    """Indices (ascending) of points that project onto a set mask pixel.

    Points outside the [near, far] depth range are never marked.
    """
    if (mask.width, mask.height) != tuple(camera.viewport):
        raise DimensionMismatchError(
            f"mask {mask.width}x{mask.height} does not match "
            f"viewport {camera.viewport[0]}x{camera.viewport[1]}"
        )
    positions = np.asarray(positions, dtype=np.float64)
    if len(positions) == 0:
        return np.empty(0, dtype=np.intp)
    if NUMBA_AVAILABLE:
        right, up, fwd = camera.basis()
        scale = mask.height / (2.0 * np.tan(np.radians(camera.vertical_fov) / 2.0))
        marked = _mark_kernel(np.ascontiguousarray(positions), camera.eye,
                              right, up, fwd, camera.near, camera.far,
                              scale, mask.width, mask.height,
                              np.ascontiguousarray(mask.bits))
        return np.flatnonzero(marked)
    pix, visible = project_points(camera, positions)
    pix = np.where(visible[:, None], pix, -1.0)   # clipped points can't index the mask
    ix = np.floor(pix[:, 0]).astype(np.int64, copy=False)
    iy = np.floor(pix[:, 1]).astype(np.int64, copy=False)
    on_screen = visible & (ix >= 0) & (ix < mask.width) & (iy >= 0) & (iy < mask.height)
    marked = on_screen.copy()
    marked[on_screen] = mask.bits[iy[on_screen], ix[on_screen]]
    return np.flatnonzero(marked)


def mark_particles(snapshot, camera: CameraPose, mask: ScreenMask) -> np.ndarray:
    """mark_positions over a ParticleSnapshot's position array."""
    return mark_positions(snapshot.positions, camera, mask)
