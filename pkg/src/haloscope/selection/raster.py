"""Step 5: rank clusters by projected area with a software rasterizer.

Each cluster's surface is rendered into its own boolean buffer under the
shared camera, so overlapping clusters never shadow each other. A pixel
is covered iff some triangle contains its center (inclusive edges); the
count of covered pixels is the cluster's projected area. Everything is
exact arithmetic on pixel centers - no sampling - so the result is
deterministic, and because all buffers share one resolution the argmax
is the same as in any uniformly scaled viewport.
"""

from __future__ import annotations

import numpy as np

from ..camera import CameraPose, project_camera_space, to_camera_space
from .clusters import ClusterSet

_BUCKET_CAP = 64   # bbox sizes above this rasterize one triangle at a time


def _clip_polygon_depth(poly: np.ndarray, near: float, far: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a camera-space polygon to near <= depth <= far."""
    for plane_sign, plane_d in ((1.0, near), (-1.0, far)):
        if len(poly) == 0:
            return poly
        keep: list[np.ndarray] = []
        dist = plane_sign * (poly[:, 2] - plane_d)
        for i in range(len(poly)):
            j = (i + 1) % len(poly)
            if dist[i] >= 0:
                keep.append(poly[i])
            if (dist[i] >= 0) != (dist[j] >= 0):
                t = dist[i] / (dist[i] - dist[j])
                keep.append(poly[i] + t * (poly[j] - poly[i]))
        poly = np.asarray(keep) if keep else np.empty((0, 3))
    return poly


def _clip_triangles(cam_tris: np.ndarray, near: float, far: float) -> np.ndarray:
    """Clip camera-space triangles to the depth slab, re-triangulating fans."""
    d = cam_tris[:, :, 2]
    inside = (d >= near) & (d <= far)
    all_in = inside.all(axis=1)
    all_out = (d < near).all(axis=1) | (d > far).all(axis=1)
    straddle = ~all_in & ~all_out
    pieces = [cam_tris[all_in]]
    for tri in cam_tris[straddle]:
        poly = _clip_polygon_depth(tri, near, far)
        for k in range(1, len(poly) - 1):
            pieces.append(np.stack([poly[0], poly[k], poly[k + 1]])[None])
    return np.concatenate(pieces) if pieces else np.empty((0, 3, 3))


def _paint_bucket(buffer: np.ndarray, pix: np.ndarray, ix0, ix1, iy0, iy1) -> None:
    """Mark centers covered by each triangle of one bbox-size bucket."""
    h, w = buffer.shape
    bw = int((ix1 - ix0).max()) + 1
    bh = int((iy1 - iy0).max()) + 1
    dx = np.arange(bw)
    dy = np.arange(bh)
    px = ix0[:, None, None] + dx[None, None, :] + 0.5
    py = iy0[:, None, None] + dy[None, :, None] + 0.5
    live = (dx[None, None, :] <= (ix1 - ix0)[:, None, None]) & \
           (dy[None, :, None] <= (iy1 - iy0)[:, None, None])

    ax, ay = pix[:, 0, 0, None, None], pix[:, 0, 1, None, None]
    bx, by = pix[:, 1, 0, None, None], pix[:, 1, 1, None, None]
    cx, cy = pix[:, 2, 0, None, None], pix[:, 2, 1, None, None]
    w0 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    w1 = (cx - bx) * (py - by) - (cy - by) * (px - bx)
    w2 = (ax - cx) * (py - cy) - (ay - cy) * (px - cx)
    covered = (((w0 >= 0) & (w1 >= 0) & (w2 >= 0)) |
               ((w0 <= 0) & (w1 <= 0) & (w2 <= 0))) & live
    if covered.any():
        flat = ((iy0[:, None, None] + dy[None, :, None]) * w +
                (ix0[:, None, None] + dx[None, None, :]))
        buffer.ravel()[flat[covered]] = True


def rasterize_coverage(
    camera: CameraPose,
    triangles: np.ndarray,
    resolution: tuple[int, int],
) -> np.ndarray:
    """Boolean coverage buffer of a triangle soup at the given resolution."""
    w, h = resolution
    buffer = np.zeros((h, w), dtype=bool)
    if len(triangles) == 0:
        return buffer
    cam = to_camera_space(camera, triangles.reshape(-1, 3)).reshape(-1, 3, 3)
    cam = _clip_triangles(cam, camera.near, camera.far)
    if len(cam) == 0:
        return buffer
    pix = project_camera_space(camera, cam.reshape(-1, 3), (w, h)).reshape(-1, 3, 2)

    area2 = ((pix[:, 1, 0] - pix[:, 0, 0]) * (pix[:, 2, 1] - pix[:, 0, 1]) -
             (pix[:, 1, 1] - pix[:, 0, 1]) * (pix[:, 2, 0] - pix[:, 0, 0]))
    min_xy = pix.min(axis=1)
    max_xy = pix.max(axis=1)
    ix0 = np.maximum(np.ceil(min_xy[:, 0] - 0.5), 0).astype(np.int64)
    iy0 = np.maximum(np.ceil(min_xy[:, 1] - 0.5), 0).astype(np.int64)
    ix1 = np.minimum(np.floor(max_xy[:, 0] - 0.5), w - 1).astype(np.int64)
    iy1 = np.minimum(np.floor(max_xy[:, 1] - 0.5), h - 1).astype(np.int64)
    alive = (area2 != 0) & (ix1 >= ix0) & (iy1 >= iy0)
    if not alive.any():
        return buffer
    pix, ix0, ix1, iy0, iy1 = pix[alive], ix0[alive], ix1[alive], iy0[alive], iy1[alive]

    span = np.maximum(ix1 - ix0, iy1 - iy0) + 1
    bucket = np.ceil(np.log2(span)).astype(np.int64)
    for b in np.unique(bucket):
        sel = bucket == b
        if (1 << int(b)) > _BUCKET_CAP:
            for i in np.flatnonzero(sel):
                _paint_bucket(buffer, pix[i:i + 1], ix0[i:i + 1], ix1[i:i + 1],
                              iy0[i:i + 1], iy1[i:i + 1])
        else:
            _paint_bucket(buffer, pix[sel], ix0[sel], ix1[sel], iy0[sel], iy1[sel])
    return buffer


def rank_projected_areas(
    clusters: ClusterSet,
    camera: CameraPose,
    resolution: tuple[int, int] = (512, 512),
) -> tuple[dict[int, int], int | None]:
    """Per-cluster covered-pixel counts and the primary (largest) cluster id.

    Ties break toward the lowest cluster id; a cluster with an empty mesh
    simply counts zero pixels.
    """
    counts: dict[int, int] = {}
    best_id: int | None = None
    best = -1
    for cluster in clusters:
        n = int(rasterize_coverage(camera, cluster.surface.triangles, resolution).sum())
        counts[cluster.cluster_id] = n
        if n > best:
            best, best_id = n, cluster.cluster_id
    return counts, best_id
