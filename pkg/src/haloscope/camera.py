"""Right-handed look-at perspective camera and point projection.

Screen coordinates are pixels with the origin at the top-left corner,
x growing right and y growing down. Pixel (i, j) owns the unit square
whose center is (i + 0.5, j + 0.5).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidCameraError

_PARALLEL_EPS = 1e-12


@dataclass(frozen=True)
class CameraPose:
    eye: np.ndarray
    look_at: np.ndarray
    up: np.ndarray
    vertical_fov: float          # degrees
    near: float
    far: float
    viewport: tuple[int, int]    # (width, height) in pixels

    def __post_init__(self):
        object.__setattr__(self, "eye", np.asarray(self.eye, dtype=np.float64))
        object.__setattr__(self, "look_at", np.asarray(self.look_at, dtype=np.float64))
        object.__setattr__(self, "up", np.asarray(self.up, dtype=np.float64))
        if not (0.0 < self.near < self.far):
            raise InvalidCameraError("need 0 < near < far")
        if not (0.0 < self.vertical_fov < 180.0):
            raise InvalidCameraError("vertical_fov must be in (0, 180) degrees")
        w, h = self.viewport
        if w < 1 or h < 1:
            raise InvalidCameraError("viewport dimensions must be >= 1")
        fwd = self.look_at - self.eye
        n = np.linalg.norm(fwd)
        if n == 0.0:
            raise InvalidCameraError("eye and look_at coincide")
        if np.linalg.norm(np.cross(fwd / n, self.up)) < _PARALLEL_EPS:
            raise InvalidCameraError("up vector is parallel to the view direction")

    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Orthonormal (right, up, forward) of the view frame."""
        fwd = self.look_at - self.eye
        fwd = fwd / np.linalg.norm(fwd)
        right = np.cross(fwd, self.up)
        right = right / np.linalg.norm(right)
        up = np.cross(right, fwd)
        return right, up, fwd


def to_camera_space(camera: CameraPose, points: np.ndarray) -> np.ndarray:
    """Map world points (N, 3) to view coordinates (x right, y up, depth forward)."""
    right, up, fwd = camera.basis()
    rel = np.atleast_2d(np.asarray(points, dtype=np.float64)) - camera.eye
    return rel @ np.column_stack([right, up, fwd])


def project_camera_space(
    camera: CameraPose,
    cam_pts: np.ndarray,
    viewport: tuple[int, int] | None = None,
) -> np.ndarray:
    """Perspective-project view-space points onto the pixel plane.

    No clipping is applied here; callers must handle depth <= 0 themselves.
    An alternate viewport reuses the camera's field of view at a different
    buffer size (pixels stay square, so relative areas are preserved).
    """
    w, h = viewport if viewport is not None else camera.viewport
    tan_half = np.tan(np.radians(camera.vertical_fov) / 2.0)
    d = cam_pts[:, 2]
    scale = h / (2.0 * tan_half)
    px = w / 2.0 + cam_pts[:, 0] / d * scale
    py = h / 2.0 - cam_pts[:, 1] / d * scale
    return np.column_stack([px, py])


def project_points(camera: CameraPose, points: np.ndarray):
    """Project world points; returns (pixels (N, 2), in_frustum_depth (N,) bool).

    The boolean marks points whose depth lies in [near, far]; lateral
    frustum culling is left to the caller (a mask lookup already does it).
    Pixel values on clipped rows are meaningless and must be ignored.
    """
    cam = to_camera_space(camera, points)
    d = cam[:, 2]
    visible = (d >= camera.near) & (d <= camera.far)
    if not visible.all():
        # keep the projection division benign on clipped rows
        cam = cam.copy()
        cam[~visible, 2] = 1.0
    return project_camera_space(camera, cam), visible
