import numpy as np
import pytest

from haloscope.camera import CameraPose
from haloscope.selection.grid import DensityGrid


def grid_from_field(node_density, origin=(0.0, 0.0, 0.0), cell=1.0,
                    positions=None) -> DensityGrid:
    """DensityGrid over an explicit node lattice, bypassing deposition.

    Positions, when given, are bucketed so particle-assignment code paths
    work; their node contributions are NOT added to the field.
    """
    nd = np.asarray(node_density, dtype=np.float64)
    dims = tuple(s - 1 for s in nd.shape)
    nx, ny, nz = dims
    if positions is None:
        positions = np.empty((0, 3))
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    if len(positions):
        r = (positions - np.asarray(origin)) / cell
        cells = np.clip(np.floor(r).astype(np.int64), 0, np.asarray(dims) - 1)
        lin = (cells[:, 0] * ny + cells[:, 1]) * nz + cells[:, 2]
        order = np.argsort(lin * len(lin) + np.arange(len(lin)))
        counts = np.bincount(lin, minlength=nx * ny * nz)
        start = np.concatenate([[0], np.cumsum(counts)])
    else:
        order = np.empty(0, dtype=np.int64)
        start = np.zeros(nx * ny * nz + 1, dtype=np.int64)
    return DensityGrid(
        origin=np.asarray(origin, dtype=np.float64),
        cell_length=float(cell),
        dims=dims,
        node_density=nd,
        positions=positions,
        voxel_start=start,
        voxel_items=order,
    )


@pytest.fixture
def camera():
    return CameraPose(eye=(0.0, 0.0, 40.0), look_at=(0.0, 0.0, 0.0), up=(0.0, 1.0, 0.0),
                      vertical_fov=60.0, near=0.1, far=200.0, viewport=(800, 600))
