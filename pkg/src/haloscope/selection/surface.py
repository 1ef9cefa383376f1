"""Step 3: voxel classification against the density threshold and
isosurface extraction by marching cubes.

Classification packs, per voxel, the 8-bit corner case code (0 = fully
outside, 255 = fully inside, anything else = boundary) plus a 3-bit
connectivity tag: bit k is set when at least one of the voxel's four
edges parallel to axis k has both endpoint nodes at or above the
threshold. The tag later gates the cluster-splitting flood fill.

All threshold comparisons are inclusive (density >= rho0) so that
classification, extraction and per-particle tests can never disagree on
an exact-threshold node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO

import numpy as np

from .grid import DensityGrid, trilinear_density
from .mc_tables import CORNER_OFFSETS, EDGE_ENDPOINTS, TRI_TABLE

CELL_OUTER = 0
CELL_INNER = 255

# axis each edge runs along, derived from its endpoint offsets
_EDGE_AXIS = np.argmax(
    np.abs(CORNER_OFFSETS[EDGE_ENDPOINTS[:, 1]] - CORNER_OFFSETS[EDGE_ENDPOINTS[:, 0]]),
    axis=1,
)


@dataclass
class VoxelClassification:
    cell_value: np.ndarray   # (Nx, Ny, Nz) uint8 case codes
    tag: np.ndarray          # (Nx, Ny, Nz) uint8, 3 bits
    threshold: float

    def boundary_mask(self) -> np.ndarray:
        return (self.cell_value != CELL_OUTER) & (self.cell_value != CELL_INNER)

    def occupied_mask(self) -> np.ndarray:
        """Inner or boundary voxels, i.e. anything with an above-threshold corner."""
        return self.cell_value != CELL_OUTER


def _corner_views(lattice: np.ndarray, dims: tuple[int, int, int]) -> list[np.ndarray]:
    """The 8 per-voxel corner views of a node lattice, in table corner order."""
    nx, ny, nz = dims
    return [
        lattice[ox:nx + ox, oy:ny + oy, oz:nz + oz]
        for ox, oy, oz in CORNER_OFFSETS
    ]


def classify_voxels(grid: DensityGrid, rho0: float) -> VoxelClassification:
    """Case-code and tag every voxel of the grid against rho0."""
    if rho0 < 0:
        raise ValueError("rho0 must be >= 0")
    above = grid.node_density >= rho0
    corners = _corner_views(above, grid.dims)

    cell_value = np.zeros(grid.dims, dtype=np.uint8)
    for i, c in enumerate(corners):
        cell_value |= (c.astype(np.uint8) << i)

    tag = np.zeros(grid.dims, dtype=np.uint8)
    for edge, (a, b) in enumerate(EDGE_ENDPOINTS):
        axis = int(_EDGE_AXIS[edge])
        tag |= (corners[a] & corners[b]).astype(np.uint8) << axis
    return VoxelClassification(cell_value=cell_value, tag=tag, threshold=float(rho0))


@dataclass
class IsoSurfaceMesh:
    """Triangle soup with a voxel-to-triangle lookup.

    Triangles are stored sorted by owning voxel (linear index), so the
    triangles of one voxel form a contiguous run found by bisection.
    """
    triangles: np.ndarray    # (T, 3, 3) float64 vertex positions
    tri_voxel: np.ndarray    # (T,) linear voxel index, ascending

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)

    def voxel_triangle_range(self, voxel: int) -> tuple[int, int]:
        lo = int(np.searchsorted(self.tri_voxel, voxel, side="left"))
        hi = int(np.searchsorted(self.tri_voxel, voxel, side="right"))
        return lo, hi

    def subset_for_voxels(self, voxels: np.ndarray) -> "IsoSurfaceMesh":
        """Triangles owned by the given voxels (the per-cluster lookup)."""
        keep = np.isin(self.tri_voxel, np.asarray(voxels, dtype=np.int64))
        return IsoSurfaceMesh(self.triangles[keep], self.tri_voxel[keep])


def extract_cluster_surfaces(grid: DensityGrid, classification: VoxelClassification) -> IsoSurfaceMesh:
    """Marching-cubes triangulation of every boundary voxel.

    Vertices are placed on voxel edges by linear interpolation to the
    threshold density, so each emitted vertex lies on the isosurface by
    construction. Voxels are processed grouped by case code, which keeps
    the table lookups vectorized; the result is then ordered by voxel.
    """
    rho0 = classification.threshold
    nx, ny, nz = grid.dims
    cases = classification.cell_value
    boundary = classification.boundary_mask()
    if not boundary.any():
        return IsoSurfaceMesh(np.empty((0, 3, 3)), np.empty(0, dtype=np.int64))

    vox_cells = np.argwhere(boundary)
    vox_cases = cases[boundary]

    corner_density = np.stack(_corner_views(grid.node_density, grid.dims), axis=-1)
    vox_density = corner_density[boundary]          # (B, 8)

    tri_chunks: list[np.ndarray] = []
    vox_chunks: list[np.ndarray] = []
    for case in np.unique(vox_cases):
        rows = TRI_TABLE[case]
        edges = rows[rows >= 0]
        if edges.size == 0:
            continue
        sel = vox_cases == case
        cells = vox_cells[sel]                       # (K, 3)
        dens = vox_density[sel]                      # (K, 8)
        a = EDGE_ENDPOINTS[edges, 0]
        b = EDGE_ENDPOINTS[edges, 1]
        da = dens[:, a]                              # (K, E)
        db = dens[:, b]
        t = (rho0 - da) / (db - da)                  # crossing edges: da != db
        pa = cells[:, None, :] + CORNER_OFFSETS[a][None, :, :]
        pb = cells[:, None, :] + CORNER_OFFSETS[b][None, :, :]
        verts = pa + t[:, :, None] * (pb - pa)       # in cell units
        verts = grid.origin + verts * grid.cell_length
        tris = verts.reshape(len(cells), len(edges) // 3, 3, 3)
        tri_chunks.append(tris.reshape(-1, 3, 3))
        vox_chunks.append(np.repeat(grid.linear_index(cells), len(edges) // 3))

    if not tri_chunks:
        return IsoSurfaceMesh(np.empty((0, 3, 3)), np.empty(0, dtype=np.int64))
    triangles = np.concatenate(tri_chunks)
    tri_voxel = np.concatenate(vox_chunks)
    order = np.argsort(tri_voxel, kind="stable")
    return IsoSurfaceMesh(triangles[order], tri_voxel[order])


def classify_points_in_isosurface(
    grid: DensityGrid,
    rho0: float,
    points: np.ndarray,
    classification: VoxelClassification | None = None,
) -> np.ndarray:
    """Inside/outside test for points in the grid box.

    Points in inner voxels are inside and points in outer voxels outside
    without interpolation; only boundary-voxel points pay for a trilinear
    evaluation. Consistent with pure trilinear thresholding because the
    interpolant is a convex combination of the corner densities.
    """
    if classification is None:
        classification = classify_voxels(grid, rho0)
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    cells = grid.cell_of(points)    # raises OutOfDomainError if outside
    codes = classification.cell_value[cells[:, 0], cells[:, 1], cells[:, 2]]
    inside = codes == CELL_INNER
    on_boundary = (codes != CELL_OUTER) & ~inside
    if on_boundary.any():
        inside[on_boundary] = trilinear_density(grid, points[on_boundary]) >= rho0
    return inside


def classify_particle_in_isosurface(grid: DensityGrid, rho0: float, position) -> bool:
    """Single-point convenience wrapper around classify_points_in_isosurface."""
    return bool(classify_points_in_isosurface(grid, rho0, np.asarray(position))[0])


def write_triangle_soup(mesh: IsoSurfaceMesh, stream: IO[str]) -> None:
    """ASCII mesh dump: one `v x y z` line per vertex then 1-based `f i j k`."""
    for tri in mesh.triangles:
        for v in tri:
            stream.write(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
    for i in range(mesh.triangle_count):
        stream.write(f"f {3 * i + 1} {3 * i + 2} {3 * i + 3}\n")
