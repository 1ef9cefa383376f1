"""Step 4: split the thresholded region into independent clusters.

Connectivity is 6-neighborhood over inner and boundary voxels. With the
tag condition enabled (the default), a step between two voxels along
axis k additionally requires that at least one of the two voxels owns a
qualifying edge parallel to k (both edge endpoints at or above the
threshold). Two structures whose skins merely touch face-to-face share
no such edge across the gap, so they split; steps within one structure
always have a qualifying edge on the denser side of the pair.

Cluster ids are assigned in flood order: seeds are taken in ascending
voxel linear index among not-yet-labeled voxels, so cluster 1 is the
component containing the lowest-index occupied voxel, and so on.

Particles are assigned per voxel: everything bucketed in an inner voxel
belongs to the voxel's cluster; boundary-voxel particles belong only if
their trilinearly interpolated density clears the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .grid import DensityGrid, trilinear_density
from .surface import (
    CELL_INNER,
    IsoSurfaceMesh,
    VoxelClassification,
    extract_cluster_surfaces,
)


@dataclass
class Cluster:
    cluster_id: int
    member_particles: np.ndarray   # rows into grid.positions, ascending
    voxels: np.ndarray             # linear voxel indices, ascending
    surface: IsoSurfaceMesh


@dataclass
class ClusterSet:
    clusters: list[Cluster]

    def __len__(self) -> int:
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def by_id(self, cluster_id: int) -> Cluster | None:
        for c in self.clusters:
            if c.cluster_id == cluster_id:
                return c
        return None

    def voxel_labels(self, dims: tuple[int, int, int]) -> np.ndarray:
        """Dense (Nx, Ny, Nz) int array of cluster ids, 0 where unclaimed."""
        out = np.zeros(int(np.prod(dims)), dtype=np.int64)
        for c in self.clusters:
            out[c.voxels] = c.cluster_id
        return out.reshape(dims)


def _axis_edges(occupied: np.ndarray, gate: np.ndarray | None, axis: int, strides):
    """Flat index pairs of allowed steps along one axis."""
    lo = [slice(None)] * 3
    hi = [slice(None)] * 3
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    lo, hi = tuple(lo), tuple(hi)
    ok = occupied[lo] & occupied[hi]
    if gate is not None:
        ok &= gate[lo] | gate[hi]
    pad = np.zeros(occupied.shape, dtype=bool)
    pad[lo] = ok
    src = np.flatnonzero(pad)
    return src, src + strides[axis]


def label_voxels(
    classification: VoxelClassification,
    use_tag_condition: bool = True,
) -> tuple[np.ndarray, int]:
    """Flood-fill labeling of occupied voxels.

    Returns (flat labels array over all voxels, cluster count); labels are
    1..n on occupied voxels and 0 elsewhere.
    """
    occupied = classification.occupied_mask()
    dims = occupied.shape
    n_vox = occupied.size
    occ_flat = np.flatnonzero(occupied)
    if occ_flat.size == 0:
        return np.zeros(n_vox, dtype=np.int64), 0

    strides = (dims[1] * dims[2], dims[2], 1)
    rows, cols = [], []
    for axis in range(3):
        gate = None
        if use_tag_condition:
            gate = (classification.tag >> axis) & 1 > 0
        src, dst = _axis_edges(occupied, gate, axis, strides)
        rows.append(src)
        cols.append(dst)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)),
        shape=(n_vox, n_vox),
    )
    _, comp = connected_components(graph, directed=False)

    # renumber components in order of their lowest occupied voxel index,
    # which is exactly the ascending-seed flood order
    occ_comp = comp[occ_flat]
    _, first_pos = np.unique(occ_comp, return_index=True)
    seed_order = np.argsort(first_pos, kind="stable")
    cluster_of_comp = np.empty(len(first_pos), dtype=np.int64)
    cluster_of_comp[seed_order] = np.arange(1, len(first_pos) + 1)
    comp_ids = np.unique(occ_comp)

    labels = np.zeros(n_vox, dtype=np.int64)
    labels[occ_flat] = cluster_of_comp[np.searchsorted(comp_ids, occ_comp)]
    return labels, len(comp_ids)


def split_clusters(
    grid: DensityGrid,
    classification: VoxelClassification,
    rho0: float | None = None,
    mesh: IsoSurfaceMesh | None = None,
    use_tag_condition: bool = True,
) -> ClusterSet:
    """Label connected components and distribute particles and surface
    triangles to them."""
    if rho0 is None:
        rho0 = classification.threshold
    if mesh is None:
        mesh = extract_cluster_surfaces(grid, classification)

    labels, n_clusters = label_voxels(classification, use_tag_condition)
    if n_clusters == 0:
        return ClusterSet(clusters=[])

    # particle -> voxel from the CSR lookup, then particle -> cluster
    counts = np.diff(grid.voxel_start)
    particle_voxel = np.repeat(np.arange(grid.voxel_count), counts)
    particle_rows = grid.voxel_items
    particle_label = labels[particle_voxel]
    claimed = particle_label > 0
    if claimed.any():
        codes = classification.cell_value.ravel()[particle_voxel[claimed]]
        rows_claimed = particle_rows[claimed]
        keep = codes == CELL_INNER
        on_boundary = ~keep
        if on_boundary.any():
            dens = trilinear_density(grid, grid.positions[rows_claimed[on_boundary]])
            keep[on_boundary] = dens >= rho0
        member_rows = rows_claimed[keep]
        member_label = particle_label[claimed][keep]
    else:
        member_rows = np.empty(0, dtype=np.int64)
        member_label = np.empty(0, dtype=np.int64)

    clusters = []
    for cid in range(1, n_clusters + 1):
        voxels = np.flatnonzero(labels == cid)
        members = np.sort(member_rows[member_label == cid])
        clusters.append(Cluster(
            cluster_id=cid,
            member_particles=members,
            voxels=voxels,
            surface=mesh.subset_for_voxels(voxels),
        ))
    return ClusterSet(clusters=clusters)
