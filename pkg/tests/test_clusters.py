from collections import deque

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import grid_from_field
from haloscope.selection import classify_voxels, label_voxels, split_clusters


def bfs_six_connected_oracle(occupied):
    """Plain queue flood fill over a 3D boolean array, ascending seeds."""
    dims = occupied.shape
    labels = np.zeros(dims, dtype=np.int64)
    next_label = 0
    for seed in np.argwhere(occupied):
        seed = tuple(seed)
        if labels[seed]:
            continue
        next_label += 1
        labels[seed] = next_label
        queue = deque([seed])
        while queue:
            x, y, z = queue.popleft()
            for dx, dy, dz in ((1, 0, 0), (-1, 0, 0), (0, 1, 0),
                               (0, -1, 0), (0, 0, 1), (0, 0, -1)):
                nx, ny, nz = x + dx, y + dy, z + dz
                if not (0 <= nx < dims[0] and 0 <= ny < dims[1] and 0 <= nz < dims[2]):
                    continue
                if occupied[nx, ny, nz] and not labels[nx, ny, nz]:
                    labels[nx, ny, nz] = next_label
                    queue.append((nx, ny, nz))
    return labels


def crafted_adjacent_boundary_grid():
    """Fig-style false-merge shape: two boundary voxels touching face to
    face with the shared node plane entirely below threshold."""
    nd = np.zeros((3, 2, 2))
    nd[0, :, :] = 1.0
    nd[2, :, :] = 1.0
    return grid_from_field(nd)


def test_adjacent_boundary_splits_with_tags():
    grid = crafted_adjacent_boundary_grid()
    cls = classify_voxels(grid, 0.5)
    assert label_voxels(cls, use_tag_condition=True)[1] == 2
    assert label_voxels(cls, use_tag_condition=False)[1] == 1


def test_two_separated_blobs():
    x = np.linspace(-1, 1, 17)
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    nd = (np.exp(-((X - 0.55) ** 2 + Y ** 2 + Z ** 2) / (2 * 0.14 ** 2)) +
          np.exp(-((X + 0.55) ** 2 + Y ** 2 + Z ** 2) / (2 * 0.14 ** 2)))
    grid = grid_from_field(nd)
    cls = classify_voxels(grid, 0.3)
    labels, n = label_voxels(cls, use_tag_condition=True)
    assert n == 2
    # memberships equal the brute-force components (same voxel sets and ids)
    oracle = bfs_six_connected_oracle(cls.occupied_mask())
    assert np.array_equal(labels.reshape(grid.dims), oracle)


def test_single_blob_one_cluster_with_all_particles():
    x = np.linspace(-1, 1, 13)
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    nd = np.exp(-(X ** 2 + Y ** 2 + Z ** 2) / (2 * 0.35 ** 2))
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.9, 0.9, (2000, 3))
    grid = grid_from_field(nd, origin=(-1, -1, -1), cell=2 / 12, positions=pts)
    rho0 = float(nd.mean())
    cls = classify_voxels(grid, rho0)
    clusters = split_clusters(grid, cls)
    assert len(clusters) == 1
    from haloscope.selection import classify_points_in_isosurface
    inside = classify_points_in_isosurface(grid, rho0, pts, cls)
    assert np.array_equal(clusters.clusters[0].member_particles, np.flatnonzero(inside))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), fill=st.floats(0.2, 0.8))
def test_tag_disabled_equals_bfs_oracle(seed, fill):
    rng = np.random.default_rng(seed)
    nd = rng.random((7, 7, 7))
    grid = grid_from_field(nd)
    cls = classify_voxels(grid, float(fill))
    labels, n = label_voxels(cls, use_tag_condition=False)
    oracle = bfs_six_connected_oracle(cls.occupied_mask())
    assert np.array_equal(labels.reshape(grid.dims), oracle)
    assert n == oracle.max()


def test_partition_property_random_grids():
    rng = np.random.default_rng(77)
    for _ in range(10):
        nd = rng.random((6, 6, 6)) * 2
        pts = rng.uniform(0, 4.999, (500, 3))   # 6-node lattice spans 5 cells
        grid = grid_from_field(nd, positions=pts)
        rho0 = 1.0
        cls = classify_voxels(grid, rho0)
        clusters = split_clusters(grid, cls)
        from haloscope.selection import classify_points_in_isosurface
        inside = set(np.flatnonzero(classify_points_in_isosurface(grid, rho0, pts, cls)).tolist())
        seen: set[int] = set()
        for c in clusters:
            members = set(c.member_particles.tolist())
            assert not members & seen, "cluster member sets must be disjoint"
            seen |= members
        assert seen == inside


def test_cluster_ids_follow_seed_order():
    nd = np.zeros((9, 2, 2))
    nd[0:2, :, :] = 1.0   # blob A: full cell at the low end
    nd[6:8, :, :] = 1.0   # blob B: full cell near the high end
    grid = grid_from_field(nd)
    cls = classify_voxels(grid, 0.5)
    clusters = split_clusters(grid, cls)
    assert [c.cluster_id for c in clusters.clusters] == [1, 2]
    # cluster 1 owns the lower voxel indices
    assert clusters.clusters[0].voxels.min() < clusters.clusters[1].voxels.min()


def test_per_cluster_surfaces_partition_the_mesh():
    x = np.linspace(-1, 1, 15)
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    nd = (np.exp(-((X - 0.5) ** 2 + Y ** 2 + Z ** 2) / (2 * 0.15 ** 2)) +
          np.exp(-((X + 0.5) ** 2 + Y ** 2 + Z ** 2) / (2 * 0.15 ** 2)))
    grid = grid_from_field(nd)
    cls = classify_voxels(grid, 0.25)
    from haloscope.selection import extract_cluster_surfaces
    mesh = extract_cluster_surfaces(grid, cls)
    clusters = split_clusters(grid, cls, mesh=mesh)
    assert len(clusters) == 2
    assert sum(c.surface.triangle_count for c in clusters) == mesh.triangle_count
    for c in clusters:
        assert np.isin(c.surface.tri_voxel, c.voxels).all()


def test_empty_grid_empty_clusterset():
    grid = grid_from_field(np.zeros((3, 3, 3)))
    cls = classify_voxels(grid, 1.0)
    assert len(split_clusters(grid, cls)) == 0
