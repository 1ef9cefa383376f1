import numpy as np
import pytest

from conftest import grid_from_field
from haloscope.errors import (
    BadLinkError,
    BrokenLinkError,
    DuplicateHaloIdError,
    EmptyTraceError,
    FofViolationError,
    NoSuchClusterError,
    NoSuchHaloError,
)
from haloscope.forest import (
    CATALOG_HEADER,
    HaloRecord,
    MergerForest,
    extract_merger_subtree,
    extract_trace_paths,
    halos_in_selection,
    load_merger_forest,
    main_progenitor_line,
    validate_forest,
    write_catalog,
)
from haloscope.snapshots import ParticleSnapshot


def halo(hid, t, desc=None, fof=None, master=True, center=(0, 0, 0), mass=1.0,
         radius=1.0, dispersion=0.0, density=0.0):
    return HaloRecord(halo_id=hid, timestep=t, descendant_id=desc,
                      fof_group_id=fof if fof is not None else hid,
                      is_master=master, center=np.asarray(center, float),
                      radius=radius, mass=mass, dispersion=dispersion, density=density)


def test_chain_progenitors():
    forest = MergerForest.from_records([
        halo(1, 0, desc=2), halo(2, 1, desc=3), halo(3, 2),
    ])
    assert validate_forest(forest) == []
    assert forest.progenitors(3) == [2]
    assert forest.progenitors(2) == [1]
    assert forest.progenitors(1) == []


def test_catalog_round_trip_field_exact(tmp_path):
    rng = np.random.default_rng(1)
    records = [halo(i + 1, 0, mass=float(rng.uniform(1, 5)),
                    center=rng.normal(0, 100, 3), dispersion=float(rng.random()))
               for i in range(50)]
    forest = MergerForest.from_records(records)
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    write_catalog(forest, p1)
    back = load_merger_forest(p1)
    assert np.array_equal(back.halo_id, forest.halo_id)
    assert np.array_equal(back.center, forest.center)
    assert np.array_equal(back.mass, forest.mass)
    write_catalog(back, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_catalog_header_enforced(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("wrong,header\n1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        load_merger_forest(path)


def test_empty_descendant_parses_as_none(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text(CATALOG_HEADER + "\n7,0,,7,1,0.0,0.0,0.0,1.0,1.0,0.0,0.0\n")
    forest = load_merger_forest(path)
    assert forest.record(0).descendant_id is None


def test_duplicate_id_rejected(tmp_path):
    forest = MergerForest.from_records([halo(1, 0), halo(1, 1)])
    kinds = [v.kind for v in validate_forest(forest)]
    assert kinds == ["duplicate-id"]
    path = tmp_path / "c.csv"
    write_catalog(forest, path)
    with pytest.raises(DuplicateHaloIdError):
        load_merger_forest(path)


def test_dangling_descendant_rejected(tmp_path):
    forest = MergerForest.from_records([halo(1, 0, desc=99)])
    assert [v.kind for v in validate_forest(forest)] == ["broken-link"]
    path = tmp_path / "c.csv"
    write_catalog(forest, path)
    with pytest.raises(BrokenLinkError):
        load_merger_forest(path)


def test_same_timestep_descendant_rejected(tmp_path):
    forest = MergerForest.from_records([halo(1, 0, desc=2), halo(2, 0)])
    assert [v.kind for v in validate_forest(forest)] == ["bad-link"]
    path = tmp_path / "c.csv"
    write_catalog(forest, path)
    with pytest.raises(BadLinkError):
        load_merger_forest(path)


def test_fof_violations():
    # two masters in one group
    forest = MergerForest.from_records([
        halo(1, 0, fof=5, master=True), halo(2, 0, fof=5, master=True),
    ])
    v = validate_forest(forest)
    assert [x.kind for x in v] == ["fof-violation"]
    assert set(v[0].halo_ids) == {1, 2}
    # satellite outweighing the master
    forest = MergerForest.from_records([
        halo(1, 0, fof=5, master=True, mass=1.0),
        halo(2, 0, fof=5, master=False, mass=9.0),
    ])
    v = validate_forest(forest)
    assert [x.kind for x in v] == ["fof-violation"]
    assert v[0].halo_ids == (1, 2)
    # no master at all
    forest = MergerForest.from_records([halo(1, 0, fof=5, master=False)])
    assert [x.kind for x in validate_forest(forest)] == ["fof-violation"]


def test_cycle_detected_by_brute_force_comparison():
    forest = MergerForest.from_records([
        halo(1, 0, desc=2), halo(2, 1, desc=3), halo(3, 2, desc=1),
    ])
    kinds = {v.kind for v in validate_forest(forest)}
    assert "cycle" in kinds

    # oracle: explicit walk with a visited set from every node
    def has_cycle(forest):
        desc = {int(a): int(b) for a, b in
                zip(forest.halo_id, forest.descendant_id) if b != -1}
        for start in desc:
            seen = set()
            node = start
            while node in desc:
                if node in seen:
                    return True
                seen.add(node)
                node = desc[node]
        return False

    assert has_cycle(forest)
    clean = MergerForest.from_records([halo(1, 0, desc=2), halo(2, 1)])
    assert not has_cycle(clean)
    assert validate_forest(clean) == []


def merge_tree_forest():
    """Two progenitor streams merging at t=2, plus a quiet tail."""
    return MergerForest.from_records([
        halo(10, 0, desc=20, mass=8.0), halo(11, 0, desc=21, mass=5.0),
        halo(20, 1, desc=30, mass=8.5), halo(21, 1, desc=30, mass=5.5),
        halo(12, 0, desc=21, mass=0.5),
        halo(30, 2, desc=40, mass=15.0),
        halo(40, 3, mass=15.2),
    ])


def test_subtree_chain():
    forest = MergerForest.from_records([
        halo(1, 0, desc=2), halo(2, 1, desc=3), halo(3, 2),
    ])
    sub = extract_merger_subtree(forest, 3)
    assert sub.node_ids.tolist() == [3, 2, 1]
    assert sub.edges == [(2, 3), (1, 2)]


def test_subtree_merge_streams_and_bfs_order():
    forest = merge_tree_forest()
    sub = extract_merger_subtree(forest, 40)
    assert set(sub.node_ids.tolist()) == {40, 30, 20, 21, 10, 11, 12}
    # BFS with heaviest progenitor first: 20 (8.5) precedes 21 (5.5)
    assert sub.node_ids.tolist()[:4] == [40, 30, 20, 21]
    assert (21, 30) in sub.edges and (20, 30) in sub.edges


def test_subtree_equals_fixpoint_oracle():
    forest = merge_tree_forest()

    def fixpoint(root):
        keep = {root}
        changed = True
        while changed:
            changed = False
            for hid, desc in zip(forest.halo_id, forest.descendant_id):
                if desc != -1 and int(desc) in keep and int(hid) not in keep:
                    keep.add(int(hid))
                    changed = True
        return keep

    for root in (40, 30, 21, 10):
        sub = extract_merger_subtree(forest, root)
        assert set(sub.node_ids.tolist()) == fixpoint(root)
        # membership symmetry: h in subtree(r) iff r on h's descendant chain
        for hid in forest.halo_id:
            chain = set()
            node = int(hid)
            while node != -1:
                chain.add(node)
                row = forest.row_of(node, missing_ok=True)[0]
                node = int(forest.descendant_id[row]) if row >= 0 else -1
            assert (int(hid) in set(sub.node_ids.tolist())) == (root in chain)


def test_unknown_root_raises():
    with pytest.raises(NoSuchHaloError):
        extract_merger_subtree(merge_tree_forest(), 999)


def test_main_progenitor_line_matches_bruteforce():
    forest = merge_tree_forest()
    line = main_progenitor_line(forest, 40)
    ids = forest.halo_id[line].tolist()
    assert ids == [10, 20, 30, 40]   # heaviest at each merge, time ascending

    # exhaustive walk oracle: at each step pick max (mass, -id)
    def walk(root):
        out = [root]
        while True:
            progs = forest.progenitors(out[-1])
            if not progs:
                return out[::-1]
            rows = forest.row_of(progs)
            best = progs[int(np.lexsort((rows, -forest.mass[rows]))[0])]
            out.append(best)

    assert ids == walk(40)


def snapshots_with_particle(tracks):
    """tracks: {pid: {t: position}} -> list of snapshots over all t."""
    all_t = sorted({t for tr in tracks.values() for t in tr})
    snaps = []
    for t in all_t:
        pids = [p for p, tr in tracks.items() if t in tr]
        pos = np.array([tracks[p][t] for p in pids], dtype=float).reshape(-1, 3)
        n = len(pids)
        snaps.append(ParticleSnapshot(
            timestep=t, ids=np.asarray(pids, dtype=np.uint64), positions=pos,
            velocities=np.zeros((n, 3)), mass=np.ones(n),
            dispersion=np.zeros(n), density=np.zeros(n)))
    return snaps


def test_particle_trace_full_coverage():
    tracks = {7: {t: (t, 0, 0) for t in range(64)}}
    paths = extract_trace_paths(snapshots_with_particle(tracks), {7})
    assert len(paths) == 1
    assert len(paths[0].segments) == 1
    seg = paths[0].segments[0]
    assert len(seg.timesteps) == 64
    assert np.all(np.diff(seg.timesteps) == 1)


def test_particle_trace_gap_splits_segments():
    present = list(range(0, 10)) + list(range(12, 21))
    tracks = {3: {t: (t, t, 0) for t in present}}
    paths = extract_trace_paths(snapshots_with_particle(tracks), [3])
    segs = paths[0].segments
    assert [len(s.timesteps) for s in segs] == [10, 9]
    for s in segs:
        assert np.all(np.diff(s.timesteps) == 1)


def test_halo_trace_follows_main_line():
    forest = merge_tree_forest()
    paths = extract_trace_paths([], 40, forest=forest)
    seg = paths[0].segments[0]
    assert seg.timesteps.tolist() == [0, 1, 2, 3]
    line = main_progenitor_line(forest, 40)
    assert np.array_equal(seg.positions, forest.center[line])


def test_empty_trace_raises():
    with pytest.raises(EmptyTraceError):
        extract_trace_paths(snapshots_with_particle({1: {0: (0, 0, 0)}}), {99})


def selection_with_two_clusters():
    from haloscope.camera import CameraPose
    from haloscope.selection import classify_voxels, split_clusters
    from haloscope.selection.grid import SelectionParams
    from haloscope.selection.pipeline import SelectionResult
    from haloscope.selection.raster import rank_projected_areas
    from haloscope.selection.surface import extract_cluster_surfaces

    nd = np.zeros((11, 4, 4))
    nd[1:4, :, :] = 5.0    # blob A: x in [1, 3]
    nd[7:10, :, :] = 5.0   # blob B: x in [7, 9]
    grid = grid_from_field(nd)
    rho0 = 1.0
    cls = classify_voxels(grid, rho0)
    mesh = extract_cluster_surfaces(grid, cls)
    clusters = split_clusters(grid, cls, rho0, mesh)
    cam = CameraPose(eye=(5, 1.5, 30), look_at=(5, 1.5, 1.5), up=(0, 1, 0),
                     vertical_fov=45.0, near=0.1, far=100.0, viewport=(64, 64))
    counts, primary = rank_projected_areas(clusters, cam, (64, 64))
    return SelectionResult(
        primary_cluster_id=primary, clusters=clusters, projected_pixel_counts=counts,
        grid=grid, classification=cls, mesh=mesh, rho0=rho0,
        marked_indices=np.empty(0, dtype=np.int64), camera=cam,
        params=SelectionParams(grid_n=8))


def test_halos_in_selection_rules():
    result = selection_with_two_clusters()
    assert len(result.clusters) == 2
    records = [
        halo(1, 0, center=(2.0, 1.5, 1.5), mass=5.0),    # inner voxel of cluster 1
        halo(2, 0, center=(8.0, 1.5, 1.5), mass=4.0),    # inside cluster 2
        halo(3, 0, center=(50.0, 0.0, 0.0), mass=9.0),   # outside the grid box
        halo(4, 0, center=(5.0, 1.5, 1.5), mass=2.0),    # between the blobs: outer voxel
        halo(5, 0, center=(2.5, 1.5, 1.5), mass=50.0),   # also cluster 1, heavier
        halo(6, 1, center=(2.0, 1.5, 1.5), mass=3.0),    # wrong timestep
    ]
    forest = MergerForest.from_records(records)
    got = halos_in_selection(forest, 0, result, 1)
    assert got == [5, 1]   # descending mass
    assert halos_in_selection(forest, 0, result, 2) == [2]
    with pytest.raises(NoSuchClusterError):
        halos_in_selection(forest, 0, result, 99)


def test_halos_in_selection_matches_particle_rule():
    # replacing each center by a synthetic particle must reproduce membership
    from haloscope.selection import classify_points_in_isosurface
    result = selection_with_two_clusters()
    rng = np.random.default_rng(5)
    centers = rng.uniform([0.0, 0.0, 0.0], [10.0, 3.0, 3.0], (200, 3))
    records = [halo(i + 1, 0, center=c, mass=float(i)) for i, c in enumerate(centers)]
    forest = MergerForest.from_records(records)
    got = set(halos_in_selection(forest, 0, result, result.primary_cluster_id))
    cluster = result.clusters.by_id(result.primary_cluster_id)
    inside = classify_points_in_isosurface(result.grid, result.rho0, centers,
                                           result.classification)
    cells = result.grid.cell_of(centers)
    in_cluster = np.isin(result.grid.linear_index(cells), cluster.voxels)
    expect = {i + 1 for i in np.flatnonzero(inside & in_cluster)}
    assert got == expect


def test_trace_monotone_property():
    rng = np.random.default_rng(2)
    tracks = {}
    for pid in range(1, 20):
        present = sorted(rng.choice(32, size=rng.integers(1, 32), replace=False).tolist())
        tracks[pid] = {t: rng.normal(0, 1, 3) for t in present}
    paths = extract_trace_paths(snapshots_with_particle(tracks), set(tracks))
    for p in paths:
        for seg in p.segments:
            assert np.all(np.diff(seg.timesteps) == 1)
    covered = {p.subject: sum(len(s.timesteps) for s in p.segments) for p in paths}
    assert covered == {pid: len(tr) for pid, tr in tracks.items()}
