import numpy as np
import pytest

from haloscope.errors import InvalidPointError
from haloscope.forest import MergerForest, extract_merger_subtree
from haloscope.layout import (
    DiscEntry,
    DiscStyle,
    Layout2D,
    encode_discs,
    layout_halos,
    layout_merger_tree,
    mds_project,
    pick_halo,
    time_colormap,
)
from test_forest import halo, merge_tree_forest


def align_rigid(A, B):
    """Best rigid (orthogonal, reflection allowed) alignment of A onto B."""
    A = A - A.mean(axis=0)
    B = B - B.mean(axis=0)
    U, _, Vt = np.linalg.svd(A.T @ B)
    return A @ (U @ Vt), B


def pairwise(points):
    d = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", d, d))


def mds_oracle(points):
    """Full eigendecomposition classical MDS."""
    points = np.asarray(points, float)
    n = len(points)
    D2 = pairwise(points) ** 2
    J = np.eye(n) - np.full((n, n), 1 / n)
    B = -0.5 * J @ D2 @ J
    evals, evecs = np.linalg.eigh(B)
    idx = np.argsort(evals)[::-1][:2]
    lam = np.clip(evals[idx], 0, None)
    return evecs[:, idx] * np.sqrt(lam)


def test_single_point_origin():
    assert np.array_equal(mds_project(np.array([[3.0, 4.0, 5.0]])), np.zeros((1, 2)))


def test_two_points_on_x_axis():
    out = mds_project(np.array([[0.0, 0.0, 0.0], [3.0, 0.0, 4.0]]))
    assert out[:, 1] == pytest.approx([0.0, 0.0])
    assert sorted(out[:, 0].tolist()) == pytest.approx([-2.5, 2.5], abs=1e-9)
    assert np.linalg.norm(out[0] - out[1]) == pytest.approx(5.0, abs=1e-9)


def test_unit_square_distances_preserved():
    pts = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float)
    out = mds_project(pts)
    assert np.allclose(pairwise(out), pairwise(pts), atol=1e-6)


def test_coplanar_configuration_recovered():
    rng = np.random.default_rng(3)
    basis = np.linalg.qr(rng.normal(size=(3, 3)))[0][:, :2]
    flat = rng.normal(0, 2, (40, 2)) @ basis.T + rng.normal(0, 1, 3)
    out = mds_project(flat)
    assert np.abs(pairwise(out) - pairwise(flat)).max() <= 1e-6


def test_general_points_match_eigendecomposition_oracle():
    rng = np.random.default_rng(1)
    pts = rng.normal(0, 1, (50, 3)) * np.array([3.0, 1.5, 0.5])
    got = mds_project(pts)
    want = mds_oracle(pts)
    a, b = align_rigid(got, want)
    assert np.abs(a - b).max() <= 1e-6


def test_mds_determinism():
    rng = np.random.default_rng(9)
    pts = rng.normal(0, 1, (30, 3))
    a = mds_project(pts)
    b = mds_project(pts)
    assert np.array_equal(a, b)


def test_mds_sign_convention():
    rng = np.random.default_rng(4)
    pts = rng.normal(0, 2, (25, 3))
    out = mds_project(pts)
    for axis in range(2):
        col = out[:, axis]
        assert col[np.argmax(np.abs(col))] >= 0


def test_nonfinite_rejected():
    with pytest.raises(InvalidPointError):
        mds_project(np.array([[0.0, 0.0, np.nan]]))


def test_encode_discs_ranges():
    radius = np.array([1.0, 3.0, 5.0])
    disp = np.array([2.0, 2.0, 8.0])
    dens = np.array([0.0, 5.0, 10.0])
    r, colors, b = encode_discs(radius, disp, dens)
    assert r[0] == pytest.approx(3.0)     # min_px
    assert r[2] == pytest.approx(30.0)    # max_px
    assert colors[0] == colors[1]         # equal dispersion, identical hue
    assert b[0] == pytest.approx(0.25)    # brightness floor
    assert b[2] == pytest.approx(1.0)


def test_encode_discs_brightness_monotone():
    rng = np.random.default_rng(0)
    dens = rng.uniform(0, 100, 50)
    _, _, b = encode_discs(np.ones(50), np.zeros(50), dens)
    order = np.argsort(dens)
    assert np.all(np.diff(b[order]) >= -1e-12)


def test_encode_discs_degenerate_range_midpoint():
    r, _, b = encode_discs(np.full(3, 2.0), np.full(3, 1.0), np.full(3, 4.0))
    assert np.allclose(r, (3.0 + 30.0) / 2)
    assert np.allclose(b, 0.25 + 0.5 * 0.75)


def layout_of(entries):
    return Layout2D(entries=[
        DiscEntry(halo_id=h, x=x, y=y, disc_radius=r, color=(0, 0, 0), brightness=1.0)
        for h, x, y, r in entries
    ])


def test_pick_nearest_manhattan():
    layout = layout_of([(1, 10, 12, 5), (2, 13, 10, 5)])
    assert pick_halo(layout, (10, 10)) == 1      # L1 2 beats L1 3


def test_pick_tie_lowest_id():
    layout = layout_of([(9, 12, 10, 5), (4, 8, 10, 5)])
    assert pick_halo(layout, (10, 10)) == 4      # both at L1 2


def test_pick_cutoff():
    layout = layout_of([(1, 100, 100, 5)])
    assert pick_halo(layout, (100, 113)) == 1          # 13 <= 5 + 8
    assert pick_halo(layout, (100, 113.5)) is None     # 13.5 > 5 + 8
    assert pick_halo(layout_of([]), (0, 0)) is None


def test_pick_translation_invariance():
    rng = np.random.default_rng(8)
    entries = [(i + 1, float(x), float(y), float(r))
               for i, (x, y, r) in enumerate(rng.uniform(0, 100, (20, 3)) * [1, 1, 0.2])]
    layout = layout_of(entries)
    for _ in range(20):
        cursor = rng.uniform(0, 100, 2)
        shift = rng.uniform(-50, 50, 2)
        moved = layout_of([(h, x + shift[0], y + shift[1], r) for h, x, y, r in entries])
        assert pick_halo(layout, tuple(cursor)) == pick_halo(moved, tuple(cursor + shift))


def test_layout_halos_preserves_center_distances():
    records = [halo(i + 1, 0, center=c, mass=1.0 + i)
               for i, c in enumerate([(0, 0, 0), (10, 0, 0), (0, 10, 0), (10, 10, 0)])]
    forest = MergerForest.from_records(records)
    layout = layout_halos(forest, [1, 2, 3, 4])
    pts = np.array([[e.x, e.y] for e in layout.entries])
    want = pairwise(forest.center[forest.row_of([1, 2, 3, 4])])
    assert np.allclose(pairwise(pts), want, atol=1e-6)


def test_tree_layout_chain_collinear():
    forest = MergerForest.from_records([
        halo(1, 0, desc=2), halo(2, 1, desc=3), halo(3, 2, desc=4),
        halo(4, 3, desc=5), halo(5, 4),
    ])
    tree = layout_merger_tree(forest, extract_merger_subtree(forest, 5))
    xs = {n.x for n in tree.nodes}
    assert len(xs) == 1
    ys = sorted((n.level, n.y) for n in tree.nodes)
    # y strictly increases with timestep, earliest on top
    assert all(b[1] > a[1] for a, b in zip(ys, ys[1:]))


def test_tree_layout_merge_centering_and_streams():
    forest = merge_tree_forest()
    sub = extract_merger_subtree(forest, 40)
    tree = layout_merger_tree(forest, sub)
    x = {n.halo_id: n.x for n in tree.nodes}
    y = {n.halo_id: n.y for n in tree.nodes}
    assert x[30] == pytest.approx((x[20] + x[21]) / 2)
    assert x[21] == pytest.approx((x[11] + x[12]) / 2)
    assert x[40] == pytest.approx(x[30])
    # two maximal branches above the merge node
    above_merge = [hid for hid in x if y[hid] < y[30]]
    roots_of_streams = {20, 21}
    assert roots_of_streams <= set(above_merge)
    # level monotonicity along every edge
    level = {n.halo_id: n.level for n in tree.nodes}
    for e in tree.edges:
        assert level[e.from_id] == level[e.to_id] - 1
    # edge gradients take the incident nodes' colors
    color = {n.halo_id: n.color for n in tree.nodes}
    for e in tree.edges:
        assert e.c0 == color[e.from_id] and e.c1 == color[e.to_id]


def test_tree_layout_single_node():
    forest = MergerForest.from_records([halo(1, 0)])
    tree = layout_merger_tree(forest, extract_merger_subtree(forest, 1))
    assert len(tree.nodes) == 1 and tree.nodes[0].x == 0.0


def test_time_colormap_pinned_points():
    assert time_colormap(0.0) == (0, 255, 255)
    assert time_colormap(1.0 / 3.0) == (0, 0, 255)
    assert time_colormap(2.0 / 3.0) == (128, 0, 128)
    assert time_colormap(1.0) == (255, 255, 0)
    assert time_colormap(0.5) == (64, 0, 191)


def test_time_colormap_clamps():
    assert time_colormap(-0.5) == (0, 255, 255)
    assert time_colormap(1.5) == (255, 255, 0)


def test_time_colormap_word_order():
    # cyan -> blue -> purple -> yellow: red never decreases, green dips
    samples = [time_colormap(t) for t in np.linspace(0, 1, 31)]
    reds = [c[0] for c in samples]
    assert all(b >= a for a, b in zip(reds, reds[1:]))
    assert samples[0][1] == 255 and samples[15][1] == 0 and samples[-1][1] == 255


def test_layout_json_field_names():
    records = [halo(1, 0, center=(0, 0, 0), mass=3.5), halo(2, 0, center=(5, 0, 0))]
    forest = MergerForest.from_records(records)
    payload = layout_halos(forest, [1, 2]).to_json()
    assert set(payload[0]) == {"halo_id", "x", "y", "r", "color", "brightness"}
    tree = layout_merger_tree(forest, extract_merger_subtree(forest, 1)).to_json()
    assert set(tree) == {"nodes", "edges"}
    node = tree["nodes"][0]
    assert {"halo_id", "x", "y", "r", "color", "brightness"} <= set(node)
    # catalog attributes ride along for the UI tooltip
    assert node["attrs"] == {"mass": 3.5, "radius": 1.0, "dispersion": 0.0, "density": 0.0}
