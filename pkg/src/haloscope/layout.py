"""2D visual spaces: MDS projection of halo positions, disc encodings,
Manhattan-distance picking, level-wise merger-tree layout, and the
cyan-blue-purple-yellow time colormap.

Layout coordinates follow screen conventions (y grows downward), so the
merger tree puts the earliest timestep at the top and the root at the
bottom.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass

import numpy as np

from .errors import InvalidPointError
from .forest import MergerForest, MergerSubtree

MDS_MAX_ITERATIONS = 200
MDS_TOLERANCE = 1e-10

PICK_SLACK_PX = 8.0

TIME_COLORMAP_POINTS: tuple[tuple[float, tuple[int, int, int]], ...] = (
    (0.0, (0, 255, 255)),      # cyan
    (1.0 / 3.0, (0, 0, 255)),  # blue
    (2.0 / 3.0, (128, 0, 128)),  # purple
    (1.0, (255, 255, 0)),      # yellow
)


@dataclass(frozen=True)
class DiscStyle:
    min_px: float = 3.0
    max_px: float = 30.0
    hue_start: float = 240.0    # degrees at the low end of the dispersion range
    hue_end: float = 0.0
    brightness_floor: float = 0.25


@dataclass
class DiscEntry:
    halo_id: int
    x: float
    y: float
    disc_radius: float
    color: tuple[int, int, int]
    brightness: float


@dataclass
class Layout2D:
    entries: list[DiscEntry]

    def to_json(self) -> list[dict]:
        return [
            {"halo_id": e.halo_id, "x": e.x, "y": e.y, "r": e.disc_radius,
             "color": list(e.color), "brightness": e.brightness}
            for e in self.entries
        ]


@dataclass
class TreeNode:
    halo_id: int
    level: int                 # timestep
    x: float
    y: float
    disc_radius: float
    color: tuple[int, int, int]
    brightness: float
    # catalog attributes ride along for hover inspection in the UI
    mass: float = 0.0
    halo_radius: float = 0.0
    dispersion: float = 0.0
    density: float = 0.0


@dataclass
class TreeEdge:
    from_id: int               # progenitor
    to_id: int                 # descendant
    c0: tuple[int, int, int]
    c1: tuple[int, int, int]


@dataclass
class TreeLayout:
    nodes: list[TreeNode]
    edges: list[TreeEdge]

    def to_json(self) -> dict:
        return {
            "nodes": [
                {"halo_id": n.halo_id, "level": n.level, "x": n.x, "y": n.y,
                 "r": n.disc_radius, "color": list(n.color), "brightness": n.brightness,
                 "attrs": {"mass": n.mass, "radius": n.halo_radius,
                           "dispersion": n.dispersion, "density": n.density}}
                for n in self.nodes
            ],
            "edges": [
                {"from": e.from_id, "to": e.to_id, "c0": list(e.c0), "c1": list(e.c1)}
                for e in self.edges
            ],
        }


def _power_iteration(B: np.ndarray) -> tuple[float, np.ndarray]:
    """Dominant eigenpair by fixed-count power iteration.

    The start vector is all-ones with a small deterministic ramp, which
    guarantees overlap with the dominant eigenvector even though the
    plain ones vector is in the double-centered matrix's null space.
    """
    n = len(B)
    v = 1.0 + np.arange(1, n + 1) / (10.0 * n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(MDS_MAX_ITERATIONS):
        w = B @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0, v
        v = w / norm
        lam = float(v @ (B @ v))
        residual = np.linalg.norm(B @ v - lam * v)
        if residual <= MDS_TOLERANCE * max(1.0, abs(lam)):
            break
    return lam, v


def mds_project(points: np.ndarray) -> np.ndarray:
    """Classical (double-centering) MDS of 3D points down to 2D.

    Output axes are the two dominant eigenpairs of -J D^2 J / 2, scaled
    by sqrt(eigenvalue); each axis is flipped so its largest-magnitude
    coordinate is positive. One point maps to the origin; two points map
    to +-d/2 on the x axis.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if len(points) == 0:
        return np.empty((0, 2))
    if not np.isfinite(points).all():
        raise InvalidPointError("mds input must be finite")
    n = len(points)
    if n == 1:
        return np.zeros((1, 2))

    diff = points[:, None, :] - points[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    B = -0.5 * (J @ d2 @ J)

    coords = np.zeros((n, 2))
    lam_floor = 0.0
    for axis in range(2):
        lam, v = _power_iteration(B)
        if axis == 0:
            lam_floor = abs(lam) * 1e-12   # deflation residue is not a real axis
        if lam > lam_floor:
            coords[:, axis] = v * np.sqrt(lam)
        B = B - lam * np.outer(v, v)

    for axis in range(2):
        col = coords[:, axis]
        peak = int(np.argmax(np.abs(col)))
        if col[peak] < 0:
            coords[:, axis] = -col
    return coords


def _normalize(values: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Linear map onto [0, 1]; a degenerate range collapses to the midpoint."""
    if hi > lo:
        return np.clip((values - lo) / (hi - lo), 0.0, 1.0)
    return np.full(len(values), 0.5)


def _hue_to_rgb(hue_deg: float) -> tuple[int, int, int]:
    r, g, b = colorsys.hsv_to_rgb((hue_deg % 360.0) / 360.0, 1.0, 1.0)
    return int(round(r * 255)), int(round(g * 255)), int(round(b * 255))


def encode_discs(
    radius: np.ndarray,
    dispersion: np.ndarray,
    density: np.ndarray,
    ranges: dict[str, tuple[float, float]] | None = None,
    style: DiscStyle = DiscStyle(),
):
    """Visual attributes for halo discs.

    Radius maps linearly into [min_px, max_px]; dispersion to a hue on
    the configured ramp; density to brightness in [floor, 1] so even
    zero-density halos stay visible. Ranges default to the data's own
    min/max per attribute.
    """
    radius = np.asarray(radius, dtype=np.float64)
    dispersion = np.asarray(dispersion, dtype=np.float64)
    density = np.asarray(density, dtype=np.float64)
    ranges = ranges or {}

    def rng(name: str, values: np.ndarray) -> tuple[float, float]:
        if name in ranges:
            return ranges[name]
        return (float(values.min()), float(values.max())) if len(values) else (0.0, 1.0)

    r01 = _normalize(radius, *rng("radius", radius))
    h01 = _normalize(dispersion, *rng("dispersion", dispersion))
    b01 = _normalize(density, *rng("density", density))

    disc_radius = style.min_px + r01 * (style.max_px - style.min_px)
    hues = style.hue_start + h01 * (style.hue_end - style.hue_start)
    colors = [_hue_to_rgb(h) for h in hues]
    brightness = style.brightness_floor + b01 * (1.0 - style.brightness_floor)
    return disc_radius, colors, brightness


def layout_halos(
    forest: MergerForest,
    halo_ids,
    style: DiscStyle = DiscStyle(),
) -> Layout2D:
    """MDS-project halo centers and encode their discs."""
    rows = forest.row_of(halo_ids)
    coords = mds_project(forest.center[rows])
    disc_radius, colors, brightness = encode_discs(
        forest.radius[rows], forest.dispersion[rows], forest.density[rows], style=style)
    entries = [
        DiscEntry(
            halo_id=int(forest.halo_id[r]),
            x=float(coords[i, 0]),
            y=float(coords[i, 1]),
            disc_radius=float(disc_radius[i]),
            color=colors[i],
            brightness=float(brightness[i]),
        )
        for i, r in enumerate(rows)
    ]
    return Layout2D(entries=entries)


def pick_halo(layout: Layout2D, cursor: tuple[float, float]) -> int | None:
    """Entry minimizing Manhattan distance to the cursor, within the
    disc radius plus a fixed slack; distance ties go to the lowest id."""
    cx, cy = cursor
    best: tuple[float, int] | None = None
    for e in layout.entries:
        d = abs(e.x - cx) + abs(e.y - cy)
        if d > e.disc_radius + PICK_SLACK_PX:
            continue
        key = (d, e.halo_id)
        if best is None or key < best:
            best = key
    return best[1] if best else None


def layout_merger_tree(
    forest: MergerForest,
    subtree: MergerSubtree,
    level_spacing: float = 40.0,
    slot_spacing: float = 40.0,
    style: DiscStyle = DiscStyle(),
) -> TreeLayout:
    """Level-wise tree layout: y proportional to timestep (earliest on
    top, root at the bottom), leaves on uniform slots in discovery order,
    and every merge node centered over its progenitors."""
    rows = subtree.node_rows
    row_set = set(int(r) for r in rows)

    # leaves first, depth-first in the stored progenitor (heaviest-first) order
    x_of: dict[int, float] = {}
    next_slot = 0.0

    def place(row: int) -> float:
        nonlocal next_slot
        progs = [int(p) for p in forest.progenitor_rows(row) if int(p) in row_set]
        if not progs:
            x = next_slot * slot_spacing
            next_slot += 1.0
        else:
            x = float(np.mean([place(p) for p in progs]))
        x_of[row] = x
        return x

    # recursion depth is bounded by the subtree's timestep span
    place(int(rows[0]))

    t_min = int(forest.timestep[rows].min())
    disc_radius, colors, brightness = encode_discs(
        forest.radius[rows], forest.dispersion[rows], forest.density[rows], style=style)
    nodes = []
    color_of: dict[int, tuple[int, int, int]] = {}
    for i, row in enumerate(int(r) for r in rows):
        hid = int(forest.halo_id[row])
        t = int(forest.timestep[row])
        color_of[hid] = colors[i]
        nodes.append(TreeNode(
            halo_id=hid,
            level=t,
            x=x_of[row],
            y=(t - t_min) * level_spacing,
            disc_radius=float(disc_radius[i]),
            color=colors[i],
            brightness=float(brightness[i]),
            mass=float(forest.mass[row]),
            halo_radius=float(forest.radius[row]),
            dispersion=float(forest.dispersion[row]),
            density=float(forest.density[row]),
        ))
    edges = [
        TreeEdge(from_id=a, to_id=b, c0=color_of[a], c1=color_of[b])
        for a, b in subtree.edges
    ]
    return TreeLayout(nodes=nodes, edges=edges)


def _round_half_down(x: float) -> int:
    # exact channel midpoints (e.g. 191.5) round down by convention
    return int(np.floor(x + 0.5 - 1e-9))


def time_colormap(t: float) -> tuple[int, int, int]:
    """Piecewise-linear cyan -> blue -> purple -> yellow over [0, 1];
    out-of-range parameters clamp to the ends."""
    t = min(max(float(t), 0.0), 1.0)
    pts = TIME_COLORMAP_POINTS
    for (t0, c0), (t1, c1) in zip(pts, pts[1:]):
        if t <= t1:
            s = (t - t0) / (t1 - t0)
            return tuple(_round_half_down(a + s * (b - a)) for a, b in zip(c0, c1))
    return pts[-1][1]
