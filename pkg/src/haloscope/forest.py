"""Halo catalogs, the indexed merger forest, and its queries.

The forest is the set of all halos across timesteps plus descendant
links (each halo points at most at one halo exactly one timestep later).
Progenitor lists are the inverse of those links, kept pre-sorted by
descending mass (ties by ascending halo id) so that walks and layouts
are deterministic.

Catalog file format: UTF-8 text, LF line endings, one comma-separated
record per line after a mandatory header:

    halo_id,timestep,descendant_id,fof_group_id,is_master,x,y,z,radius,mass,dispersion,density

descendant_id is left empty for halos with no descendant (dissolved, or
alive at the final timestep); is_master is 0 or 1.
"""

from __future__ import annotations

import io
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadLinkError,
    BrokenLinkError,
    DuplicateHaloIdError,
    EmptyTraceError,
    FofViolationError,
    NoSuchClusterError,
    NoSuchHaloError,
)
from .selection.pipeline import SelectionResult
from .selection.surface import CELL_INNER, CELL_OUTER
from .selection.grid import trilinear_density
from .snapshots import ParticleSnapshot

CATALOG_HEADER = "halo_id,timestep,descendant_id,fof_group_id,is_master,x,y,z,radius,mass,dispersion,density"

NO_DESCENDANT = -1


@dataclass(frozen=True)
class HaloRecord:
    halo_id: int
    timestep: int
    descendant_id: int | None
    fof_group_id: int
    is_master: bool
    center: np.ndarray
    radius: float
    mass: float
    dispersion: float
    density: float


@dataclass(frozen=True)
class Violation:
    kind: str                  # duplicate-id | broken-link | bad-link | fof-violation | cycle
    halo_ids: tuple[int, ...]
    message: str


_VIOLATION_ERRORS = {
    "duplicate-id": DuplicateHaloIdError,
    "broken-link": BrokenLinkError,
    "bad-link": BadLinkError,
    "fof-violation": FofViolationError,
    "cycle": BadLinkError,
}


class MergerForest:
    """Column arrays over all halos plus id and progenitor indices."""

    def __init__(self, halo_id, timestep, descendant_id, fof_group_id,
                 is_master, center, radius, mass, dispersion, density):
        self.halo_id = np.asarray(halo_id, dtype=np.int64)
        self.timestep = np.asarray(timestep, dtype=np.int64)
        self.descendant_id = np.asarray(descendant_id, dtype=np.int64)
        self.fof_group_id = np.asarray(fof_group_id, dtype=np.int64)
        self.is_master = np.asarray(is_master, dtype=bool)
        self.center = np.asarray(center, dtype=np.float64).reshape(-1, 3)
        self.radius = np.asarray(radius, dtype=np.float64)
        self.mass = np.asarray(mass, dtype=np.float64)
        self.dispersion = np.asarray(dispersion, dtype=np.float64)
        self.density = np.asarray(density, dtype=np.float64)
        self._build_indices()

    def __len__(self) -> int:
        return len(self.halo_id)

    @property
    def timestep_count(self) -> int:
        return int(self.timestep.max()) + 1 if len(self) else 0

    def _build_indices(self) -> None:
        order = np.argsort(self.halo_id, kind="stable")
        self._ids_sorted = self.halo_id[order]
        self._rows_by_id = order

        # progenitor CSR over descendant rows, D13 order within each group
        desc_rows = self.row_of(self.descendant_id, missing_ok=True)
        linked = desc_rows >= 0
        src = np.flatnonzero(linked)
        dst = desc_rows[linked]
        order = np.lexsort((self.halo_id[src], -self.mass[src], dst))
        self._prog_rows = src[order]
        counts = np.bincount(dst, minlength=len(self))
        self._prog_start = np.concatenate([[0], np.cumsum(counts)])

    def row_of(self, halo_ids, missing_ok: bool = False) -> np.ndarray:
        """Rows of the given halo ids; -1 for missing when missing_ok."""
        ids = np.atleast_1d(np.asarray(halo_ids, dtype=np.int64))
        if len(self._ids_sorted) == 0:
            found = np.zeros(len(ids), dtype=bool)
            rows = np.full(len(ids), -1, dtype=np.int64)
        else:
            pos = np.searchsorted(self._ids_sorted, ids)
            pos_c = np.minimum(pos, len(self._ids_sorted) - 1)
            found = self._ids_sorted[pos_c] == ids
            rows = np.where(found, self._rows_by_id[pos_c], -1)
        if not missing_ok and not found.all():
            missing = ids[~found]
            raise NoSuchHaloError(f"unknown halo id(s): {missing[:5].tolist()}")
        return rows

    def has_halo(self, halo_id: int) -> bool:
        return self.row_of(halo_id, missing_ok=True)[0] >= 0

    def progenitor_rows(self, row: int) -> np.ndarray:
        return self._prog_rows[self._prog_start[row]:self._prog_start[row + 1]]

    def progenitors(self, halo_id: int) -> list[int]:
        row = int(self.row_of(halo_id)[0])
        return self.halo_id[self.progenitor_rows(row)].tolist()

    def record(self, row: int) -> HaloRecord:
        desc = int(self.descendant_id[row])
        return HaloRecord(
            halo_id=int(self.halo_id[row]),
            timestep=int(self.timestep[row]),
            descendant_id=None if desc == NO_DESCENDANT else desc,
            fof_group_id=int(self.fof_group_id[row]),
            is_master=bool(self.is_master[row]),
            center=self.center[row].copy(),
            radius=float(self.radius[row]),
            mass=float(self.mass[row]),
            dispersion=float(self.dispersion[row]),
            density=float(self.density[row]),
        )

    @classmethod
    def from_records(cls, records: Iterable[HaloRecord]) -> "MergerForest":
        records = list(records)
        return cls(
            halo_id=[r.halo_id for r in records],
            timestep=[r.timestep for r in records],
            descendant_id=[NO_DESCENDANT if r.descendant_id is None else r.descendant_id
                           for r in records],
            fof_group_id=[r.fof_group_id for r in records],
            is_master=[r.is_master for r in records],
            center=[r.center for r in records] or np.empty((0, 3)),
            radius=[r.radius for r in records],
            mass=[r.mass for r in records],
            dispersion=[r.dispersion for r in records],
            density=[r.density for r in records],
        )


def validate_forest(forest: MergerForest) -> list[Violation]:
    """Every invariant violation in the forest; empty list means valid.

    All checks are vectorized; Python loops only run over violators, so a
    clean half-million-halo forest validates in well under a second.
    """
    out: list[Violation] = []
    ids = forest.halo_id
    n = len(forest)
    if n == 0:
        return out

    uniq, counts = np.unique(ids, return_counts=True)
    for dup in uniq[counts > 1]:
        k = counts[np.searchsorted(uniq, dup)]
        out.append(Violation("duplicate-id", (int(dup),),
                             f"halo id {dup} appears {k} times"))
    if out:
        # row lookups below assume unique ids
        return out

    desc_rows = forest.row_of(forest.descendant_id, missing_ok=True)
    linked = forest.descendant_id != NO_DESCENDANT
    dangling = linked & (desc_rows < 0)
    for row in np.flatnonzero(dangling):
        out.append(Violation("broken-link", (int(ids[row]),),
                             f"halo {ids[row]} names missing descendant {forest.descendant_id[row]}"))
    good = linked & ~dangling
    bad_step = good.copy()
    bad_step[good] = forest.timestep[desc_rows[good]] != forest.timestep[good] + 1
    for row in np.flatnonzero(bad_step):
        out.append(Violation("bad-link", (int(ids[row]), int(forest.descendant_id[row])),
                             f"halo {ids[row]} at t={forest.timestep[row]} links to "
                             f"t={forest.timestep[desc_rows[row]]}"))

    # one master per (timestep, fof group), and it must be heaviest
    order = np.lexsort((forest.fof_group_id, forest.timestep))
    ts = forest.timestep[order]
    fof = forest.fof_group_id[order]
    is_master = forest.is_master[order]
    mass = forest.mass[order]
    starts = np.ones(n, dtype=bool)
    starts[1:] = (np.diff(ts) != 0) | (np.diff(fof) != 0)
    group_idx = np.cumsum(starts) - 1
    n_groups = int(group_idx[-1]) + 1
    start_pos = np.flatnonzero(starts)
    master_count = np.bincount(group_idx[is_master], minlength=n_groups)

    def group_label(g: int) -> str:
        p = start_pos[g]
        return f"fof group {fof[p]} at t={ts[p]}"

    def group_rows(g: int) -> np.ndarray:
        end = start_pos[g + 1] if g + 1 < n_groups else n
        return order[start_pos[g]:end]

    for g in np.flatnonzero(master_count == 0):
        out.append(Violation("fof-violation", tuple(int(i) for i in ids[group_rows(g)]),
                             f"{group_label(g)} has no master"))
    for g in np.flatnonzero(master_count > 1):
        masters = group_rows(g)[forest.is_master[group_rows(g)]]
        out.append(Violation("fof-violation", tuple(int(i) for i in ids[masters]),
                             f"{group_label(g)} has {len(masters)} masters"))

    single = master_count == 1
    if single.any():
        master_pos = np.flatnonzero(is_master)
        master_group = group_idx[master_pos]
        master_mass = np.full(n_groups, np.inf)
        # last write wins is fine: groups with >1 master are reported above
        master_mass[master_group] = mass[master_pos]
        heavier = mass > master_mass[group_idx]
        for p in np.flatnonzero(heavier & single[group_idx]):
            g = group_idx[p]
            m_row = order[master_pos[np.searchsorted(master_group, g)]]
            out.append(Violation(
                "fof-violation", (int(ids[m_row]), int(ids[order[p]])),
                f"{group_label(g)}: satellite {ids[order[p]]} outweighs master {ids[m_row]}"))

    # cycles: pointer doubling finds chains that never terminate, then a
    # short walk over just those rows recovers each loop for reporting
    nxt = np.where(good, desc_rows, -1)
    hop = nxt.copy()
    steps = 1
    while steps < n:
        m = hop >= 0
        nxt2 = hop.copy()
        nxt2[m] = hop[hop[m]]
        hop = nxt2
        steps *= 2
    pending = set(np.flatnonzero(hop >= 0).tolist())
    while pending:
        row = next(iter(pending))
        seen: dict[int, int] = {}
        walk = []
        while row not in seen and row in pending:
            seen[row] = len(walk)
            walk.append(row)
            row = int(nxt[row])
        pending.difference_update(walk)
        if row in seen:
            cycle_ids = tuple(int(ids[r]) for r in walk[seen[row]:])
            out.append(Violation("cycle", cycle_ids,
                                 f"descendant links cycle through halo {ids[row]}"))
    return out


def _raise_first(violations: Sequence[Violation]) -> None:
    if violations:
        v = violations[0]
        raise _VIOLATION_ERRORS[v.kind](v.message)


def parse_catalog(source: str | Path) -> MergerForest:
    """Parse a catalog file and build indices without checking invariants."""
    text = Path(source).read_text(encoding="utf-8")
    newline = text.find("\n")
    header = text[:newline] if newline >= 0 else text
    if header.strip() != CATALOG_HEADER:
        raise ValueError(f"{source}: missing or wrong catalog header")
    # only descendant_id may be empty; giving it a numeric sentinel makes
    # the whole table float-parseable in one pass
    body = text[newline + 1:].replace(",,", f",{NO_DESCENDANT},")
    if not body.strip():
        data = np.empty((0, 12))
    else:
        try:
            data = np.loadtxt(io.StringIO(body), delimiter=",", dtype=np.float64, ndmin=2)
        except ValueError as e:
            raise ValueError(f"{source}: malformed catalog row ({e})") from e
    if data.shape[1] != 12:
        raise ValueError(f"{source}: rows have {data.shape[1]} fields, expected 12")
    return MergerForest(
        halo_id=data[:, 0].astype(np.int64),
        timestep=data[:, 1].astype(np.int64),
        descendant_id=data[:, 2].astype(np.int64),
        fof_group_id=data[:, 3].astype(np.int64),
        is_master=data[:, 4] != 0,
        center=data[:, 5:8],
        radius=data[:, 8],
        mass=data[:, 9],
        dispersion=data[:, 10],
        density=data[:, 11],
    )


def load_merger_forest(source: str | Path) -> MergerForest:
    """Parse a catalog file, build all indices, and verify invariants."""
    forest = parse_catalog(source)
    _raise_first(validate_forest(forest))
    return forest


def write_catalog(forest: MergerForest, path: str | Path) -> None:
    """Write a forest back to the text catalog format (floats via repr,
    so a read-back reproduces every field exactly)."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(CATALOG_HEADER + "\n")
        desc = forest.descendant_id
        for i in range(len(forest)):
            d = "" if desc[i] == NO_DESCENDANT else str(int(desc[i]))
            c = forest.center[i]
            f.write(
                f"{forest.halo_id[i]},{forest.timestep[i]},{d},{forest.fof_group_id[i]},"
                f"{int(forest.is_master[i])},{float(c[0])!r},{float(c[1])!r},{float(c[2])!r},"
                f"{float(forest.radius[i])!r},{float(forest.mass[i])!r},"
                f"{float(forest.dispersion[i])!r},{float(forest.density[i])!r}\n"
            )


def halos_in_selection(
    forest: MergerForest,
    timestep: int,
    result: SelectionResult,
    cluster_id: int,
) -> list[int]:
    """Master halos of the timestep whose center lies inside the cluster.

    A center belongs when its host voxel is one of the cluster's voxels
    and is inner, or is boundary with trilinear density >= rho0 at the
    center - the same rule particles get. Sorted by descending mass.
    """
    cluster = result.clusters.by_id(cluster_id)
    if cluster is None:
        raise NoSuchClusterError(f"selection has no cluster {cluster_id}")
    rows = np.flatnonzero((forest.timestep == timestep) & forest.is_master)
    if len(rows) == 0:
        return []
    centers = forest.center[rows]
    grid = result.grid
    span = np.asarray(grid.dims) * grid.cell_length
    in_box = ((centers >= grid.origin) & (centers <= grid.origin + span)).all(axis=1)
    rows, centers = rows[in_box], centers[in_box]
    if len(rows) == 0:
        return []

    cells = grid.cell_of(centers)
    lin = grid.linear_index(cells)
    in_cluster = np.isin(lin, cluster.voxels)
    rows, centers, cells = rows[in_cluster], centers[in_cluster], cells[in_cluster]
    if len(rows) == 0:
        return []

    codes = result.classification.cell_value[cells[:, 0], cells[:, 1], cells[:, 2]]
    keep = codes == CELL_INNER
    on_boundary = (codes != CELL_OUTER) & ~keep
    if on_boundary.any():
        keep[on_boundary] = trilinear_density(grid, centers[on_boundary]) >= result.rho0
    rows = rows[keep]
    order = np.lexsort((forest.halo_id[rows], -forest.mass[rows]))
    return forest.halo_id[rows[order]].tolist()


@dataclass
class MergerSubtree:
    root: int                          # halo id
    node_rows: np.ndarray              # forest rows, BFS order from root
    node_ids: np.ndarray               # halo ids matching node_rows
    edges: list[tuple[int, int]]       # (progenitor id, descendant id)

    def __len__(self) -> int:
        return len(self.node_rows)


def extract_merger_subtree(forest: MergerForest, root: int) -> MergerSubtree:
    """Root plus the transitive closure of progenitor links.

    Nodes come out breadth-first from the root with progenitors visited
    heaviest-first; edges appear in discovery order.
    """
    root_row = int(forest.row_of(root)[0])
    rows = [root_row]
    edges: list[tuple[int, int]] = []
    queue = deque([root_row])
    while queue:
        row = queue.popleft()
        for prog in forest.progenitor_rows(row):
            rows.append(int(prog))
            edges.append((int(forest.halo_id[prog]), int(forest.halo_id[row])))
            queue.append(int(prog))
    node_rows = np.asarray(rows, dtype=np.int64)
    return MergerSubtree(
        root=int(root),
        node_rows=node_rows,
        node_ids=forest.halo_id[node_rows],
        edges=edges,
    )


def main_progenitor_line(forest: MergerForest, halo_id: int) -> np.ndarray:
    """Rows of the heaviest-progenitor walk, earliest timestep first."""
    row = int(forest.row_of(halo_id)[0])
    line = [row]
    while True:
        progs = forest.progenitor_rows(line[-1])
        if len(progs) == 0:
            break
        line.append(int(progs[0]))   # pre-sorted: heaviest first
    return np.asarray(line[::-1], dtype=np.int64)


@dataclass
class TraceSegment:
    timesteps: np.ndarray      # strictly increasing, no gaps
    positions: np.ndarray      # (k, 3)


@dataclass
class TracePath:
    subject: int
    segments: list[TraceSegment]


def _split_segments(timesteps: np.ndarray, positions: np.ndarray) -> list[TraceSegment]:
    if len(timesteps) == 0:
        return []
    breaks = np.flatnonzero(np.diff(timesteps) != 1) + 1
    return [
        TraceSegment(timesteps=t, positions=p)
        for t, p in zip(np.split(timesteps, breaks), np.split(positions, breaks))
    ]


def extract_trace_paths(
    snapshots: Sequence[ParticleSnapshot],
    subject,
    forest: MergerForest | None = None,
) -> list[TracePath]:
    """Time-ordered position polylines for a subject.

    A particle-id set yields one path per particle with the positions at
    every timestep where the id appears; missing timesteps split the
    polyline into separate segments. A single halo id (int) yields the
    heaviest-progenitor line's halo centers and requires the forest.
    """
    if isinstance(subject, (int, np.integer)):
        if forest is None:
            raise ValueError("halo trace requires the merger forest")
        line = main_progenitor_line(forest, int(subject))
        return [TracePath(
            subject=int(subject),
            segments=_split_segments(forest.timestep[line], forest.center[line]),
        )]

    wanted = np.asarray(sorted(set(int(s) for s in subject)), dtype=np.uint64)
    if len(wanted) == 0:
        raise EmptyTraceError("empty particle id set")
    hits: dict[int, list[tuple[int, np.ndarray]]] = {int(w): [] for w in wanted}
    for snap in snapshots:
        pos = np.searchsorted(wanted, snap.ids)
        pos_c = np.minimum(pos, len(wanted) - 1)
        found = wanted[pos_c] == snap.ids
        for row in np.flatnonzero(found):
            hits[int(snap.ids[row])].append((snap.timestep, snap.positions[row]))
    paths = []
    for pid in wanted:
        entries = sorted(hits[int(pid)], key=lambda e: e[0])
        if not entries:
            continue
        ts = np.asarray([e[0] for e in entries], dtype=np.int64)
        ps = np.asarray([e[1] for e in entries])
        paths.append(TracePath(subject=int(pid), segments=_split_segments(ts, ps)))
    if not paths:
        raise EmptyTraceError("no subject particle appears in any snapshot")
    return paths
