"""Deterministic synthetic datasets: drifting/merging Gaussian blobs with
a consistent halo catalog, plus a forest-only fixture builder for
query-scale benchmarks.

Each blob is a Gaussian particle cloud with a fixed per-particle offset
drawn once, so particle traces follow the blob center smoothly. A merge
script absorbs one blob into another at a given timestep: the absorbed
blob's last halo links to the absorber's next halo, and its particles
ride along with the absorber afterwards. One master halo exists per
alive blob per timestep, so the catalog always validates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidSpecError
from .forest import CATALOG_HEADER, MergerForest, HaloRecord
from .snapshots import ParticleSnapshot, write_snapshot


@dataclass(frozen=True)
class BlobSpec:
    particles: int
    spread: float
    center: tuple[float, float, float]
    drift: tuple[float, float, float] = (0.0, 0.0, 0.0)
    dispersion: float = 1.0
    # Gaussian tail cutoff in units of spread. Compact support keeps one
    # blob one density island instead of sprinkling stray far-tail
    # particles that threshold into spurious micro-clusters.
    truncate_sigma: float = 3.0


@dataclass(frozen=True)
class MergeEvent:
    t: int          # first timestep at which the two lines share a halo
    into: int       # surviving blob index
    frm: int        # absorbed blob index


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    timesteps: int
    seed: int
    blobs: tuple[BlobSpec, ...]
    merges: tuple[MergeEvent, ...] = ()

    @classmethod
    def from_json(cls, payload: dict) -> "DatasetSpec":
        return cls(
            name=payload["name"],
            timesteps=int(payload["timesteps"]),
            seed=int(payload["seed"]),
            blobs=tuple(
                BlobSpec(
                    particles=int(b["particles"]),
                    spread=float(b["spread"]),
                    center=tuple(b["center"]),
                    drift=tuple(b.get("drift", (0.0, 0.0, 0.0))),
                    dispersion=float(b.get("dispersion", 1.0)),
                )
                for b in payload["blobs"]
            ),
            merges=tuple(
                MergeEvent(t=int(m["t"]), into=int(m["into"]), frm=int(m["from"]))
                for m in payload.get("merges", ())
            ),
        )


def _validate_spec(spec: DatasetSpec) -> np.ndarray:
    """Returns absorbed_at[b]: timestep blob b stops existing (T if never)."""
    n = len(spec.blobs)
    if n == 0 or spec.timesteps < 1:
        raise InvalidSpecError("need at least one blob and one timestep")
    absorbed_at = np.full(n, spec.timesteps, dtype=np.int64)
    for ev in sorted(spec.merges, key=lambda e: e.t):
        if not (1 <= ev.t < spec.timesteps):
            raise InvalidSpecError(f"merge at t={ev.t} outside [1, {spec.timesteps})")
        if not (0 <= ev.into < n and 0 <= ev.frm < n) or ev.into == ev.frm:
            raise InvalidSpecError(f"merge references bad blob pair ({ev.into}, {ev.frm})")
        if absorbed_at[ev.frm] <= ev.t or absorbed_at[ev.into] <= ev.t:
            raise InvalidSpecError(
                f"merge at t={ev.t} needs both blobs alive (one was already absorbed)")
        absorbed_at[ev.frm] = ev.t
    return absorbed_at


def _halo_id(spec: DatasetSpec, t: int, blob: int) -> int:
    return 1 + t * len(spec.blobs) + blob


def _truncated_gaussian(rng: np.random.Generator, n: int, sigma: float,
                        cutoff: float) -> np.ndarray:
    """Isotropic Gaussian offsets rejection-resampled to |o| <= cutoff*sigma."""
    out = rng.normal(0.0, sigma, (n, 3))
    if not np.isfinite(cutoff) or cutoff <= 0:
        return out
    limit = cutoff * sigma
    bad = np.flatnonzero(np.linalg.norm(out, axis=1) > limit)
    while len(bad):
        out[bad] = rng.normal(0.0, sigma, (len(bad), 3))
        bad = bad[np.linalg.norm(out[bad], axis=1) > limit]
    return out


class _BlobWorld:
    """Shared evolution bookkeeping for snapshots and catalog."""

    def __init__(self, spec: DatasetSpec):
        self.spec = spec
        self.absorbed_at = _validate_spec(spec)
        self.absorber = {ev.frm: ev.into for ev in spec.merges}
        self.centers0 = np.array([b.center for b in spec.blobs], dtype=np.float64)
        self.drifts = np.array([b.drift for b in spec.blobs], dtype=np.float64)

    def host(self, blob: int, t: int) -> int:
        """The alive blob whose cloud carries this blob's particles at t."""
        while self.absorbed_at[blob] <= t:
            blob = self.absorber[blob]
        return blob

    def center(self, blob: int, t: int) -> np.ndarray:
        return self.centers0[blob] + t * self.drifts[blob]

    def alive(self, blob: int, t: int) -> bool:
        return self.absorbed_at[blob] > t

    def carried_counts(self, t: int) -> np.ndarray:
        """Particles carried by each blob at t (own plus absorbed)."""
        n = len(self.spec.blobs)
        counts = np.zeros(n, dtype=np.int64)
        for b, bs in enumerate(self.spec.blobs):
            counts[self.host(b, t)] += bs.particles
        return counts


def build_snapshots(spec: DatasetSpec) -> list[ParticleSnapshot]:
    """All timesteps' particle snapshots, deterministic in the seed."""
    world = _BlobWorld(spec)
    rng = np.random.default_rng(spec.seed)
    offsets = [_truncated_gaussian(rng, b.particles, b.spread, b.truncate_sigma)
               for b in spec.blobs]
    velocities = [rng.normal(0.0, b.dispersion, (b.particles, 3)) for b in spec.blobs]
    id_base = np.cumsum([0] + [b.particles for b in spec.blobs])

    snaps = []
    for t in range(spec.timesteps):
        parts_pos = []
        parts_vel = []
        parts_ids = []
        parts_disp = []
        for b, bs in enumerate(spec.blobs):
            host = world.host(b, t)
            pos = world.center(host, t) + offsets[b]
            parts_pos.append(pos)
            parts_vel.append(world.drifts[host] + velocities[b])
            parts_ids.append(np.arange(id_base[b], id_base[b + 1], dtype=np.uint64))
            parts_disp.append(np.full(bs.particles, spec.blobs[host].dispersion))
        pos = np.concatenate(parts_pos)
        disp = np.concatenate(parts_disp)
        snaps.append(ParticleSnapshot(
            timestep=t,
            ids=np.concatenate(parts_ids),
            positions=pos,
            velocities=np.concatenate(parts_vel),
            mass=np.ones(len(pos)),
            dispersion=disp,
            density=np.zeros(len(pos)),
        ))
    return snaps


def build_catalog(spec: DatasetSpec) -> list[HaloRecord]:
    """One master halo per alive blob per timestep, linked by the merge script."""
    world = _BlobWorld(spec)
    records = []
    for t in range(spec.timesteps):
        counts = world.carried_counts(t)
        for b, bs in enumerate(spec.blobs):
            if not world.alive(b, t):
                continue
            if t + 1 >= spec.timesteps:
                desc = None
            elif world.alive(b, t + 1):
                desc = _halo_id(spec, t + 1, b)
            else:
                desc = _halo_id(spec, t + 1, world.host(b, t + 1))
            mass = float(counts[b])
            radius = 2.0 * bs.spread * (counts[b] / bs.particles) ** (1.0 / 3.0)
            records.append(HaloRecord(
                halo_id=_halo_id(spec, t, b),
                timestep=t,
                descendant_id=desc,
                fof_group_id=b,
                is_master=True,
                center=world.center(b, t),
                radius=radius,
                mass=mass,
                dispersion=bs.dispersion,
                density=mass / (4.0 / 3.0 * np.pi * radius ** 3),
            ))
    return records


def generate_dataset(spec: DatasetSpec, out_dir: str | Path) -> dict:
    """Write snapshots, catalog and descriptor; returns the descriptor dict."""
    out = Path(out_dir)
    (out / "snapshots").mkdir(parents=True, exist_ok=True)

    snaps = build_snapshots(spec)
    lo = np.min([s.positions.min(axis=0) for s in snaps], axis=0)
    hi = np.max([s.positions.max(axis=0) for s in snaps], axis=0)
    snapshot_files = []
    for snap in snaps:
        rel = f"snapshots/t{snap.timestep:04d}.hsnp"
        write_snapshot(snap, out / rel)
        snapshot_files.append(rel)

    records = build_catalog(spec)
    forest = MergerForest.from_records(records)
    from .forest import write_catalog  # local import avoids a cycle at module load
    write_catalog(forest, out / "halos.csv")

    descriptor = {
        "name": spec.name,
        "timestep_count": spec.timesteps,
        "particle_counts": [len(s) for s in snaps],
        "halo_count": len(records),
        "snapshot_files": snapshot_files,
        "catalog_file": "halos.csv",
        "bounding_box": [lo.tolist(), hi.tolist()],
    }
    with open(out / "dataset.json", "w", encoding="utf-8") as f:
        json.dump(descriptor, f, sort_keys=True, indent=2)
        f.write("\n")
    return descriptor


def build_forest_fixture(
    total_halos: int,
    timesteps: int,
    special_sizes: tuple[int, ...] = (),
    seed: int = 0,
) -> tuple[MergerForest, list[int]]:
    """A large valid forest for query benchmarks.

    Creates one tree per requested special subtree size (the returned
    root ids), then pads with small chain trees until the halo total is
    reached. Tree node timesteps always step by one toward the root.
    """
    rng = np.random.default_rng(seed)
    halo_id = 1
    cols: dict[str, list] = {k: [] for k in
                             ("id", "t", "desc", "fof", "master", "mass")}
    roots: list[int] = []

    def add(t: int, desc: int | None, mass: float) -> int:
        nonlocal halo_id
        hid = halo_id
        halo_id += 1
        cols["id"].append(hid)
        cols["t"].append(t)
        cols["desc"].append(-1 if desc is None else desc)
        cols["fof"].append(hid)      # every halo its own group
        cols["master"].append(True)
        cols["mass"].append(mass)
        return hid

    remaining = total_halos
    for size in special_sizes:
        # grow a tree of exactly `size` nodes: root at the last timestep,
        # then attach progenitors breadth-first one timestep earlier each
        root = add(timesteps - 1, None, 1000.0)
        roots.append(root)
        frontier = [(root, timesteps - 1)]
        made = 1
        while made < size:
            nxt = []
            for hid, t in frontier:
                if made >= size or t == 0:
                    continue
                n_prog = min(int(rng.integers(1, 4)), size - made)
                for _ in range(n_prog):
                    pid = add(t - 1, hid, float(rng.integers(1, 1000)))
                    nxt.append((pid, t - 1))
                    made += 1
            if not nxt:
                break
            frontier = nxt
        remaining -= made

    while remaining > 0:
        length = min(int(rng.integers(1, timesteps + 1)), remaining)
        t0 = int(rng.integers(0, timesteps - length + 1))
        desc = None
        for i in range(length):
            # build top-down so each node can link to its descendant
            t = t0 + length - 1 - i
            desc = add(t, desc, float(rng.integers(1, 1000)))
        remaining -= length

    n = len(cols["id"])
    centers = rng.uniform(0.0, 100.0, (n, 3))
    forest = MergerForest(
        halo_id=cols["id"],
        timestep=cols["t"],
        descendant_id=cols["desc"],
        fof_group_id=cols["fof"],
        is_master=cols["master"],
        center=centers,
        radius=np.full(n, 1.0),
        mass=cols["mass"],
        dispersion=rng.uniform(0.0, 10.0, n),
        density=rng.uniform(0.0, 5.0, n),
    )
    return forest, roots
