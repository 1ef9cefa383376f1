"""On-disk dataset layout and lazy access.

A dataset directory holds a ``dataset.json`` descriptor, a ``snapshots/``
directory of HSNP files covering timesteps [0, T) contiguously, and a
halo catalog. Snapshots load lazily and are cached; the halo forest
loads (and validates) once at open time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import IncompleteDatasetError
from .forest import MergerForest, load_merger_forest
from .snapshots import ParticleSnapshot, read_snapshot, read_snapshot_header


@dataclass
class DatasetDescriptor:
    name: str
    timestep_count: int
    particle_counts: list[int]
    halo_count: int
    path: Path
    snapshot_files: list[str]
    catalog_file: str
    bounding_box: tuple[tuple[float, float, float], tuple[float, float, float]]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "timestep_count": self.timestep_count,
            "particle_counts": self.particle_counts,
            "halo_count": self.halo_count,
            "bounding_box": [list(self.bounding_box[0]), list(self.bounding_box[1])],
        }


class Dataset:
    def __init__(self, descriptor: DatasetDescriptor, forest: MergerForest):
        self.descriptor = descriptor
        self.forest = forest
        self._snapshots: dict[int, ParticleSnapshot] = {}

    @property
    def name(self) -> str:
        return self.descriptor.name

    @property
    def timestep_count(self) -> int:
        return self.descriptor.timestep_count

    def snapshot_path(self, t: int) -> Path:
        if not 0 <= t < self.timestep_count:
            raise IncompleteDatasetError(
                f"timestep {t} outside [0, {self.timestep_count})")
        return self.descriptor.path / self.descriptor.snapshot_files[t]

    def snapshot(self, t: int) -> ParticleSnapshot:
        if t not in self._snapshots:
            self._snapshots[t] = read_snapshot(self.snapshot_path(t))
        return self._snapshots[t]

    def close(self) -> None:
        self._snapshots.clear()


def open_dataset(path: str | Path) -> Dataset:
    """Open a dataset directory, verifying the descriptor against the files."""
    root = Path(path)
    desc_path = root / "dataset.json"
    if not desc_path.is_file():
        raise IncompleteDatasetError(f"{root}: missing dataset.json")
    with open(desc_path, encoding="utf-8") as f:
        raw = json.load(f)

    descriptor = DatasetDescriptor(
        name=raw["name"],
        timestep_count=int(raw["timestep_count"]),
        particle_counts=[int(n) for n in raw["particle_counts"]],
        halo_count=int(raw["halo_count"]),
        path=root,
        snapshot_files=list(raw["snapshot_files"]),
        catalog_file=raw["catalog_file"],
        bounding_box=(tuple(raw["bounding_box"][0]), tuple(raw["bounding_box"][1])),
    )
    if len(descriptor.snapshot_files) != descriptor.timestep_count:
        raise IncompleteDatasetError(
            f"{root}: descriptor lists {len(descriptor.snapshot_files)} snapshots "
            f"for {descriptor.timestep_count} timesteps")
    for t, rel in enumerate(descriptor.snapshot_files):
        snap_path = root / rel
        if not snap_path.is_file():
            raise IncompleteDatasetError(f"{root}: missing snapshot file {rel}")
        file_t, count = read_snapshot_header(snap_path)
        if file_t != t:
            raise IncompleteDatasetError(
                f"{root}: {rel} holds timestep {file_t}, expected {t}")
        if count != descriptor.particle_counts[t]:
            raise IncompleteDatasetError(
                f"{root}: {rel} holds {count} particles, descriptor says "
                f"{descriptor.particle_counts[t]}")

    forest = load_merger_forest(root / descriptor.catalog_file)   # catalog errors propagate
    return Dataset(descriptor, forest)
