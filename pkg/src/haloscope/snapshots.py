"""Particle snapshots and their binary file format.

A snapshot holds one timestep's particles as parallel arrays. On disk
the format ("HSNP") is a 20-byte header - magic, format version,
timestep, particle count - followed by packed little-endian 44-byte
records: id u64, position 3xf32, velocity 3xf32, then mass, dispersion
and density as f32 each.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"HSNP"
FORMAT_VERSION = 1

RECORD_DTYPE = np.dtype([
    ("id", "<u8"),
    ("position", "<f4", (3,)),
    ("velocity", "<f4", (3,)),
    ("mass", "<f4"),
    ("dispersion", "<f4"),
    ("density", "<f4"),
])
assert RECORD_DTYPE.itemsize == 44

_HEADER = struct.Struct("<4sIIQ")


@dataclass
class ParticleSnapshot:
    timestep: int
    ids: np.ndarray          # (N,) uint64, unique
    positions: np.ndarray    # (N, 3) float
    velocities: np.ndarray   # (N, 3) float
    mass: np.ndarray         # (N,)
    dispersion: np.ndarray   # (N,)
    density: np.ndarray      # (N,)

    def __len__(self) -> int:
        return len(self.ids)

    def validate(self) -> None:
        if len(np.unique(self.ids)) != len(self.ids):
            raise ValueError("particle ids must be unique within a snapshot")
        if not np.isfinite(self.positions).all():
            raise ValueError("particle positions must be finite")

    def to_records(self) -> np.ndarray:
        rec = np.empty(len(self), dtype=RECORD_DTYPE)
        rec["id"] = self.ids
        rec["position"] = self.positions
        rec["velocity"] = self.velocities
        rec["mass"] = self.mass
        rec["dispersion"] = self.dispersion
        rec["density"] = self.density
        return rec

    @classmethod
    def from_records(cls, timestep: int, rec: np.ndarray) -> "ParticleSnapshot":
        return cls(
            timestep=timestep,
            ids=rec["id"].copy(),
            positions=rec["position"].astype(np.float64),
            velocities=rec["velocity"].astype(np.float64),
            mass=rec["mass"].astype(np.float64),
            dispersion=rec["dispersion"].astype(np.float64),
            density=rec["density"].astype(np.float64),
        )


def write_snapshot(snapshot: ParticleSnapshot, path: str | Path) -> None:
    rec = snapshot.to_records()
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, FORMAT_VERSION, snapshot.timestep, len(rec)))
        f.write(rec.tobytes())


def read_snapshot(path: str | Path) -> ParticleSnapshot:
    with open(path, "rb") as f:
        header = f.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, timestep, count = _HEADER.unpack(header)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported format version {version}")
        payload = f.read(count * RECORD_DTYPE.itemsize)
    if len(payload) != count * RECORD_DTYPE.itemsize:
        raise ValueError(f"{path}: truncated particle payload")
    rec = np.frombuffer(payload, dtype=RECORD_DTYPE)
    return ParticleSnapshot.from_records(timestep, rec)


def read_snapshot_header(path: str | Path) -> tuple[int, int]:
    """(timestep, particle_count) without loading the payload."""
    with open(path, "rb") as f:
        header = f.read(_HEADER.size)
    if len(header) != _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, timestep, count = _HEADER.unpack(header)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    return timestep, count
