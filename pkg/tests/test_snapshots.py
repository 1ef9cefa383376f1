import numpy as np
import pytest

from haloscope.snapshots import (
    FORMAT_VERSION,
    MAGIC,
    ParticleSnapshot,
    RECORD_DTYPE,
    read_snapshot,
    read_snapshot_header,
    write_snapshot,
)


def sample_snapshot(n=257, timestep=5, seed=0):
    rng = np.random.default_rng(seed)
    return ParticleSnapshot(
        timestep=timestep,
        ids=rng.permutation(np.arange(10, 10 + n)).astype(np.uint64),
        positions=rng.normal(0, 50, (n, 3)),
        velocities=rng.normal(0, 3, (n, 3)),
        mass=rng.uniform(0.5, 2.0, n),
        dispersion=rng.uniform(0, 10, n),
        density=rng.uniform(0, 1, n),
    )


def test_record_is_44_bytes():
    assert RECORD_DTYPE.itemsize == 44


def test_header_layout(tmp_path):
    snap = sample_snapshot(3)
    path = tmp_path / "t.hsnp"
    write_snapshot(snap, path)
    raw = path.read_bytes()
    assert raw[:4] == MAGIC
    assert int.from_bytes(raw[4:8], "little") == FORMAT_VERSION
    assert int.from_bytes(raw[8:12], "little") == 5
    assert int.from_bytes(raw[12:20], "little") == 3
    assert len(raw) == 20 + 3 * 44


def test_round_trip_bit_exact(tmp_path):
    snap = sample_snapshot()
    p1 = tmp_path / "a.hsnp"
    p2 = tmp_path / "b.hsnp"
    write_snapshot(snap, p1)
    back = read_snapshot(p1)
    assert back.timestep == snap.timestep
    assert np.array_equal(back.ids, snap.ids)
    # payload floats are stored as f32: a second write reproduces the bytes
    write_snapshot(back, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert np.array_equal(back.positions, snap.positions.astype(np.float32).astype(np.float64))


def test_header_peek(tmp_path):
    snap = sample_snapshot(11, timestep=2)
    path = tmp_path / "t.hsnp"
    write_snapshot(snap, path)
    assert read_snapshot_header(path) == (2, 11)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "bad.hsnp"
    path.write_bytes(b"NOPE" + bytes(16))
    with pytest.raises(ValueError, match="magic"):
        read_snapshot(path)


def test_truncated_payload_rejected(tmp_path):
    snap = sample_snapshot(4)
    path = tmp_path / "t.hsnp"
    write_snapshot(snap, path)
    path.write_bytes(path.read_bytes()[:-10])
    with pytest.raises(ValueError, match="truncated"):
        read_snapshot(path)


def test_duplicate_ids_fail_validation():
    snap = sample_snapshot(5)
    snap.ids[1] = snap.ids[0]
    with pytest.raises(ValueError, match="unique"):
        snap.validate()


def test_nonfinite_position_fails_validation():
    snap = sample_snapshot(5)
    snap.positions[2, 1] = np.nan
    with pytest.raises(ValueError, match="finite"):
        snap.validate()
