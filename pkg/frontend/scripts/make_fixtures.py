"""Regenerate the cross-language parity fixtures in tests/fixtures/.

The TypeScript client must agree with the service on halo picking, point
projection and snapshot decoding; these fixtures freeze the service-side
answers so the client tests can assert exact parity.
"""

import base64
import io
import json
from pathlib import Path

import numpy as np

from haloscope.camera import CameraPose, project_points
from haloscope.layout import DiscEntry, Layout2D, pick_halo
from haloscope.snapshots import ParticleSnapshot, write_snapshot

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
OUT.mkdir(parents=True, exist_ok=True)
rng = np.random.default_rng(20240817)


def make_pick_parity():
    entries = []
    for i in range(40):
        entries.append(DiscEntry(
            halo_id=int(rng.integers(1, 500)) * 10 + i % 3,   # some near-duplicate ids
            x=float(rng.uniform(0, 400)),
            y=float(rng.uniform(0, 300)),
            disc_radius=float(rng.uniform(3, 30)),
            color=(1, 2, 3),
            brightness=1.0,
        ))
    layout = Layout2D(entries=entries)
    cases = []
    hits = 0
    for _ in range(100):
        if rng.random() < 0.7 and entries:
            target = entries[int(rng.integers(len(entries)))]
            cursor = (target.x + float(rng.normal(0, 12)),
                      target.y + float(rng.normal(0, 12)))
        else:
            cursor = (float(rng.uniform(-50, 450)), float(rng.uniform(-50, 350)))
        expected = pick_halo(layout, cursor)
        hits += expected is not None
        cases.append({"cursor": list(cursor), "expected": expected})
    payload = {"layout": layout.to_json(), "cases": cases}
    (OUT / "pick_parity.json").write_text(json.dumps(payload, indent=1))
    print(f"pick_parity.json: 100 cursors, {hits} hits")


def make_projection_parity():
    camera = CameraPose(eye=(3.0, -2.0, 25.0), look_at=(0.5, 1.0, -1.0),
                        up=(0.1, 1.0, 0.05), vertical_fov=55.0, near=0.5, far=80.0,
                        viewport=(640, 480))
    pts = np.concatenate([
        rng.uniform(-15, 15, (40, 3)),
        [[3.0, -2.0, 26.0]],       # behind the eye
        [[0.5, 1.0, -70.0]],       # beyond the far plane
    ])
    pix, visible = project_points(camera, pts)
    payload = {
        "camera": {
            "eye": [3.0, -2.0, 25.0], "look_at": [0.5, 1.0, -1.0],
            "up": [0.1, 1.0, 0.05], "vertical_fov": 55.0, "near": 0.5,
            "far": 80.0, "viewport": {"width": 640, "height": 480},
        },
        "points": pts.tolist(),
        "visible": visible.astype(int).tolist(),
        "pixels": [[float(x), float(y)] if v else None
                   for (x, y), v in zip(pix, visible)],
    }
    (OUT / "projection_parity.json").write_text(json.dumps(payload, indent=1))
    print(f"projection_parity.json: {int(visible.sum())}/{len(pts)} visible")


def make_hsnp_sample():
    n = 17
    snap = ParticleSnapshot(
        timestep=6,
        ids=rng.permutation(np.arange(100, 100 + n)).astype(np.uint64),
        positions=rng.normal(0, 40, (n, 3)),
        velocities=rng.normal(0, 2, (n, 3)),
        mass=rng.uniform(0.5, 1.5, n),
        dispersion=rng.uniform(0, 9, n),
        density=rng.uniform(0, 1, n),
    )
    buf = io.BytesIO()
    import tempfile, os
    with tempfile.NamedTemporaryFile(delete=False) as f:
        path = f.name
    write_snapshot(snap, path)
    raw = Path(path).read_bytes()
    os.unlink(path)
    payload = {
        "base64": base64.b64encode(raw).decode(),
        "timestep": 6,
        "count": n,
        "ids": snap.ids.tolist(),
        "positions": snap.positions.astype(np.float32).ravel().tolist(),
        "mass": snap.mass.astype(np.float32).tolist(),
        "dispersion": snap.dispersion.astype(np.float32).tolist(),
        "density": snap.density.astype(np.float32).tolist(),
    }
    (OUT / "hsnp_sample.json").write_text(json.dumps(payload, indent=1))
    print(f"hsnp_sample.json: {len(raw)} bytes")


if __name__ == "__main__":
    make_pick_parity()
    make_projection_parity()
    make_hsnp_sample()
