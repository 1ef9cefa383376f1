"""The serving layer end to end, over real HTTP.

Generates a dataset, starts the explorer service on an ephemeral port,
then walks the whole exploration loop as the browser client would:
create a session, stream points, lasso-select, adjust the threshold,
fetch the MDS halo layout, a merger tree, and a colored trace path.
"""

import json
import tempfile
import threading
import urllib.request
from pathlib import Path

from haloscope.dataset import open_dataset
from haloscope.service import ExplorerServer, ExplorerService
from haloscope.synthetic import BlobSpec, DatasetSpec, MergeEvent, generate_dataset

out = Path(tempfile.mkdtemp()) / "pair"
generate_dataset(DatasetSpec(
    name="pair", timesteps=16, seed=42,
    blobs=(
        BlobSpec(particles=50_000, spread=1.2, center=(-6, 0, 0), drift=(0.25, 0, 0)),
        BlobSpec(particles=30_000, spread=1.0, center=(6, 0, 0), drift=(-0.25, 0, 0)),
    ),
    merges=(MergeEvent(t=12, into=0, frm=1),),
), out)

service = ExplorerService(grid_n=32)
service.add_dataset(open_dataset(out))
server = ExplorerServer(service, port=0)
threading.Thread(target=server.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{server.port}"
print(f"service up at {base}")


def get(path):
    with urllib.request.urlopen(base + path) as r:
        return json.loads(r.read()) if r.headers["Content-Type"] == "application/json" \
            else r.read()


def post(path, payload):
    req = urllib.request.Request(base + path, data=json.dumps(payload).encode(),
                                 headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req) as r:
        return json.loads(r.read())


print("datasets:", [d["name"] for d in get("/datasets")])
sid = post("/sessions", {"dataset": "pair"})["session"]

points = get(f"/sessions/{sid}/points?t=8")
print(f"points stream at t=8: {len(points)} bytes "
      f"({(len(points) - 20) // 44} particle records)")

summary = post(f"/sessions/{sid}/select", {
    "camera": {"eye": [0, 0, 40], "look_at": [0, 0, 0], "up": [0, 1, 0],
               "vertical_fov": 60.0, "near": 0.1, "far": 200.0,
               "viewport": {"width": 800, "height": 600}},
    "lasso": {"kind": "circle", "center": [400, 300], "radius": 280},
    "params": {"grid_n": 32},
    "timestep": 8,
})
print(f"selection: {summary['cluster_count']} clusters, "
      f"primary {summary['primary_cluster_id']}, halos {summary['halos_in_primary']}")

refined = post(f"/sessions/{sid}/threshold", {"rho0": summary["rho0"] * 2})
print(f"threshold x2: {refined['cluster_count']} clusters")

layout = get(f"/sessions/{sid}/halos")
print(f"MDS layout: {[(e['halo_id'], round(e['x'], 1), round(e['y'], 1)) for e in layout]}")

root = 1 + 15 * 2 + 0
tree = get(f"/halos/{root}/tree")
print(f"merger tree of {root}: {len(tree['nodes'])} nodes, {len(tree['edges'])} edges")

trace = get(f"/sessions/{sid}/trace?subject=halo:{root}")
seg = trace[0]["segments"][0]
print(f"trace: {len(seg['timesteps'])} vertices, first color {seg['colors'][0]}, "
      f"last {seg['colors'][-1]}")

server.shutdown()
server.server_close()
print("done")
