"""Session-oriented serving layer and its HTTP surface.

The ExplorerService class owns datasets and sessions and is transport
agnostic; the HTTP handler below is a thin JSON adapter over it. Each
session caches its latest selection so threshold changes re-run only the
classify/extract/split/rank stages. Concurrent selections in one session
follow newest-wins: an older in-flight request is cancelled at its next
stage boundary, and its reply is never delivered once a newer one has
completed.
"""

from __future__ import annotations

import itertools
import json
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

import numpy as np

from .camera import CameraPose
from .dataset import Dataset, open_dataset
from .errors import (
    EmptySelectionError,
    EmptyTraceError,
    HaloscopeError,
    NoActiveSelectionError,
    NoSuchHaloError,
    SupersededError,
)
from .forest import extract_merger_subtree, extract_trace_paths, halos_in_selection
from .layout import layout_halos, layout_merger_tree, time_colormap
from .selection import (
    CircleLasso,
    Deposition,
    PolygonLasso,
    SelectionParams,
    SelectionResult,
    ThresholdMode,
    rethreshold,
    wysiwyg_select,
)


def parse_camera(payload: dict) -> CameraPose:
    vp = payload["viewport"]
    return CameraPose(
        eye=payload["eye"],
        look_at=payload["look_at"],
        up=payload["up"],
        vertical_fov=float(payload["vertical_fov"]),
        near=float(payload["near"]),
        far=float(payload["far"]),
        viewport=(int(vp["width"]), int(vp["height"])),
    )


def parse_lasso(payload: dict):
    kind = payload.get("kind")
    if kind == "circle":
        return CircleLasso(center=tuple(payload["center"]), radius=float(payload["radius"]))
    if kind == "polygon":
        return PolygonLasso(vertices=payload["vertices"])
    raise HaloscopeError(f"unknown lasso kind {kind!r}")


def parse_params(payload: dict | None, default_grid_n: int = 64) -> SelectionParams:
    payload = payload or {}
    threshold = payload.get("threshold", {"mode": "mean"})
    if threshold.get("mode") == "explicit":
        mode, rho0 = ThresholdMode.EXPLICIT, float(threshold["rho0"])
    else:
        mode, rho0 = ThresholdMode.MEAN_NODE_DENSITY, None
    resolution = payload.get("area_resolution", (512, 512))
    return SelectionParams(
        grid_n=int(payload.get("grid_n", default_grid_n)),
        threshold_mode=mode,
        rho0=rho0,
        deposition=Deposition(payload.get("deposition", "additive")),
        area_resolution=(int(resolution[0]), int(resolution[1])),
    )


@dataclass
class Session:
    session_id: str
    dataset: Dataset
    timestep: int
    camera: CameraPose | None = None
    selection: SelectionResult | None = None
    selection_timestep: int | None = None
    selected_halo: int | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    issued_seq: int = 0
    committed_seq: int = 0


class ExplorerService:
    """Datasets, sessions, selection cache and layout queries."""

    def __init__(self, data_dir: str | Path | None = None, grid_n: int = 64):
        self.grid_n = grid_n
        self.datasets: dict[str, Dataset] = {}
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._session_counter = itertools.count(1)
        self._tree_cache: dict[tuple[str, int], dict] = {}
        if data_dir is not None:
            self.scan_data_dir(data_dir)

    # -- datasets ----------------------------------------------------------
    def scan_data_dir(self, data_dir: str | Path) -> None:
        root = Path(data_dir)
        candidates = [root] if (root / "dataset.json").is_file() else sorted(root.iterdir())
        for path in candidates:
            if (Path(path) / "dataset.json").is_file():
                self.add_dataset(open_dataset(path))

    def add_dataset(self, dataset: Dataset) -> None:
        with self._lock:
            self.datasets[dataset.name] = dataset

    def close_dataset(self, name: str) -> None:
        with self._lock:
            ds = self.datasets.pop(name, None)
            if ds is not None:
                ds.close()
            self._tree_cache = {k: v for k, v in self._tree_cache.items() if k[0] != name}
            self.sessions = {sid: s for sid, s in self.sessions.items()
                             if s.dataset is not ds}

    def list_datasets(self) -> list[dict]:
        with self._lock:
            return [ds.descriptor.to_json() for _, ds in sorted(self.datasets.items())]

    # -- sessions ----------------------------------------------------------
    def create_session(self, dataset_name: str) -> str:
        with self._lock:
            if dataset_name not in self.datasets:
                raise HaloscopeError(f"unknown dataset {dataset_name!r}")
            ds = self.datasets[dataset_name]
            sid = f"s{next(self._session_counter)}"
            # default to the latest timestep: the present-day snapshot is
            # where selections usually start
            self.sessions[sid] = Session(session_id=sid, dataset=ds,
                                         timestep=ds.timestep_count - 1)
            return sid

    def session(self, sid: str) -> Session:
        with self._lock:
            if sid not in self.sessions:
                raise HaloscopeError(f"unknown session {sid!r}")
            return self.sessions[sid]

    # -- selection ---------------------------------------------------------
    def _checkpoint(self, session: Session, seq: int) -> None:
        """Cancellation point between pipeline stages (newest wins)."""
        if session.issued_seq != seq:
            raise SupersededError("a newer selection superseded this request")

    def select_region(self, sid: str, camera: CameraPose, lasso, params: SelectionParams | None = None,
                      timestep: int | None = None, include_members: bool = False) -> dict:
        session = self.session(sid)
        params = params or SelectionParams(grid_n=self.grid_n)
        with session.lock:
            session.issued_seq += 1
            seq = session.issued_seq
            if timestep is not None:
                session.timestep = int(timestep)
            t = session.timestep
            session.camera = camera
        snapshot = session.dataset.snapshot(t)
        self._checkpoint(session, seq)
        try:
            result = wysiwyg_select(snapshot, camera, lasso, params)
        except EmptySelectionError as e:
            with session.lock:
                if seq < session.committed_seq:
                    raise SupersededError("stale empty selection dropped") from e
                session.committed_seq = seq
                session.selection = None
                session.selection_timestep = None
            return {"status": "empty", "reason": str(e)}
        self._checkpoint(session, seq)
        summary = self._summarize(session, result, t, include_members)
        with session.lock:
            if seq < session.committed_seq:
                raise SupersededError("a newer selection completed first")
            session.committed_seq = seq
            session.selection = result
            session.selection_timestep = t
        return summary

    def update_threshold(self, sid: str, rho0: float, include_members: bool = False) -> dict:
        session = self.session(sid)
        with session.lock:
            if session.selection is None:
                raise NoActiveSelectionError("no cached selection to re-threshold")
            cached = session.selection
            t = session.selection_timestep
        result = rethreshold(cached, rho0)
        summary = self._summarize(session, result, t, include_members)
        with session.lock:
            session.selection = result
        return summary

    def _summarize(self, session: Session, result: SelectionResult, timestep: int,
                   include_members: bool) -> dict:
        forest = session.dataset.forest
        clusters = []
        snapshot = session.dataset.snapshot(timestep)
        for c in result.clusters:
            entry = {
                "cluster_id": c.cluster_id,
                "particle_count": int(len(c.member_particles)),
                "pixel_count": int(result.projected_pixel_counts[c.cluster_id]),
            }
            if include_members:
                rows = result.marked_indices[c.member_particles]
                entry["member_ids"] = snapshot.ids[rows].tolist()
            clusters.append(entry)
        halos = []
        if result.primary_cluster_id is not None:
            halos = halos_in_selection(forest, timestep, result, result.primary_cluster_id)
        return {
            "status": "ok",
            "timestep": timestep,
            "rho0": result.rho0,
            "cluster_count": len(result.clusters),
            "primary_cluster_id": result.primary_cluster_id,
            "clusters": clusters,
            "halos_in_primary": halos,
        }

    # -- layouts and traces --------------------------------------------------
    def halos_layout(self, sid: str) -> list[dict]:
        session = self.session(sid)
        with session.lock:
            result = session.selection
            t = session.selection_timestep
        if result is None or result.primary_cluster_id is None:
            raise NoActiveSelectionError("no selection with a primary cluster")
        ids = halos_in_selection(session.dataset.forest, t, result, result.primary_cluster_id)
        return layout_halos(session.dataset.forest, ids).to_json()

    def halo_tree(self, halo_id: int) -> dict:
        with self._lock:
            names = sorted(self.datasets)
        for name in names:
            ds = self.datasets[name]
            if ds.forest.has_halo(halo_id):
                key = (name, halo_id)
                with self._lock:
                    if key in self._tree_cache:
                        return self._tree_cache[key]
                subtree = extract_merger_subtree(ds.forest, halo_id)
                tree = layout_merger_tree(ds.forest, subtree).to_json()
                with self._lock:
                    self._tree_cache[key] = tree
                return tree
        raise NoSuchHaloError(f"halo {halo_id} not found in any open dataset")

    def trace(self, sid: str, subject: str) -> list[dict]:
        """Trace paths with per-vertex colors; subject is "halo:ID" or
        "particles:ID[,ID...]"."""
        session = self.session(sid)
        ds = session.dataset
        T = ds.timestep_count
        if subject.startswith("halo:"):
            paths = extract_trace_paths([], int(subject[5:]), forest=ds.forest)
        elif subject.startswith("particles:"):
            ids = [int(x) for x in subject[len("particles:"):].split(",") if x]
            snapshots = [ds.snapshot(t) for t in range(T)]
            paths = extract_trace_paths(snapshots, ids)
        else:
            raise HaloscopeError(f"bad trace subject {subject!r}")
        denom = max(T - 1, 1)
        out = []
        for path in paths:
            segments = []
            for seg in path.segments:
                segments.append({
                    "timesteps": seg.timesteps.tolist(),
                    "positions": seg.positions.tolist(),
                    "colors": [list(time_colormap(t / denom)) for t in seg.timesteps],
                })
            out.append({"subject": path.subject, "segments": segments})
        return out

    def points_payload(self, sid: str, t: int) -> bytes:
        session = self.session(sid)
        return session.dataset.snapshot_path(t).read_bytes()


# -- HTTP adapter ------------------------------------------------------------

def _route(handler: "ExplorerHandler", method: str):
    svc = handler.server.service     # type: ignore[attr-defined]
    parsed = urlparse(handler.path)
    parts = [p for p in parsed.path.split("/") if p]
    query = {k: v[0] for k, v in parse_qs(parsed.query).items()}

    def body() -> dict:
        n = int(handler.headers.get("Content-Length", 0))
        return json.loads(handler.rfile.read(n) or b"{}")

    if method == "GET" and parts == ["datasets"]:
        return 200, svc.list_datasets()
    if method == "POST" and parts == ["sessions"]:
        return 200, {"session": svc.create_session(body()["dataset"])}
    if len(parts) == 3 and parts[0] == "sessions":
        sid, leaf = parts[1], parts[2]
        if method == "GET" and leaf == "points":
            return 200, svc.points_payload(sid, int(query.get("t", 0)))
        if method == "POST" and leaf == "select":
            payload = body()
            return 200, svc.select_region(
                sid,
                parse_camera(payload["camera"]),
                parse_lasso(payload["lasso"]),
                parse_params(payload.get("params"), svc.grid_n),
                timestep=payload.get("timestep"),
                include_members=query.get("members") == "1",
            )
        if method == "POST" and leaf == "threshold":
            return 200, svc.update_threshold(sid, float(body()["rho0"]),
                                             include_members=query.get("members") == "1")
        if method == "GET" and leaf == "halos":
            return 200, svc.halos_layout(sid)
        if method == "GET" and leaf == "trace":
            return 200, svc.trace(sid, query.get("subject", ""))
    if method == "GET" and len(parts) == 3 and parts[0] == "halos" and parts[2] == "tree":
        return 200, svc.halo_tree(int(parts[1]))
    return 404, {"error": "not-found", "message": handler.path}


_ERROR_STATUS = {
    "no-such-halo": 404,
    "no-such-cluster": 404,
    "no-active-selection": 409,
    "superseded": 409,
    "empty-trace": 200,
}


class ExplorerHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def _respond(self, status: int, payload) -> None:
        if isinstance(payload, bytes):
            data = payload
            ctype = "application/octet-stream"
        else:
            data = json.dumps(payload).encode()
            ctype = "application/json"
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _handle(self, method: str) -> None:
        try:
            status, payload = _route(self, method)
        except EmptyTraceError as e:
            status, payload = 200, {"status": "empty-trace", "message": str(e)}
        except SupersededError as e:
            status, payload = 409, {"status": "superseded", "message": str(e)}
        except HaloscopeError as e:
            status = _ERROR_STATUS.get(e.code, 400)
            payload = {"error": e.code, "message": str(e)}
        except (ValueError, KeyError, TypeError, json.JSONDecodeError) as e:
            # malformed payloads are client errors, not server faults
            status, payload = 400, {"error": "bad-request", "message": str(e)}
        except Exception as e:   # noqa: BLE001 - surface anything else as a 500
            status, payload = 500, {"error": "internal", "message": str(e)}
        self._respond(status, payload)

    def do_GET(self) -> None:
        self._handle("GET")

    def do_POST(self) -> None:
        self._handle("POST")

    def log_message(self, *args) -> None:   # keep test output quiet
        pass


class ExplorerServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, service: ExplorerService, host: str = "127.0.0.1", port: int = 0):
        super().__init__((host, port), ExplorerHandler)
        self.service = service

    @property
    def port(self) -> int:
        return self.server_address[1]


def serve_forever(service: ExplorerService, host: str, port: int) -> None:
    server = ExplorerServer(service, host, port)
    print(f"haloscope explorer-service listening on http://{host}:{server.port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
