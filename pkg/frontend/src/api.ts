// Typed client for the explorer service HTTP API.

import { decodeSnapshot, Snapshot } from "./hsnp.js";
import {
    CameraJson,
    DiscEntry,
    LassoJson,
    SelectionSummary,
    TraceJson,
    TreeJson,
} from "./types.js";

export interface DatasetDescriptor {
    name: string;
    timestep_count: number;
    particle_counts: number[];
    halo_count: number;
    bounding_box: [number[], number[]];
}

export interface SelectRequest {
    camera: CameraJson;
    lasso: LassoJson;
    params?: { grid_n?: number; threshold?: { mode: string; rho0?: number } };
    timestep?: number;
}

export class ExplorerApi {
    constructor(readonly base: string) {}

    private async json<T>(path: string, init?: RequestInit): Promise<T> {
        const res = await fetch(this.base + path, init);
        const body = await res.json();
        if (!res.ok) {
            throw new ApiError(res.status, body);
        }
        return body as T;
    }

    datasets(): Promise<DatasetDescriptor[]> {
        return this.json("/datasets");
    }

    async createSession(dataset: string): Promise<string> {
        const body = await this.json<{ session: string }>("/sessions", {
            method: "POST",
            body: JSON.stringify({ dataset }),
        });
        return body.session;
    }

    async points(session: string, t: number): Promise<Snapshot> {
        const res = await fetch(`${this.base}/sessions/${session}/points?t=${t}`);
        if (!res.ok) {
            throw new ApiError(res.status, await res.json());
        }
        return decodeSnapshot(await res.arrayBuffer());
    }

    select(session: string, request: SelectRequest): Promise<SelectionSummary> {
        return this.json(`/sessions/${session}/select?members=1`, {
            method: "POST",
            body: JSON.stringify(request),
        });
    }

    threshold(session: string, rho0: number): Promise<SelectionSummary> {
        return this.json(`/sessions/${session}/threshold?members=1`, {
            method: "POST",
            body: JSON.stringify({ rho0 }),
        });
    }

    halosLayout(session: string): Promise<DiscEntry[]> {
        return this.json(`/sessions/${session}/halos`);
    }

    haloTree(haloId: number): Promise<TreeJson> {
        return this.json(`/halos/${haloId}/tree`);
    }

    trace(session: string, subject: string): Promise<TraceJson[]> {
        return this.json(`/sessions/${session}/trace?subject=${encodeURIComponent(subject)}`);
    }
}

export class ApiError extends Error {
    constructor(readonly status: number, readonly body: unknown) {
        super(`api error ${status}: ${JSON.stringify(body)}`);
    }
}
