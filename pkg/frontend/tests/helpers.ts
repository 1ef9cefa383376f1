// Shared test doubles: a recording 2D context and a scriptable fake of
// the service API.

import { ExplorerApi, SelectRequest } from "../src/api.js";
import { Ctx2D, GradientLike } from "../src/views/context.js";
import {
    DiscEntry,
    Particles,
    SelectionSummary,
    TraceJson,
    TreeJson,
} from "../src/types.js";

export class RecordingCtx implements Ctx2D {
    fillStyle: string | GradientLike = "";
    strokeStyle: string | GradientLike = "";
    lineWidth = 1;
    font = "";
    globalAlpha = 1;
    ops: string[] = [];
    clearCount = 0;
    fillsByStyle = new Map<string, number>();
    strokesByStyle = new Map<string, number>();
    gradientStops: string[] = [];
    texts: string[] = [];

    private bump(map: Map<string, number>, key: string): void {
        map.set(key, (map.get(key) ?? 0) + 1);
    }

    clearRect(): void {
        this.clearCount += 1;
        this.ops.push("clear");
    }

    fillRect(x: number, y: number, w: number, h: number): void {
        this.ops.push(`fillRect:${this.fillStyle}:${x.toFixed(1)},${y.toFixed(1)},${w},${h}`);
        if (typeof this.fillStyle === "string") {
            this.bump(this.fillsByStyle, this.fillStyle);
        }
    }

    beginPath(): void {
        this.ops.push("beginPath");
    }

    arc(x: number, y: number, r: number): void {
        this.ops.push(`arc:${x.toFixed(1)},${y.toFixed(1)},${r.toFixed(1)}`);
    }

    moveTo(x: number, y: number): void {
        this.ops.push(`moveTo:${x.toFixed(1)},${y.toFixed(1)}`);
    }

    lineTo(x: number, y: number): void {
        this.ops.push(`lineTo:${x.toFixed(1)},${y.toFixed(1)}`);
    }

    closePath(): void {
        this.ops.push("closePath");
    }

    fill(): void {
        this.ops.push(`fill:${this.fillStyle}`);
        if (typeof this.fillStyle === "string") {
            this.bump(this.fillsByStyle, this.fillStyle);
        }
    }

    stroke(): void {
        const style = typeof this.strokeStyle === "string" ? this.strokeStyle : "<gradient>";
        this.ops.push(`stroke:${style}`);
        this.bump(this.strokesByStyle, style);
    }

    fillText(text: string): void {
        this.texts.push(text);
        this.ops.push(`text:${text}`);
    }

    createLinearGradient(): GradientLike {
        this.ops.push("gradient");
        return {
            addColorStop: (_offset: number, color: string) => {
                this.gradientStops.push(color);
            },
        };
    }
}

export class Deferred<T> {
    promise: Promise<T>;
    resolve!: (value: T) => void;

    constructor() {
        this.promise = new Promise((res) => {
            this.resolve = res;
        });
    }
}

export function particlesOf(rows: [number, number, number, number][]): Particles {
    // rows of [id, x, y, z]
    const ids = new BigUint64Array(rows.map(([id]) => BigInt(id)));
    const positions = new Float32Array(rows.length * 3);
    rows.forEach(([, x, y, z], i) => positions.set([x, y, z], i * 3));
    return { count: rows.length, ids, positions };
}

export class FakeApi {
    selectRequests: SelectRequest[] = [];
    thresholdRequests: number[] = [];
    selectQueue: Deferred<SelectionSummary>[] = [];
    manualSelect = false;

    summary: SelectionSummary = { status: "empty" };
    layout: DiscEntry[] = [];
    tree: TreeJson = { nodes: [], edges: [] };
    traces: TraceJson[] = [];
    particles: Particles = particlesOf([]);
    timestepCount = 4;

    async datasets() {
        return [{
            name: "fake", timestep_count: this.timestepCount,
            particle_counts: Array(this.timestepCount).fill(this.particles.count),
            halo_count: this.layout.length,
            bounding_box: [[-10, -10, -10], [10, 10, 10]] as [number[], number[]],
        }];
    }

    async createSession(): Promise<string> {
        return "s-test";
    }

    async points(): Promise<Particles & { timestep: number }> {
        return { ...this.particles, timestep: this.timestepCount - 1 };
    }

    select(_session: string, request: SelectRequest): Promise<SelectionSummary> {
        this.selectRequests.push(request);
        if (this.manualSelect) {
            const deferred = new Deferred<SelectionSummary>();
            this.selectQueue.push(deferred);
            return deferred.promise;
        }
        return Promise.resolve(this.summary);
    }

    threshold(_session: string, rho0: number): Promise<SelectionSummary> {
        this.thresholdRequests.push(rho0);
        return Promise.resolve({ ...this.summary, rho0 });
    }

    async halosLayout(): Promise<DiscEntry[]> {
        return this.layout;
    }

    async haloTree(): Promise<TreeJson> {
        return this.tree;
    }

    async trace(): Promise<TraceJson[]> {
        return this.traces;
    }

    asApi(): ExplorerApi {
        return this as unknown as ExplorerApi;
    }
}
