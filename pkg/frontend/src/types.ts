// Wire formats shared with the explorer service, plus the single view
// state every panel renders from.

export interface Viewport {
    width: number;
    height: number;
}

export interface CameraJson {
    eye: [number, number, number];
    look_at: [number, number, number];
    up: [number, number, number];
    vertical_fov: number;
    near: number;
    far: number;
    viewport: Viewport;
}

export type LassoJson =
    | { kind: "circle"; center: [number, number]; radius: number }
    | { kind: "polygon"; vertices: [number, number][] };

export type RGB = [number, number, number];

export interface ClusterSummary {
    cluster_id: number;
    particle_count: number;
    pixel_count: number;
    member_ids?: number[];
}

export interface SelectionSummary {
    status: "ok" | "empty";
    reason?: string;
    timestep?: number;
    rho0?: number;
    cluster_count?: number;
    primary_cluster_id?: number | null;
    clusters?: ClusterSummary[];
    halos_in_primary?: number[];
}

export interface DiscEntry {
    halo_id: number;
    x: number;
    y: number;
    r: number;
    color: RGB;
    brightness: number;
}

export interface HaloAttrs {
    mass: number;
    radius: number;
    dispersion: number;
    density: number;
}

export interface TreeNodeJson {
    halo_id: number;
    level: number;
    x: number;
    y: number;
    r: number;
    color: RGB;
    brightness: number;
    attrs?: HaloAttrs;
}

export interface TreeEdgeJson {
    from: number;
    to: number;
    c0: RGB;
    c1: RGB;
}

export interface TreeJson {
    nodes: TreeNodeJson[];
    edges: TreeEdgeJson[];
}

export interface TraceSegmentJson {
    timesteps: number[];
    positions: [number, number, number][];
    colors: RGB[];
}

export interface TraceJson {
    subject: number;
    segments: TraceSegmentJson[];
}

export interface Particles {
    count: number;
    ids: BigUint64Array;
    positions: Float32Array;    // xyz interleaved
}

// one source of truth for all three views
export interface ViewState {
    timestep: number;
    particles: Particles | null;
    decimated: boolean;
    selection: SelectionSummary | null;
    primaryMemberIds: Set<number> | null;   // particle ids tinted yellow
    otherMemberIds: Set<number> | null;     // particles of non-primary clusters
    halosLayout: DiscEntry[] | null;
    selectedHalo: number | null;
    tree: TreeJson | null;
    trace: TraceJson[] | null;
    thresholdValue: number | null;
    lassoDraft: LassoDraft | null;
}

export type LassoDraft =
    | { kind: "circle"; center: [number, number]; edge: [number, number] }
    | { kind: "polygon"; vertices: [number, number][]; cursor: [number, number] };

export function initialViewState(timestep: number): ViewState {
    return {
        timestep,
        particles: null,
        decimated: false,
        selection: null,
        primaryMemberIds: null,
        otherMemberIds: null,
        halosLayout: null,
        selectedHalo: null,
        tree: null,
        trace: null,
        thresholdValue: null,
        lassoDraft: null,
    };
}
