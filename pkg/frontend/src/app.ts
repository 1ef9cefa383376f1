// The exploration loop controller. One Store drives all three panels;
// every user event (lasso, pick, threshold, orbit) becomes a single
// state transition, and stale selection replies are dropped before they
// can ever render.

import { ExplorerApi } from "./api.js";
import { OrbitCamera } from "./camera.js";
import { LassoTool, LassoKind } from "./lasso.js";
import { pickHalo } from "./pick.js";
import { memberSets, Store } from "./state.js";
import { DiscEntry, LassoJson, SelectionSummary, TreeNodeJson, ViewState } from "./types.js";
import { Ctx2D } from "./views/context.js";
import { MdsView, toLayoutCoords } from "./views/mds.js";
import { DRAW_POINT_CAP, PointView } from "./views/points.js";
import { TreeView } from "./views/tree.js";

export interface AppElements {
    pointCanvas: { width: number; height: number };
    mdsCanvas: { width: number; height: number };
    treeCanvas: { width: number; height: number };
    pointCtx: Ctx2D;
    mdsCtx: Ctx2D;
    treeCtx: Ctx2D;
}

export interface AppOptions {
    gridN?: number;
    onStatus?: (text: string) => void;
    onTooltip?: (node: TreeNodeJson | null) => void;
}

export class ExplorerApp {
    readonly store: Store;
    readonly camera: OrbitCamera;
    readonly lasso = new LassoTool();
    readonly pointView: PointView;
    readonly mdsView: MdsView;
    readonly treeView: TreeView;
    session: string | null = null;
    dataset: string | null = null;
    timestepCount = 0;
    private baseRho0: number | null = null;
    private interactionMode: "orbit" | "lasso" = "lasso";
    private orbitLast: [number, number] | null = null;

    constructor(readonly api: ExplorerApi, elements: AppElements,
                readonly options: AppOptions = {}) {
        this.store = new Store();
        this.camera = new OrbitCamera({
            width: elements.pointCanvas.width,
            height: elements.pointCanvas.height,
        });
        this.pointView = new PointView(elements.pointCtx, elements.pointCanvas.width,
                                       elements.pointCanvas.height);
        this.mdsView = new MdsView(elements.mdsCtx, elements.mdsCanvas.width,
                                   elements.mdsCanvas.height);
        this.treeView = new TreeView(elements.treeCtx, elements.treeCanvas.width,
                                     elements.treeCanvas.height);
        this.store.subscribe((state) => this.renderAll(state));
    }

    private renderAll(state: ViewState): void {
        this.pointView.render(state, this.camera.toJson());
        this.mdsView.render(state);
        this.treeView.render(state);
    }

    private status(text: string): void {
        this.options.onStatus?.(text);
    }

    // -- lifecycle -----------------------------------------------------------

    async start(): Promise<void> {
        const datasets = await this.api.datasets();
        if (datasets.length === 0) {
            this.status("no datasets served");
            return;
        }
        const descriptor = datasets[0];
        this.dataset = descriptor.name;
        this.timestepCount = descriptor.timestep_count;
        this.session = await this.api.createSession(descriptor.name);

        const [lo, hi] = descriptor.bounding_box;
        this.camera.target = {
            x: (lo[0] + hi[0]) / 2, y: (lo[1] + hi[1]) / 2, z: (lo[2] + hi[2]) / 2,
        };
        const span = Math.max(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]);
        this.camera.distance = span * 1.6;
        this.camera.far = span * 40;

        await this.loadTimestep(descriptor.timestep_count - 1);
        this.status(`dataset ${descriptor.name}: ${descriptor.halo_count} halos, `
            + `${descriptor.timestep_count} timesteps`);
    }

    async loadTimestep(t: number): Promise<void> {
        const snapshot = await this.api.points(this.session!, t);
        this.store.update((s) => {
            s.timestep = t;
            s.particles = snapshot;
            s.decimated = snapshot.count > DRAW_POINT_CAP;
        });
    }

    // -- selection -----------------------------------------------------------

    async submitLasso(lasso: LassoJson): Promise<boolean> {
        const seq = this.store.beginSelection();
        this.status("selecting...");
        const summary = await this.api.select(this.session!, {
            camera: this.camera.toJson(),
            lasso,
            params: { grid_n: this.options.gridN ?? 64 },
            timestep: this.store.get().timestep,
        });
        return this.applySelection(seq, summary);
    }

    async submitThreshold(rho0: number): Promise<boolean> {
        if (this.store.get().selection === null) {
            return false;
        }
        const seq = this.store.beginSelection();
        const summary = await this.api.threshold(this.session!, rho0);
        return this.applySelection(seq, summary);
    }

    thresholdFromSlider(sliderValue: number): number | null {
        // slider midpoint = the selection's own mean-density threshold
        return this.baseRho0 === null ? null : this.baseRho0 * sliderValue / 50;
    }

    private async applySelection(seq: number, summary: SelectionSummary): Promise<boolean> {
        const applied = this.store.applySelection(seq, (s) => {
            s.selection = summary;
            const { primary, other } = memberSets(summary);
            s.primaryMemberIds = primary;
            s.otherMemberIds = other;
            s.thresholdValue = summary.rho0 ?? null;
        });
        if (!applied) {
            return false;   // a newer request was issued: drop this reply
        }
        if (summary.status === "ok" && this.baseRho0 === null) {
            this.baseRho0 = summary.rho0 ?? null;
        }
        if (summary.status !== "ok") {
            this.baseRho0 = null;
            this.store.update((s) => {
                s.halosLayout = null;
                s.selectedHalo = null;
                s.tree = null;
                s.trace = null;
            });
            this.status("no structure found");
            return true;
        }
        this.status(`${summary.cluster_count} cluster(s), primary `
            + `${summary.primary_cluster_id}, rho0 ${summary.rho0?.toFixed(2)}`);
        await this.refreshHalosLayout();
        return true;
    }

    private async refreshHalosLayout(): Promise<void> {
        let layout: DiscEntry[];
        try {
            layout = await this.api.halosLayout(this.session!);
        } catch {
            layout = [];
        }
        this.store.update((s) => {
            s.halosLayout = layout;
            // the selected halo must exist in the current layout
            if (s.selectedHalo !== null &&
                    !layout.some((e) => e.halo_id === s.selectedHalo)) {
                s.selectedHalo = null;
                s.tree = null;
                s.trace = null;
            }
        });
    }

    // -- picking -------------------------------------------------------------

    async clickMds(pxX: number, pxY: number): Promise<number | null> {
        const entries = this.store.get().halosLayout;
        if (!entries) {
            return null;
        }
        const [lx, ly] = toLayoutCoords(this.mdsView.transform, pxX, pxY);
        const id = pickHalo(entries, lx, ly);
        if (id === null) {
            return null;
        }
        this.store.update((s) => {
            s.selectedHalo = id;
            s.tree = null;
            s.trace = null;
        });
        const [tree, trace] = await Promise.all([
            this.api.haloTree(id),
            this.api.trace(this.session!, `halo:${id}`),
        ]);
        this.store.update((s) => {
            if (s.selectedHalo === id) {   // a newer pick may have raced past
                s.tree = tree;
                s.trace = trace;
            }
        });
        return id;
    }

    hoverTree(pxX: number, pxY: number): void {
        this.options.onTooltip?.(this.treeView.hitTest(pxX, pxY));
    }

    // -- point-panel interaction ----------------------------------------------

    setInteraction(mode: "orbit" | "lasso"): void {
        this.interactionMode = mode;
        this.lasso.reset();
        this.store.update((s) => {
            s.lassoDraft = null;
        });
    }

    setLassoKind(kind: LassoKind): void {
        this.lasso.setKind(kind);
        this.store.update((s) => {
            s.lassoDraft = null;
        });
    }

    pointerDown(x: number, y: number): void {
        if (this.interactionMode === "orbit") {
            this.orbitLast = [x, y];
            return;
        }
        this.lasso.pointerDown(x, y);
        this.store.update((s) => {
            s.lassoDraft = this.lasso.draft();
        });
    }

    pointerMove(x: number, y: number): void {
        if (this.interactionMode === "orbit") {
            if (this.orbitLast) {
                const [lx, ly] = this.orbitLast;
                this.camera.orbit(-(x - lx) * 0.008, (y - ly) * 0.008);
                this.orbitLast = [x, y];
                this.store.update(() => {});   // reproject under the new camera
            }
            return;
        }
        this.lasso.pointerMove(x, y);
        if (this.lasso.draft()) {
            this.store.update((s) => {
                s.lassoDraft = this.lasso.draft();
            });
        }
    }

    pointerUp(x: number, y: number): Promise<boolean> | null {
        if (this.interactionMode === "orbit") {
            this.orbitLast = null;
            return null;
        }
        const region = this.lasso.pointerUp(x, y);
        this.store.update((s) => {
            s.lassoDraft = this.lasso.draft();
        });
        return region ? this.submitLasso(region) : null;
    }

    doubleClick(): Promise<boolean> | null {
        const region = this.lasso.doubleClick();
        this.store.update((s) => {
            s.lassoDraft = null;
        });
        return region ? this.submitLasso(region) : null;
    }

    wheel(deltaY: number): void {
        this.camera.zoom(deltaY > 0 ? 1.1 : 1 / 1.1);
        this.store.update(() => {});
    }
}
