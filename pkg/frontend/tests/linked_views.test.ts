// The scripted exploration loop: lasso -> yellow highlight, MDS pick ->
// green highlight plus merger tree, threshold slider -> all three panels
// refresh from one transition, and a rapid double lasso renders only the
// newest result.

import { beforeEach, describe, expect, it } from "vitest";
import { ExplorerApp } from "../src/app.js";
import { SelectionSummary } from "../src/types.js";
import { OTHER_CLUSTER_COLOR, PRIMARY_COLOR } from "../src/views/points.js";
import { SELECTED_COLOR } from "../src/views/mds.js";
import { FakeApi, RecordingCtx, particlesOf } from "./helpers.js";

function summaryOf(primaryIds: number[], otherIds: number[], rho0: number): SelectionSummary {
    return {
        status: "ok",
        timestep: 3,
        rho0,
        cluster_count: 2,
        primary_cluster_id: 1,
        clusters: [
            { cluster_id: 1, particle_count: primaryIds.length, pixel_count: 500,
              member_ids: primaryIds },
            { cluster_id: 2, particle_count: otherIds.length, pixel_count: 200,
              member_ids: otherIds },
        ],
        halos_in_primary: [17],
    };
}

interface Rig {
    app: ExplorerApp;
    api: FakeApi;
    pointCtx: RecordingCtx;
    mdsCtx: RecordingCtx;
    treeCtx: RecordingCtx;
}

async function makeRig(): Promise<Rig> {
    const api = new FakeApi();
    api.particles = particlesOf([
        [1, -2, 0, 0], [2, -2.2, 0.3, 0], [3, 2, 0, 0], [4, 2.3, -0.2, 0], [5, 0, 5, 0],
    ]);
    api.summary = summaryOf([1, 2], [3, 4], 10);
    api.layout = [
        { halo_id: 17, x: -4, y: 0, r: 12, color: [0, 0, 255], brightness: 0.8 },
        { halo_id: 18, x: 4, y: 0, r: 6, color: [255, 0, 0], brightness: 0.5 },
    ];
    api.tree = {
        nodes: [
            { halo_id: 17, level: 1, x: 0.5, y: 40, r: 12, color: [0, 0, 255], brightness: 1,
              attrs: { mass: 5, radius: 1.5, dispersion: 0.2, density: 0.1 } },
            { halo_id: 15, level: 0, x: 0, y: 0, r: 10, color: [0, 255, 255], brightness: 1,
              attrs: { mass: 3, radius: 1.2, dispersion: 0.1, density: 0.2 } },
            { halo_id: 16, level: 0, x: 1, y: 0, r: 8, color: [0, 128, 255], brightness: 1,
              attrs: { mass: 2, radius: 1.0, dispersion: 0.3, density: 0.3 } },
        ],
        edges: [
            { from: 15, to: 17, c0: [0, 255, 255], c1: [0, 0, 255] },
            { from: 16, to: 17, c0: [0, 128, 255], c1: [0, 0, 255] },
        ],
    };
    api.traces = [{
        subject: 17,
        segments: [{
            timesteps: [0, 1],
            positions: [[-2, 0, 0], [-1, 0, 0]],
            colors: [[0, 255, 255], [255, 255, 0]],
        }],
    }];

    const pointCtx = new RecordingCtx();
    const mdsCtx = new RecordingCtx();
    const treeCtx = new RecordingCtx();
    const app = new ExplorerApp(api.asApi(), {
        pointCanvas: { width: 400, height: 300 },
        mdsCanvas: { width: 400, height: 300 },
        treeCanvas: { width: 400, height: 300 },
        pointCtx, mdsCtx, treeCtx,
    }, { gridN: 32 });
    await app.start();
    return { app, api, pointCtx, mdsCtx, treeCtx };
}

function drawLasso(app: ExplorerApp): Promise<boolean> | null {
    app.pointerDown(200, 150);
    app.pointerMove(260, 150);
    return app.pointerUp(260, 150);
}

describe("linked views", () => {
    let rig: Rig;

    beforeEach(async () => {
        rig = await makeRig();
    });

    it("lasso completion tints the primary cluster yellow", async () => {
        expect(rig.pointCtx.fillsByStyle.get(PRIMARY_COLOR)).toBeUndefined();
        const done = drawLasso(rig.app);
        expect(done).not.toBeNull();
        await done;
        expect(rig.api.selectRequests).toHaveLength(1);
        expect(rig.api.selectRequests[0].lasso).toEqual(
            { kind: "circle", center: [200, 150], radius: 60 });
        // primary members yellow, other clusters green, on top of the base cloud
        expect(rig.pointCtx.fillsByStyle.get(PRIMARY_COLOR)).toBeGreaterThan(0);
        expect(rig.pointCtx.fillsByStyle.get(OTHER_CLUSTER_COLOR)).toBeGreaterThan(0);
        // the MDS panel received the served discs
        expect(rig.app.store.get().halosLayout).toHaveLength(2);
    });

    it("MDS click turns the picked disc green and loads its tree", async () => {
        await drawLasso(rig.app);
        const t = rig.app.mdsView.transform;
        const sx = -4 * t.scale + t.offsetX;   // screen position of halo 17
        const sy = 0 * t.scale + t.offsetY;
        const picked = await rig.app.clickMds(sx + 2, sy - 3);
        expect(picked).toBe(17);
        expect(rig.app.store.get().selectedHalo).toBe(17);
        expect(rig.mdsCtx.fillsByStyle.get(SELECTED_COLOR)).toBeGreaterThan(0);
        // the tree view drew gradient edges with the served endpoint colors
        expect(rig.treeCtx.gradientStops).toContain("rgb(0,255,255)");
        expect(rig.treeCtx.gradientStops).toContain("rgb(0,0,255)");
        expect(rig.treeCtx.texts).toContain("t=0");
        expect(rig.treeCtx.texts).toContain("t=1");
        // trace polylines replace the point cloud, using served colors
        expect(rig.pointCtx.fillsByStyle.get("rgb(0,255,255)")).toBeGreaterThan(0);
        expect(rig.pointCtx.fillsByStyle.get("rgb(255,255,0)")).toBeGreaterThan(0);
        // hover reports catalog attributes for the tooltip
        const node = rig.app.treeView.hitTest(rig.app.treeView.width / 2, 300);
        expect(node === null || node.attrs !== undefined).toBe(true);
    });

    it("threshold change refreshes all three views in one transition", async () => {
        await drawLasso(rig.app);
        await rig.app.clickMds(
            -4 * rig.app.mdsView.transform.scale + rig.app.mdsView.transform.offsetX,
            rig.app.mdsView.transform.offsetY);
        const clears = [rig.pointCtx.clearCount, rig.mdsCtx.clearCount,
                        rig.treeCtx.clearCount];
        const ok = await rig.app.submitThreshold(20);
        expect(ok).toBe(true);
        expect(rig.api.thresholdRequests).toEqual([20]);
        expect(rig.pointCtx.clearCount).toBeGreaterThan(clears[0]);
        expect(rig.mdsCtx.clearCount).toBeGreaterThan(clears[1]);
        expect(rig.treeCtx.clearCount).toBeGreaterThan(clears[2]);
        expect(rig.app.store.get().thresholdValue).toBe(20);
        // the selected halo survives because it is still in the layout
        expect(rig.app.store.get().selectedHalo).toBe(17);
    });

    it("clears the selected halo when it vanishes from the layout", async () => {
        await drawLasso(rig.app);
        await rig.app.clickMds(
            -4 * rig.app.mdsView.transform.scale + rig.app.mdsView.transform.offsetX,
            rig.app.mdsView.transform.offsetY);
        rig.api.layout = [rig.api.layout[1]];   // halo 17 gone
        await rig.app.submitThreshold(30);
        const state = rig.app.store.get();
        expect(state.selectedHalo).toBeNull();
        expect(state.tree).toBeNull();
        expect(state.trace).toBeNull();
    });

    it("rapid double lasso renders only the latest result", async () => {
        rig.api.manualSelect = true;
        const first = drawLasso(rig.app)!;
        const second = drawLasso(rig.app)!;
        expect(rig.api.selectQueue).toHaveLength(2);
        // the newer reply lands first; the older one must then be dropped
        rig.api.selectQueue[1].resolve(summaryOf([3, 4], [1, 2], 222));
        rig.api.selectQueue[0].resolve(summaryOf([1, 2], [3, 4], 111));
        const [firstApplied, secondApplied] = await Promise.all([first, second]);
        expect(firstApplied).toBe(false);
        expect(secondApplied).toBe(true);
        expect(rig.app.store.get().selection?.rho0).toBe(222);
        expect(rig.app.store.get().primaryMemberIds?.has(3)).toBe(true);
    });

    it("re-rendering the same state issues identical draw calls", async () => {
        await drawLasso(rig.app);
        rig.pointCtx.ops = [];
        rig.mdsCtx.ops = [];
        rig.app.store.update(() => {});
        const p1 = [...rig.pointCtx.ops];
        const m1 = [...rig.mdsCtx.ops];
        rig.pointCtx.ops = [];
        rig.mdsCtx.ops = [];
        rig.app.store.update(() => {});
        expect(rig.pointCtx.ops).toEqual(p1);
        expect(rig.mdsCtx.ops).toEqual(m1);
    });

    it("empty selection reports no structure and clears layout state", async () => {
        rig.api.summary = { status: "empty", reason: "nothing there" };
        await drawLasso(rig.app);
        const state = rig.app.store.get();
        expect(state.selection?.status).toBe("empty");
        expect(state.halosLayout).toBeNull();
        expect(state.selectedHalo).toBeNull();
    });

    it("decimation flag is set for oversized point budgets", async () => {
        // simulate a count beyond the draw cap without allocating it
        rig.app.store.update((s) => {
            s.particles = { ...rig.api.particles, count: 3_000_000 };
            s.decimated = true;
        });
        expect(rig.pointCtx.texts).toContain("decimated");
    });
});
