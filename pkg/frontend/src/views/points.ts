// The 3D panel: particles projected through the shared camera. Primary
// cluster members tint yellow and other clusters green; when a halo is
// selected and its trace has arrived, the colored trace polylines
// replace the single-timestep point cloud. Point budgets beyond the
// draw cap decimate with a visible badge.

import { CameraJson, ViewState } from "../types.js";
import { projectPoints } from "../camera.js";
import { Ctx2D, rgbCss } from "./context.js";

export const BASE_COLOR = "rgb(150,160,175)";
export const PRIMARY_COLOR = "rgb(255,214,0)";    // yellow
export const OTHER_CLUSTER_COLOR = "rgb(60,220,90)";   // green
export const DRAW_POINT_CAP = 2_000_000;

export class PointView {
    constructor(private ctx: Ctx2D, readonly width: number, readonly height: number) {}

    render(state: ViewState, camera: CameraJson): void {
        const ctx = this.ctx;
        ctx.clearRect(0, 0, this.width, this.height);
        ctx.fillStyle = "rgb(8,10,16)";
        ctx.fillRect(0, 0, this.width, this.height);

        if (state.trace && state.selectedHalo !== null) {
            this.renderTrace(state, camera);
        } else if (state.particles) {
            this.renderParticles(state, camera);
        } else {
            ctx.fillStyle = "rgb(120,120,120)";
            ctx.font = "14px sans-serif";
            ctx.fillText("no points loaded", 16, 24);
        }
        this.renderLassoDraft(state);
        if (state.decimated) {
            ctx.fillStyle = "rgb(255,120,120)";
            ctx.font = "12px sans-serif";
            ctx.fillText("decimated", this.width - 76, 16);
        }
    }

    private renderParticles(state: ViewState, camera: CameraJson): void {
        const particles = state.particles!;
        const { px, py, visible } = projectPoints(camera, particles.positions);
        const stride = Math.max(1, Math.ceil(particles.count / DRAW_POINT_CAP));
        const primary = state.primaryMemberIds;
        const other = state.otherMemberIds;
        const ctx = this.ctx;

        // three passes keep fillStyle switches off the hot loop and put
        // highlighted particles on top of the base cloud
        for (const [style, wanted] of [
            [BASE_COLOR, 0], [OTHER_CLUSTER_COLOR, 1], [PRIMARY_COLOR, 2],
        ] as [string, number][]) {
            ctx.fillStyle = style;
            for (let i = 0; i < particles.count; i += stride) {
                if (!visible[i]) {
                    continue;
                }
                const id = Number(particles.ids[i]);
                const category = primary?.has(id) ? 2 : other?.has(id) ? 1 : 0;
                if (category !== wanted) {
                    continue;
                }
                const size = category === 0 ? 1 : 2;
                ctx.fillRect(px[i], py[i], size, size);
            }
        }
    }

    private renderTrace(state: ViewState, camera: CameraJson): void {
        const ctx = this.ctx;
        for (const path of state.trace!) {
            for (const segment of path.segments) {
                const flat = new Float32Array(segment.positions.length * 3);
                segment.positions.forEach((p, i) => flat.set(p, i * 3));
                const { px, py, visible } = projectPoints(camera, flat);
                for (let i = 0; i + 1 < segment.positions.length; i++) {
                    if (!visible[i] || !visible[i + 1]) {
                        continue;
                    }
                    ctx.strokeStyle = rgbCss(segment.colors[i]);
                    ctx.lineWidth = 2;
                    ctx.beginPath();
                    ctx.moveTo(px[i], py[i]);
                    ctx.lineTo(px[i + 1], py[i + 1]);
                    ctx.stroke();
                }
                for (let i = 0; i < segment.positions.length; i++) {
                    if (!visible[i]) {
                        continue;
                    }
                    ctx.fillStyle = rgbCss(segment.colors[i]);   // served colors pass through
                    ctx.fillRect(px[i] - 2, py[i] - 2, 4, 4);
                }
            }
        }
    }

    private renderLassoDraft(state: ViewState): void {
        const draft = state.lassoDraft;
        if (!draft) {
            return;
        }
        const ctx = this.ctx;
        ctx.strokeStyle = "rgb(255,255,255)";
        ctx.lineWidth = 1;
        ctx.beginPath();
        if (draft.kind === "circle") {
            const r = Math.hypot(draft.edge[0] - draft.center[0],
                                 draft.edge[1] - draft.center[1]);
            ctx.arc(draft.center[0], draft.center[1], r, 0, 2 * Math.PI);
        } else {
            ctx.moveTo(draft.vertices[0][0], draft.vertices[0][1]);
            for (const [x, y] of draft.vertices.slice(1)) {
                ctx.lineTo(x, y);
            }
            ctx.lineTo(draft.cursor[0], draft.cursor[1]);
        }
        ctx.stroke();
    }
}
