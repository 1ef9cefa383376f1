// The 2D halo scatter: MDS-projected discs with served radius, color and
// brightness; the selected halo is re-colored green. Picking happens in
// layout coordinates with the exact server rule, so the screen transform
// only affects drawing.

import { DiscEntry, ViewState } from "../types.js";
import { Ctx2D, rgbCss } from "./context.js";

export const SELECTED_COLOR = "rgb(60,220,90)";   // green

export interface LayoutTransform {
    scale: number;
    offsetX: number;
    offsetY: number;
}

export function fitLayout(entries: DiscEntry[], width: number, height: number,
                          margin = 24): LayoutTransform {
    if (entries.length === 0) {
        return { scale: 1, offsetX: width / 2, offsetY: height / 2 };
    }
    let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
    for (const e of entries) {
        xMin = Math.min(xMin, e.x);
        xMax = Math.max(xMax, e.x);
        yMin = Math.min(yMin, e.y);
        yMax = Math.max(yMax, e.y);
    }
    const spanX = Math.max(xMax - xMin, 1e-9);
    const spanY = Math.max(yMax - yMin, 1e-9);
    const scale = Math.min((width - 2 * margin) / spanX, (height - 2 * margin) / spanY);
    return {
        scale,
        offsetX: width / 2 - scale * (xMin + xMax) / 2,
        offsetY: height / 2 - scale * (yMin + yMax) / 2,
    };
}

export function toLayoutCoords(t: LayoutTransform, pxX: number, pxY: number): [number, number] {
    return [(pxX - t.offsetX) / t.scale, (pxY - t.offsetY) / t.scale];
}

export class MdsView {
    transform: LayoutTransform = { scale: 1, offsetX: 0, offsetY: 0 };

    constructor(private ctx: Ctx2D, readonly width: number, readonly height: number) {}

    render(state: ViewState): void {
        const ctx = this.ctx;
        ctx.clearRect(0, 0, this.width, this.height);
        ctx.fillStyle = "rgb(16,18,24)";
        ctx.fillRect(0, 0, this.width, this.height);
        const entries = state.halosLayout;
        if (!entries || entries.length === 0) {
            ctx.fillStyle = "rgb(120,120,120)";
            ctx.font = "14px sans-serif";
            ctx.fillText("no halos selected", 16, 24);
            return;
        }
        this.transform = fitLayout(entries, this.width, this.height);
        const t = this.transform;
        for (const e of entries) {
            const selected = e.halo_id === state.selectedHalo;
            ctx.fillStyle = selected ? SELECTED_COLOR : rgbCss(e.color, e.brightness);
            ctx.beginPath();
            ctx.arc(e.x * t.scale + t.offsetX, e.y * t.scale + t.offsetY,
                    e.r, 0, 2 * Math.PI);
            ctx.fill();
            if (selected) {
                ctx.strokeStyle = "rgb(255,255,255)";
                ctx.lineWidth = 2;
                ctx.stroke();
            }
        }
    }
}
