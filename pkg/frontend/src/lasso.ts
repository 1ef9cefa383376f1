// Lasso gesture machine. Circle: press, drag, release (the drag length
// is the radius). Polygon: clicks append vertices, a double click
// closes. Gestures below the minimum size (radius < 3 px, fewer than 3
// vertices) are discarded without emitting a region.

import { LassoDraft, LassoJson } from "./types.js";

export type LassoKind = "circle" | "polygon";

export const MIN_CIRCLE_RADIUS_PX = 3;
export const MIN_POLYGON_VERTICES = 3;

export class LassoTool {
    kind: LassoKind = "circle";
    private circleStart: [number, number] | null = null;
    private polygon: [number, number][] = [];
    private cursor: [number, number] = [0, 0];

    setKind(kind: LassoKind): void {
        this.kind = kind;
        this.reset();
    }

    reset(): void {
        this.circleStart = null;
        this.polygon = [];
    }

    /** The in-progress shape for overlay drawing, if any. */
    draft(): LassoDraft | null {
        if (this.kind === "circle" && this.circleStart) {
            return { kind: "circle", center: this.circleStart, edge: this.cursor };
        }
        if (this.kind === "polygon" && this.polygon.length > 0) {
            return { kind: "polygon", vertices: [...this.polygon], cursor: this.cursor };
        }
        return null;
    }

    pointerDown(x: number, y: number): void {
        this.cursor = [x, y];
        if (this.kind === "circle") {
            this.circleStart = [x, y];
        } else {
            this.polygon.push([x, y]);
        }
    }

    pointerMove(x: number, y: number): void {
        this.cursor = [x, y];
    }

    /** Circle gesture completion; returns the region or null if discarded. */
    pointerUp(x: number, y: number): LassoJson | null {
        this.cursor = [x, y];
        if (this.kind !== "circle" || !this.circleStart) {
            return null;
        }
        const [cx, cy] = this.circleStart;
        const radius = Math.hypot(x - cx, y - cy);
        this.circleStart = null;
        if (radius < MIN_CIRCLE_RADIUS_PX) {
            return null;
        }
        return { kind: "circle", center: [cx, cy], radius };
    }

    /** Polygon completion on double click; null when discarded. */
    doubleClick(): LassoJson | null {
        if (this.kind !== "polygon") {
            return null;
        }
        const vertices = this.polygon;
        this.polygon = [];
        if (vertices.length < MIN_POLYGON_VERTICES) {
            return null;
        }
        return { kind: "polygon", vertices };
    }
}
