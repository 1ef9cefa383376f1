// The merger-tree panel: level-wise node discs joined by color-gradient
// edges, a labeled time axis, and hover hit-testing for the attribute
// tooltip.

import { TreeNodeJson, ViewState } from "../types.js";
import { Ctx2D, rgbCss } from "./context.js";

const AXIS_WIDTH = 52;
const MARGIN = 20;

interface Placed {
    node: TreeNodeJson;
    x: number;
    y: number;
}

export class TreeView {
    private placed: Placed[] = [];

    constructor(private ctx: Ctx2D, readonly width: number, readonly height: number) {}

    render(state: ViewState): void {
        const ctx = this.ctx;
        ctx.clearRect(0, 0, this.width, this.height);
        ctx.fillStyle = "rgb(12,14,20)";
        ctx.fillRect(0, 0, this.width, this.height);
        this.placed = [];
        const tree = state.tree;
        if (!tree || tree.nodes.length === 0) {
            ctx.fillStyle = "rgb(120,120,120)";
            ctx.font = "14px sans-serif";
            ctx.fillText("no merger tree", 16, 24);
            return;
        }

        const xs = tree.nodes.map((n) => n.x);
        const ys = tree.nodes.map((n) => n.y);
        const xMin = Math.min(...xs), xMax = Math.max(...xs);
        const yMin = Math.min(...ys), yMax = Math.max(...ys);
        const sx = (this.width - AXIS_WIDTH - 2 * MARGIN) / Math.max(xMax - xMin, 1e-9);
        const sy = (this.height - 2 * MARGIN) / Math.max(yMax - yMin, 1e-9);
        const toX = (x: number) => AXIS_WIDTH + MARGIN + (x - xMin) * sx;
        const toY = (y: number) => MARGIN + (y - yMin) * sy;

        const byId = new Map<number, Placed>();
        for (const node of tree.nodes) {
            const p = { node, x: toX(node.x), y: toY(node.y) };
            this.placed.push(p);
            byId.set(node.halo_id, p);
        }

        for (const edge of tree.edges) {
            const a = byId.get(edge.from);
            const b = byId.get(edge.to);
            if (!a || !b) {
                continue;
            }
            const gradient = ctx.createLinearGradient(a.x, a.y, b.x, b.y);
            gradient.addColorStop(0, rgbCss(edge.c0));
            gradient.addColorStop(1, rgbCss(edge.c1));
            ctx.strokeStyle = gradient;
            ctx.lineWidth = 1.5;
            ctx.beginPath();
            ctx.moveTo(a.x, a.y);
            ctx.lineTo(b.x, b.y);
            ctx.stroke();
        }

        for (const p of this.placed) {
            ctx.fillStyle = rgbCss(p.node.color, p.node.brightness);
            ctx.beginPath();
            ctx.arc(p.x, p.y, Math.max(2, p.node.r / 3), 0, 2 * Math.PI);
            ctx.fill();
        }

        // time axis: one label per level present in the tree
        ctx.fillStyle = "rgb(150,150,160)";
        ctx.font = "11px sans-serif";
        const seen = new Set<number>();
        for (const p of this.placed) {
            if (seen.has(p.node.level)) {
                continue;
            }
            seen.add(p.node.level);
            ctx.fillText(`t=${p.node.level}`, 6, p.y + 4);
        }
    }

    /** Node under the cursor (screen px) for the hover tooltip. */
    hitTest(x: number, y: number): TreeNodeJson | null {
        let best: Placed | null = null;
        let bestDist = Infinity;
        for (const p of this.placed) {
            const d = Math.hypot(p.x - x, p.y - y);
            if (d <= Math.max(6, p.node.r / 3 + 3) && d < bestDist) {
                best = p;
                bestDist = d;
            }
        }
        return best ? best.node : null;
    }
}
