// Client-side halo picking. Must stay rule-for-rule identical to the
// server: nearest disc under Manhattan distance, within disc radius plus
// a fixed slack, distance ties going to the lowest halo id.

import { DiscEntry } from "./types.js";

export const PICK_SLACK_PX = 8;

export function pickHalo(entries: DiscEntry[], cx: number, cy: number): number | null {
    let bestDist = Infinity;
    let bestId: number | null = null;
    for (const e of entries) {
        const d = Math.abs(e.x - cx) + Math.abs(e.y - cy);
        if (d > e.r + PICK_SLACK_PX) {
            continue;
        }
        if (d < bestDist || (d === bestDist && bestId !== null && e.halo_id < bestId)) {
            bestDist = d;
            bestId = e.halo_id;
        }
    }
    return bestId;
}
