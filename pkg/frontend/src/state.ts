// Single source of truth for all three views. Every mutation goes
// through the store and notifies every subscriber with the same state
// object, so no panel can hold private selection state. Selection
// requests carry a sequence number; a response only lands if no newer
// request has been issued since (newest wins, stale replies dropped).

import { initialViewState, SelectionSummary, ViewState } from "./types.js";

export type Listener = (state: ViewState) => void;

export class Store {
    private state: ViewState;
    private listeners: Listener[] = [];
    private issuedSeq = 0;
    private appliedSeq = 0;

    constructor(timestep = 0) {
        this.state = initialViewState(timestep);
    }

    get(): ViewState {
        return this.state;
    }

    subscribe(listener: Listener): () => void {
        this.listeners.push(listener);
        return () => {
            this.listeners = this.listeners.filter((l) => l !== listener);
        };
    }

    update(mutate: (state: ViewState) => void): void {
        mutate(this.state);
        for (const listener of [...this.listeners]) {
            listener(this.state);
        }
    }

    /** Stamp a new selection request; newer stamps invalidate older ones. */
    beginSelection(): number {
        return ++this.issuedSeq;
    }

    /** True (and applied) only when the reply is still the newest. */
    applySelection(seq: number, apply: (state: ViewState) => void): boolean {
        if (seq !== this.issuedSeq || seq < this.appliedSeq) {
            return false;   // superseded: a newer request was issued
        }
        this.appliedSeq = seq;
        this.update(apply);
        return true;
    }
}

/** Member-id sets for tinting the point view, from a ?members=1 summary. */
export function memberSets(summary: SelectionSummary): {
    primary: Set<number>;
    other: Set<number>;
} {
    const primary = new Set<number>();
    const other = new Set<number>();
    if (summary.status !== "ok" || !summary.clusters) {
        return { primary, other };
    }
    for (const cluster of summary.clusters) {
        const target = cluster.cluster_id === summary.primary_cluster_id ? primary : other;
        for (const id of cluster.member_ids ?? []) {
            target.add(id);
        }
    }
    return { primary, other };
}
