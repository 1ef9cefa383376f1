import { describe, expect, it } from "vitest";
import { memberSets, Store } from "../src/state.js";
import { SelectionSummary } from "../src/types.js";

describe("store", () => {
    it("notifies every subscriber with the same state object", () => {
        const store = new Store(3);
        const seen: unknown[] = [];
        store.subscribe((s) => seen.push(s));
        store.subscribe((s) => seen.push(s));
        store.update((s) => {
            s.timestep = 5;
        });
        expect(seen).toHaveLength(2);
        expect(seen[0]).toBe(seen[1]);
        expect(store.get().timestep).toBe(5);
    });

    it("drops an older selection reply once a newer request exists", () => {
        const store = new Store();
        const first = store.beginSelection();
        const second = store.beginSelection();
        expect(store.applySelection(first, (s) => {
            s.timestep = 111;
        })).toBe(false);
        expect(store.get().timestep).not.toBe(111);
        expect(store.applySelection(second, (s) => {
            s.timestep = 222;
        })).toBe(true);
        expect(store.get().timestep).toBe(222);
    });

    it("unsubscribe stops notifications", () => {
        const store = new Store();
        let calls = 0;
        const off = store.subscribe(() => calls++);
        store.update(() => {});
        off();
        store.update(() => {});
        expect(calls).toBe(1);
    });
});

describe("memberSets", () => {
    it("separates primary members from other clusters", () => {
        const summary: SelectionSummary = {
            status: "ok",
            primary_cluster_id: 2,
            clusters: [
                { cluster_id: 1, particle_count: 2, pixel_count: 5, member_ids: [10, 11] },
                { cluster_id: 2, particle_count: 3, pixel_count: 9, member_ids: [20, 21, 22] },
            ],
        };
        const { primary, other } = memberSets(summary);
        expect([...primary].sort()).toEqual([20, 21, 22]);
        expect([...other].sort()).toEqual([10, 11]);
    });

    it("empty summary yields empty sets", () => {
        const { primary, other } = memberSets({ status: "empty" });
        expect(primary.size).toBe(0);
        expect(other.size).toBe(0);
    });
});
