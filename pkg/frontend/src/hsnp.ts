// Decoder for the binary particle stream: 20-byte header (magic "HSNP",
// u32 version, u32 timestep, u64 count) then packed little-endian
// 44-byte records (id u64, position 3xf32, velocity 3xf32, mass f32,
// dispersion f32, density f32).

import { Particles } from "./types.js";

const HEADER_BYTES = 20;
const RECORD_BYTES = 44;

export interface Snapshot extends Particles {
    timestep: number;
    velocities: Float32Array;
    mass: Float32Array;
    dispersion: Float32Array;
    density: Float32Array;
}

export function decodeSnapshot(buffer: ArrayBuffer): Snapshot {
    const view = new DataView(buffer);
    if (buffer.byteLength < HEADER_BYTES) {
        throw new Error("truncated snapshot header");
    }
    const magic = String.fromCharCode(view.getUint8(0), view.getUint8(1),
                                      view.getUint8(2), view.getUint8(3));
    if (magic !== "HSNP") {
        throw new Error(`bad snapshot magic ${magic}`);
    }
    const version = view.getUint32(4, true);
    if (version !== 1) {
        throw new Error(`unsupported snapshot format version ${version}`);
    }
    const timestep = view.getUint32(8, true);
    const count = Number(view.getBigUint64(12, true));
    if (buffer.byteLength < HEADER_BYTES + count * RECORD_BYTES) {
        throw new Error("truncated snapshot payload");
    }

    const ids = new BigUint64Array(count);
    const positions = new Float32Array(count * 3);
    const velocities = new Float32Array(count * 3);
    const mass = new Float32Array(count);
    const dispersion = new Float32Array(count);
    const density = new Float32Array(count);
    for (let i = 0; i < count; i++) {
        const base = HEADER_BYTES + i * RECORD_BYTES;
        ids[i] = view.getBigUint64(base, true);
        for (let k = 0; k < 3; k++) {
            positions[i * 3 + k] = view.getFloat32(base + 8 + 4 * k, true);
            velocities[i * 3 + k] = view.getFloat32(base + 20 + 4 * k, true);
        }
        mass[i] = view.getFloat32(base + 32, true);
        dispersion[i] = view.getFloat32(base + 36, true);
        density[i] = view.getFloat32(base + 40, true);
    }
    return { timestep, count, ids, positions, velocities, mass, dispersion, density };
}
