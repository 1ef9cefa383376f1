// Orbit camera around a look-at target. The projection mirrors the
// service exactly (right-handed look-at basis, y-down pixels, depth
// clipped to [near, far]) so the client draws what the server selects.

import { CameraJson, Viewport } from "./types.js";

export interface Vec3 {
    x: number;
    y: number;
    z: number;
}

function sub(a: Vec3, b: Vec3): Vec3 {
    return { x: a.x - b.x, y: a.y - b.y, z: a.z - b.z };
}

function cross(a: Vec3, b: Vec3): Vec3 {
    return {
        x: a.y * b.z - a.z * b.y,
        y: a.z * b.x - a.x * b.z,
        z: a.x * b.y - a.y * b.x,
    };
}

function norm(a: Vec3): number {
    return Math.sqrt(a.x * a.x + a.y * a.y + a.z * a.z);
}

function scale(a: Vec3, s: number): Vec3 {
    return { x: a.x * s, y: a.y * s, z: a.z * s };
}

export class OrbitCamera {
    target: Vec3 = { x: 0, y: 0, z: 0 };
    distance = 40;
    azimuth = 0;          // radians around the y axis
    elevation = 0;        // radians above the xz plane
    verticalFov = 60;
    near = 0.1;
    far = 1000;
    viewport: Viewport;

    constructor(viewport: Viewport) {
        this.viewport = viewport;
    }

    eye(): Vec3 {
        const ce = Math.cos(this.elevation);
        return {
            x: this.target.x + this.distance * ce * Math.sin(this.azimuth),
            y: this.target.y + this.distance * Math.sin(this.elevation),
            z: this.target.z + this.distance * ce * Math.cos(this.azimuth),
        };
    }

    orbit(dAzimuth: number, dElevation: number): void {
        this.azimuth += dAzimuth;
        const cap = Math.PI / 2 - 0.01;
        this.elevation = Math.min(cap, Math.max(-cap, this.elevation + dElevation));
    }

    zoom(factor: number): void {
        this.distance = Math.min(1e6, Math.max(this.near * 4, this.distance * factor));
    }

    pan(dxPixels: number, dyPixels: number): void {
        const { right, up } = this.basis();
        const worldPerPixel = 2 * this.distance *
            Math.tan((this.verticalFov * Math.PI / 180) / 2) / this.viewport.height;
        const shift = sub(scale(right, -dxPixels * worldPerPixel),
                          scale(up, -dyPixels * worldPerPixel));
        this.target = { x: this.target.x + shift.x, y: this.target.y + shift.y,
                        z: this.target.z + shift.z };
    }

    basis(): { right: Vec3; up: Vec3; fwd: Vec3 } {
        const eye = this.eye();
        let fwd = sub(this.target, eye);
        fwd = scale(fwd, 1 / norm(fwd));
        let right = cross(fwd, { x: 0, y: 1, z: 0 });
        const rn = norm(right);
        if (rn < 1e-9) {
            right = { x: 1, y: 0, z: 0 };
        } else {
            right = scale(right, 1 / rn);
        }
        const up = cross(right, fwd);
        return { right, up, fwd };
    }

    toJson(): CameraJson {
        const eye = this.eye();
        return {
            eye: [eye.x, eye.y, eye.z],
            look_at: [this.target.x, this.target.y, this.target.z],
            up: [0, 1, 0],
            vertical_fov: this.verticalFov,
            near: this.near,
            far: this.far,
            viewport: { ...this.viewport },
        };
    }
}

export interface Projected {
    px: Float32Array;
    py: Float32Array;
    visible: Uint8Array;
}

/** Project xyz-interleaved world points through a camera description. */
export function projectPoints(camera: CameraJson, positions: Float32Array): Projected {
    const n = positions.length / 3;
    const px = new Float32Array(n);
    const py = new Float32Array(n);
    const visible = new Uint8Array(n);
    const [ex, ey, ez] = camera.eye;
    const [tx, ty, tz] = camera.look_at;
    let fx = tx - ex, fy = ty - ey, fz = tz - ez;
    const fn = Math.sqrt(fx * fx + fy * fy + fz * fz);
    fx /= fn; fy /= fn; fz /= fn;
    const [ux0, uy0, uz0] = camera.up;
    let rx = fy * uz0 - fz * uy0;
    let ry = fz * ux0 - fx * uz0;
    let rz = fx * uy0 - fy * ux0;
    const rn = Math.sqrt(rx * rx + ry * ry + rz * rz);
    rx /= rn; ry /= rn; rz /= rn;
    const ux = ry * fz - rz * fy;
    const uy = rz * fx - rx * fz;
    const uz = rx * fy - ry * fx;

    const w = camera.viewport.width;
    const h = camera.viewport.height;
    const scalePx = h / (2 * Math.tan((camera.vertical_fov * Math.PI / 180) / 2));
    for (let i = 0; i < n; i++) {
        const dx = positions[3 * i] - ex;
        const dy = positions[3 * i + 1] - ey;
        const dz = positions[3 * i + 2] - ez;
        const d = dx * fx + dy * fy + dz * fz;
        if (d < camera.near || d > camera.far) {
            continue;
        }
        px[i] = w / 2 + (dx * rx + dy * ry + dz * rz) / d * scalePx;
        py[i] = h / 2 - (dx * ux + dy * uy + dz * uz) / d * scalePx;
        visible[i] = 1;
    }
    return { px, py, visible };
}
