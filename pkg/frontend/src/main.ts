// Browser bootstrap: bind the controller to the DOM. The service base
// URL comes from ?api=... (defaulting to the serve CLI's default port).

import { ExplorerApi } from "./api.js";
import { ExplorerApp } from "./app.js";
import { Ctx2D } from "./views/context.js";

function canvas(id: string): HTMLCanvasElement {
    return document.getElementById(id) as HTMLCanvasElement;
}

function ctx2d(el: HTMLCanvasElement): Ctx2D {
    return el.getContext("2d") as unknown as Ctx2D;
}

export function boot(): void {
    const params = new URLSearchParams(window.location.search);
    const base = params.get("api") ?? "http://127.0.0.1:8777";

    const pointCanvas = canvas("point-view");
    const mdsCanvas = canvas("mds-view");
    const treeCanvas = canvas("tree-view");
    const statusEl = document.getElementById("status")!;
    const tooltipEl = document.getElementById("tooltip")!;

    const app = new ExplorerApp(new ExplorerApi(base), {
        pointCanvas, mdsCanvas, treeCanvas,
        pointCtx: ctx2d(pointCanvas),
        mdsCtx: ctx2d(mdsCanvas),
        treeCtx: ctx2d(treeCanvas),
    }, {
        gridN: 64,
        onStatus: (text) => { statusEl.textContent = text; },
        onTooltip: (node) => {
            if (!node || !node.attrs) {
                tooltipEl.textContent = "";
                return;
            }
            tooltipEl.textContent =
                `halo ${node.halo_id} @ t=${node.level}  `
                + `mass ${node.attrs.mass.toPrecision(4)}  `
                + `radius ${node.attrs.radius.toPrecision(4)}  `
                + `dispersion ${node.attrs.dispersion.toPrecision(4)}  `
                + `density ${node.attrs.density.toPrecision(4)}`;
        },
    });

    const local = (el: HTMLCanvasElement, ev: MouseEvent): [number, number] => {
        const rect = el.getBoundingClientRect();
        return [ev.clientX - rect.left, ev.clientY - rect.top];
    };

    pointCanvas.addEventListener("mousedown", (ev) => app.pointerDown(...local(pointCanvas, ev)));
    pointCanvas.addEventListener("mousemove", (ev) => app.pointerMove(...local(pointCanvas, ev)));
    pointCanvas.addEventListener("mouseup", (ev) => app.pointerUp(...local(pointCanvas, ev)));
    pointCanvas.addEventListener("dblclick", () => app.doubleClick());
    pointCanvas.addEventListener("wheel", (ev) => {
        ev.preventDefault();
        app.wheel(ev.deltaY);
    });

    mdsCanvas.addEventListener("click", (ev) => app.clickMds(...local(mdsCanvas, ev)));
    treeCanvas.addEventListener("mousemove", (ev) => app.hoverTree(...local(treeCanvas, ev)));

    (document.getElementById("mode-orbit") as HTMLInputElement)
        .addEventListener("change", () => app.setInteraction("orbit"));
    (document.getElementById("mode-lasso-circle") as HTMLInputElement)
        .addEventListener("change", () => {
            app.setInteraction("lasso");
            app.setLassoKind("circle");
        });
    (document.getElementById("mode-lasso-polygon") as HTMLInputElement)
        .addEventListener("change", () => {
            app.setInteraction("lasso");
            app.setLassoKind("polygon");
        });

    const slider = document.getElementById("threshold") as HTMLInputElement;
    slider.addEventListener("change", () => {
        const rho0 = app.thresholdFromSlider(Number(slider.value));
        if (rho0 !== null) {
            void app.submitThreshold(rho0);
        }
    });

    const timestep = document.getElementById("timestep") as HTMLInputElement;
    timestep.addEventListener("change", () => {
        void app.loadTimestep(Number(timestep.value));
    });

    void app.start().then(() => {
        timestep.max = String(app.timestepCount - 1);
        timestep.value = String(app.timestepCount - 1);
    });
}

boot();
