// The slice of CanvasRenderingContext2D the views use. Tests inject
// recording implementations; the app casts real 2D contexts to this.

export interface GradientLike {
    addColorStop(offset: number, color: string): void;
}

export interface Ctx2D {
    fillStyle: string | GradientLike;
    strokeStyle: string | GradientLike;
    lineWidth: number;
    font: string;
    globalAlpha: number;
    clearRect(x: number, y: number, w: number, h: number): void;
    fillRect(x: number, y: number, w: number, h: number): void;
    beginPath(): void;
    arc(x: number, y: number, r: number, a0: number, a1: number): void;
    moveTo(x: number, y: number): void;
    lineTo(x: number, y: number): void;
    closePath(): void;
    fill(): void;
    stroke(): void;
    fillText(text: string, x: number, y: number): void;
    createLinearGradient(x0: number, y0: number, x1: number, y1: number): GradientLike;
}

export function rgbCss(rgb: [number, number, number], brightness = 1): string {
    const r = Math.round(rgb[0] * brightness);
    const g = Math.round(rgb[1] * brightness);
    const b = Math.round(rgb[2] * brightness);
    return `rgb(${r},${g},${b})`;
}
