/** Small SVG helpers shared by the main graph and the effect subgraphs. */

const SVG_NS = "http://www.w3.org/2000/svg";

export const COLORS = {
    observed: "#7a3ff2", // purple: observed values and forecast
    fit: "#8a8a8a", // gray: the model's fitted line
    trend: "#b5b5b5",
    handle: "#ffffff",
    selector: "#2b2b2b",
};

export interface Scale {
    (value: number): number;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
    const span = d1 - d0 || 1;
    return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function svgElement<K extends keyof SVGElementTagNameMap>(
    tag: K,
    attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
    const el = document.createElementNS(SVG_NS, tag);
    for (const [key, value] of Object.entries(attrs)) {
        el.setAttribute(key, String(value));
    }
    return el;
}

export function polylinePoints(xs: number[], ys: number[]): string {
    const parts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
        parts.push(`${xs[i].toFixed(1)},${ys[i].toFixed(1)}`);
    }
    return parts.join(" ");
}

/** An upward triangle marker, the forecast's visual signature. */
export function trianglePath(cx: number, cy: number, size = 4): string {
    return `M ${cx} ${cy - size} L ${cx + size} ${cy + size} L ${cx - size} ${cy + size} Z`;
}

export function extent(values: number[]): [number, number] {
    let lo = Infinity;
    let hi = -Infinity;
    for (const v of values) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    if (!isFinite(lo)) return [0, 1];
    if (lo === hi) return [lo - 1, hi + 1];
    const pad = (hi - lo) * 0.08;
    return [lo - pad, hi + pad];
}
