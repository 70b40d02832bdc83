/** The three effect subgraphs under the main graph: yearly cycle, weekly
 * cycle, and the selected date's events. Titles carry the effect size; the
 * events subgraph relabels its x-axis with that date's event names. */

import { COLORS, extent, linearScale, polylinePoints, svgElement } from "./chart.js";
import { fmtSigned } from "./format.js";
import type { ViewPayload } from "./types.js";

const SUB_WIDTH = 270;
const SUB_HEIGHT = 150;

function panel(title: string, cls: string): { root: HTMLElement; svg: SVGSVGElement } {
    const root = document.createElement("div");
    root.className = `subgraph ${cls}`;
    const heading = document.createElement("h3");
    heading.className = "subgraph-title";
    heading.textContent = title;
    const svg = svgElement("svg", { viewBox: `0 0 ${SUB_WIDTH} ${SUB_HEIGHT}` });
    root.appendChild(heading);
    root.appendChild(svg);
    return { root, svg };
}

function effectAt(payload: ViewPayload, date: string | null, part: "yearly" | "weekly" | "events"): number {
    const dec = payload.decomposition!;
    const idx = date ? dec.dates.indexOf(date) : -1;
    const series = dec[part];
    return idx >= 0 ? series[idx] : series[series.length - 1];
}

export function renderSubgraphs(
    container: HTMLElement,
    payload: ViewPayload,
    selectorDate: string | null,
): void {
    container.textContent = "";
    if (!payload.decomposition || !payload.yearly_curve || !payload.weekly_pattern) {
        return; // opaque treatment: no effect graphs at all
    }
    const date = selectorDate ?? payload.forecast.dates[0];

    // yearly: the full cycle with the current position marked
    const yearly = panel(`Yearly: ${fmtSigned(effectAt(payload, date, "yearly"))}`, "subgraph-yearly");
    const phases = payload.yearly_curve.phase;
    const values = payload.yearly_curve.value;
    const [lo, hi] = extent(values);
    const x = linearScale(0, phases[phases.length - 1] || 1, 8, SUB_WIDTH - 8);
    const y = linearScale(lo, hi, SUB_HEIGHT - 14, 8);
    yearly.svg.appendChild(
        svgElement("polyline", {
            class: "yearly-curve",
            points: polylinePoints(phases.map((p) => x(p)), values.map((v) => y(v))),
            fill: "none",
            stroke: COLORS.observed,
            "stroke-width": 1.4,
        }),
    );
    const markerIdx = payload.decomposition.dates.indexOf(date);
    if (markerIdx >= 0) {
        const yearlyValue = payload.decomposition.yearly[markerIdx];
        let nearest = 0;
        for (let i = 1; i < values.length; i++) {
            if (Math.abs(values[i] - yearlyValue) < Math.abs(values[nearest] - yearlyValue)) nearest = i;
        }
        yearly.svg.appendChild(
            svgElement("circle", {
                class: "cycle-position",
                cx: x(phases[nearest]),
                cy: y(values[nearest]),
                r: 3.5,
                fill: COLORS.selector,
            }),
        );
    }
    container.appendChild(yearly.root);

    // weekly: seven handle points, Monday first
    const weekly = panel(`Weekly: ${fmtSigned(effectAt(payload, date, "weekly"))}`, "subgraph-weekly");
    const pattern = payload.weekly_pattern;
    const [wlo, whi] = extent(pattern);
    const wx = linearScale(0, 6, 20, SUB_WIDTH - 20);
    const wy = linearScale(wlo, whi, SUB_HEIGHT - 14, 8);
    weekly.svg.appendChild(
        svgElement("polyline", {
            points: polylinePoints(pattern.map((_, i) => wx(i)), pattern.map((v) => wy(v))),
            fill: "none",
            stroke: COLORS.observed,
            "stroke-width": 1.2,
        }),
    );
    pattern.forEach((value, i) => {
        weekly.svg.appendChild(
            svgElement("circle", {
                class: "weekly-handle",
                cx: wx(i),
                cy: wy(value),
                r: 4,
                fill: COLORS.handle,
                stroke: COLORS.observed,
                "data-weekday": String(i),
                "data-value": String(value),
            }),
        );
    });
    container.appendChild(weekly.root);

    // events: bar per event on the selected date, axis labeled by name
    const names = payload.events_by_date?.[date] ?? [];
    const events = panel(`Events: ${fmtSigned(effectAt(payload, date, "events"))}`, "subgraph-events");
    const labels = document.createElement("div");
    labels.className = "event-axis-labels";
    if (names.length === 0) {
        labels.textContent = "No events";
    } else {
        for (const name of names) {
            const label = document.createElement("span");
            label.className = "event-label";
            label.textContent = name;
            labels.appendChild(label);
        }
        const effects = payload.event_effects ?? {};
        const [elo, ehi] = extent([0, ...names.map((n) => effects[n] ?? 0)]);
        const ey = linearScale(elo, ehi, SUB_HEIGHT - 14, 8);
        names.forEach((name, i) => {
            const value = effects[name] ?? 0;
            const xPos = 40 + i * 90;
            events.svg.appendChild(
                svgElement("rect", {
                    class: "event-bar",
                    x: xPos,
                    y: Math.min(ey(0), ey(value)),
                    width: 40,
                    height: Math.abs(ey(value) - ey(0)) || 1,
                    fill: COLORS.observed,
                    "data-event": name,
                }),
            );
        });
    }
    events.root.appendChild(labels);
    container.appendChild(events.root);
}
