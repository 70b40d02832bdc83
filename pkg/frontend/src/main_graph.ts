/** The main sales graph: history and forecast in purple, the model fit in
 * gray, plus the selector-bar legend for Explain Values / View Details. */

import { COLORS, extent, linearScale, polylinePoints, svgElement, trianglePath } from "./chart.js";
import { fmt1, weekdayName } from "./format.js";
import type { ViewState } from "./state.js";
import type { ViewPayload } from "./types.js";

export const GRAPH_WIDTH = 860;
export const GRAPH_HEIGHT = 320;

export interface MainGraph {
    svg: SVGSVGElement;
    legend: HTMLElement;
    /** redraw the forecast markers (used by the post-edit morph) */
    updateForecast(totals: number[]): void;
}

interface Axis {
    dates: string[];
    x: (index: number) => number;
    y: (value: number) => number;
}

function buildAxis(payload: ViewPayload, state: ViewState): Axis {
    const dates = [...payload.history.dates, ...payload.forecast.dates];
    const values = [
        ...payload.history.sales,
        ...payload.fit.total,
        ...payload.forecast.total,
    ];
    const [lo, hi] = extent(values);
    const xScale = linearScale(state.window.start, state.window.end - 1, 40, GRAPH_WIDTH - 10);
    const yScale = linearScale(lo, hi, GRAPH_HEIGHT - 24, 10);
    return { dates, x: (i) => xScale(i), y: (v) => yScale(v) };
}

function legendLines(payload: ViewPayload, date: string): string[] {
    const lines = [`${date} (${weekdayName(date)})`];
    const historyIdx = payload.history.dates.indexOf(date);
    const forecastIdx = payload.forecast.dates.indexOf(date);
    if (payload.decomposition) {
        const idx = payload.decomposition.dates.indexOf(date);
        if (idx >= 0) {
            lines.push(`Prediction: ${fmt1(payload.decomposition.total[idx])}`);
            lines.push(`Level: ${fmt1(payload.decomposition.level[idx])}`);
        }
    } else if (forecastIdx >= 0) {
        lines.push(`Forecast: ${fmt1(payload.forecast.total[forecastIdx])}`);
    } else if (historyIdx >= 0) {
        lines.push(`Fitted: ${fmt1(payload.fit.total[historyIdx])}`);
    }
    if (historyIdx >= 0) {
        lines.push(`Observed: ${fmt1(payload.history.sales[historyIdx])}`);
    }
    return lines;
}

export function renderMainGraph(
    container: HTMLElement,
    payload: ViewPayload,
    state: ViewState,
): MainGraph {
    container.textContent = "";
    const axis = buildAxis(payload, state);
    const svg = svgElement("svg", {
        viewBox: `0 0 ${GRAPH_WIDTH} ${GRAPH_HEIGHT}`,
        class: "main-graph",
        role: "img",
    });

    const historyN = payload.history.dates.length;

    // gray model fit under the purple observations
    svg.appendChild(
        svgElement("polyline", {
            class: "fit-line",
            points: polylinePoints(
                payload.fit.total.map((_, i) => axis.x(i)),
                payload.fit.total.map((v) => axis.y(v)),
            ),
            fill: "none",
            stroke: COLORS.fit,
            "stroke-width": 1.4,
        }),
    );
    svg.appendChild(
        svgElement("polyline", {
            class: "history-line",
            points: polylinePoints(
                payload.history.sales.map((_, i) => axis.x(i)),
                payload.history.sales.map((v) => axis.y(v)),
            ),
            fill: "none",
            stroke: COLORS.observed,
            "stroke-width": 1.6,
        }),
    );

    // trend line: only drawn when the payload explains the model
    if (payload.decomposition) {
        svg.appendChild(
            svgElement("polyline", {
                class: "trend-line",
                points: polylinePoints(
                    payload.decomposition.level.map((_, i) => axis.x(i)),
                    payload.decomposition.level.map((v) => axis.y(v)),
                ),
                fill: "none",
                stroke: COLORS.trend,
                "stroke-dasharray": "6 4",
                "stroke-width": 1.2,
            }),
        );
    }

    const forecastGroup = svgElement("g", { class: "forecast-markers" });
    svg.appendChild(forecastGroup);

    function drawForecast(totals: number[]): void {
        forecastGroup.textContent = "";
        totals.forEach((value, i) => {
            forecastGroup.appendChild(
                svgElement("path", {
                    class: "forecast-triangle",
                    d: trianglePath(axis.x(historyN + i), axis.y(value)),
                    fill: COLORS.observed,
                    "data-date": payload.forecast.dates[i],
                    "data-value": String(value),
                }),
            );
        });
    }
    drawForecast(payload.forecast.total);

    const legend = document.createElement("div");
    legend.className = "legend";
    if (state.fn === "explain" && state.selectorDate) {
        const idx = axis.dates.indexOf(state.selectorDate);
        if (idx >= 0) {
            svg.appendChild(
                svgElement("line", {
                    class: "selector-bar",
                    x1: axis.x(idx),
                    x2: axis.x(idx),
                    y1: 6,
                    y2: GRAPH_HEIGHT - 18,
                    stroke: COLORS.selector,
                    "stroke-width": 1,
                }),
            );
        }
        for (const line of legendLines(payload, state.selectorDate)) {
            const row = document.createElement("div");
            row.className = "legend-line";
            row.textContent = line;
            legend.appendChild(row);
        }
    }

    container.appendChild(svg);
    container.appendChild(legend);
    return { svg, legend, updateForecast: drawForecast };
}
