/** Selector-bar legend and effect-graph titles at display precision. */

import { describe, expect, it } from "vitest";

import { fmt1, fmtSigned, weekdayName } from "../src/format";
import { renderMainGraph } from "../src/main_graph";
import { initialViewState, setSelector } from "../src/state";
import { renderSubgraphs } from "../src/subgraphs";
import { SHOWCASE_DATE, makePayload } from "./fixtures";

function host(): HTMLElement {
    const el = document.createElement("div");
    document.body.appendChild(el);
    return el;
}

describe("formatting", () => {
    it("shows one decimal and strips trailing zeros", () => {
        expect(fmt1(72.0)).toBe("72");
        expect(fmt1(70.2)).toBe("70.2");
        expect(fmt1(-28.4)).toBe("-28.4");
        expect(fmt1(-16.499999)).toBe("-16.5");
        expect(fmtSigned(43.1)).toBe("+43.1");
        expect(fmtSigned(-16.5)).toBe("-16.5");
    });

    it("knows its weekdays", () => {
        expect(weekdayName(SHOWCASE_DATE)).toBe("Monday");
    });
});

describe("selector legend on the showcase date", () => {
    it("reproduces prediction and level from the decomposition", () => {
        const payload = makePayload("TA");
        const state = setSelector(initialViewState(42, 38), SHOWCASE_DATE);
        const graph = renderMainGraph(host(), payload, state);
        const lines = [...graph.legend.querySelectorAll(".legend-line")].map(
            (el) => el.textContent,
        );
        // 72 - 28.4 - 16.5 + 43.1 = 70.2; the showcase screen displays it
        // rounded to 70, which is 70.2 at display rounding
        expect(lines).toContain("Prediction: 70.2");
        expect(lines).toContain("Level: 72");
        expect(Math.round(70.2)).toBe(70);
        expect(graph.svg.querySelector(".selector-bar")).not.toBeNull();
    });

    it("shows date, weekday, fitted and observed under the opaque design", () => {
        const payload = makePayload("O");
        const date = payload.history.dates[7];
        const state = setSelector(initialViewState(42, 38), date);
        const graph = renderMainGraph(host(), payload, state);
        const lines = [...graph.legend.querySelectorAll(".legend-line")].map(
            (el) => el.textContent ?? "",
        );
        expect(lines[0]).toContain(date);
        expect(lines[0]).toContain(weekdayName(date));
        expect(lines.some((l) => l.startsWith("Fitted:"))).toBe(true);
        expect(lines.some((l) => l.startsWith("Observed:"))).toBe(true);
        expect(lines.some((l) => l.startsWith("Prediction:"))).toBe(false);
        expect(lines.some((l) => l.startsWith("Level:"))).toBe(false);
    });
});

describe("effect subgraph titles on the showcase date", () => {
    it("carries the one-decimal effect sizes", () => {
        const payload = makePayload("TA");
        const subHost = host();
        renderSubgraphs(subHost, payload, SHOWCASE_DATE);
        const titles = [...subHost.querySelectorAll(".subgraph-title")].map(
            (el) => el.textContent,
        );
        expect(titles).toEqual(["Yearly: -28.4", "Weekly: -16.5", "Events: +43.1"]);
    });

    it("labels the events axis with that date's events", () => {
        const payload = makePayload("TA");
        const subHost = host();
        renderSubgraphs(subHost, payload, SHOWCASE_DATE);
        const labels = [...subHost.querySelectorAll(".event-label")].map((el) => el.textContent);
        expect(labels).toEqual(["Memorial Day"]);
    });

    it("shows a zero title and no bars on an event-free date", () => {
        const payload = makePayload("TA");
        const subHost = host();
        renderSubgraphs(subHost, payload, payload.forecast.dates[1]);
        const titles = [...subHost.querySelectorAll(".subgraph-title")].map(
            (el) => el.textContent,
        );
        expect(titles[2]).toBe("Events: 0");
        expect(subHost.querySelectorAll(".event-bar")).toHaveLength(0);
        expect(subHost.querySelector(".event-axis-labels")?.textContent).toBe("No events");
    });
});
