/** Intro sequence: the transparent designs build the gray line up step by
 * step (level, then yearly, weekly, events); the opaque design goes straight
 * to the finished display. */

import type { Treatment } from "./types.js";

export type TutorialLayer = "level" | "level+yearly" | "level+yearly+weekly" | "full";

export interface TutorialStep {
    id: string;
    text: string;
    show: TutorialLayer;
    /** which effect subgraphs are visible at this step */
    subgraphs: Array<"yearly" | "weekly" | "events">;
}

export function tutorialSteps(treatment: Treatment): TutorialStep[] {
    if (treatment === "O") {
        return [
            {
                id: "display",
                text:
                    "The graph shows the sales data for one food product. The gray line is the " +
                    "model's fit; purple shows observed values and the forecast. Use View Details " +
                    "to inspect dates.",
                show: "full",
                subgraphs: [],
            },
        ];
    }
    return [
        {
            id: "level",
            text: "The model understands the sales data step by step. It starts with the general level of sales, shown as a gray line.",
            show: "level",
            subgraphs: [],
        },
        {
            id: "yearly",
            text: "Next it learns the yearly pattern; the gray line now includes it, and the yearly graph appears below.",
            show: "level+yearly",
            subgraphs: ["yearly"],
        },
        {
            id: "weekly",
            text: "Then come the weekly effects, added the same way.",
            show: "level+yearly+weekly",
            subgraphs: ["yearly", "weekly"],
        },
        {
            id: "events",
            text: "Finally the model adds event effects. This is the model's final estimation.",
            show: "full",
            subgraphs: ["yearly", "weekly", "events"],
        },
    ];
}

/** Sum the visible layers for one date index; drives the tutorial morph. */
export function layeredValue(
    layer: TutorialLayer,
    level: number,
    yearly: number,
    weekly: number,
    events: number,
): number {
    switch (layer) {
        case "level":
            return level;
        case "level+yearly":
            return level + yearly;
        case "level+yearly+weekly":
            return level + yearly + weekly;
        case "full":
            return level + yearly + weekly + events;
    }
}
