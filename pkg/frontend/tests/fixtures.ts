/** Payload fixtures shaped like the service's view responses. The first
 * forecast date (2016-05-30, a Monday with an event) carries the showcase
 * component values: level 72, yearly -28.4, weekly -16.5, events +43.1. */

import type { Decomposition, Treatment, ViewPayload } from "../src/types";

export const SHOWCASE_DATE = "2016-05-30";
export const SHOWCASE = { level: 72, yearly: -28.4, weekly: -16.5, events: 43.1 };

export function dateRange(startIso: string, days: number): string[] {
    const start = new Date(startIso + "T00:00:00Z");
    return Array.from({ length: days }, (_, i) => {
        const d = new Date(start.getTime() + i * 86_400_000);
        return d.toISOString().slice(0, 10);
    });
}

const HISTORY_DAYS = 28;
const HORIZON = 14;

function buildDecomposition(dates: string[]): Decomposition {
    const level: number[] = [];
    const weekly: number[] = [];
    const yearly: number[] = [];
    const events: number[] = [];
    const weeklyPattern = [-16.5, 2, 3, 1, 4, 8, -2];
    dates.forEach((date, i) => {
        const weekday = (new Date(date + "T00:00:00Z").getUTCDay() + 6) % 7;
        level.push(72);
        weekly.push(weeklyPattern[weekday]);
        yearly.push(date === SHOWCASE_DATE ? SHOWCASE.yearly : -20 + 0.1 * i);
        events.push(date === SHOWCASE_DATE ? SHOWCASE.events : 0);
    });
    const total = dates.map((_, i) => level[i] + weekly[i] + yearly[i] + events[i]);
    return { dates, level, weekly, yearly, events, total };
}

export function makePayload(treatment: Treatment): ViewPayload {
    const historyDates = dateRange("2016-05-02", HISTORY_DAYS);
    const forecastDates = dateRange(SHOWCASE_DATE, HORIZON);
    const allDates = [...historyDates, ...forecastDates];
    const decomposition = buildDecomposition(allDates);

    const payload: ViewPayload = {
        session_id: "s00001-test",
        treatment,
        product_index: 1,
        product_count: 3,
        product_id: "PRODUCT_01",
        function_label: treatment === "O" ? "View Details" : "Explain Values",
        signoff_min_seconds: 10,
        horizon_days: HORIZON,
        history: {
            dates: historyDates,
            sales: historyDates.map((_, i) => 70 + (i % 7)),
        },
        fit: { dates: historyDates, total: decomposition.total.slice(0, HISTORY_DAYS) },
        forecast: { dates: forecastDates, total: decomposition.total.slice(HISTORY_DAYS) },
        pinned_dates: [],
        editable: { values: true },
    };
    if (treatment === "O") {
        return payload;
    }
    payload.decomposition = decomposition;
    payload.weekly_pattern = [-16.5, 2, 3, 1, 4, 8, -2];
    payload.yearly_curve = {
        phase: Array.from({ length: 366 }, (_, i) => i * (365.25 / 366)),
        value: Array.from({ length: 366 }, (_, i) => -28.4 * Math.cos((2 * Math.PI * i) / 366)),
    };
    payload.event_effects = { "Memorial Day": 43.1 };
    payload.events_by_date = { [SHOWCASE_DATE]: ["Memorial Day"] };
    if (treatment === "TA") {
        payload.editable = { level: true, weekly: true, yearly: true, values: true };
        payload.residuals = {
            max_weeks: 38,
            weekly: historyDates.map((date, i) => ({
                weekday: (new Date(date + "T00:00:00Z").getUTCDay() + 6) % 7,
                date,
                value: (i % 5) - 2,
            })),
            yearly: [],
        };
    }
    return payload;
}
