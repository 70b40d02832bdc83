/** Client-side view state: one active function, selector only while explaining. */

export type ActiveFunction =
    | "explain"
    | "navigate"
    | "focus"
    | "edit-values"
    | "edit-weekly"
    | "edit-yearly"
    | "edit-level";

export const EDIT_FUNCTIONS: ReadonlySet<ActiveFunction> = new Set([
    "edit-values",
    "edit-weekly",
    "edit-yearly",
    "edit-level",
]);

export interface ViewState {
    fn: ActiveFunction;
    /** selector-bar date; non-null only while the explain function is active */
    selectorDate: string | null;
    /** visible index window into the date axis (pan/zoom) */
    window: { start: number; end: number };
    /** fluctuation slider for the weekly/yearly edit screens */
    weeksShown: number;
}

export function initialViewState(axisLength: number, maxWeeks: number): ViewState {
    return {
        fn: "explain",
        selectorDate: null,
        window: { start: 0, end: axisLength },
        weeksShown: maxWeeks,
    };
}

export function isEditFunction(fn: ActiveFunction): boolean {
    return EDIT_FUNCTIONS.has(fn);
}

/** Switch function; leaving explain drops the selector bar. */
export function setFunction(state: ViewState, fn: ActiveFunction): ViewState {
    return { ...state, fn, selectorDate: fn === "explain" ? state.selectorDate : null };
}

export function setSelector(state: ViewState, date: string | null): ViewState {
    if (state.fn !== "explain" && date !== null) {
        throw new Error("selector bar is only active in the explain function");
    }
    return { ...state, selectorDate: date };
}

export function setWeeksShown(state: ViewState, weeks: number, maxWeeks: number): ViewState {
    const clamped = Math.max(1, Math.min(maxWeeks, Math.round(weeks)));
    return { ...state, weeksShown: clamped };
}

/** Zoom the window around the forecast period (the Focus function). */
export function focusOnForecast(state: ViewState, axisLength: number, horizon: number): ViewState {
    const margin = Math.min(axisLength - horizon, horizon * 2);
    return { ...state, window: { start: Math.max(0, axisLength - horizon - margin), end: axisLength } };
}

export function pan(state: ViewState, delta: number, axisLength: number): ViewState {
    const width = state.window.end - state.window.start;
    let start = state.window.start + delta;
    start = Math.max(0, Math.min(axisLength - width, start));
    return { ...state, window: { start, end: start + width } };
}

export function zoom(state: ViewState, factor: number, axisLength: number): ViewState {
    const width = state.window.end - state.window.start;
    const center = (state.window.start + state.window.end) / 2;
    const newWidth = Math.max(14, Math.min(axisLength, width * factor));
    let start = Math.round(center - newWidth / 2);
    start = Math.max(0, Math.min(axisLength - Math.round(newWidth), start));
    return { ...state, window: { start, end: start + Math.round(newWidth) } };
}
