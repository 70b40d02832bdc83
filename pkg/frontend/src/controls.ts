/** Function buttons under the main graph, grouped by what the user is doing
 * (navigating vs. editing), never by implementation detail. */

import type { ActiveFunction } from "./state.js";
import type { ViewPayload } from "./types.js";

export interface ControlSpec {
    fn: ActiveFunction;
    label: string;
    group: "navigation" | "editing";
}

export function availableControls(payload: ViewPayload): ControlSpec[] {
    const controls: ControlSpec[] = [
        { fn: "explain", label: payload.function_label, group: "navigation" },
        { fn: "navigate", label: "Navigate", group: "navigation" },
        { fn: "focus", label: "Focus", group: "navigation" },
    ];
    if (payload.editable.values) {
        controls.push({ fn: "edit-values", label: "Edit Values", group: "editing" });
    }
    if (payload.editable.yearly) {
        controls.push({ fn: "edit-yearly", label: "Edit Yearly", group: "editing" });
    }
    if (payload.editable.weekly) {
        controls.push({ fn: "edit-weekly", label: "Edit Weekly", group: "editing" });
    }
    if (payload.editable.level) {
        controls.push({ fn: "edit-level", label: "Edit Level", group: "editing" });
    }
    return controls;
}

export interface ResetSpec {
    target: "level" | "weekly" | "yearly" | "values" | "all";
    label: string;
}

export function availableResets(payload: ViewPayload): ResetSpec[] {
    const resets: ResetSpec[] = [];
    if (payload.editable.yearly) resets.push({ target: "yearly", label: "Reset Yearly" });
    if (payload.editable.weekly) resets.push({ target: "weekly", label: "Reset Weekly" });
    if (payload.editable.level) resets.push({ target: "level", label: "Reset Level" });
    if (payload.editable.values) resets.push({ target: "values", label: "Reset Values" });
    resets.push({ target: "all", label: "Reset All" });
    return resets;
}

export function renderControls(
    container: HTMLElement,
    payload: ViewPayload,
    active: ActiveFunction,
    onSelect: (fn: ActiveFunction) => void,
    onReset: (target: ResetSpec["target"]) => void,
): void {
    container.textContent = "";
    for (const group of ["navigation", "editing"] as const) {
        const row = document.createElement("div");
        row.className = `control-group control-group-${group}`;
        for (const control of availableControls(payload).filter((c) => c.group === group)) {
            const button = document.createElement("button");
            button.className = "control-button";
            button.dataset.fn = control.fn;
            button.textContent = control.label;
            if (control.fn === active) {
                button.classList.add("active");
            }
            button.onclick = () => onSelect(control.fn);
            row.appendChild(button);
        }
        if (group === "editing") {
            for (const reset of availableResets(payload)) {
                const button = document.createElement("button");
                button.className = "reset-button";
                button.dataset.reset = reset.target;
                button.textContent = reset.label;
                button.onclick = () => onReset(reset.target);
                row.appendChild(button);
            }
        }
        container.appendChild(row);
    }
}
