/** Edit plumbing: stroke downsampling, posting, and the delayed morph.
 *
 * After a component edit is confirmed, the main graph keeps its old shape
 * for a beat and then morphs to the recomposed forecast, so the user can
 * see what their adjustment did.
 */

import type { ApiClient } from "./api.js";
import type { AdjustmentRequest, AdjustmentResponse } from "./types.js";

export const MORPH_DELAY_MS = 800;

export interface StrokePoint {
    date: string;
    value: number;
}

/** Freehand strokes arrive denser than daily; keep one point per day (last wins). */
export function downsampleDaily(points: StrokePoint[]): StrokePoint[] {
    const perDay = new Map<string, number>();
    for (const p of points) {
        perDay.set(p.date, p.value);
    }
    return [...perDay.entries()]
        .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
        .map(([date, value]) => ({ date, value }));
}

export interface EditOutcome {
    ok: boolean;
    response?: AdjustmentResponse;
    errorCode?: string;
}

export interface MorphTarget {
    updateForecast(totals: number[]): void;
}

/**
 * Post one edit; on success schedule the graph morph after MORPH_DELAY_MS,
 * on rejection revert to the pre-edit forecast and surface the error code.
 */
export async function postEditWithMorph(
    api: ApiClient,
    sessionId: string,
    productIndex: number,
    edit: AdjustmentRequest,
    graph: MorphTarget,
    previousForecast: number[],
    notify: (message: string) => void,
): Promise<EditOutcome> {
    try {
        const response = await api.postAdjustment(sessionId, productIndex, edit);
        setTimeout(() => graph.updateForecast(response.forecast.total), MORPH_DELAY_MS);
        return { ok: true, response };
    } catch (error) {
        graph.updateForecast(previousForecast);
        const code = (error as { code?: string }).code ?? "error";
        notify(code === "treatment_violation" ? "This view does not allow that edit." : "Edit rejected.");
        return { ok: false, errorCode: code };
    }
}

/** Weekly handles post as exactly seven values, Monday first. */
export function weeklyEditPayload(handles: number[]): AdjustmentRequest {
    if (handles.length !== 7) {
        throw new Error(`weekly edit needs 7 handles, got ${handles.length}`);
    }
    return { weekly: [...handles] };
}

export function levelEditPayload(stroke: StrokePoint[]): AdjustmentRequest {
    const daily = downsampleDaily(stroke);
    return { level: daily.map((p) => [p.date, p.value]) };
}

/** Yearly strokes are sampled in cycle coordinates; dedupe per position. */
export function yearlyEditPayload(points: Array<[number, number]>): AdjustmentRequest {
    const perPhase = new Map<number, number>();
    for (const [phase, value] of points) {
        perPhase.set(Math.round(phase), value);
    }
    const polyline = [...perPhase.entries()].sort((a, b) => a[0] - b[0]);
    return { yearly: polyline };
}

export function valueEditPayload(edits: Record<string, number>): AdjustmentRequest {
    return { values: { ...edits } };
}
