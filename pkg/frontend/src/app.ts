/** Screen orchestration: worker entry, tutorial, the sequential sign-off
 * loop, survey, completion. The current task is always spelled out in the
 * top-left banner. */

import { ApiClient, ApiError, SessionApi } from "./api.js";
import {
    MORPH_DELAY_MS,
    levelEditPayload,
    postEditWithMorph,
    valueEditPayload,
    weeklyEditPayload,
    yearlyEditPayload,
    StrokePoint,
} from "./edits.js";
import { money } from "./format.js";
import { MainGraph, renderMainGraph } from "./main_graph.js";
import { renderControls } from "./controls.js";
import {
    ActiveFunction,
    ViewState,
    focusOnForecast,
    initialViewState,
    isEditFunction,
    setFunction,
    setSelector,
} from "./state.js";
import { SignoffButton } from "./signoff.js";
import { renderSubgraphs } from "./subgraphs.js";
import { renderCompletion, renderSurvey } from "./survey.js";
import { layeredValue, tutorialSteps } from "./tutorial.js";
import type { SessionInfo, Treatment, ViewPayload } from "./types.js";

export const INCENTIVE_TEXT =
    "Accuracy improvements over the model forecast earn a bonus of $0.20 per " +
    "percentage point, up to $1.00 per product ($3.00 in total).";

type Stage = "entry" | "tutorial" | "signoff" | "survey" | "done";

export class FssApp {
    private stage: Stage = "entry";
    private session: SessionInfo | null = null;
    private payload: ViewPayload | null = null;
    private view: ViewState = initialViewState(0, 38);
    private graph: MainGraph | null = null;
    private tutorialIndex = 0;

    readonly banner: HTMLElement;
    readonly notice: HTMLElement;
    readonly main: HTMLElement;

    constructor(
        root: HTMLElement,
        private readonly api: ApiClient,
        private readonly treatment: Treatment,
    ) {
        this.banner = document.createElement("div");
        this.banner.className = "task-banner";
        this.notice = document.createElement("div");
        this.notice.className = "notice";
        this.main = document.createElement("div");
        this.main.className = "screen";
        root.textContent = "";
        root.appendChild(this.banner);
        root.appendChild(this.notice);
        root.appendChild(this.main);
        this.renderEntry();
    }

    private setTask(text: string): void {
        this.banner.textContent = text;
    }

    notify(message: string): void {
        this.notice.textContent = message;
    }

    // -- entry ------------------------------------------------------------
    private renderEntry(): void {
        this.stage = "entry";
        this.setTask("Enter your Worker ID to begin.");
        this.main.textContent = "";
        const intro = document.createElement("p");
        intro.className = "incentive";
        intro.textContent = INCENTIVE_TEXT;
        const input = document.createElement("input");
        input.className = "worker-id";
        input.placeholder = "Worker ID";
        const start = document.createElement("button");
        start.textContent = "Start";
        start.onclick = () => void this.begin(input.value);
        this.main.append(intro, input, start);
    }

    private async begin(workerId: string): Promise<void> {
        try {
            this.session = await this.api.createSession(workerId, this.treatment);
        } catch (error) {
            if (error instanceof ApiError && error.code === "duplicate_worker") {
                this.notify("You already participated in this study.");
                return;
            }
            throw error;
        }
        this.tutorialIndex = 0;
        this.payload = await this.api.getView(this.session.session_id, this.activeProduct());
        this.view = initialViewState(this.axisLength(), this.payload.residuals?.max_weeks ?? 38);
        this.renderTutorial();
    }

    private activeProduct(): number {
        return this.session?.active_product ?? 1;
    }

    private axisLength(): number {
        if (!this.payload) return 0;
        return this.payload.history.dates.length + this.payload.forecast.dates.length;
    }

    // -- tutorial ----------------------------------------------------------
    private renderTutorial(): void {
        if (!this.payload) return;
        this.stage = "tutorial";
        const steps = tutorialSteps(this.treatment);
        const step = steps[this.tutorialIndex];
        this.setTask(step.text);
        this.main.textContent = "";

        const graphHost = document.createElement("div");
        graphHost.className = "graph-host tutorial-graph";
        const payload = this.tutorialPayload(step.show);
        this.graph = renderMainGraph(graphHost, payload, this.view);
        const subHost = document.createElement("div");
        subHost.className = "subgraph-row";
        if (step.subgraphs.length > 0) {
            renderSubgraphs(subHost, this.filterSubgraphs(payload, step.subgraphs), null);
        }
        const next = document.createElement("button");
        next.className = "tutorial-next";
        next.textContent = this.tutorialIndex < steps.length - 1 ? "Next" : "Start Signing Off";
        next.onclick = () => {
            if (this.tutorialIndex < steps.length - 1) {
                this.tutorialIndex += 1;
                this.renderTutorial();
            } else {
                void this.renderSignoffStage();
            }
        };
        this.main.append(graphHost, subHost, next);
    }

    /** Tutorial variant of the payload with the gray line built up in layers. */
    private tutorialPayload(layer: "level" | "level+yearly" | "level+yearly+weekly" | "full"): ViewPayload {
        const payload = this.payload!;
        if (!payload.decomposition || layer === "full") return payload;
        const dec = payload.decomposition;
        const historyN = payload.history.dates.length;
        const fitTotal = payload.fit.total.map((_, i) =>
            layeredValue(layer, dec.level[i], dec.yearly[i], dec.weekly[i], dec.events[i]),
        );
        const forecastTotal = payload.forecast.total.map((_, i) => {
            const j = historyN + i;
            return layeredValue(layer, dec.level[j], dec.yearly[j], dec.weekly[j], dec.events[j]);
        });
        return {
            ...payload,
            fit: { ...payload.fit, total: fitTotal },
            forecast: { ...payload.forecast, total: forecastTotal },
        };
    }

    private filterSubgraphs(payload: ViewPayload, visible: Array<"yearly" | "weekly" | "events">): ViewPayload {
        const filtered: ViewPayload = { ...payload };
        if (!visible.includes("events")) {
            filtered.events_by_date = {};
        }
        return filtered;
    }

    // -- sign-off loop -----------------------------------------------------
    async renderSignoffStage(): Promise<void> {
        if (!this.session) return;
        this.stage = "signoff";
        this.payload = await this.api.getView(this.session.session_id, this.activeProduct());
        this.view = initialViewState(this.axisLength(), this.payload.residuals?.max_weeks ?? 38);
        this.view = focusOnForecast(this.view, this.axisLength(), this.payload.horizon_days);
        this.setTask(
            `Review the 14-day forecast for product ${this.payload.product_index} of ` +
                `${this.payload.product_count}. Adjust it if you can improve it, then sign off. ` +
                INCENTIVE_TEXT,
        );
        this.renderProductScreen();
    }

    private renderProductScreen(): void {
        const payload = this.payload!;
        this.main.textContent = "";

        const graphHost = document.createElement("div");
        graphHost.className = "graph-host";
        this.graph = renderMainGraph(graphHost, payload, this.view);

        const controlsHost = document.createElement("div");
        controlsHost.className = "controls";
        renderControls(
            controlsHost,
            payload,
            this.view.fn,
            (fn) => this.switchFunction(fn),
            (target) => void this.reset(target),
        );

        const subHost = document.createElement("div");
        subHost.className = "subgraph-row";
        renderSubgraphs(subHost, payload, this.view.selectorDate);

        const signoff = new SignoffButton(this.api, (result) => {
            if (result.status === "survey") {
                this.renderSurveyStage();
            } else {
                this.session!.active_product = result.active_product ?? null;
                void this.renderSignoffStage();
            }
        });
        signoff.attach(payload.session_id, payload.product_index);

        this.main.append(graphHost, controlsHost, subHost, signoff.element);
    }

    switchFunction(fn: ActiveFunction): void {
        this.view = setFunction(this.view, fn);
        if (fn === "focus") {
            this.view = focusOnForecast(this.view, this.axisLength(), this.payload!.horizon_days);
        }
        if (isEditFunction(fn)) {
            this.setTask(taskTextForEdit(fn));
        }
        this.renderProductScreen();
    }

    selectDate(date: string): void {
        if (this.view.fn !== "explain") return;
        this.view = setSelector(this.view, date);
        this.renderProductScreen();
    }

    // -- edit submission ----------------------------------------------------
    async submitWeekly(handles: number[]): Promise<void> {
        await this.submitEdit(weeklyEditPayload(handles));
    }

    async submitYearly(points: Array<[number, number]>): Promise<void> {
        await this.submitEdit(yearlyEditPayload(points));
    }

    async submitLevel(stroke: StrokePoint[]): Promise<void> {
        await this.submitEdit(levelEditPayload(stroke));
    }

    async submitValues(edits: Record<string, number>): Promise<void> {
        await this.submitEdit(valueEditPayload(edits));
    }

    async reset(target: "level" | "weekly" | "yearly" | "values" | "all"): Promise<void> {
        await this.submitEdit({ reset: target });
    }

    private async submitEdit(edit: Parameters<ApiClient["postAdjustment"]>[2]): Promise<void> {
        const payload = this.payload!;
        const outcome = await postEditWithMorph(
            this.api,
            payload.session_id,
            payload.product_index,
            edit,
            this.graph!,
            payload.forecast.total,
            (message) => this.notify(message),
        );
        if (outcome.ok && outcome.response) {
            payload.forecast = outcome.response.forecast;
            payload.pinned_dates = outcome.response.pinned_dates;
            // the main graph itself morphs after MORPH_DELAY_MS; refresh the
            // rest of the screen on the same beat
            setTimeout(() => this.renderProductScreen(), MORPH_DELAY_MS);
        }
    }

    // -- survey & completion -------------------------------------------------
    renderSurveyStage(): void {
        this.stage = "survey";
        this.setTask("Indicate your agreement with five statements, then confirm.");
        this.main.textContent = "";
        renderSurvey(this.main, (scores, comment) => void this.finish(scores, comment));
    }

    private async finish(scores: number[], comment: string): Promise<void> {
        const receipt = await this.api.submitSurvey(this.session!.session_id, scores, comment);
        this.stage = "done";
        this.setTask("Done. Copy your secret key to claim the bonus below.");
        this.main.textContent = "";
        renderCompletion(this.main, receipt);
        this.notify(`Total bonus: ${money(receipt.bonus_total)}`);
    }

    currentStage(): Stage {
        return this.stage;
    }
}

function taskTextForEdit(fn: ActiveFunction): string {
    switch (fn) {
        case "edit-values":
            return "Drag individual forecast values up or down; they stay pinned where you drop them.";
        case "edit-weekly":
            return "Drag the white handle points to adjust the weekly effects; the slider limits the fluctuations shown.";
        case "edit-yearly":
            return "Redraw the yearly effects curve; the slider limits the fluctuations shown.";
        case "edit-level":
            return "Redraw the general level of sales in the main graph; the forecast follows directly.";
        default:
            return "";
    }
}

export function mount(root: HTMLElement, baseUrl = "", treatment: Treatment = "TA"): FssApp {
    return new FssApp(root, new SessionApi(baseUrl), treatment);
}
