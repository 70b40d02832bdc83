/** Full client flow against a scripted fake service: entry, tutorial,
 * three sign-offs, survey, completion. */

import { describe, expect, it, vi } from "vitest";

import type { ApiClient } from "../src/api";
import { FssApp, INCENTIVE_TEXT } from "../src/app";
import type { SignoffResponse, Treatment } from "../src/types";
import { makePayload } from "./fixtures";

function flush(): Promise<void> {
    return new Promise((resolve) => setTimeout(resolve, 0));
}

class FakeService implements ApiClient {
    product = 1;
    signoffs = 0;
    surveyScores: number[] | null = null;

    constructor(private readonly treatment: Treatment) {}

    createSession = vi.fn(async (workerId: string) => ({
        session_id: "s-fake",
        worker_id: workerId,
        treatment: this.treatment,
        products: ["PRODUCT_01", "PRODUCT_02", "PRODUCT_03"],
        active_product: 1,
        duplicate: false,
        resumed: false,
    }));

    getView = vi.fn(async (_sid: string, productIndex: number) => {
        const payload = makePayload(this.treatment);
        return { ...payload, product_index: productIndex };
    });

    postAdjustment = vi.fn(async () => ({
        forecast: makePayload(this.treatment).forecast,
        pinned_dates: [],
        state: {},
    }));

    signOff = vi.fn(async (): Promise<SignoffResponse> => {
        this.signoffs += 1;
        if (this.signoffs >= 3) {
            return { status: "survey" };
        }
        this.product += 1;
        return { status: "next_product", active_product: this.product };
    });

    submitSurvey = vi.fn(async (_sid: string, scores: number[]) => {
        this.surveyScores = scores;
        return {
            secret_key: "cafebabe12345678",
            satisfaction: 4.5,
            per_product: [
                { product_id: "PRODUCT_01", rmae: 0.97, bonus: 0.6 },
                { product_id: "PRODUCT_02", rmae: 1.0, bonus: 0 },
                { product_id: "PRODUCT_03", rmae: 1.1, bonus: 0 },
            ],
            bonus_total: 0.6,
        };
    });
}

function mountApp(treatment: Treatment): { app: FssApp; root: HTMLElement; api: FakeService } {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const api = new FakeService(treatment);
    const app = new FssApp(root, api, treatment);
    return { app, root, api };
}

describe("application flow", () => {
    it("always shows a task banner", async () => {
        const { app, root } = mountApp("TA");
        expect(root.querySelector(".task-banner")?.textContent).toBeTruthy();
        expect(root.querySelector(".incentive")?.textContent).toBe(INCENTIVE_TEXT);
        expect(app.currentStage()).toBe("entry");
    });

    it("walks tutorial, sign-offs, survey, and completion", async () => {
        const { app, root, api } = mountApp("TA");
        root.querySelector<HTMLInputElement>(".worker-id")!.value = "worker-7";
        root.querySelectorAll("button").forEach((b) => {
            if (b.textContent === "Start") b.click();
        });
        await flush();
        expect(app.currentStage()).toBe("tutorial");

        // three Next clicks then Start Signing Off
        for (let i = 0; i < 4; i++) {
            const next = root.querySelector<HTMLButtonElement>(".tutorial-next")!;
            next.click();
            await flush();
        }
        expect(app.currentStage()).toBe("signoff");
        expect(root.querySelector(".task-banner")?.textContent).toContain("sign off");

        for (let round = 0; round < 3; round++) {
            const signoff = root.querySelector<HTMLButtonElement>(".signoff-button")!;
            signoff.click();
            await flush();
            await flush();
        }
        expect(api.signoffs).toBe(3);
        expect(app.currentStage()).toBe("survey");

        root.querySelector("form")!.dispatchEvent(new Event("submit"));
        await flush();
        expect(app.currentStage()).toBe("done");
        expect(api.surveyScores).toEqual([4, 4, 4, 4, 4]);
        expect(root.querySelector(".secret-key")?.textContent).toContain("cafebabe12345678");
        expect(root.querySelector(".bonus-total")?.textContent).toContain("$0.60");
    });

    it("opaque sessions skip the morph tutorial", async () => {
        const { app, root } = mountApp("O");
        root.querySelector<HTMLInputElement>(".worker-id")!.value = "worker-8";
        root.querySelectorAll("button").forEach((b) => {
            if (b.textContent === "Start") b.click();
        });
        await flush();
        expect(app.currentStage()).toBe("tutorial");
        const next = root.querySelector<HTMLButtonElement>(".tutorial-next")!;
        expect(next.textContent).toBe("Start Signing Off");
        next.click();
        await flush();
        expect(app.currentStage()).toBe("signoff");
        // no component edit affordances anywhere on the opaque screen
        expect(root.querySelector("[data-fn=edit-weekly]")).toBeNull();
        expect(root.querySelector("[data-fn=edit-yearly]")).toBeNull();
        expect(root.querySelector("[data-fn=edit-level]")).toBeNull();
        expect(root.querySelector("[data-fn=edit-values]")).not.toBeNull();
    });
});
