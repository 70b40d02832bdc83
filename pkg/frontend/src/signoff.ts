/** The sign-off button, including its brief "So fast?" scolding state. */

import { ApiClient, ApiError } from "./api.js";
import type { SignoffResponse } from "./types.js";

export const SO_FAST_TEXT = "So fast?";
export const SO_FAST_DURATION_MS = 1000;
export const SIGN_OFF_TEXT = "Sign Off";

export class SignoffButton {
    readonly element: HTMLButtonElement;
    private reverting: number | null = null;

    constructor(
        private readonly api: ApiClient,
        private readonly onAdvance: (result: SignoffResponse) => void,
    ) {
        this.element = document.createElement("button");
        this.element.className = "signoff-button";
        this.element.textContent = SIGN_OFF_TEXT;
    }

    attach(sessionId: string, productIndex: number): void {
        this.element.onclick = () => void this.click(sessionId, productIndex);
    }

    async click(sessionId: string, productIndex: number): Promise<void> {
        try {
            const result = await this.api.signOff(sessionId, productIndex);
            this.onAdvance(result);
        } catch (error) {
            if (error instanceof ApiError && error.code === "too_fast") {
                this.showSoFast();
            } else {
                throw error;
            }
        }
    }

    /** Gray out and ask "So fast?" for one second, then restore. */
    private showSoFast(): void {
        if (this.reverting !== null) {
            clearTimeout(this.reverting);
        }
        this.element.classList.add("so-fast");
        this.element.disabled = true;
        this.element.textContent = SO_FAST_TEXT;
        this.reverting = window.setTimeout(() => {
            this.element.classList.remove("so-fast");
            this.element.disabled = false;
            this.element.textContent = SIGN_OFF_TEXT;
            this.reverting = null;
        }, SO_FAST_DURATION_MS);
    }
}
