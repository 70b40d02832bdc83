/** Thin fetch client; every service rejection surfaces as an ApiError. */

import type {
    AdjustmentRequest,
    AdjustmentResponse,
    SessionInfo,
    SignoffResponse,
    SurveyReceipt,
    Treatment,
    ViewPayload,
} from "./types.js";

export class ApiError extends Error {
    constructor(
        public readonly status: number,
        public readonly code: string,
        message: string,
    ) {
        super(message);
    }
}

/** What the screens need from the service; tests substitute fakes. */
export interface ApiClient {
    createSession(workerId: string, treatment?: Treatment): Promise<SessionInfo>;
    getView(sessionId: string, productIndex: number): Promise<ViewPayload>;
    postAdjustment(
        sessionId: string,
        productIndex: number,
        edit: AdjustmentRequest,
    ): Promise<AdjustmentResponse>;
    signOff(sessionId: string, productIndex: number): Promise<SignoffResponse>;
    submitSurvey(sessionId: string, scores: number[], comment: string): Promise<SurveyReceipt>;
}

export class SessionApi implements ApiClient {
    constructor(private readonly baseUrl: string = "") {}

    private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
        const response = await fetch(this.baseUrl + path, {
            method,
            headers: body === undefined ? undefined : { "Content-Type": "application/json" },
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        const text = await response.text();
        const data = text ? JSON.parse(text) : {};
        if (!response.ok) {
            throw new ApiError(response.status, data.error ?? "error", data.message ?? text);
        }
        return data as T;
    }

    createSession(workerId: string, treatment?: Treatment): Promise<SessionInfo> {
        return this.request("POST", "/sessions", { worker_id: workerId, treatment });
    }

    getView(sessionId: string, productIndex: number): Promise<ViewPayload> {
        return this.request("GET", `/sessions/${sessionId}/products/${productIndex}/view`);
    }

    postAdjustment(
        sessionId: string,
        productIndex: number,
        edit: AdjustmentRequest,
    ): Promise<AdjustmentResponse> {
        return this.request(
            "POST",
            `/sessions/${sessionId}/products/${productIndex}/adjustments`,
            edit,
        );
    }

    signOff(sessionId: string, productIndex: number): Promise<SignoffResponse> {
        return this.request("POST", `/sessions/${sessionId}/products/${productIndex}/signoff`, {});
    }

    submitSurvey(sessionId: string, scores: number[], comment: string): Promise<SurveyReceipt> {
        return this.request("POST", `/sessions/${sessionId}/survey`, { scores, comment });
    }
}
