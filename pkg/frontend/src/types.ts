/** Wire types for the session service; field names mirror api_schema.json. */

export type Treatment = "O" | "T" | "TA";

export interface SessionInfo {
    session_id: string;
    worker_id: string;
    treatment: Treatment;
    products: string[];
    active_product: number | null;
    duplicate: boolean;
    resumed: boolean;
}

export interface SeriesBlock {
    dates: string[];
    sales?: number[];
    total?: number[];
}

export interface Decomposition {
    dates: string[];
    level: number[];
    weekly: number[];
    yearly: number[];
    events: number[];
    total: number[];
}

export interface ResidualPoint {
    weekday?: number;
    phase?: number;
    date: string;
    value: number;
}

export interface ViewPayload {
    session_id: string;
    treatment: Treatment;
    product_index: number;
    product_count: number;
    product_id: string;
    function_label: "Explain Values" | "View Details";
    signoff_min_seconds: number;
    horizon_days: number;
    history: { dates: string[]; sales: number[] };
    fit: { dates: string[]; total: number[] };
    forecast: { dates: string[]; total: number[] };
    pinned_dates: string[];
    editable: Partial<Record<"level" | "weekly" | "yearly" | "values", boolean>>;
    decomposition?: Decomposition;
    weekly_pattern?: number[];
    yearly_curve?: { phase: number[]; value: number[] };
    event_effects?: Record<string, number>;
    events_by_date?: Record<string, string[]>;
    residuals?: { max_weeks: number; weekly: ResidualPoint[]; yearly: ResidualPoint[] };
}

export type AdjustmentRequest =
    | { level: Array<[string, number]> }
    | { weekly: number[] }
    | { yearly: Array<[number, number]> }
    | { values: Record<string, number> }
    | { reset: "level" | "weekly" | "yearly" | "values" | "all" };

export interface AdjustmentResponse {
    forecast: { dates: string[]; total: number[] };
    pinned_dates: string[];
    state: Record<string, unknown>;
}

export interface SignoffResponse {
    status: "next_product" | "survey";
    active_product?: number;
}

export interface ProductResult {
    product_id: string;
    rmae: number | null;
    bonus: number;
}

export interface SurveyReceipt {
    secret_key: string;
    satisfaction: number;
    per_product: ProductResult[];
    bonus_total: number;
}
