/** Display formatting: one-decimal effect values, weekday names, money. */

const WEEKDAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"];

/** Round to one decimal and drop a trailing ".0" (72.0 renders as "72"). */
export function fmt1(value: number): string {
    const rounded = Math.round(value * 10) / 10;
    return String(Object.is(rounded, -0) ? 0 : rounded);
}

/** One-decimal value with an explicit sign, as the effect titles show it. */
export function fmtSigned(value: number): string {
    const text = fmt1(value);
    return text.startsWith("-") || text === "0" ? text : `+${text}`;
}

export function weekdayName(dateIso: string): string {
    const day = new Date(dateIso + "T00:00:00Z").getUTCDay();
    return WEEKDAYS[(day + 6) % 7];
}

export function money(value: number): string {
    return `$${value.toFixed(2)}`;
}
