/** Post-task survey: five 1-7 slider statements plus an optional comment,
 * then the completion screen with secret key, accuracy, and bonus. */

import { fmt1, money } from "./format.js";
import type { SurveyReceipt } from "./types.js";

export const SURVEY_STATEMENTS: readonly string[] = [
    "I understand how the sales model creates its forecasts.",
    "Such a forecasting app would be useful for product managers.",
    "I could bring my intuition into the forecasts.",
    "I am satisfied with my signed-off forecasts.",
    "My adjustments were mostly motivated by the chance for a bonus.",
];

export const COMMENT_PROMPT = "Did you particularly like or dislike something? (optional)";

export function renderSurvey(
    container: HTMLElement,
    onSubmit: (scores: number[], comment: string) => void,
): void {
    container.textContent = "";
    const form = document.createElement("form");
    form.className = "survey";

    const sliders: HTMLInputElement[] = [];
    SURVEY_STATEMENTS.forEach((statement, index) => {
        const row = document.createElement("label");
        row.className = "survey-item";
        const text = document.createElement("span");
        text.className = "survey-statement";
        text.textContent = statement;
        const slider = document.createElement("input");
        slider.type = "range";
        slider.min = "1";
        slider.max = "7";
        slider.step = "1";
        slider.value = "4";
        slider.name = `item-${index + 1}`;
        sliders.push(slider);
        row.appendChild(text);
        row.appendChild(slider);
        form.appendChild(row);
    });

    const comment = document.createElement("textarea");
    comment.className = "survey-comment";
    comment.placeholder = COMMENT_PROMPT;
    form.appendChild(comment);

    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "Confirm Answers";
    form.appendChild(submit);

    form.onsubmit = (event) => {
        event.preventDefault();
        onSubmit(
            sliders.map((s) => Number(s.value)),
            comment.value,
        );
    };
    container.appendChild(form);
}

export function renderCompletion(container: HTMLElement, receipt: SurveyReceipt): void {
    container.textContent = "";
    const panel = document.createElement("div");
    panel.className = "completion";

    const heading = document.createElement("h2");
    heading.textContent = "All forecasts signed off. Thank you!";
    panel.appendChild(heading);

    const key = document.createElement("p");
    key.className = "secret-key";
    key.textContent = `Your secret key: ${receipt.secret_key}`;
    panel.appendChild(key);

    const list = document.createElement("ul");
    list.className = "accuracy-list";
    for (const product of receipt.per_product) {
        const item = document.createElement("li");
        const accuracy = product.rmae === null ? "n/a" : fmt1(product.rmae * 100) + "% of model error";
        item.textContent = `${product.product_id}: ${accuracy}, bonus ${money(product.bonus)}`;
        list.appendChild(item);
    }
    panel.appendChild(list);

    const total = document.createElement("p");
    total.className = "bonus-total";
    total.textContent = `Earned bonus: ${money(receipt.bonus_total)}`;
    panel.appendChild(total);

    container.appendChild(panel);
}
