"""Results CSV schema and the summary-table writers used by the metrics CLI."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ParseError
from .metrics import MetricRecord, TreatmentSummary

RESULTS_HEADER = (
    "participant",
    "treatment",
    "product",
    "av",
    "rmae",
    "mape",
    "mape_excluded_days",
    "model_ses_rmae",
    "bonus",
    "signoff_seconds",
    "completion_seconds",
    "q1",
    "q2",
    "q3",
    "q4",
    "q5",
    "satisfaction",
    "duplicate",
)

SURVEY_CATEGORIES = (
    "Understanding",
    "Usefulness",
    "Bring in Intuition",
    "Satisfaction",
    "Bonus Motivation",
)

TREATMENT_ORDER = ("O", "T", "TA")


def _opt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def results_rows(records: Sequence[MetricRecord]) -> list[list[str]]:
    rows = []
    for r in records:
        survey = list(r.survey) if r.survey is not None else [None] * 5
        rows.append(
            [
                r.participant,
                r.treatment,
                r.product,
                repr(float(r.av)),
                repr(float(r.rmae)),
                _opt(r.mape),
                str(r.mape_excluded_days),
                _opt(r.model_ses_rmae),
                _opt(r.bonus),
                _opt(r.signoff_seconds),
                _opt(r.completion_seconds),
                *(_opt(v) for v in survey),
                _opt(r.satisfaction),
                "1" if r.duplicate else "0",
            ]
        )
    return rows


def render_results_csv(records: Sequence[MetricRecord]) -> str:
    import io

    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(RESULTS_HEADER)
    writer.writerows(results_rows(records))
    return buffer.getvalue()


def write_results_csv(records: Sequence[MetricRecord], path: str | Path) -> None:
    Path(path).write_text(render_results_csv(records), encoding="utf-8", newline="")


def read_results_csv(path: str | Path) -> list[MetricRecord]:
    records: list[MetricRecord] = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != RESULTS_HEADER:
            raise ParseError(f"expected header {','.join(RESULTS_HEADER)}", line=1)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(RESULTS_HEADER):
                raise ParseError(f"expected {len(RESULTS_HEADER)} fields", line=line_no)
            data = dict(zip(RESULTS_HEADER, row))
            survey_cells = [data[f"q{i}"] for i in range(1, 6)]
            survey = (
                tuple(float(v) for v in survey_cells) if all(survey_cells) else None
            )
            records.append(
                MetricRecord(
                    participant=data["participant"],
                    treatment=data["treatment"],
                    product=data["product"],
                    av=float(data["av"]),
                    rmae=float(data["rmae"]),
                    mape=float(data["mape"]) if data["mape"] else None,
                    mape_excluded_days=int(data["mape_excluded_days"] or 0),
                    model_ses_rmae=float(data["model_ses_rmae"]) if data["model_ses_rmae"] else None,
                    bonus=float(data["bonus"]) if data["bonus"] else None,
                    signoff_seconds=float(data["signoff_seconds"]) if data["signoff_seconds"] else None,
                    completion_seconds=(
                        float(data["completion_seconds"]) if data["completion_seconds"] else None
                    ),
                    survey=survey,
                    satisfaction=float(data["satisfaction"]) if data["satisfaction"] else None,
                    duplicate=data["duplicate"] == "1",
                )
            )
    return records


def _fmt2(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


def write_participant_table(
    counts: dict[str, dict[str, int]], path: str | Path
) -> None:
    """Participant counts per treatment after each filtering step."""
    treatments = [t for t in TREATMENT_ORDER if t in counts] + sorted(
        set(counts) - set(TREATMENT_ORDER)
    )
    steps = ("Initial Sample", "Drop Duplicates", "Drop Completion Time below 3 min")
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Filter", *treatments])
        for step in steps:
            writer.writerow([step, *(counts[t][step] for t in treatments)])


def write_adjustment_table(summaries: Sequence[TreatmentSummary], path: str | Path) -> None:
    """Unconditional adjustment volume and frequency per treatment."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["FSS", "AV_mean", "AV_std", "AF"])
        for s in summaries:
            writer.writerow([s.treatment, _fmt2(s.av_mean), _fmt2(s.av_std), _fmt2(s.af)])


def write_accuracy_table(summaries: Sequence[TreatmentSummary], path: str | Path) -> None:
    """Unconditional relative MAE per treatment."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Mode", "Mean", "Std"])
        for s in summaries:
            writer.writerow([s.treatment, _fmt2(s.rmae_mean), _fmt2(s.rmae_std)])


def write_survey_table(records: Sequence[MetricRecord], path: str | Path) -> None:
    """Mean and std of each survey item per treatment (one row per item)."""
    per_participant: dict[tuple[str, str], tuple[float, ...]] = {}
    for r in records:
        if r.survey is not None:
            per_participant[(r.treatment, r.participant)] = r.survey
    treatments = [
        t for t in TREATMENT_ORDER if any(k[0] == t for k in per_participant)
    ] + sorted({k[0] for k in per_participant} - set(TREATMENT_ORDER))
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Category", "Treatment", "Average", "Std"])
        for item, category in enumerate(SURVEY_CATEGORIES):
            for treatment in treatments:
                scores = [
                    v[item] for (t, _), v in per_participant.items() if t == treatment
                ]
                if not scores:
                    continue
                arr = np.asarray(scores, dtype=float)
                std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
                writer.writerow([category, treatment, _fmt2(float(arr.mean())), _fmt2(std)])


def write_product_table(summaries: Sequence[TreatmentSummary], path: str | Path) -> None:
    """Per-product AV and rMAE per treatment, with the model-vs-SES column."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["FSS", "Product", "N", "AV_mean", "rMAE_mean", "Model_vs_SES_rMAE"])
        for s in summaries:
            for p in s.per_product:
                writer.writerow(
                    [
                        s.treatment,
                        p.product,
                        p.n,
                        _fmt2(p.av_mean),
                        _fmt2(p.rmae_mean),
                        _fmt2(p.model_ses_rmae),
                    ]
                )
