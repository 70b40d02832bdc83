"""Command-line entry points: data prep, serving, metrics tables, simulation."""

from __future__ import annotations

from pathlib import Path

import click

from .metrics import resample_balanced, summarize_by_treatment
from .tables import (
    read_results_csv,
    write_accuracy_table,
    write_adjustment_table,
    write_participant_table,
    write_product_table,
    write_survey_table,
)

MIN_COMPLETION_SECONDS = 180.0


@click.group(name="fss-data")
def data_cli():
    """Prepare sales and calendar files."""


@data_cli.command("synth")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--products", default=3, show_default=True)
@click.option("--days", default=420, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--start", default="2015-01-01", show_default=True)
def synth_command(out_dir: Path, products: int, days: int, seed: int, start: str):
    """Generate a small synthetic shop so the service runs out of the box."""
    from .synth import synth_dataset

    sales, calendar = synth_dataset(out_dir, products, days, seed, start)
    click.echo(f"wrote {sales} and {calendar}")


@data_cli.command("convert-m5")
@click.option("--sales", type=click.Path(path_type=Path, exists=True), required=True)
@click.option("--calendar", type=click.Path(path_type=Path, exists=True), required=True)
@click.option("--out-dir", type=click.Path(path_type=Path), required=True)
@click.option("--items", default=None, help="Comma-separated id/item_id filter.")
def convert_m5_command(sales: Path, calendar: Path, out_dir: Path, items: str | None):
    """Melt wide M5 files into the long sales.csv / calendar.csv formats."""
    from .data import convert_m5_calendar, convert_m5_sales

    out_dir.mkdir(parents=True, exist_ok=True)
    wanted = [s.strip() for s in items.split(",")] if items else None
    n = convert_m5_sales(sales, calendar, out_dir / "sales.csv", wanted)
    m = convert_m5_calendar(calendar, out_dir / "calendar.csv")
    click.echo(f"wrote {n} sales rows and {m} calendar rows to {out_dir}")


@click.command(name="fss-serve")
@click.option("--config", "config_path", type=click.Path(path_type=Path, exists=True), required=True)
@click.option("--spec", "spec_path", type=click.Path(path_type=Path, exists=True), default=None)
@click.option("--port", type=int, default=None, help="Override the configured port.")
def serve_cli(config_path: Path, spec_path: Path | None, port: int | None):
    """Run the session service."""
    import dataclasses

    import uvicorn

    from .model import load_model_spec
    from .service import create_app, load_service_config

    config = load_service_config(config_path)
    if spec_path is not None:
        config = dataclasses.replace(config, model_spec=load_model_spec(spec_path))
    if port is not None:
        config = dataclasses.replace(config, port=port)
    app = create_app(config)
    uvicorn.run(app, host="0.0.0.0", port=config.port)


@click.group(name="fss-metrics")
def metrics_cli():
    """Metric summaries and paper-shaped tables."""


@metrics_cli.command("summarize")
@click.option("--in", "in_path", type=click.Path(path_type=Path, exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--resample-seed", type=int, default=None)
@click.option("--keep-duplicates", is_flag=True, default=False)
@click.option(
    "--min-completion-seconds",
    type=float,
    default=MIN_COMPLETION_SECONDS,
    show_default=True,
    help="Drop sessions finished faster than this; 0 disables the filter.",
)
def summarize_command(
    in_path: Path,
    out_dir: Path,
    resample_seed: int | None,
    keep_duplicates: bool,
    min_completion_seconds: float,
):
    """Filter, optionally resample, and emit the summary tables."""
    records = read_results_csv(in_path)
    out_dir.mkdir(parents=True, exist_ok=True)

    def participants(rows):
        return {t: len({r.participant for r in rows if r.treatment == t}) for t in treatments}

    treatments = sorted({r.treatment for r in records})
    counts: dict[str, dict[str, int]] = {t: {} for t in treatments}
    stage = records
    for t, n in participants(stage).items():
        counts[t]["Initial Sample"] = n
    if not keep_duplicates:
        stage = [r for r in stage if not r.duplicate]
    for t, n in participants(stage).items():
        counts[t]["Drop Duplicates"] = n
    if min_completion_seconds > 0:
        stage = [
            r
            for r in stage
            if r.completion_seconds is None or r.completion_seconds >= min_completion_seconds
        ]
    for t, n in participants(stage).items():
        counts[t]["Drop Completion Time below 3 min"] = n

    if resample_seed is not None:
        stage = resample_balanced(stage, resample_seed)

    summaries = summarize_by_treatment(stage)
    write_participant_table(counts, out_dir / "participants.csv")
    write_adjustment_table(summaries, out_dir / "adjustment_volume.csv")
    write_accuracy_table(summaries, out_dir / "relative_mae.csv")
    write_survey_table(stage, out_dir / "survey.csv")
    write_product_table(summaries, out_dir / "per_product.csv")
    click.echo(f"wrote 5 tables to {out_dir}")


@click.group(name="fss-sim")
def sim_cli():
    """Simulated-judge harness."""


@sim_cli.command("run")
@click.option("--config", "config_path", type=click.Path(path_type=Path, exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
def sim_run_command(config_path: Path, out_path: Path):
    """Run every configured agent through the service and write results."""
    from .simulate import load_sim_config, run_experiment

    records = run_experiment(load_sim_config(config_path), out_path)
    click.echo(f"wrote {len(records)} rows to {out_path}")
