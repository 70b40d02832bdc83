from click.testing import CliRunner

from fss.cli import data_cli, metrics_cli, sim_cli
from fss.tables import read_results_csv


def test_full_pipeline_synth_sim_summarize(tmp_path):
    runner = CliRunner()

    result = runner.invoke(
        data_cli, ["synth", "--out", str(tmp_path / "data"), "--days", "150", "--seed", "4"]
    )
    assert result.exit_code == 0, result.output

    (tmp_path / "sim.toml").write_text(
        """
[experiment]
seed = 5

[data]
sales = "data/sales.csv"
calendar = "data/calendar.csv"

[treatments.O]
agents = 3
policies = [{kind = "anchor_adjust", alpha = 0.6}, {kind = "noop"}]

[treatments.T]
agents = 3
policies = [{kind = "extreme", gain = 0.3}]

[treatments.TA]
agents = 3
policies = [{kind = "trend_dampen", factor = 0.4}, {kind = "noop"}]
""",
        encoding="utf-8",
    )
    results_path = tmp_path / "results.csv"
    result = runner.invoke(
        sim_cli, ["run", "--config", str(tmp_path / "sim.toml"), "--out", str(results_path)]
    )
    assert result.exit_code == 0, result.output
    records = read_results_csv(results_path)
    assert len(records) == 27

    tables = tmp_path / "tables"
    result = runner.invoke(
        metrics_cli,
        [
            "summarize",
            "--in",
            str(results_path),
            "--out",
            str(tables),
            "--resample-seed",
            "7",
            "--min-completion-seconds",
            "0",
        ],
    )
    assert result.exit_code == 0, result.output

    adjustment = (tables / "adjustment_volume.csv").read_text(encoding="utf-8").splitlines()
    assert adjustment[0] == "FSS,AV_mean,AV_std,AF"
    assert adjustment[1].startswith("O,")
    assert len(adjustment) == 4

    accuracy = (tables / "relative_mae.csv").read_text(encoding="utf-8").splitlines()
    assert accuracy[0] == "Mode,Mean,Std"
    assert [row.split(",")[0] for row in accuracy[1:]] == ["O", "T", "TA"]

    participants = (tables / "participants.csv").read_text(encoding="utf-8").splitlines()
    assert participants[0] == "Filter,O,T,TA"
    assert participants[1] == "Initial Sample,3,3,3"

    survey = (tables / "survey.csv").read_text(encoding="utf-8").splitlines()
    assert survey[0] == "Category,Treatment,Average,Std"
    categories = {row.split(",")[0] for row in survey[1:]}
    assert categories == {
        "Understanding",
        "Usefulness",
        "Bring in Intuition",
        "Satisfaction",
        "Bonus Motivation",
    }

    per_product = (tables / "per_product.csv").read_text(encoding="utf-8").splitlines()
    assert per_product[0] == "FSS,Product,N,AV_mean,rMAE_mean,Model_vs_SES_rMAE"
    # resampling balanced every product to the same count within each treatment
    counts = {}
    for row in per_product[1:]:
        fss, product, n, *_ = row.split(",")
        counts.setdefault(fss, set()).add(n)
    assert all(len(ns) == 1 for ns in counts.values())


def test_convert_m5_cli(tmp_path):
    (tmp_path / "m5cal.csv").write_text(
        "date,d,event_name_1,event_name_2\n"
        "2011-01-29,d_1,,\n2011-01-30,d_2,SuperBowl,\n2011-01-31,d_3,,\n",
        encoding="utf-8",
    )
    (tmp_path / "m5sales.csv").write_text(
        "id,item_id,d_1,d_2,d_3\nFOODS_1_001_CA_1,FOODS_1_001,3,0,1\n",
        encoding="utf-8",
    )
    runner = CliRunner()
    result = runner.invoke(
        data_cli,
        [
            "convert-m5",
            "--sales",
            str(tmp_path / "m5sales.csv"),
            "--calendar",
            str(tmp_path / "m5cal.csv"),
            "--out-dir",
            str(tmp_path / "out"),
        ],
    )
    assert result.exit_code == 0, result.output
    assert (tmp_path / "out" / "sales.csv").exists()
    assert (tmp_path / "out" / "calendar.csv").exists()
