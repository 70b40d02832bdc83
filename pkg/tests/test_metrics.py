import numpy as np
import pytest

from fss.errors import UndefinedMetricError, ValidationError
from fss.metrics import (
    AV_EPSILON,
    ForecastTriple,
    MetricRecord,
    adjustment_frequency,
    adjustment_volume,
    bonus,
    cap_session_total,
    mape,
    resample_balanced,
    rmae,
    satisfaction_scale,
    session_bonus,
    summarize_by_treatment,
    summarize_treatment,
)

from helpers import oracle_metrics

WORKED = ForecastTriple(model=[10, 10], final=[12, 9], truth=[14, 14])


def record(participant="p1", treatment="O", product="A", av=0.2, rmae_value=1.0, **kwargs):
    return MetricRecord(
        participant=participant, treatment=treatment, product=product, av=av, rmae=rmae_value, **kwargs
    )


class TestAdjustmentVolume:
    def test_no_adjustment_is_zero(self):
        triple = ForecastTriple([10, 10], [10, 10], [14, 14])
        assert adjustment_volume(triple) == 0.0

    def test_adjusting_to_truth_is_one(self):
        triple = ForecastTriple([10, 10], [14, 14], [14, 14])
        assert adjustment_volume(triple) == 1.0

    def test_worked_example(self):
        assert adjustment_volume(WORKED) == 0.375

    def test_model_equal_truth_is_undefined(self):
        with pytest.raises(UndefinedMetricError):
            adjustment_volume(ForecastTriple([5, 5], [6, 6], [5, 5]))


class TestAdjustmentFrequency:
    def test_all_zero(self):
        assert adjustment_frequency([0, 0, 0]) == 0.0

    def test_two_of_three(self):
        assert adjustment_frequency([0.2, 0, 0.5]) == pytest.approx(2 / 3)

    def test_all_positive(self):
        assert adjustment_frequency([0.1, 0.9, 2.0]) == 1.0

    def test_numerical_dust_does_not_count(self):
        assert adjustment_frequency([AV_EPSILON / 2, 0.0]) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            adjustment_frequency([])


class TestRmae:
    def test_final_equal_model_is_exactly_one(self):
        triple = ForecastTriple([3, 7, 9], [3, 7, 9], [4, 4, 4])
        assert rmae(triple) == 1.0

    def test_halved_error(self):
        triple = ForecastTriple(model=[0, 0], final=[2, 2], truth=[4, 4])
        assert rmae(triple) == 0.5

    def test_worked_example(self):
        assert rmae(WORKED) == 0.875

    def test_undefined_when_model_is_perfect(self):
        with pytest.raises(UndefinedMetricError):
            rmae(ForecastTriple([5], [6], [5]))

    def test_zero_volume_implies_unit_rmae(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            model = rng.uniform(1, 100, 14)
            truth = rng.uniform(1, 100, 14)
            triple = ForecastTriple(model, model.copy(), truth)
            assert adjustment_volume(triple) == 0.0
            assert rmae(triple) == 1.0


class TestMape:
    def test_perfect_forecast(self):
        assert mape([10, 20], [10, 20]) == 0.0

    def test_worked_example(self):
        assert mape([10, 20], [9, 22]) == 0.1

    def test_zero_actuals_excluded_and_counted(self):
        value = mape([0, 10], [5, 10])
        assert value == 0.0
        assert value.excluded_zero_days == 1

    def test_all_zero_actuals_undefined(self):
        with pytest.raises(UndefinedMetricError):
            mape([0, 0], [1, 2])


class TestScaleInvariance:
    @pytest.mark.parametrize("scale", [0.5, 3.0, 1000.0])
    def test_av_rmae_mape_unchanged_by_scaling(self, scale):
        rng = np.random.default_rng(0)
        model = rng.uniform(10, 100, 14)
        final = rng.uniform(10, 100, 14)
        truth = rng.uniform(10, 100, 14)
        a = ForecastTriple(model, final, truth)
        b = ForecastTriple(model * scale, final * scale, truth * scale)
        assert adjustment_volume(a) == pytest.approx(adjustment_volume(b), rel=1e-12)
        assert rmae(a) == pytest.approx(rmae(b), rel=1e-12)
        assert mape(truth, final) == pytest.approx(mape(truth * scale, final * scale), rel=1e-12)


class TestAgainstFormulaOracle:
    def test_random_triples_match_plain_arithmetic(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            t = int(rng.integers(1, 20))
            model = rng.uniform(1, 100, t)
            final = rng.uniform(1, 100, t)
            truth = rng.uniform(1, 100, t)
            triple = ForecastTriple(model, final, truth)
            av_o, rmae_o, mape_o = oracle_metrics(list(model), list(final), list(truth))
            assert abs(adjustment_volume(triple) - av_o) <= 1e-12 * max(1, abs(av_o))
            assert abs(rmae(triple) - rmae_o) <= 1e-12 * max(1, abs(rmae_o))
            assert abs(mape(truth, final) - mape_o) <= 1e-12 * max(1, abs(mape_o))


class TestBonus:
    def test_three_point_improvement(self):
        assert bonus(0.97) == 0.60

    def test_cap_at_one_dollar(self):
        assert bonus(0.90) == 1.00

    def test_no_improvement_no_bonus(self):
        assert bonus(1.05) == 0.00

    def test_monotone_and_bounded(self):
        values = [bonus(r) for r in np.arange(0.5, 1.5, 0.01)]
        assert all(b1 >= b2 for b1, b2 in zip(values, values[1:]))
        assert all(0.0 <= b <= 1.0 for b in values)

    def test_rounded_half_up_to_cents(self):
        assert bonus(0.9975) == 0.05  # 0.25 points -> 0.050 exactly
        assert bonus(0.99875) == 0.03  # 0.125 points -> 0.025 rounds up

    def test_requires_positive_rmae(self):
        with pytest.raises(ValidationError):
            bonus(0.0)

    def test_session_cap(self):
        per_product, total = session_bonus([0.5, 0.5, 0.5])
        assert per_product == [1.0, 1.0, 1.0]
        assert total == 3.00
        assert cap_session_total([1.0, 1.0, 1.0, 1.0]) == 3.00
        _, modest = session_bonus([0.97, 0.97, 0.97])
        assert modest == 1.80


class TestSatisfaction:
    def test_treatment_mean_example(self):
        assert satisfaction_scale((4.44, 5.64, 5.21, 5.24, 4.81)) == pytest.approx(5.13, abs=0.005)

    def test_all_sevens(self):
        assert satisfaction_scale((7, 7, 7, 7, 7)) == 7.0

    def test_fifth_item_excluded(self):
        assert satisfaction_scale((1, 1, 1, 1, 7)) == 1.0

    def test_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            satisfaction_scale((1, 2, 3, 8, 4))

    def test_needs_five_items(self):
        with pytest.raises(ValidationError):
            satisfaction_scale((1, 2, 3, 4))


class TestResampleBalanced:
    def make_records(self, counts: dict[str, dict[str, int]]):
        records = []
        for treatment, per_product in counts.items():
            for product, n in per_product.items():
                for i in range(n):
                    records.append(
                        record(
                            participant=f"{treatment}-{product}-{i}",
                            treatment=treatment,
                            product=product,
                            av=float(i),
                            rmae_value=1.0 + i,
                        )
                    )
        return records

    def test_ceil_mean_target(self):
        records = self.make_records({"O": {"A": 5, "B": 10}})
        resampled = resample_balanced(records, seed=3)
        counts = {}
        for r in resampled:
            counts[r.product] = counts.get(r.product, 0) + 1
        assert counts == {"A": 8, "B": 8}

    def test_balanced_input_keeps_counts(self):
        records = self.make_records({"O": {"A": 4, "B": 4}, "T": {"A": 4, "B": 4}})
        resampled = resample_balanced(records, seed=1)
        per_group = {}
        for r in resampled:
            key = (r.treatment, r.product)
            per_group[key] = per_group.get(key, 0) + 1
        assert set(per_group.values()) == {4}

    def test_deterministic_under_seed(self):
        records = self.make_records({"O": {"A": 3, "B": 7}, "TA": {"A": 6, "B": 2}})
        assert resample_balanced(records, seed=9) == resample_balanced(records, seed=9)

    def test_records_reused_verbatim(self):
        records = self.make_records({"O": {"A": 2, "B": 5}})
        originals = set(map(id, records))
        for r in resample_balanced(records, seed=2):
            assert id(r) in originals

    def test_missing_product_named_in_error(self):
        records = self.make_records({"O": {"A": 2, "B": 2}, "T": {"A": 2}})
        with pytest.raises(ValidationError, match="T.*B"):
            resample_balanced(records, seed=0)


class TestSummaries:
    def test_single_record_reports_zero_std_with_flag(self):
        summary = summarize_treatment([record(av=0.38, rmae_value=1.1)])
        assert summary.av_mean == 0.38
        assert summary.av_std == 0.0
        assert summary.degenerate_std is True

    def test_noop_judges(self):
        records = [record(participant=f"p{i}", av=0.0, rmae_value=1.0) for i in range(6)]
        summary = summarize_treatment(records)
        assert summary.af == 0.0
        assert summary.rmae_mean == 1.0
        assert summary.av_mean_adjusted is None

    def test_af_counts_positive_volumes(self):
        records = [
            record(participant="a", av=0.5, rmae_value=1.2),
            record(participant="b", av=0.0, rmae_value=1.0),
        ]
        summary = summarize_treatment(records)
        assert summary.af == 0.5
        assert summary.n == 2
        assert summary.av_mean_adjusted == 0.5

    def test_mixed_treatments_rejected(self):
        with pytest.raises(ValidationError):
            summarize_treatment([record(treatment="O"), record(treatment="T")])

    def test_per_product_breakdown_carries_ses_column(self):
        records = [
            record(participant="a", product="A", av=0.2, rmae_value=1.1, model_ses_rmae=0.8),
            record(participant="b", product="A", av=0.4, rmae_value=0.9, model_ses_rmae=0.8),
            record(participant="a", product="B", av=0.0, rmae_value=1.0, model_ses_rmae=1.3),
        ]
        summary = summarize_treatment(records)
        by_product = {p.product: p for p in summary.per_product}
        assert by_product["A"].n == 2
        assert by_product["A"].av_mean == pytest.approx(0.3)
        assert by_product["A"].model_ses_rmae == 0.8
        assert by_product["B"].model_ses_rmae == 1.3

    def test_summaries_ordered_o_t_ta(self):
        records = [
            record(treatment="TA"),
            record(treatment="O"),
            record(treatment="T"),
        ]
        assert [s.treatment for s in summarize_by_treatment(records)] == ["O", "T", "TA"]
