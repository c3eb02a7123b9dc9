import numpy as np
import pytest

from intervalreg import (
    Interval,
    IntervalTable,
    MethodSpec,
    ModelFormatError,
    SchemaMismatch,
    VersionMismatch,
    deserialize,
    fit,
    predict,
    serialize,
    swap_violations,
)
from intervalreg.models import FittedModel, IntervalPrediction
from intervalreg.solvers import CoefficientSet, predict_linear
from intervalreg.tables import to_center_range

from conftest import random_interval_table


class TestMethodSpec:
    def test_unknown_family(self):
        with pytest.raises(ValueError):
            MethodSpec("midpoints")

    def test_lambda_without_penalty(self):
        with pytest.raises(ValueError):
            MethodSpec("cm", "none", lambda_center=1.0)

    def test_alpha_only_for_elastic_net(self):
        with pytest.raises(ValueError):
            MethodSpec("cm", "ridge", lambda_center=1.0, alpha=0.5)

    def test_elastic_net_needs_alpha(self):
        with pytest.raises(ValueError):
            MethodSpec("cm", "elastic_net", lambda_center=1.0)

    def test_lambda_range_only_for_crm(self):
        with pytest.raises(ValueError):
            MethodSpec("cm", "ridge", lambda_center=1.0, lambda_range=2.0)

    def test_shared_lambda_default(self):
        spec = MethodSpec("crm", "lasso", lambda_center=3.0)
        assert spec.effective_lambda_range == 3.0
        spec = MethodSpec("crm", "lasso", lambda_center=3.0, lambda_range=0.5)
        assert spec.effective_lambda_range == 0.5

    def test_from_name(self):
        spec = MethodSpec.from_name("net-crm", 2.0, None, 0.4)
        assert (spec.family, spec.penalty, spec.alpha) == ("crm", "elastic_net", 0.4)
        with pytest.raises(ValueError):
            MethodSpec.from_name("pls")
        with pytest.raises(ValueError):
            MethodSpec.from_name("cm", 1.0)


class TestCenterMethod:
    def test_cardio_fitted_values_spot_check(self, cardio):
        model = fit(cardio, MethodSpec("cm"))
        pred = predict(model, cardio)
        assert pred.lower[0] == pytest.approx(59.3, abs=0.1)
        assert pred.upper[0] == pytest.approx(65.9, abs=0.1)
        assert pred.lower[8] == pytest.approx(69.2, abs=0.1)
        assert pred.upper[8] == pytest.approx(102.3, abs=0.1)

    def test_cardio_row2_lower_endpoint(self, cardio):
        model = fit(cardio, MethodSpec("cm"))
        row2 = np.array([[90.0, 70.0]])  # lower endpoints of the second row
        value = predict_linear(model.center_coeffs, row2)[0]
        assert value == pytest.approx(62.7, abs=0.1)

    def test_nonnegative_slopes_imply_ordered_predictions(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            p = int(rng.integers(1, 5))
            coeffs = CoefficientSet(float(rng.normal()), rng.uniform(0.0, 3.0, p))
            model = FittedModel(
                MethodSpec("cm"),
                tuple(f"X{j + 1}" for j in range(p)),
                "Y",
                coeffs,
            )
            table = random_interval_table(rng, 15, p)
            pred = predict(model, table)
            assert pred.ordering_violations == 0
            assert np.all(pred.lower <= pred.upper)


class TestCenterRangeMethod:
    def test_cardio_fitted_values_spot_check(self, cardio):
        model = fit(cardio, MethodSpec("crm"))
        pred = predict(model, cardio)
        assert pred.lower[0] == pytest.approx(49.8, abs=0.1)
        assert pred.upper[0] == pytest.approx(75.5, abs=0.1)
        assert pred.lower[3] == pytest.approx(65.9, abs=0.1)
        assert pred.upper[3] == pytest.approx(91.2, abs=0.1)

    def test_midpoint_consistency(self, cardio):
        model = fit(cardio, MethodSpec("crm"))
        pred = predict(model, cardio)
        view = to_center_range(cardio)
        centers = predict_linear(model.center_coeffs, view.centers_X)
        halfranges = predict_linear(model.range_coeffs, view.halfranges_X)
        assert np.allclose((pred.lower + pred.upper) / 2.0, centers, rtol=1e-12)
        assert np.allclose((pred.upper - pred.lower) / 2.0, halfranges, rtol=1e-12)

    def test_degenerate_table_reduces_to_cm(self):
        rng = np.random.default_rng(32)
        values = rng.uniform(-4, 4, size=(12, 3))
        rows = tuple(
            tuple(Interval(v, v) for v in row) for row in values
        )
        table = IntervalTable(("Y", "X1", "X2"), rows, response_name="Y")
        crm = predict(fit(table, MethodSpec("crm")), table)
        cm = predict(fit(table, MethodSpec("cm")), table)
        assert np.array_equal(crm.lower, crm.upper)
        assert np.array_equal(crm.lower, cm.lower)
        assert np.array_equal(crm.upper, cm.upper)

    def test_unpenalized_needs_enough_rows(self):
        rng = np.random.default_rng(33)
        table = random_interval_table(rng, 3, 2)
        with pytest.raises(ValueError, match="rows"):
            fit(table, MethodSpec("crm"))


class TestShrinkageVariants:
    def test_lambda_zero_collapse(self, cardio):
        for family in ("cm", "crm"):
            base = predict(fit(cardio, MethodSpec(family)), cardio)
            variants = [
                MethodSpec(family, "ridge", lambda_center=0.0),
                MethodSpec(family, "lasso", lambda_center=0.0),
                MethodSpec(family, "elastic_net", lambda_center=0.0, alpha=0.5),
            ]
            for spec in variants:
                pred = predict(fit(cardio, spec), cardio)
                assert np.max(np.abs(pred.lower - base.lower)) <= 1e-6
                assert np.max(np.abs(pred.upper - base.upper)) <= 1e-6

    def test_support_nesting(self):
        rng = np.random.default_rng(34)
        for _ in range(10):
            n = int(rng.integers(10, 40))
            p = int(rng.integers(2, 8))
            table = random_interval_table(rng, n, p)
            for penalty, alpha in (("lasso", None), ("elastic_net", 0.6)):
                lam = float(rng.uniform(0.5, 30.0))
                spec = MethodSpec("crm", penalty, lambda_center=lam, alpha=alpha)
                model = fit(table, spec)
                center_support = model.center_coeffs.support()
                range_nonzero = model.range_coeffs.betas != 0.0
                assert np.all(center_support | ~range_nonzero)

    def test_empty_support_flag(self):
        rng = np.random.default_rng(35)
        table = random_interval_table(rng, 20, 3)
        spec = MethodSpec("crm", "lasso", lambda_center=1e9)
        model = fit(table, spec)
        assert model.empty_support
        assert np.all(model.center_coeffs.betas == 0.0)
        assert np.all(model.range_coeffs.betas == 0.0)
        view = to_center_range(table)
        assert model.range_coeffs.intercept == pytest.approx(view.halfranges_y.mean())
        pred = predict(model, table)
        mid = predict_linear(model.center_coeffs, view.centers_X)
        assert np.allclose(pred.lower, mid - view.halfranges_y.mean())

    def test_ridge_crm_uses_all_columns(self):
        rng = np.random.default_rng(36)
        table = random_interval_table(rng, 25, 4)
        model = fit(table, MethodSpec("crm", "ridge", lambda_center=5.0))
        assert np.all(model.range_coeffs.betas != 0.0)

    def test_determinism(self, cardio):
        spec = MethodSpec("crm", "elastic_net", lambda_center=2.0, alpha=0.7)
        assert serialize(fit(cardio, spec)) == serialize(fit(cardio, spec))

    def test_standardize_off_matches_raw_scale_ridge(self, cardio):
        from intervalreg.solvers import DesignProblem, fit_ridge

        model = fit(cardio, MethodSpec("cm", "ridge", lambda_center=3.0),
                    standardize=False)
        view = to_center_range(cardio)
        direct = fit_ridge(DesignProblem(view.centers_X, view.centers_y), 3.0,
                           standardize=False)
        assert model.center_coeffs.intercept == pytest.approx(direct.intercept)
        assert np.allclose(model.center_coeffs.betas, direct.betas)

    def test_warm_start_reaches_same_solution(self, cardio):
        big = fit(cardio, MethodSpec("cm", "lasso", lambda_center=50.0))
        spec = MethodSpec("cm", "lasso", lambda_center=5.0)
        warm = fit(cardio, spec, warm_start=big)
        cold = fit(cardio, spec)
        assert np.max(np.abs(warm.center_coeffs.betas - cold.center_coeffs.betas)) <= 1e-6


class TestPredictValidation:
    def test_missing_column_named(self, cardio):
        model = fit(cardio, MethodSpec("cm"))
        smaller = IntervalTable(
            ("Systolic",),
            tuple((row[1],) for row in cardio.rows),
        )
        with pytest.raises(SchemaMismatch, match="Diastolic"):
            predict(model, smaller)

    def test_unexpected_column_rejected(self, cardio):
        model = fit(cardio, MethodSpec("cm"))
        extra = IntervalTable(
            ("Systolic", "Diastolic", "Weight"),
            tuple((row[1], row[2], Interval(0, 1)) for row in cardio.rows),
        )
        with pytest.raises(SchemaMismatch, match="Weight"):
            predict(model, extra)

    def test_response_column_is_ignored(self, cardio):
        model = fit(cardio, MethodSpec("cm"))
        pred_with = predict(model, cardio)
        no_response = IntervalTable(
            ("Systolic", "Diastolic"),
            tuple((row[1], row[2]) for row in cardio.rows),
        )
        pred_without = predict(model, no_response)
        assert np.array_equal(pred_with.lower, pred_without.lower)

    def test_predictor_order_is_model_order(self, cardio):
        model = fit(cardio, MethodSpec("cm"))
        swapped = IntervalTable(
            ("Diastolic", "Systolic"),
            tuple((row[2], row[1]) for row in cardio.rows),
        )
        pred = predict(model, swapped)
        assert np.array_equal(pred.lower, predict(model, cardio).lower)


class TestClamp:
    def test_swap_violations(self):
        pred = IntervalPrediction.from_bounds(
            np.array([1.0, 5.0, 2.0]), np.array([2.0, 3.0, 2.0])
        )
        assert pred.ordering_violations == 1
        fixed = swap_violations(pred)
        assert fixed.ordering_violations == 0
        assert np.array_equal(fixed.lower, [1.0, 3.0, 2.0])
        assert np.array_equal(fixed.upper, [2.0, 5.0, 2.0])


class TestSerialization:
    def test_round_trip_identity(self, cardio):
        rng = np.random.default_rng(37)
        specs = [
            MethodSpec("cm"),
            MethodSpec("crm"),
            MethodSpec("cm", "ridge", lambda_center=1.25),
            MethodSpec("crm", "lasso", lambda_center=0.875906),
            MethodSpec("crm", "elastic_net", lambda_center=2.0,
                       lambda_range=1.0, alpha=0.9),
        ]
        for spec in specs:
            model = fit(cardio, spec)
            text = serialize(model)
            back = deserialize(text)
            assert serialize(back) == text
            assert back.spec == model.spec
            assert back.center_coeffs.intercept == model.center_coeffs.intercept
            assert np.array_equal(back.center_coeffs.betas, model.center_coeffs.betas)
            if model.range_coeffs is not None:
                assert np.array_equal(back.range_coeffs.betas, model.range_coeffs.betas)
                if model.range_coeffs.scales is not None:
                    assert np.array_equal(
                        back.range_coeffs.scales, model.range_coeffs.scales
                    )
            table = random_interval_table(rng, 5, 2)
            renamed = IntervalTable(
                ("Systolic", "Diastolic"),
                tuple(row[:2] for row in table.rows),
            )
            assert np.array_equal(
                predict(back, renamed).lower, predict(model, renamed).lower
            )

    def test_version_mismatch(self):
        with pytest.raises(VersionMismatch):
            deserialize("intervalreg-model/999\nmethod: cm\n")

    def test_malformed_field(self, cardio):
        text = serialize(fit(cardio, MethodSpec("cm")))
        broken = text.replace("center.intercept: ", "center.intercept: not-a-number ")
        with pytest.raises(ModelFormatError):
            deserialize(broken)

    def test_missing_field(self, cardio):
        text = serialize(fit(cardio, MethodSpec("cm")))
        broken = "\n".join(
            ln for ln in text.splitlines() if not ln.startswith("center.betas")
        )
        with pytest.raises(ModelFormatError):
            deserialize(broken)

    def test_hand_built_minimal_model(self):
        text = "\n".join([
            "intervalreg-model/1",
            "method: cm",
            "alpha: -",
            "lambda_center: 0",
            "lambda_range: -",
            "response: Y",
            "predictors: X",
            "empty_support: false",
            "center.intercept: 1",
            "center.betas: 2",
            "center.means: -",
            "center.scales: -",
            "center.converged: true",
            "center.n_sweeps: 0",
        ])
        model = deserialize(text)
        table = IntervalTable(("X",), ((Interval(3.0, 5.0),),))
        pred = predict(model, table)
        assert pred.lower[0] == 1 + 2 * 3.0
        assert pred.upper[0] == 1 + 2 * 5.0
