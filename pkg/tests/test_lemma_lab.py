import numpy as np
import pytest

from nsgalab.core import RandomSource
from nsgalab.lemma_lab import (
    ScenarioBuilder,
    ScenarioConstructionError,
    ScenarioSpec,
    build_full_front_rt,
    build_unique_association_rt,
    check_lemma_properties,
    estimate_extremal_loss,
    estimate_full_front_degradation,
    loss_targets,
    validate_lemma,
)
from nsgalab.metrics import mei, mei_opt


class TestScenarioSpec:
    def test_unique_association_size_constraint(self):
        with pytest.raises(ValueError):
            ScenarioSpec(n=9, N=6, builder=ScenarioBuilder.UNIQUE_ASSOCIATION)

    def test_full_front_constraints(self):
        with pytest.raises(ValueError):
            ScenarioSpec(n=10, N=5, builder=ScenarioBuilder.FULL_FRONT)
        with pytest.raises(ValueError):
            ScenarioSpec(n=9, N=4, builder=ScenarioBuilder.FULL_FRONT)
        with pytest.raises(ValueError):
            ScenarioSpec(n=9, N=5, N_r=12, builder=ScenarioBuilder.FULL_FRONT)


class TestUniqueAssociationBuilder:
    def test_construction_and_injectivity(self):
        spec = ScenarioSpec(n=9, N=5, builder=ScenarioBuilder.UNIQUE_ASSOCIATION)
        pop, refs, assoc = build_unique_association_rt(spec, RandomSource(0))
        assert pop.size == 10
        f1 = sorted(pop.f1.tolist())
        assert f1[0] == 0 and f1[-1] == 9
        assert len(set(f1)) == 10
        assert np.unique(assoc.assignments).size == 10
        assert refs.size >= 20

    def test_pigeonhole_raises(self):
        spec = ScenarioSpec(n=9, N=5, N_r=2, builder=ScenarioBuilder.UNIQUE_ASSOCIATION)
        with pytest.raises(ScenarioConstructionError):
            build_unique_association_rt(spec, RandomSource(0))


class TestExtremalLoss:
    def test_estimates_near_targets(self):
        spec = ScenarioSpec(n=9, N=5, builder=ScenarioBuilder.UNIQUE_ASSOCIATION)
        est = estimate_extremal_loss(spec, trials=4000, rng=RandomSource(1))
        t_spec, t_any, t_both = est.targets
        assert est.p_specific == pytest.approx(t_spec, abs=0.05)
        assert est.p_at_least_one == pytest.approx(t_any, abs=0.05)
        assert est.p_both == pytest.approx(t_both, abs=0.05)

    def test_inclusion_exclusion_consistency(self):
        spec = ScenarioSpec(n=13, N=7, builder=ScenarioBuilder.UNIQUE_ASSOCIATION)
        est = estimate_extremal_loss(spec, trials=4000, rng=RandomSource(2))
        assert est.p_at_least_one == pytest.approx(
            2 * est.p_specific - est.p_both, abs=0.05
        )

    def test_targets_formula(self):
        assert loss_targets(5) == pytest.approx((0.5, 0.75 + 1 / 36, 0.25 - 1 / 36))


class TestFullFront:
    def test_builder(self):
        spec = ScenarioSpec(n=9, N=5, builder=ScenarioBuilder.FULL_FRONT)
        pop = build_full_front_rt(spec)
        assert pop.size == 10
        assert sorted(pop.f1.tolist()) == list(range(10))
        assert mei(pop.f1, 9) == 1

    def test_builder_rejects_wrong_spec(self):
        spec = ScenarioSpec(n=9, N=5, builder=ScenarioBuilder.UNIQUE_ASSOCIATION)
        with pytest.raises(ValueError):
            build_full_front_rt(spec)

    def test_degradation_estimate(self):
        spec = ScenarioSpec(n=51, N=26, builder=ScenarioBuilder.FULL_FRONT)
        est = estimate_full_front_degradation(spec, trials=400, rng=RandomSource(3))
        assert est.N_r == 52
        assert est.mean_mei > mei_opt(26, 51)
        assert est.stderr < 1.0

    def test_degradation_grows_with_n(self):
        means = []
        for n in (51, 101):
            spec = ScenarioSpec(n=n, N=(n + 1) // 2, builder=ScenarioBuilder.FULL_FRONT)
            means.append(
                estimate_full_front_degradation(spec, trials=500, rng=RandomSource(4)).mean_mei
            )
        assert means[1] > means[0]


class TestLemmaChecks:
    @pytest.mark.parametrize("lemma", [2, 4, 5, 6, 8])
    def test_no_violations_at_unit_scale(self, lemma):
        report = check_lemma_properties(lemma, 300, RandomSource(lemma))
        assert report.trials == 300
        assert report.violations == 0, report.failures

    def test_unknown_lemma_rejected(self):
        with pytest.raises(ValueError):
            check_lemma_properties(7, 10, RandomSource(0))
        with pytest.raises(ValueError):
            validate_lemma(3, 10)

    def test_validate_lemma_report_shape(self):
        report = validate_lemma(4, trials=100, seed=5)
        assert report["lemma"] == 4
        assert report["passed"] is True
        assert report["violations"] == 0
        assert "max_abs_error" in report["details"]

    def test_validate_lemma9_report(self):
        report = validate_lemma(9, trials=3000, seed=6)
        assert report["details"]["targets"] == pytest.approx(
            [0.5, 0.75 + 1 / 36, 0.25 - 1 / 36]
        )
        assert len(report["details"]["estimates"]) == 3
