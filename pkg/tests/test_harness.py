import json
from pathlib import Path

import numpy as np
import pytest

from nsgalab.benchmarks import BenchmarkId
from nsgalab.harness import (
    Algorithm,
    ExperimentConfig,
    QuartileSummary,
    RunRecord,
    aggregate_quartiles,
    derive_seeds,
    detect_t_start,
    detect_t_start_lotz,
    experiment_matrix,
    read_run_csv,
    resolve_t_max,
    run_single,
    write_run_csv,
)


def synthetic_record(mei, c0, c1, active=None, seed=1, label="x"):
    g = np.arange(len(mei))
    return RunRecord(
        label=label,
        seed=seed,
        generations=g,
        mei=np.asarray(mei, dtype=np.int64),
        covers_0n=np.asarray(c0, dtype=bool),
        covers_1n=np.asarray(c1, dtype=bool),
        active_refpoints=np.asarray(active if active is not None else np.zeros_like(g)),
        evaluations=(g + 1) * 10,
    )


def small_config(**kw):
    defaults = dict(
        benchmark=BenchmarkId("oneminmax", 20),
        N=6,
        N_r=6,
        algorithm=Algorithm.NSGA3,
        seeds=(1,),
        windows=((1, 10),),
        max_generations=5000,
    )
    defaults.update(kw)
    return ExperimentConfig(**defaults)


class TestDetectors:
    def test_t_start_immediate(self):
        rec = synthetic_record([5, 5], [1, 1], [1, 1])
        assert detect_t_start(rec) == 0

    def test_t_start_never(self):
        rec = synthetic_record([5, 5], [1, 0], [0, 1])
        assert detect_t_start(rec) is None

    def test_t_start_first_hit(self):
        c = [0] * 37 + [1, 1, 1]
        rec = synthetic_record([9] * 40, c, c)
        assert detect_t_start(rec) == 37

    def test_lotz_rule_needs_mei_target(self):
        c = [1] * 6
        rec = synthetic_record([12, 9, 8, 9, 8, 8], c, c)
        assert detect_t_start_lotz(rec, 120, 16) == 2  # target ceil(120/15) = 8
        assert detect_t_start_lotz(rec, 120, 4) is None  # target 40 never hit
        rec2 = synthetic_record([40, 40], [0, 1], [1, 1])
        assert detect_t_start_lotz(rec2, 120, 4) == 1

    def test_lost_extremals_flag(self):
        rec = synthetic_record([5] * 4, [0, 1, 0, 1], [1, 1, 1, 1])
        assert rec.coverage_t_start == 1
        assert rec.lost_extremals
        rec2 = synthetic_record([5] * 3, [0, 1, 1], [0, 1, 1])
        assert not rec2.lost_extremals


class TestResolveTmax:
    def test_maximum(self):
        assert resolve_t_max([12, 30, 25]) == 30

    def test_single_value(self):
        assert resolve_t_max([7]) == 7

    def test_errors(self):
        with pytest.raises(ValueError):
            resolve_t_max([])
        with pytest.raises(ValueError):
            resolve_t_max([3, None])


class TestQuartiles:
    def test_constant_sample(self):
        rec = synthetic_record([9] * 21, [1] * 21, [1] * 21)
        rec.resolved_t_start = 0
        assert aggregate_quartiles([rec], (1, 20)) == QuartileSummary(9, 9, 9)

    def test_linear_interpolation_fraction(self):
        rec = synthetic_record([33, 33, 33, 33, 34], [1] * 5, [1] * 5)
        rec.resolved_t_start = 0
        q = aggregate_quartiles([rec], (1, 4))
        assert q.q3 == pytest.approx(33.25)

    def test_requires_resolved_start(self):
        rec = synthetic_record([9] * 5, [1] * 5, [1] * 5)
        with pytest.raises(ValueError):
            aggregate_quartiles([rec], (1, 4))

    def test_empty_window_rejected(self):
        rec = synthetic_record([9] * 5, [1] * 5, [1] * 5)
        rec.resolved_t_start = 0
        with pytest.raises(ValueError):
            aggregate_quartiles([rec], (10, 20))


class TestCsv:
    def test_round_trip(self, tmp_path):
        cfg = small_config()
        rec = run_single(cfg, 1)
        path = tmp_path / "r.csv"
        write_run_csv(rec, path)
        back = read_run_csv(path)
        assert back.label == rec.label and back.seed == rec.seed
        np.testing.assert_array_equal(back.mei, rec.mei)
        np.testing.assert_array_equal(back.generations, rec.generations)
        np.testing.assert_array_equal(back.covers_0n, rec.covers_0n)
        np.testing.assert_array_equal(back.evaluations, rec.evaluations)

    def test_lf_line_endings_and_header(self, tmp_path):
        rec = synthetic_record([5, 4], [1, 1], [0, 1])
        path = tmp_path / "r.csv"
        write_run_csv(rec, path)
        raw = path.read_bytes()
        assert b"\r" not in raw
        first = raw.split(b"\n", 1)[0].decode()
        assert first == "run_id,seed,generation,mei,covers_0n,covers_1n,active_refpoints,evaluations"

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_run_csv(path)


class TestRunSingle:
    def test_determinism_byte_identical(self, tmp_path):
        cfg = small_config()
        a = run_single(cfg, 42)
        b = run_single(cfg, 42)
        pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
        write_run_csv(a, pa)
        write_run_csv(b, pb)
        assert pa.read_bytes() == pb.read_bytes()

    def test_evaluation_accounting(self):
        rec = run_single(small_config(), 3)
        diffs = np.diff(rec.evaluations)
        assert np.all(diffs == 6)
        assert rec.evaluations[0] == 6

    def test_steady_state_counts_single_evaluations(self):
        cfg = small_config(algorithm=Algorithm.NSGA2_STEADY, max_generations=300)
        rec = run_single(cfg, 3)
        assert np.all(np.diff(rec.evaluations) == 1)

    def test_fixed_horizon(self):
        rec = run_single(small_config(), 4, fixed_horizon=25)
        assert rec.generations[-1] == 25

    def test_stops_after_window_horizon(self):
        rec = run_single(small_config(), 5)
        assert rec.t_start is not None
        assert rec.generations[-1] == rec.t_start + 10

    def test_config_validation(self):
        with pytest.raises(ValueError):
            small_config(N=1)
        with pytest.raises(ValueError):
            small_config(N=21)  # approximation regime requires N < n+1
        with pytest.raises(ValueError):
            small_config(seeds=(1, 1))
        with pytest.raises(ValueError):
            small_config(t_start_rule="bogus")
        with pytest.raises(ValueError):
            small_config(windows=((0, 5),))


class TestSeeds:
    def test_derive_seeds_deterministic_and_distinct(self):
        a = derive_seeds(7, 20)
        b = derive_seeds(7, 20)
        assert a == b
        assert len(set(a)) == 20
        assert derive_seeds(8, 20) != a


@pytest.fixture(scope="module")
def mini(tmp_path_factory):
    out = tmp_path_factory.mktemp("mini")
    summary = experiment_matrix(
        "custom",
        out,
        benchmark_tag="oneminmax",
        n=30,
        pop_sizes=(8,),
        ref_point_settings=(4, 8, 16),
        runs=3,
        master_seed=11,
        windows=((1, 20),),
        jobs=1,
    )
    return summary, out


class TestExperimentMatrix:
    def test_summary_structure(self, mini):
        summary, out = mini
        group = summary["groups"][0]
        labels = [c["label"] for c in group["configs"]]
        assert labels == [
            "nsga3-oneminmax-n30-N8-Nr4",
            "nsga3-oneminmax-n30-N8-Nr8",
            "nsga3-oneminmax-n30-N8-Nr16",
        ]
        assert group["t_max"] == max(
            t for c in group["configs"][:2] for t in c["t_start"]
        )
        assert (out / "summary.json").exists()
        assert (out / "config.json").exists()

    def test_optimal_setting_reaches_optimal_mei(self, mini):
        summary, _ = mini
        nr8 = summary["groups"][0]["configs"][1]
        assert nr8["quartiles"]["1..20"] == [5.0, 5.0, 5.0]  # ceil(30/7) = 5

    def test_unattainable_config_uses_t_max(self, mini):
        summary, _ = mini
        group = summary["groups"][0]
        nr16 = group["configs"][2]
        for run in nr16["runs"]:
            if run["t_start"] is None or run["lost_extremals"]:
                assert run["resolved_t_start"] == group["t_max"]

    def test_csvs_reaggregate_to_summary(self, mini):
        summary, out = mini
        group = summary["groups"][0]
        for cfg in group["configs"]:
            records = []
            for run in cfg["runs"]:
                rec = read_run_csv(out / run["csv"])
                rec.resolved_t_start = run["resolved_t_start"]
                records.append(rec)
            q = aggregate_quartiles(records, (1, 20))
            assert list(q.as_tuple()) == cfg["quartiles"]["1..20"]

    def test_jobs_do_not_change_results(self, tmp_path):
        kw = dict(
            benchmark_tag="oneminmax", n=30, pop_sizes=(8,),
            ref_point_settings=(4, 8), runs=2, master_seed=12, windows=((1, 10),),
        )
        s1 = experiment_matrix("custom", tmp_path / "a", jobs=1, **kw)
        s2 = experiment_matrix("custom", tmp_path / "b", jobs=2, **kw)
        assert json.dumps(s1["groups"]) == json.dumps(s2["groups"])

    def test_unknown_table_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            experiment_matrix("3", tmp_path)
