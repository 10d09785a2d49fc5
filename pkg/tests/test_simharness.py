import numpy as np
import pytest

from halfnormal import simharness as sh
from halfnormal.dist import HalfNormalParams
from halfnormal.errors import DomainError


def stub_estimator(sample):
    return 7.0


def spread_estimator(sample):
    return float(sample.mean)


class TestMse:
    def test_constant(self):
        assert sh.mse([4.0, 4.0, 4.0], 4.0) == 0.0

    def test_symmetric(self):
        assert sh.mse([3.0, 5.0], 4.0) == 1.0

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            sh.mse([], 4.0)

    def test_decomposition(self):
        rng = np.random.default_rng(3)
        values = rng.normal(9.0, 2.0, size=500)
        total = sh.mse(values, 10.0)
        recomposed = values.var() + (values.mean() - 10.0) ** 2
        assert abs(total - recomposed) < 1e-10


class TestFiveNumberSummary:
    def test_linear_interpolation_quartiles(self):
        box = sh.FiveNumberSummary.from_values(np.array([1.0, 2.0, 3.0, 4.0]))
        assert box.minimum == 1.0
        assert box.q1 == 1.75
        assert box.median == 2.5
        assert box.q3 == 3.25
        assert box.maximum == 4.0
        assert box.mean == 2.5


class TestConfig:
    def test_replication_floor(self):
        with pytest.raises(DomainError):
            sh.SimulationConfig(sh.Experiment.TABLE5, replications=1)

    def test_table5_needs_n3(self):
        with pytest.raises(DomainError):
            sh.SimulationConfig(sh.Experiment.TABLE5, n_values=(2,))

    def test_custom_needs_estimator(self):
        with pytest.raises(DomainError):
            sh.SimulationConfig(sh.Experiment.CUSTOM)

    def test_paper_defaults(self):
        cfg = sh.SimulationConfig(sh.Experiment.TABLE5)
        assert cfg.reps == 1000
        assert cfg.ns == (10, 20, 30)
        cfg1 = sh.SimulationConfig(sh.Experiment.TABLE1)
        assert cfg1.reps == 100
        assert cfg1.ms == (100, 1000, 5000)
        assert cfg1.epsilons == (0.1, 0.01)


class TestStubExperiments:
    def test_constant_estimator_exact_mse(self):
        cfg = sh.SimulationConfig(
            sh.Experiment.CUSTOM,
            replications=2,
            n_values=(5,),
            custom_estimator=stub_estimator,
            custom_truth=10.0,
        )
        (report,) = sh.run_experiment(cfg)
        assert report.replicate_values == (7.0, 7.0)
        assert report.mse == 9.0
        assert report.variance == 0.0
        assert report.boxplot.minimum == report.boxplot.maximum == 7.0

    def test_determinism_bytes(self):
        cfg = sh.SimulationConfig(
            sh.Experiment.CUSTOM,
            replications=20,
            n_values=(8,),
            custom_estimator=spread_estimator,
            custom_truth=10.0,
        )
        a = sh.run_experiment(cfg)
        b = sh.run_experiment(cfg)
        assert a == b

    def test_cells_independent_of_grid_order(self):
        base = dict(
            replications=10,
            custom_estimator=spread_estimator,
            custom_truth=10.0,
        )
        fwd = sh.run_experiment(
            sh.SimulationConfig(sh.Experiment.CUSTOM, n_values=(5, 9), **base)
        )
        rev = sh.run_experiment(
            sh.SimulationConfig(sh.Experiment.CUSTOM, n_values=(9, 5), **base)
        )
        by_n_fwd = {r.n: r.replicate_values for r in fwd}
        by_n_rev = {r.n: r.replicate_values for r in rev}
        assert by_n_fwd == by_n_rev

    def test_jobs_do_not_change_values(self):
        base = dict(
            replications=12,
            n_values=(6,),
            custom_estimator=spread_estimator,
            custom_truth=10.0,
        )
        serial = sh.run_experiment(sh.SimulationConfig(sh.Experiment.CUSTOM, **base))
        parallel = sh.run_experiment(
            sh.SimulationConfig(sh.Experiment.CUSTOM, jobs=2, **base)
        )
        assert serial == parallel


class TestTableDrivers:
    def test_table1_grid_layout(self):
        cfg = sh.SimulationConfig(
            sh.Experiment.TABLE1,
            replications=5,
            m_values=(20, 40),
            epsilon_values=(0.1, 0.05),
        )
        cells = sh.run_experiment(cfg)
        assert [(c.epsilon, c.m) for c in cells] == [
            (0.1, 20), (0.1, 40), (0.05, 20), (0.05, 40)
        ]
        for cell in cells:
            assert len(cell.replicate_values) == 5
            assert cell.truth == 0.5

    def test_table5_small_run_ordering(self):
        cfg = sh.SimulationConfig(sh.Experiment.TABLE5, replications=300)
        cells = sh.run_experiment(cfg)
        assert len(cells) == 9
        by_key = {(c.n, c.estimator): c for c in cells}
        for n in (10, 20, 30):
            assert by_key[(n, "mre")].mse < by_key[(n, "mle")].mse

    def test_table4_pairs_estimators_on_shared_samples(self):
        cfg = sh.SimulationConfig(
            sh.Experiment.TABLE4,
            replications=4,
            n_values=(20,),
            epsilon_values=(0.05,),
        )
        cells = sh.run_experiment(cfg)
        assert [c.estimator for c in cells] == ["unbiased", "mle", "mre"]
        unb, mle, mre = cells
        # Paired: the MLE location is the shared sample's minimum, which is
        # strictly below the unbiased location only if both came from the
        # same draw; verify the strict per-replication coupling min <= mean.
        for u, m in zip(unb.replicate_values, mle.replicate_values):
            assert m >= 10.0
            assert u == pytest.approx(m, abs=5.0)

    def test_failed_replications_are_recorded(self):
        def sometimes_bad(sample):
            from halfnormal.errors import DegenerateSampleError

            if sample.values[0] > sample.mean:
                raise DegenerateSampleError("synthetic failure")
            return float(sample.mean)

        cfg = sh.SimulationConfig(
            sh.Experiment.CUSTOM,
            replications=40,
            n_values=(6,),
            custom_estimator=sometimes_bad,
            custom_truth=10.0,
        )
        (report,) = sh.run_experiment(cfg)
        assert len(report.excluded) > 0
        assert len(report.replicate_values) + len(report.excluded) == 40
        assert all(reason == "DegenerateSampleError" for _, reason in report.excluded)
