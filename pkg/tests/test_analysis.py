import math
from dataclasses import replace

import numpy as np
import pytest

from src.analysis import (
    EvalCurve,
    VisitRecorder,
    aulc,
    bound_rhs,
    iqm,
    log_visits,
    make_diagnostics,
    paired_ttest_onesided,
    quartiles,
)
from src.analysis import csv_io
from src.core.errors import CsvSchemaError
from src.oracle.numeric_checks import BOUND_EXAMPLE_RHS


class TestIqm:
    def test_one_to_ten(self):
        assert iqm(list(range(1, 11))) == pytest.approx(5.5)

    def test_single_value(self):
        assert iqm([3.25]) == 3.25

    def test_all_equal(self):
        assert iqm([2.0] * 7) == pytest.approx(2.0)

    def test_order_free_and_bounded(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            values = rng.normal(size=int(rng.integers(1, 30)))
            got = iqm(values)
            assert values.min() <= got <= values.max()
            assert got == pytest.approx(iqm(rng.permutation(values)))

    def test_empty(self):
        with pytest.raises(ValueError):
            iqm([])

    def test_quartiles_are_order_statistics(self):
        assert quartiles(list(range(1, 11))) == (3.0, 8.0)


class TestAulc:
    def test_mean_of_checkpoints(self):
        assert aulc(EvalCurve.from_pairs([(1, 0.0), (2, 10.0), (3, 20.0)])) == pytest.approx(10.0)

    def test_constant(self):
        assert aulc(EvalCurve.from_pairs([(s, 4.0) for s in range(5)])) == pytest.approx(4.0)

    def test_steps_must_increase(self):
        with pytest.raises(ValueError):
            EvalCurve(steps=(10, 10), returns=(0.0, 1.0))

    def test_empty(self):
        with pytest.raises(ValueError):
            aulc(EvalCurve(steps=(), returns=()))


class TestPairedTTest:
    def test_regular_case(self):
        diff = np.array([1.2, 0.8, 1.0, 1.1, 0.9])
        res = paired_ttest_onesided(diff, np.zeros(5))
        assert not res.degenerate
        assert res.t_stat == pytest.approx(1.0 / math.sqrt(0.025 / 5), rel=1e-9)
        assert res.p_value < 1e-3

    def test_constant_positive_difference(self):
        res = paired_ttest_onesided([2.0, 3.0, 4.0, 5.0], [1.0, 2.0, 3.0, 4.0])
        assert res.degenerate
        assert res.p_value == 0.0
        assert res.t_stat == math.inf

    def test_identical_samples(self):
        res = paired_ttest_onesided([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert res.degenerate
        assert res.p_value == 1.0
        assert math.isnan(res.t_stat)

    def test_rounding_noise_in_constant_difference(self):
        # 0.3-0.2, 0.7-0.6 and 1.1-1.0 differ in the last bits
        res = paired_ttest_onesided([0.3, 0.7, 1.1], [0.2, 0.6, 1.0])
        assert res.degenerate
        assert res.p_value == 0.0
        assert res.t_stat == math.inf

    def test_rounding_noise_around_zero(self):
        res = paired_ttest_onesided([0.1 + 0.2, 0.3], [0.3, 0.1 + 0.2])
        assert res.degenerate
        assert res.p_value == 1.0
        assert math.isnan(res.t_stat)

    def test_wrong_direction_gives_large_p(self):
        res = paired_ttest_onesided([0.0, 0.1, -0.2, 0.05], [1.0, 1.2, 0.9, 1.1])
        assert res.p_value > 0.99

    @pytest.mark.parametrize("a,b", [([1.0], [0.0]), ([1.0, 2.0], [0.0])])
    def test_bad_lengths(self, a, b):
        with pytest.raises(ValueError):
            paired_ttest_onesided(a, b)


class TestBound:
    def _base(self, **kw):
        args = dict(empirical_risk=2.0, kl=0.0, variance_term=0.0, gamma=0.5, n=256, nu=1.0, lambda_bar=3.0, delta=0.05)
        args.update(kw)
        return make_diagnostics(**args)

    def test_worked_example(self):
        d = self._base()
        assert d.B == pytest.approx(4.0)
        assert d.rhs == pytest.approx(BOUND_EXAMPLE_RHS, abs=1e-9)
        assert d.rhs == pytest.approx(20.0767, abs=1e-4)

    def test_large_sample_limit(self):
        d = self._base(delta=1.0, n=10**12)
        assert d.rhs == pytest.approx(2.0 / 0.25, rel=1e-9)

    def test_variance_lowers_rhs(self):
        assert self._base(variance_term=1.0).rhs < self._base().rhs

    def test_slopes(self):
        base = self._base().rhs
        assert self._base(kl=1.0).rhs - base == pytest.approx(1.0 / 0.25)
        assert self._base(empirical_risk=3.0).rhs - base == pytest.approx(1.0 / 0.25)
        assert self._base(kl=1.0, nu=2.0).rhs - self._base(nu=2.0).rhs == pytest.approx(1.0 / (2.0 * 0.25))

    def test_recomputable(self):
        d = self._base(kl=0.7, variance_term=0.3)
        assert bound_rhs(d, 0.5) == d.rhs

    @pytest.mark.parametrize("delta", [0.0, 1.5, -0.1])
    def test_delta_range(self, delta):
        with pytest.raises(ValueError):
            bound_rhs(replace(self._base(), delta=delta), 0.5)


class TestVisits:
    def test_counts(self):
        stream = [np.array([float(i), -float(i)]) for i in range(1500)]
        rows = log_visits(stream, 500, (0, 1))
        assert [r[0] for r in rows] == [500, 1000, 1500]
        assert rows[0][1:] == (499.0, -499.0)

    def test_floor_of_steps(self):
        assert len(log_visits([np.zeros(2)] * 1234, 100, (0, 1))) == 12

    def test_recorder_keeps_only_sampled_steps(self):
        recorder = VisitRecorder(every=4, dims=(1, 0))
        for step in range(1, 11):
            recorder.observe(step, np.array([float(step), 10.0 * step]))
        assert recorder.rows == [(4, 40.0, 4.0), (8, 80.0, 8.0)]

    def test_recorder_rejects_zero_interval(self):
        with pytest.raises(ValueError):
            VisitRecorder(every=0, dims=(0, 1))

    def test_dims_out_of_range(self):
        with pytest.raises(ValueError):
            log_visits([np.zeros(2)] * 5, 1, (0, 2))


class TestCsv:
    def test_eval_round_trip_header(self, tmp_path):
        path = csv_io.write_eval(tmp_path / "eval.csv", [(10, 1.5, (1.0, 2.0)), (20, 0.0, (0.0, 0.0))], 2)
        text = path.read_text()
        assert text.splitlines()[0] == "step,eval_return_mean,eval_return_0,eval_return_1"
        assert "\r" not in text
        frame = csv_io.read_eval(path)
        assert list(frame["eval_return_mean"]) == [1.5, 0.0]

    def test_missing_values_written_as_nan(self, tmp_path):
        rows = [(1, float("nan"), 0.5, float("nan"), 0.0, 0.2, 0), (2, 3.0, 0.4, 0.1, -0.2, float("nan"), 1)]
        path = csv_io.write_rows(tmp_path / "train.csv", csv_io.TRAIN_COLUMNS, rows)
        lines = path.read_text().splitlines()
        assert lines[1] == "1,nan,0.5,nan,0.0,0.2,0"
        assert ",," not in path.read_text()
        frame = csv_io.read_table(path, csv_io.TRAIN_COLUMNS)
        assert math.isnan(frame["episode_return"][0]) and math.isnan(frame["alpha"][1])
        assert frame["episode_return"][1] == 3.0

    def test_eval_row_length_checked(self, tmp_path):
        with pytest.raises(ValueError):
            csv_io.write_eval(tmp_path / "eval.csv", [(10, 1.0, (1.0,))], 2)

    def test_missing_return_columns(self, tmp_path):
        path = tmp_path / "eval.csv"
        path.write_text("step,eval_return_mean\n1,0.5\n")
        with pytest.raises(CsvSchemaError):
            csv_io.read_eval(path)

    def test_non_increasing_steps(self, tmp_path):
        path = tmp_path / "eval.csv"
        path.write_text("step,eval_return_mean,eval_return_0\n20,1,1\n10,2,2\n")
        with pytest.raises(CsvSchemaError):
            csv_io.read_eval(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "eval.csv"
        path.write_text("")
        with pytest.raises(CsvSchemaError):
            csv_io.read_eval(path)

    def test_header_mismatch(self, tmp_path):
        path = csv_io.write_rows(tmp_path / "visits.csv", ("step", "x", "y"), [(1, 0.0, 0.0)])
        with pytest.raises(CsvSchemaError):
            csv_io.read_table(path, csv_io.VISITS_COLUMNS)
