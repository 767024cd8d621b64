import math

import numpy as np
import pytest

from femasm import MatrixKind, Strategy
from femasm.bench import (
    BenchRecord,
    STATUS_OK,
    STATUS_SKIPPED,
    default_metadata,
    fit_loglog_slope,
    median_time,
    read_records_csv,
    run_bench,
    write_records_csv,
)


def synthetic_records(times_by_nq, kind="mass", strategy="optv2"):
    return [
        BenchRecord(kind, strategy, nq, 2 * nq, nq, t, 3)
        for nq, t in sorted(times_by_nq.items())
    ]


class TestFitSlope:
    def test_linear_power_law(self):
        recs = synthetic_records({nq: 3.5e-6 * nq for nq in (100, 1000, 10000, 100000)})
        assert fit_loglog_slope(recs) == pytest.approx(1.0, abs=1e-9)

    def test_quadratic_power_law(self):
        recs = synthetic_records({nq: 2e-9 * nq**2 for nq in (100, 1000, 10000, 100000)})
        assert fit_loglog_slope(recs) == pytest.approx(2.0, abs=1e-9)

    def test_too_few_records(self):
        recs = synthetic_records({100: 1.0, 1000: 2.0, 100000: 3.0})
        with pytest.raises(ValueError, match=">= 4"):
            fit_loglog_slope(recs)

    def test_insufficient_span(self):
        recs = synthetic_records({nq: 1e-6 * nq for nq in (100, 200, 400, 800)})
        with pytest.raises(ValueError, match="decades"):
            fit_loglog_slope(recs)

    def test_skipped_records_ignored(self):
        recs = synthetic_records({nq: 1e-6 * nq for nq in (100, 1000, 10000, 100000)})
        recs.append(
            BenchRecord("mass", "optv2", 10**6, 2 * 10**6, 10**6, 60.0, 0, STATUS_SKIPPED)
        )
        assert fit_loglog_slope(recs) == pytest.approx(1.0, abs=1e-9)


class TestMedian:
    def test_plain_median(self):
        assert median_time([3.0, 1.0, 2.0]) == 2.0

    def test_outlier_replacing_max_does_not_move_median(self):
        for samples in ([1.0, 1.1, 1.2], [1.0, 1.1, 1.2, 1.3], [0.9, 1.0, 1.1, 1.2, 5.0]):
            base = median_time(samples)
            spoiled = sorted(samples)[:-1] + [1e9]
            assert median_time(spoiled) == base


class TestCsv:
    def test_deterministic_bytes(self, tmp_path):
        recs = synthetic_records({100: 0.1234567, 1000: 1.0, 10000: 12.5})
        meta = {"machine": "testbox", "threads": 1}
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_records_csv(recs, p1, meta)
        write_records_csv(recs, p2, meta)
        assert p1.read_bytes() == p2.read_bytes()

    def test_formatting(self, tmp_path):
        recs = [
            BenchRecord("mass", "optv2", 81, 128, 81, 0.123456, 3, STATUS_OK, 1.0),
            BenchRecord("mass", "optv0", 81, 128, 81, 1.5, 3, STATUS_OK, 0.0823),
        ]
        path = tmp_path / "fmt.csv"
        write_records_csv(recs, path, {"k": "v"})
        lines = path.read_text().splitlines()
        assert lines[0] == "# k: v"
        assert lines[1].startswith("kind,strategy,nq,nme,n_df,median_seconds")
        assert "0.123" in lines[2] and "1.00" in lines[2]
        assert "1.500" in lines[3] and "0.08" in lines[3]

    def test_round_trip(self, tmp_path):
        recs = [
            BenchRecord("stiff", "classical", 81, 128, 81, 1.25, 1, STATUS_OK, 0.25),
            BenchRecord("stiff", "classical", 289, 512, 289, 60.0, 0, STATUS_SKIPPED),
        ]
        path = tmp_path / "rt.csv"
        write_records_csv(recs, path, default_metadata(60.0, 3))
        back = read_records_csv(path)
        assert back == recs


class TestRunBench:
    def test_tiny_run_has_all_cells(self, tmp_path):
        out = tmp_path / "bench.csv"
        records = run_bench(
            list(MatrixKind),
            [Strategy.OPTV1, Strategy.OPTV2],
            [8],
            3,
            out,
        )
        assert len(records) == len(MatrixKind) * 2
        assert all(r.nq == 81 and r.ok for r in records)
        assert all(r.n_df == (162 if r.kind == "elastic" else 81) for r in records)
        assert out.exists()

    def test_reference_speedup_is_one(self, tmp_path):
        records = run_bench(
            [MatrixKind.MASS],
            [Strategy.OPTV0, Strategy.OPTV2],
            [6],
            3,
            tmp_path / "s.csv",
        )
        by_strategy = {r.strategy: r for r in records}
        assert by_strategy["optv2"].speedup == pytest.approx(1.0)
        assert by_strategy["optv0"].speedup is not None

    def test_budget_marks_skipped_and_propagates(self):
        records = run_bench(
            [MatrixKind.MASS],
            [Strategy.CLASSICAL],
            [8, 12],
            3,
            None,
            time_budget_s=1e-4,
        )
        assert [r.status for r in records] == [STATUS_SKIPPED, STATUS_SKIPPED]
        assert records[0].wall_time_seconds > 0
        assert records[1].repetitions == 0  # never attempted, lower bound only

    def test_validates_arguments(self):
        with pytest.raises(ValueError, match="ascending"):
            run_bench([MatrixKind.MASS], [Strategy.OPTV2], [8, 8], 3, None)
        with pytest.raises(ValueError, match="repetitions"):
            run_bench([MatrixKind.MASS], [Strategy.OPTV2], [8], 2, None)
        with pytest.raises(ValueError, match="nonempty"):
            run_bench([MatrixKind.MASS], [Strategy.OPTV2], [], 3, None)
