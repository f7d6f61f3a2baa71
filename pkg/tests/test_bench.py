import pytest

from phasemask.backends import BackendSelector
from phasemask.bench import (BenchCell, BenchPlan, BenchReport, emit_report,
                             parse_report_csv, run_bench, run_cell,
                             spot_grid_centers)
from phasemask.grid import DOUBLE, SINGLE, GridSpec


def small_plan(**overrides):
    defaults = dict(sizes=((64, 64),), iters=5, repetitions=2,
                    strategies=(BackendSelector(),), precisions=(DOUBLE,),
                    warmup=1)
    defaults.update(overrides)
    return BenchPlan(**defaults)


class TestRunBench:
    def test_accounting_identity(self):
        report = run_bench(small_plan(iters=25, repetitions=1))
        cell = report.cells[0]
        assert cell.error is None
        assert cell.fft_ms >= 0 and cell.constraint_ms >= 0
        assert cell.fft_ms + cell.constraint_ms <= cell.per_iter_ms * 1.05

    def test_samples_retained(self):
        report = run_bench(small_plan(repetitions=3))
        assert len(report.cells[0].samples) == 3

    def test_speedup_rows_pair_strategies(self):
        plan = small_plan(strategies=(BackendSelector("serial"),
                                      BackendSelector("threaded", 2)))
        report = run_bench(plan)
        assert len(report.speedups) == 1
        assert report.speedups[0].speedup > 0

    def test_matrix_covers_all_cells(self):
        plan = small_plan(sizes=((32, 32), (48, 48)), precisions=(SINGLE, DOUBLE))
        report = run_bench(plan)
        assert len(report.cells) == 4


class TestEmitReport:
    def _synthetic(self):
        cells = (
            BenchCell(256, 256, "serial", 1, "double", 2.5, 1.5, 0.8, 3.0,
                      (2.4, 2.5, 2.6)),
            BenchCell(256, 256, "threaded", 4, "double", 1.25, 0.75, 0.4, 3.0,
                      (1.2, 1.25, 1.3)),
            BenchCell(4096, 4096, "serial", 1, "single", 0.0, 0.0, 0.0, 0.0,
                      (), error="out of memory"),
        )
        return BenchReport(cells=cells, speedups=())

    def test_empty_plan_header_only(self):
        text = emit_report(BenchReport(cells=(), speedups=()), "csv")
        assert text.splitlines() == ["n_x,n_y,strategy,workers,precision,"
                                     "per_iter_ms,fft_ms,constraint_ms,"
                                     "ingest_ms,samples,error"]

    def test_csv_round_trip(self):
        report = self._synthetic()
        back = parse_report_csv(emit_report(report, "csv"))
        assert back.cells == report.cells
        # speedups are re-derived from the cells
        assert len(back.speedups) == 1
        assert back.speedups[0].speedup == pytest.approx(2.0)

    def test_table_snapshot(self):
        text = emit_report(self._synthetic(), "table")
        lines = text.splitlines()
        assert lines[0].split() == ["size", "strategy", "prec", "ms/iter",
                                    "fft%", "constr%", "ingest_ms"]
        assert "256x256" in lines[1] and "serial" in lines[1]
        assert "error: out of memory" in lines[3]

    def test_json_lines_parse(self):
        import json
        text = emit_report(self._synthetic(), "json-lines")
        rows = [json.loads(line) for line in text.splitlines()]
        assert rows[0]["per_iter_ms"] == 2.5
        assert rows[2]["error"] == "out of memory"

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report(self._synthetic(), "xml")


class TestSpotGridCenters:
    def test_count_and_bounds(self):
        spec = GridSpec(256, 256)
        centers = spot_grid_centers(spec, 3, 3)
        assert len(centers) == 9
        assert all(0 <= j < 256 and 0 <= k < 256 for j, k in centers)
