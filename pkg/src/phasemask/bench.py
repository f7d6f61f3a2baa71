"""Timing harness: per-iteration runtimes split into FFT and constraint
phases across grid sizes, precisions and strategies, with a threaded-vs-
serial speedup table.

Cells run strictly sequentially so no co-tenant distorts timings; medians
over repetitions are reported and raw samples retained.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .backends import SERIAL, THREADED, BackendSelector
from .grid import DOUBLE, SINGLE, GridSpec, Precision, RealGrid
from .patterns import SpotSpec, modulus_from_intensity, spot_pattern, to_fourier_order
from .projections import FourierConstraint, SlmConstraint
from .solver import SolveConfig, default_amplitude, solve
from .transform import FftProvider

DEFAULT_SIZES = ((256, 256), (512, 512), (800, 600), (1024, 1024))


@dataclass(frozen=True)
class BenchPlan:
    sizes: tuple[tuple[int, int], ...] = DEFAULT_SIZES
    iters: int = 25
    repetitions: int = 5
    strategies: tuple[BackendSelector, ...] = (BackendSelector(),)
    precisions: tuple[Precision, ...] = (SINGLE, DOUBLE)
    warmup: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


@dataclass(frozen=True)
class BenchCell:
    n_x: int
    n_y: int
    strategy: str
    workers: int
    precision: str
    per_iter_ms: float
    fft_ms: float
    constraint_ms: float
    ingest_ms: float
    samples: tuple[float, ...]
    error: str | None = None

    @property
    def fft_share(self) -> float:
        return self.fft_ms / self.per_iter_ms if self.per_iter_ms > 0 else 0.0


@dataclass(frozen=True)
class SpeedupRow:
    n_x: int
    n_y: int
    precision: str
    workers: int
    speedup: float


@dataclass(frozen=True)
class BenchReport:
    cells: tuple[BenchCell, ...]
    speedups: tuple[SpeedupRow, ...]


def spot_grid_centers(spec: GridSpec, cols: int = 3, rows: int = 3):
    """Evenly spaced spot lattice used as the default bench target."""
    return tuple((round((i + 1) * spec.n_x / (cols + 1)),
                  round((q + 1) * spec.n_y / (rows + 1)))
                 for q in range(rows) for i in range(cols))


def _bench_problem(spec: GridSpec, precision: Precision):
    t0 = time.perf_counter()
    intensity = spot_pattern(SpotSpec(spec, spot_grid_centers(spec)))
    target = modulus_from_intensity(to_fourier_order(intensity))
    m = FourierConstraint(target, precision)
    c = SlmConstraint(default_amplitude(m.m, precision), precision)
    ingest_ms = (time.perf_counter() - t0) * 1e3
    return c, m, ingest_ms


def run_cell(spec: GridSpec, sel: BackendSelector, precision: Precision,
             iters: int, repetitions: int, warmup: int) -> BenchCell:
    try:
        c, m, ingest_ms = _bench_problem(spec, precision)
        provider = FftProvider(spec, precision, sel.fft_workers)
        # record only the first iteration so metrics stay off the timed path
        cfg = SolveConfig(max_iters=iters, precision=precision,
                          record_every=iters, backend=sel)
        samples = []
        fft_samples = []
        constraint_samples = []
        for rep in range(warmup + repetitions):
            result = solve(c, m, cfg, provider)
            if rep < warmup:
                continue
            samples.append(result.timing.per_iter_ms)
            fft_samples.append(result.timing.fft_ms / result.iters_run)
            constraint_samples.append(result.timing.constraint_ms / result.iters_run)
        return BenchCell(
            n_x=spec.n_x, n_y=spec.n_y, strategy=sel.strategy,
            workers=sel.workers, precision=precision.tag,
            per_iter_ms=statistics.median(samples),
            fft_ms=statistics.median(fft_samples),
            constraint_ms=statistics.median(constraint_samples),
            ingest_ms=ingest_ms, samples=tuple(samples))
    except MemoryError as exc:
        return BenchCell(n_x=spec.n_x, n_y=spec.n_y, strategy=sel.strategy,
                         workers=sel.workers, precision=precision.tag,
                         per_iter_ms=0.0, fft_ms=0.0, constraint_ms=0.0,
                         ingest_ms=0.0, samples=(), error=str(exc) or "out of memory")


def run_bench(plan: BenchPlan) -> BenchReport:
    cells = []
    for n_x, n_y in plan.sizes:
        spec = GridSpec(n_x=n_x, n_y=n_y)
        for precision in plan.precisions:
            for sel in plan.strategies:
                cells.append(run_cell(spec, sel, precision, plan.iters,
                                      plan.repetitions, plan.warmup))
    return BenchReport(cells=tuple(cells), speedups=tuple(_speedups(cells)))


def _speedups(cells) -> list[SpeedupRow]:
    serial = {(c.n_x, c.n_y, c.precision): c for c in cells
              if c.strategy == SERIAL and c.error is None}
    rows = []
    for c in cells:
        if c.strategy != THREADED or c.error is not None or c.per_iter_ms == 0:
            continue
        base = serial.get((c.n_x, c.n_y, c.precision))
        if base is not None and base.per_iter_ms > 0:
            rows.append(SpeedupRow(c.n_x, c.n_y, c.precision, c.workers,
                                   base.per_iter_ms / c.per_iter_ms))
    return rows


_CSV_COLUMNS = ["n_x", "n_y", "strategy", "workers", "precision",
                "per_iter_ms", "fft_ms", "constraint_ms", "ingest_ms",
                "samples", "error"]


def emit_report(r: BenchReport, format: str = "table") -> str:
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for c in r.cells:
            writer.writerow([c.n_x, c.n_y, c.strategy, c.workers, c.precision,
                             repr(c.per_iter_ms), repr(c.fft_ms),
                             repr(c.constraint_ms), repr(c.ingest_ms),
                             ";".join(repr(s) for s in c.samples),
                             c.error or ""])
        return buf.getvalue()
    if format == "json-lines":
        lines = []
        for c in r.cells:
            lines.append(json.dumps({
                "n_x": c.n_x, "n_y": c.n_y, "strategy": c.strategy,
                "workers": c.workers, "precision": c.precision,
                "per_iter_ms": c.per_iter_ms, "fft_ms": c.fft_ms,
                "constraint_ms": c.constraint_ms, "ingest_ms": c.ingest_ms,
                "samples": list(c.samples), "error": c.error}, sort_keys=True))
        for s in r.speedups:
            lines.append(json.dumps({
                "speedup": s.speedup, "n_x": s.n_x, "n_y": s.n_y,
                "precision": s.precision, "workers": s.workers}, sort_keys=True))
        return "\n".join(lines) + "\n"
    if format == "table":
        header = (f"{'size':>11} {'strategy':>12} {'prec':>6} "
                  f"{'ms/iter':>10} {'fft%':>6} {'constr%':>8} {'ingest_ms':>10}")
        lines = [header]
        for c in r.cells:
            if c.error:
                lines.append(f"{c.n_x}x{c.n_y}: error: {c.error}")
                continue
            share = 100 * c.fft_share
            cshare = 100 * c.constraint_ms / c.per_iter_ms if c.per_iter_ms else 0
            strat = c.strategy if c.strategy == SERIAL else f"{c.strategy}:{c.workers}"
            lines.append(f"{f'{c.n_x}x{c.n_y}':>11} {strat:>12} {c.precision:>6} "
                         f"{c.per_iter_ms:>10.3f} {share:>6.1f} {cshare:>8.1f} "
                         f"{c.ingest_ms:>10.3f}")
        for s in r.speedups:
            lines.append(f"speedup {s.n_x}x{s.n_y} {s.precision} "
                         f"threaded:{s.workers} vs serial: {s.speedup:.2f}x")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {format!r}")


def parse_report_csv(text: str) -> BenchReport:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if rows and rows[0] == _CSV_COLUMNS:
        rows = rows[1:]
    cells = []
    for row in rows:
        samples = tuple(float(s) for s in row[9].split(";") if s)
        cells.append(BenchCell(int(row[0]), int(row[1]), row[2], int(row[3]),
                               row[4], float(row[5]), float(row[6]),
                               float(row[7]), float(row[8]), samples,
                               row[10] or None))
    return BenchReport(cells=tuple(cells), speedups=tuple(_speedups(cells)))
