"""The alternating-projections loop: u <- P_S(P_M(u)).

Initialization follows the adapted-target convention: the target modulus is
placed in the Fourier plane with zero phases and transformed back to the
SLM plane. Random-phase initialization is available as an opt-in but is
excluded from golden tests (it converges to comparable masks, more slowly).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .backends import BackendSelector
from .grid import (DOUBLE, FOURIER_PLANE, SLM_PLANE, Field, GridSpec,
                   PhaseMask, Precision, RealGrid, norm2, phases_of)
from .metrics import (ConvergenceRecord, ErrorTolerances, gap as gap_metric,
                      physical_error, reconstructed_intensity)
from .projections import (FourierConstraint, SlmConstraint, project_modulus,
                          project_slm)
from .transform import FftProvider


class SolveDivergedError(RuntimeError):
    """Non-finite values appeared during the iteration."""

    def __init__(self, iteration: int):
        super().__init__(f"non-finite values at iteration {iteration}")
        self.iteration = iteration


@dataclass(frozen=True)
class SolveConfig:
    max_iters: int = 25
    precision: Precision = DOUBLE
    record_every: int = 1
    early_stop_tol: float | None = None
    backend: BackendSelector = field(default_factory=BackendSelector)
    random_phase_init: bool = False
    seed: int = 0
    tolerances: ErrorTolerances = field(default_factory=ErrorTolerances)

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.early_stop_tol is not None and self.early_stop_tol < 0:
            raise ValueError("early_stop_tol must be nonnegative")


@dataclass(frozen=True)
class Timing:
    """Wall-time breakdown in milliseconds. Metrics are kept off the hot path
    and timed separately."""

    total_ms: float
    fft_ms: float
    constraint_ms: float
    metrics_ms: float
    iteration_ms: float

    @property
    def per_iter_ms(self) -> float:
        return self.iteration_ms


@dataclass(frozen=True)
class SolveResult:
    mask: PhaseMask
    u_star: Field
    v_star: Field
    history: tuple[ConvergenceRecord, ...]
    iters_run: int
    timing: Timing
    aborted: bool = False

    @property
    def final(self) -> ConvergenceRecord:
        return self.history[-1]


def default_amplitude(m: RealGrid, precision: Precision = DOUBLE) -> RealGrid:
    """Uniform SLM amplitude with total energy matched to the target:
    p_jk = ||m|| / sqrt(N)."""
    level = norm2(m.data.astype(np.complex128)) / math.sqrt(m.spec.n)
    return RealGrid(m.spec, np.full(m.spec.shape, level))


def initial_iterate(m: FourierConstraint, provider: FftProvider,
                    random_phases: bool = False, seed: int = 0) -> Field:
    """SLM-plane starting point: inverse transform of the target modulus.

    With zero Fourier phases this realizes the deterministic selection of
    projecting the raw target onto the modulus constraint set.
    """
    if random_phases:
        rng = np.random.default_rng(seed)
        phi = rng.uniform(0.0, 2 * np.pi, m.m.spec.shape)
        data = m.m.data * np.exp(1j * phi)
    else:
        data = m.m.data.astype(np.complex128)
    uhat = Field(m.m.spec, data.astype(provider.precision.complex_dtype),
                 FOURIER_PLANE)
    return provider.inverse(uhat)


def solve(c: SlmConstraint, m: FourierConstraint, cfg: SolveConfig,
          provider: FftProvider | None = None,
          on_record=None, should_abort=None) -> SolveResult:
    """Run alternating projections and extract the best-approximation pair.

    on_record(record) fires for each recorded iteration; should_abort() is
    polled once per iteration for cooperative cancellation.
    """
    spec = c.p.spec
    if m.m.spec != spec:
        raise ValueError("amplitude and target constraints live on different grids")
    if float(c.p.data.max(initial=0.0)) == 0.0:
        raise ValueError("SLM amplitude is identically zero")
    if float(m.m.data.max(initial=0.0)) == 0.0:
        raise ValueError("target pattern is identically zero (all dark)")

    if c.precision is not cfg.precision:
        c = SlmConstraint(c.p, cfg.precision)
    if m.precision is not cfg.precision:
        m = FourierConstraint(m.m, cfg.precision)
    if provider is None:
        provider = FftProvider(spec, cfg.precision, cfg.backend.fft_workers)

    sel = cfg.backend
    target_intensity = RealGrid(spec, m.m.data.astype(np.float64) ** 2)
    target_energy = float(target_intensity.data.sum())

    u = initial_iterate(m, provider, cfg.random_phase_init, cfg.seed)

    history: list[ConvergenceRecord] = []
    fft_ms = 0.0
    constraint_ms = 0.0
    metrics_ms = 0.0
    iteration_ms = 0.0
    aborted = False
    prev_gap: float | None = None
    t_start = time.perf_counter()
    iters_run = 0

    for it in range(1, cfg.max_iters + 1):
        t_iter = time.perf_counter()
        try:
            t0 = time.perf_counter()
            uhat = provider.forward(u)
            t1 = time.perf_counter()
            vhat = project_modulus(uhat, m, sel)
            t2 = time.perf_counter()
            v = provider.inverse(vhat)
            t3 = time.perf_counter()
            u = project_slm(v, c, sel)
            t4 = time.perf_counter()
        except ValueError as exc:
            if "non-finite" in str(exc):
                raise SolveDivergedError(it) from exc
            raise
        it_fft = (t1 - t0) + (t3 - t2)
        it_constraint = (t2 - t1) + (t4 - t3)
        fft_ms += it_fft * 1e3
        constraint_ms += it_constraint * 1e3
        iteration_ms += (time.perf_counter() - t_iter) * 1e3
        iters_run = it

        need_gap = cfg.early_stop_tol is not None
        record_now = (it - 1) % cfg.record_every == 0
        if record_now or need_gap:
            t5 = time.perf_counter()
            g = gap_metric(u, c, m, provider, sel)
            if record_now:
                intensity = reconstructed_intensity(u, provider, target_energy)
                err_lit, err_dark = physical_error(intensity, target_intensity,
                                                   cfg.tolerances)
                record = ConvergenceRecord(
                    iter=it, gap=g, err_lit=err_lit, err_dark=err_dark,
                    time_fft_ms=it_fft * 1e3,
                    time_constraint_ms=it_constraint * 1e3,
                    time_total_ms=(t4 - t_iter) * 1e3)
                history.append(record)
                if on_record is not None:
                    on_record(record)
            metrics_ms += (time.perf_counter() - t5) * 1e3

            if need_gap and prev_gap is not None and g > 0 and \
                    abs(g - prev_gap) <= cfg.early_stop_tol * g:
                break
            prev_gap = g

        if should_abort is not None and should_abort():
            aborted = True
            break

    # Best-approximation pair from the final iterate (already in S).
    t5 = time.perf_counter()
    vhat = project_modulus(provider.forward(u), m, sel)
    v_star = provider.inverse(vhat)
    u_star = project_slm(v_star, c, sel)
    mask = phases_of(u_star, c.zero_tol)
    total_ms = (time.perf_counter() - t_start) * 1e3
    fft_ms_final = fft_ms
    constraint_ms_final = constraint_ms

    timing = Timing(total_ms=total_ms, fft_ms=fft_ms_final,
                    constraint_ms=constraint_ms_final, metrics_ms=metrics_ms,
                    iteration_ms=iteration_ms / max(iters_run, 1))
    return SolveResult(mask=mask, u_star=u_star, v_star=v_star,
                       history=tuple(history), iters_run=iters_run,
                       timing=timing, aborted=aborted)
