"""Convergence diagnostics: constraint gap, physically motivated error, and
lit/dark contrast.

All reductions go through the fixed-tree deterministic sum so recorded
curves are bitwise reproducible across execution strategies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backends import BackendSelector, deterministic_sum
from .grid import Field, RealGrid, norm2
from .projections import (FourierConstraint, SlmConstraint, project_fourier,
                          project_slm)
from .transform import FftProvider

_SERIAL = BackendSelector()

# A pixel exactly at tolerance does not count as a violation.
DEFAULT_T_LIT = 0.1
DEFAULT_T_DARK = 3e-4

UNBOUNDED_CONTRAST = math.inf


@dataclass(frozen=True)
class ErrorTolerances:
    """Relative tolerance for lit pixels, absolute intensity tolerance for dark."""

    t_lit: float = DEFAULT_T_LIT
    t_dark: float = DEFAULT_T_DARK

    def __post_init__(self):
        if self.t_lit <= 0 or self.t_dark <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class ConvergenceRecord:
    """One recorded iteration of the solver."""

    iter: int
    gap: float
    err_lit: float
    err_dark: float
    time_fft_ms: float = 0.0
    time_constraint_ms: float = 0.0
    time_total_ms: float = 0.0

    HEADER = "iter\tgap\terr_lit\terr_dark\ttime_fft_ms\ttime_constraint_ms\ttime_total_ms"

    def to_line(self) -> str:
        return (f"{self.iter}\t{self.gap:.17g}\t{self.err_lit:.17g}\t"
                f"{self.err_dark:.17g}\t{self.time_fft_ms:.6g}\t"
                f"{self.time_constraint_ms:.6g}\t{self.time_total_ms:.6g}")

    @staticmethod
    def from_line(line: str) -> "ConvergenceRecord":
        parts = line.split("\t")
        return ConvergenceRecord(int(parts[0]), *(float(v) for v in parts[1:7]))


def gap(u: Field, c: SlmConstraint, m: FourierConstraint, provider: FftProvider,
        sel: BackendSelector = _SERIAL) -> float:
    """Euclidean distance between the two projections of the current iterate."""
    diff = project_slm(u, c, sel).data - project_fourier(u, m, provider, sel).data
    return norm2(diff)


def reconstructed_intensity(u: Field, provider: FftProvider,
                            target_energy: float | None = None) -> RealGrid:
    """|F(u)|^2 rescaled so total reconstructed energy matches the target.

    target_energy is sum(m^2) = sum of the target intensity; when omitted the
    raw |F(u)|^2 is returned unscaled.
    """
    amps = np.abs(provider.forward(u).data).astype(np.float64)
    intensity = amps * amps
    if target_energy is not None:
        total = deterministic_sum(intensity)
        if total == 0:
            raise ValueError("reconstruction carries no energy")
        intensity = intensity * (target_energy / total)
    return RealGrid(u.spec, intensity)


def physical_error(intensity: RealGrid, target_intensity: RealGrid,
                   tol: ErrorTolerances = ErrorTolerances()) -> tuple[float, float]:
    """Summed tolerance violations over lit and dark pixels.

    Lit pixels (target > 0) accumulate (t_d*|m-u|/(t_l*m) - t_d) where the
    relative intensity deviation exceeds t_l; dark pixels accumulate (u - t_d)
    where the absolute intensity exceeds t_d. Exactly-at-tolerance pixels do
    not count.
    """
    if intensity.spec != target_intensity.spec:
        raise ValueError("intensity grids live on different specs")
    u = intensity.data
    m = target_intensity.data
    lit = m > 0

    dev = np.abs(m - u)
    rel = np.where(lit, dev / np.where(lit, m, 1.0), 0.0)
    lit_terms = np.where(lit & (rel > tol.t_lit),
                         tol.t_dark * dev / (tol.t_lit * np.where(lit, m, 1.0)) - tol.t_dark,
                         0.0)
    dark_terms = np.where(~lit & (u > tol.t_dark), u - tol.t_dark, 0.0)
    return deterministic_sum(lit_terms), deterministic_sum(dark_terms)


def contrast_ratio(intensity: RealGrid, target_intensity: RealGrid) -> float:
    """Median lit intensity over median dark intensity.

    Medians rather than means: single hot dark pixels must not dominate.
    Returns inf when the dark median is exactly zero.
    """
    lit = target_intensity.data > 0
    if not lit.any() or lit.all():
        raise ValueError("contrast needs at least one lit and one dark pixel")
    lit_median = float(np.median(intensity.data[lit]))
    dark_median = float(np.median(intensity.data[~lit]))
    if dark_median == 0.0:
        return UNBOUNDED_CONTRAST
    return lit_median / dark_median


def records_to_text(records) -> str:
    lines = [ConvergenceRecord.HEADER]
    lines.extend(r.to_line() for r in records)
    return "\n".join(lines) + "\n"


def records_from_text(text: str) -> list[ConvergenceRecord]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    return [ConvergenceRecord.from_line(ln) for ln in lines[1:]]
