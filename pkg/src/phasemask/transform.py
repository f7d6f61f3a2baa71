"""Unitary 2D Fourier transforms behind a provider contract.

The provider applies the symmetric 1/sqrt(N) normalization in both
directions, so forward/inverse are unitary and Parseval holds exactly up to
roundoff. A naive O(N^2) matrix DFT is provided as an independent test
oracle.
"""

from __future__ import annotations

import numpy as np
import scipy.fft as _fft

from .grid import DOUBLE, FOURIER_PLANE, SLM_PLANE, Field, GridSpec, Precision

NAIVE_DFT_MAX_PIXELS = 4096


class PlanMismatchError(ValueError):
    """Field spec or plane does not match the provider's plan."""


class FftProvider:
    """FFT-backed unitary transform planned for one grid spec and precision.

    Immutable after construction; safe to share across workers. fft_workers
    only parallelizes the row batch of the 2D transform and does not change
    results bitwise.
    """

    def __init__(self, spec: GridSpec, precision: Precision = DOUBLE,
                 fft_workers: int = 1):
        self.spec = spec
        self.precision = precision
        self.fft_workers = fft_workers

    def _check(self, f: Field, expected_plane: str) -> np.ndarray:
        if f.spec != self.spec:
            raise PlanMismatchError(
                f"field spec {f.spec.n_x}x{f.spec.n_y} does not match plan "
                f"{self.spec.n_x}x{self.spec.n_y}")
        if f.domain_tag != expected_plane:
            raise PlanMismatchError(
                f"expected a {expected_plane} field, got {f.domain_tag}")
        return f.data.astype(self.precision.complex_dtype, copy=False)

    def forward(self, f: Field) -> Field:
        data = self._check(f, SLM_PLANE)
        out = _fft.fft2(data, norm="ortho", workers=self.fft_workers)
        return Field(self.spec, out, FOURIER_PLANE)

    def inverse(self, f: Field) -> Field:
        data = self._check(f, FOURIER_PLANE)
        out = _fft.ifft2(data, norm="ortho", workers=self.fft_workers)
        return Field(self.spec, out, SLM_PLANE)


def _dft_matrix(n: int, sign: float) -> np.ndarray:
    idx = np.arange(n)
    return np.exp(sign * 2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)


def naive_dft(f: Field, direction: str = "forward") -> Field:
    """Textbook double-sum unitary DFT; always double precision internally.

    Guarded to small grids: this is a correctness oracle, not a transform
    for production use.
    """
    if f.spec.n > NAIVE_DFT_MAX_PIXELS:
        raise ValueError(
            f"grid with {f.spec.n} pixels too large for the O(N^2) oracle "
            f"(limit {NAIVE_DFT_MAX_PIXELS})")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    sign = -1.0 if direction == "forward" else 1.0
    w_rows = _dft_matrix(f.spec.n_y, sign)
    w_cols = _dft_matrix(f.spec.n_x, sign)
    data = f.data.astype(np.complex128)
    out = w_rows @ data @ w_cols.T
    tag = FOURIER_PLANE if direction == "forward" else SLM_PLANE
    return Field(f.spec, out, tag)
