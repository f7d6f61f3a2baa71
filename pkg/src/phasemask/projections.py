"""Projections onto the SLM amplitude set and the Fourier modulus set.

Both projections rescale each pixel to the prescribed modulus while keeping
its phase. Pixels with modulus below the precision-dependent zero threshold
take phase 0 -- the multi-valued projection admits any phase there, and a
fixed choice makes the whole iteration a deterministic function.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backends import BackendSelector, map_pixels
from .grid import DOUBLE, FOURIER_PLANE, SLM_PLANE, Field, Precision, RealGrid
from .transform import FftProvider

_SERIAL = BackendSelector()


@dataclass(frozen=True)
class SlmConstraint:
    """The set of wavefronts whose pixel moduli equal the laser amplitudes p."""

    p: RealGrid
    precision: Precision = DOUBLE

    @property
    def zero_tol(self) -> float:
        return self.precision.zero_tol(float(self.p.data.max(initial=0.0)))


@dataclass(frozen=True)
class FourierConstraint:
    """The set of wavefronts whose Fourier moduli equal the target pattern m."""

    m: RealGrid
    precision: Precision = DOUBLE

    @property
    def zero_tol(self) -> float:
        return self.precision.zero_tol(float(self.m.data.max(initial=0.0)))


def _modulus_replace_kernel(zero_tol: float, cdtype: np.dtype):
    """Per-pixel kernel: rescale to target modulus, phase 0 on the zero branch."""

    def kernel(u: np.ndarray, target: np.ndarray) -> np.ndarray:
        mag = np.abs(u)
        safe = np.where(mag == 0, 1, mag)
        rescaled = target * (u / safe)
        return np.where(mag >= zero_tol, rescaled, target.astype(cdtype)).astype(cdtype)

    return kernel


def _replace_modulus(f: Field, target: RealGrid, zero_tol: float,
                     precision: Precision, sel: BackendSelector) -> np.ndarray:
    if f.spec != target.spec:
        raise ValueError("field and constraint live on different grids")
    cdtype = precision.complex_dtype
    u = f.data.astype(cdtype, copy=False)
    t = target.data.astype(precision.float_dtype, copy=False)
    kernel = _modulus_replace_kernel(zero_tol, cdtype)
    return map_pixels(kernel, (u, t), sel, out_dtype=cdtype)


def project_slm(u: Field, c: SlmConstraint, sel: BackendSelector = _SERIAL) -> Field:
    """Nearest point in the SLM amplitude set: |out_jk| = p_jk, phase kept."""
    if u.domain_tag != SLM_PLANE:
        raise ValueError("project_slm expects an SLM-plane field")
    out = _replace_modulus(u, c.p, c.zero_tol, c.precision, sel)
    return Field(u.spec, out, SLM_PLANE)


def project_modulus(uhat: Field, c: FourierConstraint,
                    sel: BackendSelector = _SERIAL) -> Field:
    """Fourier-domain half of P_M: |out_jk| = m_jk, phase kept. No transform."""
    if uhat.domain_tag != FOURIER_PLANE:
        raise ValueError("project_modulus expects a Fourier-plane field")
    out = _replace_modulus(uhat, c.m, c.zero_tol, c.precision, sel)
    return Field(uhat.spec, out, FOURIER_PLANE)


def project_fourier(u: Field, c: FourierConstraint, provider: FftProvider,
                    sel: BackendSelector = _SERIAL) -> Field:
    """Nearest point in the Fourier modulus set: F^-1(modulus-replace(F(u)))."""
    if u.domain_tag != SLM_PLANE:
        raise ValueError("project_fourier expects an SLM-plane field")
    return provider.inverse(project_modulus(provider.forward(u), c, sel))
