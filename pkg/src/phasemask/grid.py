"""Core grid containers and elementwise field arithmetic.

All pixel data is stored as 2D numpy arrays of shape ``(n_y, n_x)`` so that
C-order raveling gives the lexicographic flat index ``x = k * n_x + j`` for
column ``j`` and row ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backends import deterministic_sum

SLM_PLANE = "slm_plane"
FOURIER_PLANE = "fourier_plane"

# Scale factor for the treated-as-zero modulus threshold relative to the
# problem amplitude scale: ~1e-4*max(p) in single, ~1e-12*max(p) in double.
ZERO_TOL_SCALE = 1024.0


@dataclass(frozen=True)
class Precision:
    """Floating-point parameterization of the whole pipeline."""

    tag: str
    float_dtype: np.dtype
    complex_dtype: np.dtype
    eps_machine: float

    def zero_tol(self, amplitude_scale: float) -> float:
        return ZERO_TOL_SCALE * self.eps_machine * float(amplitude_scale)

    @staticmethod
    def from_tag(tag: str) -> "Precision":
        if tag == "single":
            return SINGLE
        if tag == "double":
            return DOUBLE
        raise ValueError(f"unknown precision tag: {tag!r}")


SINGLE = Precision("single", np.dtype(np.float32), np.dtype(np.complex64),
                   float(np.finfo(np.float32).eps))
DOUBLE = Precision("double", np.dtype(np.float64), np.dtype(np.complex128),
                   float(np.finfo(np.float64).eps))


@dataclass(frozen=True)
class GridSpec:
    """Pixel layout of the SLM / Fourier plane.

    L_x and L_y are physical dimensions carried as metadata only; no
    computation uses them.
    """

    n_x: int
    n_y: int
    L_x: float | None = None
    L_y: float | None = None

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("grid must have at least one pixel per axis")

    @property
    def n(self) -> int:
        return self.n_x * self.n_y

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_y, self.n_x)

    def flatten_index(self, j: int, k: int) -> int:
        if not (0 <= j < self.n_x and 0 <= k < self.n_y):
            raise IndexError(f"pixel ({j}, {k}) outside {self.n_x}x{self.n_y} grid")
        return k * self.n_x + j

    def unflatten_index(self, x: int) -> tuple[int, int]:
        if not 0 <= x < self.n:
            raise IndexError(f"flat index {x} outside [0, {self.n})")
        return x % self.n_x, x // self.n_x


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Field:
    """Complex-valued wavefront on a grid, tagged with the plane it lives in."""

    spec: GridSpec
    data: np.ndarray
    domain_tag: str = SLM_PLANE

    def __post_init__(self):
        data = np.ascontiguousarray(self.data)
        if not np.issubdtype(data.dtype, np.complexfloating):
            data = data.astype(np.complex128)
        if data.shape != self.spec.shape:
            raise ValueError(f"data shape {data.shape} != grid shape {self.spec.shape}")
        if self.domain_tag not in (SLM_PLANE, FOURIER_PLANE):
            raise ValueError(f"unknown domain tag: {self.domain_tag!r}")
        if not np.all(np.isfinite(data.view(np.float64 if data.dtype == np.complex128 else np.float32))):
            raise ValueError("field contains non-finite entries")
        object.__setattr__(self, "data", _freeze(data))

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype


@dataclass(frozen=True)
class RealGrid:
    """Nonnegative real grid: SLM amplitudes p or target moduli/intensities m."""

    spec: GridSpec
    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data)
        if np.issubdtype(data.dtype, np.integer):
            data = data.astype(np.float64)
        if data.shape != self.spec.shape:
            raise ValueError(f"data shape {data.shape} != grid shape {self.spec.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("grid contains non-finite entries")
        if np.any(data < 0):
            raise ValueError("grid contains negative entries")
        object.__setattr__(self, "data", _freeze(data))


@dataclass(frozen=True)
class PhaseMask:
    """Per-pixel phase angles in [0, 2*pi); the deliverable."""

    spec: GridSpec
    phases: np.ndarray

    def __post_init__(self):
        phases = np.ascontiguousarray(self.phases)
        if phases.shape != self.spec.shape:
            raise ValueError(f"phase shape {phases.shape} != grid shape {self.spec.shape}")
        if np.any(phases < 0) or np.any(phases >= 2 * np.pi):
            raise ValueError("phases must lie in [0, 2*pi)")
        object.__setattr__(self, "phases", _freeze(phases))

    def to_uint8(self) -> np.ndarray:
        """Linear 8-bit SLM encoding: 0 -> 0, 255 -> 2*pi*255/256."""
        return np.round(self.phases / (2 * np.pi) * 256.0).astype(np.int64).clip(0, 255).astype(np.uint8)

    @staticmethod
    def from_uint8(spec: GridSpec, levels: np.ndarray) -> "PhaseMask":
        return PhaseMask(spec, levels.astype(np.float64) * (2 * np.pi / 256.0))


def norm2(f: Field | np.ndarray) -> float:
    """Euclidean norm sqrt(sum |f_jk|^2), fixed deterministic reduction order."""
    data = f.data if isinstance(f, Field) else f
    mags = np.abs(data.ravel()).astype(np.float64)
    return float(np.sqrt(deterministic_sum(mags * mags)))


def phases_of(f: Field, zero_tol: float = 0.0) -> PhaseMask:
    """Extract arg(f) wrapped to [0, 2*pi); moduli below zero_tol get phase 0."""
    theta = np.angle(f.data.astype(np.complex128))
    theta = np.mod(theta, 2 * np.pi)
    # mod can return 2*pi for tiny negative angles
    theta[theta >= 2 * np.pi] = 0.0
    if zero_tol > 0:
        theta[np.abs(f.data) < zero_tol] = 0.0
    return PhaseMask(f.spec, theta)


def field_from_polar(spec: GridSpec, amplitudes: np.ndarray, phases: np.ndarray,
                     domain_tag: str = SLM_PLANE,
                     precision: Precision = DOUBLE) -> Field:
    data = (amplitudes * np.exp(1j * phases)).astype(precision.complex_dtype)
    return Field(spec, data, domain_tag)
