"""Target stimulation patterns: spot grids, Siemens star, consistent test
problems, and grayscale image I/O.

Patterns are authored in a centered visual frame (origin at the grid
center). The Fourier constraint uses unshifted DFT frequency order, so
``to_fourier_order`` must be applied exactly once on ingestion; every other
module is layout-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .grid import GridSpec, RealGrid
from .projections import SlmConstraint
from .transform import FftProvider
from .grid import Field, SLM_PLANE

LOG_FLOOR = 1e-6


@dataclass(frozen=True)
class SpotSpec:
    """Bright discs on a dark background, centered visual frame."""

    spec: GridSpec
    centers: tuple[tuple[int, int], ...]
    radius: int = 1
    intensity: float = 1.0

    def __post_init__(self):
        for j, k in self.centers:
            if not (0 <= j < self.spec.n_x and 0 <= k < self.spec.n_y):
                raise ValueError(f"spot center ({j}, {k}) outside grid")
        if self.radius < 1:
            raise ValueError("spot radius must be >= 1 pixel")
        if self.intensity <= 0:
            raise ValueError("spot intensity must be positive")


@dataclass(frozen=True)
class StarSpec:
    """Siemens star resolution chart."""

    spec: GridSpec
    spokes: int = 32
    outer_radius: float | None = None

    def __post_init__(self):
        if self.spokes < 2 or self.spokes % 2 != 0:
            raise ValueError("spoke count must be even and >= 2")
        radius = self.outer_radius
        if radius is None:
            object.__setattr__(self, "outer_radius",
                               0.45 * min(self.spec.n_x, self.spec.n_y))
        elif radius > min(self.spec.n_x, self.spec.n_y) / 2 or radius <= 0:
            raise ValueError("outer radius must be positive and fit in the grid")


def spot_pattern(s: SpotSpec) -> RealGrid:
    """Binary-style intensity grid: ``intensity`` inside each disc, 0 outside."""
    out = np.zeros(s.spec.shape)
    cover = np.zeros(s.spec.shape, dtype=np.int32)
    kk, jj = np.mgrid[0:s.spec.n_y, 0:s.spec.n_x]
    for j, k in s.centers:
        disc = (jj - j) ** 2 + (kk - k) ** 2 < s.radius ** 2
        cover += disc
        out[disc] = s.intensity
    if np.any(cover > 1):
        raise ValueError("spot discs overlap")
    return RealGrid(s.spec, out)


def siemens_star(s: StarSpec) -> RealGrid:
    """Alternating angular sectors; pixel-center angle test about the grid center."""
    kk, jj = np.mgrid[0:s.spec.n_y, 0:s.spec.n_x]
    dx = jj + 0.5 - s.spec.n_x / 2.0
    dy = kk + 0.5 - s.spec.n_y / 2.0
    r = np.hypot(dx, dy)
    phi = np.mod(np.arctan2(dy, dx), 2 * np.pi)
    sector = np.floor(s.spokes * phi / (2 * np.pi)).astype(np.int64)
    lit = (sector % 2 == 0) & (r <= s.outer_radius) & (r >= 0.5)
    return RealGrid(s.spec, lit.astype(np.float64))


def consistent_target(c: SlmConstraint, seed: int, provider: FftProvider) -> RealGrid:
    """Target modulus with a guaranteed phase-only preimage.

    Draws seeded uniform random phases, forms w = p*exp(i*phi) in the SLM
    plane and returns m = |F(w)|, so the two constraint sets intersect at w.
    Output is already in DFT frequency order.
    """
    rng = np.random.default_rng(seed)
    phi = rng.uniform(0.0, 2 * np.pi, c.p.spec.shape)
    w = Field(c.p.spec, c.p.data * np.exp(1j * phi), SLM_PLANE)
    return RealGrid(c.p.spec, np.abs(provider.forward(w).data).astype(np.float64))


def to_fourier_order(g: RealGrid) -> RealGrid:
    """Map a centered visual-frame grid to unshifted DFT frequency order."""
    return RealGrid(g.spec, np.roll(g.data, (g.spec.n_y // 2, g.spec.n_x // 2),
                                    axis=(0, 1)))


def to_centered_order(g: RealGrid) -> RealGrid:
    """Inverse of to_fourier_order."""
    return RealGrid(g.spec, np.roll(g.data, (-(g.spec.n_y // 2), -(g.spec.n_x // 2)),
                                    axis=(0, 1)))


def modulus_from_intensity(intensity: RealGrid) -> RealGrid:
    """Amplitude target m = sqrt(I) for a target intensity image."""
    return RealGrid(intensity.spec, np.sqrt(intensity.data))


def load_target(path) -> RealGrid:
    """Load an 8- or 16-bit grayscale raster as intensities in [0, 1]."""
    with Image.open(path) as img:
        if img.mode == "L":
            data = np.asarray(img, dtype=np.float64) / 255.0
        elif img.mode in ("I;16", "I"):
            data = np.asarray(img, dtype=np.float64) / 65535.0
        else:
            raise ValueError(f"unsupported image mode {img.mode!r}; "
                             "expected 8- or 16-bit grayscale")
    spec = GridSpec(n_x=data.shape[1], n_y=data.shape[0])
    return RealGrid(spec, data)


def save_image(g: RealGrid, path, scale: str = "linear", bit_depth: int = 8) -> None:
    """Write a grayscale raster, peak-normalized; log scale clamps at 1e-6."""
    data = g.data
    peak = data.max()
    data = data / peak if peak > 0 else np.zeros_like(data)
    if scale == "log":
        data = (np.log10(np.maximum(data, LOG_FLOOR)) - np.log10(LOG_FLOOR)) / (-np.log10(LOG_FLOOR))
    elif scale != "linear":
        raise ValueError(f"unknown scale {scale!r}")
    if bit_depth == 8:
        img = Image.fromarray(np.round(data * 255.0).astype(np.uint8), mode="L")
    elif bit_depth == 16:
        img = Image.fromarray(np.round(data * 65535.0).astype(np.uint16))
    else:
        raise ValueError("bit depth must be 8 or 16")
    img.save(path)
