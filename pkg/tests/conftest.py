import numpy as np
import pytest

from phasemask.bench import spot_grid_centers
from phasemask.grid import DOUBLE, Field, GridSpec, RealGrid, SLM_PLANE
from phasemask.patterns import (SpotSpec, modulus_from_intensity, spot_pattern,
                                to_fourier_order)
from phasemask.projections import FourierConstraint, SlmConstraint
from phasemask.solver import default_amplitude


def random_field(spec, rng, domain=SLM_PLANE, dtype=np.complex128):
    data = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    return Field(spec, data.astype(dtype), domain)


def spot_problem(n, precision=DOUBLE, cols=3, rows=3):
    """Standard fixture: 3x3 spot lattice on an n x n grid, energy-matched p."""
    spec = GridSpec(n, n)
    intensity = spot_pattern(SpotSpec(spec, spot_grid_centers(spec, cols, rows)))
    target = modulus_from_intensity(to_fourier_order(intensity))
    m = FourierConstraint(target, precision)
    c = SlmConstraint(default_amplitude(m.m, precision), precision)
    return spec, c, m, intensity


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
