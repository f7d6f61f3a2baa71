"""Phase-mask synthesis for spatial light modulators by alternating
projections, with convergence metrics, benchmarking, a CLI and a live
HTTP service."""

__version__ = "0.1.0"

from .backends import BackendSelector
from .grid import (DOUBLE, SINGLE, Field, GridSpec, PhaseMask, Precision,
                   RealGrid, norm2, phases_of)
from .metrics import ConvergenceRecord, ErrorTolerances
from .projections import FourierConstraint, SlmConstraint
from .solver import SolveConfig, SolveResult, default_amplitude, solve
from .transform import FftProvider, naive_dft

__all__ = [
    "BackendSelector", "ConvergenceRecord", "DOUBLE", "ErrorTolerances",
    "FftProvider", "Field", "FourierConstraint", "GridSpec", "PhaseMask",
    "Precision", "RealGrid", "SINGLE", "SlmConstraint", "SolveConfig",
    "SolveResult", "default_amplitude", "naive_dft", "norm2", "phases_of",
    "solve",
]
