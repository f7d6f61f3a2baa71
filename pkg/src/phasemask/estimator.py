"""Scikit-learn style front end: target intensity images in, phase masks out.

The transformer wraps the alternating-projections solver so mask synthesis
composes with sklearn pipelines and parameter search. Images are accepted
in the centered visual frame; the DFT-order shift is applied internally.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .backends import BackendSelector
from .grid import GridSpec, Precision, RealGrid
from .patterns import modulus_from_intensity, to_fourier_order
from .projections import FourierConstraint, SlmConstraint
from .solver import SolveConfig, SolveResult, default_amplitude, solve
from .transform import FftProvider


def check_target_image(X) -> np.ndarray:
    """Validate a single target intensity image: 2D, finite, nonnegative."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2D intensity image, got ndim={X.ndim}")
    if not np.all(np.isfinite(X)):
        raise ValueError("target contains non-finite values")
    if np.any(X < 0):
        raise ValueError("target intensities must be nonnegative")
    if X.max() == 0:
        raise ValueError("target is all dark")
    return X


class PhaseMaskTransformer(BaseEstimator, TransformerMixin):
    """Compute SLM phase masks from target intensity images.

    Parameters mirror the solver configuration; get_params/set_params work
    as usual. fit solves the given target and exposes the mask and the full
    convergence history as fitted attributes; transform maps a batch of
    targets to phase-angle arrays.
    """

    def __init__(self, iters: int = 25, precision: str = "double",
                 strategy: str = "serial", record_every: int = 1,
                 early_stop_tol: float | None = None,
                 random_phase_init: bool = False, seed: int = 0):
        self.iters = iters
        self.precision = precision
        self.strategy = strategy
        self.record_every = record_every
        self.early_stop_tol = early_stop_tol
        self.random_phase_init = random_phase_init
        self.seed = seed

    def _config(self) -> SolveConfig:
        return SolveConfig(
            max_iters=self.iters,
            precision=Precision.from_tag(self.precision),
            record_every=self.record_every,
            early_stop_tol=self.early_stop_tol,
            backend=BackendSelector.parse(self.strategy),
            random_phase_init=self.random_phase_init,
            seed=self.seed,
        )

    def _solve_one(self, image: np.ndarray) -> SolveResult:
        cfg = self._config()
        spec = GridSpec(n_x=image.shape[1], n_y=image.shape[0])
        target = to_fourier_order(RealGrid(spec, image))
        m = FourierConstraint(modulus_from_intensity(target), cfg.precision)
        c = SlmConstraint(default_amplitude(m.m, cfg.precision), cfg.precision)
        provider = FftProvider(spec, cfg.precision, cfg.backend.fft_workers)
        return solve(c, m, cfg, provider)

    def fit(self, X, y=None):
        image = check_target_image(X)
        result = self._solve_one(image)
        self.result_ = result
        self.mask_ = result.mask
        self.history_ = result.history
        self.n_features_in_ = image.size
        return self

    def transform(self, X):
        """Map targets to phase masks; accepts one 2D image or a 3D stack."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 2:
            return self._solve_one(check_target_image(X)).mask.phases
        if X.ndim == 3:
            return np.stack([self._solve_one(check_target_image(img)).mask.phases
                             for img in X])
        raise ValueError(f"expected a 2D image or 3D stack, got ndim={X.ndim}")
