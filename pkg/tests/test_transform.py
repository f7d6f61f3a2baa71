import numpy as np
import pytest

from phasemask.grid import (DOUBLE, FOURIER_PLANE, SINGLE, SLM_PLANE, Field,
                            GridSpec, norm2)
from phasemask.transform import FftProvider, PlanMismatchError, naive_dft

from conftest import random_field

EPS = np.finfo(float).eps


class TestNaiveDft:
    def test_delta_to_constant(self):
        spec = GridSpec(4, 4)
        data = np.zeros(spec.shape, dtype=complex)
        data[0, 0] = 1.0
        out = naive_dft(Field(spec, data))
        np.testing.assert_allclose(out.data, np.full(spec.shape, 0.25), atol=1e-14)

    def test_linearity(self, rng):
        spec = GridSpec(8, 8)
        f = random_field(spec, rng)
        g = random_field(spec, rng)
        a, b = 0.7 - 0.2j, -1.3 + 0.5j
        combo = Field(spec, a * f.data + b * g.data)
        lhs = naive_dft(combo).data
        rhs = a * naive_dft(f).data + b * naive_dft(g).data
        assert np.abs(lhs - rhs).max() < 1e-12

    def test_parseval(self, rng):
        f = random_field(GridSpec(8, 8), rng)
        assert norm2(naive_dft(f)) == pytest.approx(norm2(f), rel=1e-12)

    def test_size_guard(self):
        spec = GridSpec(128, 128)
        f = Field(spec, np.zeros(spec.shape, dtype=complex))
        with pytest.raises(ValueError, match="too large"):
            naive_dft(f)


class TestFftProvider:
    def test_delta_forward(self):
        spec = GridSpec(4, 4)
        data = np.zeros(spec.shape, dtype=complex)
        data[0, 0] = 1.0
        out = FftProvider(spec).forward(Field(spec, data))
        assert out.domain_tag == FOURIER_PLANE
        np.testing.assert_allclose(out.data, np.full(spec.shape, 0.25), atol=1e-15)

    def test_constant_forward(self):
        n = 8
        spec = GridSpec(n, n)
        c = 0.3 - 1.1j
        out = FftProvider(spec).forward(Field(spec, np.full(spec.shape, c)))
        assert out.data[0, 0] == pytest.approx(c * n, rel=1e-14)
        off = out.data.copy()
        off[0, 0] = 0
        assert np.abs(off).max() < 1e-13

    def test_constant_inverse(self):
        spec = GridSpec(8, 8)
        c = 1.5 + 0.5j
        out = FftProvider(spec).inverse(
            Field(spec, np.full(spec.shape, c), FOURIER_PLANE))
        assert out.data[0, 0] == pytest.approx(c * 8, rel=1e-14)

    def test_matches_naive_oracle(self, rng):
        spec = GridSpec(8, 8)
        provider = FftProvider(spec)
        f = random_field(spec, rng)
        assert np.abs(provider.forward(f).data - naive_dft(f).data).max() < 1e-12
        g = random_field(spec, rng, domain=FOURIER_PLANE)
        assert np.abs(provider.inverse(g).data
                      - naive_dft(Field(spec, g.data, SLM_PLANE), "inverse").data).max() < 1e-12

    def test_round_trip(self, rng):
        spec = GridSpec(16, 16)
        provider = FftProvider(spec)
        f = random_field(spec, rng)
        back = provider.inverse(provider.forward(f))
        assert norm2(Field(spec, back.data - f.data)) <= 16 * EPS * norm2(f)

    @pytest.mark.parametrize("n", [8, 64, 256])
    def test_unitarity(self, n, rng):
        spec = GridSpec(n, n)
        provider = FftProvider(spec)
        f = random_field(spec, rng)
        ratio = norm2(provider.forward(f)) / norm2(f)
        assert abs(ratio - 1) <= 16 * EPS

    def test_single_precision_oracle(self, rng):
        spec = GridSpec(64, 64)
        provider = FftProvider(spec, SINGLE)
        f = random_field(spec, rng, dtype=np.complex64)
        out = provider.forward(f)
        assert out.dtype == np.complex64
        # small grids only for the O(N^2) oracle
        small = GridSpec(16, 16)
        fs = random_field(small, rng, dtype=np.complex64)
        diff = FftProvider(small, SINGLE).forward(fs).data - naive_dft(fs).data.astype(np.complex64)
        assert np.abs(diff).max() <= 1e-4

    def test_plan_reuse_is_bitwise(self, rng):
        spec = GridSpec(32, 32)
        provider = FftProvider(spec)
        f = random_field(spec, rng)
        a = provider.forward(f).data
        b = provider.forward(f).data
        np.testing.assert_array_equal(a, b)

    def test_spec_mismatch_raises(self, rng):
        provider = FftProvider(GridSpec(8, 8))
        f = random_field(GridSpec(4, 4), rng)
        with pytest.raises(PlanMismatchError):
            provider.forward(f)

    def test_plane_mismatch_raises(self, rng):
        spec = GridSpec(8, 8)
        provider = FftProvider(spec)
        f = random_field(spec, rng, domain=FOURIER_PLANE)
        with pytest.raises(PlanMismatchError):
            provider.forward(f)
