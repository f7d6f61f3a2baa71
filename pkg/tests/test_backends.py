import numpy as np
import pytest

from phasemask.backends import (BackendSelector, deterministic_sum, map_pixels,
                                reduce_pixels)


class TestBackendSelector:
    def test_parse_serial(self):
        sel = BackendSelector.parse("serial")
        assert sel.strategy == "serial"
        assert sel.fft_workers == 1

    def test_parse_threaded_with_count(self):
        sel = BackendSelector.parse("threaded:6")
        assert sel.strategy == "threaded"
        assert sel.workers == 6
        assert sel.fft_workers == 6

    def test_rejects_unknown(self):
        with pytest.raises(ValueError):
            BackendSelector.parse("cuda")
        with pytest.raises(ValueError):
            BackendSelector(strategy="threaded", workers=0)


class TestMapPixels:
    def test_identity_kernel(self, rng):
        a = rng.standard_normal((64, 64))
        out = map_pixels(lambda x: x, (a,), BackendSelector(), a.dtype)
        np.testing.assert_array_equal(out, a)

    def test_matches_direct_elementwise(self, rng):
        u = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
        p = rng.uniform(0.1, 2.0, (64, 64))

        def kernel(uu, pp):
            mag = np.abs(uu)
            safe = np.where(mag == 0, 1, mag)
            return np.where(mag >= 1e-12, pp * (uu / safe), pp.astype(uu.dtype))

        direct = kernel(u.ravel(), p.ravel()).reshape(64, 64)
        via = map_pixels(kernel, (u, p), BackendSelector(), u.dtype)
        np.testing.assert_array_equal(direct, via)

    def test_threaded_bitwise_equal(self, rng):
        u = rng.standard_normal((256, 256)) + 1j * rng.standard_normal((256, 256))
        m = rng.uniform(0, 2, (256, 256))

        def kernel(uu, mm):
            mag = np.abs(uu)
            safe = np.where(mag == 0, 1, mag)
            return np.where(mag >= 1e-10, mm * (uu / safe), mm.astype(uu.dtype))

        serial = map_pixels(kernel, (u, m), BackendSelector("serial"), u.dtype)
        for workers in (2, 3, 8):
            threaded = map_pixels(kernel, (u, m),
                                  BackendSelector("threaded", workers), u.dtype)
            np.testing.assert_array_equal(serial, threaded)

    def test_spec_mismatch(self, rng):
        with pytest.raises(ValueError):
            map_pixels(lambda a, b: a + b,
                       (np.zeros(16), np.zeros(9)), BackendSelector(), np.float64)


class TestReductions:
    def test_all_ones(self):
        assert reduce_pixels(np.sum, np.ones((16, 16)), BackendSelector()) == 256.0

    def test_integer_exactness(self):
        data = np.arange(100000, dtype=np.float64)
        assert reduce_pixels(np.sum, data, BackendSelector()) == float(data.sum())

    def test_threaded_bitwise_equal(self, rng):
        data = rng.standard_normal(1 << 18)
        serial = reduce_pixels(np.sum, data, BackendSelector("serial"))
        for workers in (2, 8):
            threaded = reduce_pixels(np.sum, data, BackendSelector("threaded", workers))
            assert serial == threaded  # identical tree, bitwise equal

    def test_deterministic_sum_matches_reduce(self, rng):
        data = rng.standard_normal(1 << 16)
        assert deterministic_sum(data) == reduce_pixels(np.sum, data, BackendSelector())

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            deterministic_sum(np.zeros(0))
