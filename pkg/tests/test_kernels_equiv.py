"""Cross-check the compiled kernels against the pure-Python reference."""

import numpy as np
import pytest

from polarkit import _kernels_py as kpy
from polarkit import kernels

try:
    from polarkit import _kernels_c as kc
except ImportError:
    kc = None

needs_native = pytest.mark.skipif(kc is None, reason="compiled kernels unavailable")


def test_selected_backend_reported():
    assert kernels.BACKEND in ("native", "python")


@needs_native
def test_encode_equivalence(rng):
    for n in range(0, 9):
        N = 1 << n
        for _ in range(10):
            u = rng.integers(0, 2, N).astype(np.uint8)
            assert np.array_equal(kc.polar_encode(u), kpy.polar_encode(u))


@needs_native
def test_sc_and_scl_equivalence(rng):
    for _ in range(150):
        n = int(rng.integers(1, 7))
        N = 1 << n
        K = int(rng.integers(1, N + 1))
        frozen = np.ones(N, np.uint8)
        frozen[rng.choice(N, K, replace=False)] = 0
        llr = rng.normal(0.5, 3.0, N)
        ref_u = np.zeros(N, np.uint8)
        assert np.array_equal(kc.sc_decode(llr, frozen), kpy.sc_decode(llr, frozen))
        for L in (1, 2, 4, 8):
            pc, mc, bc, rc, fc = kc.scl_decode(llr, frozen, L, ref_u)
            pp, mp, bp, rp, fp = kpy.scl_decode(llr, frozen, L, ref_u)
            assert np.array_equal(pc, pp)
            assert np.array_equal(mc, mp)  # bit-exact: same libm scalar math
            assert bc == bp and fc == fp
            assert np.array_equal(rc, rp)


@needs_native
def test_weight_spectrum_equivalence(rng):
    for _ in range(10):
        K = int(rng.integers(1, 10))
        N = int(1 << rng.integers(3, 6))
        rows = rng.integers(0, 2, (K, N)).astype(np.uint8)
        assert np.array_equal(kc.weight_spectrum(rows), kpy.weight_spectrum(rows))


@needs_native
def test_backends_reject_frozen_reference_mismatch():
    frozen = np.array([1, 0], np.uint8)
    bad_ref = np.array([1, 0], np.uint8)  # sets the frozen bit to 1
    for mod in (kc, kpy):
        with pytest.raises(ValueError):
            mod.scl_decode(np.ones(2), frozen, 2, bad_ref)


@needs_native
def test_native_is_faster_smoke(rng):
    # one-rep sanity run of the benchmark comparison path
    import time

    N, K, L = 256, 128, 4
    frozen = np.ones(N, np.uint8)
    frozen[rng.choice(N, K, replace=False)] = 0
    llr = rng.normal(2.0, 2.0, N)
    t0 = time.perf_counter()
    kc.scl_decode(llr, frozen, L, None)
    t_native = time.perf_counter() - t0
    t0 = time.perf_counter()
    kpy.scl_decode(llr, frozen, L, None)
    t_python = time.perf_counter() - t0
    # the compiled path must not be dramatically slower; normally it is
    # one to two orders of magnitude faster
    assert t_native < t_python * 2
