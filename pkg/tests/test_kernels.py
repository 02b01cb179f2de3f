"""Backend dispatch and numba/numpy kernel equivalence."""

import numpy as np
import pytest

from lsfp import kernels
from lsfp.kernels import backend_name, get_backend


def _random_inputs(rng, B=7, L=2, K=3, M=4):
    z = rng.standard_normal((B, L, K, M)) + 1j * rng.standard_normal((B, L, K, M))
    g = rng.standard_normal((B, L, K, L, M)) + 1j * rng.standard_normal(
        (B, L, K, L, M)
    )
    a = rng.standard_normal((L, K, L)) + 1j * rng.standard_normal((L, K, L))
    return z, g, a


def test_backend_selection(monkeypatch):
    monkeypatch.setenv("LSFP_BACKEND", "numpy")
    assert backend_name() == "numpy"
    monkeypatch.setenv("LSFP_BACKEND", "auto")
    assert backend_name() in ("numba", "numpy")
    monkeypatch.setenv("LSFP_BACKEND", "nope")
    with pytest.raises(ValueError):
        backend_name()


@pytest.mark.skipif("numba" not in kernels._BACKENDS, reason="numba unavailable")
def test_backends_agree():
    rng = np.random.default_rng(42)
    z, g, a = _random_inputs(rng)
    nb = get_backend("numba")
    npk = get_backend("numpy")

    ip_nb = nb.inner_products(z, g)
    ip_np = npk.inner_products(z, g)
    np.testing.assert_allclose(ip_nb, ip_np, rtol=1e-13)

    B, L, K, M = z.shape
    psi_nb = np.zeros((L, K, M, M), dtype=complex)
    psi_np = np.zeros((L, K, M, M), dtype=complex)
    nb.accumulate_psi(z, psi_nb)
    npk.accumulate_psi(z, psi_np)
    np.testing.assert_allclose(psi_nb, psi_np, rtol=1e-13)

    b_nb = np.zeros((L, K, L), dtype=complex)
    b_np = np.zeros((L, K, L), dtype=complex)
    c_nb = np.zeros((L, K, K, L, L), dtype=complex)
    c_np = np.zeros((L, K, K, L, L), dtype=complex)
    nb.accumulate_moments(ip_nb, b_nb, c_nb)
    npk.accumulate_moments(ip_np, b_np, c_np)
    np.testing.assert_allclose(b_nb, b_np, rtol=1e-13)
    np.testing.assert_allclose(c_nb, c_np, rtol=1e-13)

    w_nb = nb.apply_weights(ip_nb, a)
    w_np = npk.apply_weights(ip_np, a)
    np.testing.assert_allclose(w_nb, w_np, rtol=1e-13)

    h_nb = np.zeros((L, K), dtype=complex)
    h_np = np.zeros((L, K), dtype=complex)
    p_nb = np.zeros((L, K, L, K))
    p_np = np.zeros((L, K, L, K))
    nb.accumulate_sinr_terms(w_nb, h_nb, p_nb)
    npk.accumulate_sinr_terms(w_np, h_np, p_np)
    np.testing.assert_allclose(h_nb, h_np, rtol=1e-13)
    np.testing.assert_allclose(p_nb, p_np, rtol=1e-13)


def test_numpy_kernels_against_direct_formulas():
    # reference implementations written as plain loops
    rng = np.random.default_rng(9)
    z, g, a = _random_inputs(rng, B=3, L=2, K=2, M=3)
    k = get_backend("numpy")
    ip = k.inner_products(z, g)
    B, L, K, M = z.shape
    for b in range(B):
        for l in range(L):
            for kk in range(K):
                for r in range(L):
                    for q in range(K):
                        expected = np.vdot(z[b, r, q], g[b, l, kk, r])
                        assert ip[b, l, kk, r, q] == pytest.approx(expected,
                                                                   rel=1e-12)
    w = k.apply_weights(ip, a)
    for b in range(B):
        for l in range(L):
            for kk in range(K):
                for r in range(L):
                    for q in range(K):
                        expected = sum(
                            np.conj(a[r, q, n]) * ip[b, l, kk, n, q]
                            for n in range(L)
                        )
                        assert w[b, l, kk, r, q] == pytest.approx(expected,
                                                                  rel=1e-12)
