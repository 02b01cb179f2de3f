"""Numba-jitted Monte Carlo hot kernels (same contracts as _kernels_numpy)."""

import numpy as np
from numba import njit, prange


@njit(parallel=True, fastmath=False, cache=True)
def _inner_products(zc, g, out):
    B, L, K, _, M = g.shape
    for b in prange(B):
        for l in range(L):
            for k in range(K):
                for r in range(L):
                    for q in range(K):
                        acc = 0.0 + 0.0j
                        for m in range(M):
                            acc += zc[b, r, q, m] * g[b, l, k, r, m]
                        out[b, l, k, r, q] = acc


def inner_products(z, g):
    out = np.empty(g.shape[:4] + (z.shape[2],), dtype=np.complex128)
    _inner_products(np.ascontiguousarray(np.conj(z)), np.ascontiguousarray(g), out)
    return out


@njit(cache=True)
def _accumulate_psi(z, psi_sum):
    B, L, K, M = z.shape
    for b in range(B):
        for l in range(L):
            for k in range(K):
                for m in range(M):
                    zm = z[b, l, k, m]
                    for n in range(M):
                        psi_sum[l, k, m, n] += zm * np.conj(z[b, l, k, n])


def accumulate_psi(z, psi_sum):
    _accumulate_psi(np.ascontiguousarray(z), psi_sum)


@njit(cache=True)
def _accumulate_moments(ip2, b_sum, c_sum):
    B, L, K, _, _ = ip2.shape
    for b in range(B):
        for l in range(L):
            for k in range(K):
                for r in range(L):
                    b_sum[l, k, r] += ip2[b, l, k, r, k]
                for q in range(K):
                    for r in range(L):
                        v = ip2[b, l, k, r, q]
                        for n in range(L):
                            c_sum[l, k, q, r, n] += v * np.conj(ip2[b, l, k, n, q])


def accumulate_moments(ip2, b_sum, c_sum):
    _accumulate_moments(np.ascontiguousarray(ip2), b_sum, c_sum)


@njit(parallel=True, cache=True)
def _apply_weights(ip2, ac, out):
    B, L, K, _, _ = ip2.shape
    for b in prange(B):
        for l in range(L):
            for k in range(K):
                for r in range(L):
                    for q in range(K):
                        acc = 0.0 + 0.0j
                        for n in range(L):
                            acc += ac[r, q, n] * ip2[b, l, k, n, q]
                        out[b, l, k, r, q] = acc


def apply_weights(ip2, a):
    out = np.empty_like(ip2)
    _apply_weights(np.ascontiguousarray(ip2), np.ascontiguousarray(np.conj(a)), out)
    return out


@njit(cache=True)
def _accumulate_sinr_terms(w, h_sum, p2_sum):
    B, L, K, _, _ = w.shape
    for b in range(B):
        for l in range(L):
            for k in range(K):
                h_sum[l, k] += w[b, l, k, l, k]
                for r in range(L):
                    for q in range(K):
                        v = w[b, l, k, r, q]
                        p2_sum[l, k, r, q] += v.real * v.real + v.imag * v.imag


def accumulate_sinr_terms(w, h_sum, p2_sum):
    _accumulate_sinr_terms(np.ascontiguousarray(w), h_sum, p2_sum)
