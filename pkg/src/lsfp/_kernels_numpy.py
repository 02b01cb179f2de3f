"""Pure-numpy reference implementations of the Monte Carlo hot kernels.

Shapes (B = batch of coherence blocks, index convention [l, k, r] =
(serving cell, user/pilot, BS)):

- z   (B, L, K, M)      despreaded pilot at BS l for pilot k
- g   (B, L, K, L, M)   channel of user (l, k) to BS r
- ip2 (B, L, K, L, K)   ip2[., l, k, r, q] = z_rq^H g_lk^r
- w   (B, L, K, L, K)   w[., l, k, r, q] = sum_n conj(a[r, q, n]) z_nq^H g_lk^n
"""

import numpy as np


def inner_products(z: np.ndarray, g: np.ndarray) -> np.ndarray:
    return np.einsum("brqm,blkrm->blkrq", np.conj(z), g, optimize=True)


def accumulate_psi(z: np.ndarray, psi_sum: np.ndarray) -> None:
    psi_sum += np.einsum("blkm,blkn->lkmn", z, np.conj(z), optimize=True)


def accumulate_moments(ip2: np.ndarray, b_sum: np.ndarray, c_sum: np.ndarray) -> None:
    K = ip2.shape[2]
    for k in range(K):
        b_sum[:, k, :] += ip2[:, :, k, :, k].sum(axis=0)
    c_sum += np.einsum("blkrq,blknq->lkqrn", ip2, np.conj(ip2), optimize=True)


def apply_weights(ip2: np.ndarray, a: np.ndarray) -> np.ndarray:
    return np.einsum("rqn,blknq->blkrq", np.conj(a), ip2, optimize=True)


def accumulate_sinr_terms(w: np.ndarray, h_sum: np.ndarray, p2_sum: np.ndarray) -> None:
    L, K = w.shape[1], w.shape[2]
    li = np.arange(L)[:, None]
    ki = np.arange(K)[None, :]
    h_sum += w[:, li, ki, li, ki].sum(axis=0)
    p2_sum += (w.real**2 + w.imag**2).sum(axis=0)
