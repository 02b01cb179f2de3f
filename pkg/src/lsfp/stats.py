"""Closed-form second-order statistics of the despreaded pilot signals.

For a fixed scenario these are the deterministic objects the SE expression
and the weight optimizer consume:

- Psi[l, k]:   M x M covariance of the despreaded pilot z_lk at BS l
- b[l, k, r]:  E{ z_rk^H g_lk^r }, real nonnegative
- C[l, k, k']: L x L matrix of cross moments E{ z_rk'^H g_lk^r (g_lk^n)^H z_nk' }

with the structure: C[l,k,k] = b_lk b_lk^T off the diagonal, and C[l,k,k']
diagonal for k' != k.
"""

from dataclasses import dataclass

import numpy as np

from lsfp.scenario import NetworkScenario


def _herm(X):
    return 0.5 * (X + np.conj(np.swapaxes(X, -1, -2)))


@dataclass(frozen=True)
class ClosedFormStatistics:
    """All second-order statistics of one scenario, precomputed and immutable."""

    psi: np.ndarray  # (L, K, M, M) complex
    psi_trace: np.ndarray  # (L, K) real
    b: np.ndarray  # (L, K, L) real
    C: np.ndarray  # (L, K, K, L, L) complex, C[l, k, k'] is L x L
    sigma2: float
    tau_p: int
    tau_c: int

    @property
    def L(self):
        return self.b.shape[0]

    @property
    def K(self):
        return self.b.shape[1]


def compute_psi(scenario: NetworkScenario, l: int, k: int) -> np.ndarray:
    """Covariance of z_lk: tau_p*eta * sum_r (R_rk^l + gbar gbar^H) + sigma2 I."""
    cfg = scenario.config
    te = cfg.tau_p * cfg.eta
    M = cfg.M
    psi = np.zeros((M, M), dtype=complex)
    for r in range(cfg.L):
        g = scenario.gbar[r, k, l]
        psi += scenario.R[r, k, l] + np.outer(g, np.conj(g))
    psi = te * psi + cfg.sigma2 * np.eye(M)
    return _herm(psi)


def compute_b(scenario: NetworkScenario, l: int, k: int) -> np.ndarray:
    """L-vector with entry r = sqrt(tau_p*eta) (||gbar_lk^r||^2 + tr R_lk^r)."""
    cfg = scenario.config
    out = np.empty(cfg.L)
    for r in range(cfg.L):
        g = scenario.gbar[l, k, r]
        out[r] = np.vdot(g, g).real + np.trace(scenario.R[l, k, r]).real
    return np.sqrt(cfg.tau_p * cfg.eta) * out


def compute_c(
    scenario: NetworkScenario,
    l: int,
    k: int,
    k_prime: int,
    psi: np.ndarray | None = None,
    b: np.ndarray | None = None,
) -> np.ndarray:
    """L x L cross-moment matrix C_lkk'.

    `psi` may carry precomputed Psi matrices of shape (L, K, M, M); `b` the
    precomputed b-vector of user (l, k); both are recomputed when omitted.
    """
    cfg = scenario.config
    L = cfg.L
    te = cfg.tau_p * cfg.eta
    if b is None:
        b = compute_b(scenario, l, k)
    out = np.zeros((L, L), dtype=complex)
    for r in range(L):
        psi_r = psi[r, k_prime] if psi is not None else compute_psi(scenario, r, k_prime)
        g = scenario.gbar[l, k, r]
        Rr = scenario.R[l, k, r]
        tr_r = np.trace(Rr).real
        g2 = np.vdot(g, g).real
        # tr(Psi (R + g g^H)) evaluated as tr(Psi R) + g^H Psi g
        mix = np.sum(psi_r * Rr.T).real + np.vdot(g, psi_r @ g).real
        if k_prime == k:
            out[r, r] = te * tr_r**2 + 2.0 * te * g2 * tr_r + mix
        else:
            out[r, r] = mix
    if k_prime == k:
        off = np.outer(b, b).astype(complex)
        np.fill_diagonal(off, 0.0)
        out += off
    return _herm(out)


def compute_statistics(scenario: NetworkScenario) -> ClosedFormStatistics:
    """All Psi/b/C objects for a scenario, computed once and cached by callers."""
    cfg = scenario.config
    L, K, M = cfg.L, cfg.K, cfg.M
    psi = np.empty((L, K, M, M), dtype=complex)
    for l in range(L):
        for k in range(K):
            psi[l, k] = compute_psi(scenario, l, k)
    b = np.empty((L, K, L))
    for l in range(L):
        for k in range(K):
            b[l, k] = compute_b(scenario, l, k)
    C = np.empty((L, K, K, L, L), dtype=complex)
    for l in range(L):
        for k in range(K):
            for kp in range(K):
                C[l, k, kp] = compute_c(scenario, l, k, kp, psi=psi, b=b[l, k])
    psi_trace = np.trace(psi, axis1=-2, axis2=-1).real
    for arr in (psi, psi_trace, b, C):
        arr.setflags(write=False)
    return ClosedFormStatistics(
        psi=psi,
        psi_trace=psi_trace,
        b=b,
        C=C,
        sigma2=cfg.sigma2,
        tau_p=cfg.tau_p,
        tau_c=cfg.tau_c,
    )
