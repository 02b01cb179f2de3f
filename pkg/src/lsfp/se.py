"""Closed-form and Monte Carlo SINR/SE evaluation.

The closed-form path evaluates the deterministic SINR lower bound from the
precomputed statistics. The Monte Carlo path samples coherence blocks
(fresh LOS phases, fresh NLOS draws, fresh pilot noise), forms the despreaded
pilots, and estimates the four received-signal terms (desired signal,
beamforming-gain uncertainty, pilot contamination, non-coherent interference)
as sample moments. The two paths are independent by construction and are
cross-checked in the test suite.
"""

from dataclasses import dataclass, field

import numpy as np

from lsfp.kernels import get_backend
from lsfp.scenario import NetworkScenario


@dataclass(frozen=True)
class PrecodingWeights:
    """LSFP coefficients a[l, k, r]: weight at BS r for user k of cell l."""

    a: np.ndarray  # (L, K, L) complex
    scheme: str = "custom"

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        if not np.all(np.isfinite(a)):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "a", a)


@dataclass(frozen=True)
class ChannelRealization:
    """One coherence block: sampled channels and despreaded pilot vectors."""

    g: np.ndarray  # (L, K, L, M) complex
    z: np.ndarray  # (L, K, M) complex


def spectral_efficiency(sinr, tau_p: int, tau_c: int):
    """SE in bit/s/Hz: (1 - tau_p/tau_c) log2(1 + sinr)."""
    if tau_p >= tau_c:
        raise ValueError("tau_p must be < tau_c")
    sinr = np.asarray(sinr, dtype=float)
    if np.any(sinr < 0):
        raise ValueError("sinr must be nonnegative")
    return (1.0 - tau_p / tau_c) * np.log2(1.0 + sinr)


def sinr_closed_form(stats, weights: PrecodingWeights, l: int, k: int) -> float:
    """Deterministic effective SINR of user (l, k) for the given weights."""
    a = weights.a
    L, K = stats.L, stats.K
    num = abs(np.vdot(a[l, k], stats.b[l, k])) ** 2
    den = -num + stats.sigma2
    for r in range(L):
        den += np.vdot(a[r, k], stats.C[l, k, k] @ a[r, k]).real
        for kp in range(K):
            if kp != k:
                den += np.vdot(a[r, kp], stats.C[l, k, kp] @ a[r, kp]).real
    out = num / den
    if not np.isfinite(out):
        raise FloatingPointError(f"non-finite SINR for user ({l}, {k})")
    return out


def sinr_closed_form_all(stats, weights: PrecodingWeights) -> np.ndarray:
    """(L, K) array of closed-form SINRs (vectorized over users)."""
    a = weights.a
    # num[l, k] = |a_lk^H b_lk|^2
    num = np.abs(np.einsum("lkr,lkr->lk", np.conj(a), stats.b)) ** 2
    # quad[l, k, q, r] = a_rq^H C_lkq a_rq
    quad = np.einsum("rqn,lkqnm,rqm->lkqr", np.conj(a), stats.C, a, optimize=True).real
    total = quad.sum(axis=(2, 3))
    den = total - num + stats.sigma2
    return num / den


def product_sinr(stats, weights: PrecodingWeights, active=None) -> float:
    """Product of closed-form SINRs over active users (all users by default)."""
    s = sinr_closed_form_all(stats, weights)
    if active is not None:
        s = s[active]
    return float(np.prod(s))


def _sample_batch(scenario: NetworkScenario, rng, n: int):
    """Sample n coherence blocks: returns (g, z) with fresh phases/NLOS/noise."""
    cfg = scenario.config
    L, K, M = cfg.L, cfg.K, cfg.M
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(n, L, K, L))
    wr = rng.standard_normal((n, L, K, L, M))
    wi = rng.standard_normal((n, L, K, L, M))
    wcplx = (wr + 1j * wi) / np.sqrt(2.0)
    g = np.exp(1j * theta)[..., None] * scenario.gbar[None] + np.einsum(
        "lkrmn,blkrn->blkrm", scenario.covariance_sqrt(), wcplx, optimize=True
    )
    nr = rng.standard_normal((n, L, K, M))
    ni = rng.standard_normal((n, L, K, M))
    noise = np.sqrt(cfg.sigma2 / 2.0) * (nr + 1j * ni)
    # z[b, l, k] = sqrt(tau_p eta) sum_r g[b, r, k, l] + noise
    z = np.sqrt(cfg.tau_p * cfg.eta) * g.sum(axis=1).transpose(0, 2, 1, 3) + noise
    return g, z


def sample_realization(scenario: NetworkScenario, rng) -> ChannelRealization:
    """One coherence block (thin wrapper around the batched sampler)."""
    g, z = _sample_batch(scenario, rng, 1)
    return ChannelRealization(g=g[0], z=z[0])


@dataclass
class MonteCarloEstimates:
    """Sample-moment estimates accumulated over n_blocks coherence blocks."""

    n_blocks: int
    sigma2: float
    psi: np.ndarray  # (L, K, M, M) sample covariance of z
    b: np.ndarray  # (L, K, L) complex sample mean of z_rk^H g_lk^r
    C: np.ndarray  # (L, K, K, L, L) sample cross moments
    # per weight-set w[l,k,r,q] moments, keyed like the input weight list
    h_mean: list = field(default_factory=list)  # (L, K) complex, mean of w[l,k,l,k]
    p2_mean: list = field(default_factory=list)  # (L, K, L, K) mean of |w|^2

    def sinr_terms(self, idx: int):
        """(ds2, bu, pc, ni) estimates per user for weight set `idx`.

        ds2: |DS|^2; bu: E|h|^2 - |DS|^2; pc: sum_{r != l} E|w[.,k]|^2;
        ni: sum over r and q != k of E|w[., q]|^2. All shaped (L, K).
        """
        h = self.h_mean[idx]
        p2 = self.p2_mean[idx]
        L, K = h.shape
        ds2 = np.abs(h) ** 2
        li = np.arange(L)[:, None]
        ki = np.arange(K)[None, :]
        own2 = p2[li, ki, li, ki]
        bu = own2 - ds2
        pc = np.zeros((L, K))
        ni = np.zeros((L, K))
        for l in range(L):
            for k in range(K):
                pc[l, k] = p2[l, k, :, k].sum() - p2[l, k, l, k]
                ni[l, k] = p2[l, k].sum() - p2[l, k, :, k].sum()
        return ds2, bu, pc, ni

    def sinr(self, idx: int) -> np.ndarray:
        ds2, bu, pc, ni = self.sinr_terms(idx)
        return ds2 / (bu + pc + ni + self.sigma2)


def monte_carlo_estimates(
    scenario: NetworkScenario,
    n_blocks: int,
    rng,
    weights: list[PrecodingWeights] | None = None,
    batch_size: int = 20_000,
    want_moments: bool = True,
) -> MonteCarloEstimates:
    """Accumulate all Monte Carlo moments in one pass over shared realizations.

    All weight sets are evaluated on the same channel draws (common random
    numbers), which is also what makes per-setup scheme comparisons low
    variance.
    """
    if n_blocks < 1:
        raise ValueError("n_blocks must be >= 1")
    cfg = scenario.config
    L, K, M = cfg.L, cfg.K, cfg.M
    kern = get_backend()
    weights = weights or []
    psi_sum = np.zeros((L, K, M, M), dtype=complex)
    b_sum = np.zeros((L, K, L), dtype=complex)
    c_sum = np.zeros((L, K, K, L, L), dtype=complex)
    h_sums = [np.zeros((L, K), dtype=complex) for _ in weights]
    p2_sums = [np.zeros((L, K, L, K)) for _ in weights]
    done = 0
    while done < n_blocks:
        n = min(batch_size, n_blocks - done)
        g, z = _sample_batch(scenario, rng, n)
        ip2 = kern.inner_products(z, g)
        if want_moments:
            kern.accumulate_psi(z, psi_sum)
            kern.accumulate_moments(ip2, b_sum, c_sum)
        for i, wset in enumerate(weights):
            w = kern.apply_weights(ip2, wset.a)
            kern.accumulate_sinr_terms(w, h_sums[i], p2_sums[i])
        done += n
    inv = 1.0 / n_blocks
    return MonteCarloEstimates(
        n_blocks=n_blocks,
        sigma2=cfg.sigma2,
        psi=psi_sum * inv,
        b=b_sum * inv,
        C=c_sum * inv,
        h_mean=[h * inv for h in h_sums],
        p2_mean=[p * inv for p in p2_sums],
    )


def monte_carlo_sinr(
    scenario: NetworkScenario,
    weights: PrecodingWeights,
    l: int,
    k: int,
    n_blocks: int,
    rng,
    batch_size: int = 20_000,
):
    """Monte Carlo SINR of user (l, k) plus the per-term estimates."""
    est = monte_carlo_estimates(
        scenario, n_blocks, rng, weights=[weights], batch_size=batch_size,
        want_moments=False,
    )
    ds2, bu, pc, ni = est.sinr_terms(0)
    terms = {
        "ds": est.h_mean[0][l, k],
        "ds2": ds2[l, k],
        "bu": bu[l, k],
        "pc": pc[l, k],
        "ni": ni[l, k],
    }
    return est.sinr(0)[l, k], terms
