"""Single-layer precoding baselines: LPC and CPC.

LPC (local power control): statistical allocation at the serving BS only,
with per-user transmit power proportional to sqrt(tr(Psi_lk)) and each BS at
its full budget.

CPC (cooperative power control): the same max-product-SINR FPP-SCA as the
full optimizer, but with the weight support restricted to the serving BS, so
each BS transmits only to its own users. Initialized at the LPC point, which
makes CPC dominate LPC in product SINR by the ascent property.
"""

import numpy as np

from lsfp.config import OptimizerOptions
from lsfp.optimizer import optimize_lsfp
from lsfp.se import PrecodingWeights
from lsfp.stats import ClosedFormStatistics


def lpc_weights(stats: ClosedFormStatistics, rho_d: float) -> PrecodingWeights:
    """Serving-BS weights with tr(Psi_lk)|a_lk^l|^2 proportional to sqrt(tr Psi_lk)."""
    L, K = stats.L, stats.K
    tr = stats.psi_trace
    if np.any(tr <= 0):
        raise ValueError("degenerate statistics: tr(Psi) must be positive")
    a = np.zeros((L, K, L), dtype=complex)
    for l in range(L):
        denom = np.sqrt(tr[l]) * np.sum(np.sqrt(tr[l]))
        a[l, :, l] = np.sqrt(rho_d / denom)
    return PrecodingWeights(a, scheme="LPC")


def serving_bs_mask(L: int, K: int) -> np.ndarray:
    """Boolean (L, K, L) support mask allowing only the serving-BS entry."""
    mask = np.zeros((L, K, L), dtype=bool)
    for l in range(L):
        mask[l, :, l] = True
    return mask


def cpc_weights(
    stats: ClosedFormStatistics,
    rho_d: float,
    options: OptimizerOptions | None = None,
    trace_file=None,
):
    """Max-product-SINR power control restricted to the serving BS.

    Returns (weights, trace) like optimize_lsfp.
    """
    weights, trace = optimize_lsfp(
        stats,
        rho_d,
        options=options,
        mask=serving_bs_mask(stats.L, stats.K),
        init_weights=lpc_weights(stats, rho_d),
        trace_file=trace_file,
    )
    return PrecodingWeights(weights.a, scheme="CPC"), trace
