"""Network geometry and long-term channel parameter generation.

Cells are unit squares of side `cell_side` arranged row-major on a
ceil(sqrt(L)) x ceil(sqrt(L)) grid with the BS at each cell center. Users are
dropped uniformly in their serving cell, rejection-sampled to keep
`min_bs_distance` to every BS in the network. Per (serving cell l, user k,
BS r) the model populates:

- beta:  pathloss beta_dB = -30.5 - 36.7 log10(d), linear scale
- kappa: Rician factor kappa_dB = 13 - 0.03 d
- gbar:  sqrt(beta*kappa/(1+kappa)) * ULA response at the true angle
- R:     beta/(1+kappa) * Gaussian local scattering covariance (ASD 10 deg)

so that ||gbar||^2 + tr(R) = M * beta for every link.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from lsfp.config import SimulationConfig

_REJECTION_CAP = 10_000


@dataclass(frozen=True)
class NetworkScenario:
    """One user drop with all long-term channel parameters.

    Index convention: arrays are keyed [l, k, r] = (serving cell l, user k,
    BS r). Immutable after construction; safe to share across threads.
    """

    config: SimulationConfig
    setup_index: int
    bs_positions: np.ndarray  # (L, 2)
    user_positions: np.ndarray  # (L, K, 2)
    gbar: np.ndarray  # (L, K, L, M) complex
    R: np.ndarray  # (L, K, L, M, M) complex
    kappa: np.ndarray  # (L, K, L)
    beta: np.ndarray  # (L, K, L)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def L(self):
        return self.config.L

    @property
    def K(self):
        return self.config.K

    @property
    def M(self):
        return self.config.M

    def covariance_sqrt(self) -> np.ndarray:
        """(L, K, L, M, M) array of Hermitian square roots of R.

        Eigendecomposition-based (not Cholesky) so exactly-singular R from
        near-pure-LOS links factors cleanly. Cached on first use.
        """
        if "Rsqrt" not in self._cache:
            w, V = np.linalg.eigh(self.R)
            w = np.clip(w, 0.0, None)
            self._cache["Rsqrt"] = (V * np.sqrt(w)[..., None, :]) @ np.conj(
                np.swapaxes(V, -1, -2)
            )
        return self._cache["Rsqrt"]


def bs_grid(L: int, cell_side: float) -> np.ndarray:
    """Cell-center BS positions for L cells on a square grid (row-major)."""
    n = math.ceil(math.sqrt(L))
    pos = np.empty((L, 2))
    for l in range(L):
        row, col = divmod(l, n)
        pos[l] = ((col + 0.5) * cell_side, (row + 0.5) * cell_side)
    return pos


def cell_origin(l: int, L: int, cell_side: float) -> np.ndarray:
    n = math.ceil(math.sqrt(L))
    row, col = divmod(l, n)
    return np.array([col * cell_side, row * cell_side])


def large_scale_gain(distance, intercept_db: float = -30.5, exponent_db: float = 36.7):
    """Linear pathloss gain at `distance` meters (3GPP UMi-style, no shadowing)."""
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    beta_db = intercept_db - exponent_db * np.log10(d)
    return 10.0 ** (beta_db / 10.0)


def rician_factor(distance, offset_db: float = 13.0, slope_db_per_m: float = 0.03):
    """Linear Rician kappa at `distance` meters; every link keeps a LOS part."""
    d = np.asarray(distance, dtype=float)
    return 10.0 ** ((offset_db - slope_db_per_m * d) / 10.0)


def ula_response(M: int, angle: float, spacing: float = 0.5) -> np.ndarray:
    """M-element uniform linear array response, ||a||^2 = M."""
    m = np.arange(M)
    return np.exp(2j * np.pi * spacing * m * np.sin(angle))


def local_scattering_covariance(
    M: int, angle: float, asd_rad: float, spacing: float = 0.5
) -> np.ndarray:
    """Gaussian local scattering covariance (unit diagonal, trace M).

    Small-ASD closed form: entry (m, n) depends only on m - n, so the matrix
    is Hermitian Toeplitz and built from a single length-M first column.
    """
    m = np.arange(M)
    arg = 2.0 * np.pi * spacing * m
    col = np.exp(1j * arg * np.sin(angle)) * np.exp(
        -0.5 * (asd_rad * arg * np.cos(angle)) ** 2
    )
    idx = np.abs(m[:, None] - m[None, :])
    cov = col[idx]
    lower = m[:, None] < m[None, :]
    cov = np.where(lower, np.conj(cov), cov)
    return cov


def _psd_repair(R: np.ndarray) -> np.ndarray:
    """Symmetrize and clip negative eigenvalues to zero (floating-point guard)."""
    R = 0.5 * (R + np.conj(np.swapaxes(R, -1, -2)))
    w, V = np.linalg.eigh(R)
    if np.all(w >= 0):
        return R
    w = np.clip(w, 0.0, None)
    R = (V * w[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))
    return 0.5 * (R + np.conj(np.swapaxes(R, -1, -2)))


def build_channel_components(
    user_pos: np.ndarray, bs_pos: np.ndarray, config: SimulationConfig
):
    """Long-term parameters (gbar, R, kappa, beta) for one user-BS link."""
    delta = np.asarray(user_pos, dtype=float) - np.asarray(bs_pos, dtype=float)
    d = float(np.hypot(*delta))
    beta = float(
        large_scale_gain(d, config.pathloss_intercept_db, config.pathloss_exponent_db)
    )
    kappa = float(
        rician_factor(d, config.rician_offset_db, config.rician_slope_db_per_m)
    )
    angle = math.atan2(delta[1], delta[0])
    gbar = math.sqrt(beta * kappa / (1.0 + kappa)) * ula_response(
        config.M, angle, config.antenna_spacing
    )
    R = (beta / (1.0 + kappa)) * local_scattering_covariance(
        config.M, angle, math.radians(config.asd_deg), config.antenna_spacing
    )
    return gbar, _psd_repair(R), kappa, beta


def _draw_user(rng, origin, cell_side, bs_positions, min_dist):
    for _ in range(_REJECTION_CAP):
        pos = origin + rng.uniform(0.0, cell_side, size=2)
        if min_dist == 0.0:
            return pos
        d = np.hypot(*(bs_positions - pos).T)
        if np.min(d) >= min_dist:
            return pos
    raise RuntimeError(
        f"could not place a user at >= {min_dist} m from all BSs after "
        f"{_REJECTION_CAP} tries; config is geometrically infeasible"
    )


def generate_scenario(config: SimulationConfig, setup_index: int) -> NetworkScenario:
    """Deterministic user drop + channel parameters for (config.seed, setup_index)."""
    L, K, M = config.L, config.K, config.M
    rng = np.random.default_rng([config.seed, setup_index])
    bs_pos = bs_grid(L, config.cell_side)
    user_pos = np.empty((L, K, 2))
    for l in range(L):
        origin = cell_origin(l, L, config.cell_side)
        for k in range(K):
            user_pos[l, k] = _draw_user(
                rng, origin, config.cell_side, bs_pos, config.min_bs_distance
            )
    gbar = np.zeros((L, K, L, M), dtype=complex)
    R = np.zeros((L, K, L, M, M), dtype=complex)
    kappa = np.zeros((L, K, L))
    beta = np.zeros((L, K, L))
    for l in range(L):
        for k in range(K):
            for r in range(L):
                gbar[l, k, r], R[l, k, r], kappa[l, k, r], beta[l, k, r] = (
                    build_channel_components(user_pos[l, k], bs_pos[r], config)
                )
    for arr in (bs_pos, user_pos, gbar, R, kappa, beta):
        arr.setflags(write=False)
    return NetworkScenario(
        config=config,
        setup_index=setup_index,
        bs_positions=bs_pos,
        user_positions=user_pos,
        gbar=gbar,
        R=R,
        kappa=kappa,
        beta=beta,
    )
