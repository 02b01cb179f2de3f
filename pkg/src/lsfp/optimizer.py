"""FPP-SCA optimization of the LSFP weights for max product SINR.

The nonconvex max-product-SINR program is rewritten with per-user surrogate
variables t (SINR) and u (interference-plus-noise), the bilinear coupling
t*u <= Re{a^H b}^2 is convexified with the quadratic upper bound
(0.5 u-/t-) t^2 + (0.5 t-/u-) u^2 >= t u around the previous iterate, and
nonnegative slacks f keep every subproblem feasible (penalized with a large
weight). Each convex subproblem is solved with cvxpy.

Two numerical transforms, both ledgered:
- the objective is sum(log t) - lambda*sum(f) (the product of t's is not
  concave as written; its log is, with identical maximizers at f=0);
- internally everything is noise-normalized (b/sigma, C/sigma^2) and the
  weight variable is scaled so that power/SINR terms are O(1).
"""

from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

from lsfp.config import OptimizerOptions
from lsfp.se import PrecodingWeights, sinr_closed_form_all
from lsfp.stats import ClosedFormStatistics

# users with b-vector below this fraction of the strongest are excluded from
# the product objective and get zero weights (log of their SINR is unbounded
# below)
_DEGENERATE_REL = 1e-12


class SubproblemStallError(RuntimeError):
    """Interior-point solver stalled; the previous iterate is still valid."""


@dataclass
class ScaState:
    """One accepted SCA iterate (weights in physical units)."""

    weights: PrecodingWeights
    t: np.ndarray  # (L, K) SINR surrogates
    u: np.ndarray  # (L, K) interference surrogates, noise-normalized
    f: np.ndarray  # (L, K) feasibility slacks, noise-normalized
    objective: float
    iteration: int


@dataclass
class TraceRecord:
    iteration: int
    objective: float
    max_slack: float
    max_power_ratio: float


def bs_power(weights: PrecodingWeights, stats: ClosedFormStatistics, l: int) -> float:
    """Long-term transmit power of BS l: sum_k tr(Psi_lk) sum_r |a_rk^l|^2."""
    a2 = np.abs(weights.a[:, :, l]) ** 2  # (L cells, K) entries at BS l
    return float(np.sum(stats.psi_trace[l] * a2.sum(axis=0)))


def bs_powers(weights: PrecodingWeights, stats: ClosedFormStatistics) -> np.ndarray:
    return np.array([bs_power(weights, stats, l) for l in range(stats.L)])


def equal_power_cpc_weights(stats: ClosedFormStatistics, rho_d: float) -> PrecodingWeights:
    """Serving-BS-only weights with every BS at full power, split evenly."""
    L, K = stats.L, stats.K
    if np.any(stats.psi_trace <= 0):
        raise ValueError("degenerate statistics: tr(Psi) must be positive")
    a = np.zeros((L, K, L), dtype=complex)
    for l in range(L):
        a[l, :, l] = np.sqrt(rho_d / (K * stats.psi_trace[l]))
    return PrecodingWeights(a, scheme="init")


def _active_users(stats: ClosedFormStatistics) -> np.ndarray:
    norms = np.linalg.norm(stats.b, axis=2)
    return norms > _DEGENERATE_REL * max(norms.max(), 1.0)


def rotate_to_real(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-user phase rotation making a_lk^H b_lk real nonnegative."""
    inner = np.einsum("lkr,lkr->lk", np.conj(a), b)
    phase = np.exp(1j * np.angle(inner))
    return a * phase[:, :, None]


def initialize(
    stats: ClosedFormStatistics,
    rho_d: float,
    weights: PrecodingWeights | None = None,
) -> ScaState:
    """Feasible starting state; default start is the equal-power CPC point.

    Any feasible `weights` (e.g. a converged CPC solution for warm starts)
    can be supplied; t/u are set to the achieved SINR and noise-normalized
    interference so the bilinear constraint holds with equality.
    """
    if weights is None:
        weights = equal_power_cpc_weights(stats, rho_d)
    a = rotate_to_real(weights.a, stats.b.astype(complex))
    weights = PrecodingWeights(a, scheme=weights.scheme)
    active = _active_users(stats)
    sinr = sinr_closed_form_all(stats, weights)
    num = np.abs(np.einsum("lkr,lkr->lk", np.conj(a), stats.b)) ** 2
    den_over_sigma2 = np.where(sinr > 0, num / np.maximum(sinr, 1e-300), stats.sigma2)
    den_over_sigma2 = den_over_sigma2 / stats.sigma2
    t = np.where(active, sinr, 1.0)
    u = np.where(active, den_over_sigma2, 1.0)
    obj = float(np.sum(np.log(t[active])))
    return ScaState(
        weights=weights, t=t, u=u, f=np.zeros_like(t), objective=obj, iteration=0
    )


class _Subproblem:
    """Parameterized convex subproblem, compiled once per (stats, mask).

    Conditioning: weights are scaled so X = a/scale is O(1), and each user's
    interference constraint is divided by that user's initial
    interference-plus-noise level du[l,k] (in noise units), so u starts near 1
    for every user. t/u/f returned by `solve` are converted back to noise
    units for u; slacks are reported in the per-user normalized units they
    are penalized in.
    """

    def __init__(self, stats, rho_d, mask, active, penalty, solver_tol, u0):
        L, K = stats.L, stats.K
        self.L, self.K = L, K
        self.stats = stats
        self.active = active
        sig = stats.sigma2
        # variable scaling: a = scale * X with X expected O(1)
        self.scale = np.sqrt(rho_d / (K * stats.psi_trace.mean()))
        s2 = self.scale**2
        self.du = np.maximum(np.asarray(u0, dtype=float), 1e-6)  # (L, K)
        beff = self.scale * stats.b / (np.sqrt(sig) * np.sqrt(self.du)[:, :, None])
        Ceff = s2 * stats.C / sig

        nu = L * K

        def row(l, k):
            return l * K + k

        X = cp.Variable((nu, L), complex=True)
        t = cp.Variable(nu, pos=True)
        u = cp.Variable(nu, pos=True)
        f = cp.Variable(nu, nonneg=True)
        self.X, self.t, self.u, self.f = X, t, u, f
        self.sa = cp.Parameter(nu, nonneg=True)
        self.sb = cp.Parameter(nu, nonneg=True)

        AB2 = cp.square(cp.abs(X))
        cons = []
        # per-BS power: sum_j trPsi[n, pilot(j)] |X[j, n]|^2 <= rho_d / scale^2,
        # rescaled by the mean trace for conditioning
        tp_mean = stats.psi_trace.mean()
        TP = np.empty((nu, L))
        for l in range(L):
            for k in range(K):
                TP[row(l, k)] = stats.psi_trace[:, k] / tp_mean
        cons.append(cp.sum(cp.multiply(TP, AB2), axis=0) <= rho_d / (s2 * tp_mean))

        js = []
        for l in range(L):
            for k in range(K):
                j = row(l, k)
                if not active[l, k]:
                    cons += [X[j] == 0, t[j] == 1, u[j] == 1, f[j] == 0]
                    continue
                js.append(j)
                # interference bound: quadratic terms for pilot k plus
                # diagonal-weighted terms for the other pilots, noise = 1
                dlk = self.du[l, k]
                quad = 0
                for r in range(L):
                    Mmat = np.array(Ceff[l, k, k]) / dlk
                    if r == l:
                        Mmat = Mmat - np.outer(beff[l, k], beff[l, k])
                    quad = quad + cp.sum_squares(_psd_factor(Mmat) @ X[row(r, k)])
                Wni = np.zeros((nu, L))
                for kp in range(K):
                    if kp == k:
                        continue
                    d = np.real(np.diagonal(Ceff[l, k, kp])) / dlk
                    for r in range(L):
                        Wni[row(r, kp)] = d
                cons.append(
                    quad + cp.sum(cp.multiply(Wni, AB2)) + 1.0 / dlk <= u[j] + f[j]
                )
                # SOC form of the linearized bilinear constraint
                bre = beff[l, k] @ cp.real(X[j])
                cons.append(
                    cp.norm(cp.hstack([self.sa[j] * t[j], self.sb[j] * u[j]])) <= bre
                )
        self.mask = np.asarray(mask, dtype=bool) if mask is not None else None
        if self.mask is not None:
            for l in range(L):
                for k in range(K):
                    for r in range(L):
                        if active[l, k] and not self.mask[l, k, r]:
                            cons.append(X[row(l, k), r] == 0)
        self.act_rows = np.array(js, dtype=int)
        obj = cp.sum(cp.log(t[self.act_rows])) - penalty * cp.sum(f)
        self.problem = cp.Problem(cp.Maximize(obj), cons)
        self.solver_tol = solver_tol

    def solve(self, t_prev, u_prev, last_resort=False):
        tv = t_prev.reshape(-1)
        uv = (u_prev / self.du).reshape(-1)  # to per-user normalized units
        self.sa.value = np.sqrt(0.5 * uv / tv)
        self.sb.value = np.sqrt(0.5 * tv / uv)
        self._solve_with_fallback(last_resort)
        if self.problem.status not in ("optimal", "optimal_inaccurate"):
            raise RuntimeError(
                f"subproblem solver failed with status {self.problem.status}"
            )
        L, K = self.L, self.K
        X = np.asarray(self.X.value)
        a = (self.scale * X).reshape(L, K, L)
        if self.mask is not None:
            # the solver meets the support equalities only to its tolerance
            a = np.where(self.mask, a, 0.0)
        return (
            a,
            np.asarray(self.t.value).reshape(L, K),
            np.asarray(self.u.value).reshape(L, K) * self.du,
            np.asarray(self.f.value).reshape(L, K),
        )


    def _solve_with_fallback(self, last_resort=False):
        # Clarabel sometimes stops with InsufficientProgress near the
        # optimum; relax the tolerance stepwise before giving up. The SCS
        # run is only worth its cost when no accepted iterate exists yet,
        # so the caller opts into it via last_resort.
        if "CLARABEL" not in cp.installed_solvers():
            self.problem.solve()
            return
        last_exc = None
        for tol in (self.solver_tol, 1e-8, 1e-7):
            try:
                self.problem.solve(
                    solver=cp.CLARABEL,
                    tol_gap_abs=tol,
                    tol_gap_rel=tol,
                    tol_feas=tol,
                    reduced_tol_gap_abs=1e-6,
                    reduced_tol_gap_rel=1e-6,
                    reduced_tol_feas=1e-6,
                )
                return
            except cp.error.SolverError as exc:
                last_exc = exc
        if not last_resort:
            raise SubproblemStallError("interior-point solver stalled") from last_exc
        try:
            self.problem.solve(solver=cp.SCS, eps=1e-6, max_iters=100_000)
        except cp.error.SolverError as exc:
            raise RuntimeError(f"all subproblem solvers failed: {exc}") from last_exc


def _psd_factor(Mmat: np.ndarray) -> np.ndarray:
    """F with F^H F = PSD projection of Mmat, so x^H M x = ||F x||^2."""
    Mmat = 0.5 * (Mmat + np.conj(Mmat.T))
    w, V = np.linalg.eigh(Mmat)
    return np.sqrt(np.clip(w, 0.0, None))[:, None] * np.conj(V.T)


def solve_subproblem(
    state: ScaState,
    stats: ClosedFormStatistics,
    rho_d: float,
    options: OptimizerOptions | None = None,
    mask: np.ndarray | None = None,
    _cache: dict | None = None,
    last_resort: bool = False,
) -> ScaState:
    """One FPP-SCA step from `state`; returns the next accepted iterate."""
    options = options or OptimizerOptions()
    penalty = options.penalty or 1e3 * stats.L * stats.K
    active = _active_users(stats)
    if _cache is not None and "sub" in _cache:
        sub = _cache["sub"]
    else:
        sub = _Subproblem(
            stats, rho_d, mask, active, penalty, options.solver_tolerance, state.u
        )
        if _cache is not None:
            _cache["sub"] = sub
    a, t, u, f = sub.solve(state.t, state.u, last_resort=last_resort)
    a = rotate_to_real(a, stats.b.astype(complex))
    obj = float(np.sum(np.log(t[active])) - penalty * np.sum(f))
    return ScaState(
        weights=PrecodingWeights(a, scheme=state.weights.scheme),
        t=t,
        u=u,
        f=f,
        objective=obj,
        iteration=state.iteration + 1,
    )


def optimize_lsfp(
    stats: ClosedFormStatistics,
    rho_d: float,
    options: OptimizerOptions | None = None,
    mask: np.ndarray | None = None,
    init_weights: PrecodingWeights | None = None,
    trace_file=None,
):
    """Run FPP-SCA to (local) convergence.

    `mask` restricts the weight support (boolean (L, K, L); used by the CPC
    baseline). `trace_file` is an optional text stream receiving one
    newline-delimited record per iteration. Returns (weights, [TraceRecord]).
    """
    options = options or OptimizerOptions()
    state = initialize(stats, rho_d, init_weights)
    cache: dict = {}
    trace = [
        TraceRecord(
            0,
            state.objective,
            0.0,
            float(np.max(bs_powers(state.weights, stats)) / rho_d),
        )
    ]
    for _ in range(options.max_iterations):
        prev_obj = state.objective
        try:
            state = solve_subproblem(
                state, stats, rho_d, options, mask, _cache=cache,
                last_resort=state.iteration == 0,
            )
        except SubproblemStallError:
            # the previous iterate is feasible and every step was an ascent,
            # so a stall near the optimum just ends the iteration
            if trace_file is not None:
                trace_file.write(
                    f"iter={state.iteration + 1} solver stalled, "
                    "keeping previous iterate\n"
                )
            break
        rec = TraceRecord(
            state.iteration,
            state.objective,
            float(np.max(state.f)),
            float(np.max(bs_powers(state.weights, stats)) / rho_d),
        )
        trace.append(rec)
        if trace_file is not None:
            trace_file.write(
                f"iter={rec.iteration} objective={rec.objective:.12g} "
                f"max_slack={rec.max_slack:.3e} "
                f"max_power_ratio={rec.max_power_ratio:.12g}\n"
            )
        if abs(state.objective - prev_obj) <= options.objective_tolerance * max(
            abs(prev_obj), 1.0
        ):
            break
    weights = PrecodingWeights(state.weights.a, scheme="LSFP" if mask is None else "CPC")
    return weights, trace
