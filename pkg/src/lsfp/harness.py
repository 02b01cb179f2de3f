"""Experiment orchestration: K-sweeps, Monte Carlo verification, CSV output.

Per setup the pipeline is: drop users -> closed-form statistics -> LPC, CPC
(warm-started at LPC), LSFP (equal-power start, warm-restarted from CPC if
that start ends lower) -> closed-form SE for every user. Setups are seeded
independently from (seed, K, setup_index), so results are identical for any
thread count, and rows are sorted before serialization.
"""

import concurrent.futures
import csv
import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from lsfp.baselines import cpc_weights, lpc_weights
from lsfp.config import SimulationConfig
from lsfp.optimizer import optimize_lsfp
from lsfp.scenario import generate_scenario
from lsfp.se import (
    PrecodingWeights,
    monte_carlo_estimates,
    sinr_closed_form_all,
    spectral_efficiency,
)
from lsfp.stats import compute_statistics

SCHEMES = ("LSFP", "CPC", "LPC")
CSV_FIELDS = (
    "setup",
    "scheme",
    "K",
    "l",
    "k",
    "sinr",
    "se",
    "product_sinr_setup",
    "iters",
    "max_slack",
)
VERIFY_FIELDS = ("setup", "scheme", "K", "l", "k", "sinr_cf", "sinr_mc", "rel_gap")


@dataclass
class SetupResult:
    """All three schemes evaluated on one user drop."""

    setup_index: int
    K: int
    weights: dict  # scheme -> PrecodingWeights
    sinr: dict  # scheme -> (L, K) array
    se: dict  # scheme -> (L, K) array
    iters: dict  # scheme -> int
    max_slack: dict  # scheme -> float
    scenario: object = None


def _setup_seed(seed: int, K: int, setup_index: int) -> list:
    return [seed, K, setup_index]


def run_setup(
    config: SimulationConfig, setup_index: int, keep_scenario: bool = False
) -> SetupResult:
    """Run all three schemes on one setup and evaluate closed-form SE."""
    # fold (seed, K) into the drop stream so sweeps over K are independent
    scenario = generate_scenario(config, _hash_seed(config, setup_index))
    stats = compute_statistics(scenario)
    opts = config.optimizer
    lpc = lpc_weights(stats, config.rho_d)
    cpc, cpc_trace = cpc_weights(stats, config.rho_d, options=opts)
    lsfp, lsfp_trace = optimize_lsfp(stats, config.rho_d, options=opts)
    # warm restart from CPC if the equal-power start ended below CPC
    if _product(stats, lsfp) < _product(stats, cpc):
        lsfp2, trace2 = optimize_lsfp(
            stats, config.rho_d, options=opts, init_weights=cpc
        )
        if _product(stats, lsfp2) > _product(stats, lsfp):
            lsfp, lsfp_trace = lsfp2, trace2
    weights = {"LSFP": lsfp, "CPC": cpc, "LPC": lpc}
    iters = {"LSFP": len(lsfp_trace) - 1, "CPC": len(cpc_trace) - 1, "LPC": 0}
    max_slack = {
        "LSFP": lsfp_trace[-1].max_slack,
        "CPC": cpc_trace[-1].max_slack,
        "LPC": 0.0,
    }
    sinr = {s: sinr_closed_form_all(stats, w) for s, w in weights.items()}
    se = {
        s: spectral_efficiency(v, config.tau_p, config.tau_c) for s, v in sinr.items()
    }
    return SetupResult(
        setup_index=setup_index,
        K=config.K,
        weights=weights,
        sinr=sinr,
        se=se,
        iters=iters,
        max_slack=max_slack,
        scenario=scenario if keep_scenario else None,
    )


def _hash_seed(config: SimulationConfig, setup_index: int) -> int:
    # deterministic per (seed, K, setup) stream id, independent of thread count
    ss = np.random.SeedSequence([config.seed, config.K, setup_index])
    return int(ss.generate_state(1)[0])


def _product(stats, weights: PrecodingWeights) -> float:
    return float(np.prod(sinr_closed_form_all(stats, weights)))


def _sweep_job(job):
    cfg, s = job
    try:
        return result_rows(run_setup(cfg, s))
    except Exception as exc:
        raise RuntimeError(f"setup {s} at K={cfg.K} failed: {exc}") from exc


def result_rows(res: SetupResult) -> list[dict]:
    rows = []
    L, K = res.sinr["LPC"].shape
    for scheme in SCHEMES:
        prod = float(np.prod(res.sinr[scheme]))
        for l in range(L):
            for k in range(K):
                rows.append(
                    {
                        "setup": res.setup_index,
                        "scheme": scheme,
                        "K": res.K,
                        "l": l,
                        "k": k,
                        "sinr": res.sinr[scheme][l, k],
                        "se": res.se[scheme][l, k],
                        "product_sinr_setup": prod,
                        "iters": res.iters[scheme],
                        "max_slack": res.max_slack[scheme],
                    }
                )
    return rows


def run_sweep(
    config: SimulationConfig, K_values: list[int], threads: int = 1
) -> list[dict]:
    """All (K, setup) combinations; returns sorted result rows."""
    if not K_values:
        raise ValueError("K_values must be nonempty")
    jobs = [
        (config.with_users(K), s) for K in K_values for s in range(config.n_setups)
    ]
    # worker processes, not threads: cvxpy's parameterized problems are not
    # thread-safe, and each setup is fully independent anyway
    if threads > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_sweep_job, jobs))
    else:
        chunks = [_sweep_job(j) for j in jobs]
    rows = [r for chunk in chunks for r in chunk]
    order = {s: i for i, s in enumerate(SCHEMES)}
    rows.sort(key=lambda r: (r["K"], r["setup"], order[r["scheme"]], r["l"], r["k"]))
    return rows


def _verify_job(job):
    config, s, n_blocks = job
    res = run_setup(config, s, keep_scenario=True)
    rng = np.random.default_rng([config.seed + 1, config.K, s])
    wlist = [res.weights[sch] for sch in SCHEMES]
    est = monte_carlo_estimates(
        res.scenario, n_blocks, rng, weights=wlist, want_moments=False
    )
    rows = []
    for i, sch in enumerate(SCHEMES):
        mc = est.sinr(i)
        cf = res.sinr[sch]
        for l in range(config.L):
            for k in range(config.K):
                rows.append(
                    {
                        "setup": s,
                        "scheme": sch,
                        "K": config.K,
                        "l": l,
                        "k": k,
                        "sinr_cf": cf[l, k],
                        "sinr_mc": mc[l, k],
                        "rel_gap": abs(mc[l, k] / cf[l, k] - 1.0)
                        if cf[l, k] > 0
                        else abs(mc[l, k]),
                    }
                )
    return rows


def run_verification(
    config: SimulationConfig,
    n_setups: int | None = None,
    n_blocks: int | None = None,
    threads: int = 1,
):
    """Closed-form vs Monte Carlo SINR comparison.

    Returns (rows, report). All schemes of a setup share the same channel
    draws (common random numbers). `rel_gap` is |mc/cf - 1| per user.
    """
    n_setups = n_setups if n_setups is not None else config.n_setups
    n_blocks = n_blocks if n_blocks is not None else config.mc_realizations
    jobs = [(config, s, n_blocks) for s in range(n_setups)]
    if threads > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_verify_job, jobs))
    else:
        chunks = [_verify_job(j) for j in jobs]
    rows = [r for chunk in chunks for r in chunk]
    order = {s: i for i, s in enumerate(SCHEMES)}
    rows.sort(key=lambda r: (r["setup"], order[r["scheme"]], r["l"], r["k"]))
    gaps = np.array([r["rel_gap"] for r in rows]) if rows else np.zeros(0)
    report = {
        "n_setups": n_setups,
        "n_blocks": n_blocks,
        "n_comparisons": len(rows),
        "max_rel_gap": float(gaps.max()) if gaps.size else 0.0,
        "mean_rel_gap": float(gaps.mean()) if gaps.size else 0.0,
    }
    return rows, report


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_results(rows: list[dict], path, config: SimulationConfig | None = None):
    """CSV with 17-significant-digit floats plus a JSON config sidecar."""
    fields = CSV_FIELDS if (not rows or "sinr" in rows[0]) else VERIFY_FIELDS
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_fmt(row[f]) for f in fields])
    if config is not None:
        with open(str(path) + ".meta.json", "w") as fh:
            json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_results(path) -> list[dict]:
    """Round-trip reader for CSVs written by write_results."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for raw in reader:
            row = {}
            for key, val in raw.items():
                if key in ("setup", "K", "l", "k", "iters"):
                    row[key] = int(val)
                elif key == "scheme":
                    row[key] = val
                else:
                    row[key] = float(val)
            rows.append(row)
    return rows
