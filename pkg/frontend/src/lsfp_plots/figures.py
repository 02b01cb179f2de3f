"""Figure construction: sum-SE-vs-K lines and per-user SE CDFs.

The numeric series are computed by pure functions (`sum_se_series`,
`cdf_series`) so they can be checked independently of any rendering; the
plot_* functions wrap them with matplotlib and write vector + PNG output.
"""

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lsfp_plots.data import SchemaError, read_result_csv, schemes_in

_STYLE = {
    "LSFP": dict(color="tab:blue", marker="o"),
    "CPC": dict(color="tab:orange", marker="s"),
    "LPC": dict(color="tab:green", marker="^"),
}


def sum_se_series(rows: list[dict]) -> dict:
    """Per scheme: (K values, mean over setups of per-cell sum SE).

    For each (K, setup, scheme, cell) the user SEs are summed; cell sums are
    then averaged over setups and cells.
    """
    cell_sums = defaultdict(float)
    for row in rows:
        cell_sums[(row["scheme"], row["K"], row["setup"], row["l"])] += row["se"]
    per_scheme = defaultdict(lambda: defaultdict(list))
    for (scheme, K, _setup, _l), total in cell_sums.items():
        per_scheme[scheme][K].append(total)
    out = {}
    for scheme in schemes_in(rows):
        ks = np.array(sorted(per_scheme[scheme]))
        means = np.array([np.mean(per_scheme[scheme][k]) for k in ks])
        out[scheme] = (ks, means)
    return out


def cdf_series(rows: list[dict], K: int) -> dict:
    """Per scheme: (sorted per-user SE values, empirical CDF levels) at K."""
    values = defaultdict(list)
    for row in rows:
        if row["K"] == K:
            values[row["scheme"]].append(row["se"])
    if not values:
        raise SchemaError(f"no rows with K={K}")
    out = {}
    for scheme in schemes_in(rows):
        if scheme not in values:
            continue
        x = np.sort(np.array(values[scheme]))
        cdf = np.arange(1, x.size + 1) / x.size
        out[scheme] = (x, cdf)
    return out


def _save(fig, out_path):
    out = Path(out_path)
    fig.savefig(out)
    fig.savefig(out.with_suffix(".png"), dpi=150)
    plt.close(fig)


def plot_sum_se(csv_path, out_path) -> dict:
    """Average sum SE per cell vs K, one line per scheme. Returns the series."""
    rows = read_result_csv(csv_path)
    series = sum_se_series(rows)
    fig, ax = plt.subplots(figsize=(6, 4))
    for scheme, (ks, means) in series.items():
        ax.plot(ks, means, label=scheme, **_STYLE.get(scheme, {}))
    ax.set_xlabel("Number of users per cell K")
    ax.set_ylabel("Average sum SE per cell [bit/s/Hz]")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    _save(fig, out_path)
    return series


def plot_cdf(csv_path, K: int, out_path) -> dict:
    """Empirical CDF of per-user SE at the given K, medians annotated."""
    rows = read_result_csv(csv_path)
    series = cdf_series(rows, K)
    fig, ax = plt.subplots(figsize=(6, 4))
    for scheme, (x, cdf) in series.items():
        style = dict(_STYLE.get(scheme, {}))
        style.pop("marker", None)
        ax.step(x, cdf, where="post", label=scheme, **style)
        med = float(np.median(x))
        ax.axvline(med, linestyle=":", alpha=0.5,
                   color=style.get("color", "gray"))
        ax.annotate(f"{med:.2f}", (med, 0.5),
                    textcoords="offset points", xytext=(3, 0), fontsize=8)
    ax.set_xlabel("SE per user [bit/s/Hz]")
    ax.set_ylabel("CDF")
    ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    _save(fig, out_path)
    return series
