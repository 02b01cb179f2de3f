"""Figure series vs independently computed aggregates, and rendering output."""

import csv

import numpy as np
import pytest

from lsfp_plots.cli import main
from lsfp_plots.data import SchemaError, read_result_csv
from lsfp_plots.figures import cdf_series, plot_cdf, plot_sum_se, sum_se_series

FIELDS = ("setup", "scheme", "K", "l", "k", "sinr", "se",
          "product_sinr_setup", "iters", "max_slack")


def write_csv(path, rows):
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIELDS)
        for row in rows:
            writer.writerow([row.get(f, 0) for f in FIELDS])


def synthetic_rows(rng, schemes=("LSFP", "CPC", "LPC"), K_values=(2, 4),
                   n_setups=3, L=2):
    rows = []
    for K in K_values:
        for setup in range(n_setups):
            for scheme in schemes:
                for l in range(L):
                    for k in range(K):
                        rows.append({
                            "setup": setup, "scheme": scheme, "K": K,
                            "l": l, "k": k,
                            "se": float(rng.uniform(0.5, 4.0)),
                        })
    return rows


@pytest.fixture
def sweep_csv(tmp_path):
    rows = synthetic_rows(np.random.default_rng(1))
    path = tmp_path / "sweep.csv"
    write_csv(path, rows)
    return path, rows


def test_reader_round_trip(sweep_csv):
    path, rows = sweep_csv
    got = read_result_csv(path)
    assert len(got) == len(rows)
    assert got[0]["se"] == pytest.approx(rows[0]["se"], rel=1e-15)


def test_reader_rejects_bad_schema(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("foo,bar\n1,2\n")
    with pytest.raises(SchemaError, match="missing columns"):
        read_result_csv(path)
    empty = tmp_path / "empty.csv"
    empty.write_text(",".join(FIELDS) + "\n")
    with pytest.raises(SchemaError, match="no data rows"):
        read_result_csv(empty)


def test_sum_se_series_matches_direct_average(sweep_csv):
    # independent aggregation: mean over (setup, cell) of per-cell user sums
    path, rows = sweep_csv
    series = sum_se_series(read_result_csv(path))
    for scheme in ("LSFP", "CPC", "LPC"):
        ks, means = series[scheme]
        for K, mean in zip(ks, means):
            sums = {}
            for r in rows:
                if r["scheme"] == scheme and r["K"] == K:
                    sums.setdefault((r["setup"], r["l"]), 0.0)
                    sums[(r["setup"], r["l"])] += r["se"]
            expected = np.mean(list(sums.values()))
            assert abs(mean - expected) <= 1e-12 * abs(expected)


def test_cdf_series_matches_empirical_quantiles(sweep_csv):
    path, rows = sweep_csv
    series = cdf_series(read_result_csv(path), K=4)
    for scheme in ("LSFP", "CPC", "LPC"):
        x, cdf = series[scheme]
        values = sorted(r["se"] for r in rows
                        if r["scheme"] == scheme and r["K"] == 4)
        np.testing.assert_allclose(x, values, rtol=1e-15)
        np.testing.assert_allclose(cdf, np.arange(1, len(values) + 1)
                                   / len(values), rtol=1e-15)
        # non-decreasing from the first level up to exactly 1
        assert np.all(np.diff(cdf) >= 0)
        assert cdf[-1] == 1.0
        # empirical quantile agreement at the levels the CDF defines
        for q in (0.25, 0.5, 0.75):
            idx = int(np.ceil(q * len(values))) - 1
            assert x[idx] == pytest.approx(
                np.quantile(values, q, method="inverted_cdf"), rel=1e-12
            )


def test_cdf_missing_k_raises(sweep_csv):
    path, _ = sweep_csv
    with pytest.raises(SchemaError, match="K=99"):
        cdf_series(read_result_csv(path), K=99)


def test_constant_column_gives_step_cdf(tmp_path):
    rows = [{"setup": 0, "scheme": "LSFP", "K": 2, "l": 0, "k": k, "se": 1.5}
            for k in range(2)]
    path = tmp_path / "const.csv"
    write_csv(path, rows)
    series = cdf_series(read_result_csv(path), K=2)
    x, cdf = series["LSFP"]
    assert np.all(x == 1.5)
    assert cdf[-1] == 1.0


def test_plot_sum_se_writes_files(sweep_csv, tmp_path):
    path, _ = sweep_csv
    out = tmp_path / "fig1.svg"
    series = plot_sum_se(path, out)
    assert out.exists() and (tmp_path / "fig1.png").exists()
    assert set(series) == {"LSFP", "CPC", "LPC"}


def test_plot_cdf_writes_files(sweep_csv, tmp_path):
    path, _ = sweep_csv
    out = tmp_path / "fig2.pdf"
    series = plot_cdf(path, 2, out)
    assert out.exists() and (tmp_path / "fig2.png").exists()
    assert all(np.all(np.diff(c) >= 0) for _, c in series.values())


def test_cli(sweep_csv, tmp_path, capsys):
    path, _ = sweep_csv
    assert main(["sum-se", "--csv", str(path),
                 "--out", str(tmp_path / "a.svg")]) == 0
    assert main(["cdf", "--csv", str(path), "--k", "2",
                 "--out", str(tmp_path / "b.svg")]) == 0
    assert main(["cdf", "--csv", str(path), "--k", "42",
                 "--out", str(tmp_path / "c.svg")]) == 1
    assert "error:" in capsys.readouterr().err
