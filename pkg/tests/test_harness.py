"""Experiment harness: setups, sweeps, CSV round trips and determinism."""

import numpy as np
import pytest

from lsfp.harness import (
    CSV_FIELDS,
    SCHEMES,
    read_results,
    result_rows,
    run_setup,
    run_sweep,
    run_verification,
    write_results,
)
from lsfp.se import product_sinr
from lsfp.stats import compute_statistics

from conftest import toy_config

_CFG = toy_config(n_setups=2, optimizer={"max_iterations": 20,
                                         "objective_tolerance": 1e-4})


def toy_config_fast(**overrides):
    base = dict(n_setups=2,
                optimizer={"max_iterations": 20, "objective_tolerance": 1e-4})
    base.update(overrides)
    return toy_config(**base)


def test_run_setup_schemes_and_dominance():
    res = run_setup(_CFG, 0, keep_scenario=True)
    assert set(res.weights) == set(SCHEMES)
    stats = compute_statistics(res.scenario)
    p = {s: product_sinr(stats, res.weights[s]) for s in SCHEMES}
    assert p["LSFP"] >= p["CPC"] >= p["LPC"]
    assert res.max_slack["LSFP"] < 1e-8


def test_result_rows_shape_and_content():
    res = run_setup(_CFG, 1)
    rows = result_rows(res)
    assert len(rows) == 3 * _CFG.L * _CFG.K
    assert set(rows[0]) == set(CSV_FIELDS)
    for row in rows:
        assert row["scheme"] in SCHEMES
        assert row["se"] >= 0.0


def test_run_sweep_rejects_empty_k_values():
    with pytest.raises(ValueError):
        run_sweep(_CFG, [])


def test_sweep_row_ordering_and_counts():
    rows = run_sweep(toy_config_fast(n_setups=2), [1, 2])
    # K=1: 2 setups * 3 schemes * 2 cells * 1 user; K=2 doubles the users
    assert len(rows) == 2 * 3 * 2 * 1 + 2 * 3 * 2 * 2
    keys = [(r["K"], r["setup"], r["scheme"], r["l"], r["k"]) for r in rows]
    order = {s: i for i, s in enumerate(SCHEMES)}
    assert keys == sorted(keys, key=lambda t: (t[0], t[1], order[t[2]], t[3], t[4]))


def test_csv_round_trip(tmp_path):
    rows = run_sweep(toy_config_fast(n_setups=1), [2])
    path = tmp_path / "out.csv"
    write_results(rows, path, config=_CFG)
    again = read_results(path)
    assert again == rows
    assert (tmp_path / "out.csv.meta.json").exists()


def test_empty_rows_write_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_results([], path)
    text = path.read_text()
    assert text.splitlines() == [",".join(CSV_FIELDS)]
    assert read_results(path) == []


def test_sweep_thread_count_invariance(tmp_path):
    cfg = toy_config_fast(n_setups=2)
    p1, p2 = tmp_path / "t1.csv", tmp_path / "t2.csv"
    write_results(run_sweep(cfg, [2], threads=1), p1)
    write_results(run_sweep(cfg, [2], threads=2), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_verification_gap_small():
    rows, report = run_verification(toy_config_fast(), n_setups=1, n_blocks=40_000)
    assert report["n_comparisons"] == 3 * _CFG.L * _CFG.K
    assert report["max_rel_gap"] < 0.05
    for row in rows:
        assert row["rel_gap"] == pytest.approx(
            abs(row["sinr_mc"] / row["sinr_cf"] - 1.0), rel=1e-9
        )
