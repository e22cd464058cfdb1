import csv

import numpy as np
import pytest

from lrnn import example
from lrnn.cli import build_parser, config_from_args, main
from lrnn.config import RunConfig
from lrnn.runner import dump_grid, read_errors_csv, run, solve_trial, sweep

SMALL = dict(m=24, N=400, trials=2)


def test_manifest_is_deterministic(tmp_path):
    cfg = RunConfig(example=1, out=str(tmp_path), **SMALL)
    a = run(cfg)
    first = (tmp_path / "manifest.txt").read_text()
    b = run(cfg)
    assert a.to_text(timings=False) == b.to_text(timings=False)
    assert first.count("\n") == (tmp_path / "manifest.txt").read_text().count("\n")


def test_seed_policy():
    man = run(RunConfig(example=1, seed=5, **SMALL), write=False)
    assert [t["seed"] for t in man.trials] == [5, 6]
    spec = example(1, m=24, N=400)
    assert man.trials[1]["error"] == solve_trial(spec, 6).error


def test_errors_csv_round_trip(tmp_path):
    man = run(RunConfig(example=3, out=str(tmp_path), m=16, N=500, trials=2))
    rows = read_errors_csv(tmp_path / "errors.csv")
    assert [float(r["error"]) for r in rows] == [t["error"] for t in man.trials]
    assert [int(r["seed"]) for r in rows] == [0, 1]


def test_manifest_echoes_settings():
    man = run(RunConfig(example=1, trials=1, m=16, N=300), write=False)
    text = man.to_text()
    assert "settings.m = 16" in text and "gamma = 50.0" in text
    assert "trial.0.solver.rank" in text


def test_mixed_run_reports_flux_error():
    man = run(RunConfig(example=1, formulation="mixed", trials=1, m=16, N=300), write=False)
    assert man.mean_flux_error is not None and man.mean_flux_error < 1


def test_spacetime_run_reports_slices():
    man = run(RunConfig(example=5, trials=1, m=32, N=600), write=False)
    assert sorted(man.slice_errors) == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_parallel_trials_match_serial():
    a = run(RunConfig(example=1, parallel_trials=True, **SMALL), write=False)
    b = run(RunConfig(example=1, **SMALL), write=False)
    assert [t["error"] for t in a.trials] == [t["error"] for t in b.trials]


def test_system_dump(tmp_path):
    path = tmp_path / "sys.bin"
    run(RunConfig(example=1, trials=1, m=8, N=100, dump_system=str(path)), write=False)
    assert path.stat().st_size == 16 + 8 * 120 * 16


def test_sweep_grid(tmp_path):
    table = sweep(RunConfig(example=1, trials=1), [8, 16], [200, 400], tmp_path / "sweep.csv")
    assert len(table) == 4
    with open(tmp_path / "sweep.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["N", "m=8", "m=16"]
    assert [r[0] for r in rows[1:]] == ["200", "400"]
    assert float(rows[2][2]) == table[(400, 16)]


def test_sweep_trend():
    table = sweep(RunConfig(example=1, trials=1), [40, 320], [5000])
    assert table[(5000, 320)] <= table[(5000, 40)]


def test_grid_rows_and_columns(tmp_path):
    geom = example(1).problem.geom
    f = lambda x, t, s: x[:, 0] + s  # noqa: E731
    (path,) = dump_grid(f, f, geom, 2, tmp_path)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert all(r["u_rho"] == r["u_exact"] and float(r["abs_err"]) == 0.0 for r in rows)


def test_grid_moving_interface_at_final_time(tmp_path):
    geom = example(6).problem.geom
    f = lambda x, t, s: np.zeros(len(x))  # noqa: E731
    paths = dump_grid(f, f, geom, 21, tmp_path)
    assert len(paths) == 5
    with open(tmp_path / "grid_t1.csv") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        rad = np.hypot(float(r["x"]), float(r["y"]))
        if abs(rad - 0.8) > 1e-9:
            assert int(r["subdomain"]) == (0 if rad < 0.8 else 1)


def test_grid_high_dimension_slice(tmp_path):
    geom = example(4, d=6).problem.geom
    f = lambda x, t, s: x.sum(axis=1)  # noqa: E731
    (path,) = dump_grid(f, f, geom, 3, tmp_path)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 9
    assert all(float(r["x6"]) == 0.5 for r in rows)
    assert [int(r["subdomain"]) for r in rows] == [0, 0, 0, 1, 1, 1, 1, 1, 1]


def test_cli_flags_map_to_config():
    args = build_parser().parse_args(
        ["run", "--example", "1", "--m", "40", "--n-points", "500", "--beta", "1,10", "--r1", "1.6", "--r2", "0.7",
         "--gamma", "20", "--set", "solver.method=qr", "--trials", "2"]
    )
    cfg = config_from_args(args)
    assert (cfg.m, cfg.N, cfg.beta, cfg.r, cfg.gamma, cfg.solver, cfg.trials) == (
        40, 500, (1.0, 10.0), (1.6, 0.7), 20.0, "qr", 2)


def test_cli_run(tmp_path, capsys):
    assert main(["run", "--example", "1", "--m", "16", "--n-points", "300", "--trials", "1", "--out", str(tmp_path),
                 "--grid", "5"]) == 0
    out = capsys.readouterr().out
    assert "mean relative L2 error" in out
    assert (tmp_path / "grid.csv").exists()


def test_cli_rejects_bad_key(capsys):
    assert main(["run", "--set", "nope=1"]) == 2
    assert "unknown config key" in capsys.readouterr().err


def test_cli_sweep(tmp_path):
    assert main(["sweep", "--example", "1", "--trials", "1", "--m-grid", "8", "--n-grid", "100,200",
                 "--out", str(tmp_path)]) == 0
    assert (tmp_path / "sweep.csv").exists()


@pytest.mark.xfail(strict=True, reason="this implementation is about 20x more accurate than the published 1.89e-2 "
                                       "at m=40, N=500; see the decisions ledger")
def test_small_example1_within_an_order_of_published_value():
    man = run(RunConfig(example=1, m=40, N=500), write=False)
    assert 1.89e-3 <= man.mean_error <= 1.89e-1
