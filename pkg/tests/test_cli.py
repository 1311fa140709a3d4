import json
import math

import numpy as np
import pytest

from invsource import cli
from invsource.cli import (
    ConvergenceRow,
    RunConfig,
    attach_rates,
    format_surface,
    format_table,
    main,
    parse_surface,
    parse_table,
    read_config,
    run_convergence,
    run_surface,
)
from invsource.exceptions import DomainError, SingularSystemError

SMALL = dict(alpha=0.5, deltas=[2.0, 4.0], n_values=[10, 20, 40])


def small_rows():
    return run_convergence(RunConfig(**SMALL))


def test_csv_layout():
    rows = small_rows()
    text = format_table(rows)
    lines = text.split("\n")
    assert lines[0] == "N,delta,error,rate"
    assert text.endswith("\n") and "\r" not in text
    assert lines[1].endswith(",")  # first row of a column has no rate
    assert len(lines) == len(rows) + 2
    mant = lines[2].split(",")[2].split("e")[0]
    assert len(mant.replace(".", "").lstrip("-")) >= 5


def test_one_row_table_is_two_lines():
    text = format_table([ConvergenceRow(10, 2.0, 1.234567e-3)])
    assert text.splitlines() == ["N,delta,error,rate", "10,2,1.234567e-03,"]


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip(fmt):
    rows = small_rows()
    back = parse_table(format_table(rows, fmt), fmt)
    assert [(r.n, r.delta) for r in back] == [(r.n, r.delta) for r in rows]
    for a, b in zip(rows, back):
        assert b.error == pytest.approx(a.error, rel=1e-6 if fmt == "csv" else 0)
        assert (a.rate is None) == (b.rate is None)
        if a.rate is not None:
            assert b.rate == pytest.approx(a.rate, abs=1e-4)
    if fmt == "json":
        assert format_table(back, fmt) == format_table(rows, fmt)


def test_rates_match_error_column():
    back = parse_table(format_table(small_rows()))
    for prev, row in zip(back, back[1:]):
        if row.rate is not None:
            assert row.rate == pytest.approx(math.log2(prev.error / row.error), abs=1e-3)


def test_rates_need_doubling():
    rows = attach_rates([ConvergenceRow(10, 1.0, 1e-2), ConvergenceRow(30, 1.0, 1e-3), ConvergenceRow(60, 1.0, 2.5e-4)])
    assert rows[0].rate is None and rows[1].rate is None
    assert rows[2].rate == pytest.approx(2.0)


def test_rate_law_and_measures():
    cfg = RunConfig(alpha=0.5, deltas=[4.0], n_values=[40, 80, 160])
    rates = {}
    for m in ("closure", "fine", "nodes"):
        cfg.measure = m
        rates[m] = run_convergence(cfg)[-1].rate
    assert rates["closure"] == pytest.approx(2.0, abs=0.1)
    assert abs(rates["fine"] - rates["nodes"]) <= 0.05


def test_failed_cell_is_marked(monkeypatch, tmp_path, capsys):
    real = cli.solve_vie

    def flaky(spec, grid):
        if grid.capital_n == 20:
            raise SingularSystemError("forced")
        return real(spec, grid)

    monkeypatch.setattr(cli, "solve_vie", flaky)
    out = tmp_path / "t.json"
    code = main(["converge", "--alpha", "0.5", "--delta", "2", "--N", "10,20,40", "--format", "json", "--out", str(out)])
    assert code == 2
    data = json.loads(out.read_text())
    assert data[1]["error"] is None and data[1]["failed"] == "forced"
    assert data[2]["error"] > 0 and data[2]["rate"] is None


def test_deterministic_output(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["converge", "--alpha", "0.67", "--delta", "3", "--N", "10,20", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nalpha = 0.67\ndelta = 1, 3\nN = 10,20\nformat = json\n", encoding="utf-8")
    assert read_config(cfg) == {"alpha": 0.67, "deltas": [1.0, 3.0], "n_values": [10, 20], "fmt": "json"}
    out = tmp_path / "o.csv"
    assert main(["converge", "--config", str(cfg), "--delta", "2", "--format", "csv", "--out", str(out)]) == 0
    rows = parse_table(out.read_text())
    assert {r.delta for r in rows} == {2.0} and [r.n for r in rows] == [10, 20]
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    with pytest.raises(DomainError):
        read_config(bad)
    assert main(["converge", "--config", str(bad)]) == 1
    assert main(["converge", "--config", str(tmp_path / "missing.cfg")]) == 1


@pytest.mark.parametrize("argv", [["converge", "--delta", "0.5"], ["converge", "--N", "20,10"],
                                  ["converge", "--alpha", "0.8", "--gamma", "0.5"]])
def test_invalid_config(argv):
    assert main(argv) == 1


def test_surface_option_parsing():
    assert parse_surface("41,0.26,1") == (41, 0.26, 1.0)
    for bad in ("41,1,0.5", "1,0,1", "4.5,0,1", "41,0.2"):
        with pytest.raises(DomainError):
            parse_surface(bad)


def surface_max(alpha, gam, n, window, nx=11):
    rows = run_surface(RunConfig(alpha=alpha, gamma_param=gam, deltas=[2.0], n_values=[n], surface=(nx, *window),
                                 h_rule="midpoint"))
    return rows, max(r[4] for r in rows), max(abs(r[2]) for r in rows)


def test_surface_error_decreases():
    _, e1, _ = surface_max(0.5, 1.0, 20, (0.26, 1.0))
    _, e2, _ = surface_max(0.5, 1.0, 40, (0.26, 1.0))
    assert e2 < e1


def test_surface_blow_up_and_boundary():
    rows_small, _, big = surface_max(0.5, 0.5, 160, (1e-4, 1.6e-3))
    rows_large, _, moderate = surface_max(0.5, 0.5, 160, (0.26, 1.0))
    assert big > moderate
    for rows in (rows_small, rows_large):
        arr = np.array(rows)
        for t in np.unique(arr[:, 1]):
            at_t = arr[arr[:, 1] == t]
            assert at_t[0, 0] == 0.0 and at_t[-1, 0] == 1.0
            assert at_t[0, 2] == pytest.approx(at_t[-1, 2], rel=1e-13)
            assert at_t[0, 3] == at_t[-1, 3]


def test_surface_window_selects_nodes():
    rows, _, _ = surface_max(0.5, 1.0, 20, (0.5, 1.0), nx=3)
    ts = sorted({r[1] for r in rows})
    nodes = (np.arange(21) / 20) ** 2
    assert ts == pytest.approx([t for t in nodes if 0.5 < t <= 1.0])


def test_surface_cli(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["surface", "--N", "20", "--surface", "5,0.8,1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x,t,exact_u,approx_u,abs_diff"
    assert len(lines) == 1 + 5 * 3  # nodes 0.81, 0.9025, 1
    text = format_surface([(0.0, 1.0, 2.0, 2.0, 0.0)], "json")
    assert json.loads(text) == [{"x": 0.0, "t": 1.0, "exact_u": 2.0, "approx_u": 2.0, "abs_diff": 0.0}]
    assert main(["surface", "--delta", "1,2", "--out", str(out)]) == 1


def test_surface_needs_options():
    with pytest.raises(DomainError):
        run_surface(RunConfig(deltas=[2.0], n_values=[10]))
