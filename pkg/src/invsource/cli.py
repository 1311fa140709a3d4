"""Command line driver: convergence sweeps and surface dumps on the benchmark.

    invsource converge --alpha 0.4 --delta 1,2,3,4,5 --N 10,20,40,80,160,320
    invsource surface --alpha 0.5 --gamma 0.5 --delta 2 --N 160 --surface 41,0.26,1

Settings come from an optional flat ``key = value`` file (``--config``);
command line flags override it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .benchmark import BenchmarkCase, exact_u, exact_w, make_problem
from .collocation import eval_w, limit_at_origin, solve_vie
from .exceptions import DomainError
from .mesh import GAUSS_XI, build_graded, collocation_points, fine_grid
from .reconstruct import H_RULES, coefficient_table, eval_u

log = logging.getLogger("invsource")

MEASURES = ("closure", "fine", "nodes")


@dataclass
class RunConfig:
    alpha: float = 0.4
    gamma_param: float = 1.0
    deltas: list = field(default_factory=lambda: [1.0, 2.0, 3.0, 4.0, 5.0])
    n_values: list = field(default_factory=lambda: [10, 20, 40, 80, 160, 320])
    horizon: float = 1.0
    xi: tuple = GAUSS_XI
    out: str | None = None
    fmt: str = "csv"
    surface: tuple | None = None  # (x points, t_lo, t_hi)
    measure: str = "closure"
    h_rule: str = "midpoint"

    def validate(self):
        if not (0.0 < self.alpha <= self.gamma_param <= 1.0):
            raise DomainError("need 0 < alpha <= gamma <= 1")
        if any(d < 1 for d in self.deltas):
            raise DomainError("every delta must be >= 1")
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise DomainError("N values must be positive integers")
        if list(self.n_values) != sorted(self.n_values):
            raise DomainError("N values must be ascending")
        if self.fmt not in ("csv", "json"):
            raise DomainError(f"format must be csv or json, got {self.fmt!r}")
        if self.measure not in MEASURES:
            raise DomainError(f"measure must be one of {MEASURES}")
        if self.h_rule not in H_RULES:
            raise DomainError(f"h_rule must be one of {H_RULES}")
        return self


@dataclass
class ConvergenceRow:
    n: int
    delta: float
    error: float
    rate: float | None = None
    failure: str | None = None


# ---------------------------------------------------------------- config


def _floats(text):
    return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


def parse_surface(text):
    """'NX,T_LO,T_HI' -> (int, float, float)."""
    parts = _floats(text)
    if len(parts) != 3 or parts[0] < 2 or int(parts[0]) != parts[0] or not (0 <= parts[1] < parts[2]):
        raise DomainError(f"surface expects 'NX,T_LO,T_HI' with NX >= 2 and T_LO < T_HI, got {text!r}")
    return int(parts[0]), parts[1], parts[2]


_KEYS = {
    "alpha": ("alpha", float),
    "gamma": ("gamma_param", float),
    "delta": ("deltas", _floats),
    "deltas": ("deltas", _floats),
    "n": ("n_values", _ints),
    "n_values": ("n_values", _ints),
    "t": ("horizon", float),
    "horizon": ("horizon", float),
    "xi": ("xi", lambda s: tuple(_floats(s))),
    "out": ("out", str),
    "format": ("fmt", lambda s: s.strip().lower()),
    "surface": ("surface", parse_surface),
    "measure": ("measure", str),
    "h_rule": ("h_rule", str),
}


def read_config(path):
    """Flat key = value file; '#' starts a comment."""
    settings = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key = value")
            key, value = (p.strip() for p in line.split("=", 1))
            if key.lower() not in _KEYS:
                raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
            name, conv = _KEYS[key.lower()]
            settings[name] = conv(value)
    return settings


# ---------------------------------------------------------------- runs


def source_error(case, sol, grid, measure="closure"):
    """Max |w - w~| over the error set.

    ``fine`` is the fine grid (collocation points, midpoints, nodes);
    ``closure`` adds t = 0 with w~ continued from the first interval;
    ``nodes`` uses the right nodes only.
    """
    pts = fine_grid(grid) if measure in ("fine", "closure") else grid.mesh.nodes[1:]
    err = float(np.max(np.abs(exact_w(case, pts) - eval_w(sol, pts))))
    if measure == "closure":
        err = max(err, abs(limit_at_origin(sol) - exact_w(case, 0.0)))
    return err


def attach_rates(rows):
    """Rate log2(e_prev / e) on rows whose N doubles the previous N of the same delta."""
    prev = {}
    for row in rows:
        p = prev.get(row.delta)
        row.rate = None
        if p is not None and row.n == 2 * p.n and p.failure is None and row.failure is None:
            if p.error > 0 and row.error > 0:
                row.rate = math.log2(p.error / row.error)
        prev[row.delta] = row
    return rows


def run_convergence(config: RunConfig):
    config.validate()
    case = BenchmarkCase(config.alpha, config.gamma_param)
    spec = make_problem(config.alpha, config.gamma_param, config.horizon)
    rows = []
    for delta in config.deltas:
        for n in config.n_values:
            try:
                grid = collocation_points(build_graded(n, delta, config.horizon), *config.xi)
                sol = solve_vie(spec, grid)
                err = source_error(case, sol, grid, config.measure)
                rows.append(ConvergenceRow(n, delta, err))
            except (ArithmeticError, ValueError) as exc:
                log.error("cell N=%d delta=%g failed: %s", n, delta, exc)
                rows.append(ConvergenceRow(n, delta, float("nan"), failure=str(exc)))
            else:
                log.info("N=%d delta=%g error=%.4e", n, delta, err)
    return attach_rates(rows)


def run_surface(config: RunConfig):
    """Rows (x, t_n, exact u, approximate u, |difference|) for nodes inside the window."""
    config.validate()
    if config.surface is None:
        raise DomainError("surface options not set")
    if len(config.deltas) != 1 or len(config.n_values) != 1:
        raise DomainError("surface needs exactly one delta and one N")
    nx, t_lo, t_hi = config.surface
    case = BenchmarkCase(config.alpha, config.gamma_param)
    spec = make_problem(config.alpha, config.gamma_param, config.horizon)
    grid = collocation_points(build_graded(config.n_values[0], config.deltas[0], config.horizon), *config.xi)
    sol = solve_vie(spec, grid)
    table = coefficient_table(spec, grid, sol, config.h_rule)
    xs = np.linspace(0.0, 1.0, nx)
    rows = []
    for n, t in enumerate(table.times, start=1):
        if not (t_lo < t < t_hi or math.isclose(t, t_hi)):
            continue
        approx = eval_u(spec, table, xs, n)
        exact = exact_u(case, xs, t)
        for x, e, a in zip(xs, exact, approx):
            rows.append((float(x), float(t), float(e), float(a), abs(float(e) - float(a))))
    return rows


# ---------------------------------------------------------------- output


def _fmt(v):
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else f"{v:.6e}"


def format_table(rows, fmt="csv"):
    if fmt == "json":
        data = []
        for r in rows:
            item = {"N": r.n, "delta": r.delta, "error": None if r.failure else r.error, "rate": r.rate}
            if r.failure:
                item["failed"] = r.failure
            data.append(item)
        return json.dumps(data, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "delta", "error", "rate"])
    for r in rows:
        w.writerow([r.n, f"{r.delta:g}", _fmt(None if r.failure else r.error),
                    "" if r.rate is None else f"{r.rate:.4f}"])
    return buf.getvalue()


def parse_table(text, fmt="csv"):
    """Inverse of format_table (failure messages are not kept for CSV)."""
    rows = []
    if fmt == "json":
        for d in json.loads(text):
            err = d["error"]
            rows.append(ConvergenceRow(int(d["N"]), float(d["delta"]), float("nan") if err is None else float(err),
                                       d["rate"], d.get("failed")))
        return rows
    for rec in csv.DictReader(io.StringIO(text)):
        err = float(rec["error"]) if rec["error"] else float("nan")
        rate = float(rec["rate"]) if rec["rate"] else None
        rows.append(ConvergenceRow(int(rec["N"]), float(rec["delta"]), err, rate,
                                   None if rec["error"] else "failed"))
    return rows


def format_surface(rows, fmt="csv"):
    names = ["x", "t", "exact_u", "approx_u", "abs_diff"]
    if fmt == "json":
        return json.dumps([dict(zip(names, r)) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for r in rows:
        w.writerow([f"{v:.10e}" for v in r])
    return buf.getvalue()


def emit(text, path=None):
    """Write to path (UTF-8, LF) or stdout."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# ---------------------------------------------------------------- main


def build_parser():
    parser = argparse.ArgumentParser(prog="invsource", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("converge", "error table for the benchmark source"),
                           ("surface", "exact and reconstructed field on an x-t grid")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="key = value settings file")
        p.add_argument("--alpha", type=float)
        p.add_argument("--gamma", dest="gamma_param", type=float)
        p.add_argument("--delta", dest="deltas", type=_floats, help="comma separated grading exponents")
        p.add_argument("--N", dest="n_values", type=_ints, help="comma separated interval counts")
        p.add_argument("--T", dest="horizon", type=float)
        p.add_argument("--xi", type=lambda s: tuple(_floats(s)), help="relative collocation positions 'xi1,xi2'")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", dest="fmt", choices=["csv", "json"])
        p.add_argument("--surface", type=parse_surface, help="'NX,T_LO,T_HI'")
        p.add_argument("--measure", choices=MEASURES, help="error set for converge")
        p.add_argument("--h-rule", dest="h_rule", choices=H_RULES, help="h quadrature for the field")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def make_config(args):
    settings = read_config(args.config) if args.config else {}
    for key in ("alpha", "gamma_param", "deltas", "n_values", "horizon", "xi", "out", "fmt", "surface",
                "measure", "h_rule"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if args.command == "surface":
        settings.setdefault("deltas", [2.0])
        settings.setdefault("n_values", [160])
        settings.setdefault("alpha", 0.5)
        settings.setdefault("gamma_param", 1.0)
        settings.setdefault("surface", (41, 0.26, 1.0))
    return RunConfig(**settings).validate()


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = make_config(args)
        if args.command == "converge":
            rows = run_convergence(config)
            emit(format_table(rows, config.fmt), config.out)
            return 2 if any(r.failure for r in rows) else 0
        try:
            rows = run_surface(config)
        except ArithmeticError as exc:
            log.error("surface run failed: %s", exc)
            return 2
        emit(format_surface(rows, config.fmt), config.out)
        return 0
    except (DomainError, OSError) as exc:
        print(f"invsource: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
