"""Piecewise-linear discontinuous collocation for

    H(t) w(t) - int_0^t E(t, s) w(s) ds = G(t).

The history weights of every collocation target against every earlier
interval are assembled once (the kernel integrals are exact, the smooth
h-coefficient is frozen at interval midpoints), after which the march solves
one 2x2 system per interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, SingularSystemError, ZeroCoefficientError
from .mesh import CollocationGrid
from .problem import ProblemSpec, _h_scale, g_eval, h_eval, kernel_moments

DET_TOL = 1e-12
H_ZERO_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Collocation solution; values[n-1, j-1] = w(t_{n,j})."""

    grid: CollocationGrid
    values: np.ndarray

    def __call__(self, t):
        return eval_w(self, t)


def history_weights(spec: ProblemSpec, grid: CollocationGrid, targets):
    """Matrices A1, A2 with A_s[k, m-1] = a_{m,s}(targets[k])."""
    targets = np.asarray(targets, dtype=float).reshape(-1)
    n_int = grid.capital_n
    a1 = np.zeros((targets.size, n_int))
    a2 = np.zeros((targets.size, n_int))
    mids = grid.mesh.midpoints
    for mode in spec.family(1):
        h = mode.h(mids)
        if not np.any(h):
            continue
        lam2 = mode.lam**2
        # kernel lam^2 u^(alpha-1) E_{alpha,alpha}; the Psi increment is lam^2 times the moment
        m0, m1 = kernel_moments(spec.alpha, spec.alpha, 1, lam2, targets, grid)
        w = 4.0 * mode.lam * h  # 4 lam^-1 h * lam^2
        a1 += w * (0.5 * m0 - m1)
        a2 += w * (0.5 * m0 + m1)
    return a1, a2


def solve_vie(spec: ProblemSpec, grid: CollocationGrid) -> PiecewiseLinear:
    """March the collocation equations interval by interval."""
    x = grid.flat
    hval = np.asarray(h_eval(spec, x), dtype=float)
    bad = np.abs(hval) <= H_ZERO_TOL * _h_scale(spec, x)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise ZeroCoefficientError(f"H vanishes at collocation point t={x[k]!r}")
    gval = np.asarray(g_eval(spec, x), dtype=float)
    a1, a2 = history_weights(spec, grid, x)

    n_int = grid.capital_n
    w = np.zeros((n_int, 2))
    for n in range(n_int):
        rows = slice(2 * n, 2 * n + 2)
        f = gval[rows] + a1[rows, :n] @ w[:n, 0] + a2[rows, :n] @ w[:n, 1]
        m = np.diag(hval[rows]) - np.column_stack([a1[rows, n], a2[rows, n]])
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if not np.isfinite(det) or abs(det) < DET_TOL * np.abs(m).max() ** 2:
            raise SingularSystemError(
                f"2x2 system on interval {n + 1} is singular (det={det:.3e}); the step is too large"
            )
        w[n] = _solve2(m, f)
    w.flags.writeable = False
    return PiecewiseLinear(grid, w)


def _solve2(m, f):
    # elimination with row pivoting; a diagonal system gives f / diag exactly
    if abs(m[1, 0]) > abs(m[0, 0]):
        m, f = m[::-1], f[::-1]
    lead = m[1, 0] / m[0, 0]
    w1 = (f[1] - lead * f[0]) / (m[1, 1] - lead * m[0, 1])
    w0 = (f[0] - m[0, 1] * w1) / m[0, 0]
    return w0, w1


def eval_w(sol: PiecewiseLinear, t):
    """Evaluate the piecewise-linear solution on the half-open intervals (t_{n-1}, t_n]."""
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    n = sol.grid.mesh.interval_of(t) - 1  # raises DomainError outside (0, T]
    t1 = sol.grid.points[n, 0]
    t2 = sol.grid.points[n, 1]
    z = sol.grid.zeta[n]
    out = sol.values[n, 0] * (t2 - t) / z + sol.values[n, 1] * (t - t1) / z
    return float(out) if scalar else out


def limit_at_origin(sol: PiecewiseLinear) -> float:
    """Right limit of the solution at t = 0, i.e. the I_1 polynomial continued to 0."""
    t1, t2 = sol.grid.points[0]
    z = sol.grid.zeta[0]
    return float(sol.values[0, 0] * t2 / z - sol.values[0, 1] * t1 / z)


def residual(spec: ProblemSpec, grid: CollocationGrid, sol: PiecewiseLinear) -> float:
    """Max defect of the collocation equations over all collocation points."""
    if sol.grid is not grid and sol.values.shape != (grid.capital_n, 2):
        raise DomainError("solution does not belong to this grid")
    x = grid.flat
    a1, a2 = history_weights(spec, grid, x)
    wv = sol.values.reshape(-1)
    lhs = np.asarray(h_eval(spec, x)) * wv - a1 @ sol.values[:, 0] - a2 @ sol.values[:, 1]
    return float(np.max(np.abs(lhs - np.asarray(g_eval(spec, x)))))
