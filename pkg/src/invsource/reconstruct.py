"""Reconstruction of the field u(x, t_n) from a collocation source.

Every coefficient is a convolution of (w h_ki) with a weakly singular kernel
plus a term driven by the initial data g.  The h-coefficients are frozen at
interval midpoints (the solver's convention) unless ``h_rule="collocation"``
is requested, and the kernel integrals against the local Lagrange basis are
exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import mlf
from .collocation import PiecewiseLinear
from .exceptions import DomainError
from .mesh import CollocationGrid
from .problem import ProblemSpec, evaluate, kernel_moments


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Approximate coefficients at the mesh nodes t_1..t_N (row n-1 holds t_n)."""

    times: np.ndarray
    u10: np.ndarray
    u1: dict = field(default_factory=dict)
    u2: dict = field(default_factory=dict)


H_RULES = ("midpoint", "collocation")


def _conv(spec, grid, sol, hfun, beta, rho, lam_sq, targets, h_rule="midpoint"):
    """int_0^t h(s) w~(s) k(t - s) ds with k(u) = u^(beta-1) E^rho_{alpha,beta}(-lam_sq u^alpha).

    ``midpoint`` freezes h at each interval midpoint, as the solver does;
    ``collocation`` replaces the product h w~ by its linear interpolant
    through the two collocation points of each interval.
    """
    if h_rule == "midpoint":
        h = evaluate(hfun, grid.mesh.midpoints)[:, None]
    elif h_rule == "collocation":
        h = evaluate(hfun, grid.points)
    else:
        raise DomainError(f"h_rule must be one of {H_RULES}, got {h_rule!r}")
    if not np.any(h):
        return np.zeros(len(targets))
    m0, m1 = kernel_moments(spec.alpha, beta, rho, lam_sq, targets, grid)
    hw = h * sol.values
    return m0 @ (0.5 * (hw[:, 0] + hw[:, 1])) + m1 @ (hw[:, 1] - hw[:, 0])


def _targets(grid, n):
    if n is None:
        return grid.mesh.nodes[1:]
    if not (1 <= n <= grid.capital_n):
        raise DomainError(f"node index must lie in 1..{grid.capital_n}, got {n}")
    return grid.mesh.nodes[n : n + 1]


def _theta(alpha, gam, lam_sq, t, rho=1, shift=0.0):
    # t^(gam + shift - 1) E^rho_{alpha, gam + shift}(-lam_sq t^alpha)
    b = gam + shift
    return t ** (b - 1.0) * mlf.ml_neg(alpha, b, lam_sq * t**alpha, rho)


def _u1(spec, grid, sol, i, t, h_rule="midpoint"):
    mode = spec.mode(1, i)
    if mode is None:
        raise DomainError(f"no family-1 mode with index {i}")
    lam2 = mode.lam**2
    out = _conv(spec, grid, sol, mode.h_coeff, spec.alpha, 1, lam2, t, h_rule)
    if mode.g_coeff:
        out = out + mode.g_coeff * _theta(spec.alpha, spec.gamma_param, lam2, t)
    return out


def _u10(spec, grid, sol, t, h_rule="midpoint"):
    # omega_alpha kernel: beta = alpha, lam = 0 gives u^(alpha-1)/Gamma(alpha)
    out = _conv(spec, grid, sol, spec.h10, spec.alpha, 1, 0.0, t, h_rule)
    if spec.g10:
        out = out + spec.g10 * t ** (spec.gamma_param - 1.0) / math.gamma(spec.gamma_param)
    return out


def _u2(spec, grid, sol, i, t, h_rule="midpoint"):
    mode = spec.mode(2, i)
    partner = spec.mode(1, i)
    if mode is None:
        raise DomainError(f"no family-2 mode with index {i}")
    a = spec.alpha
    lam = mode.lam
    lam2 = lam**2
    out = _conv(spec, grid, sol, mode.h_coeff, a, 1, lam2, t, h_rule)
    if mode.g_coeff:
        out = out + mode.g_coeff * _theta(a, spec.gamma_param, lam2, t)
    if partner is not None:
        coupling = _conv(spec, grid, sol, partner.h_coeff, 2.0 * a, 2, lam2, t, h_rule)
        if partner.g_coeff:
            coupling = coupling + partner.g_coeff * _theta(a, spec.gamma_param, lam2, t, rho=2, shift=a)
        out = out - 2.0 * lam * coupling
    return out


def coeff_u1(spec: ProblemSpec, grid: CollocationGrid, sol: PiecewiseLinear, i: int, n: int,
             h_rule: str = "midpoint") -> float:
    """Approximate u_1i(t_n)."""
    return float(_u1(spec, grid, sol, i, _targets(grid, n), h_rule)[0])


def coeff_u10(spec: ProblemSpec, grid: CollocationGrid, sol: PiecewiseLinear, n: int,
              h_rule: str = "midpoint") -> float:
    """Approximate u_10(t_n)."""
    return float(_u10(spec, grid, sol, _targets(grid, n), h_rule)[0])


def coeff_u2(spec: ProblemSpec, grid: CollocationGrid, sol: PiecewiseLinear, i: int, n: int,
             h_rule: str = "midpoint") -> float:
    """Approximate u_2i(t_n), including the coupling to the family-1 partner of index i."""
    return float(_u2(spec, grid, sol, i, _targets(grid, n), h_rule)[0])


def coefficient_table(spec: ProblemSpec, grid: CollocationGrid, sol: PiecewiseLinear,
                      h_rule: str = "midpoint") -> CoefficientTable:
    """All coefficients at every mesh node t_1..t_N."""
    t = _targets(grid, None)
    u1 = {m.index: _u1(spec, grid, sol, m.index, t, h_rule) for m in spec.family(1)}
    u2 = {m.index: _u2(spec, grid, sol, m.index, t, h_rule) for m in spec.family(2)}
    return CoefficientTable(t.copy(), _u10(spec, grid, sol, t, h_rule), u1, u2)


def eval_u(spec: ProblemSpec, table: CoefficientTable, x, n: int):
    """Field value at position(s) x and node t_n (1-based, row n-1 of the table)."""
    if not (1 <= n <= len(table.times)):
        raise DomainError(f"node index must lie in 1..{len(table.times)}, got {n}")
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise DomainError("x must lie in [0, 1]")
    k = n - 1
    out = 2.0 * table.u10[k] * np.ones_like(x)
    for i, vals in table.u1.items():
        out = out + vals[k] * 4.0 * (1.0 - x) * np.sin(2.0 * math.pi * i * x)
    for i, vals in table.u2.items():
        out = out + vals[k] * 4.0 * np.cos(2.0 * math.pi * i * x)
    return float(out) if out.ndim == 0 else out
