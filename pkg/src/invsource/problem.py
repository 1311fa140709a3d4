"""Problem data, the H and G functions of the integral equation, and the
exact weakly singular moment integrals.

The spatial bases on [0, 1] with ``lambda_i = 2*pi*i`` are

    phi_10 = 2,  phi_1i = 4(1-x) sin(lambda_i x),  phi_2i = 4 cos(lambda_i x)
    psi_10 = x,  psi_1i = sin(lambda_i x),          psi_2i = x cos(lambda_i x)

and the data ``h(x,t)`` and ``g(x)`` are given by finitely many coefficients
in the phi basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import mlf
from .exceptions import DomainError
from .mesh import CollocationGrid

# far-field switch for kernel_moments: an interval [a, b] is integrated by
# Gauss-Legendre when (b - a) <= FAR_RATIO * (t - b)
FAR_RATIO = 0.5
GAUSS_ORDER = 8

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GAUSS_ORDER)


def evaluate(f, t):
    """Evaluate a user coefficient function on an array, falling back to a loop."""
    t = np.asarray(t, dtype=float)
    try:
        v = np.asarray(f(t), dtype=float)
        return np.broadcast_to(v, t.shape).copy()
    except (TypeError, ValueError):
        return np.array([float(f(s)) for s in t.reshape(-1)]).reshape(t.shape)


def constant(c):
    """Coefficient function equal to c for every t."""
    c = float(c)
    return lambda t: np.full(np.shape(t), c)


@dataclass(frozen=True)
class FourierMode:
    """One (family, index) coefficient pair of h and g."""

    family: int
    index: int
    h_coeff: Callable = field(default_factory=lambda: constant(0.0))
    g_coeff: float = 0.0

    def __post_init__(self):
        if self.family not in (1, 2):
            raise DomainError(f"family must be 1 or 2, got {self.family!r}")
        if int(self.index) != self.index or self.index < 1:
            raise DomainError(f"mode index must be a positive integer, got {self.index!r}")

    @property
    def lam(self):
        return 2.0 * math.pi * self.index

    def h(self, t):
        return evaluate(self.h_coeff, t)


@dataclass(frozen=True)
class ProblemSpec:
    alpha: float
    gamma_param: float
    horizon: float = 1.0
    modes: Sequence[FourierMode] = ()
    h10: Callable = field(default_factory=lambda: constant(0.0))
    g10: float = 0.0
    dq_frac: Callable = field(default_factory=lambda: constant(0.0))
    sigma: float | None = None

    def __post_init__(self):
        if not (0.0 < self.alpha <= self.gamma_param <= 1.0):
            raise DomainError(
                f"need 0 < alpha <= gamma <= 1, got alpha={self.alpha!r}, gamma={self.gamma_param!r}"
            )
        if not (self.horizon > 0):
            raise DomainError("horizon must be positive")
        object.__setattr__(self, "modes", tuple(self.modes))
        seen = set()
        for m in self.modes:
            key = (m.family, m.index)
            if key in seen:
                raise DomainError(f"duplicate mode {key}")
            seen.add(key)

    def family(self, k):
        return [m for m in self.modes if m.family == k]

    def mode(self, k, i):
        for m in self.modes:
            if m.family == k and m.index == i:
                return m
        return None

    def suggested_delta(self):
        """Grading exponent 2/sigma that restores second order, if sigma is known."""
        if not self.sigma:
            return None
        return max(1.0, 2.0 / self.sigma)


# ---------------------------------------------------------------- bases


def phi(k, i, x):
    x = np.asarray(x, dtype=float)
    lam = 2.0 * math.pi * i
    if k == 1 and i == 0:
        return np.full_like(x, 2.0)
    if k == 1:
        return 4.0 * (1.0 - x) * np.sin(lam * x)
    if k == 2 and i >= 1:
        return 4.0 * np.cos(lam * x)
    raise DomainError(f"no phi basis function ({k}, {i})")


def psi_basis(k, i, x):
    x = np.asarray(x, dtype=float)
    lam = 2.0 * math.pi * i
    if k == 1 and i == 0:
        return x.copy()
    if k == 1:
        return np.sin(lam * x)
    if k == 2 and i >= 1:
        return x * np.cos(lam * x)
    raise DomainError(f"no psi basis function ({k}, {i})")


def phi_integral(k, i):
    """Closed form of the integral of phi_ki over [0, 1]."""
    if k == 1 and i == 0:
        return 2.0
    if k == 1:
        return 2.0 / (math.pi * i)
    return 0.0


# ---------------------------------------------------------------- H, G, E


def h_eval(spec: ProblemSpec, t):
    """H(t), the integral over x of h(x, t)."""
    out = 2.0 * evaluate(spec.h10, t)
    for m in spec.family(1):
        out = out + phi_integral(1, m.index) * m.h(t)
    return out if np.ndim(out) else float(out)


def _h_scale(spec, t):
    out = 2.0 * np.abs(evaluate(spec.h10, t))
    for m in spec.family(1):
        out = out + phi_integral(1, m.index) * np.abs(m.h(t))
    return out


def _theta_arr(alpha, gam, lam_sq, t):
    return t ** (gam - 1.0) * mlf.ml_neg(alpha, gam, lam_sq * t**alpha)


def g_eval(spec: ProblemSpec, t):
    """G(t) = D^{alpha,gamma} q(t) + 4 sum_i lambda_i g_1i Theta^gamma_i(t)."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("G is defined for t > 0 only")
    out = evaluate(spec.dq_frac, t)
    for m in spec.family(1):
        if m.g_coeff != 0.0:
            out = out + 4.0 * m.lam * m.g_coeff * _theta_arr(spec.alpha, spec.gamma_param, m.lam**2, t)
    return out if np.ndim(out) else float(out)


def kernel_eval(spec: ProblemSpec, t: float, tau: float) -> float:
    """Kernel E(t, tau) of the integral equation (diagnostic use)."""
    if not (tau < t):
        raise DomainError("kernel_eval needs tau < t")
    total = 0.0
    for m in spec.family(1):
        h = float(m.h(np.array([tau]))[0])
        total += 4.0 * m.lam * h * mlf.theta(spec.alpha, spec.alpha, m.lam**2, t - tau)
    return total


# ---------------------------------------------------------------- Psi


def psi(alpha: float, t: float, tau: float, lam: float, nu: float, c: float) -> float:
    """Psi^alpha(t, tau, lam, L) for the line L(s) = nu*s + c."""
    if tau > t:
        raise DomainError("psi needs tau <= t")
    if not (lam > 0):
        raise DomainError("psi needs lam > 0")
    u = t - tau
    line = nu * tau + c
    if u == 0:
        return line
    y = -lam * u**alpha
    return mlf.ml(alpha, 1.0, y) * line + nu * u * mlf.ml(alpha, 2.0, y)


def _psi_reduced(alpha, u, lam, line, nu):
    # Psi minus L(t); vanishes at u = 0 and avoids the 1 - E cancellation
    if u == 0:
        return 0.0
    y = lam * u**alpha
    return -y * (mlf.ml_neg(alpha, alpha + 1.0, y) * line + nu * u * mlf.ml_neg(alpha, alpha + 2.0, y))


def psi_increment(alpha: float, t: float, a: float, b: float, lam: float, nu: float, c: float) -> float:
    """Psi(t, b) - Psi(t, a), i.e. lam * int_a^b (t-s)^(alpha-1) E_{alpha,alpha}(-lam (t-s)^alpha) L(s) ds."""
    if not (a <= b <= t):
        raise DomainError("psi_increment needs a <= b <= t")
    if not (lam > 0):
        raise DomainError("psi needs lam > 0")
    rb = _psi_reduced(alpha, t - b, lam, nu * b + c, nu)
    ra = _psi_reduced(alpha, t - a, lam, nu * a + c, nu)
    return float(rb - ra)


def a_coeff(spec: ProblemSpec, grid: CollocationGrid, m: int, s: int, t_target: float) -> float:
    """Weight of w(t_{m,s}) in the history integral at t_target (m, s 1-based).

    Equals 4 sum_i h_1i(mid_m) / lambda_i times the Psi increment over
    (t_{m-1}, min(t_target, t_m)); evaluated through :func:`kernel_moments`,
    the same path the solver uses.
    """
    if not (1 <= m <= grid.capital_n) or s not in (1, 2):
        raise IndexError(f"bad (m, s) = ({m}, {s})")
    if not (t_target > grid.mesh.nodes[m - 1]):
        raise DomainError("a_coeff needs t_target > t_{m-1}")
    mid = grid.mesh.midpoints[m - 1 : m]
    sign = -1.0 if s == 1 else 1.0
    total = 0.0
    for mode in spec.family(1):
        h = float(mode.h(mid)[0])
        if h == 0.0:
            continue
        lam2 = mode.lam**2
        m0, m1 = kernel_moments(spec.alpha, spec.alpha, 1, lam2, [t_target], grid)
        total += 4.0 * mode.lam * h * (0.5 * m0[0, m - 1] + sign * m1[0, m - 1])
    return total


# ---------------------------------------------------------------- moments


def _antiderivatives(alpha, beta, rho, lam, u):
    """P(u) and Q(u), the first and second antiderivatives (from 0) of the
    kernel u**(beta-1) * E^rho_{alpha,beta}(-lam u**alpha); zero where u <= 0."""
    p = np.zeros_like(u)
    q = np.zeros_like(u)
    pos = u > 0
    up = u[pos]
    x = lam * up**alpha
    p[pos] = up**beta * mlf.ml_neg(alpha, beta + 1.0, x, rho)
    q[pos] = up ** (beta + 1.0) * mlf.ml_neg(alpha, beta + 2.0, x, rho)
    return p, q


def _kernel(alpha, beta, rho, lam, u):
    return u ** (beta - 1.0) * mlf.ml_neg(alpha, beta, lam * u**alpha, rho)


def kernel_moments(alpha, beta, rho, lam, targets, grid: CollocationGrid, far_ratio=FAR_RATIO):
    """Exact integrals of the kernel k(u) = u**(beta-1) E^rho_{alpha,beta}(-lam u**alpha)
    against the local basis.

    For every target t and interval m this returns

        M0[t, m] = int k(t - s) ds,
        M1[t, m] = int k(t - s) (s - c_m) / zeta_m ds,

    over s in (t_{m-1}, min(t, t_m)), zero when t <= t_{m-1}; ``c_m`` is the
    centre of the two collocation points, so that int k L_{m,1} = M0/2 - M1 and
    int k L_{m,2} = M0/2 + M1.  Intervals adjacent to the target use the closed
    antiderivatives; intervals that are short compared with their distance from
    the target use Gauss-Legendre, which avoids the cancellation the
    antiderivative differences suffer on strongly graded meshes.
    """
    t = np.asarray(targets, dtype=float).reshape(-1)
    nodes = grid.mesh.nodes
    left, right = nodes[:-1], nodes[1:]
    cen, zeta = grid.centres, grid.zeta

    p, q = _antiderivatives(alpha, beta, rho, lam, t[:, None] - nodes[None, :])
    pa, pb, qa, qb = p[:, :-1], p[:, 1:], q[:, :-1], q[:, 1:]
    m0 = pa - pb
    m1 = (pa * (left - cen) - pb * (right - cen) + qa - qb) / zeta

    ub = t[:, None] - right[None, :]
    far = (ub > 0) & ((right - left)[None, :] <= far_ratio * ub)
    if far.any():
        ti, mi = np.nonzero(far)
        g0, g1 = _gauss_moments(alpha, beta, rho, lam, t[ti], left[mi], right[mi], cen[mi], zeta[mi])
        m0[ti, mi] = g0
        m1[ti, mi] = g1
    return m0, m1


def _gauss_moments(alpha, beta, rho, lam, t, a, b, c, z, chunk=1 << 16):
    g0 = np.empty_like(t)
    g1 = np.empty_like(t)
    for lo in range(0, t.size, chunk):
        sl = slice(lo, lo + chunk)
        half = 0.5 * (b[sl] - a[sl])
        s = (0.5 * (a[sl] + b[sl]))[:, None] + half[:, None] * _GL_X[None, :]
        k = _kernel(alpha, beta, rho, lam, t[sl, None] - s) * _GL_W[None, :]
        g0[sl] = half * k.sum(axis=1)
        g1[sl] = half * (k * (s - c[sl, None])).sum(axis=1) / z[sl]
    return g0, g1
