"""Closed-form test problem with a known source and field.

Data: h_10 = (l1^2 - 1)/(2 l1^2), h_11 = 1/(4 l1), h_21 = t, h_22 = 2,
g_22 = 1, D^{alpha,gamma} q = 1, so that H = G = 1 and the integral equation
reduces to w - w * Theta^alpha_1 = 1 with l1 = 2 pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError
from .mlf import ml_neg
from .problem import FourierMode, ProblemSpec, constant


@dataclass(frozen=True)
class BenchmarkCase:
    alpha: float
    gamma_param: float
    lambda1: float = field(default=2.0 * math.pi, init=False)
    lambda2: float = field(default=4.0 * math.pi, init=False)

    def __post_init__(self):
        if not (0.0 < self.alpha <= self.gamma_param <= 1.0):
            raise DomainError("need 0 < alpha <= gamma <= 1")

    @property
    def k1(self):
        return 1.0 / (self.lambda1**2 - 1.0)

    @property
    def k2(self):
        return self.lambda1**2 * self.k1

    @property
    def h10(self):
        return (self.lambda1**2 - 1.0) / (2.0 * self.lambda1**2)

    @property
    def h11(self):
        return 1.0 / (4.0 * self.lambda1)


def _identity(t):
    return np.asarray(t, dtype=float)


def make_problem(alpha: float, gamma_param: float, horizon: float = 1.0) -> ProblemSpec:
    case = BenchmarkCase(alpha, gamma_param)
    modes = (
        FourierMode(1, 1, constant(case.h11), 0.0),
        FourierMode(2, 1, _identity, 0.0),
        FourierMode(2, 2, constant(2.0), 1.0),
    )
    return ProblemSpec(
        alpha=alpha,
        gamma_param=gamma_param,
        horizon=horizon,
        modes=modes,
        h10=constant(case.h10),
        g10=0.0,
        dq_frac=constant(1.0),
        sigma=alpha,
    )


def _e(case, beta, x, rho=1):
    return ml_neg(case.alpha, beta, x, rho)


def exact_w(case: BenchmarkCase, t):
    """w(t) = [l1^2 - E_alpha((1 - l1^2) t^alpha)] / (l1^2 - 1)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("exact_w needs t >= 0")
    l1 = case.lambda1**2
    out = (l1 - _e(case, 1.0, (l1 - 1.0) * t**case.alpha)) / (l1 - 1.0)
    return float(out) if out.ndim == 0 else out


def w_conv_theta(case: BenchmarkCase, lam, t):
    """(w * Theta^alpha_i)(t) for eigenvalue lam (lam = 0 gives w * omega_alpha)."""
    a = case.alpha
    l1 = case.lambda1**2
    ta = t**a
    xc = (l1 - 1.0) * ta
    xi = lam**2 * ta
    br = (_e(case, 1.0, xc) + l1 * ta * _e(case, a + 1.0, xc)
          - _e(case, 1.0, xi) - l1 * ta * _e(case, a + 1.0, xi))
    return br / (lam**2 - l1 + 1.0)


def tw_conv_theta1(case: BenchmarkCase, t):
    """((s w(s)) * Theta^alpha_1)(t)."""
    a = case.alpha
    l1 = case.lambda1**2
    ta = t**a
    x1 = l1 * ta
    xc = (l1 - 1.0) * ta
    part = case.k2 * t ** (1.0 + a) * _e(case, 2.0 + a, x1)
    part = part + (a - 1.0) * (
        t * _e(case, 2.0, x1) - t * _e(case, 2.0, xc) + t ** (a + 1.0) * _e(case, 2.0 + a, xc, 2)
    )
    part = part - case.k1 * (
        t ** (1.0 - a) * _e(case, 2.0 - a, x1) - t ** (1.0 - a) * _e(case, 2.0 - a, xc) + t * _e(case, 2.0, xc, 2)
    )
    return part


def w_conv_prab(case: BenchmarkCase, t):
    """(w * s^(2 alpha - 1) E^2_{alpha,2 alpha}(-l1^2 s^alpha))(t)."""
    a = case.alpha
    l1 = case.lambda1**2
    ta = t**a
    x1 = l1 * ta
    xc = (l1 - 1.0) * ta
    return case.k1 * (
        l1 * t ** (2.0 * a) * _e(case, 2.0 * a + 1.0, x1, 2)
        + _e(case, 1.0, x1)
        + ta * _e(case, a + 1.0, x1, 2)
        - _e(case, 1.0, xc)
    )


def exact_u_coeffs(case: BenchmarkCase, t):
    """The four nonzero coefficients (u10, u11, u21, u22) at time(s) t > 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("exact_u_coeffs needs t > 0")
    u10 = case.h10 * w_conv_theta(case, 0.0, t)
    u11 = case.h11 * w_conv_theta(case, case.lambda1, t)
    u21 = tw_conv_theta1(case, t) - 0.5 * w_conv_prab(case, t)
    theta2 = t ** (case.gamma_param - 1.0) * _e(case, case.gamma_param, case.lambda2**2 * t**case.alpha)
    u22 = 2.0 * w_conv_theta(case, case.lambda2, t) + theta2
    if t.ndim == 0:
        return float(u10), float(u11), float(u21), float(u22)
    return u10, u11, u21, u22


def exact_u(case: BenchmarkCase, x, t):
    """Exact field u(x, t); x and t broadcast against each other."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise DomainError("x must lie in [0, 1]")
    u10, u11, u21, u22 = exact_u_coeffs(case, t)
    l1, l2 = case.lambda1, case.lambda2
    out = 2.0 * u10 + 4.0 * (1.0 - x) * np.sin(l1 * x) * u11 + 4.0 * np.cos(l1 * x) * u21 + 4.0 * np.cos(l2 * x) * u22
    return float(out) if np.ndim(out) == 0 else out
