"""Mittag-Leffler functions on the non-positive real axis.

The public functions :func:`ml`, :func:`ml_prabhakar`, :func:`theta` and
:func:`omega` are scalar. The solver modules call :func:`ml_neg`, which takes
an array of non-negative ``x`` and returns ``E^rho_{alpha,beta}(-x)``.

Evaluation is split into regimes on ``x = -z``:

* ``x <= 1``: the defining power series with compensated summation;
* ``1 < x < x_asym``: the Bromwich integral with its contour collapsed onto
  the branch cut of ``s**alpha``, discretised with a double-exponential
  trapezoidal rule (for ``alpha < 1`` there are no poles on the principal
  sheet, so the collapsed integral is exact).  For ``alpha`` close to 1 the
  continuation of the integrand has a pole just above the cut; the integral
  is then split at that pole's real part and each half gets its own
  endpoint-clustering rule, with ``rho = 2`` reduced to two ``rho = 1``
  values;
* ``x >= x_asym``: the algebraic large-argument expansion, with ``x_asym``
  and the truncation order chosen per ``(alpha, beta, rho)`` so that the
  first omitted term is below 1e-16 of the sum.

For ``alpha == 1`` the middle regime is the Kummer-transformed series
``exp(-x) 1F1(beta - rho; beta; x) / Gamma(beta)``, whose terms are all of one
sign, and the tail adds the exact exponential residue when ``beta`` is an
integer.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import rgamma as _rgamma

from .exceptions import AccuracyError, DomainError

__all__ = ["ml", "ml_prabhakar", "ml_neg", "theta", "omega"]

TAYLOR_RADIUS = 1.0
KUMMER_LIMIT = 50.0
ASYM_TOL = 1e-16

# collapsed-contour quadrature
_MIN_DECAY = 0.1  # smallest allowed alpha*rho - beta + 1 before shifting beta
_MAX_NODES = 20000
_CHUNK = 16384
NEAR_ONE = 0.95  # above this alpha the split rule replaces the collapsed one


def _check_alpha(alpha):
    if not (0.0 < alpha <= 1.0) or not math.isfinite(alpha):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")


def _check_rho(rho):
    if rho not in (1, 2):
        raise DomainError(f"rho must be 1 or 2, got {rho!r}")


# ---------------------------------------------------------------- series


@lru_cache(maxsize=256)
def _taylor_coeffs(alpha, beta, rho):
    coeffs = []
    poch = 1.0  # (rho)_k / k!
    peak = 0.0
    k = 0
    while True:
        c = poch * float(_rgamma(alpha * k + beta))
        coeffs.append(c)
        peak = max(peak, abs(c))
        if k > 4 and abs(c) < 1e-19 * max(peak, 1e-300) and abs(coeffs[-2]) < 1e-19 * peak:
            break
        if k > 2000:
            break
        poch *= (rho + k) / (k + 1)
        k += 1
    return np.array(coeffs)


def _taylor(alpha, beta, rho, x):
    coeffs = _taylor_coeffs(alpha, beta, rho)
    z = -x
    total = np.full_like(x, coeffs[0])
    comp = np.zeros_like(x)
    power = np.ones_like(x)
    for c in coeffs[1:]:
        power = power * z
        term = c * power
        s = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - s) + term, (term - s) + total)
        total = s
    return total + comp


# ----------------------------------------------------------- asymptotics


def _envelope(y):
    # |1/Gamma(y)| <= Gamma(1 - y)/pi for y < 1 (reflection formula)
    y = np.asarray(y, dtype=float)
    with np.errstate(over="ignore"):
        return np.where(y >= 1.0, np.abs(_rgamma(y)), _gamma(1.0 - y) / math.pi)


def _asym_coeffs(alpha, beta, rho, kmax):
    k = np.arange(kmax)
    poch = np.ones(kmax)
    for j in range(1, kmax):
        poch[j] = poch[j - 1] * (rho + j - 1) / j
    y = beta - alpha * (rho + k)
    with np.errstate(over="ignore", invalid="ignore"):
        return poch * _rgamma_exact(alpha, beta, rho + k), poch * _envelope(y)


def _rgamma_exact(alpha, beta, n):
    """1/Gamma(beta - alpha n) with the distance to the nearest pole taken in exact arithmetic.

    For alpha near 1 the argument lies within ~n (1 - alpha) of a non-positive
    integer, and rounding beta - alpha n would cost most of the relative accuracy.
    """
    a, b = Fraction(alpha), Fraction(beta)
    y = np.empty(n.size)
    frac = np.empty(n.size)
    sign = np.empty(n.size)
    for i, nn in enumerate(n):
        exact = b - int(nn) * a
        m = round(exact)
        y[i] = float(exact)
        frac[i] = float(exact - m)
        sign[i] = 1.0 if m % 2 == 0 else -1.0
    out = _rgamma(y)
    neg = y < 0.5
    # reflection: 1/Gamma(y) = Gamma(1 - y) sin(pi y) / pi, sin(pi y) = (-1)^m sin(pi frac)
    with np.errstate(over="ignore", invalid="ignore"):
        refl = _gamma(1.0 - y[neg]) * sign[neg] * np.sin(math.pi * frac[neg]) / math.pi
    out[neg] = np.where(frac[neg] == 0.0, 0.0, refl)
    return out


@lru_cache(maxsize=256)
def _asym_plan(alpha, beta, rho):
    """Smallest x (on a fine geometric grid) where the expansion meets ASYM_TOL, and its order."""
    kmax = 400
    coeffs, env = _asym_coeffs(alpha, beta, rho, kmax)
    if alpha == 1.0 and float(beta).is_integer():
        n = int(beta) - rho
        return KUMMER_LIMIT, max(n, 0)
    xs = np.geomspace(1.0, 1e6, 1400)
    if alpha == 1.0:
        xs = np.array([KUMMER_LIMIT])
    k = np.arange(kmax)
    signs = (-1.0) ** k
    for x in xs:
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            scale = x ** (-float(rho) - k)
            terms = signs * coeffs * scale
            bounds = env * scale
            partial = np.cumsum(terms)
        ok = (bounds[1:] <= ASYM_TOL * np.abs(partial[:-1])) & np.isfinite(bounds[1:])
        if not ok.any():
            continue
        return float(x), int(np.argmax(ok)) + 1
    raise AccuracyError(
        f"no certified large-argument expansion for alpha={alpha}, beta={beta}, rho={rho}"
    )


def _asymptotic(alpha, beta, rho, x, order):
    coeffs, _ = _asym_coeffs(alpha, beta, rho, max(order, 1))
    coeffs = coeffs[:order]
    inv = -1.0 / x
    acc = np.zeros_like(x)
    for c in coeffs[::-1]:
        acc = acc * inv + c
    with np.errstate(under="ignore"):
        out = acc * x ** (-float(rho))
    if alpha == 1.0 and float(beta).is_integer():
        out = out + _exp_residue(beta, rho, x)
    return out


def _exp_residue(beta, rho, x):
    # residue of exp(s) s^(rho-beta) / (s + x)^rho at s = -x, beta integer
    n = int(beta)
    with np.errstate(under="ignore", over="ignore"):
        e = np.exp(-x)
        if rho == 1:
            return (-1.0) ** (1 - n) * x ** (1.0 - n) * e
        return e * ((-1.0) ** (2 - n) * x ** (2.0 - n) + (2 - n) * (-1.0) ** (1 - n) * x ** (1.0 - n))


# -------------------------------------------------------------- alpha = 1


def _kummer(beta, rho, x):
    xmax = float(np.max(x))
    kmax = int(xmax + 12.0 * math.sqrt(xmax) + 40)
    total = np.ones_like(x)
    term = np.ones_like(x)
    a = beta - rho
    for k in range(kmax):
        term = term * ((a + k) / ((beta + k) * (k + 1))) * x
        total = total + term
    return np.exp(-x) * total * float(_rgamma(beta))


# ------------------------------------------------------ collapsed contour


@lru_cache(maxsize=256)
def _contour_rule(alpha, beta, rho):
    """Nodes/weights for E = -(1/pi) int_0^inf e^-r r^p Im[e^{i pi p} (r^a e^{i pi a} + x)^-rho] dr."""
    p = alpha * rho - beta
    decay = p + 1.0
    # analyticity strip of the integrand after r = exp(y - exp(-y))
    strip = min(math.pi / 2, math.pi * (1.0 - alpha) / alpha) if alpha < 1 else 0.0
    if strip <= 0:
        raise AccuracyError("collapsed contour needs alpha < 1")
    h = 2.0 ** math.floor(math.log2(strip / 10.0))
    h = min(h, 0.125)
    ylo = -math.log(45.0 / decay) - 0.5
    ylo = math.floor(ylo / h) * h
    yhi = 4.5
    n = int(round((yhi - ylo) / h)) + 1
    if n > _MAX_NODES:
        raise AccuracyError(f"alpha={alpha} too close to 1 for the contour quadrature")
    y = ylo + h * np.arange(n)
    logr = y - np.exp(-y)
    r = np.exp(logr)
    with np.errstate(under="ignore"):
        w = h * (1.0 + np.exp(-y)) * np.exp(-r + (p + 1.0) * logr)
        ra = np.exp(alpha * logr)
    keep = w > 0
    w, ra = w[keep], ra[keep]
    cr = ra * math.cos(math.pi * alpha)
    ci = ra * math.sin(math.pi * alpha)
    return w, cr, ci, math.cos(math.pi * p), math.sin(math.pi * p)


def _contour(alpha, beta, rho, x):
    if alpha * rho - beta + 1.0 < _MIN_DECAY:
        # E^rho_{a,b}(-x) = (E^{rho-1}_{a,b-a}(-x) - E^rho_{a,b-a}(-x)) / x
        lower = beta - alpha
        if rho == 1:
            prev = np.full_like(x, float(_rgamma(lower)))
        else:
            prev = _ml_neg(alpha, lower, rho - 1, x)
        return (prev - _ml_neg(alpha, lower, rho, x)) / x
    w, cr, ci, pr, pim = _contour_rule(alpha, beta, rho)
    out = np.empty_like(x)
    for start in range(0, x.size, _CHUNK):
        xx = x[start:start + _CHUNK, None]
        re = cr + xx
        d = re * re + ci * ci
        if rho == 1:
            im = (pim * re - pr * ci) / d
        else:
            im = (pim * (re * re - ci * ci) - 2.0 * pr * ci * re) / (d * d)
        out[start:start + _CHUNK] = -(im @ w) / math.pi
    return out


# ------------------------------------------------- alpha close to one


@lru_cache(maxsize=256)
def _split_rule(alpha, beta):
    """tanh-sinh nodes on [0, c] (as fractions of c) and exp-sinh nodes on [c, inf)."""
    theta = math.pi * (1.0 - alpha) / alpha
    # the near pole sits at relative height tan(theta) above the split point;
    # its preimage in t is roughly pi / (2 log(1/tan theta)) off the real axis
    strip = min(0.5, math.pi / (2.0 * math.log(1.0 / math.tan(theta) + 2.0) + 2.0))
    h = 2.0 ** math.floor(math.log2(2.0 * math.pi * strip / 40.0))
    decay = alpha - beta + 1.0
    # left end: r ~ c exp(-2|s|), keep r^(p+1) above 1e-17
    t_lo = -math.asinh(2.0 * (20.0 / decay) / math.pi)
    t = np.arange(t_lo, 4.0 + 0.5 * h, h)
    sv = 0.5 * math.pi * np.sinh(t)
    with np.errstate(under="ignore"):
        e = np.exp(-2.0 * np.abs(sv))
    near = e / (1.0 + e)
    frac = np.where(t < 0, near, 1.0 - near)  # r / c
    gap = np.where(t < 0, 1.0 - near, near)  # (c - r) / c
    wl = h * 0.25 * math.pi * np.cosh(t) * 4.0 * e / (1.0 + e) ** 2
    tr = np.arange(-4.5, 3.2 + 0.5 * h, h)
    er = np.exp(0.5 * math.pi * np.sinh(tr))  # r - c
    wr = h * 0.5 * math.pi * np.cosh(tr) * er
    return theta, frac, gap, wl, er, wr


def _sinpi(v):
    # sin(pi v) with the argument reduced exactly, so integers give 0
    v = math.fmod(v, 2.0)
    if v > 1.0:
        v -= 2.0
    elif v < -1.0:
        v += 2.0
    if v > 0.5:
        v = 1.0 - v
    elif v < -0.5:
        v = -1.0 - v
    return math.sin(math.pi * v)


def _split_values(alpha, beta, x, r, offset, r0):
    # e^-r r^p Im[e^{i pi p} / D], D = r^alpha e^{i pi alpha} + x = -x (e^u e^{-i phi} - 1),
    # u = alpha log(r / r0) built from the accurate offset r - r0, phi = pi (1 - alpha);
    # Im[e^{i pi p} conj(D)] = -x (e^u sin(pi beta) - sin(pi p)); the bracket is O(phi)
    # near the pole, so it is rewritten with expm1 and a sum-to-product difference
    p = alpha - beta
    gap = 1.0 - alpha  # exact
    phi = math.pi * gap
    diff = -2.0 * math.cos(math.pi * (beta + 0.5 * gap)) * math.sin(0.5 * phi)  # sin(pi beta) - sin(pi p)
    with np.errstate(under="ignore", over="ignore", divide="ignore", invalid="ignore"):
        # the offset matters only near r0; far below it log1p(offset / r0) can round to -inf
        u = alpha * np.where(r < 0.5 * r0, np.log(r / r0), np.log1p(offset / r0))
        d = np.abs(np.expm1(u - 1j * phi)) * x
        num = -x * (np.expm1(u) * _sinpi(beta) + diff)
        val = np.exp(-r + p * np.log(r)) * num / (d * d)
    return np.where(r > 0, val, 0.0)


def _split_contour(alpha, beta, x):
    """E_{alpha,beta}(-x) for alpha near 1 (rho = 1)."""
    if alpha - beta + 1.0 < _MIN_DECAY:
        lower = beta - alpha
        return (float(_rgamma(lower)) - _split_contour(alpha, lower, x)) / x
    theta, frac, gap, wl, er, wr = _split_rule(alpha, beta)
    out = np.empty_like(x)
    step = max(1, _CHUNK // 4)
    for start in range(0, x.size, step):
        xx = x[start:start + step, None]
        r0 = xx ** (1.0 / alpha)
        c = r0 * math.cos(theta)
        shift = 2.0 * r0 * math.sin(0.5 * theta) ** 2  # r0 - c
        left = _split_values(alpha, beta, xx, c * frac, -c * gap - shift, r0) @ wl
        right = _split_values(alpha, beta, xx, c + er, er - shift, r0) @ wr
        out[start:start + step] = -(c[:, 0] * left + right) / math.pi
    return out


def _near_one(alpha, beta, rho, x):
    if rho == 2:
        # E^2_{a,b} = (E_{a,b-1} + (1 + a - b) E_{a,b}) / a, termwise from the series
        # the two terms nearly cancel, so the small coefficient 1 + a - b is taken exactly
        coef = float(1 + Fraction(alpha) - Fraction(beta))
        return (_split_contour(alpha, beta - 1.0, x) + coef * _split_contour(alpha, beta, x)) / alpha
    return _split_contour(alpha, beta, x)


# -------------------------------------------------------------- dispatch


def _ml_neg(alpha, beta, rho, x):
    out = np.empty_like(x)
    small = x <= TAYLOR_RADIUS
    if small.any():
        out[small] = _taylor(alpha, beta, rho, x[small])
    rest = ~small
    if not rest.any():
        return out
    x_asym, order = _asym_plan(alpha, beta, rho)
    far = rest & (x >= x_asym)
    mid = rest & ~far
    if far.any():
        out[far] = _asymptotic(alpha, beta, rho, x[far], order)
    if mid.any():
        if alpha == 1.0:
            out[mid] = _kummer(beta, rho, x[mid])
        elif alpha > NEAR_ONE:
            out[mid] = _near_one(alpha, beta, rho, x[mid])
        else:
            out[mid] = _contour(alpha, beta, rho, x[mid])
    return out


def ml_neg(alpha, beta, x, rho=1):
    """Array evaluation of ``E^rho_{alpha,beta}(-x)`` for ``x >= 0``.

    ``beta`` may be any real number here (the solver needs ``beta <= 0`` for
    some derived kernels); ``alpha == 1`` additionally needs ``beta > 0``.
    """
    _check_alpha(alpha)
    _check_rho(rho)
    if alpha == 1.0 and beta <= 0:
        raise DomainError("alpha == 1 requires beta > 0")
    x = np.asarray(x, dtype=float)
    shape = x.shape
    flat = np.ascontiguousarray(x.reshape(-1))
    if np.any(flat < 0) or not np.all(np.isfinite(flat)):
        raise DomainError("ml_neg expects finite x >= 0")
    return _ml_neg(float(alpha), float(beta), int(rho), flat).reshape(shape)


def ml(alpha: float, beta: float, z: float) -> float:
    """Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z <= 0."""
    return ml_prabhakar(alpha, beta, 1, z)


def ml_prabhakar(alpha: float, beta: float, rho: int, z: float) -> float:
    """Prabhakar function E^rho_{alpha,beta}(z), z <= 0, rho in {1, 2}."""
    _check_alpha(alpha)
    _check_rho(rho)
    if not (beta > 0) or not math.isfinite(beta):
        raise DomainError(f"beta must be positive, got {beta!r}")
    if not (z <= 0) or not math.isfinite(z):
        raise DomainError(f"z must be finite and <= 0, got {z!r}")
    return float(_ml_neg(float(alpha), float(beta), int(rho), np.array([-float(z)]))[0])


def theta(alpha: float, gamma_param: float, lambda_sq: float, t: float) -> float:
    """t**(gamma-1) * E_{alpha,gamma}(-lambda_sq * t**alpha)."""
    if not (t > 0):
        raise DomainError(f"theta needs t > 0, got {t!r}")
    if lambda_sq < 0:
        raise DomainError("lambda_sq must be non-negative")
    return t ** (gamma_param - 1.0) * ml(alpha, gamma_param, -lambda_sq * t**alpha)


def omega(mu: float, t: float) -> float:
    """Riemann-Liouville kernel t**(mu-1) / Gamma(mu)."""
    if not (mu > 0) or not (t > 0):
        raise DomainError(f"omega needs mu > 0 and t > 0, got mu={mu!r}, t={t!r}")
    return t ** (mu - 1.0) * float(_rgamma(mu))
