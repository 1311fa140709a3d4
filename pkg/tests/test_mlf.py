import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invsource.exceptions import DomainError
from invsource.mlf import ml, ml_neg, ml_prabhakar, omega, theta

from mlf_oracle import asymptotic, reference, series

# 50-digit oracle values (tests/mlf_oracle.py), rounded to 17 digits
ML_04_1_M10 = 0.06482716921104465954
PRAB_067_134_2_M5 = 0.005121475364175085814
ML_05_05_M4PI2 = 0.0001808248370156563204
OMEGA_04_001 = 7.145082042999550973

ORACLE_POINTS = [
    (0.4, 0.4, 1, -1000.0, 2.684275233573657309e-07),
    (0.67, 2.0, 1, -30.0, 0.03649820398886218301),
    (0.4, 0.8, 2, -3.0, 0.01245761393373688678),
    (0.5, 2.0, 2, -200.0, 2.485895613009962673e-05),
]


def rel(a, b):
    return abs(a - b) / abs(b)


def test_exponential_case():
    assert ml(1, 1, -2) == pytest.approx(0.1353352832366127, rel=1e-15)


def test_value_at_zero():
    assert ml(0.5, 0.5, 0) == pytest.approx(0.5641895835477563, rel=1e-15)
    assert ml_prabhakar(0.4, 1.8, 2, 0) == pytest.approx(1.0 / math.gamma(1.8), rel=1e-15)


def test_frozen_oracle_values():
    assert rel(ml(0.4, 1, -10), ML_04_1_M10) < 1e-13
    assert rel(ml_prabhakar(0.67, 1.34, 2, -5), PRAB_067_134_2_M5) < 1e-12
    for a, b, r, z, ref in ORACLE_POINTS:
        assert rel(ml_prabhakar(a, b, r, z), ref) < 1e-12


def test_prabhakar_rho1_is_ml():
    assert ml_prabhakar(0.5, 1.0, 1, -3) == ml(0.5, 1.0, -3)


def test_theta():
    assert theta(0.5, 1.0, 0.0, 0.37) == 1.0
    assert rel(theta(0.5, 0.5, 4 * math.pi**2, 1.0), ML_05_05_M4PI2) < 1e-12
    # leading series term near the origin
    t = 1e-14
    assert theta(0.4, 0.4, 4 * math.pi**2, t) * t**0.6 == pytest.approx(1 / math.gamma(0.4), rel=1e-3)
    with pytest.raises(DomainError):
        theta(0.5, 0.5, 1.0, 0.0)


def test_omega():
    assert omega(1, 0.3) == pytest.approx(1.0, rel=1e-15)
    assert omega(2, 0.5) == pytest.approx(0.5, rel=1e-15)
    assert rel(omega(0.4, 0.01), OMEGA_04_001) < 1e-14
    with pytest.raises(DomainError):
        omega(0.0, 1.0)
    with pytest.raises(DomainError):
        omega(1.0, -1.0)


@pytest.mark.parametrize(
    "args",
    [(0.0, 1.0, -1.0), (1.2, 1.0, -1.0), (0.5, 0.0, -1.0), (0.5, -1.0, -1.0), (0.5, 1.0, 0.5), (0.5, 1.0, math.nan)],
)
def test_domain_errors(args):
    with pytest.raises(DomainError):
        ml(*args)


def test_rho_out_of_range():
    with pytest.raises(DomainError):
        ml_prabhakar(0.5, 1.0, 3, -1.0)


def test_ml_neg_rejects_negative_x():
    with pytest.raises(DomainError):
        ml_neg(0.5, 1.0, np.array([1.0, -1.0]))


def test_array_matches_scalar():
    x = np.geomspace(1e-3, 1e3, 37)
    arr = ml_neg(0.67, 1.67, x)
    # equal up to summation order inside the vectorised quadrature
    np.testing.assert_allclose(arr, [ml(0.67, 1.67, -v) for v in x], rtol=1e-14, atol=0)


def test_oracle_routes_agree():
    # series and asymptotic expansion overlap where both are cheap
    for a, b, r in [(0.4, 1.0, 1), (0.67, 1.34, 2)]:
        x = 300.0**a
        assert abs(series(a, b, r, x) - asymptotic(a, b, r, x)) < 1e-45 * abs(series(a, b, r, x))


@settings(max_examples=200, deadline=None)
@given(
    alpha=st.sampled_from([0.3, 0.4, 0.5, 0.67, 0.8, 1.0]),
    beta=st.floats(0.2, 3.0),
    y=st.floats(0.0, 1e4),
)
def test_shifting_identity(alpha, beta, y):
    lhs = y * ml(alpha, alpha + beta, -y) + ml(alpha, beta, -y)
    assert abs(lhs - 1 / math.gamma(beta)) <= 1e-10 * max(1.0, 1 / math.gamma(beta))


@pytest.mark.parametrize("alpha", [0.4, 0.5, 0.67, 1.0])
def test_e_alpha_alpha_bounds(alpha):
    # exp(-x) underflows past x ~ 745, so the alpha = 1 sample stops earlier
    top = 1e4 if alpha < 1 else 700.0
    x = np.concatenate([[0.0], np.geomspace(1e-6, top, 400)])
    e = ml_neg(alpha, alpha, x)
    assert np.all(e > 0)
    assert np.all(np.diff(e) < 0)
    assert np.max(e * (1 + x)) <= 2.0


@pytest.mark.parametrize("alpha", [0.3, 0.4, 0.5, 0.67, 0.9, 1.0])
def test_complete_monotonicity_sample(alpha):
    x = np.geomspace(1e-6, 1e6, 500)
    e = ml_neg(alpha, 1.0, x)
    assert np.all(e >= 0)
    assert np.all(np.diff(e) <= 0)
    if alpha < 1:
        assert np.all(np.diff(e) < 0)


@settings(max_examples=60, deadline=None)
@given(
    alpha=st.sampled_from([0.4, 0.5, 0.67, 1.0]),
    beta=st.sampled_from([0.4, 1.0, 1.5, 2.0, 2.67]),
    rho=st.sampled_from([1, 2]),
    x=st.floats(0.0, 2e3),
)
def test_random_points_against_oracle(alpha, beta, rho, x):
    ref = float(reference(alpha, beta, rho, -x, digits=30))
    got = ml_prabhakar(alpha, beta, rho, -x)
    assert abs(got - ref) <= 1e-11 * abs(ref) + 1e-14


@pytest.mark.parametrize("alpha", [0.96, 0.99, 0.9987, 1 - 1e-6, 1 - 1e-9])
@pytest.mark.parametrize("rho", [1, 2])
def test_alpha_close_to_one(alpha, rho):
    # the contour integrand has a pole right above the cut and the expansion
    # coefficients sit next to the poles of 1/Gamma
    x = np.geomspace(1.01, 150.0, 12)
    for beta in (alpha, 1.0, 2 * alpha, 2.0):
        got = ml_neg(alpha, beta, x, rho)
        ref = np.array([float(reference(alpha, beta, rho, -v, digits=30)) for v in x])
        np.testing.assert_allclose(got, ref, rtol=1e-12 if rho == 1 else 1e-11, atol=0)


@settings(max_examples=60, deadline=None)
@given(
    alpha=st.floats(0.95, 1.0, exclude_max=True),
    shift=st.sampled_from([(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]),
    rho=st.sampled_from([1, 2]),
    x=st.floats(1.0, 3e3),
)
def test_random_points_close_to_one(alpha, shift, rho, x):
    beta = shift[0] * alpha + shift[1]
    ref = float(reference(alpha, beta, rho, -x, digits=30))
    got = ml_neg(alpha, beta, np.array([x]), rho)[0]
    # E^2_{1,1}(-x) = (1 - x) exp(-x) has a zero at x = 1, hence the absolute floor
    assert abs(got - ref) <= 1e-11 * abs(ref) + 1e-14
