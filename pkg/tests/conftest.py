"""Shared quadrature oracle for weakly singular convolutions."""

from scipy.integrate import quad


def singular_quad(smooth, a, b, t, power):
    """int_a^b (t - s)**power * smooth(s) ds for a <= b <= t and power > -1.

    With v = (t - s)**p, p = power + 1, the integral becomes
    (1/p) int smooth(t - v**(1/p)) dv over [(t-b)**p, (t-a)**p], which has no
    endpoint singularity; the kernels of interest are smooth functions of
    (t - s)**alpha, so this also tames their behaviour at s = t.
    """
    if not (a <= b <= t):
        raise ValueError("need a <= b <= t")
    p = power + 1.0
    lo, hi = (t - b) ** p, (t - a) ** p
    val, _ = quad(lambda v: smooth(t - v ** (1.0 / p)), lo, hi, epsabs=0, epsrel=1e-13, limit=500)
    return val / p


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE = {}


def record(criterion, ok, detail=""):
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
    ACCEPTANCE[criterion] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
