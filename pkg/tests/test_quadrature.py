import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sharpconst.exact_constants import DomainError, sphere_area
from sharpconst.quadrature import (
    IntegralResult,
    QuadratureConfig,
    QuadratureError,
    annulus_exp_integral,
    integrate_1d,
    integrate_radial_L1,
    riesz_sphere_kernel,
)

CFG = QuadratureConfig()


def within(res: IntegralResult, exact, rel=1e-10):
    assert res.converged
    assert res.error_estimate >= 0
    assert res.value == pytest.approx(exact, rel=rel, abs=1e-13)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_subdivisions=0)
    assert CFG.doubled().precision_bits == 106


@pytest.mark.parametrize("eps", [1e-2, 1e-6, 1e-12])
def test_log_integral(eps):
    within(integrate_1d(lambda r: 1 / r, eps, 1, CFG, log_scale=True), math.log(1 / eps))
    within(integrate_1d(lambda r: 1 / r, eps, 1, CFG), math.log(1 / eps))


@pytest.mark.parametrize("N", [2, 3, 6])
def test_monomial(N):
    within(integrate_1d(lambda r: r ** (N - 1), 0, 1, CFG), 1 / N)


@pytest.mark.parametrize("pc", [1.5, 2.0, 3.0])
def test_log_power_antiderivative(pc):
    eps = 1e-5
    L = math.log(1 / eps)
    res = integrate_1d(lambda r: np.log(1 / r) ** pc / r, eps, 1, CFG, log_scale=True)
    within(res, L ** (pc + 1) / (pc + 1))


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=9), st.floats(0.1, 2))
def test_polynomials_exact(coeffs, b):
    exact = sum(c * b ** (i + 1) / (i + 1) for i, c in enumerate(coeffs))
    res = integrate_1d(lambda x: np.polyval(coeffs[::-1], x), 0, b, CFG)
    assert res.value == pytest.approx(exact, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("sigma", [-0.5, -0.9, -0.25])
def test_endpoint_singularity_hint(sigma):
    res = integrate_1d(lambda r: r**sigma, 0, 1, CFG, singularity=sigma)
    within(res, 1 / (1 + sigma))


def test_infinite_range():
    f = lambda r: 1 / (1 + r * r)  # noqa: E731
    within(integrate_1d(f, 0, 1, CFG) + integrate_1d(f, 1, math.inf, CFG), math.pi / 2)
    within(integrate_1d(lambda r: r**-2.5, 2, math.inf, CFG), 2 ** -1.5 / 1.5)
    with pytest.raises(DomainError):
        integrate_1d(f, 0, math.inf, CFG)


def test_breakpoints_for_kinks():
    within(integrate_1d(lambda x: np.abs(x - 0.3), 0, 1, CFG, points=(0.3,)), 0.3**2 / 2 + 0.7**2 / 2, 1e-12)


def test_nan_reports_abscissa():
    with pytest.raises(QuadratureError, match="abscissa"):
        integrate_1d(lambda x: np.where(x > 0.5, np.nan, 1.0), 0, 1, CFG)


def test_nonconvergence_flagged():
    res = integrate_1d(lambda x: np.sin(1 / x), 1e-6, 1, QuadratureConfig(max_subdivisions=3))
    assert not res.converged


def test_doubled_precision_self_consistency():
    f53 = integrate_1d(lambda r: np.exp(-r) * np.cos(3 * r), 0, 4, CFG)
    cfg2 = CFG.doubled()
    bk = cfg2.backend
    f106 = integrate_1d(lambda r: bk.exp(-r) * np.frompyfunc(lambda v: __import__("mpmath").cos(3 * v), 1, 1)(r),
                        0, 4, cfg2)
    assert abs(f53.value - float(f106.value)) <= max(CFG.rel_tol * abs(float(f106.value)), CFG.abs_tol)


# --- radial integrals ------------------------------------------------------

def test_radial_L1_examples():
    eps = 1e-4
    within(integrate_radial_L1(lambda r: r**-3.0, 3, 1, CFG, r_min=eps, log_scale=True), 4 * math.pi * math.log(1 / eps))
    for N in (2, 3, 5):
        omega = float(sphere_area(N))
        within(integrate_radial_L1(lambda r: 1 + 0 * r, N, 1, CFG), omega / N)
        within(integrate_radial_L1(lambda r: r ** (-N + 0.5), N, 1, CFG, singularity=-N + 0.5), 2 * omega)


def test_radial_L1_linearity():
    g1 = lambda r: np.exp(-r)  # noqa: E731
    g2 = lambda r: r**2  # noqa: E731
    a = integrate_radial_L1(g1, 3, 2, CFG)
    b = integrate_radial_L1(g2, 3, 2, CFG)
    ab = integrate_radial_L1(lambda r: g1(r) + g2(r), 3, 2, CFG)
    assert abs(ab.value - (a + b).value) <= (a + b).error_estimate + ab.error_estimate + 1e-13


# --- spherical mean of the Riesz kernel ---------------------------------------

NEWTON_PAIRS = [(2.0, 1.0), (1.0, 2.0), (0.3, 0.7), (5.0, 0.1), (1.0, 1.5)]


@pytest.mark.parametrize("r,rho", NEWTON_PAIRS)
@pytest.mark.parametrize("method", ["quadrature", "hypergeometric"])
def test_newton_theorem(r, rho, method):
    k = riesz_sphere_kernel(3, 2, r, rho, CFG, method=method)
    assert float(k) == pytest.approx(4 * math.pi / max(r, rho), rel=1e-10)


@pytest.mark.parametrize("N,alpha", [(3, 1.5), (4, 1), (4, 3), (6, 2), (2, 1.3), (5, 4.5)])
def test_kernel_methods_agree_and_symmetric(N, alpha):
    for r, rho in [(0.5, 1.3), (2.0, 0.7)]:
        q = riesz_sphere_kernel(N, alpha, r, rho, CFG)
        h = float(riesz_sphere_kernel(N, alpha, r, rho, CFG, method="hypergeometric"))
        assert q == pytest.approx(h, rel=1e-9)
        assert q == pytest.approx(riesz_sphere_kernel(N, alpha, rho, r, CFG), rel=1e-10)


def test_kernel_small_r_limit():
    for N, alpha in [(3, 2), (4, 1.5), (6, 3)]:
        k = riesz_sphere_kernel(N, alpha, 1e-7, 1.3, CFG)
        assert k == pytest.approx(float(sphere_area(N)) * 1.3 ** (alpha - N), rel=1e-6)


def test_kernel_domain():
    with pytest.raises(DomainError):
        riesz_sphere_kernel(3, 3, 1, 2, CFG)
    with pytest.raises(DomainError):
        riesz_sphere_kernel(3, 1, 1, 1, CFG)


# --- annulus exponential integrals -------------------------------------------

@pytest.mark.parametrize("N", [2, 4])
def test_annulus_volume(N):
    eps = 1e-3
    res = annulus_exp_integral(N, lambda r: 0 * r, eps, 2 * eps, CFG)
    vol = float(sphere_area(N)) / N * (2**N - 1) * eps**N
    assert res.converged and not res.saturated
    assert res.log_value == pytest.approx(math.log(vol), rel=1e-12)


def test_annulus_log_domain():
    eps, L = 1e-3, 1e6
    res = annulus_exp_integral(4, lambda r: L + 0 * r, eps, 2 * eps, CFG)
    vol = float(sphere_area(4)) / 4 * 15 * eps**4
    assert res.log_value == pytest.approx(L + math.log(vol), rel=1e-14)
    assert res.value == math.inf


def test_annulus_saturation_flag():
    res = annulus_exp_integral(4, lambda r: np.full_like(r, np.inf), 1e-3, 2e-3, CFG)
    assert res.saturated
