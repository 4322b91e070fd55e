import json
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharpconst.exact_constants import DomainError, riesz_gamma, sphere_area
from sharpconst.profiles import ConstantProfile, PiecewiseProfile, log_r, power_r, smooth_bump
from sharpconst.potentials import (
    check_endpoint_pointwise,
    check_intermediate_pointwise,
    default_radii,
    frac_lap_log,
    log_fundamental_check,
    random_bumps,
    riesz_radial,
)
from sharpconst.quadrature import QuadratureConfig
from sharpconst.radial_calculus import polyharmonic

CFG = QuadratureConfig()
BALL = PiecewiseProfile((0.0, 1.0), (ConstantProfile(1.0),))


def test_newtonian_potential_of_ball():
    res = riesz_radial(BALL, 2, 3, 2.0, CFG)
    assert res.converged
    assert res.value == pytest.approx(1 / 6, rel=1e-10)
    # inside the ball: (3 - r^2) / 6 / ... with gamma(2) = 4 pi -> (3 - r^2)/6
    assert riesz_radial(BALL, 2, 3, 0.5, CFG).value == pytest.approx((3 - 0.25) / 6, rel=1e-10)


def test_methods_agree():
    u = smooth_bump(5, 0.3, 1.2, 1.5)
    a = riesz_radial(u, F(3, 2), 4, 0.8, CFG).value
    b = riesz_radial(u, F(3, 2), 4, 0.8, QuadratureConfig(rel_tol=1e-9), method="quadrature").value
    assert a == pytest.approx(b, rel=1e-8)


def test_linearity():
    u = smooth_bump(5, 0.3, 1.2, 1.5)
    for r in (0.1, 0.9, 3.0):
        one = riesz_radial(u, 2, 4, r, CFG).value
        two = riesz_radial(2 * u, 2, 4, r, CFG).value
        assert two == pytest.approx(2 * one, rel=1e-12)


def test_approximate_identity():
    N, alpha, delta = 3, F(3, 2), 1e-3
    bump = smooth_bump(4, delta / 2, delta, 1.0)
    mass = float(sphere_area(N)) * (delta**3) * 0.1  # rough scale, refined below
    from sharpconst.quadrature import integrate_radial_L1

    mass = integrate_radial_L1(bump, N, delta, CFG, points=bump.breakpoints()).value
    val = riesz_radial(bump, alpha, N, 1.0, CFG).value / mass
    assert val == pytest.approx(1 / float(riesz_gamma(N, alpha)), rel=1e-5)


def test_semigroup():
    N = 3
    g = smooth_bump(6, 0.4, 1.0, 1.0)
    inner = QuadratureConfig(rel_tol=1e-11)

    def I1g(rhos):
        return np.array([riesz_radial(g, 1, N, float(p), inner).value for p in np.ravel(rhos)]).reshape(np.shape(rhos))

    for r in (0.2, 0.7, 1.0, 1.6, 3.0):
        lhs = riesz_radial(I1g, 1, N, r, QuadratureConfig(rel_tol=1e-8), support=(0.0, math.inf),
                           points=(0.4, 1.0))
        rhs = riesz_radial(g, 2, N, r, CFG)
        assert lhs.value == pytest.approx(rhs.value, rel=1e-6)


def test_domain():
    with pytest.raises(DomainError):
        riesz_radial(BALL, 3, 3, 1.0, CFG)
    with pytest.raises(DomainError):
        riesz_radial(BALL, 1, 3, 0.0, CFG)


# --- closed form for fractional Laplacians of log -----------------------------------

def test_frac_lap_log_examples():
    assert frac_lap_log(3, 2) == power_r(-2, -1)
    assert frac_lap_log(2, 1) == power_r(-1, -1)
    for N in range(3, 9):
        for j in range(1, (N - 1) // 2 + 1):
            assert frac_lap_log(N, 2 * j) == polyharmonic(log_r(), j, N)
    with pytest.raises(DomainError):
        frac_lap_log(3, 3)


@pytest.mark.parametrize("N", [2, 3, 5])
def test_frac_lap_log_coefficient_near_zero(N):
    m = F(1, 10**6)
    c = frac_lap_log(N, m).terms[("pow", -m)]
    # m * gamma(m) -> omega as m -> 0, so m * c -> -1
    assert float(c) * float(m) == pytest.approx(-1, rel=1e-5)


# --- pointwise bounds ---------------------------------------------------------------------

def test_endpoint_bump_N3():
    u = smooth_bump(5, 0.3, 1.0, 1.0)
    rep = check_endpoint_pointwise(u, 1, 3, cfg=CFG)
    assert len(rep.rows) == 20 and rep.converged
    assert rep.min_margin >= -1e-8 and rep.passed


def test_zero_function():
    u = smooth_bump(5, 0.3, 1.0, 0.0)
    rep = check_endpoint_pointwise(u, 2, 4, sample_radii=[0.2, 0.8], cfg=CFG)
    assert all(row["lhs"] == 0 and row["rhs"] == 0 for row in rep.rows)


def test_scaling_covariance():
    u = smooth_bump(5, 0.3, 1.0, -1.3)
    radii = [0.1, 0.5, 0.9]
    a = check_endpoint_pointwise(u, 2, 4, radii, CFG)
    b = check_endpoint_pointwise(3 * u, 2, 4, radii, CFG)
    for x, y in zip(a.rows, b.rows):
        assert y["margin"] == pytest.approx(3 * x["margin"], rel=1e-9)


def test_intermediate_bump_N6():
    u = smooth_bump(8, 0.2, 1.1, 2.0)
    rep = check_intermediate_pointwise(u, 4, 2, 6, cfg=CFG)
    assert rep.passed and rep.min_margin >= -1e-8
    with pytest.raises(DomainError):
        check_intermediate_pointwise(u, 4, 4, 6)
    with pytest.raises(DomainError):
        check_intermediate_pointwise(u, 4, 1, 6)


def test_report_json():
    u = smooth_bump(5, 0.3, 1.0, 1.0)
    rep = check_endpoint_pointwise(u, 1, 3, sample_radii=[0.5], cfg=CFG)
    d = json.loads(rep.to_json())
    assert set(d["rows"][0]) >= {"lhs", "rhs", "margin", "radius"}


def test_default_radii():
    r = default_radii(smooth_bump(3, 0.5, 2.0))
    assert len(r) == 20 and r[0] == pytest.approx(2e-3) and r[-1] == pytest.approx(2.0)


@settings(max_examples=8)
@given(st.integers(0, 10**6))
def test_random_bumps_never_violate_endpoint_bound(seed):
    u = random_bumps(1, seed, 6)[0]
    radii = [0.05 * u.support[1], 0.5 * u.support[1], 0.95 * u.support[1]]
    assert check_endpoint_pointwise(u, 2, 4, radii, CFG).passed


def test_random_bumps_reproducible():
    a = random_bumps(3, 11, 5)
    b = random_bumps(3, 11, 5)
    assert [x.breaks for x in a] == [y.breaks for y in b]


# --- weak fundamental-solution check ---------------------------------------------------------

def test_fundamental_N2():
    rep = log_fundamental_check(2, smooth_bump(4, 0.3, 1.0, 1.0), CFG)
    assert rep.converged and rep.value == pytest.approx(1.0, rel=1e-8)


def test_fundamental_zero_and_N4():
    rep = log_fundamental_check(4, smooth_bump(6, 0.3, 1.0, 0.0), CFG)
    assert rep.value == 0
    rep = log_fundamental_check(4, smooth_bump(6, 0.5, 1.7, -2.5), CFG)
    assert rep.rel_error <= 1e-8
    with pytest.raises(DomainError):
        log_fundamental_check(3, smooth_bump(6, 0.3, 1.0))
