from fractions import Fraction as F

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sharpconst.exact_constants import DomainError, ExactReal
from sharpconst.numerics import get_backend
from sharpconst.profiles import (
    ConstantProfile,
    LaplacianProfile,
    StepProfile,
    log_r,
    power_r,
    smooth_bump,
)

R = np.array([0.3, 0.9, 1.7, 4.0])


def test_symbolic_laplacian_examples():
    assert log_r().laplacian(3) == power_r(-2)
    assert log_r().laplacian(2) == power_r(-2, 0)
    for N in range(2, 8):
        assert power_r(2).laplacian(N) == power_r(0, 2 * N)
    for N in range(3, 8):
        assert power_r(2 - N).laplacian(N).terms == {}


def test_symbolic_jets_match_closed_forms():
    v = log_r(3) + power_r(F(1, 2), -2)
    d = v.derivatives(R, 3)
    np.testing.assert_allclose(d[0], 3 * np.log(R) - 2 * np.sqrt(R))
    np.testing.assert_allclose(d[1], 3 / R - R**-0.5)
    np.testing.assert_allclose(d[3], 6 / R**3 - 2 * 0.5 * -0.5 * -1.5 * R**-2.5)


@pytest.mark.parametrize("N", [2, 3, 4, 6])
@pytest.mark.parametrize("v", [log_r(), power_r(F(-3, 2), 5), power_r(3, -1)])
def test_taylor_mode_laplacian_matches_symbolic(N, v):
    bk = get_backend(113)
    with bk.context():
        r = bk.array([mp.mpf("0.37"), mp.mpf("1.1"), mp.mpf("2.9")])
        tm = LaplacianProfile(v, N).jet(r, 3, bk)
        ex = v.laplacian(N).jet(r, 3, bk)
        for a, b in zip(np.ravel(tm), np.ravel(ex)):
            assert abs(a - b) <= mp.mpf(1e-12) * max(abs(b), 1)


@pytest.mark.parametrize("K", [2, 4, 7])
def test_bump_smooth_across_joints(K):
    u = smooth_bump(K, 0.5, 1.5, height=2.0)
    for b in (0.5, 1.5):
        left = u.derivatives(b - 1e-9, K)
        right = u.derivatives(b, K)
        for n in range(K):
            assert abs(left[n] - right[n]) <= 1e-6 * (1 + abs(right[n]))
    assert u(0.2) == 2.0 and u(1.5) == 0.0 and u(3.0) == 0.0
    assert np.all(u.derivatives(np.array([1.6, 2.0]), K) == 0)
    assert u.breakpoints() == (0.5, 1.5)


def test_step_profile_values():
    s = StepProfile(3, 1.0, 2.0, 5.0, 1.0)
    assert s(0.5) == 5.0 and s(2.5) == 1.0
    assert s(1.5) == pytest.approx(3.0)


def test_arithmetic():
    a, b = log_r(), power_r(2)
    r = np.float64(1.3)
    assert (a + b)(r) == pytest.approx(np.log(r) + r * r)
    prod = (a * b).derivatives(r, 2)
    assert prod[1] == pytest.approx(r + 2 * r * np.log(r))
    assert (3 * a)(r) == pytest.approx(3 * np.log(r))
    assert (-a)(r) == pytest.approx(-np.log(r))
    assert ConstantProfile(4.0).derivatives(r, 2).tolist() == [4.0, 0.0, 0.0]


def test_order_guard():
    u = smooth_bump(3, 0.5, 1.0)
    u.max_order = 4
    u.jet(0.7, 4)
    with pytest.raises(DomainError):
        u.jet(0.7, 5)
    lap = LaplacianProfile(u, 3)
    assert lap.max_order == 2
    with pytest.raises(DomainError):
        lap.jet(0.7, 3)
    assert (u + log_r()).max_order == 4 and (2 * u).max_order == 4


@given(st.floats(0.05, 1.0), st.floats(0.2, 1.5), st.floats(-3, 3).filter(lambda h: abs(h) > 0.1),
       st.integers(3, 7))
def test_bump_jets_vs_finite_differences(inner, width, height, K):
    u = smooth_bump(K, inner, inner + width, height)
    bk = get_backend(113)
    r0 = inner + 0.37 * width
    with bk.context():
        d = u.derivatives(bk.array([mp.mpf(r0)]), 2, bk)[:, 0]
        f = lambda t: u(bk.array([t]), bk)[0]  # noqa: E731
        h = mp.mpf(10) ** -8
        fd1 = (f(r0 + h) - f(r0 - h)) / (2 * h)
        fd2 = (f(r0 + h) - 2 * f(mp.mpf(r0)) + f(r0 - h)) / h**2
    scale = abs(height) / width**2
    assert abs(d[1] - fd1) <= 1e-10 * scale
    assert abs(d[2] - fd2) <= 1e-6 * scale


def test_symbolic_scaled_exact():
    v = log_r().scaled(ExactReal.pi())
    assert v.terms[("log",)] == ExactReal.pi()
