import math
from fractions import Fraction as F

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sharpconst.numerics import (
    FLOAT,
    affine_chain,
    gauss_kronrod_7_15,
    gauss_legendre,
    get_backend,
    jet_antideriv,
    jet_derivatives,
    jet_deriv,
    jet_log,
    jet_mul,
    jet_power,
    jet_recip_r,
    smoothstep_jet,
    smoothstep_monomials,
    smoothstep_value,
)

# QUADPACK qk15 table, published to 33 digits.  The fifth node is printed
# there as ...845693013, which is off by 7e-27; the digits below come from
# Newton-polishing the Stieltjes root (see test_kronrod_nodes_are_stieltjes_roots).
QK15_XGK = [
    "0.991455371120812639206854697526329", "0.949107912342758524526189684047851",
    "0.864864423359769072789712788640926", "0.741531185599394439863864773280788",
    "0.586087235467691130294144838258730", "0.405845151377397166906606412076961",
    "0.207784955007898467600689403773245", "0.000000000000000000000000000000000",
]
QK15_WGK = [
    "0.022935322010529224963732008058970", "0.063092092629978553290700663189204",
    "0.104790010322250183839876322541518", "0.140653259715525918745189590510238",
    "0.169004726639267902826583426598550", "0.190350578064785409913256402421014",
    "0.204432940075298892414161999234649", "0.209482141084727828012999174891714",
]
QK15_WG = [
    "0.129484966168869693270611432679082", "0.279705391489276667901467771423780",
    "0.381830050505118944950369775488975", "0.417959183673469387755102040816327",
]


@pytest.mark.parametrize("bits", [53, 113])
def test_kronrod_table(bits):
    xgk, wgk, wg = gauss_kronrod_7_15(bits)
    with mp.workprec(120):
        tol = mp.mpf(1e-15) if bits == 53 else mp.mpf(10) ** -32
        for got, ref in zip([*xgk, *wgk, *wg], QK15_XGK + QK15_WGK + QK15_WG):
            assert abs(mp.mpf(got) - mp.mpf(ref)) <= tol


def test_kronrod_nodes_are_stieltjes_roots():
    from sharpconst.numerics import _legendre_coeffs

    P7 = _legendre_coeffs(7)
    xgk, _, _ = gauss_kronrod_7_15(113)
    with mp.workprec(300):
        def p7(t):
            return sum(mp.mpf(c.numerator) / c.denominator * t**i for i, c in enumerate(P7))

        def inner(f, g):
            return mp.quad(lambda t: f(t) * g(t), [-1, 0, 1])

        # monic E8 = x^8 + sum a_d x^d (d even); orthogonal to x^k P7 for k = 1, 3, 5, 7
        M = mp.matrix(4, 4)
        b = mp.matrix(4, 1)
        for i, k in enumerate((1, 3, 5, 7)):
            for j, d in enumerate((6, 4, 2, 0)):
                M[i, j] = inner(lambda t, d=d: t**d, lambda t, k=k: t**k * p7(t))
            b[i] = -inner(lambda t: t**8, lambda t, k=k: t**k * p7(t))
        a = mp.lu_solve(M, b)

        def e8(t):
            return t**8 + a[0] * t**6 + a[1] * t**4 + a[2] * t**2 + a[3]

        for i in (0, 2, 4, 6):
            root = mp.findroot(e8, mp.mpf(xgk[i]))
            assert abs(root - xgk[i]) < mp.mpf(10) ** -32


def test_kronrod_exactness_degree_22():
    xgk, wgk, _ = gauss_kronrod_7_15(53)
    x = np.concatenate([xgk[:-1], [0.0], -xgk[:-1][::-1]])
    w = np.concatenate([wgk[:-1], [wgk[-1]], wgk[:-1][::-1]])
    for j in range(23):
        exact = 2 / (j + 1) if j % 2 == 0 else 0.0
        assert np.dot(w, x**j) == pytest.approx(exact, abs=1e-14)


def test_gauss_legendre_high_precision_matches_float():
    x53, w53 = gauss_legendre(10, 53)
    x, w = gauss_legendre(10, 113)
    np.testing.assert_allclose([float(v) for v in x], x53, atol=1e-15)
    np.testing.assert_allclose([float(v) for v in w], w53, atol=1e-15)
    with mp.workprec(113):
        assert abs(mp.fsum(w) - 2) < mp.mpf(10) ** -32


def test_backend_selection():
    assert get_backend(53) is FLOAT and get_backend(20) is FLOAT
    assert get_backend(113).bits == 113


def _taylor(f, r, K):
    with mp.workdps(40):
        return [float(c) for c in mp.taylor(f, r, K)]


@given(st.floats(0.1, 5), st.integers(0, 8))
def test_log_and_recip_jets(r, K):
    np.testing.assert_allclose(jet_log(np.float64(r), K), _taylor(mp.log, r, K), rtol=1e-12)
    np.testing.assert_allclose(jet_recip_r(np.float64(r), K), _taylor(lambda t: 1 / t, r, K), rtol=1e-12)


@given(st.floats(0.2, 4), st.fractions(-5, 5, max_denominator=4), st.integers(0, 7))
def test_power_jet(r, s, K):
    ref = _taylor(lambda t: t ** mp.mpf(s.numerator) / 1 if s.denominator == 1 else
                  t ** (mp.mpf(s.numerator) / s.denominator), r, K)
    np.testing.assert_allclose(jet_power(np.float64(r), s, K), ref, rtol=1e-11, atol=1e-300)


@given(st.floats(0.2, 3), st.integers(1, 7))
def test_jet_product_and_calculus(r, K):
    a = jet_log(np.float64(r), K)
    b = jet_recip_r(np.float64(r), K)
    ref = _taylor(lambda t: mp.log(t) / t, r, K)
    np.testing.assert_allclose(jet_mul(a, b), ref, rtol=1e-11, atol=1e-14)
    # d/dr log r = 1/r
    np.testing.assert_allclose(jet_deriv(a), b[:-1], rtol=1e-13)
    back = jet_antideriv(b[:-1], a[0])
    np.testing.assert_allclose(back, a, rtol=1e-13)
    np.testing.assert_allclose(jet_derivatives(a)[1], 1 / r)


def test_affine_chain():
    # g(r) = log(3 r) has g^(n)(r) = 3^n (log)^(n)(3 r)
    r = np.float64(0.7)
    np.testing.assert_allclose(affine_chain(jet_log(3 * r, 5), 3.0)[1:], jet_log(r, 5)[1:], rtol=1e-13)


@pytest.mark.parametrize("K", [1, 3, 6, 9])
def test_smoothstep_monomials_and_endpoints(K):
    c = smoothstep_monomials(K)
    assert sum(c) == 1  # S(1) = 1
    assert all(v == 0 for v in c[: K + 1])  # flat to order K at 0
    y = np.linspace(0, 1, 41)
    poly = sum(float(ci) * y**i for i, ci in enumerate(c))
    np.testing.assert_allclose(smoothstep_value(y, K), poly, atol=1e-13)
    # symmetry S(y) + S(1-y) = 1
    np.testing.assert_allclose(smoothstep_value(y, K) + smoothstep_value(1 - y, K), 1, atol=1e-13)


@pytest.mark.parametrize("K", [2, 5, 8])
def test_smoothstep_jet_matches_monomials(K):
    c = smoothstep_monomials(K)
    for y in (0.13, 0.5, 0.91):
        ref = [float(sum(ci * F(math.comb(i, n)) * F(y) ** (i - n) for i, ci in enumerate(c) if i >= n))
               for n in range(K + 2)]
        np.testing.assert_allclose(smoothstep_jet(np.array([y]), K, K + 1)[:, 0], ref, rtol=1e-10, atol=1e-12)
    outside = smoothstep_jet(np.array([-0.5, 1.5]), K, K)
    np.testing.assert_array_equal(outside[0], [0, 1])
    assert np.all(outside[1:] == 0)


def test_smoothstep_high_precision():
    bk = get_backend(113)
    with bk.context():
        v = smoothstep_value(bk.array([mp.mpf(1) / 3]), 4, bk)[0]
        exact = sum(c * F(1, 3) ** i for i, c in enumerate(smoothstep_monomials(4)))
        assert abs(v - mp.mpf(exact.numerator) / exact.denominator) < mp.mpf(10) ** -32
