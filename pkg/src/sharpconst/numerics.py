"""Numeric backends and truncated Taylor series ("jets") in one variable.

A jet of order K at points r is an array of shape (K+1, *r.shape) holding
normalised Taylor coefficients c_n = f^(n)(r) / n!.  Every routine works on
either float64 arrays or object arrays of mpmath numbers, selected by a
backend so that the same code runs at 53 bits or at higher precision.
"""

from __future__ import annotations

import contextlib
import math
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np
import scipy.special

from .exact_constants import ExactReal, binomial


@lru_cache(maxsize=4096)
def _exact_value(x: ExactReal, bits: int):
    return float(x) if bits <= 53 else x.to_float(bits)


class FloatBackend:
    name = "float64"
    bits = 53
    dtype = float
    eps = float(np.finfo(float).eps)

    log = staticmethod(np.log)
    exp = staticmethod(np.exp)
    sqrt = staticmethod(np.sqrt)
    sin = staticmethod(np.sin)
    cos = staticmethod(np.cos)
    hyp2f1 = staticmethod(scipy.special.hyp2f1)

    def array(self, x):
        return np.asarray(x, dtype=float)

    def const(self, x):
        if isinstance(x, ExactReal):
            return _exact_value(x, 53)
        if isinstance(x, Fraction):
            return x.numerator / x.denominator
        return float(x)

    def zeros(self, shape):
        return np.zeros(shape, dtype=float)

    def power(self, x, s):
        return np.power(x, self.const(s))

    def to_float(self, x):
        return float(x)

    @property
    def pi(self):
        return math.pi

    def context(self):
        return contextlib.nullcontext()

    def __repr__(self):
        return "FloatBackend()"


class MPBackend:
    """mpmath numbers in numpy object arrays; use inside ``context()``."""

    name = "mpmath"
    dtype = object

    def __init__(self, bits: int):
        self.bits = int(bits)
        self.eps = mp.mpf(2) ** (1 - self.bits)
        self.log = np.frompyfunc(mp.log, 1, 1)
        self.exp = np.frompyfunc(mp.exp, 1, 1)
        self.sqrt = np.frompyfunc(mp.sqrt, 1, 1)
        self.sin = np.frompyfunc(mp.sin, 1, 1)
        self.cos = np.frompyfunc(mp.cos, 1, 1)
        self._hyp = np.frompyfunc(mp.hyp2f1, 4, 1)
        self._pow = np.frompyfunc(mp.power, 2, 1)

    def hyp2f1(self, a, b, c, z):
        return self._hyp(a, b, c, z)

    def array(self, x):
        arr = np.asarray(x, dtype=object)
        flat = [mp.mpf(v) if not isinstance(v, mp.mpf) else v for v in arr.ravel()]
        out = np.empty(arr.shape, dtype=object)
        out.ravel()[:] = flat
        return out

    def const(self, x):
        if isinstance(x, ExactReal):
            return _exact_value(x, self.bits)
        if isinstance(x, Fraction):
            return mp.mpf(x.numerator) / x.denominator
        return mp.mpf(x)

    def zeros(self, shape):
        out = np.empty(shape, dtype=object)
        out.fill(mp.mpf(0))
        return out

    def power(self, x, s):
        return self._pow(x, self.const(s))

    def to_float(self, x):
        return float(x)

    @property
    def pi(self):
        return +mp.pi

    def context(self):
        return mp.workprec(self.bits)

    def __repr__(self):
        return f"MPBackend({self.bits})"


FLOAT = FloatBackend()


@lru_cache(maxsize=None)
def get_backend(bits: int = 53):
    return FLOAT if bits <= 53 else MPBackend(bits)


# ---------------------------------------------------------------------------
# jet arithmetic
# ---------------------------------------------------------------------------

def jet_mul(a, b):
    """Cauchy product of two jets, truncated to the shorter order."""
    K = min(len(a), len(b)) - 1
    out = [a[0] * b[0]]
    for n in range(1, K + 1):
        acc = a[0] * b[n]
        for i in range(1, n + 1):
            acc = acc + a[i] * b[n - i]
        out.append(acc)
    return np.stack(out)


def jet_deriv(a):
    """Jet of f' from the jet of f (order drops by one)."""
    return np.stack([(n + 1) * a[n + 1] for n in range(len(a) - 1)])


def jet_antideriv(a, value):
    """Jet of F with F' = f and F(r) = value (order rises by one)."""
    return np.stack([value] + [a[n] / (n + 1) for n in range(len(a))])


def jet_scale(a, c):
    return np.stack([c * a[n] for n in range(len(a))])


def jet_recip_r(r, K):
    """Taylor coefficients of 1/r: (-1)^n r^(-n-1)."""
    inv = 1 / r
    out = [inv]
    for _ in range(K):
        out.append(-out[-1] * inv)
    return np.stack(out)


def jet_power(r, s, K, bk=FLOAT):
    """Taylor coefficients of r^s: binom(s, n) r^(s-n)."""
    s = Fraction(s)
    if s.denominator == 1 and s >= 0:
        top = int(s)
        out = []
        for n in range(K + 1):
            if n > top:
                out.append(bk.zeros(np.shape(r)) if np.ndim(r) else 0 * r)
            else:
                out.append(bk.const(binomial(s, n)) * r ** (top - n))
        return np.stack(out)
    base = bk.power(r, s)
    inv = 1 / r
    out = [base]
    for n in range(1, K + 1):
        base = base * inv
        out.append(bk.const(binomial(s, n)) * base)
    return np.stack(out)


def jet_log(r, K, bk=FLOAT):
    """Taylor coefficients of log r: log r, then (-1)^(n-1) / (n r^n)."""
    out = [bk.log(r)]
    inv = 1 / r
    p = inv
    for n in range(1, K + 1):
        out.append(p * ((-1) ** (n - 1)) / n)
        p = p * inv
    return np.stack(out)


def jet_derivatives(jet):
    """Convert normalised coefficients to derivatives f^(n)."""
    return np.stack([math.factorial(n) * jet[n] for n in range(len(jet))])


# ---------------------------------------------------------------------------
# smoothstep S_K: regularised incomplete beta I_y(K+1, K+1)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def smoothstep_monomials(K: int) -> tuple[Fraction, ...]:
    """Exact monomial coefficients of S_K(y) = y^(K+1) sum_i C(K+i, i) (1-y)^i."""
    coeffs = [Fraction(0)] * (2 * K + 2)
    for i in range(K + 1):
        c = math.comb(K + i, i)
        for j in range(i + 1):
            coeffs[K + 1 + j] += c * math.comb(i, j) * (-1) ** j
    return tuple(coeffs)


def smoothstep_value(y, K, bk=FLOAT):
    """S_K(y) on [0, 1] as a sum of positive terms; clamped outside."""
    yc = np.clip(y, 0, 1) if bk is FLOAT else np.frompyfunc(lambda v: min(max(v, 0), 1), 1, 1)(y)
    one_minus = 1 - yc
    acc = 0 * yc
    p = 1 + 0 * yc
    for i in range(K + 1):
        acc = acc + math.comb(K + i, i) * p
        p = p * one_minus
    return yc ** (K + 1) * acc


def smoothstep_jet(y, K, order, bk=FLOAT):
    """Jet in y of S_K, using S' = c y^K (1-y)^K for the derivative terms."""
    y = bk.array(y)
    inside = ((y > 0) & (y < 1)).astype(bool)
    yc = np.where(inside, y, 0.5 if bk is FLOAT else mp.mpf(0.5))
    if order == 0:
        return smoothstep_value(y, K, bk)[None, ...]
    c = math.factorial(2 * K + 1) // (math.factorial(K) ** 2)
    sub = order - 1
    a = [math.comb(K, n) * yc ** (K - n) if n <= K else 0 * yc for n in range(sub + 1)]
    b = [math.comb(K, n) * (-1) ** n * (1 - yc) ** (K - n) if n <= K else 0 * yc for n in range(sub + 1)]
    dj = jet_mul(np.stack(a), np.stack(b)) * c
    full = jet_antideriv(dj, smoothstep_value(y, K, bk))
    mask = inside[None, ...]
    zero = 0 * full[1:]
    full[1:] = np.where(mask, full[1:], zero)
    return full


def affine_chain(jet, scale):
    """Jet of g(r) = f(scale * r + shift) given the jet of f at the image point."""
    out = []
    s = 1
    for n in range(len(jet)):
        out.append(jet[n] * s)
        s = s * scale
    return np.stack(out)


# ---------------------------------------------------------------------------
# Gauss-Legendre and Gauss-Kronrod rules
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def gauss_legendre(n: int, bits: int = 53):
    """Nodes and weights on [-1, 1] (mpmath lists for bits > 53)."""
    if bits <= 53:
        x, w = np.polynomial.legendre.leggauss(n)
        return x, w
    with mp.workprec(bits + 32):
        nodes, weights = [], []
        for i in range(1, n + 1):
            x = mp.cos(mp.pi * (i - mp.mpf(1) / 4) / (n + mp.mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mp.mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mp.mpf(2) ** (-bits - 24):
                    break
            p0, p1 = mp.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    with mp.workprec(bits):
        return [+v for v in nodes[::-1]], [+v for v in weights[::-1]]


def _legendre_coeffs(n: int) -> list[Fraction]:
    p0, p1 = [Fraction(1)], [Fraction(0), Fraction(1)]
    if n == 0:
        return p0
    for k in range(2, n + 1):
        nxt = [Fraction(0)] * (k + 1)
        for i, c in enumerate(p1):
            nxt[i + 1] += Fraction(2 * k - 1, k) * c
        for i, c in enumerate(p0):
            nxt[i] -= Fraction(k - 1, k) * c
        p0, p1 = p1, nxt
    return p1


def _moment(j: int) -> Fraction:
    return Fraction(2, j + 1) if j % 2 == 0 else Fraction(0)


def _solve_fractions(A, b):
    n = len(b)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


@lru_cache(maxsize=None)
def gauss_kronrod_7_15(bits: int = 53):
    """Kronrod nodes (descending, >= 0), Kronrod weights and Gauss weights.

    Derived from scratch: the Stieltjes polynomial E_8 is fixed by
    orthogonality against x^k P_7 (exact rationals), its roots interleave
    the Gauss nodes, and weights come from moment equations.
    """
    P7 = _legendre_coeffs(7)
    # E8 = x^8 + a6 x^6 + a4 x^4 + a2 x^2 + a0, orthogonal to x^k P7, k odd.
    unknown_deg = [6, 4, 2, 0]
    A, rhs = [], []
    for k in (1, 3, 5, 7):
        row = []
        for d in unknown_deg:
            row.append(sum(c * _moment(i + d + k) for i, c in enumerate(P7)))
        A.append(row)
        rhs.append(-sum(c * _moment(i + 8 + k) for i, c in enumerate(P7)))
    a6, a4, a2, a0 = _solve_fractions(A, rhs)
    work = max(bits, 53) + 64
    with mp.workprec(work):
        def frac(x):
            return mp.mpf(x.numerator) / x.denominator

        zk = mp.polyroots([1, frac(a6), frac(a4), frac(a2), frac(a0)], maxsteps=200, extraprec=work)
        kron = sorted((mp.sqrt(mp.re(z)) for z in zk), reverse=True)
        # P7 / x as a cubic in z = x^2
        cub = [frac(P7[7]), frac(P7[5]), frac(P7[3]), frac(P7[1])]
        zg = mp.polyroots(cub, maxsteps=200, extraprec=work)
        gauss = sorted((mp.sqrt(mp.re(z)) for z in zg), reverse=True) + [mp.mpf(0)]
        pos = sorted(kron + gauss, reverse=True)
        nodes = [*pos[:-1], mp.mpf(0)]
        full = [*nodes[:-1], mp.mpf(0), *[-x for x in reversed(nodes[:-1])]]
        V = mp.matrix([[x**j for x in full] for j in range(15)])
        m = mp.matrix([frac(_moment(j)) for j in range(15)])
        wk = mp.lu_solve(V, m)
        gfull = [*gauss[:-1], mp.mpf(0), *[-x for x in reversed(gauss[:-1])]]
        Vg = mp.matrix([[x**j for x in gfull] for j in range(7)])
        mg = mp.matrix([frac(_moment(j)) for j in range(7)])
        wg = mp.lu_solve(Vg, mg)
        xgk = nodes  # 8 values: descending, last is 0
        wgk = [wk[i] for i in range(8)]
        wgg = [wg[i] for i in range(4)]
    if bits <= 53:
        return (np.array([float(v) for v in xgk]), np.array([float(v) for v in wgk]),
                np.array([float(v) for v in wgg]))
    with mp.workprec(bits):
        return ([+v for v in xgk], [+v for v in wgk], [+v for v in wgg])
