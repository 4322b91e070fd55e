"""Adaptive Gauss-Kronrod (7/15) quadrature and radial reductions over R^N."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .exact_constants import DomainError, riesz_gamma, sphere_area
from .numerics import gauss_kronrod_7_15, get_backend


class QuadratureError(RuntimeError):
    """Raised when an integrand produces NaN."""


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    precision_bits: int = 53

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    @property
    def backend(self):
        return get_backend(self.precision_bits)

    def doubled(self) -> "QuadratureConfig":
        return QuadratureConfig(self.rel_tol, self.abs_tol, self.max_subdivisions, 2 * self.precision_bits)


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    subdivisions_used: int
    converged: bool

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        return IntegralResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.subdivisions_used + other.subdivisions_used,
            self.converged and other.converged,
        )

    def scaled(self, c) -> "IntegralResult":
        return IntegralResult(c * self.value, abs(c) * self.error_estimate, self.subdivisions_used, self.converged)


@dataclass(frozen=True)
class LogIntegralResult:
    """log of a positive integral, with relative error and overflow flag."""

    log_value: float
    rel_error: float
    converged: bool
    saturated: bool = False

    @property
    def value(self) -> float:
        return math.exp(self.log_value) if self.log_value < 709 else math.inf


def _gk_interval(f, a, b, bk, rule):
    xgk, wgk, wg = rule
    center = (a + b) / 2
    half = (b - a) / 2
    if bk.bits <= 53:
        x = np.concatenate([center - half * xgk[:-1], [center], center + half * xgk[-2::-1]])
    else:
        x = bk.array([center - half * v for v in xgk[:-1]] + [center] + [center + half * v for v in xgk[-2::-1]])
    y = f(x)
    y = np.asarray(y)
    if bk.bits <= 53:
        if not np.all(np.isfinite(y)):
            bad = x[~np.isfinite(y)]
            raise QuadratureError(f"integrand is not finite at abscissa {bad[0]!r}")
    else:
        for xi, yi in zip(x, y):
            if not mp.isfinite(yi):
                raise QuadratureError(f"integrand is not finite at abscissa {xi!r}")
    # pair up symmetric nodes: y[i] <-> y[14-i], center y[7]
    fc = y[7]
    resk = wgk[7] * fc
    resg = wg[3] * fc
    resabs = abs(resk)
    for i in range(7):
        s = y[i] + y[14 - i]
        resk = resk + wgk[i] * s
        resabs = resabs + wgk[i] * (abs(y[i]) + abs(y[14 - i]))
        if i % 2 == 1:
            resg = resg + wg[i // 2] * s
    mean = resk / 2
    resasc = wgk[7] * abs(fc - mean)
    for i in range(7):
        resasc = resasc + wgk[i] * (abs(y[i] - mean) + abs(y[14 - i] - mean))
    result = resk * half
    err = abs((resk - resg) * half)
    resasc = resasc * abs(half)
    resabs = resabs * abs(half)
    if resasc != 0 and err != 0:
        err = resasc * min(1, (200 * err / resasc) ** 1.5)
    floor = 50 * bk.eps * resabs
    if resabs > 0 and floor > err:
        err = floor
    return result, err


def _transformed(f, a, b, singularity, log_scale, bk):
    """Change variables so the integrand is smooth; returns (g, ta, tb)."""
    if b == math.inf:
        if a <= 0:
            raise DomainError("infinite range needs a > 0")

        def g(t):
            r = a / t
            return f(r) * (a / (t * t))

        return g, bk.const(0) + 0 * a, 1 + 0 * a
    if log_scale:
        if a <= 0:
            raise DomainError("log_scale needs a > 0")

        def g(t):
            r = bk.exp(t)
            return f(r) * r

        return g, bk.log(bk.array([a]))[0], bk.log(bk.array([b]))[0]
    if singularity is not None and -1 < singularity < 0:
        # integrand ~ (r - a)^sigma: with t = (r - a)^(1+sigma) it becomes smooth
        e = 1 + singularity
        inv = 1 / e

        def g(t):
            return f(a + bk.power(t, inv)) * bk.power(t, inv - 1) * inv

        return g, 0 * a, bk.power(bk.array([b - a]), e)[0]
    return f, a, b


def integrate_1d(f, a, b, cfg: QuadratureConfig = DEFAULT_CONFIG, *, singularity=None,
                 log_scale: bool = False, points=()) -> IntegralResult:
    """Globally adaptive 7/15 Gauss-Kronrod integration of a vectorised f over [a, b].

    ``singularity`` declares an endpoint behaviour f ~ (r - a)^sigma at ``a``;
    ``log_scale`` integrates in log r (for ~1/r integrands over long ranges);
    ``b = inf`` is mapped onto (0, 1].  ``points`` are interior breakpoints.
    """
    bk = cfg.backend
    if b == a:
        return IntegralResult(0.0 if bk.bits <= 53 else mp.mpf(0), 0.0, 0, True)
    if b < a:
        res = integrate_1d(f, b, a, cfg, singularity=singularity, log_scale=log_scale, points=points)
        return IntegralResult(-res.value, res.error_estimate, res.subdivisions_used, res.converged)
    rule = gauss_kronrod_7_15(bk.bits)
    with bk.context():
        a = bk.const(a)
        b = b if b == math.inf else bk.const(b)
        inner = sorted(bk.const(p) for p in points if a < p < b)
        edges = [a, *inner, b]
        if len(edges) > 2:
            total = None
            for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
                sub = integrate_1d(
                    f, lo, hi, _share(cfg, len(edges) - 1),
                    singularity=singularity if i == 0 else None,
                    log_scale=log_scale,
                )
                total = sub if total is None else total + sub
            return total
        g, ta, tb = _transformed(f, a, b, singularity, log_scale, bk)
        heap = []
        val, err = _gk_interval(g, ta, tb, bk, rule)
        total_val, total_err = val, err
        heapq.heappush(heap, (-float(err), 0, ta, tb, val, err))
        n = 1
        counter = 1
        while True:
            tol = max(cfg.rel_tol * abs(total_val), cfg.abs_tol)
            if total_err <= tol:
                converged = True
                break
            if n >= cfg.max_subdivisions:
                converged = False
                break
            _, _, lo, hi, v, e = heapq.heappop(heap)
            mid = (lo + hi) / 2
            v1, e1 = _gk_interval(g, lo, mid, bk, rule)
            v2, e2 = _gk_interval(g, mid, hi, bk, rule)
            total_val = total_val - v + v1 + v2
            total_err = total_err - e + e1 + e2
            heapq.heappush(heap, (-float(e1), counter, lo, mid, v1, e1))
            heapq.heappush(heap, (-float(e2), counter + 1, mid, hi, v2, e2))
            counter += 2
            n += 1
        # re-sum to shed the drift of incremental updates
        total_val = sum((item[4] for item in heap), 0 * total_val)
        total_err = sum((item[5] for item in heap), 0 * total_err)
        if total_err <= max(cfg.rel_tol * abs(total_val), cfg.abs_tol):
            converged = True
        if bk.bits <= 53:
            return IntegralResult(float(total_val), float(total_err), n, converged)
        return IntegralResult(+total_val, +total_err, n, converged)


def _share(cfg: QuadratureConfig, pieces: int) -> QuadratureConfig:
    return QuadratureConfig(cfg.rel_tol, cfg.abs_tol / pieces, cfg.max_subdivisions, cfg.precision_bits)


def integrate_radial_L1(g, N: int, r_max, cfg: QuadratureConfig = DEFAULT_CONFIG, *, r_min=0,
                        singularity=None, log_scale=False, points=()) -> IntegralResult:
    """omega_{N-1} * int_{r_min}^{r_max} g(r) r^(N-1) dr for a radial g."""
    bk = cfg.backend
    with bk.context():
        omega = bk.const(sphere_area(N))
    sigma = None if singularity is None else singularity + N - 1

    def integrand(r):
        return g(r) * r ** (N - 1)

    res = integrate_1d(integrand, r_min, r_max, cfg, singularity=sigma, log_scale=log_scale, points=points)
    return res.scaled(omega)


# ---------------------------------------------------------------------------
# spherical mean of the Riesz kernel
# ---------------------------------------------------------------------------

def riesz_sphere_kernel(N: int, alpha, r, rho, cfg: QuadratureConfig = DEFAULT_CONFIG,
                        method: str = "quadrature"):
    """int_{S^{N-1}} |r e_1 - rho theta|^(alpha - N) d sigma(theta).

    ``method="quadrature"`` integrates over the polar angle with weight
    sin^(N-2); ``method="hypergeometric"`` uses the closed form
    omega R^(alpha-N) 2F1((N-alpha)/2, 1-alpha/2; N/2; (r_</r_>)^2).
    """
    alpha_f = float(alpha)
    if not 0 < alpha_f < N:
        raise DomainError(f"alpha={alpha} must lie in (0, {N})")
    bk = cfg.backend
    if method == "hypergeometric":
        return _kernel_hyp(N, alpha, r, rho, bk)
    if method != "quadrature":
        raise ValueError(f"unknown kernel method {method!r}")
    if r == rho and alpha_f <= 1:
        raise DomainError("kernel diverges at r == rho for alpha <= 1")
    with bk.context():
        r_ = bk.const(r)
        rho_ = bk.const(rho)
        a = bk.const(alpha)
        expo = (a - N) / 2
        if N == 2:
            omega_low = bk.const(2)
        else:
            omega_low = bk.const(sphere_area(N - 1))
        diff2 = (r_ - rho_) ** 2
        four = 4 * r_ * rho_

        def f(t):
            s2 = bk.sin(t / 2) ** 2
            dist2 = diff2 + four * s2
            val = bk.power(dist2, expo) if bk.bits > 53 else dist2 ** expo
            if N > 2:
                val = val * bk.sin(t) ** (N - 2)
            return val

        sigma = alpha_f - 2 if (r == rho and alpha_f < 2) else None
        res = integrate_1d(f, 0, bk.pi, cfg, singularity=sigma)
        return res.value * omega_low


def _kernel_hyp(N, alpha, r, rho, bk):
    with bk.context():
        a = bk.const(alpha)
        r = bk.array(r) if np.ndim(r) else bk.const(r)
        rho = bk.array(rho) if np.ndim(rho) else bk.const(rho)
        omega = bk.const(sphere_area(N))
        big = np.maximum(r, rho) if bk.bits <= 53 else np.frompyfunc(max, 2, 1)(r, rho)
        small = np.minimum(r, rho) if bk.bits <= 53 else np.frompyfunc(min, 2, 1)(r, rho)
        t2 = (small / big) ** 2
        if bk.bits > 53:
            # a node rounding onto r == rho would hit the integrable pole of 2F1 at 1
            t2 = np.frompyfunc(min, 2, 1)(t2, 1 - bk.const(2) ** (-bk.bits))
        h = bk.hyp2f1((N - a) / 2, 1 - a / 2, bk.const(N) / 2, t2)
        if bk.bits <= 53 and not np.all(np.isfinite(h)):
            h = np.where(np.isfinite(h), h, _hyp_near_one(N, alpha))
        return omega * h * big ** (a - N)


def _hyp_near_one(N, alpha):
    with mp.workprec(80):
        a = mp.mpf(float(alpha))
        return float(mp.hyp2f1((N - a) / 2, 1 - a / 2, mp.mpf(N) / 2, 1 - mp.mpf(2) ** -60))


def annulus_exp_integral(N: int, exponent, a, b, cfg: QuadratureConfig = DEFAULT_CONFIG,
                         *, log_scale=False, points=()) -> LogIntegralResult:
    """log( omega * int_a^b exp(E(r)) r^(N-1) dr ) evaluated in the log domain.

    ``exponent`` is the vectorised function E.  The integrand is rescaled by
    exp(-E_max) with E_max taken over a probe grid and the Kronrod nodes.
    """
    bk = cfg.backend
    with bk.context():
        probe = bk.array(np.linspace(float(a), float(b), 257)[1:-1])
        e_probe = exponent(probe)
        shift = max(e_probe.max(), exponent(bk.array([float(a), float(b)])).max())
        if bk.bits <= 53 and not math.isfinite(shift):
            return LogIntegralResult(math.inf if shift > 0 else -math.inf, math.inf, False, True)
        omega = bk.const(sphere_area(N))

        def f(r):
            return bk.exp(exponent(r) - shift) * r ** (N - 1)

        res = integrate_1d(f, a, b, cfg, log_scale=log_scale, points=points)
        if res.value <= 0:
            return LogIntegralResult(-math.inf, math.inf, False, True)
        log_val = float(shift + bk.log(bk.array([res.value * omega]))[0])
        return LogIntegralResult(log_val, float(res.error_estimate / res.value), res.converged)


def riesz_constant(N: int, alpha, bk):
    return bk.const(riesz_gamma(N, alpha))
