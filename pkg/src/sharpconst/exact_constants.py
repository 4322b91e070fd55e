"""Exact closed-form constants for critical Sobolev embeddings.

Every constant is a product of rational powers of primes and of pi, so it
lives in :class:`ExactReal`, a multiplicative monomial

    coeff * prod(p ** e_p) * pi ** e_pi,     0 < e_p < 1,

kept in a canonical form so that ``==`` is exact equality of real numbers.
Values that leave this class (Gamma at non half-integer points) fall back
to an mpmath float and are flagged ``exact=False``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath as mp

DEFAULT_PRECISION_BITS = 113


class DomainError(ValueError):
    """Argument outside the domain of a closed-form constant."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float) and x.is_integer():
        return Fraction(int(x))
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@lru_cache(maxsize=4096)
def _factor(n: int) -> tuple[tuple[int, int], ...]:
    if n == 1:
        return ()
    from sympy import factorint

    return tuple(sorted(factorint(n).items()))


def _split(e: Fraction) -> tuple[int, Fraction]:
    whole = e.numerator // e.denominator
    return whole, e - whole


class ExactReal:
    """Real number coeff * prod(p**e) * pi**e_pi with exact rational data.

    Multiplication, division and rational powers are exact.  Addition is
    exact only between values sharing the same irrational part; otherwise
    the result is an inexact float.
    """

    __slots__ = ("coeff", "radicals", "pi_power", "exact", "_approx")

    def __init__(self, coeff=1, radicals=None, pi_power=0, *, _approx=None):
        if _approx is not None:
            self.coeff = None
            self.radicals = ()
            self.pi_power = None
            self.exact = False
            self._approx = mp.mpf(_approx)
            return
        c = _frac(coeff)
        pi_e = _frac(pi_power)
        rad: dict[int, Fraction] = {}
        for p, e in (radicals.items() if isinstance(radicals, dict) else (radicals or ())):
            e = _frac(e)
            for q, k in _factor(int(p)):
                rad[q] = rad.get(q, Fraction(0)) + k * e
        # push integer parts of prime exponents into the rational coefficient
        clean = {}
        for p, e in rad.items():
            whole, part = _split(e)
            if whole:
                c *= Fraction(p) ** whole
            if part:
                clean[p] = part
        if c == 0:
            clean, pi_e = {}, Fraction(0)
        self.coeff = c
        self.radicals = tuple(sorted(clean.items()))
        self.pi_power = pi_e
        self.exact = True
        self._approx = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def inexact(cls, value) -> "ExactReal":
        return cls(_approx=value)

    @classmethod
    def pi(cls, power=1) -> "ExactReal":
        return cls(1, None, power)

    @classmethod
    def coerce(cls, x) -> "ExactReal":
        if isinstance(x, ExactReal):
            return x
        if isinstance(x, mp.mpf):
            return cls.inexact(x)
        if isinstance(x, float) and not x.is_integer():
            return cls.inexact(x)
        return cls(x)

    # -- spec-facing views ----------------------------------------------------
    @property
    def pi_half_power(self) -> int:
        """Integer q with pi factor pi**(q/2); raises if pi exponent is finer."""
        self._need_exact()
        q = 2 * self.pi_power
        if q.denominator != 1:
            raise ValueError(f"pi exponent {self.pi_power} is not a half-integer")
        return int(q)

    @property
    def radicand(self) -> Fraction:
        """Square-free rho with value coeff * sqrt(rho) * pi**(q/2)."""
        self._need_exact()
        rho = 1
        for p, e in self.radicals:
            if e != Fraction(1, 2):
                raise ValueError(f"{p}^{e} is not a square root")
            rho *= p
        return Fraction(rho)

    @property
    def is_rational(self) -> bool:
        return self.exact and not self.radicals and self.pi_power == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.coeff

    def _need_exact(self):
        if not self.exact:
            raise ValueError("operation requires an exact value")

    # -- arithmetic -------------------------------------------------------------
    def __mul__(self, other):
        other = ExactReal.coerce(other)
        if not (self.exact and other.exact):
            with mp.workprec(_work_bits()):
                return ExactReal.inexact(self.to_float(_work_bits()) * other.to_float(_work_bits()))
        rad = dict(self.radicals)
        for p, e in other.radicals:
            rad[p] = rad.get(p, Fraction(0)) + e
        return ExactReal(self.coeff * other.coeff, rad, self.pi_power + other.pi_power)

    __rmul__ = __mul__

    def __pow__(self, e):
        if not self.exact:
            with mp.workprec(_work_bits()):
                return ExactReal.inexact(self._approx ** mp.mpf(_frac_or_float(e)))
        e = _frac(e)
        if e.denominator == 1:
            n = int(e)
            if n < 0 and self.coeff == 0:
                raise ZeroDivisionError("0 ** negative")
            rad = {p: k * e for p, k in self.radicals}
            return ExactReal(self.coeff ** n, rad, self.pi_power * e)
        if self.coeff < 0:
            raise DomainError("non-integer power of a negative value")
        if self.coeff == 0:
            if e < 0:
                raise ZeroDivisionError("0 ** negative")
            return ExactReal(0)
        rad = {p: k * e for p, k in self.radicals}
        for p, k in _factor(self.coeff.numerator):
            rad[p] = rad.get(p, Fraction(0)) + k * e
        for p, k in _factor(self.coeff.denominator):
            rad[p] = rad.get(p, Fraction(0)) - k * e
        return ExactReal(1, rad, self.pi_power * e)

    def reciprocal(self) -> "ExactReal":
        return self ** -1

    def __truediv__(self, other):
        return self * ExactReal.coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return ExactReal.coerce(other) * self.reciprocal()

    def __neg__(self):
        if not self.exact:
            return ExactReal.inexact(-self._approx)
        return ExactReal(-self.coeff, dict(self.radicals), self.pi_power)

    def _same_shape(self, other) -> bool:
        return self.radicals == other.radicals and self.pi_power == other.pi_power

    def __add__(self, other):
        other = ExactReal.coerce(other)
        if self.exact and other.exact:
            if other.coeff == 0:
                return self
            if self.coeff == 0:
                return other
            if self._same_shape(other):
                return ExactReal(self.coeff + other.coeff, dict(self.radicals), self.pi_power)
        bits = _work_bits()
        with mp.workprec(bits):
            return ExactReal.inexact(self.to_float(bits) + other.to_float(bits))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-ExactReal.coerce(other))

    def __rsub__(self, other):
        return ExactReal.coerce(other) + (-self)

    # -- comparison -------------------------------------------------------------
    def _key(self):
        if self.exact:
            return (True, self.coeff, self.radicals, self.pi_power)
        return (False, self._approx)

    def __eq__(self, other):
        try:
            other = ExactReal.coerce(other)
        except TypeError:
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def sign(self) -> int:
        if self.exact:
            return (self.coeff > 0) - (self.coeff < 0)
        return int(mp.sign(self._approx))

    def __lt__(self, other):
        other = ExactReal.coerce(other)
        diff = self - other
        if diff.exact:
            return diff.sign() < 0
        return self.to_float(_work_bits()) < other.to_float(_work_bits())

    def __gt__(self, other):
        return ExactReal.coerce(other) < self

    # -- conversion ---------------------------------------------------------------
    def to_float(self, precision_bits: int = DEFAULT_PRECISION_BITS) -> mp.mpf:
        """Value rounded to ``precision_bits`` (evaluated with 32 guard bits)."""
        if not self.exact:
            with mp.workprec(precision_bits):
                return +self._approx
        with mp.workprec(precision_bits + 32):
            v = mp.mpf(self.coeff.numerator) / self.coeff.denominator
            for p, e in self.radicals:
                v *= mp.power(p, mp.mpf(e.numerator) / e.denominator)
            if self.pi_power:
                v *= mp.power(mp.pi, mp.mpf(self.pi_power.numerator) / self.pi_power.denominator)
        with mp.workprec(precision_bits):
            return +v

    def __float__(self):
        return float(self.to_float(53))

    def __repr__(self):
        return f"ExactReal({self})"

    def __str__(self):
        return render(self)


def _frac_or_float(e):
    try:
        e = _frac(e)
        return mp.mpf(e.numerator) / e.denominator
    except TypeError:
        return e


def _work_bits() -> int:
    return max(mp.mp.prec, DEFAULT_PRECISION_BITS) + 32


def _render_exp(e: Fraction) -> str:
    if e.denominator == 1 and e > 0:
        return str(e.numerator)
    return f"({e.numerator})" if e.denominator == 1 else f"({e.numerator}/{e.denominator})"


def render(x: ExactReal) -> str:
    """Stable string form ``rational[·radicals][·π^(e)]``.

    Square roots are grouped as ``√ρ``; other prime roots print as
    ``p^(a/b)``.  Inexact values print as ``≈<digits>``.
    """
    if not x.exact:
        return "≈" + mp.nstr(x._approx, 20)
    if x.coeff == 0:
        return "0"
    parts = []
    sqrt_part = 1
    for p, e in x.radicals:
        if e == Fraction(1, 2):
            sqrt_part *= p
        else:
            parts.append(f"{p}^{_render_exp(e)}")
    if sqrt_part != 1:
        parts.insert(0, f"√{sqrt_part}")
    if x.pi_power == 1:
        parts.append("π")
    elif x.pi_power != 0:
        parts.append(f"π^{_render_exp(x.pi_power)}")
    c = x.coeff
    if not parts:
        return str(c)
    if c == 1:
        return "·".join(parts)
    if c == -1:
        return "-" + "·".join(parts)
    return "·".join([str(c)] + parts)


# ---------------------------------------------------------------------------
# Gamma, Riesz normalisation, sphere area
# ---------------------------------------------------------------------------

def half_integer_gamma(q: int) -> ExactReal:
    """Gamma(q/2) for a positive integer q, exactly."""
    if isinstance(q, bool) or not isinstance(q, int):
        q2 = _frac(q)
        if q2.denominator != 1:
            raise DomainError(f"Gamma argument {q2}/2 is not a half-integer")
        q = int(q2)
    if q <= 0:
        raise DomainError(f"Gamma({q}/2): argument must be positive")
    if q % 2 == 0:
        return ExactReal(math.factorial(q // 2 - 1))
    n = (q - 1) // 2
    return ExactReal(Fraction(math.factorial(2 * n), 4**n * math.factorial(n)), None, Fraction(1, 2))


def _gamma_half_arg(x: Fraction) -> ExactReal:
    """Gamma(x) exact when 2x is an integer, mpmath float otherwise."""
    if x <= 0:
        raise DomainError(f"Gamma({x}) is outside the supported domain")
    twice = 2 * x
    if twice.denominator == 1:
        return half_integer_gamma(int(twice))
    with mp.workprec(_work_bits()):
        return ExactReal.inexact(mp.gamma(mp.mpf(x.numerator) / x.denominator))


def _check_dim(N):
    if isinstance(N, bool) or not isinstance(N, int) or N < 2:
        raise DomainError(f"dimension N must be an integer >= 2, got {N!r}")


@lru_cache(maxsize=None)
def riesz_gamma(N: int, alpha) -> ExactReal:
    """Riesz-potential normaliser pi^(N/2) 2^alpha Gamma(alpha/2) / Gamma((N-alpha)/2)."""
    _check_dim(N)
    a = _frac(alpha)
    if not 0 < a < N:
        raise DomainError(f"alpha={a} must lie in (0, {N})")
    g = _gamma_half_arg(a / 2) / _gamma_half_arg((N - a) / 2)
    two = ExactReal(1, {2: a}) if a.denominator != 1 else ExactReal(Fraction(2) ** int(a))
    return ExactReal.pi(Fraction(N, 2)) * two * g


def riesz_gamma_tilde(N: int, alpha) -> ExactReal:
    """alpha * gamma(alpha) for alpha > 0 and the sphere area at alpha = 0."""
    _check_dim(N)
    a = _frac(alpha)
    if a < 0:
        raise DomainError(f"alpha={a} must be non-negative")
    if a == 0:
        return sphere_area(N)
    return ExactReal(a) * riesz_gamma(N, a)


@lru_cache(maxsize=None)
def sphere_area(N: int) -> ExactReal:
    """Surface area of the unit sphere S^(N-1) in R^N."""
    _check_dim(N)
    return ExactReal(2) * ExactReal.pi(Fraction(N, 2)) / half_integer_gamma(N)


def unit_ball_volume(N: int) -> ExactReal:
    return sphere_area(N) / N


# ---------------------------------------------------------------------------
# Combinatorial constants for |grad^m log r|^2 and |grad^m r^s|^2
# ---------------------------------------------------------------------------

def falling_factorial(nu, k: int) -> Fraction:
    """nu (nu-1) ... (nu-k+1); empty product for k = 0."""
    if k < 0:
        raise DomainError("falling factorial length must be >= 0")
    nu = _frac(nu)
    out = Fraction(1)
    for j in range(k):
        out *= nu - j
    return out


def binomial(top, n: int) -> Fraction:
    """Generalised binomial coefficient with rational top."""
    if n < 0:
        return Fraction(0)
    return falling_factorial(top, n) / math.factorial(n)


def _tensor_norm_sum(N: int, m: int, inner_weight) -> Fraction:
    total = Fraction(0)
    for l in range(m // 2 + 1):
        outer = math.factorial(m - 2 * l) * math.factorial(l) * falling_factorial(Fraction(N - 3, 2) + l, l)
        if outer == 0:
            continue
        inner = Fraction(0)
        for n in range((m + 1) // 2, m - l + 1):
            inner += (
                Fraction(2) ** (2 * n - m + l)
                * inner_weight(n)
                * binomial(n, m - n)
                * binomial(m - n, l)
            )
        total += outer * inner * inner
    return math.factorial(m) * total


@lru_cache(maxsize=None)
def ell_value(N: int, m: int) -> Fraction:
    """l_N^m as a Fraction: |grad^m log|x||^2 = l_N^m / |x|^(2m)."""
    _check_dim(N)
    if m < 1:
        raise DomainError("order m must be >= 1")
    return _tensor_norm_sum(N, m, lambda n: Fraction((-1) ** n, 2 * n))


@lru_cache(maxsize=None)
def lambda_value(N: int, s, m: int) -> Fraction:
    """lambda_N^{s,m} as a Fraction: |grad^m |x|^s|^2 = lambda / |x|^(2(m-s))."""
    _check_dim(N)
    if m < 1:
        raise DomainError("order m must be >= 1")
    half = _frac(s) / 2
    return _tensor_norm_sum(N, m, lambda n: binomial(half, n))


def ell_constant(N: int, m: int) -> ExactReal:
    return ExactReal(ell_value(N, m))


def lambda_constant(N: int, s, m: int) -> ExactReal:
    return ExactReal(lambda_value(N, _frac(s), m))


# ---------------------------------------------------------------------------
# Sharp constants of the embeddings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdamsSetting:
    """Critical exponent pair p = N/m and p' = N/(N-m)."""

    N: int
    m: int

    def __post_init__(self):
        _check_dim(self.N)
        if not 1 <= self.m < self.N:
            raise DomainError(f"need 1 <= m < N, got m={self.m}, N={self.N}")

    @property
    def p(self) -> Fraction:
        return Fraction(self.N, self.m)

    @property
    def p_conj(self) -> Fraction:
        return Fraction(self.N, self.N - self.m)


def sharp_c(N: int, k: int) -> ExactReal:
    """Best constant c_k in sup|u| <= c_k * int |grad^k (-Lap)^((N-k)/2) u|."""
    _check_dim(N)
    if not 1 <= k <= N - 1:
        raise DomainError(f"need 1 <= k <= N-1, got k={k}")
    lam = lambda_constant(N, k - N, k)
    return (lam ** Fraction(-1, 2)) / riesz_gamma(N, N - k)


def moser_alpha0(N: int) -> ExactReal:
    """Moser's exponent N * omega_{N-1}^(1/(N-1))."""
    _check_dim(N)
    return ExactReal(N) * sphere_area(N) ** Fraction(1, N - 1)


def adams_beta0(N: int, m: int) -> ExactReal:
    """Adams' sharp exponent for the norm of (-Lap)^(m/2) u or grad (-Lap)^((m-1)/2) u."""
    st = AdamsSetting(N, m)
    base = riesz_gamma(N, m) if m % 2 == 0 else riesz_gamma_tilde(N, m - 1)
    return ExactReal(N) / sphere_area(N) * base ** st.p_conj


def beta_tilde(N: int, m: int) -> ExactReal:
    """Sharp exponent for the full m-th gradient norm ||grad^m u||_{N/m}."""
    AdamsSetting(N, m)
    omega = sphere_area(N)
    return ExactReal(N) * omega ** Fraction(m, N - m) * ell_constant(N, m) ** Fraction(N, 2 * (N - m))


def beta_tilde_k(N: int, m: int, k: int) -> ExactReal:
    """Sharp exponent for the mixed norm ||grad^k (-Lap)^((m-k)/2) u||_{N/m}."""
    st = AdamsSetting(N, m)
    if not 1 <= k <= m - 2:
        raise DomainError(f"need 1 <= k <= m-2, got k={k}, m={m}")
    if (m - k) % 2:
        raise DomainError(f"m-k must be even, got m={m}, k={k}")
    lam = lambda_constant(N, k - m, k)
    inner = riesz_gamma(N, m - k) * lam ** Fraction(1, 2)
    return ExactReal(N) / sphere_area(N) * inner ** st.p_conj


def bmo_c0(N: int) -> ExactReal:
    """Constant in |u|_BMO <= c_0 * int |(-Lap)^(N/2) u|."""
    _check_dim(N)
    return (ExactReal(N - 1) * riesz_gamma(N, N - 1)).reciprocal()


def log_fundamental_coeff(N: int) -> ExactReal:
    """c_N with (-Lap)^(N/2) [c_N log(1/|x|)] = delta_0."""
    _check_dim(N)
    return ExactReal(2) / (ExactReal.pi(Fraction(N, 2)) * ExactReal(2**N) * half_integer_gamma(N))


def endpoint_potential_coeff(N: int, m: int) -> ExactReal:
    """gamma(m) / (sqrt(l_N^m) omega_{N-1}); bounds |u| by this times I_m|grad^m u|."""
    AdamsSetting(N, m)
    return riesz_gamma(N, m) / (ell_constant(N, m) ** Fraction(1, 2) * sphere_area(N))


def intermediate_potential_coeff(N: int, m: int, k: int) -> ExactReal:
    """gamma(m) / (gamma(m-k) sqrt(lambda_N^{k-m,k}))."""
    AdamsSetting(N, m)
    if not 1 <= k <= m - 1:
        raise DomainError(f"need 1 <= k <= m-1, got k={k}")
    return riesz_gamma(N, m) / (riesz_gamma(N, m - k) * lambda_constant(N, k - m, k) ** Fraction(1, 2))


def frac_lap_log_coeff(N: int, m) -> ExactReal:
    """Coefficient c with (-Lap)^(m/2) log|x| = c / |x|^m, i.e. -gamma(m)/omega."""
    return -(riesz_gamma(N, m) / sphere_area(N))


def verify_gamma_reflection(N: int, alpha, rel_tol: float = 1e-25) -> bool:
    """gamma(alpha) * gamma(N - alpha) == 2^N pi^N (exact when both sides are)."""
    lhs = riesz_gamma(N, alpha) * riesz_gamma(N, N - _frac(alpha))
    rhs = ExactReal(2**N) * ExactReal.pi(N)
    if lhs.exact:
        return lhs == rhs
    a, b = lhs.to_float(), rhs.to_float()
    return abs(a - b) <= rel_tol * abs(b)


def verify_laplacian_log_coeff(N: int, m: int) -> bool:
    """(2-N) gamma(N-2) / gamma(N-m) == -gamma(m)/omega_{N-1} for N >= 3, 0 < m < N."""
    if N < 3:
        raise DomainError("the (2-N) gamma(N-2) form needs N >= 3")
    lhs = ExactReal(2 - N) * riesz_gamma(N, N - 2) / riesz_gamma(N, N - m)
    return lhs == frac_lap_log_coeff(N, m)
