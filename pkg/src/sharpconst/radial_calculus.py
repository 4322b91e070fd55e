"""Exact symbolic calculus for gradient tensors of radial functions.

A ``TermSum`` is a finite sum  sum c * v^(j)(r) * x^beta * r^(-p)  with
rational c and p.  Partial derivatives act by

    d_i v^(j)(r) = v^(j+1)(r) x_i / r
    d_i x^beta   = beta_i x^(beta - e_i)
    d_i r^(-p)   = -p x_i r^(-p-2)

so iterated gradients, the k-fold divergence and tensor norms of fields
built from one radial base v stay exact.  Equality away from the origin is
decided by a normal form that eliminates x_N^2 = r^2 - sum_{i<N} x_i^2.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp

from .exact_constants import DomainError, _frac, falling_factorial, lambda_value
from .profiles import (
    LaplacianProfile,
    RadialProfile,
    SymbolicRadial,
    log_r,
    power_r,
)

MAX_RANK = 6
MAX_DIM = 8


# ---------------------------------------------------------------------------
# radial bases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Base:
    """Radial base function v.  kind is "log", "power", "abstract" or "one"."""

    kind: str
    s: Fraction | None = None

    def deriv(self, j: int):
        """(coefficient, exponent) with v^(j)(r) = coefficient * r^exponent, or None."""
        if self.kind == "log":
            if j == 0:
                return None
            return Fraction((-1) ** (j - 1) * math.factorial(j - 1)), Fraction(-j)
        if self.kind == "power":
            return falling_factorial(self.s, j), self.s - j
        if self.kind == "one":
            return (Fraction(1), Fraction(0)) if j == 0 else (Fraction(0), Fraction(0))
        return None

    def profile(self) -> SymbolicRadial:
        if self.kind == "log":
            return log_r()
        if self.kind == "power":
            return power_r(self.s)
        raise DomainError(f"base {self.kind!r} has no closed-form profile")

    def __str__(self):
        return {"log": "log r", "abstract": "v", "one": "1"}.get(self.kind) or f"r^{self.s}"


LOG_BASE = Base("log")
ABSTRACT_BASE = Base("abstract")
ONE = Base("one")


def power_base(s) -> Base:
    return Base("power", _frac(s))


def as_base(base) -> Base:
    if isinstance(base, Base):
        return base
    if base in ("log", "log r"):
        return LOG_BASE
    if base in ("abstract", "v"):
        return ABSTRACT_BASE
    return power_base(base)


# ---------------------------------------------------------------------------
# TermSum
# ---------------------------------------------------------------------------

class TermSum:
    """Immutable sum of c * v^(j)(r) * x^beta * r^(-p), keyed by (j, beta, p)."""

    __slots__ = ("N", "base", "terms")

    def __init__(self, N: int, base: Base, terms=None):
        self.N = N
        self.base = base
        merged: dict = {}
        for key, c in (terms.items() if isinstance(terms, dict) else (terms or ())):
            if c:
                merged[key] = merged.get(key, 0) + c
        self.terms = {k: Fraction(v) for k, v in sorted(merged.items()) if v}

    @classmethod
    def scalar(cls, N: int, base) -> "TermSum":
        """The base function itself, v(r)."""
        return cls(N, as_base(base), {(0, (0,) * N, Fraction(0)): Fraction(1)})

    @classmethod
    def monomial(cls, N: int, beta, p, c=1) -> "TermSum":
        return cls(N, ONE, {(0, tuple(beta), _frac(p)): _frac(c)})

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "TermSum"):
        if self.N != other.N or self.base != other.base:
            raise DomainError("TermSums over different dimensions or bases")

    def __add__(self, other: "TermSum") -> "TermSum":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return TermSum(self.N, self.base, out)

    def __neg__(self):
        return TermSum(self.N, self.base, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TermSum":
        c = _frac(c)
        return TermSum(self.N, self.base, {k: c * v for k, v in self.terms.items()})

    def times_radial_power(self, q) -> "TermSum":
        """Multiply by r^q."""
        q = _frac(q)
        return TermSum(self.N, self.base, {(j, b, p - q): c for (j, b, p), c in self.terms.items()})

    def partial(self, i: int) -> "TermSum":
        out: dict = {}
        derivable = self.base.kind != "one"
        for (j, beta, p), c in self.terms.items():
            up = beta[:i] + (beta[i] + 1,) + beta[i + 1:]
            if derivable:
                key = (j + 1, up, p + 1)
                out[key] = out.get(key, 0) + c
            if beta[i]:
                key = (j, beta[:i] + (beta[i] - 1,) + beta[i + 1:], p)
                out[key] = out.get(key, 0) + c * beta[i]
            if p:
                key = (j, up, p + 2)
                out[key] = out.get(key, 0) - p * c
        return TermSum(self.N, self.base, out)

    def substitute(self) -> "TermSum":
        """Replace v^(j)(r) by its closed form, leaving pure monomials."""
        if self.base.kind == "one":
            return self
        out: dict = {}
        for (j, beta, p), c in self.terms.items():
            d = self.base.deriv(j)
            if d is None:
                raise DomainError(f"cannot substitute v^({j}) for base {self.base}")
            a, e = d
            key = (0, beta, p - e)
            out[key] = out.get(key, 0) + c * a
        return TermSum(self.N, ONE, out)

    def normal_form(self) -> "TermSum":
        """Canonical representative: every monomial has beta_N <= 1."""
        N = self.N
        last = N - 1
        out: dict = {}
        stack = list(self.terms.items())
        while stack:
            (j, beta, p), c = stack.pop()
            if beta[last] < 2:
                out[(j, beta, p)] = out.get((j, beta, p), 0) + c
                continue
            reduced = beta[:last] + (beta[last] - 2,)
            stack.append(((j, reduced, p - 2), c))
            for i in range(last):
                b = reduced[:i] + (reduced[i] + 2,) + reduced[i + 1:]
                stack.append(((j, b, p), -c))
        return TermSum(N, self.base, out)

    def equals(self, other: "TermSum") -> bool:
        """Equality as functions on R^N minus the origin."""
        return (self - other).normal_form().is_zero()

    def on_axis(self) -> dict:
        """Value at x = (r, 0, ..., 0) as {(j, exponent of r): coefficient}."""
        out: dict = {}
        for (j, beta, p), c in self.terms.items():
            if any(beta[1:]):
                continue
            key = (j, beta[0] - p)
            out[key] = out.get(key, 0) + c
        return {k: v for k, v in sorted(out.items()) if v}

    def evaluate(self, x, derivs=None):
        """Numeric value at the point x, given v^(j)(|x|) values for abstract bases."""
        r = mp.sqrt(sum(mp.mpf(t) ** 2 for t in x))
        total = mp.mpf(0)
        for (j, beta, p), c in self.terms.items():
            if self.base.kind in ("abstract", "log") and (derivs is not None or self.base.deriv(j) is None):
                vj = derivs[j] if derivs is not None else mp.log(r)
            else:
                a, e = self.base.deriv(j)
                vj = mp.mpf(a.numerator) / a.denominator * r ** mp.mpf(e)
            mono = mp.mpf(1)
            for xi, b in zip(x, beta):
                if b:
                    mono *= mp.mpf(xi) ** b
            total += mp.mpf(c.numerator) / c.denominator * vj * mono * r ** (-mp.mpf(p))
        return total

    def render(self) -> str:
        """One term per line: coefficient, derivative order, monomial, radial power."""
        if not self.terms:
            return "0"
        lines = []
        for (j, beta, p), c in sorted(self.terms.items(), key=lambda kv: kv[0]):
            lines.append(f"{c} * v^({j}) * x^{beta} * r^({-p})")
        return "\n".join(lines)

    def __eq__(self, other):
        return isinstance(other, TermSum) and self.N == other.N and self.base == other.base \
            and self.terms == other.terms

    def __hash__(self):
        return hash((self.N, self.base, tuple(self.terms.items())))

    def __repr__(self):
        return f"TermSum(N={self.N}, base={self.base}, terms={len(self.terms)})"


# ---------------------------------------------------------------------------
# TensorField
# ---------------------------------------------------------------------------

def _guard(N: int, k: int, override: bool):
    if not override and (k > MAX_RANK or N > MAX_DIM):
        raise DomainError(f"rank {k} in dimension {N} exceeds the default guard "
                          f"(k <= {MAX_RANK}, N <= {MAX_DIM}); pass override=True")


def _multiplicity(idx) -> int:
    counts = Counter(idx)
    m = math.factorial(len(idx))
    for c in counts.values():
        m //= math.factorial(c)
    return m


class TensorField:
    """Rank-k tensor of TermSums in dimension N.

    ``symmetric=True`` stores one component per sorted index tuple (valid
    for gradients of scalars); otherwise all N^k ordered tuples are kept.
    """

    def __init__(self, N: int, rank: int, components: dict, symmetric: bool):
        self.N, self.rank, self.symmetric = N, rank, symmetric
        self.components = components

    @classmethod
    def scalar(cls, N: int, base) -> "TensorField":
        return cls(N, 0, {(): TermSum.scalar(N, base)}, True)

    @property
    def base(self) -> Base:
        return next(iter(self.components.values())).base

    @property
    def component_count(self) -> int:
        return self.N ** self.rank

    def __getitem__(self, idx) -> TermSum:
        idx = tuple(idx)
        return self.components[tuple(sorted(idx)) if self.symmetric else idx]

    def items_with_multiplicity(self):
        for idx, t in self.components.items():
            yield idx, t, (_multiplicity(idx) if self.symmetric else 1)

    def ordered_items(self):
        for idx in itertools.product(range(self.N), repeat=self.rank):
            yield idx, self[idx]

    def grad(self, override: bool = False) -> "TensorField":
        """Rank k+1 tensor (d_{i_{k+1}} T_{i_1..i_k})."""
        _guard(self.N, self.rank + 1, override)
        out = {}
        if self.symmetric:
            for idx in itertools.combinations_with_replacement(range(self.N), self.rank + 1):
                out[idx] = self.components[idx[:-1]].partial(idx[-1])
        else:
            for idx, t in self.components.items():
                for i in range(self.N):
                    out[idx + (i,)] = t.partial(i)
        return TensorField(self.N, self.rank + 1, out, self.symmetric)

    def unsymmetrized(self) -> "TensorField":
        return TensorField(self.N, self.rank, dict(self.ordered_items()), False)

    def map(self, fn) -> "TensorField":
        return TensorField(self.N, self.rank, {k: fn(t) for k, t in self.components.items()}, self.symmetric)

    def times_radial_power(self, q) -> "TensorField":
        return self.map(lambda t: t.times_radial_power(q))

    def substitute(self) -> "TensorField":
        return self.map(TermSum.substitute)

    def div_full(self) -> TermSum:
        """sum over i_1..i_k of d_{i_1}...d_{i_k} T_{i_1..i_k}."""
        if self.rank < 1:
            raise DomainError("divergence of a rank-0 field")
        total = None
        for idx, t, mult in self.items_with_multiplicity():
            for i in idx:
                t = t.partial(i)
            t = t.scale(mult)
            total = t if total is None else total + t
        return total

    def is_symmetric(self) -> bool:
        """Exact check that every permutation of indices gives the same function."""
        full = self if not self.symmetric else self.unsymmetrized()
        for idx, t in full.components.items():
            for perm in set(itertools.permutations(idx)):
                if perm != idx and not t.equals(full.components[perm]):
                    return False
        return True


@lru_cache(maxsize=None)
def gradient_tensor(N: int, k: int, base="abstract", symmetric: bool = True, override: bool = False) -> TensorField:
    """nabla^k v for a radial base v."""
    _guard(N, k, override)
    t = TensorField.scalar(N, as_base(base))
    if not symmetric:
        t = t.unsymmetrized()
    for _ in range(k):
        t = t.grad(override=True)
    return t


# ---------------------------------------------------------------------------
# tensor norms on the axis
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def axis_quadratic_form(N: int, k: int, override: bool = False) -> tuple:
    """Symmetric rational matrix Q (indices j = 0..k) with

        |nabla^k v|^2 (r) = r^(-2k) * sum_{j,l} Q[j][l] w_j w_l,   w_j = r^j v^(j)(r).

    Also gives the pairing nabla^k u . nabla^k v as the bilinear form.
    """
    t = gradient_tensor(N, k, "abstract", True, override)
    Q = [[Fraction(0)] * (k + 1) for _ in range(k + 1)]
    for idx, comp, mult in t.items_with_multiplicity():
        row = [Fraction(0)] * (k + 1)
        for (j, e), c in comp.on_axis().items():
            # homogeneity: e == j - k for every term
            assert e == j - k
            row[j] += c
        for a in range(k + 1):
            if row[a]:
                for b in range(k + 1):
                    Q[a][b] += mult * row[a] * row[b]
    return tuple(tuple(r) for r in Q)


def _rational_power(r: Fraction, e: Fraction):
    if e.denominator == 1 or r == 1:
        return r ** int(e) if e.denominator == 1 else Fraction(1)
    return mp.power(mp.mpf(r.numerator) / r.denominator, mp.mpf(e.numerator) / e.denominator)


def norm_sq_on_axis(t: TensorField, r=1, derivs=None):
    """|T|^2 at (r, 0, ..., 0): sum over all N^k ordered components of value^2.

    Exact (a Fraction) for log and rational-power bases when r^exponent is
    rational; otherwise an mpf.  Abstract bases need ``derivs[j] = v^(j)(r)``.
    """
    r = _frac(r)
    base = t.base
    total = 0
    for idx, comp, mult in t.items_with_multiplicity():
        val = 0
        for (j, e), c in comp.on_axis().items():
            if base.kind == "one":
                vj = 1
            elif derivs is not None:
                vj = derivs[j]
            else:
                d = base.deriv(j)
                if d is None:
                    raise DomainError(f"no value for v^({j}) of base {base}; pass derivs")
                vj = d[0] * _rational_power(r, d[1])
            val = val + c * vj * _rational_power(r, e)
        total = total + mult * val * val
    return total


def norm_sq_profile(profile: RadialProfile, N: int, k: int, r, bk=None):
    """|nabla^k v|^2 at radius r (scalar or array) through the axis quadratic form."""
    from .numerics import FLOAT

    bk = bk or FLOAT
    Q = axis_quadratic_form(N, k)
    jet = profile.derivatives(r, k, bk)
    rr = bk.array(r) if hasattr(r, "__len__") else bk.const(r)
    w = [jet[j] * rr ** j for j in range(k + 1)]
    total = 0 * w[0]
    for a in range(k + 1):
        for b in range(k + 1):
            if Q[a][b]:
                total = total + bk.const(Q[a][b]) * w[a] * w[b]
    return total / rr ** (2 * k)


def ell_oracle(N: int, m: int) -> Fraction:
    """|nabla^m log r|^2 at r = 1, computed from the tensor itself."""
    if m < 1:
        raise DomainError("m >= 1 required")
    return Fraction(norm_sq_on_axis(gradient_tensor(N, m, "log"), 1))


def lambda_oracle(N: int, s, m: int) -> Fraction:
    """|nabla^m r^s|^2 at r = 1."""
    if m < 1:
        raise DomainError("m >= 1 required")
    return Fraction(norm_sq_on_axis(gradient_tensor(N, m, _frac(s)), 1))


# ---------------------------------------------------------------------------
# divergence identities away from the origin
# ---------------------------------------------------------------------------

def weighted_divergence(N: int, k: int, base, weight_power, override: bool = False) -> TermSum:
    """(-1)^k div_k( r^weight_power * nabla^k base ), as pure monomials."""
    t = gradient_tensor(N, k, base, True, override).substitute().times_radial_power(weight_power)
    d = t.div_full()
    return d.scale((-1) ** k)


def verify_divk_identity_power(N: int, k: int, alpha, rhs_scale=1) -> bool:
    """(-1)^k div_k(|x|^(2 alpha - N) nabla^k |x|^(k - alpha)) == lambda_N^{k-alpha,k} |x|^(alpha - N - k)."""
    alpha = _frac(alpha)
    if k < 1 or alpha < k:
        # alpha == k is the degenerate constant base: both sides vanish
        raise DomainError("need k >= 1 and alpha >= k")
    lhs = weighted_divergence(N, k, k - alpha, 2 * alpha - N)
    coeff = lambda_value(N, k - alpha, k) * _frac(rhs_scale)
    rhs = TermSum.monomial(N, (0,) * N, N - alpha + k, coeff)
    return lhs.equals(rhs)


def verify_divk_identity_log(N: int, k: int, exponent_shift=0) -> bool:
    """(-1)^k div_k(|x|^(2k - N + shift) nabla^k log|x|) == 0 away from 0."""
    if k < 1:
        raise DomainError("k >= 1 required")
    lhs = weighted_divergence(N, k, "log", 2 * k - N + _frac(exponent_shift))
    return lhs.normal_form().is_zero()


# ---------------------------------------------------------------------------
# radial Laplacians
# ---------------------------------------------------------------------------

def radial_laplacian(v: RadialProfile, N: int) -> RadialProfile:
    """v'' + (N-1) v'/r; exact for symbolic profiles."""
    if isinstance(v, SymbolicRadial):
        return v.laplacian(N)
    if v.max_order is not None and v.max_order < 2:
        raise DomainError("profile has fewer than two derivatives")
    return LaplacianProfile(v, N)


def polyharmonic(v: RadialProfile, j: int, N: int) -> RadialProfile:
    """(-Delta)^j v."""
    if j < 0:
        raise DomainError("j >= 0 required")
    if isinstance(v, SymbolicRadial):
        out = v
        for _ in range(j):
            out = out.laplacian(N).scaled(-1)
        return out
    out = v
    for _ in range(j):
        if out.max_order is not None and out.max_order < 2:
            raise DomainError("profile has too few derivatives")
        out = LaplacianProfile(out, N, sign=-1)
    return out


def weak_delta_coefficient(N: int, k: int, eps_grid, **kwargs):
    """Extrapolated weak coefficient of (-1)^k div_k(|x|^(2k-N) nabla^k log|x|) at 0."""
    from .extremizer_lab import weak_delta_coefficient as run

    return run(N, k, eps_grid, **kwargs)
