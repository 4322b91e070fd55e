"""Radial profiles v(r) with derivative access through Taylor jets.

Symbolic kinds (linear combinations of log r and powers r^s) carry exact
coefficients and an exact Laplacian.  Composite kinds (smoothsteps,
piecewise assemblies, products, Laplacians of composites) obtain their
derivatives by Taylor-mode propagation of jets.
"""

from __future__ import annotations

import math

import numpy as np

from .exact_constants import DomainError, ExactReal, _frac
from .numerics import (
    FLOAT,
    affine_chain,
    jet_derivatives,
    jet_deriv,
    jet_log,
    jet_mul,
    jet_power,
    jet_recip_r,
    jet_scale,
    smoothstep_jet,
)

INF = math.inf


class RadialProfile:
    """Base class: a function of r = |x| with jets up to ``max_order``."""

    kind = "composite"
    max_order: int | None = None
    support: tuple = (0.0, INF)

    def breakpoints(self) -> tuple:
        return ()

    def _jet(self, r, order, bk):
        raise NotImplementedError

    def jet(self, r, order: int, bk=FLOAT):
        """Normalised Taylor coefficients, shape (order+1, *shape(r))."""
        if self.max_order is not None and order > self.max_order:
            raise DomainError(f"{type(self).__name__} supports derivatives up to order {self.max_order}, not {order}")
        scalar = np.ndim(r) == 0
        r = bk.array(np.atleast_1d(r))
        out = self._jet(r, order, bk)
        return out[:, 0] if scalar else out

    def derivatives(self, r, order: int, bk=FLOAT):
        return jet_derivatives(self.jet(r, order, bk))

    def __call__(self, r, bk=FLOAT):
        return self.jet(r, 0, bk)[0]

    def __add__(self, other):
        return SumProfile(self, other)

    def __mul__(self, other):
        if isinstance(other, RadialProfile):
            return ProductProfile(self, other)
        return ScaledProfile(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return ScaledProfile(self, -1)


# ---------------------------------------------------------------------------
# symbolic kinds
# ---------------------------------------------------------------------------

LOG = ("log",)


def _pow_key(s) -> tuple:
    return ("pow", _frac(s))


class SymbolicRadial(RadialProfile):
    """Sum of c * log r and c * r^s terms with exact coefficients."""

    def __init__(self, terms: dict):
        clean = {}
        for key, c in terms.items():
            c = ExactReal.coerce(c)
            if c.exact and c.coeff == 0:
                continue
            clean[key] = c
        self.terms = dict(sorted(clean.items(), key=lambda kv: (kv[0][0], kv[0][1:] and kv[0][1])))
        kinds = {k[0] for k in self.terms}
        if kinds == {"log"}:
            self.kind = "log r"
        elif kinds == {"pow"} and len(self.terms) == 1:
            self.kind = "r^s"
        else:
            self.kind = "symbolic"

    def _jet(self, r, order, bk):
        out = bk.zeros((order + 1,) + r.shape)
        for key, c in self.terms.items():
            cf = bk.const(c)
            if key == LOG:
                out = out + cf * jet_log(r, order, bk)
            else:
                out = out + cf * jet_power(r, key[1], order, bk)
        return out

    def laplacian(self, N: int) -> "SymbolicRadial":
        """Exact Laplacian v'' + (N-1) v'/r."""
        out: dict = {}
        for key, c in self.terms.items():
            if key == LOG:
                new_key, factor = _pow_key(-2), N - 2
            else:
                s = key[1]
                new_key, factor = _pow_key(s - 2), s * (s + N - 2)
            out[new_key] = out.get(new_key, ExactReal(0)) + c * ExactReal(factor)
        return SymbolicRadial(out)

    def scaled(self, c) -> "SymbolicRadial":
        c = ExactReal.coerce(c)
        return SymbolicRadial({k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, SymbolicRadial) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __repr__(self):
        parts = []
        for key, c in self.terms.items():
            parts.append(f"({c})·log r" if key == LOG else f"({c})·r^{key[1]}")
        return "SymbolicRadial(" + " + ".join(parts or ["0"]) + ")"


def log_r(coeff=1) -> SymbolicRadial:
    return SymbolicRadial({LOG: coeff})


def power_r(s, coeff=1) -> SymbolicRadial:
    return SymbolicRadial({_pow_key(s): coeff})


# ---------------------------------------------------------------------------
# composite kinds
# ---------------------------------------------------------------------------

class ConstantProfile(RadialProfile):
    kind = "constant"

    def __init__(self, value):
        self.value = value

    def _jet(self, r, order, bk):
        out = bk.zeros((order + 1,) + r.shape)
        out[0] = out[0] + bk.const(self.value)
        return out


class StepProfile(RadialProfile):
    """low + (high - low) * S_K((r - lo) / (hi - lo)), a C^K monotone transition."""

    def __init__(self, K: int, lo, hi, low_value=0, high_value=1):
        if not 0 <= lo < hi:
            raise DomainError("need 0 <= lo < hi")
        self.K, self.lo, self.hi = K, lo, hi
        self.low_value, self.high_value = low_value, high_value

    def breakpoints(self):
        return (self.lo, self.hi)

    def _jet(self, r, order, bk):
        lo, hi = bk.const(self.lo), bk.const(self.hi)
        width = hi - lo
        y = (r - lo) / width
        s = affine_chain(smoothstep_jet(y, self.K, order, bk), 1 / width)
        jump = bk.const(self.high_value) - bk.const(self.low_value)
        s = s * jump
        s[0] = s[0] + bk.const(self.low_value)
        return s


class SumProfile(RadialProfile):
    def __init__(self, *parts):
        self.parts = parts
        orders = [p.max_order for p in parts if p.max_order is not None]
        self.max_order = min(orders) if orders else None

    def breakpoints(self):
        return tuple(sorted({b for p in self.parts for b in p.breakpoints()}))

    def _jet(self, r, order, bk):
        out = self.parts[0]._jet(r, order, bk)
        for p in self.parts[1:]:
            out = out + p._jet(r, order, bk)
        return out


class ScaledProfile(RadialProfile):
    def __init__(self, inner, c):
        self.inner, self.c = inner, c
        self.max_order = inner.max_order

    def breakpoints(self):
        return self.inner.breakpoints()

    def _jet(self, r, order, bk):
        return jet_scale(self.inner._jet(r, order, bk), bk.const(self.c))


class ProductProfile(RadialProfile):
    def __init__(self, a, b):
        self.a, self.b = a, b
        orders = [p.max_order for p in (a, b) if p.max_order is not None]
        self.max_order = min(orders) if orders else None

    def breakpoints(self):
        return tuple(sorted(set(self.a.breakpoints()) | set(self.b.breakpoints())))

    def _jet(self, r, order, bk):
        return jet_mul(self.a._jet(r, order, bk), self.b._jet(r, order, bk))


class PiecewiseProfile(RadialProfile):
    """Pieces on [b_0, b_1), [b_1, b_2), ...; zero outside the last break.

    ``smoothness`` records the global C^K class across the joints.
    """

    def __init__(self, breaks, pieces, smoothness: int | None = None):
        if len(breaks) != len(pieces) + 1:
            raise ValueError("need one more break than pieces")
        self.breaks = tuple(breaks)
        self.pieces = tuple(pieces)
        self.smoothness = smoothness
        self.support = (self.breaks[0], self.breaks[-1])
        orders = [p.max_order for p in pieces if p.max_order is not None]
        self.max_order = min(orders) if orders else None

    def breakpoints(self):
        inner = {b for b in self.breaks if 0 < b < INF}
        for p, lo, hi in zip(self.pieces, self.breaks[:-1], self.breaks[1:]):
            inner |= {b for b in p.breakpoints() if lo < b < hi}
        return tuple(sorted(inner))

    def _jet(self, r, order, bk):
        out = bk.zeros((order + 1,) + r.shape)
        for p, lo, hi in zip(self.pieces, self.breaks[:-1], self.breaks[1:]):
            mask = (r >= bk.const(lo)) if hi == INF else ((r >= bk.const(lo)) & (r < bk.const(hi)))
            mask = np.asarray(mask, dtype=bool)
            if mask.any():
                out[:, mask] = p._jet(r[mask], order, bk)
        return out


class LaplacianProfile(RadialProfile):
    """sign * (v'' + (N-1) v'/r) by Taylor-mode propagation."""

    def __init__(self, inner: RadialProfile, N: int, sign: int = 1):
        self.inner, self.N, self.sign = inner, N, sign
        self.max_order = None if inner.max_order is None else inner.max_order - 2
        self.support = inner.support
        self.kind = "composite"

    def breakpoints(self):
        return self.inner.breakpoints()

    def _jet(self, r, order, bk):
        base = self.inner._jet(r, order + 2, bk)
        d1 = jet_deriv(base)
        d2 = jet_deriv(d1)
        lap = d2[: order + 1] + (self.N - 1) * jet_mul(d1[: order + 1], jet_recip_r(r, order))
        return lap if self.sign == 1 else -lap


def smooth_bump(K: int, inner: float, outer: float, height=1) -> PiecewiseProfile:
    """Radial C^K bump: ``height`` on [0, inner], smoothstep down to 0 at ``outer``."""
    return PiecewiseProfile(
        (0.0, inner, outer),
        (ConstantProfile(height), StepProfile(K, inner, outer, height, 0)),
        smoothness=K,
    )
