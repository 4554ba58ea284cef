"""Truncated multivariate Taylor jets and the nilpotent weight algebra.

:class:`NilCoeff` is an element of ``Q(gamma)[a_1..a_N] / (a_i^2)``: a map from
subsets of ``{1..N}`` (stored as bitmasks) to :class:`RatFunc` coefficients.

:class:`Jet` is a Taylor expansion, truncated at a total order, in ``nvars``
variables around a fixed base point. Coefficients only need ``+``, ``-`` and
``*``, so the same class serves exact oracles (NilCoeff or RatFunc entries)
and floating-point oracles (floats or numpy arrays of quadrature nodes).
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

import numpy as np

from .ratfunc import ONE, RatFunc

__all__ = ["NilCoeff", "Jet", "JetOrderError", "inv_power_jet"]


class NilCoeff:
    """Multilinear polynomial in nilpotent weights with RatFunc coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[int, RatFunc] = {}
        if terms:
            for mask, c in terms.items():
                c = c if isinstance(c, RatFunc) else RatFunc.const(c)
                if c:
                    self.terms[mask] = c

    @classmethod
    def scalar(cls, c) -> NilCoeff:
        return cls({0: c})

    @classmethod
    def var(cls, i: int, coeff=ONE) -> NilCoeff:
        """The weight ``a_i`` (1-based) times ``coeff``."""
        if i < 1:
            raise ValueError("weight indices are 1-based")
        return cls({1 << (i - 1): coeff})

    @staticmethod
    def subset(mask: int) -> tuple[int, ...]:
        out, i = [], 1
        while mask:
            if mask & 1:
                out.append(i)
            mask >>= 1
            i += 1
        return tuple(out)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def scalar_part(self) -> RatFunc:
        return self.terms.get(0, RatFunc.const(0))

    def degree_part(self, d: int) -> NilCoeff:
        return NilCoeff({m: c for m, c in self.terms.items() if bin(m).count("1") == d})

    @staticmethod
    def _coerce(other):
        if isinstance(other, NilCoeff):
            return other
        if isinstance(other, (RatFunc, int, Fraction)):
            return NilCoeff.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            old = out.get(m)
            if old is None:
                out[m] = c
            else:
                s = old + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        res = NilCoeff()
        res.terms = out
        return res

    __radd__ = __add__

    def __neg__(self):
        res = NilCoeff()
        res.terms = {m: -c for m, c in self.terms.items()}
        return res

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (RatFunc, int, Fraction)):
            if not other:
                return NilCoeff()
            if not isinstance(other, RatFunc):
                other = RatFunc.const(other)
            res = NilCoeff()
            res.terms = {m: c * other for m, c in self.terms.items()}
            return res
        if not isinstance(other, NilCoeff):
            return NotImplemented
        out: dict[int, RatFunc] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                if m1 & m2:
                    continue  # a_i^2 = 0
                m = m1 | m2
                p = c1 * c2
                old = out.get(m)
                if old is None:
                    out[m] = p
                else:
                    s = old + p
                    if s:
                        out[m] = s
                    else:
                        del out[m]
        res = NilCoeff()
        res.terms = out
        return res

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def to_json(self) -> list[dict]:
        return [
            {"alphas": list(self.subset(m)), "value": c.to_string()}
            for m, c in sorted(self.terms.items())
        ]

    def __repr__(self):
        body = " + ".join(
            f"({c})" + "".join(f"*a{i}" for i in self.subset(m))
            for m, c in sorted(self.terms.items())
        )
        return f"NilCoeff({body or '0'})"


class JetOrderError(ValueError):
    """A jet has no remaining order for another derivative."""


def _is_zero(c) -> bool:
    if isinstance(c, np.ndarray):
        return False
    try:
        return not c
    except (TypeError, ValueError):
        return False


class Jet:
    """Taylor expansion in ``nvars`` variables truncated at total ``order``.

    ``coeffs`` maps exponent tuples to Taylor coefficients (not derivatives):
    the jet of ``u**2`` in one variable is ``{(2,): 1}``.
    """

    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars: int, order: int, coeffs=None):
        if order < 0:
            raise JetOrderError("jet order must be >= 0")
        self.nvars = nvars
        self.order = order
        self.coeffs: dict[tuple[int, ...], object] = {}
        if coeffs:
            for k, c in coeffs.items():
                k = tuple(k)
                if len(k) != nvars:
                    raise ValueError(f"multi-index {k} has wrong length")
                if sum(k) <= order and not _is_zero(c):
                    self.coeffs[k] = c

    @classmethod
    def constant(cls, nvars: int, order: int, value) -> Jet:
        return cls(nvars, order, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, order: int, var: int, base=0) -> Jet:
        """The coordinate ``base + u_var``."""
        e = [0] * nvars
        e[var] = 1
        out = {tuple(e): 1}
        if not _is_zero(base):
            out[(0,) * nvars] = base
        return cls(nvars, order, out)

    def _new(self, order, coeffs) -> Jet:
        j = Jet.__new__(Jet)
        j.nvars = self.nvars
        j.order = order
        j.coeffs = coeffs
        return j

    def _check(self, other: Jet):
        if self.nvars != other.nvars:
            raise ValueError("jets over different variable sets")

    def constant_term(self):
        return self.coeffs.get((0,) * self.nvars, 0)

    def truncate(self, order: int) -> Jet:
        if order >= self.order:
            return self
        return self._new(order, {k: c for k, c in self.coeffs.items() if sum(k) <= order})

    # arithmetic ------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Jet):
            return self + Jet.constant(self.nvars, self.order, other)
        self._check(other)
        order = min(self.order, other.order)
        out = {k: c for k, c in self.coeffs.items() if sum(k) <= order}
        for k, c in other.coeffs.items():
            if sum(k) > order:
                continue
            old = out.get(k)
            if old is None:
                out[k] = c
            else:
                s = old + c
                if _is_zero(s):
                    del out[k]
                else:
                    out[k] = s
        return self._new(order, out)

    __radd__ = __add__

    def __neg__(self):
        return self._new(self.order, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> Jet:
        if _is_zero(c):
            return self._new(self.order, {})
        out = {}
        for k, v in self.coeffs.items():
            p = v * c
            if not _is_zero(p):
                out[k] = p
        return self._new(self.order, out)

    def mul(self, other: Jet, order: int | None = None) -> Jet:
        """Truncated product; ``order`` caps the result order further."""
        self._check(other)
        top = min(self.order, other.order)
        if order is not None:
            top = min(top, order)
        a = [(k, sum(k), c) for k, c in self.coeffs.items()]
        b = [(k, sum(k), c) for k, c in other.coeffs.items()]
        out: dict = {}
        for ka, da, ca in a:
            if da > top:
                continue
            room = top - da
            for kb, db, cb in b:
                if db > room:
                    continue
                key = tuple(x + y for x, y in zip(ka, kb)) if da and db else (kb if not da else ka)
                p = ca * cb
                old = out.get(key)
                out[key] = p if old is None else old + p
        return self._new(top, {k: c for k, c in out.items() if not _is_zero(c)})

    def __mul__(self, other):
        if isinstance(other, Jet):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def partial(self, var: int) -> Jet:
        """Formal partial derivative in ``var``; the order drops by one."""
        if self.order < 1:
            raise JetOrderError("no order left to differentiate")
        out = {}
        for k, c in self.coeffs.items():
            e = k[var]
            if e == 0:
                continue
            nk = k[:var] + (e - 1,) + k[var + 1:]
            out[nk] = c * e
        return self._new(self.order - 1, out)

    def recip(self) -> Jet:
        """Multiplicative inverse by a finite geometric expansion.

        The pure-number part of the constant term must be invertible; every
        other part of the jet is nilpotent (positive Taylor degree or
        positive weight degree), so the series terminates.
        """
        c0 = self.constant_term()
        pure = c0.scalar_part() if isinstance(c0, NilCoeff) else c0
        if _is_zero(pure):
            raise ZeroDivisionError("jet constant term is not invertible")
        inv = pure.inverse() if isinstance(pure, RatFunc) else 1 / pure
        zero_key = (0,) * self.nvars
        rest = dict(self.coeffs)
        if isinstance(c0, NilCoeff):
            rem = c0 - NilCoeff.scalar(pure)
            if rem:
                rest[zero_key] = rem
            else:
                rest.pop(zero_key, None)
        else:
            rest.pop(zero_key, None)
        w = self._new(self.order, rest).scale(-inv)  # 1/a = inv * sum (-w*inv)^k
        result = Jet.constant(self.nvars, self.order, inv)
        term = Jet.constant(self.nvars, self.order, inv)
        limit = self.order + _weight_bound(self) + 1
        for _ in range(limit):
            term = term.mul(w)
            if not term.coeffs:
                break
            result = result + term
        return result

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        if self.nvars != other.nvars or self.order != other.order:
            return False
        return (self - other).is_zero()

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs.values())

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, terms={len(self.coeffs)})"


def _weight_bound(j: Jet) -> int:
    m = 0
    for c in j.coeffs.values():
        if isinstance(c, NilCoeff):
            for mask in c.terms:
                m |= mask
    return bin(m).count("1")


def inv_power_jet(nvars: int, order: int, value, m: int, plus: int | None,
                  minus: int | None = None) -> Jet:
    """Jet of ``(value + u_plus - u_minus)**(-m)`` around ``u = 0``.

    ``value`` is the difference of the two base coordinates; ``None`` for
    ``plus`` or ``minus`` holds that point fixed. ``value`` may be a Fraction
    (exact) or a float / numpy array.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if plus is None and minus is None:
        raise ValueError("at least one moving variable is required")
    out: dict = {}
    inv = Fraction(1, value) if isinstance(value, int) else 1 / value
    for j in range(order + 1):
        # binom(-m, j) = (-1)^j binom(m+j-1, j)
        c = (-1) ** j * (comb(m + j - 1, j) if m else (1 if j == 0 else 0))
        if c == 0:
            continue
        base = c * inv ** (m + j)
        for i in range(j + 1):
            # i powers of u_plus, j - i powers of u_minus
            if (plus is None and i) or (minus is None and j - i):
                continue
            e = [0] * nvars
            if plus is not None:
                e[plus] += i
            if minus is not None:
                e[minus] += j - i
            term = base * comb(j, i) * (-1) ** (j - i)
            key = tuple(e)
            out[key] = out[key] + term if key in out else term
    return Jet(nvars, order, out)
