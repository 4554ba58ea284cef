"""Exact arithmetic in the field Q(gamma) of rational functions in one variable.

A :class:`RatFunc` is a reduced fraction ``num / den`` of integer-coefficient
polynomials in ``gamma``. Polynomials are tuples of Python ints, lowest degree
first, with no trailing zeros; ``()`` is the zero polynomial.

Canonical form: ``gcd(num, den) = 1`` up to units, the leading coefficient of
``den`` is positive and zero is ``0/1``. Two equal values therefore always have
identical representations, so ``==`` and ``hash`` are structural.
"""

from __future__ import annotations

import enum
import re
from fractions import Fraction
from math import gcd
from typing import Union

Poly = tuple

__all__ = [
    "RatFunc",
    "ChiMode",
    "RatFuncZeroDivision",
    "GAMMA",
    "ZERO",
    "ONE",
    "arith",
    "chi",
    "background_charge",
    "conformal_weight",
]


class RatFuncZeroDivision(ZeroDivisionError):
    """Raised on division by the zero rational function."""


# --------------------------------------------------------------------------
# integer polynomial helpers

def _trim(a):
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return tuple(a[:n])


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _pneg(a):
    return tuple(-c for c in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    if len(b) == 1:
        c = b[0]
        return tuple(x * c for x in a)
    if len(a) == 1:
        c = a[0]
        return tuple(x * c for x in b)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _content(a):
    g = 0
    for c in a:
        g = gcd(g, c)
        if g == 1:
            break
    return g


def _valuation(a):
    for i, c in enumerate(a):
        if c:
            return i
    raise ValueError("valuation of zero polynomial")


def _pdiv_int(a, c):
    return tuple(x // c for x in a)


def _prem(a, b):
    """Pseudo-remainder of a by b (b nonzero)."""
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [x * lb for x in r]
        for i, y in enumerate(b):
            r[i + shift] -= lr * y
        r = list(_trim(r))
    return tuple(r)


def _primitive(a):
    c = _content(a)
    if a[-1] < 0:
        c = -c
    return _pdiv_int(a, c)


def _pgcd(a, b):
    """Primitive gcd of two nonzero integer polynomials (positive lead)."""
    a = _primitive(a)
    b = _primitive(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _prem(a, b)
        a, b = b, (_primitive(r) if r else ())
    return a


def _pexact_div(a, b):
    """Exact division a / b over the integers; b must divide a."""
    if not a:
        return ()
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    q = [0] * (len(a) - db)
    for k in range(len(q) - 1, -1, -1):
        coef = r[k + db]
        if coef:
            qk, rem = divmod(coef, lb)
            if rem:
                raise ArithmeticError("inexact polynomial division")
            q[k] = qk
            for i, y in enumerate(b):
                r[i + k] -= qk * y
    if any(r):
        raise ArithmeticError("inexact polynomial division")
    return _trim(q)


def _is_monomial(a):
    return len(a) >= 1 and not any(a[:-1])


def _reduce(num, den):
    if not den:
        raise RatFuncZeroDivision("zero denominator")
    if not num:
        return (), (1,)
    if len(den) == 1 and len(num) >= 1:
        # constant denominator: integer gcd only
        g = gcd(_content(num), den[0])
        if den[0] < 0:
            g = -g
        if g != 1:
            return _pdiv_int(num, g), (den[0] // g,)
        return num, den
    if _is_monomial(den):
        # den = c * gamma^k: cancel powers of gamma and the integer content
        k = len(den) - 1
        s = min(k, _valuation(num))
        c = den[-1]
        g = gcd(_content(num), c)
        if c < 0:
            g = -g
        num = _pdiv_int(num[s:], g)
        den = (0,) * (k - s) + (c // g,)
        return num, den
    if len(num) == 1:
        g = gcd(num[0], _content(den))
    else:
        g = None
    if g is not None:
        if den[-1] < 0:
            g = -g
        return (num[0] // g,), _pdiv_int(den, g)
    h = _pgcd(num, den)
    if len(h) > 1:
        num = _pexact_div(num, h)
        den = _pexact_div(den, h)
    c = gcd(_content(num), _content(den))
    if den[-1] < 0:
        c = -c
    if c != 1:
        num = _pdiv_int(num, c)
        den = _pdiv_int(den, c)
    return num, den


# --------------------------------------------------------------------------

Scalar = Union[int, Fraction]


class RatFunc:
    """Immutable element of Q(gamma) in canonical reduced form."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=(), den=(1,), *, _reduced=False):
        num = _trim(tuple(int(c) for c in num)) if not _reduced else num
        den = _trim(tuple(int(c) for c in den)) if not _reduced else den
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # construction -----------------------------------------------------

    @classmethod
    def _raw(cls, num, den):
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def _make(cls, num, den):
        num, den = _reduce(num, den)
        return cls._raw(num, den)

    @classmethod
    def const(cls, value: Scalar) -> RatFunc:
        """Embed an integer or Fraction as a constant rational function."""
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, int):
            return cls._raw((value,) if value else (), (1,))
        value = Fraction(value)
        if not value:
            return ZERO
        return cls._make((value.numerator,), (value.denominator,))

    @classmethod
    def from_coeffs(cls, num, den=(1,)) -> RatFunc:
        """Build from (possibly Fraction) coefficient lists, lowest degree first."""
        fr = [Fraction(c) for c in list(num) + list(den)]
        lcm = 1
        for c in fr:
            lcm = lcm * c.denominator // gcd(lcm, c.denominator)
        n = [int(Fraction(c) * lcm) for c in num]
        d = [int(Fraction(c) * lcm) for c in den]
        return cls(n, d)

    @classmethod
    def monomial(cls, coeff: Scalar, degree: int) -> RatFunc:
        """``coeff * gamma**degree``; negative degrees give Laurent monomials."""
        coeff = Fraction(coeff)
        if degree >= 0:
            return cls._make((0,) * degree + (coeff.numerator,), (coeff.denominator,))
        return cls._make((coeff.numerator,), (0,) * (-degree) + (coeff.denominator,))

    # predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return Fraction(self.num[0] if self.num else 0, self.den[0])

    def is_canonical(self) -> bool:
        """Check the canonical-form invariants directly (used by tests)."""
        if not self.den or self.den[-1] <= 0:
            return False
        if not self.num:
            return self.den == (1,)
        if self.num[-1] == 0 or self.den[-1] == 0:
            return False
        h = _pgcd(self.num, self.den)
        if len(h) > 1:
            return False
        return gcd(_content(self.num), _content(self.den)) == 1

    # arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, Fraction)):
            return RatFunc.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return RatFunc._make(_padd(self.num, other.num), self.den)
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return RatFunc._make(num, _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(_pneg(self.num), self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num or not other.num:
            return ZERO
        if self.den == (1,) and other.den == (1,):
            return RatFunc._raw(_pmul(self.num, other.num), (1,))
        return RatFunc._make(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> RatFunc:
        if not self.num:
            raise RatFuncZeroDivision("inverse of zero rational function")
        num, den = self.den, self.num
        if den[-1] < 0:
            num, den = _pneg(num), _pneg(den)
        return RatFunc._raw(num, den)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # comparison -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc.const(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # evaluation / rendering ---------------------------------------------

    def evaluate(self, x):
        """Substitute ``gamma = x`` (int, Fraction, float or complex).

        Exact for Fraction input. Raises :class:`RatFuncZeroDivision` at a pole.
        """
        def horner(p):
            acc = 0
            for c in reversed(p):
                acc = acc * x + c
            return acc

        d = horner(self.den)
        if d == 0:
            raise RatFuncZeroDivision(f"pole of {self} at gamma={x}")
        n = horner(self.num)
        if isinstance(n, int) and isinstance(d, int):
            return Fraction(n, d)
        return n / d

    def __call__(self, x):
        return self.evaluate(x)

    def to_string(self) -> str:
        """Render as ``"num / den"`` with explicit integer coefficients."""
        return f"{_poly_str(self.num)} / {_poly_str(self.den)}"

    @classmethod
    def parse(cls, text: str) -> RatFunc:
        """Inverse of :meth:`to_string`; a bare polynomial means ``den = 1``."""
        if "/" in text:
            left, right = text.split("/", 1)
        else:
            left, right = text, "1"
        return cls(_parse_poly(left), _parse_poly(right))

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"RatFunc({self.to_string()!r})"


def _poly_str(p) -> str:
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if k == 0:
            body = str(mag)
        elif k == 1:
            body = f"{mag}*g"
        else:
            body = f"{mag}*g^{k}"
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


_TERM = re.compile(r"([+-]?)\s*(\d+)(?:\s*\*\s*g(?:\s*\^\s*(\d+))?)?$")


def _parse_poly(text: str):
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    tokens = re.findall(r"[+-]?[^+-]+", s)
    coeffs: dict[int, int] = {}
    for tok in tokens:
        m = _TERM.match(tok)
        if m is None:
            raise ValueError(f"cannot parse polynomial term {tok!r}")
        sign, mag, power = m.groups()
        deg = 0
        if "g" in tok:
            deg = int(power) if power else 1
        c = int(mag) * (-1 if sign == "-" else 1)
        coeffs[deg] = coeffs.get(deg, 0) + c
    size = max(coeffs) + 1
    return [coeffs.get(i, 0) for i in range(size)]


ZERO = RatFunc._raw((), (1,))
ONE = RatFunc._raw((1,), (1,))
GAMMA = RatFunc._raw((0, 1), (1,))


class ChiMode(enum.Enum):
    """Which value the degenerate parameter chi takes."""

    GAMMA_HALF = "gamma/2"
    TWO_OVER_GAMMA = "2/gamma"

    @classmethod
    def parse(cls, text: str) -> ChiMode:
        for mode in cls:
            if text in (mode.value, mode.name, mode.name.lower()):
                return mode
        raise ValueError(f"unknown chi mode {text!r}")


def arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    """Apply ``op`` in {'add', 'sub', 'mul', 'div'}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


_CHI = {
    ChiMode.GAMMA_HALF: RatFunc._raw((0, 1), (2,)),
    ChiMode.TWO_OVER_GAMMA: RatFunc._raw((2,), (0, 1)),
}


def chi(mode: ChiMode) -> RatFunc:
    return _CHI[ChiMode(mode)]


BACKGROUND_CHARGE = RatFunc._raw((4, 0, 1), (0, 2))


def background_charge() -> RatFunc:
    """Q = gamma/2 + 2/gamma."""
    return BACKGROUND_CHARGE


def conformal_weight(alpha: RatFunc) -> RatFunc:
    """Delta_alpha = (alpha/2) * (Q - alpha/2).

    ``alpha`` may be any ring element that mixes with RatFunc (for example a
    nilpotent weight, where the quadratic part drops out).
    """
    if isinstance(alpha, (int, Fraction)):
        alpha = RatFunc.const(alpha)
    half = alpha * Fraction(1, 2)
    return half * (BACKGROUND_CHARGE - half)
