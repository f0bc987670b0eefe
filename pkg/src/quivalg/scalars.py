"""Exact complex rationals.

Real and imaginary parts are ``gmpy2.mpq`` values, so every sum and product
is exact.  Floats are accepted on input and converted exactly (a float is a
dyadic rational).
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

import gmpy2
from gmpy2 import mpq

__all__ = ["CQ", "ZERO", "ONE", "I", "as_cq", "parse_rational", "format_rational"]

Scalarish = Union["CQ", int, float, complex, Fraction, str]

_MPQ = type(mpq(0))


def _to_mpq(x) -> mpq:
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, bool):
        return mpq(int(x))
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, float):
        return mpq(Fraction(x))
    if isinstance(x, Rational):
        return mpq(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def parse_rational(text: str) -> mpq:
    """Parse ``"p"``, ``"p/q"`` or a decimal like ``"0.25"``."""
    s = text.strip()
    if not s:
        raise ValueError("empty rational")
    try:
        if "/" in s:
            p, q = s.split("/", 1)
            return mpq(int(p), int(q))
        return mpq(Fraction(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational {text!r}") from exc


def format_rational(q: mpq) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class CQ:
    """An exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _to_mpq(re)
        self.im = _to_mpq(im)

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> "CQ":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return CQ._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return CQ._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return CQ._raw(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return CQ._raw(a * c, b)
        return CQ._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if not den:
            raise ZeroDivisionError("division by zero")
        return CQ._raw(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __neg__(self):
        return CQ._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "CQ":
        return CQ._raw(self.re, -self.im)

    def abs2(self) -> mpq:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return float(gmpy2.sqrt(gmpy2.mpfr(self.abs2())))

    # comparison / conversion ----------------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(Fraction(int(self.re.numerator), int(self.re.denominator)))
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"CQ({format_rational(self.re)!r}, {format_rational(self.im)!r})"

    def __str__(self):
        re_s, im_s = format_rational(self.re), format_rational(self.im)
        if not self.im:
            return re_s
        if not self.re:
            return "i" if self.im == 1 else ("-i" if self.im == -1 else f"{im_s}i")
        sign = "-" if self.im < 0 else "+"
        mag = format_rational(abs(self.im))
        mag = "" if mag == "1" else mag
        return f"({re_s}{sign}{mag}i)"


def _coerce(x) -> CQ | None:
    if isinstance(x, CQ):
        return x
    if isinstance(x, complex):
        return CQ(x.real, x.imag)
    if isinstance(x, (int, float, Rational, _MPQ)):
        return CQ._raw(_to_mpq(x), mpq(0))
    return None


def as_cq(x: Scalarish) -> CQ:
    """Coerce numbers and strings like ``"1/2"``, ``"i"``, ``"(1/2-3i)"`` to :class:`CQ`."""
    if isinstance(x, str):
        return _parse_cq(x)
    o = _coerce(x)
    if o is None:
        raise TypeError(f"cannot interpret {x!r} as an exact complex rational")
    return o


def _parse_cq(text: str) -> CQ:
    s = text.strip().replace(" ", "")
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if not s:
        raise ValueError("empty scalar")
    if not s.endswith("i"):
        return CQ._raw(parse_rational(s), mpq(0))
    body = s[:-1]
    # split the imaginary part off at the last sign that is not the leading one
    cut = max(body.rfind("+"), body.rfind("-"))
    if cut <= 0:
        re_part, im_part = "", body
    else:
        re_part, im_part = body[:cut], body[cut:]
    if im_part in ("", "+"):
        im = mpq(1)
    elif im_part == "-":
        im = mpq(-1)
    else:
        im = parse_rational(im_part)
    re_val = parse_rational(re_part) if re_part else mpq(0)
    return CQ._raw(re_val, im)


ZERO = CQ()
ONE = CQ(1)
I = CQ(0, 1)
