"""Extended scalars: exact rationals, +inf, and a high-precision fallback.

Exact values are ``Fraction`` or ``INF`` (``math.inf``).  Whenever an
operation leaves the rationals (a rational power of a rational that is not a
perfect power, a logarithm) the result is an ``mpf`` from a private 60-digit
mpmath context, and comparisons involving such values use ``REL_TOL`` as a
margin.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

import gmpy2
import mpmath

INF = math.inf
MP = mpmath.MPContext()
MP.dps = 60

#: relative margin for comparisons where one side is not exact
REL_TOL = mpmath.mpf("1e-30")

Ext = Union[Fraction, float]
Real = Union[Fraction, float, "mpmath.mpf"]

_MPF_TYPES = (mpmath.mpf, MP.mpf)

_RATIONAL = re.compile(r"^-?[0-9]+(/[1-9][0-9]*)?$")


class RationalParseError(ValueError):
    pass


def is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x)


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, int)) or is_inf(x)


def ext(x) -> Ext:
    """Coerce ``x`` to an exact extended scalar (Fraction or +/-inf)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if math.isinf(x):
            return x
        raise TypeError(f"finite float {x!r} is not exact; pass a Fraction or string")
    if isinstance(x, str):
        return parse_ext(x)
    raise TypeError(f"cannot interpret {x!r} as an exact scalar")


def parse_ext(text: str) -> Ext:
    s = text.strip()
    if s in ("inf", "+inf"):
        return INF
    if s == "-inf":
        return -INF
    if not _RATIONAL.match(s):
        raise RationalParseError(f"malformed rational literal {text!r}")
    return Fraction(s)


def fmt(x) -> str:
    """Render a scalar: ``p/q`` or integer for rationals, ``inf``, or ``~digits``."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return str(x)
    if is_inf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, _MPF_TYPES):
        if MP.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "~" + MP.nstr(x, 40)
    raise TypeError(f"cannot format {x!r}")


def lift(x):
    """Convert to an mpf in the private context."""
    if isinstance(x, _MPF_TYPES):
        return MP.mpf(x)
    if is_inf(x):
        return MP.inf if x > 0 else -MP.inf
    if isinstance(x, int):
        return MP.mpf(x)
    if isinstance(x, Fraction):
        return MP.mpf(x.numerator) / x.denominator
    raise TypeError(f"cannot lift {x!r}")


def to_float(x) -> float:
    if is_inf(x):
        return x
    if isinstance(x, Fraction):
        return x.numerator / x.denominator
    return float(x)


def add(a, b):
    if type(a) is Fraction and type(b) is Fraction:
        return a + b
    if is_exact(a) and is_exact(b):
        if is_inf(a) or is_inf(b):
            return INF
        return Fraction(a) + Fraction(b)
    return lift(a) + lift(b)


def sub(a, b):
    """``a - b`` for finite ``b``."""
    if is_exact(a) and is_exact(b):
        if is_inf(b):
            raise ValueError("cannot subtract inf")
        return a if is_inf(a) else Fraction(a) - Fraction(b)
    return lift(a) - lift(b)


def mul(a, b):
    """Product with the convention 0 * inf = 0."""
    if type(a) is Fraction and type(b) is Fraction:
        return a * b
    if a == 0 or b == 0:
        return Fraction(0)
    if is_exact(a) and is_exact(b):
        if is_inf(a) or is_inf(b):
            return INF
        return Fraction(a) * Fraction(b)
    return lift(a) * lift(b)


def div(a, b):
    if b == 0:
        raise ZeroDivisionError("division by zero")
    if is_exact(a) and is_exact(b):
        if is_inf(b):
            if is_inf(a):
                raise ValueError("inf / inf is undefined")
            return Fraction(0)
        if is_inf(a):
            return INF
        return Fraction(a) / Fraction(b)
    return lift(a) / lift(b)


def total(values):
    acc = Fraction(0)
    for v in values:
        acc = add(acc, v)
    return acc


def exact_root(x: Fraction, n: int) -> Fraction | None:
    """The n-th root of a nonnegative rational if it is rational, else None."""
    rn, ok_n = gmpy2.iroot(x.numerator, n)
    if not ok_n:
        return None
    rd, ok_d = gmpy2.iroot(x.denominator, n)
    if not ok_d:
        return None
    return Fraction(int(rn), int(rd))


def rpow(x, e):
    """``x ** e`` for ``x >= 0`` and rational ``e``; exact whenever possible."""
    e = Fraction(e)
    if e == 0:
        return Fraction(1)
    if not is_exact(x):
        if x == 0:
            return Fraction(0) if e > 0 else INF
        return MP.power(lift(x), lift(e))
    if x < 0:
        raise ValueError("rpow needs a nonnegative base")
    if x == 0:
        return Fraction(0) if e > 0 else INF
    if is_inf(x):
        return INF if e > 0 else Fraction(0)
    x = Fraction(x)
    if e.denominator == 1:
        return x ** int(e)
    r = exact_root(x, e.denominator)
    if r is not None:
        return r ** e.numerator
    return MP.power(lift(x), lift(e))


def log(x):
    return MP.log(lift(x))


def le(a, b) -> bool:
    """``a <= b``; exact when both sides are, else with relative margin REL_TOL."""
    if is_exact(a) and is_exact(b):
        return a <= b
    A, B = lift(a), lift(b)
    if A <= B:
        return True
    if MP.isinf(A) or MP.isinf(B):
        return False
    return A - B <= REL_TOL * max(abs(A), abs(B))


def close(a, b, rel=REL_TOL) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    A, B = lift(a), lift(b)
    if MP.isinf(A) or MP.isinf(B):
        return A == B
    return abs(A - B) <= lift(rel) * max(abs(A), abs(B), MP.mpf(0))


def rel_diff(a, b):
    """|a - b| / max(|a|, |b|) as a float (0 when both vanish)."""
    A, B = lift(a), lift(b)
    if MP.isinf(A) or MP.isinf(B):
        return 0.0 if A == B else math.inf
    scale = max(abs(A), abs(B))
    if scale == 0:
        return 0.0
    return float(abs(A - B) / scale)
