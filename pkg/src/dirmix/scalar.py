"""Exact scalars: rationals and quadratic surds ``p + r*sqrt(d)``.

Rationals are plain :class:`fractions.Fraction` objects.  A :class:`Surd`
only exists when it is genuinely irrational (``r != 0`` and ``d`` a
square-free integer > 1); every arithmetic result that turns out rational
collapses back to a ``Fraction``.  Order decisions go through exact sign
analysis, never through floating point.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from typing import Union

__all__ = [
    "Surd",
    "Scalar",
    "as_scalar",
    "surd",
    "sqrt",
    "sign",
    "floor",
    "ceil",
    "frac",
    "parse_scalar",
    "format_scalar",
    "to_float",
]


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(k, d)`` with ``n == k*k*d`` and ``d`` square-free."""
    k, d = 1, 1
    m = n
    p = 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            k *= p
        if m % p == 0:
            m //= p
            d *= p
        p += 1 if p == 2 else 2
    return k, d * m


def _mk(p: Fraction, r: Fraction, d: int):
    # d is already square-free here
    return p if r == 0 else Surd(p, r, d)


class Surd:
    """An irrational number ``p + r*sqrt(d)`` with rational ``p``, ``r``."""

    __slots__ = ("p", "r", "d")

    def __init__(self, p: Fraction, r: Fraction, d: int):
        # callers go through surd(); this constructor trusts its input
        self.p = p
        self.r = r
        self.d = d

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Surd):
            if other.d != self.d:
                raise ValueError(
                    f"cannot combine sqrt({self.d}) and sqrt({other.d}) exactly"
                )
            return other.p, other.r
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return _mk(self.p + c[0], self.r + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.p, -self.r, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return _mk(self.p - c[0], self.r - c[1], self.d)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return _mk(c[0] - self.p, c[1] - self.r, self.d)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return _mk(
            self.p * a + self.r * b * self.d, self.p * b + self.r * a, self.d
        )

    __rmul__ = __mul__

    def _inverse(self):
        norm = self.p * self.p - self.r * self.r * self.d
        return _mk(self.p / norm, -self.r / norm, self.d)

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        if c[1] == 0:
            if c[0] == 0:
                raise ZeroDivisionError("division by zero")
            return _mk(self.p / c[0], self.r / c[0], self.d)
        return self * _mk(c[0], c[1], self.d)._inverse()

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self._inverse() * _mk(c[0], c[1], self.d)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- order --------------------------------------------------------------
    def sign(self) -> int:
        """Exact sign of ``p + r*sqrt(d)`` (never zero for a Surd)."""
        sp = (self.p > 0) - (self.p < 0)
        sr = (self.r > 0) - (self.r < 0)
        if sp == 0 or sp == sr:
            return sr
        # opposite signs: compare p^2 with r^2 d
        lhs = self.p * self.p
        rhs = self.r * self.r * self.d
        return sp if lhs > rhs else sr

    def _cmp(self, other) -> int:
        c = self._coerce(other)
        if c is None:
            raise TypeError(f"cannot compare Surd with {type(other).__name__}")
        return sign(self - _mk(c[0], c[1], self.d))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, Surd):
            return (self.p, self.r, self.d) == (other.p, other.r, other.d)
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.r, self.d))

    def __float__(self):
        return float(self.p) + float(self.r) * math.sqrt(self.d)

    def __floor__(self):
        return floor(self)

    def __ceil__(self):
        return ceil(self)

    def __repr__(self):
        return f"Surd({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[Fraction, Surd]


def surd(p, r=0, d: int = 0) -> Scalar:
    """Build ``p + r*sqrt(d)``, collapsing to a Fraction when rational."""
    p = Fraction(p)
    r = Fraction(r)
    if d < 0:
        raise ValueError("negative radicand")
    if r == 0 or d == 0:
        return p
    k, sf = _squarefree_split(d)
    if sf == 1:
        return p + r * k
    return Surd(p, r * k, sf)


def sqrt(x) -> Scalar:
    """Exact square root of a nonnegative rational."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("sqrt of negative rational")
    # sqrt(a/b) = sqrt(a*b)/b
    return surd(0, Fraction(1, x.denominator), x.numerator * x.denominator)


def as_scalar(x) -> Scalar:
    if isinstance(x, Surd):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a string or Fraction")
    return Fraction(x)


def sign(x) -> int:
    if isinstance(x, Surd):
        return x.sign()
    return (x > 0) - (x < 0)


def floor(x) -> int:
    """Exact floor.  For surds uses floor((P + y)/Q) == floor((P + floor(y))/Q)."""
    if not isinstance(x, Surd):
        return math.floor(x)
    q = math.lcm(x.p.denominator, x.r.denominator)
    big_p = x.p.numerator * (q // x.p.denominator)
    big_r = x.r.numerator * (q // x.r.denominator)
    rad = big_r * big_r * x.d
    s = math.isqrt(rad)
    if big_r >= 0:
        fy = s
    else:
        fy = -s if s * s == rad else -(s + 1)
    return (big_p + fy) // q


def ceil(x) -> int:
    return -floor(-x)


def frac(x) -> Scalar:
    """Fractional part ``x - floor(x)`` in ``[0, 1)``."""
    return x - floor(x)


def to_float(x) -> float:
    return float(x)


# -- parsing / formatting -----------------------------------------------------

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        # floats go through their literal text so "0.1" means 1/10
        return Fraction(str(node.value)) if isinstance(node.value, float) else Fraction(node.value)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
        base, exp = _eval_node(node.left), _eval_node(node.right)
        if isinstance(exp, Fraction) and exp.denominator == 1 and exp >= 0:
            out = Fraction(1)
            for _ in range(int(exp)):
                out = out * base
            return out
        raise ValueError("only nonnegative integer powers are exact")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_eval_node(node.operand)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.UAdd):
        return _eval_node(node.operand)
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id == "sqrt"
        and len(node.args) == 1
        and not node.keywords
    ):
        arg = _eval_node(node.args[0])
        if isinstance(arg, Surd):
            raise ValueError("nested radicals are not supported")
        return sqrt(arg)
    raise ValueError(f"unsupported scalar syntax: {ast.dump(node)}")


def parse_scalar(text: str) -> Scalar:
    """Parse ``"3/7"``, ``"1/2 + 3/4*sqrt(5)"``, ``"(1+sqrt(5))/2"`` exactly."""
    text = str(text).strip()
    if not text:
        raise ValueError("empty scalar")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse scalar {text!r}") from exc
    return _eval_node(tree)


def _fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_scalar(x) -> str:
    """Inverse of :func:`parse_scalar` (canonical ``p/q + r/s*sqrt(d)``)."""
    if isinstance(x, Surd):
        r = x.r
        head = f"{_fmt_fraction(x.p)} + " if x.p != 0 else ""
        if head and r < 0:
            head = f"{_fmt_fraction(x.p)} - "
            r = -r
        return f"{head}{_fmt_fraction(r)}*sqrt({x.d})"
    return _fmt_fraction(Fraction(x))
