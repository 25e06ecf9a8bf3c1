"""The suspension ``X x [0,1)^2`` with ``phi_{s,t}`` and ``W^n = phi_{n, n*beta}``.

``phi_{s,t}(x, u, v) = (T^([s+u], [t+v]) x, {s+u}, {t+v})`` where ``[.]`` is
the floor and ``{.}`` the fractional part, so fractional coordinates always
stay in ``[0, 1)``.

A base point is either a concrete point of a model system (pass
``system=``) or, when no system is given, an integer offset vector standing
for ``T^offset x0`` with an unspecified ``x0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .scalar import Scalar, as_scalar, floor, frac, sign
from .systems import EventExpr, System, act, intersect, measure, translate

__all__ = [
    "SuspensionPoint",
    "RectangleEvent",
    "flow",
    "suspension_step",
    "suspension_pullback",
    "rectangle_measure",
    "suspension_correlation",
    "UNIT_ARC",
]

UNIT_ARC = (Fraction(0), Fraction(1))


def _check_unit(x, name):
    if sign(x) < 0 or sign(x - 1) >= 0:
        raise ValueError(f"{name}={x} is not in [0, 1)")


@dataclass(frozen=True)
class SuspensionPoint:
    base: Any
    u: Scalar
    v: Scalar

    def __post_init__(self):
        u, v = as_scalar(self.u), as_scalar(self.v)
        _check_unit(u, "u")
        _check_unit(v, "v")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)


def _move_base(base, w, system: System | None):
    if system is None:
        return tuple(a + b for a, b in zip(base, w))
    return act(system, base, w)


def flow(p: SuspensionPoint, s, t, system: System | None = None) -> SuspensionPoint:
    """``phi_{s,t}`` for arbitrary exact ``s``, ``t``."""
    su = as_scalar(s) + p.u
    tv = as_scalar(t) + p.v
    shift = (floor(su), floor(tv))
    return SuspensionPoint(_move_base(p.base, shift, system), frac(su), frac(tv))


def suspension_step(p: SuspensionPoint, n: int, beta, system: System | None = None) -> SuspensionPoint:
    """``W^n p = phi_{n, n*beta}(p)``."""
    return flow(p, n, n * as_scalar(beta), system)


@dataclass(frozen=True)
class RectangleEvent:
    """``base x u_arc x v_arc`` with half-open arcs inside ``[0, 1)``."""

    base: EventExpr
    u_arc: tuple = UNIT_ARC
    v_arc: tuple = UNIT_ARC

    def __post_init__(self):
        for name in ("u_arc", "v_arc"):
            a, b = (as_scalar(x) for x in getattr(self, name))
            if sign(a) < 0 or sign(b - 1) > 0 or sign(b - a) < 0:
                raise ValueError(f"{name}=[{a}, {b}) is not a sub-arc of [0, 1)")
            object.__setattr__(self, name, (a, b))


def _arc_length(arc):
    a, b = arc
    d = b - a
    return d if sign(d) > 0 else Fraction(0)


def _clip(lo, hi):
    return (lo, hi) if sign(hi - lo) > 0 else None


def rectangle_measure(sys: System, e: RectangleEvent) -> Scalar:
    return measure(sys, e.base) * _arc_length(e.u_arc) * _arc_length(e.v_arc)


def suspension_pullback(sys: System, e: RectangleEvent, n: int, beta) -> list[RectangleEvent]:
    """``W^{-n} e`` as disjoint rectangles.

    With ``f = {n*beta}``, points with ``v < 1 - f`` move by ``(n, [n*beta])``
    and land at ``v + f``; the others move by ``(n, [n*beta] + 1)`` and land at
    ``v + f - 1``.  The ``u`` coordinate is untouched since ``n`` is an integer.
    """
    nb = n * as_scalar(beta)
    whole_part = floor(nb)
    f = nb - whole_part
    c, d = e.v_arc
    pieces = []
    low = _clip(max(Fraction(0), c - f), min(1 - f, d - f))
    if low is not None:
        pieces.append(((n, whole_part), low))
    high = _clip(max(1 - f, c - f + 1), min(Fraction(1), d - f + 1))
    if high is not None:
        pieces.append(((n, whole_part + 1), high))
    return [
        RectangleEvent(translate(sys, e.base, shift), e.u_arc, arc)
        for shift, arc in pieces
        if not e.base.is_empty()
    ]


def suspension_correlation(sys: System, B: EventExpr, C: EventExpr, D, beta, n: int) -> Scalar:
    """``<U_W^n (1_B x 1_[0,1)^2), 1_C x 1_{[0,1) x D}>`` exactly."""
    D = tuple(as_scalar(x) for x in D)
    total = Fraction(0)
    for piece in suspension_pullback(sys, RectangleEvent(B), n, beta):
        overlap = _clip(max(piece.v_arc[0], D[0]), min(piece.v_arc[1], D[1]))
        if overlap is None:
            continue
        total = total + measure(sys, intersect(sys, piece.base, C)) * _arc_length(
            piece.u_arc
        ) * _arc_length(overlap)
    return total
