"""Model Z^q measure-preserving systems with exact event measures.

Events are finite disjoint unions of *atoms*.  What an atom is depends on
the system:

* symbolic systems (:class:`Bernoulli2D`, :class:`Counterexample`): a
  cylinder, i.e. a sorted tuple of ``(coordinate, symbol)`` constraints;
* :class:`Product`: a pair ``(left_atom, right_atom)``;
* :class:`Rotation2D`: a box ``((a1, b1), (a2, b2))`` of half-open arcs
  inside ``[0, 1)``.

Shift convention: ``(T^w x)_u = x_{u+w}``, so the pull-back of a
constraint is ``T^{-w}[x_u = s] = [x_{u+w} = s]``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .scalar import Scalar, Surd, as_scalar, format_scalar, frac, sign

__all__ = [
    "EventExpr",
    "System",
    "SymbolicSystem",
    "Bernoulli2D",
    "Counterexample",
    "Product",
    "Rotation2D",
    "LEFT",
    "RIGHT",
    "product_system",
    "cylinder",
    "whole",
    "empty",
    "rectangle",
    "box",
    "intersect",
    "complement",
    "union",
    "measure",
    "translate",
    "joint_measure",
    "act",
    "contains",
    "system_digest",
]

LEFT, RIGHT = 0, 1


@dataclass(frozen=True)
class EventExpr:
    """A disjoint union of atoms, kept in the owning system's normal form."""

    atoms: tuple = ()

    def is_empty(self) -> bool:
        return not self.atoms

    def __len__(self):
        return len(self.atoms)


class System:
    """Interface shared by every model system; subclasses supply the atom algebra."""

    q = 2

    # atom algebra ------------------------------------------------------------
    def full_atom(self):
        raise NotImplementedError

    def atom_measure(self, atom) -> Scalar:
        raise NotImplementedError

    def meet(self, a, b):
        """Intersection of two atoms, or ``None`` when it is empty."""
        raise NotImplementedError

    def atom_complement(self, atom) -> list:
        """Disjoint atoms covering the complement of ``atom``."""
        raise NotImplementedError

    def shift_atom(self, atom, w) -> list:
        """Disjoint atoms whose union is ``T^{-w}(atom)``."""
        raise NotImplementedError

    def sort_key(self, atom):
        raise NotImplementedError

    def act_point(self, point, w):
        """``T^w`` applied to a (finitely specified) point."""
        raise NotImplementedError

    def atom_contains(self, atom, point) -> bool:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError

    # shared helpers ------------------------------------------------------------
    def normalize(self, atoms: Iterable) -> EventExpr:
        kept = [a for a in atoms if a is not None and self.atom_measure(a) != 0]
        kept.sort(key=self.sort_key)
        return EventExpr(tuple(kept))

    def check_point(self, w) -> tuple[int, ...]:
        w = tuple(int(c) for c in w)
        if len(w) != self.q:
            raise ValueError(f"translation {w} has dimension {len(w)}, system has q={self.q}")
        return w


# -- symbolic systems -------------------------------------------------------------


class SymbolicSystem(System):
    """Full shifts with i.i.d. symbol weights; atoms are cylinders."""

    def __init__(self, weights: Mapping[Any, Any] | Sequence[Any], alphabet=None):
        if isinstance(weights, Mapping):
            table = {s: Fraction(as_scalar(w)) for s, w in weights.items()}
        else:
            alphabet = tuple(alphabet) if alphabet is not None else tuple(range(len(weights)))
            if len(alphabet) != len(weights):
                raise ValueError("alphabet and weights differ in length")
            table = {s: Fraction(as_scalar(w)) for s, w in zip(alphabet, weights)}
        if any(w <= 0 for w in table.values()):
            raise ValueError("symbol weights must be positive")
        if sum(table.values()) != 1:
            raise ValueError("symbol weights must sum to 1")
        self.weights = table
        self.alphabet = tuple(table)

    def full_atom(self):
        return ()

    def atom_measure(self, atom) -> Fraction:
        out = Fraction(1)
        for _, s in atom:
            out *= self.weights[s]
        return out

    def meet(self, a, b):
        merged = dict(a)
        for key, s in b:
            old = merged.get(key)
            if old is None:
                merged[key] = s
            elif old != s:
                return None
        return tuple(sorted(merged.items()))

    def atom_complement(self, atom) -> list:
        out = []
        prefix: list = []
        for key, s in atom:
            for other in self.alphabet:
                if other != s:
                    out.append(tuple(sorted(prefix + [(key, other)])))
            prefix.append((key, s))
        return out

    def sort_key(self, atom):
        return tuple((repr_key(k), repr_key(s)) for k, s in atom)

    def shift_atom(self, atom, w) -> list:
        return [tuple(sorted((self.move(k, w), s) for k, s in atom))]

    def move(self, key, w):
        raise NotImplementedError

    def atom_contains(self, atom, point) -> bool:
        for k, s in atom:
            if k not in point:
                raise KeyError(f"point does not specify coordinate {k}")
            if point[k] != s:
                return False
        return True

    def check_constraint(self, key, symbol):
        if symbol not in self.weights:
            raise ValueError(f"symbol {symbol!r} not in alphabet {self.alphabet}")


def repr_key(x):
    # sort keys must be totally ordered across ints and tuples
    return (0, x) if isinstance(x, int) else (1, x) if isinstance(x, tuple) else (2, repr(x))


class Bernoulli2D(SymbolicSystem):
    """Full ``Z^q`` Bernoulli shift; coordinates are lattice points."""

    def __init__(self, weights, alphabet=None, q: int = 2):
        super().__init__(weights, alphabet)
        if q < 2:
            raise ValueError("q must be >= 2")
        self.q = q

    def move(self, key, w):
        return tuple(a + b for a, b in zip(key, w))

    def check_constraint(self, key, symbol):
        super().check_constraint(key, symbol)
        if not (isinstance(key, tuple) and len(key) == self.q):
            raise ValueError(f"Bernoulli coordinate must be a {self.q}-tuple, got {key!r}")

    def act_point(self, point, w):
        # (T^w x)_u = x_{u+w}: the symbol stored at u moves to u - w
        return {tuple(a - b for a, b in zip(u, w)): s for u, s in point.items()}

    def describe(self) -> dict:
        return {
            "kind": "bernoulli2d",
            "q": self.q,
            "alphabet": list(self.alphabet),
            "weights": [format_scalar(self.weights[s]) for s in self.alphabet],
        }


class Counterexample(SymbolicSystem):
    """Two independent two-sided Bernoulli sequences with a skew Z^2 action.

    ``T^(m,n) = T1^(m+n) T2^(m-n)`` with ``T1 = Id x T`` and ``T2 = T x Id``:
    the left sequence is shifted by ``m - n`` and the right one by ``m + n``.
    Coordinates are ``(LEFT, i)`` or ``(RIGHT, i)``.
    """

    def __init__(self, weights=(Fraction(1, 2), Fraction(1, 2)), alphabet=None):
        super().__init__(weights, alphabet)

    @staticmethod
    def offsets(w) -> tuple[int, int]:
        m, n = w
        return m - n, m + n

    def move(self, key, w):
        side, i = key
        left, right = self.offsets(w)
        return (side, i + (left if side == LEFT else right))

    def check_constraint(self, key, symbol):
        super().check_constraint(key, symbol)
        if not (isinstance(key, tuple) and len(key) == 2 and key[0] in (LEFT, RIGHT)):
            raise ValueError(f"counterexample coordinate must be (side, index), got {key!r}")

    def act_point(self, point, w):
        left, right = self.offsets(w)
        return {
            (side, i - (left if side == LEFT else right)): s
            for (side, i), s in point.items()
        }

    def describe(self) -> dict:
        return {
            "kind": "counterexample",
            "alphabet": list(self.alphabet),
            "weights": [format_scalar(self.weights[s]) for s in self.alphabet],
        }


# -- products ---------------------------------------------------------------------


class Product(System):
    """``(X1 x X2, mu x nu, T1 x T2)`` acting diagonally."""

    def __init__(self, left: System, right: System):
        if left.q != right.q:
            raise ValueError(f"cannot pair systems with q={left.q} and q={right.q}")
        self.left = left
        self.right = right
        self.q = left.q

    def full_atom(self):
        return (self.left.full_atom(), self.right.full_atom())

    def atom_measure(self, atom):
        return self.left.atom_measure(atom[0]) * self.right.atom_measure(atom[1])

    def meet(self, a, b):
        left = self.left.meet(a[0], b[0])
        if left is None:
            return None
        right = self.right.meet(a[1], b[1])
        if right is None:
            return None
        return (left, right)

    def atom_complement(self, atom) -> list:
        a, b = atom
        out = [(c, self.right.full_atom()) for c in self.left.atom_complement(a)]
        out += [(a, c) for c in self.right.atom_complement(b)]
        return out

    def shift_atom(self, atom, w) -> list:
        return [
            (x, y)
            for x in self.left.shift_atom(atom[0], w)
            for y in self.right.shift_atom(atom[1], w)
        ]

    def sort_key(self, atom):
        return (self.left.sort_key(atom[0]), self.right.sort_key(atom[1]))

    def act_point(self, point, w):
        return (self.left.act_point(point[0], w), self.right.act_point(point[1], w))

    def atom_contains(self, atom, point) -> bool:
        return self.left.atom_contains(atom[0], point[0]) and self.right.atom_contains(
            atom[1], point[1]
        )

    def describe(self) -> dict:
        return {"kind": "product", "left": self.left.describe(), "right": self.right.describe()}


def product_system(a: System, b: System) -> Product:
    return Product(a, b)


# -- rotations --------------------------------------------------------------------

_UNIT = (Fraction(0), Fraction(1))


def _shift_arc(arc, t) -> list:
    """Pieces of ``arc - t (mod 1)`` inside ``[0, 1)``."""
    a, b = arc
    length = b - a
    if length == 1:
        return [_UNIT]
    start = frac(a - t)
    end = start + length
    if end <= 1:
        return [(start, end)]
    return [(start, Fraction(1)), (Fraction(0), end - 1)]


def _arc_meet(x, y):
    lo = max(x[0], y[0])
    hi = min(x[1], y[1])
    return (lo, hi) if sign(hi - lo) > 0 else None


def _arc_complement(arc) -> list:
    a, b = arc
    out = []
    if sign(a) > 0:
        out.append((Fraction(0), a))
    if sign(b - 1) < 0:
        out.append((b, Fraction(1)))
    return out


class Rotation2D(System):
    """Torus rotation ``T^(m,n)(x, y) = (x + m*a1, y + n*a2) mod 1``.

    Angles and arc endpoints may be quadratic surds as long as they share one
    radicand, so every measure stays exact.
    """

    def __init__(self, angles):
        a1, a2 = (as_scalar(a) for a in angles)
        radicands = {x.d for x in (a1, a2) if isinstance(x, Surd)}
        if len(radicands) > 1:
            raise ValueError("rotation angles must share a single radicand")
        self.angles = (a1, a2)
        self.radicand = radicands.pop() if radicands else None

    def _check_scalar(self, x):
        if isinstance(x, Surd):
            if self.radicand is None:
                self.radicand = x.d
            elif x.d != self.radicand:
                raise ValueError("arc endpoints must share the angles' radicand")
        return x

    def full_atom(self):
        return (_UNIT, _UNIT)

    def atom_measure(self, atom):
        (a1, b1), (a2, b2) = atom
        return (b1 - a1) * (b2 - a2)

    def meet(self, a, b):
        x = _arc_meet(a[0], b[0])
        if x is None:
            return None
        y = _arc_meet(a[1], b[1])
        if y is None:
            return None
        return (x, y)

    def atom_complement(self, atom) -> list:
        x, y = atom
        out = [(c, _UNIT) for c in _arc_complement(x)]
        out += [(x, c) for c in _arc_complement(y)]
        return out

    def shift_atom(self, atom, w) -> list:
        m, n = w
        xs = _shift_arc(atom[0], m * self.angles[0])
        ys = _shift_arc(atom[1], n * self.angles[1])
        return [(x, y) for x in xs for y in ys]

    def sort_key(self, atom):
        return tuple((float(a), float(b), format_scalar(a), format_scalar(b)) for a, b in atom)

    def act_point(self, point, w):
        x, y = point
        m, n = w
        return (frac(x + m * self.angles[0]), frac(y + n * self.angles[1]))

    def atom_contains(self, atom, point) -> bool:
        return all(
            sign(c - a) >= 0 and sign(b - c) > 0 for (a, b), c in zip(atom, point)
        )

    def describe(self) -> dict:
        return {"kind": "rotation2d", "angles": [format_scalar(a) for a in self.angles]}


# -- event constructors -------------------------------------------------------------


def cylinder(sys: System, constraints: Mapping | Iterable = ()) -> EventExpr:
    """Cylinder event from ``{coordinate: symbol}`` on a symbolic system."""
    if not isinstance(sys, SymbolicSystem):
        raise TypeError("cylinder events need a symbolic system")
    items = constraints.items() if isinstance(constraints, Mapping) else constraints
    atom = sys.full_atom()
    for key, s in items:
        key = tuple(key) if isinstance(key, list) else key
        sys.check_constraint(key, s)
        atom = sys.meet(atom, ((key, s),))
        if atom is None:
            return EventExpr()
    return sys.normalize([atom])


def box(sys: "Rotation2D", x_arc=(0, 1), y_arc=(0, 1)) -> EventExpr:
    """Box event ``[a1, b1) x [a2, b2)`` on a rotation; arcs may wrap past 1."""
    pieces = []
    for arc in (x_arc, y_arc):
        a, b = (sys._check_scalar(as_scalar(v)) for v in arc)
        if sign(b - a) <= 0 or sign(b - a - 1) > 0:
            raise ValueError(f"arc [{a}, {b}) must have length in (0, 1]")
        pieces.append(_shift_arc((a, b), 0))
    return sys.normalize((x, y) for x in pieces[0] for y in pieces[1])


def rectangle(sys: Product, left: EventExpr, right: EventExpr) -> EventExpr:
    """``A x B`` on a product system."""
    return sys.normalize((a, b) for a in left.atoms for b in right.atoms)


def whole(sys: System) -> EventExpr:
    return EventExpr((sys.full_atom(),))


def empty() -> EventExpr:
    return EventExpr()


def intersect(sys: System, e1: EventExpr, e2: EventExpr) -> EventExpr:
    return sys.normalize(sys.meet(a, b) for a in e1.atoms for b in e2.atoms)


def complement(sys: System, e: EventExpr) -> EventExpr:
    out = whole(sys)
    for atom in e.atoms:
        out = intersect(sys, out, sys.normalize(sys.atom_complement(atom)))
    return out


def union(sys: System, e1: EventExpr, e2: EventExpr) -> EventExpr:
    rest = intersect(sys, e2, complement(sys, e1))
    return sys.normalize(e1.atoms + rest.atoms)


def measure(sys: System, e: EventExpr) -> Scalar:
    if not isinstance(e, EventExpr):
        raise TypeError(f"expected EventExpr, got {type(e).__name__}")
    total = Fraction(0)
    for atom in e.atoms:
        total = total + sys.atom_measure(atom)
    return total


def translate(sys: System, e: EventExpr, w) -> EventExpr:
    """The event ``T^{-w} e``."""
    w = sys.check_point(w)
    if not any(w):
        return e
    return sys.normalize(piece for atom in e.atoms for piece in sys.shift_atom(atom, w))


def joint_measure(sys: System, e1: EventExpr, w, e2: EventExpr) -> Scalar:
    """``mu(T^{-w} e1 & e2)``."""
    return measure(sys, intersect(sys, translate(sys, e1, w), e2))


def act(sys: System, point, w):
    return sys.act_point(point, sys.check_point(w))


def contains(sys: System, e: EventExpr, point) -> bool:
    return any(sys.atom_contains(atom, point) for atom in e.atoms)


def system_digest(sys: System) -> str:
    blob = json.dumps(sys.describe(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
