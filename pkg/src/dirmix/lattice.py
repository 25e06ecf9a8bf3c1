"""Directional strips in Z^q.

A strip with direction ``v = (1, beta_2, ..., beta_q)`` and widths
``b = (b_2, ..., b_q)`` is the set of integer points ``w`` with

    beta_i * w_1 - b_i/2 <= w_i <= beta_i * w_1 + b_i/2     (i >= 2).

Both bounds are inclusive and decided exactly (see :mod:`dirmix.scalar`).
Lattice points are plain tuples of ints.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .scalar import Scalar, as_scalar, ceil, floor, format_scalar, sign

LatticePoint = tuple[int, ...]

__all__ = [
    "LatticePoint",
    "DirectionVector",
    "StripSpec",
    "StripMembershipError",
    "SumsetResult",
    "coordinate_bounds",
    "strip_contains",
    "iter_strip",
    "enumerate_strip",
    "strip_cardinality",
    "strip_cardinalities",
    "strip_density",
    "relative_density",
    "sumset_search",
    "sumset_covers_window",
]


class StripMembershipError(ValueError):
    def __init__(self, point, message=None):
        self.point = point
        super().__init__(message or f"point {point} lies outside the strip")


@dataclass(frozen=True)
class DirectionVector:
    """``v = (1, betas...)``; the leading 1 is implicit."""

    betas: tuple[Scalar, ...]

    def __post_init__(self):
        betas = tuple(as_scalar(b) for b in self.betas)
        if not betas:
            raise ValueError("a direction needs at least one slope (q >= 2)")
        object.__setattr__(self, "betas", betas)

    @property
    def q(self) -> int:
        return len(self.betas) + 1

    @classmethod
    def of(cls, *betas) -> "DirectionVector":
        return cls(tuple(betas))

    def to_json(self) -> list[str]:
        return ["1"] + [format_scalar(b) for b in self.betas]


@dataclass(frozen=True)
class StripSpec:
    direction: DirectionVector
    widths: tuple[Scalar, ...]

    def __post_init__(self):
        widths = tuple(as_scalar(b) for b in self.widths)
        if len(widths) != len(self.direction.betas):
            raise ValueError(
                f"need {len(self.direction.betas)} widths, got {len(widths)}"
            )
        if any(sign(b) <= 0 for b in widths):
            raise ValueError("strip widths must be strictly positive")
        object.__setattr__(self, "widths", widths)

    @classmethod
    def planar(cls, beta, width) -> "StripSpec":
        """Convenience constructor for q = 2."""
        return cls(DirectionVector((beta,)), (width,))

    @property
    def q(self) -> int:
        return self.direction.q

    def to_json(self) -> dict:
        return {
            "direction": self.direction.to_json(),
            "widths": [format_scalar(b) for b in self.widths],
        }


def coordinate_bounds(beta, width, m: int) -> tuple[int, int]:
    """Integer range ``[ceil(beta*m - width/2), floor(beta*m + width/2)]``.

    May be empty (lo > hi) when the width is below 1.
    """
    centre = beta * m
    half = width / 2
    return ceil(centre - half), floor(centre + half)


class _AffineFloor:
    """``m -> floor(slope*m + offset)`` with an all-integer path when possible."""

    __slots__ = ("slope", "offset", "_fast")

    def __init__(self, slope, offset):
        self.slope = slope
        self.offset = offset
        self._fast = None
        if isinstance(offset, Fraction):
            if isinstance(slope, Fraction):
                q = math.lcm(slope.denominator, offset.denominator)
                self._fast = (
                    slope.numerator * (q // slope.denominator),
                    0,
                    0,
                    offset.numerator * (q // offset.denominator),
                    q,
                )
            else:
                p, r = slope.p, slope.r
                q = math.lcm(p.denominator, r.denominator, offset.denominator)
                self._fast = (
                    p.numerator * (q // p.denominator),
                    r.numerator * (q // r.denominator),
                    slope.d,
                    offset.numerator * (q // offset.denominator),
                    q,
                )

    def __call__(self, m: int) -> int:
        if self._fast is None:
            return floor(self.slope * m + self.offset)
        a, r, d, c, q = self._fast
        if r == 0:
            return (a * m + c) // q
        # floor((a*m + c + r*m*sqrt(d)) / q) via an exact integer square root
        big_r = r * m
        rad = big_r * big_r * d
        s = math.isqrt(rad)
        if big_r >= 0:
            fy = s
        else:
            fy = -s if s * s == rad else -(s + 1)
        return (a * m + c + fy) // q


@lru_cache(maxsize=256)
def _bound_fns(strip_spec: "StripSpec"):
    fns = []
    for beta, b in zip(strip_spec.direction.betas, strip_spec.widths):
        half = b / 2
        upper = _AffineFloor(beta, half)
        # ceil(beta*m - half) == -floor(-beta*m + half)
        lower = _AffineFloor(-beta, half)
        fns.append((lower, upper))
    return tuple(fns)


def _ranges(strip_spec: StripSpec, m: int) -> list[tuple[int, int]]:
    return [(-lower(m), upper(m)) for lower, upper in _bound_fns(strip_spec)]


def strip_contains(strip_spec: StripSpec, p: Sequence[int]) -> bool:
    if len(p) != strip_spec.q:
        raise ValueError(f"point {tuple(p)} has dimension {len(p)}, strip has q={strip_spec.q}")
    m = p[0]
    for (lo, hi), x in zip(_ranges(strip_spec, m), p[1:]):
        if not lo <= x <= hi:
            return False
    return True


def iter_strip(strip_spec: StripSpec, k: int, start: int = 0) -> Iterator[LatticePoint]:
    """Yield strip points with first coordinate in ``[start, k-1]``, lexicographically."""
    for m in range(start, k):
        spans = [range(lo, hi + 1) for lo, hi in _ranges(strip_spec, m)]
        for rest in itertools.product(*spans):
            yield (m, *rest)


def enumerate_strip(strip_spec: StripSpec, k: int) -> list[LatticePoint]:
    if k < 1:
        raise ValueError("k must be >= 1")
    return list(iter_strip(strip_spec, k))


def _column_count(strip_spec: StripSpec, m: int) -> int:
    total = 1
    for lo, hi in _ranges(strip_spec, m):
        if hi < lo:
            return 0
        total *= hi - lo + 1
    return total


def strip_cardinalities(strip_spec: StripSpec, kmax: int) -> list[int]:
    """Cumulative ``#Lambda_k`` for ``k = 1..kmax`` (index ``k-1``)."""
    out = []
    running = 0
    for m in range(kmax):
        running += _column_count(strip_spec, m)
        out.append(running)
    return out


def strip_cardinality(strip_spec: StripSpec, k: int) -> int:
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum(_column_count(strip_spec, m) for m in range(k))


def strip_density(strip_spec: StripSpec, k: int) -> Fraction:
    return Fraction(strip_cardinality(strip_spec, k), k)


def relative_density(points: Iterable[Sequence[int]], strip_spec: StripSpec, k: int) -> Fraction:
    """Fraction of ``Lambda_k`` covered by ``points`` (which must lie in the strip)."""
    hits = set()
    for p in points:
        p = tuple(p)
        if not strip_contains(strip_spec, p):
            raise StripMembershipError(p)
        if 0 <= p[0] < k:
            hits.add(p)
    return Fraction(len(hits), strip_cardinality(strip_spec, k))


@dataclass(frozen=True)
class SumsetResult:
    covers: bool
    window: int
    search_bound: int | None
    missing: LatticePoint | None = None
    reason: str = ""


def sumset_search(spec_v: StripSpec, spec_w: StripSpec, window: int) -> SumsetResult:
    """Decide whether ``[-window, window]^2`` lies in ``Lambda^v(b) + Lambda^w(b')``.

    For each target column ``x`` and each split ``x = m1 + m2`` the reachable
    second coordinates form the integer interval
    ``[lo_v(m1) + lo_w(m2), hi_v(m1) + hi_w(m2)]``; the window column is
    covered iff the union of these intervals contains ``[-window, window]``.
    ``m1`` ranges over ``[-M, M]`` with ``M`` reported in the result.
    """
    if spec_v.q != 2 or spec_w.q != 2:
        raise ValueError("sumset search is planar (q = 2)")
    (b1,), (b2,) = spec_v.direction.betas, spec_w.direction.betas
    (wv,), (ww,) = spec_v.widths, spec_w.widths
    if b1 == b2:
        return SumsetResult(False, window, None, None, "parallel directions")

    gap = abs(b1 - b2)
    reach = window * (2 + abs(b1) + abs(b2)) + (wv + ww) / 2
    bound = ceil(reach / gap)

    span_v = {m: coordinate_bounds(b1, wv, m) for m in range(-bound, bound + 1)}
    span_w = {
        m: coordinate_bounds(b2, ww, m)
        for m in range(-window - bound, window + bound + 1)
    }
    for x in range(-window, window + 1):
        intervals = []
        for m1, (lo1, hi1) in span_v.items():
            if hi1 < lo1:
                continue
            lo2, hi2 = span_w[x - m1]
            if hi2 < lo2:
                continue
            intervals.append((lo1 + lo2, hi1 + hi2))
        intervals.sort()
        need = -window
        for lo, hi in intervals:
            if lo > need:
                break
            need = max(need, hi + 1)
            if need > window:
                break
        if need <= window:
            return SumsetResult(False, window, bound, (x, need), "uncovered point")
    return SumsetResult(True, window, bound)


def sumset_covers_window(spec_v: StripSpec, spec_w: StripSpec, window: int) -> bool:
    return sumset_search(spec_v, spec_w, window).covers
