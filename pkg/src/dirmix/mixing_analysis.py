"""Strip correlation averages, density-one sets, mean ergodic norms and KvN splits.

Every inner sum is accumulated exactly; a row's float value is derived
from the exact one at the end.  ``<T^w f, g>`` means ``<f o T^w, g>``, which
for indicators is ``mu(T^{-w} B & C)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable

from .lattice import LatticePoint, StripSpec, iter_strip, strip_cardinalities
from .partition_entropy import SequencePlan
from .reports import ConvergenceReport, exact_row
from .scalar import Scalar, as_scalar
from .systems import (
    LEFT,
    RIGHT,
    Bernoulli2D,
    Counterexample,
    EventExpr,
    Rotation2D,
    System,
    intersect,
    joint_measure,
    measure,
    system_digest,
    translate,
    whole,
)

__all__ = [
    "ObservableExpr",
    "DensityOneSet",
    "DensityCertificateError",
    "UnsupportedKronecker",
    "indicator",
    "constant",
    "inner",
    "shifted_inner",
    "integral",
    "correlation_average",
    "observable_correlation_average",
    "wm_average",
    "extract_density_one_set",
    "mean_ergodic_norm",
    "kvn_decompose",
    "KRONECKER_HANDLERS",
]


# -- observables --------------------------------------------------------------


@dataclass(frozen=True)
class ObservableExpr:
    """A finite linear combination ``sum c_i 1_{E_i}`` with exact coefficients.

    Terms with identical events are merged and zero coefficients dropped, so
    ``f - f`` is the empty combination.
    """

    terms: tuple[tuple[Scalar, EventExpr], ...] = ()

    @staticmethod
    def build(terms: Iterable[tuple]) -> "ObservableExpr":
        merged: dict[EventExpr, Scalar] = {}
        order: list[EventExpr] = []
        for c, e in terms:
            c = as_scalar(c)
            if e.is_empty():
                continue
            if e not in merged:
                merged[e] = Fraction(0)
                order.append(e)
            merged[e] = merged[e] + c
        return ObservableExpr(tuple((merged[e], e) for e in order if merged[e] != 0))

    def __add__(self, other: "ObservableExpr") -> "ObservableExpr":
        return ObservableExpr.build(self.terms + other.terms)

    def __neg__(self) -> "ObservableExpr":
        return ObservableExpr(tuple((-c, e) for c, e in self.terms))

    def __sub__(self, other: "ObservableExpr") -> "ObservableExpr":
        return self + (-other)

    def scale(self, c) -> "ObservableExpr":
        return ObservableExpr.build((as_scalar(c) * a, e) for a, e in self.terms)

    def is_zero(self) -> bool:
        return not self.terms


def indicator(e: EventExpr, coef=1) -> ObservableExpr:
    return ObservableExpr.build([(coef, e)])


def constant(sys: System, c) -> ObservableExpr:
    return ObservableExpr.build([(c, whole(sys))])


def integral(sys: System, f: ObservableExpr) -> Scalar:
    total = Fraction(0)
    for c, e in f.terms:
        total = total + c * measure(sys, e)
    return total


def shifted_inner(sys: System, f: ObservableExpr, w, g: ObservableExpr) -> Scalar:
    """``<T^w f, g>`` expanded bilinearly over the terms."""
    total = Fraction(0)
    for a, e in f.terms:
        te = translate(sys, e, w)
        for b, h in g.terms:
            total = total + a * b * measure(sys, intersect(sys, te, h))
    return total


def inner(sys: System, f: ObservableExpr, g: ObservableExpr) -> Scalar:
    return shifted_inner(sys, f, (0,) * sys.q, g)


# -- strip averages -----------------------------------------------------------


def _strip_average(
    strip: StripSpec,
    kmax: int,
    term: Callable[[LatticePoint], Scalar],
    quantity: str,
    meta: dict,
    stride: int = 1,
) -> ConvergenceReport:
    """Rows ``(k, (1/#Lambda_k) sum_{w in Lambda_k} term(w))``."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    counts = strip_cardinalities(strip, kmax)
    rows = []
    total = Fraction(0)
    for m in range(kmax):
        for w in iter_strip(strip, m + 1, start=m):
            total = total + term(w)
        k = m + 1
        if k % stride == 0 or k == kmax:
            rows.append(exact_row(k, total / counts[m], {"strip_points": counts[m]}))
    meta = {"strip": strip.to_json(), "kmax": kmax, **meta}
    return ConvergenceReport(quantity, rows, meta)


def correlation_average(
    sys: System, B: EventExpr, C: EventExpr, strip: StripSpec, kmax: int, stride: int = 1
) -> ConvergenceReport:
    """``(1/#Lambda_k) sum |mu(T^{-w}B & C) - mu(B)mu(C)|`` over the truncated strip."""
    product = measure(sys, B) * measure(sys, C)
    return _strip_average(
        strip,
        kmax,
        lambda w: abs(joint_measure(sys, B, w, C) - product),
        "correlation_average",
        {"system": system_digest(sys)},
        stride,
    )


def observable_correlation_average(
    sys: System, f: ObservableExpr, g: ObservableExpr, strip: StripSpec, kmax: int, stride: int = 1
) -> ConvergenceReport:
    product = integral(sys, f) * integral(sys, g)
    return _strip_average(
        strip,
        kmax,
        lambda w: abs(shifted_inner(sys, f, w, g) - product),
        "observable_correlation_average",
        {"system": system_digest(sys)},
        stride,
    )


def wm_average(
    sys: System, f: ObservableExpr, g: ObservableExpr, strip: StripSpec, kmax: int, stride: int = 1
) -> ConvergenceReport:
    """``(1/#Lambda_k) sum |<T^w f, g>|``; tends to 0 exactly for v-weak mixing ``f``."""
    return _strip_average(
        strip,
        kmax,
        lambda w: abs(shifted_inner(sys, f, w, g)),
        "wm_average",
        {"system": system_digest(sys)},
        stride,
    )


# -- density-one sets -----------------------------------------------------------


class DensityCertificateError(RuntimeError):
    def __init__(self, failed_p: int, largest_certified: int, thresholds, horizon: int):
        self.failed_p = failed_p
        self.largest_certified = largest_certified
        self.thresholds = thresholds
        self.horizon = horizon
        super().__init__(
            f"cannot certify level p={failed_p} within horizon {horizon}; "
            f"largest certified p is {largest_certified}"
        )


@dataclass
class DensityOneSet:
    """Finite-horizon certificate for a density-one subset ``Q`` of the strip.

    ``thresholds[p-1] = (p, l_p)``.  Points whose first coordinate lies in
    ``[l_p, l_{p+1})`` are excluded iff their deviation
    ``|mu(T^{-w}B & C) - mu(B)mu(C)|`` is at least ``1/(p+1)``; below
    ``l_1`` the level ``1/2`` is used.  Hence every point of ``Q`` with
    first coordinate ``>= l_p`` deviates by less than ``1/(p+1)``, and for
    ``k >= l_p`` the excluded fraction of ``Lambda_k`` is below ``1/(p+1)``.
    """

    strip: StripSpec
    horizon: int
    thresholds: list[tuple[int, int]]
    excluded: list[LatticePoint]
    certificates: list[dict] = field(default_factory=list)

    def __contains__(self, point) -> bool:
        point = tuple(point)
        if not 0 <= point[0] < self.horizon:
            raise ValueError(f"point {point} lies beyond the certified horizon {self.horizon}")
        return point not in self._excluded_set

    @cached_property
    def _excluded_set(self) -> frozenset:
        return frozenset(self.excluded)

    def members(self, k: int) -> list[LatticePoint]:
        """Points of ``Q`` with first coordinate in ``[0, k-1]``."""
        if k > self.horizon:
            raise ValueError(f"k={k} exceeds the certified horizon {self.horizon}")
        return [w for w in iter_strip(self.strip, k) if w not in self._excluded_set]

    def excluded_fraction(self, k: int) -> Fraction:
        counts = strip_cardinalities(self.strip, k)
        hit = sum(1 for w in self.excluded if w[0] < k)
        return Fraction(hit, counts[-1])

    def level(self, first_coordinate: int) -> int:
        """Largest ``p`` with ``l_p <= first_coordinate`` (0 if none)."""
        best = 0
        for p, lp in self.thresholds:
            if lp <= first_coordinate:
                best = p
        return best


def extract_density_one_set(
    sys: System,
    B: EventExpr,
    C: EventExpr,
    strip: StripSpec,
    pmax: int = 10,
    horizon: int = 1000,
) -> DensityOneSet:
    """Build thresholds ``l_1 <= ... <= l_pmax`` and the excluded set ``A``.

    ``l_p`` is the first doubling candidate ``1, 2, 4, ...`` (not below
    ``l_{p-1}``, with ``2 l_p <= horizon``) such that the fraction of strip
    points deviating by at least ``1/(p+1)`` stays below ``1/(p+1)`` for every
    truncation ``k`` in ``[l_p, horizon]``.
    """
    if pmax < 1 or horizon < 2:
        raise ValueError("need pmax >= 1 and horizon >= 2")
    product = measure(sys, B) * measure(sys, C)
    counts = strip_cardinalities(strip, horizon)
    deviations: list[tuple[LatticePoint, Fraction]] = []
    for w in iter_strip(strip, horizon):
        deviations.append((w, abs(joint_measure(sys, B, w, C) - product)))

    thresholds: list[tuple[int, int]] = []
    certificates: list[dict] = []
    prev = 1
    for p in range(1, pmax + 1):
        level = Fraction(1, p + 1)
        # prefix counts of points with deviation >= level, per first coordinate
        bad_by_m = [0] * horizon
        for w, dev in deviations:
            if dev >= level:
                bad_by_m[w[0]] += 1
        prefix = []
        running = 0
        for m in range(horizon):
            running += bad_by_m[m]
            prefix.append(running)
        # tail[k-1] = max over k' >= k of the excluded fraction
        worst = [Fraction(0)] * horizon
        tail_max = Fraction(0)
        for m in range(horizon - 1, -1, -1):
            frac = Fraction(prefix[m], counts[m])
            tail_max = max(tail_max, frac)
            worst[m] = tail_max
        candidate = 1
        while candidate < prev:
            candidate *= 2
        found = None
        while 2 * candidate <= horizon:
            if worst[candidate - 1] < level:
                found = candidate
                break
            candidate *= 2
        if found is None:
            raise DensityCertificateError(p, p - 1, thresholds, horizon)
        thresholds.append((p, found))
        certificates.append(
            {
                "p": p,
                "l_p": found,
                "checked_k": [found, horizon],
                "max_fraction": worst[found - 1],
                "bound": level,
            }
        )
        prev = found

    excluded = []
    edges = [0] + [lp for _, lp in thresholds[1:]] + [horizon]
    for (p, _), lo, hi in zip(thresholds, edges, edges[1:]):
        level = Fraction(1, p + 1)
        excluded.extend(w for w, dev in deviations if lo <= w[0] < hi and dev >= level)
    excluded.sort()
    return DensityOneSet(strip, horizon, thresholds, excluded, certificates)


# -- mean ergodic -----------------------------------------------------------------


def mean_ergodic_norm(sys: System, B: EventExpr, plan: SequencePlan, Nmax: int) -> ConvergenceReport:
    """``||(1/N) sum_i 1_B o T^{w_i} - mu(B)||_2^2`` via the pair-correlation expansion.

    Uses ``(1/N^2) sum_{i,j} mu(T^{-(w_i - w_j)}B & B) - mu(B)^2``.
    """
    if len(plan) < Nmax:
        raise ValueError(f"plan has {len(plan)} points, need Nmax={Nmax}")
    mu = measure(sys, B)
    pts = plan.points

    def pair(i, j):
        diff = tuple(a - b for a, b in zip(pts[i], pts[j]))
        return joint_measure(sys, B, diff, B)

    rows = []
    total = Fraction(0)
    for n in range(Nmax):
        total = total + pair(n, n)
        for i in range(n):
            total = total + pair(i, n) + pair(n, i)
        N = n + 1
        rows.append(exact_row(N, total / (N * N) - mu * mu))
    return ConvergenceReport(
        "mean_ergodic_norm",
        rows,
        {"system": system_digest(sys), "strip": plan.strip.to_json(), "plan": [list(p) for p in pts[:Nmax]]},
    )


# -- Koopman-von Neumann ------------------------------------------------------------


class UnsupportedKronecker(ValueError):
    pass


def _bernoulli_kronecker(sys, f, direction):
    # every direction is weakly mixing: the algebra is trivial
    return constant(sys, integral(sys, f))


def _fibre_integral(sys: Counterexample, f: ObservableExpr, integrate_side: int) -> ObservableExpr:
    terms = []
    for c, e in f.terms:
        for atom in e.atoms:
            integrated = [(k, s) for k, s in atom if k[0] == integrate_side]
            kept = [(k, s) for k, s in atom if k[0] != integrate_side]
            weight = sys.atom_measure(tuple(integrated))
            terms.append((c * weight, sys.normalize([tuple(kept)])))
    return ObservableExpr.build(terms)


def _counterexample_kronecker(sys, f, direction):
    (beta,) = direction.betas
    if beta == -1:
        # along (1,-1) only the left factor moves: the algebra is X x B_X
        return _fibre_integral(sys, f, LEFT)
    if beta == 1:
        return _fibre_integral(sys, f, RIGHT)
    raise UnsupportedKronecker(
        f"Kronecker algebra not analytically available for counterexample along (1, {beta})"
    )


def _rotation_kronecker(sys, f, direction):
    return f


KRONECKER_HANDLERS: dict[type, Callable] = {
    Bernoulli2D: _bernoulli_kronecker,
    Counterexample: _counterexample_kronecker,
    Rotation2D: _rotation_kronecker,
}


def kvn_decompose(sys: System, f: ObservableExpr, direction) -> tuple[ObservableExpr, ObservableExpr]:
    """Split ``f`` into its Kronecker (``E(f | K^v)``) and weak-mixing parts."""
    handler = KRONECKER_HANDLERS.get(type(sys))
    if handler is None:
        raise UnsupportedKronecker(
            f"Kronecker algebra not analytically available for {type(sys).__name__}"
        )
    if direction.q != sys.q:
        raise ValueError("direction dimension does not match the system")
    kron = handler(sys, f, direction)
    return kron, f - kron
