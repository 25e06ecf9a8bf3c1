"""Finite partitions, joins, Shannon entropy and directional sequence entropy.

All probabilities are exact (see :func:`dirmix.systems.measure`); floating
point only appears when a logarithm is taken.  Entropies are in nats unless
``base`` says otherwise.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .lattice import StripSpec, iter_strip, strip_contains
from .reports import ConvergenceReport, Row
from .systems import (
    EventExpr,
    System,
    complement,
    cylinder,
    intersect,
    measure,
    system_digest,
    translate,
    whole,
)

log = logging.getLogger(__name__)

DEFAULT_ATOM_CAP = 2**20

__all__ = [
    "Partition",
    "SequencePlan",
    "AtomCapExceeded",
    "SearchExhausted",
    "InvalidPartition",
    "DEFAULT_ATOM_CAP",
    "partition",
    "coordinate_partition",
    "set_partition",
    "check_partition",
    "translate_partition",
    "join",
    "shannon_entropy",
    "conditional_entropy",
    "sequence_entropy_partial",
    "construct_full_entropy_sequence",
]


class InvalidPartition(ValueError):
    pass


class AtomCapExceeded(RuntimeError):
    def __init__(self, atoms: int, cap: int):
        self.atoms = atoms
        self.cap = cap
        super().__init__(
            f"join has {atoms} atoms, above the cap of {cap}; use a smaller k or shorter plan"
        )


class SearchExhausted(RuntimeError):
    def __init__(self, step: int, horizon: int, partial: "SequencePlan"):
        self.step = step
        self.horizon = horizon
        self.partial = partial
        super().__init__(
            f"no strip point with first coordinate <= {horizon} satisfies the "
            f"entropy condition at step j={step} ({len(partial.points)} points placed)"
        )


@dataclass(frozen=True)
class Partition:
    atoms: tuple[EventExpr, ...]

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)


def partition(atoms: Sequence[EventExpr]) -> Partition:
    return Partition(tuple(atoms))


def coordinate_partition(sys: System, key) -> Partition:
    """``{[x_key = s] : s in alphabet}`` for a symbolic system."""
    return Partition(tuple(cylinder(sys, {key: s}) for s in sys.alphabet))


def set_partition(sys: System, event: EventExpr) -> Partition:
    """The two-set partition ``{B, B^c}``."""
    return Partition((event, complement(sys, event)))


def check_partition(sys: System, alpha: Partition) -> None:
    total = sum((measure(sys, a) for a in alpha.atoms), Fraction(0))
    if total != 1:
        raise InvalidPartition(f"atom measures sum to {total}, not 1")
    for i, a in enumerate(alpha.atoms):
        for b in alpha.atoms[i + 1 :]:
            if not intersect(sys, a, b).is_empty():
                raise InvalidPartition("partition atoms overlap")


def translate_partition(sys: System, alpha: Partition, w) -> Partition:
    return Partition(tuple(translate(sys, a, w) for a in alpha.atoms))


def _refine(sys: System, atoms, other: Partition, cap: int):
    out = []
    for a in atoms:
        for b in other.atoms:
            c = intersect(sys, a, b)
            if not c.is_empty():
                out.append(c)
                if len(out) > cap:
                    raise AtomCapExceeded(len(out), cap)
    return out


def join(sys: System, alphas: Sequence[Partition], cap: int = DEFAULT_ATOM_CAP) -> Partition:
    """Common refinement; measure-zero cells are dropped."""
    atoms = [whole(sys)]
    for alpha in alphas:
        atoms = _refine(sys, atoms, alpha, cap)
    log.debug("join of %d partitions has %d atoms", len(alphas), len(atoms))
    return Partition(tuple(atoms))


def _plogp(p) -> float:
    if p == 0:
        return 0.0
    if isinstance(p, Fraction):
        return float(p) * (math.log(p.numerator) - math.log(p.denominator))
    x = float(p)
    return x * math.log(x)


def _entropy_of(weights, base=None) -> float:
    h = -math.fsum(_plogp(p) for p in weights)
    h = h + 0.0  # normalise -0.0
    return h / math.log(base) if base else h


def shannon_entropy(sys: System, alpha: Partition, base: float | None = None) -> float:
    return _entropy_of((measure(sys, a) for a in alpha.atoms), base)


def conditional_entropy(
    sys: System, alpha: Partition, eta: Partition, base: float | None = None
) -> float:
    """``H(alpha | eta) = sum_C mu(C) sum_A -(mu(A&C)/mu(C)) log(mu(A&C)/mu(C))``."""
    terms = []
    for c in eta.atoms:
        mc = measure(sys, c)
        if mc == 0:
            continue
        for a in alpha.atoms:
            mac = measure(sys, intersect(sys, a, c))
            if mac == 0:
                continue
            ratio = mac / mc
            terms.append(-float(mac) * _log(ratio))
    h = math.fsum(terms) + 0.0
    return h / math.log(base) if base else h


def _log(x) -> float:
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(float(x))


@dataclass(frozen=True)
class SequencePlan:
    """Ordered strip points with strictly increasing first coordinates."""

    points: tuple[tuple[int, ...], ...]
    strip: StripSpec

    def __post_init__(self):
        pts = tuple(tuple(int(c) for c in p) for p in self.points)
        for p in pts:
            if not strip_contains(self.strip, p):
                raise ValueError(f"plan point {p} lies outside the strip")
        for a, b in zip(pts, pts[1:]):
            if b[0] <= a[0]:
                raise ValueError("plan first coordinates must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)


def sequence_entropy_partial(
    sys: System,
    alpha: Partition,
    plan: SequencePlan,
    kmax: int,
    base: float | None = None,
    cap: int = DEFAULT_ATOM_CAP,
    window: int = 8,
) -> ConvergenceReport:
    """Rows ``(k, H(join_{i<=k} T^{-w_i} alpha) / k)`` for ``k = 1..kmax``.

    The report never claims a limit: each row also carries the running
    maximum over the trailing ``window`` rows as a finite-k stand-in for
    the limsup.
    """
    if len(plan) < kmax:
        raise ValueError(f"plan has {len(plan)} points, need kmax={kmax}")
    rows = []
    atoms = [whole(sys)]
    recent: list[float] = []
    for k, w in enumerate(plan.points[:kmax], start=1):
        atoms = _refine(sys, atoms, translate_partition(sys, alpha, w), cap)
        nats = _entropy_of(measure(sys, a) for a in atoms) / k
        recent = (recent + [nats])[-window:]
        value = nats / math.log(base) if base else nats
        rows.append(
            Row(
                k,
                value,
                None,
                {
                    "value_bits": nats / math.log(2),
                    "running_max": max(recent) / (math.log(base) if base else 1.0),
                    "atoms": len(atoms),
                },
            )
        )
    return ConvergenceReport(
        "sequence_entropy",
        rows,
        {
            "system": system_digest(sys),
            "strip": plan.strip.to_json(),
            "plan": [list(p) for p in plan.points[:kmax]],
            "base": "e" if base is None else base,
            "limsup_window": window,
            "limit_claimed": False,
        },
    )


def _default_tolerance(j: int) -> float:
    return 2.0**-j


def _strip_column(strip: StripSpec, m: int):
    return iter_strip(strip, m + 1, start=m)


def construct_full_entropy_sequence(
    sys: System,
    alphas: Sequence[Partition],
    strip: StripSpec,
    length: int,
    tolerance: Callable[[int], float] = _default_tolerance,
    horizon: int = 1000,
    start: int = 0,
    cap: int = DEFAULT_ATOM_CAP,
) -> SequencePlan:
    """Greedy strip sequence along which every ``alpha`` keeps almost full entropy.

    Step ``j >= 2`` accepts the first strip point (smallest first
    coordinate, then smallest remaining coordinates) beyond the previous one
    such that, for the first ``min(j, len(alphas))`` partitions,

        H(T^{-w_j} alpha | join_{i<j} T^{-w_i} alpha) >= H(alpha) - tolerance(j).

    Raises :class:`SearchExhausted` when no point up to first coordinate
    ``horizon`` qualifies.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    alphas = list(alphas)
    base_h = [shannon_entropy(sys, a) for a in alphas]
    running = [[whole(sys)] for _ in alphas]
    points: list[tuple[int, ...]] = []
    m_next = start

    for j in range(1, length + 1):
        checked = min(j, len(alphas)) if j >= 2 else 0
        chosen = None
        new_running = None
        for m in range(m_next, horizon + 1):
            for w in _strip_column(strip, m):
                candidate = []
                ok = True
                for idx, alpha in enumerate(alphas):
                    shifted = translate_partition(sys, alpha, w)
                    refined = _refine(sys, running[idx], shifted, cap)
                    if idx < checked:
                        prev_h = _entropy_of(measure(sys, a) for a in running[idx])
                        new_h = _entropy_of(measure(sys, a) for a in refined)
                        if new_h - prev_h < base_h[idx] - tolerance(j):
                            ok = False
                            break
                    candidate.append(refined)
                if ok:
                    chosen, new_running = w, candidate
                    break
            if chosen is not None:
                break
        if chosen is None:
            raise SearchExhausted(j, horizon, SequencePlan(tuple(points), strip))
        points.append(chosen)
        running = new_running
        m_next = chosen[0] + 1
        log.debug("step %d: chose %s", j, chosen)
    return SequencePlan(tuple(points), strip)
