import math
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from dirmix.lattice import StripSpec
from dirmix.partition_entropy import (
    AtomCapExceeded,
    InvalidPartition,
    Partition,
    SearchExhausted,
    SequencePlan,
    check_partition,
    conditional_entropy,
    construct_full_entropy_sequence,
    coordinate_partition,
    join,
    sequence_entropy_partial,
    set_partition,
    shannon_entropy,
    translate_partition,
)
from dirmix.systems import RIGHT, Bernoulli2D, Counterexample, EventExpr, cylinder, measure, union, whole

bern = Bernoulli2D((F(1, 2), F(1, 2)))
third = Bernoulli2D((F(1, 3), F(2, 3)))
cex = Counterexample()
LOG2 = math.log(2)


def test_shannon_examples():
    alpha = coordinate_partition(bern, (0, 0))
    assert shannon_entropy(bern, alpha) == pytest.approx(LOG2, abs=1e-12)
    assert shannon_entropy(bern, alpha, base=2) == pytest.approx(1.0, abs=1e-12)
    assert shannon_entropy(bern, Partition((whole(bern),))) == 0.0


def test_shannon_against_50_digit_oracle():
    mpmath.mp.dps = 50
    exact = mpmath.mpf(1) / 3 * mpmath.log(3) + mpmath.mpf(2) / 3 * mpmath.log(mpmath.mpf(3) / 2)
    got = shannon_entropy(third, coordinate_partition(third, (0, 0)))
    assert abs(got - float(exact)) < 1e-12


def test_invalid_partitions():
    a = cylinder(bern, {(0, 0): 0})
    with pytest.raises(InvalidPartition):
        check_partition(bern, Partition((a,)))
    with pytest.raises(InvalidPartition):
        check_partition(bern, Partition((a, a, cylinder(bern, {(0, 0): 1}))))
    check_partition(bern, set_partition(bern, a))


def test_join_examples():
    alpha = coordinate_partition(bern, (0, 0))
    assert set(join(bern, [alpha, alpha]).atoms) == set(alpha.atoms)
    j = join(bern, [translate_partition(bern, alpha, (1, 2)), translate_partition(bern, alpha, (0, 5))])
    assert len(j) == 4 and all(measure(bern, a) == F(1, 4) for a in j.atoms)
    B = cylinder(cex, {(RIGHT, 0): 0})
    beta = set_partition(cex, B)
    shifted = [translate_partition(cex, beta, (i, -i)) for i in range(1, 15)]
    assert len(join(cex, shifted)) == 2


def test_join_cap():
    alpha = coordinate_partition(bern, (0, 0))
    with pytest.raises(AtomCapExceeded) as err:
        join(bern, [translate_partition(bern, alpha, (i, 0)) for i in range(6)], cap=40)
    assert err.value.cap == 40 and "smaller k" in str(err.value)


def test_conditional_examples():
    alpha = coordinate_partition(third, (0, 0))
    eta = coordinate_partition(third, (1, 0))
    trivial = Partition((whole(third),))
    assert conditional_entropy(third, alpha, alpha) == pytest.approx(0.0, abs=1e-15)
    assert conditional_entropy(third, alpha, trivial) == pytest.approx(shannon_entropy(third, alpha), abs=1e-12)
    assert conditional_entropy(third, alpha, eta) == pytest.approx(shannon_entropy(third, alpha), abs=1e-12)


def test_chain_rule():
    alpha = coordinate_partition(third, (0, 0))
    e = union(third, cylinder(third, {(0, 0): 1, (1, 0): 0}), cylinder(third, {(1, 1): 1}))
    eta = set_partition(third, e)
    lhs = shannon_entropy(third, join(third, [alpha, eta]))
    assert lhs == pytest.approx(shannon_entropy(third, eta) + conditional_entropy(third, alpha, eta), abs=1e-12)


def test_sequence_entropy_examples():
    strip = StripSpec.planar(0, 2)
    plan = SequencePlan(tuple((i, (-1) ** i) for i in range(10)), strip)
    alpha = coordinate_partition(bern, (0, 0))
    rep = sequence_entropy_partial(bern, alpha, plan, 10)
    assert all(v == pytest.approx(LOG2, abs=1e-12) for v in rep.values)
    assert rep.meta["limit_claimed"] is False
    assert rep.rows[-1].extras["value_bits"] == pytest.approx(1.0, abs=1e-12)

    diag = SequencePlan(tuple((i, -i) for i in range(8)), StripSpec.planar(-1, 1))
    beta = set_partition(cex, cylinder(cex, {(RIGHT, 0): 0}))
    rep = sequence_entropy_partial(cex, beta, diag, 8)
    assert [r.value for r in rep.rows] == pytest.approx([LOG2 / k for k in range(1, 9)], abs=1e-12)
    assert rep.rows[-1].extras["running_max"] == pytest.approx(LOG2, abs=1e-12)

    rep = sequence_entropy_partial(bern, Partition((whole(bern),)), plan, 5)
    assert rep.values == [0.0] * 5


def test_plan_validation():
    strip = StripSpec.planar(0, 1)
    with pytest.raises(ValueError):
        SequencePlan(((0, 0), (0, 0)), strip)
    with pytest.raises(ValueError):
        SequencePlan(((0, 0), (1, 3)), strip)
    with pytest.raises(ValueError):
        sequence_entropy_partial(bern, coordinate_partition(bern, (0, 0)), SequencePlan(((0, 0),), strip), 2)


def test_full_entropy_bernoulli():
    strip = StripSpec.planar(F(1, 2), 2)
    alpha = coordinate_partition(bern, (0, 0))
    plan = construct_full_entropy_sequence(bern, [alpha], strip, 12)
    assert len(plan) == 12
    assert [p[0] for p in plan.points] == sorted({p[0] for p in plan.points})
    # tie-break: smallest first coordinate, then smallest second
    assert plan.points[0] == (0, -1)
    rep = sequence_entropy_partial(bern, alpha, plan, 12)
    assert rep.last().value == pytest.approx(LOG2, abs=1e-12)


def test_full_entropy_two_partitions():
    strip = StripSpec.planar(F(1, 3), 3)
    alphas = [coordinate_partition(third, (0, 0)), set_partition(third, cylinder(third, {(0, 0): 1, (0, 1): 1}))]
    plan = construct_full_entropy_sequence(third, alphas, strip, 6)
    for alpha in alphas:
        h = shannon_entropy(third, alpha)
        rep = sequence_entropy_partial(third, alpha, plan, 6)
        for row in rep.rows:
            slack = sum(2.0**-j for j in range(2, row.k + 1)) / row.k
            assert row.value >= h - slack - 1e-12


def test_full_entropy_exhausts_on_counterexample():
    beta = set_partition(cex, cylinder(cex, {(RIGHT, 0): 0}))
    with pytest.raises(SearchExhausted) as err:
        construct_full_entropy_sequence(cex, [beta], StripSpec.planar(-1, 1), 5, horizon=200)
    assert err.value.step == 2 and err.value.partial.points == ((0, 0),)


def test_full_entropy_trivial_partition():
    plan = construct_full_entropy_sequence(bern, [Partition((whole(bern),))], StripSpec.planar(0, 1), 4)
    assert plan.points == ((0, 0), (1, 0), (2, 0), (3, 0))


# -- property tests ------------------------------------------------------------------

cells = [((0, 0), (1, 0)), ((0, 0), (0, 1)), ((2, 1), (0, 0))]


@st.composite
def small_partitions(draw, system=third, max_atoms=3):
    """Random 2..max_atoms-atom partitions built from the cells of two coordinates."""
    keys = draw(st.sampled_from(cells))
    combos = [{keys[0]: a, keys[1]: b} for a in (0, 1) for b in (0, 1)]
    r = draw(st.integers(2, max_atoms))
    labels = draw(st.lists(st.integers(0, r - 1), min_size=4, max_size=4).filter(lambda l: len(set(l)) >= 2))
    atoms = []
    for lab in sorted(set(labels)):
        e = EventExpr()
        for c, l in zip(combos, labels):
            if l == lab:
                e = union(system, e, cylinder(system, c))
        atoms.append(e)
    return Partition(tuple(atoms))


plans = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=6)


@settings(max_examples=60, deadline=None)
@given(small_partitions(), plans)
def test_subadditivity_and_upper_bound(alpha, offsets):
    pts = tuple((i * 7 + 3 + d0, d1) for i, (d0, d1) in enumerate(offsets))
    strip = StripSpec.planar(0, 8)
    plan = SequencePlan(tuple((m, n) for m, n in pts), strip)
    h = shannon_entropy(third, alpha)
    rep = sequence_entropy_partial(third, alpha, plan, len(plan))
    assert all(v <= h + 1e-12 for v in rep.values)


@given(small_partitions(), st.tuples(st.integers(-9, 9), st.integers(-9, 9)))
def test_translation_invariance(alpha, w):
    assert shannon_entropy(third, translate_partition(third, alpha, w)) == shannon_entropy(third, alpha)
