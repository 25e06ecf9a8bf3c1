from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from dirmix.lattice import DirectionVector, StripSpec, relative_density, strip_cardinality
from dirmix.mixing_analysis import (
    DensityCertificateError,
    UnsupportedKronecker,
    constant,
    correlation_average,
    extract_density_one_set,
    indicator,
    inner,
    integral,
    kvn_decompose,
    mean_ergodic_norm,
    observable_correlation_average,
    shifted_inner,
    wm_average,
)
from dirmix.partition_entropy import SearchExhausted, SequencePlan, construct_full_entropy_sequence, set_partition
from dirmix.scalar import sqrt
from dirmix.systems import (
    LEFT,
    RIGHT,
    Bernoulli2D,
    Counterexample,
    Rotation2D,
    box,
    cylinder,
    joint_measure,
    measure,
    product_system,
    rectangle,
    whole,
)

from oracles import l2_deviation_by_join, planar_strip_points

bern = Bernoulli2D((F(1, 2), F(1, 2)))
third = Bernoulli2D((F(1, 3), F(2, 3)))
cex = Counterexample()
B0 = cylinder(bern, {(0, 0): 0})
XB = cylinder(cex, {(RIGHT, 0): 0})
planar = StripSpec.planar


def test_correlation_whole_space_is_zero():
    rep = correlation_average(bern, whole(bern), B0, planar(F(1, 2), 2), 30)
    assert set(rep.exact_values) == {0}


def test_correlation_bernoulli_closed_form():
    strip = planar(F(1, 2), 2)
    rep = correlation_average(bern, B0, B0, strip, 200)
    assert [r.exact for r in rep.rows] == [F(1, 4) / strip_cardinality(strip, k) for k in range(1, 201)]
    # term-by-term oracle at k = 7
    pts = planar_strip_points(F(1, 2), 2, 7)
    terms = [abs(joint_measure(bern, B0, w, B0) - F(1, 4)) for w in pts]
    assert sum(terms) / len(pts) == rep.rows[6].exact


@pytest.mark.parametrize("width,value", [(F(1, 2), F(1, 4)), (1, F(1, 4)), (5, F(1, 20))])
def test_correlation_counterexample_constant(width, value):
    rep = correlation_average(cex, XB, XB, planar(-1, width), 120)
    assert set(rep.exact_values) == {value}
    pts = planar_strip_points(-1, width, 9)
    oracle = sum(abs(joint_measure(cex, XB, w, XB) - F(1, 4)) for w in pts) / len(pts)
    assert oracle == value


def test_correlation_counterexample_generic_direction_decays():
    rep = correlation_average(cex, XB, XB, planar(F(1, 3), 2), 400, stride=100)
    assert rep.last().value < 0.01
    assert rep.rows[0].value > rep.last().value


def test_observables():
    strip = planar(F(1, 3), 2)
    one = constant(bern, 1)
    g = indicator(B0) + indicator(cylinder(bern, {(1, 1): 1}), F(1, 3))
    assert set(observable_correlation_average(bern, one, g, strip, 40).exact_values) == {0}
    C = cylinder(bern, {(2, 1): 1, (0, 0): 0})
    f = indicator(B0) - constant(bern, measure(bern, B0))
    lhs = correlation_average(bern, B0, C, strip, 60).exact_values
    rhs = observable_correlation_average(bern, f, indicator(C), strip, 60).exact_values
    assert lhs == rhs


def test_observable_algebra():
    f = indicator(B0, 2) + indicator(B0, -2)
    assert f.is_zero()
    g = indicator(B0) - constant(bern, F(1, 2))
    assert integral(bern, g) == 0
    assert inner(bern, g, g) == F(1, 4)
    assert shifted_inner(bern, g, (1, 0), g) == 0
    assert integral(bern, g.scale(3)) == 0


def test_product_rectangles_decay():
    prod = product_system(bern, third)
    A = rectangle(prod, B0, cylinder(third, {(0, 0): 1}))
    f = indicator(A) - constant(prod, measure(prod, A))
    rep = observable_correlation_average(prod, f, f, planar(sqrt(2), 1), 300, stride=50)
    k_values = [(r.k, r.exact) for r in rep.rows]
    # only w = 0 contributes: value * #Lambda_k stays constant
    sq2 = planar(sqrt(2), 1)
    assert len({v * strip_cardinality(sq2, k) for k, v in k_values}) == 1


def test_density_one_bernoulli():
    strip = planar(F(1, 2), 2)
    q = extract_density_one_set(bern, B0, B0, strip, pmax=10, horizon=400)
    assert [p for p, _ in q.thresholds] == list(range(1, 11))
    lps = [lp for _, lp in q.thresholds]
    assert lps == sorted(lps)
    for p, lp in q.thresholds:
        for k in (lp, 2 * lp, 400):
            assert q.excluded_fraction(k) < F(1, p + 1)
    members = q.members(400)
    assert relative_density(members, strip, 400) == 1 - q.excluded_fraction(400)
    for w in members:
        if w[0] >= lps[-1]:
            assert abs(joint_measure(bern, B0, w, B0) - F(1, 4)) < F(1, 11)


def test_density_one_trivial_event():
    q = extract_density_one_set(bern, whole(bern), B0, planar(0, 1), pmax=4, horizon=64)
    assert q.excluded == []
    assert (5, 0) in q


def test_density_one_counterexample_fails():
    with pytest.raises(DensityCertificateError) as err:
        extract_density_one_set(cex, XB, XB, planar(-1, 1), pmax=10, horizon=256)
    assert err.value.failed_p == 3 and err.value.largest_certified == 2


def test_mean_ergodic_examples():
    strip = planar(0, 1)
    plan = SequencePlan(tuple((3 * i, 0) for i in range(8)), strip)
    rep = mean_ergodic_norm(bern, B0, plan, 8)
    assert rep.rows[0].exact == F(1, 2) - F(1, 4)
    assert [r.exact for r in rep.rows] == [F(1, 4 * n) for n in range(1, 9)]
    diag = SequencePlan(tuple((i, -i) for i in range(6)), planar(-1, 1))
    rep = mean_ergodic_norm(cex, XB, diag, 6)
    assert set(rep.exact_values) == {F(1, 4)}


@st.composite
def plan_and_event(draw):
    system = draw(st.sampled_from(["bern", "cex"]))
    n = draw(st.integers(1, 6))
    steps = draw(st.lists(st.integers(1, 3), min_size=n, max_size=n))
    ys = draw(st.lists(st.integers(-2, 2), min_size=n, max_size=n))
    ms = [sum(steps[: i + 1]) for i in range(n)]
    if system == "bern":
        sys = third
        e = cylinder(sys, draw(st.dictionaries(st.tuples(st.integers(-1, 1), st.integers(-1, 1)), st.sampled_from([0, 1]), min_size=1, max_size=2)))
    else:
        sys = cex
        keys = st.tuples(st.sampled_from([LEFT, RIGHT]), st.integers(-2, 2))
        e = cylinder(sys, draw(st.dictionaries(keys, st.sampled_from([0, 1]), min_size=1, max_size=2)))
    pts = tuple((m, y) for m, y in zip(ms, ys))
    return sys, e, SequencePlan(pts, planar(0, 5))


@settings(max_examples=40, deadline=None)
@given(plan_and_event())
def test_pair_correlation_identity(case):
    sys, e, plan = case
    rep = mean_ergodic_norm(sys, e, plan, len(plan))
    for row in rep.rows:
        assert row.exact == l2_deviation_by_join(sys, e, plan.points[: row.k])


def test_wm_average_examples():
    strip = planar(F(1, 2), 2)
    f = indicator(B0) - constant(bern, F(1, 2))
    g = indicator(cylinder(bern, {(1, 0): 1}))
    rep = wm_average(bern, f, g, strip, 100)
    assert rep.last().value < 0.01
    c = constant(bern, F(2, 3))
    assert set(wm_average(bern, c, constant(bern, 1), strip, 20).exact_values) == {F(2, 3)}
    h = indicator(XB) - constant(cex, F(1, 2))
    assert set(wm_average(cex, h, h, planar(-1, 1), 50).exact_values) == {F(1, 4)}


def test_kvn_bernoulli():
    f = indicator(B0, 3) + indicator(cylinder(bern, {(1, 2): 1}))
    kron, wm = kvn_decompose(bern, f, DirectionVector.of(sqrt(2)))
    assert kron == constant(bern, integral(bern, f))
    assert integral(bern, wm) == 0
    assert inner(bern, kron, wm) == 0


def test_kvn_counterexample():
    A = cylinder(cex, {(LEFT, 0): 1, (LEFT, 2): 0})
    B = cylinder(cex, {(RIGHT, 1): 1})
    AB = cylinder(cex, {(LEFT, 0): 1, (LEFT, 2): 0, (RIGHT, 1): 1})
    f = indicator(AB)
    kron, wm = kvn_decompose(cex, f, DirectionVector.of(-1))
    assert kron == indicator(B, measure(cex, A))
    assert wm == f - indicator(B, F(1, 4))
    # E(f | K) agrees with f against the generating family 1_{X x C}
    for C in [{(RIGHT, 1): 1}, {(RIGHT, 1): 0, (RIGHT, 0): 1}, {(RIGHT, -3): 0}]:
        h = indicator(cylinder(cex, C))
        assert inner(cex, kron, h) == inner(cex, f, h)
    assert inner(cex, kron, wm) == 0
    again, zero = kvn_decompose(cex, kron, DirectionVector.of(-1))
    assert again == kron and zero.is_zero()
    # along (1,1) the left factor is the invariant one
    kron2, _ = kvn_decompose(cex, f, DirectionVector.of(1))
    assert kron2 == indicator(A, measure(cex, B))


def test_kvn_unsupported():
    with pytest.raises(UnsupportedKronecker):
        kvn_decompose(cex, indicator(XB), DirectionVector.of(F(1, 3)))
    prod = product_system(bern, bern)
    with pytest.raises(UnsupportedKronecker):
        kvn_decompose(prod, constant(prod, 1), DirectionVector.of(0))


def test_kvn_rotation_and_nondecay():
    rot = Rotation2D((sqrt(2), sqrt(2) / 3))
    H = box(rot, (0, F(1, 2)), (0, 1))
    f = indicator(H) - constant(rot, F(1, 2))
    kron, wm = kvn_decompose(rot, f, DirectionVector.of(F(1, 3)))
    assert kron == f and wm.is_zero()
    rep = wm_average(rot, f, f, planar(F(1, 3), 2), 300, stride=100)
    # the half-arc self-correlation averages to 1/8, it does not decay
    assert all(abs(v - 0.125) < 0.01 for v in rep.values[1:])


rect_coords = st.integers(-3, 3)


@settings(max_examples=30, deadline=None)
@given(
    st.dictionaries(rect_coords, st.sampled_from([0, 1]), min_size=1, max_size=3),
    st.dictionaries(rect_coords, st.sampled_from([0, 1]), min_size=1, max_size=3),
    st.fractions(-2, 2, max_denominator=5),
)
def test_kvn_orthogonality(left, right, coef):
    cons = {(LEFT, i): s for i, s in left.items()}
    cons.update({(RIGHT, i): s for i, s in right.items()})
    f = indicator(cylinder(cex, cons), coef) + constant(cex, F(1, 3))
    kron, wm = kvn_decompose(cex, f, DirectionVector.of(-1))
    assert inner(cex, kron, wm) == 0
    assert integral(cex, kron) == integral(cex, f)


def test_characterizations_agree():
    for width in (F(1, 2), 1, 5):
        b_rep = correlation_average(bern, B0, B0, planar(F(1, 2), width), 300, stride=300)
        assert b_rep.last().value < 0.01
        c_rep = correlation_average(cex, XB, XB, planar(-1, width), 300, stride=300)
        assert c_rep.last().value >= F(1, 20)
    extract_density_one_set(bern, B0, B0, planar(F(1, 2), 2), pmax=10, horizon=300)
    construct_full_entropy_sequence(bern, [set_partition(bern, B0)], planar(F(1, 2), 2), 6)
    AX = cylinder(cex, {(LEFT, 0): 0})
    with pytest.raises(DensityCertificateError):
        extract_density_one_set(cex, AX, AX, planar(1, 1), pmax=10, horizon=300)
    with pytest.raises(SearchExhausted):
        construct_full_entropy_sequence(cex, [set_partition(cex, AX)], planar(1, 1), 4, horizon=100)
