"""Series-engine tests: arithmetic, grading, truncation, serialization."""

from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from cubictheta.cyclonum import get_context, root_of_unity
from cubictheta.qlaurent import (
    ContextCapError,
    NotInvertibleError,
    PiGradeMismatchError,
    PiSeries,
    TruncationError,
    series_context,
    set_cyclo_order_cap,
    unify,
)

CTX = series_context(72, 72)
Q1 = series_context(1, 1)  # integer exponents, rational coefficients


def poly(coeffs: dict, order=50, grade=0, ctx=Q1) -> PiSeries:
    return PiSeries.from_exponent_map(ctx, grade, coeffs, order)


def rand_series(rng: random.Random, grade=0, ctx=Q1, order=18) -> PiSeries:
    terms = {}
    for _ in range(rng.randint(0, 6)):
        terms[rng.randint(-3, 12)] = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
    return poly(terms, order=order, grade=grade, ctx=ctx)


# -- add / mul ----------------------------------------------------------------


def test_add_zero_of_any_grade_unifies():
    f = poly({0: 1, 1: 2}, grade=3)
    z = PiSeries.zero(Q1, 7, 50)
    assert (f + z).equal_to_order(f).equal
    assert (f + z).pi_grade == 3


def test_add_cancellation():
    f = poly({0: 1, 1: 1})
    g = poly({0: 1, 1: -1})
    s = f + g
    assert s.items() == [(Fraction(0), get_context(1).from_rational(2))]


def test_add_grade_mismatch_raises():
    with pytest.raises(PiGradeMismatchError):
        poly({0: 1}, grade=1) + poly({0: 1}, grade=2)


def test_mul_geometric_inverse():
    order = 30
    f = poly({0: 1, 1: -1}, order=order)
    g = poly({n: 1 for n in range(order)}, order=order)
    assert (f * g).equal_to_order(PiSeries.one(Q1, order)).equal


def test_mul_exponent_bookkeeping_across_denominators():
    a = PiSeries.monomial(series_context(24, 1), Fraction(1, 24), order=10)
    b = PiSeries.monomial(series_context(8, 1), Fraction(1, 8), order=10)
    p = a * b
    assert p.lead_exponent == Fraction(1, 6)
    assert p.D == 24


def test_mul_grade_additivity():
    f = poly({1: 2}, grade=1)
    g = poly({2: 3}, grade=2)
    assert (f * g).pi_grade == 3


def test_mul_grade_additivity_randomized():
    rng = random.Random(11)
    for _ in range(300):
        ga, gb = rng.randint(-3, 3), rng.randint(-3, 3)
        f, g = rand_series(rng, grade=ga), rand_series(rng, grade=gb)
        assert (f * g).pi_grade == ga + gb


def test_ring_axioms_randomized():
    rng = random.Random(13)
    for _ in range(300):
        f, g, h = (rand_series(rng) for _ in range(3))
        assert ((f + g) + h).equal_to_order(f + (g + h)).equal
        assert (f * g).equal_to_order(g * f).equal
        assert ((f * g) * h).equal_to_order(f * (g * h)).equal
        lhs = f * (g + h)
        rhs = f * g + f * h
        # distributivity compared on the common knowledge bound
        bound = min(lhs.trunc, rhs.trunc)
        assert lhs.truncate(bound).equal_to_order(rhs.truncate(bound)).equal


# -- invert ---------------------------------------------------------------------


def test_invert_geometric():
    f = poly({0: 1, 1: -1}, order=25)
    g = f.invert()
    for n in range(20):
        assert g.coefficient(n) == 1


def test_invert_monomial():
    q = PiSeries.monomial(Q1, 1, order=10)
    qi = q.invert()
    assert qi.lead_exponent == -1
    assert (q * qi).coefficient(0) == 1


def test_invert_discriminant_like_against_long_division_oracle():
    # q * (1 - 24 q + 252 q^2 - 1472 q^3 + 4830 q^4), inverted two ways
    coeffs = [1, -24, 252, -1472, 4830]
    f = poly({n + 1: c for n, c in enumerate(coeffs)}, order=6)
    inv = f.invert()
    assert inv.lead_exponent == -1
    # oracle: long division 1 / (sum a_k q^k), a_0 = 1
    a = coeffs + [0] * 10
    b = [Fraction(1)]
    for n in range(1, 4):
        b.append(-sum(Fraction(a[k]) * b[n - k] for k in range(1, n + 1)))
    for n in range(4):
        assert inv.coefficient(n - 1) == b[n]


def test_invert_round_trip_randomized():
    rng = random.Random(17)
    done = 0
    while done < 100:
        f = rand_series(rng, order=16)
        if f.is_zero():
            continue
        p = f * f.invert()
        one = PiSeries.one(Q1, 1)
        assert p.equal_to_order(one.truncate(p.known_order)).equal
        assert f.invert().pi_grade == -f.pi_grade
        done += 1


def test_invert_zero_raises():
    with pytest.raises(NotInvertibleError):
        PiSeries.zero(Q1, 0, 10).invert()


def test_invert_trunc_bookkeeping():
    f = poly({2: 1, 3: -5}, order=10)  # lead exponent 2, known below 10
    g = f.invert()
    assert g.known_order == 10 - 2 * 2
    h = poly({-2: 1, 0: 3}, order=10)  # negative lead gains knowledge
    assert h.invert().known_order == 10 + 4


# -- theta_q ------------------------------------------------------------------------


def test_theta_q_examples():
    assert PiSeries.one(Q1, 10).theta_q().is_zero()
    s = PiSeries.monomial(CTX, Fraction(1, 24), order=10)
    t = s.theta_q()
    assert t.coefficient(Fraction(1, 24)) == Fraction(1, 24)
    assert t.pi_grade == s.pi_grade


def test_theta_q_leibniz_randomized():
    rng = random.Random(23)
    for _ in range(300):
        f, g = rand_series(rng), rand_series(rng)
        lhs = (f * g).theta_q()
        rhs = f.theta_q() * g + f * g.theta_q()
        assert lhs.equal_to_order(rhs).equal


# -- substitute_power -----------------------------------------------------------------


def test_substitute_identity_and_fractional():
    f = poly({0: 1, 1: -24, 3: 7}, order=12)
    assert f.substitute_power(1).equal_to_order(f).equal
    s = PiSeries.monomial(series_context(24, 1), Fraction(1, 24), order=5)
    t = s.substitute_power(Fraction(1, 3))
    assert t.lead_exponent == Fraction(1, 72)


def test_substitute_scales_knowledge_bound():
    f = poly({1: 5}, order=10)
    assert f.substitute_power(3).known_order == 30
    assert f.substitute_power(Fraction(1, 2)).known_order == 5


def test_substitute_is_ring_homomorphism_randomized():
    rng = random.Random(29)
    for _ in range(200):
        f, g = rand_series(rng), rand_series(rng)
        k = Fraction(rng.randint(1, 4), rng.randint(1, 3))
        assert (f * g).substitute_power(k).equal_to_order(
            f.substitute_power(k) * g.substitute_power(k)
        ).equal
        assert (f + g).substitute_power(k).equal_to_order(
            f.substitute_power(k) + g.substitute_power(k)
        ).equal


def test_substitute_chain_rule_with_theta_q():
    rng = random.Random(31)
    for _ in range(200):
        f = rand_series(rng)
        k = Fraction(rng.randint(1, 4), rng.randint(1, 3))
        lhs = f.substitute_power(k).theta_q()
        rhs = f.theta_q().substitute_power(k).scale(k)
        assert lhs.equal_to_order(rhs).equal


# -- scale --------------------------------------------------------------------------


def test_scale_identity_and_round_trip():
    f = poly({0: 2, 5: -3}, grade=1)
    assert f.scale(1, 0).equal_to_order(f).equal
    c = root_of_unity(6) + root_of_unity(66)  # sqrt 3
    g = f.scale(c, 1)
    assert g.pi_grade == 2
    back = g.scale(c.inverse(), -1)
    assert back.equal_to_order(f).equal and back.pi_grade == 1


def test_pow():
    f = poly({0: 1, 1: 1}, order=10)
    sq = f**2
    assert [sq.coefficient(n) for n in range(3)] == [1, 2, 1]
    one = f**0
    assert one.pi_grade == 0 and one.coefficient(0) == 1


# -- comparison and truncation ---------------------------------------------------------


def test_equal_to_order_reports_first_discrepancy():
    f = poly({0: 1, 2: 5, 7: 1}, order=20)
    g = poly({0: 1, 2: 4, 5: 2}, order=15)
    cmpres = f.equal_to_order(g)
    assert not cmpres.equal
    exp, lhs, rhs = cmpres.first_discrepancy
    assert exp == 2 and lhs == 5 and rhs == 4
    assert cmpres.order == 15
    assert f.equal_to_order(f).equal


def test_trunc_soundness_recompute_at_higher_order():
    rng = random.Random(37)
    for _ in range(100):
        big_f, big_g = rand_series(rng, order=30), rand_series(rng, order=30)
        small_f, small_g = big_f.truncate(12), big_g.truncate(12)
        for op in (lambda a, b: a * b, lambda a, b: a + b):
            lo = op(small_f, small_g)
            hi = op(big_f, big_g)
            assert hi.truncate(lo.known_order).equal_to_order(lo).equal


# -- context unification -----------------------------------------------------------------


def test_unify_lcm_of_denominators_and_orders():
    a = PiSeries.monomial(series_context(8, 4), Fraction(1, 8), order=3)
    b = PiSeries.monomial(series_context(12, 6), Fraction(1, 12), order=3)
    ua, ub = unify(a, b)
    assert ua.D == ub.D == 24
    assert ua.cyclo.order == ub.cyclo.order == 12
    assert (a * b).lead_exponent == Fraction(5, 24)


def test_unify_cap():
    set_cyclo_order_cap(100)
    try:
        a = PiSeries.monomial(series_context(1, 8), 0, order=3)
        b = PiSeries.monomial(series_context(1, 27), 0, order=3)
        with pytest.raises(ContextCapError):
            unify(a, b)
    finally:
        set_cyclo_order_cap(2520)


# -- coefficients and serialization ---------------------------------------------------------


def test_coefficient_off_grid_and_beyond_trunc():
    f = poly({0: 1}, order=5)
    assert f.coefficient(Fraction(1, 2)) == 0
    with pytest.raises(TruncationError):
        f.coefficient(5)


def test_json_round_trip_exact():
    f = PiSeries.from_exponent_map(
        CTX,
        2,
        {Fraction(-1, 8): root_of_unity(5), Fraction(1, 3): Fraction(22, 7)},
        order=4,
    )
    blob = json.dumps(f.to_json_dict())
    g = PiSeries.from_json_dict(json.loads(blob))
    assert g.pi_grade == f.pi_grade and g.trunc == f.trunc and g.D == f.D
    assert g.equal_to_order(f).equal
    assert "0.(" not in blob and "e-" not in blob  # no floats anywhere
