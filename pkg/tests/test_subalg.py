from __future__ import annotations

import random
from fractions import Fraction

import pytest

from virwitt.errors import DomainError, ParseError
from virwitt.exactalg import FactoredPoly, LaurentPoly, T
from virwitt.liealg import AlgebraTag, VirElement, vir_bracket
from virwitt.subalg import (
    ONE_POINT_TABLE,
    OnePointInvariants,
    SubalgebraPresentation,
    classify,
    codimension,
    generate,
    gaps_bound_check,
    ldeg_semigroup_check,
    minimal_f,
    one_point_invariants,
    support,
    verify_subalgebra,
    vir_express_z,
)

from support import CODES, rand_code_params, same_params, rand_laurent, rand_nonzero, scramble

U = T - 1


def pres(roots, *gens):
    return SubalgebraPresentation(FactoredPoly(roots), tuple(gens))


def test_verify_examples():
    assert verify_subalgebra(pres([(1, 2)]))
    assert verify_subalgebra(pres([(1, 3)], U + U ** 2 * 5))
    assert verify_subalgebra(pres([(1, 3)], U))
    assert not verify_subalgebra(pres([(1, 3)], LaurentPoly.const(1), U ** 2))


def test_presentation_rules():
    with pytest.raises(DomainError):
        pres([(0, 2)])
    with pytest.raises(DomainError):
        SubalgebraPresentation(FactoredPoly([(1, 1)]), (), AlgebraTag.WGEQ_M1)
    with pytest.raises(ParseError):
        SubalgebraPresentation.from_json('{"generators": []}')


def test_minimal_f_and_support_examples():
    assert minimal_f(pres([(1, 3)], U ** 2)) == FactoredPoly([(1, 2)])
    assert minimal_f(generate("W^{2;1}", {"x": 1, "alpha": 2})) == FactoredPoly([(1, 3)])
    assert minimal_f(generate("W^{3C4}", {"x": 1, "alpha": 2, "beta": -1})) == FactoredPoly([(1, 6)])
    assert support(pres([(1, 1), (2, 1)])) == [1, 2]
    assert support(generate("W^{2;2}", {"x": 3, "alpha": 1})) == [3]


def test_one_point_invariant_examples():
    inv = one_point_invariants(generate("W^{2;1}", {"x": 2, "alpha": 1}))
    assert (inv.d, inv.a, inv.sdeg) == (2, 3, frozenset({1}))
    inv = one_point_invariants(generate("W^{3C5}", {"x": 2, "alpha": 1, "beta": 3}))
    assert (inv.a, inv.sdeg) == (5, frozenset({2, 3}))
    inv = one_point_invariants(pres([(4, 3)]))
    assert (inv.a, inv.d, inv.ldeg) == (3, 3, frozenset())
    with pytest.raises(DomainError):
        one_point_invariants(pres([(1, 1), (2, 1)]))


def test_classify_examples():
    c = classify(pres([(1, 3)], U + U ** 2 * 5))
    assert c.code == "W^{2;1}" and c.params == {"x": 1, "alpha": 5}
    c = classify(pres([(1, 1), (2, 1), (3, 1)]))
    assert c.code == "W(f)" and c.params["f"] == FactoredPoly([(1, 1), (2, 1), (3, 1)])
    c = classify(pres([(1, 2), (2, 2)], U * (T - 2) * (T + 1)))
    assert c.code == "W^{3A}" and c.params == {"x": 1, "y": 2, "alpha": 1, "beta": 1}
    c = classify(SubalgebraPresentation.from_json('{"f0":{"roots":[["1",3]]},"generators":["t - 2*t^2 + t^3"],"tag":"W"}'))
    assert c.code == "W(f)" and c.params["f"] == FactoredPoly([(1, 2)])


def test_classify_refusals():
    with pytest.raises(DomainError):
        classify(pres([(1, 4)]))
    with pytest.raises(DomainError):
        classify(pres([(1, 3)], LaurentPoly.const(1), U ** 2))


def test_every_table_row_is_closed_with_its_codimension():
    for code, (a, _) in ONE_POINT_TABLE.items():
        p = generate(code, {"x": 2, "alpha": Fraction(3, 2), "beta": -1})
        assert verify_subalgebra(p)
        inv = one_point_invariants(p)
        assert inv.a == a
        assert len(inv.sdeg) == inv.d - 1
        assert gaps_bound_check(inv)


@pytest.mark.parametrize("code", CODES)
def test_round_trip_through_scrambled_presentations(code):
    rng = random.Random(40 + CODES.index(code))
    for _ in range(15):
        params = rand_code_params(rng, code)
        base = generate(code, params)
        p = scramble(rng, base)
        assert verify_subalgebra(p)
        c = classify(p)
        assert c.code == code and same_params(code, c.params, params)
        f = minimal_f(p)
        assert f.divides(p.f0.expand())
        assert codimension(p) >= len(support(p))
        for g in p.generators:
            assert all(g(x) == 0 for x, _ in f.roots)
        if len(f.roots) == 1 and codimension(p) < f.degree:
            inv = one_point_invariants(p)
            assert ldeg_semigroup_check(inv) and gaps_bound_check(inv)
            assert inv.ldeg.isdisjoint(inv.sdeg)
            assert inv.ldeg | inv.sdeg == frozenset(range(inv.a - 1))


def test_semigroup_check_examples():
    assert ldeg_semigroup_check(OnePointInvariants(3, 4, frozenset({0}), frozenset({1, 2})))
    p = pres([(1, 6)], U, U ** 2)
    assert verify_subalgebra(p)
    inv = one_point_invariants(p)
    assert inv.ldeg == frozenset({0, 1}) and inv.a == 6
    assert ldeg_semigroup_check(inv)
    assert not ldeg_semigroup_check(OnePointInvariants(3, 6, frozenset({1, 2}), frozenset({0, 3, 4})))


def test_gaps_bound_examples():
    assert not gaps_bound_check(OnePointInvariants(3, 8, frozenset(), frozenset({1, 6})))
    assert gaps_bound_check(OnePointInvariants(2, 4, frozenset(), frozenset({2})))
    with pytest.raises(DomainError):
        gaps_bound_check(OnePointInvariants(3, 3, frozenset(), frozenset()))


def test_express_z_for_constant_field():
    z = VirElement(LaurentPoly(), 1, AlgebraTag.VIR)
    hand = vir_bracket(VirElement(T ** 3, 0, AlgebraTag.VIR), VirElement(T ** -1, 0, AlgebraTag.VIR)) + VirElement(T * 4, 0, AlgebraTag.VIR)
    assert hand.scale(Fraction(1, 12)) == z
    lifts = {p: 0 for p in range(-6, 7)}
    assert vir_express_z(1).evaluate(LaurentPoly.const(1), lifts) == z


def test_express_z_random_fields_and_lifts():
    rng = random.Random(31)
    z = VirElement(LaurentPoly(), 1, AlgebraTag.VIR)
    for _ in range(20):
        f = rand_laurent(rng, 0, 3)
        if f.is_zero():
            continue
        lifts = {p: rand_nonzero(rng) for p in range(-12, 13)}
        assert vir_express_z(f, lifts).evaluate(f, lifts) == z


def test_express_z_for_floors_of_generated_subalgebras():
    rng = random.Random(32)
    z = VirElement(LaurentPoly(), 1, AlgebraTag.VIR)
    for code in CODES:
        f = minimal_f(generate(code, rand_code_params(rng, code))).expand()
        lifts = {p: rand_nonzero(rng) for p in range(-14, 15)}
        assert vir_express_z(f, lifts).evaluate(f, lifts) == z


def test_express_z_reports_missing_range():
    with pytest.raises(DomainError, match="need lifts"):
        vir_express_z(T, {0: 0, 1: 0})
    with pytest.raises(DomainError):
        vir_express_z(0)
