from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from virwitt.errors import DomainError, ParseError
from virwitt.exactalg import Dual, FactoredPoly, Jet, LaurentPoly, T, residue0, skew_residue_form, taylor_jet
from virwitt import linalg

from support import sym_rat, t, to_sympy

rats = st.fractions(min_value=-20, max_value=20, max_denominator=6)
laurents = st.dictionaries(st.integers(-6, 6), rats, max_size=5).map(LaurentPoly)


def test_parse_and_print():
    p = LaurentPoly.parse("3*t^-2 + t - 5/2")
    assert p.coeffs() == {-2: 3, 1: 1, 0: Fraction(-5, 2)}
    assert str(p) == "t - 5/2 + 3*t^-2"
    assert str(LaurentPoly()) == "0"
    assert LaurentPoly.parse("-(t - 1)^2") == -(T - 1) ** 2


@given(laurents)
def test_print_parse_roundtrip(p):
    assert LaurentPoly.parse(str(p)) == p


@pytest.mark.parametrize(
    "text,pos",
    [("3*t^", 4), ("t + * 2", 4), ("x + 1", 0), ("1/0", 2), ("t $ 2", 2), ("(t + 1", 6)],
)
def test_parse_errors_report_position(text, pos):
    with pytest.raises(ParseError) as info:
        LaurentPoly.parse(text)
    assert info.value.position == pos


def test_residue():
    assert residue0(LaurentPoly.parse("3*t^-1 + t^-2 + 5")) == 3
    assert residue0(LaurentPoly.parse("t^2")) == 0


@settings(max_examples=60, deadline=None)
@given(laurents, st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(lambda v: v != 0), st.integers(0, 5))
def test_taylor_matches_sympy(p, x, order):
    expr = to_sympy(p)
    xs = sp.Rational(x.numerator, x.denominator)
    want = [sym_rat(sp.diff(expr, t, k).subs(t, xs) / sp.factorial(k)) for k in range(order + 1)]
    assert p.taylor(x, order) == want


def test_taylor_rejects_pole_at_zero():
    with pytest.raises(DomainError):
        LaurentPoly.parse("t^-1").taylor(0, 2)


@given(laurents, laurents)
def test_ring_axioms(a, b):
    assert a * b == b * a
    assert (a + b).derivative() == a.derivative() + b.derivative()
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


@pytest.mark.parametrize(
    "text,x",
    [("t^3 - 2*t + 1", Fraction(1)), ("-23/4*t^-1 + 7*t^-4", Fraction(4)), ("t^5 + 3*t^-2", Fraction(-1, 2)), ("2 - t^-3 + t^2", Fraction(3))],
)
def test_jet_composition_matches_polynomial_composition(text, x):
    p = LaurentPoly.parse(text)
    # s(t) = x + 2(t-x) - (t-x)^2 + 3(t-x)^3
    u = T - x
    s = x + u * 2 - u ** 2 + u ** 3 * 3
    order = 5
    comp = to_sympy(p).subs(t, to_sympy(s))
    xs = sp.Rational(x.numerator, x.denominator)
    want = []
    d = comp
    for k in range(order + 1):
        want.append(sym_rat(d.subs(t, xs) / sp.factorial(k)))
        d = sp.diff(d, t)
    got = taylor_jet(p, x, order).compose(taylor_jet(s, x, order))
    assert list(got.c) == want


def test_jet_reciprocal_and_derivative():
    j = Jet(1, [2, 1, 0, 5])
    assert (j * j.reciprocal()).c == (1, 0, 0, 0)
    assert j.derivative().c == (1, 0, 15)
    with pytest.raises(DomainError):
        Jet(1, [0, 1]).reciprocal()
    with pytest.raises(DomainError):
        Jet(1, [3]).derivative()


def test_jet_to_laurent_roundtrip():
    j = Jet(Fraction(1, 2), [1, -2, 3])
    assert taylor_jet(j.to_laurent(), Fraction(1, 2), 2) == j


def test_factored_poly():
    f = FactoredPoly([(1, 2), (2, 1)])
    assert f.expand() == (T - 1) ** 2 * (T - 2)
    assert f.degree == 3
    assert f.radical() == FactoredPoly([(1, 1), (2, 1)])
    assert f.divides((T - 1) ** 3 * (T - 2) * T ** -4)
    assert not f.divides((T - 1) * (T - 2))
    assert FactoredPoly.from_json(f.to_json()) == f
    assert FactoredPoly([(0, 2)]).divides(T ** 5 * 0 + T, units_t=True)
    assert not FactoredPoly([(0, 2)]).divides(T, units_t=False)


def test_skew_form_square_radical():
    # a = 1/g for g = 1 + t, truncated deep enough, pairs to zero against f = g^2
    g = 1 + T
    f = g * g
    a_trunc = LaurentPoly({k: (-1) ** k for k in range(0, 25)})
    for m in range(-8, 9):
        assert skew_residue_form(a_trunc, T ** m, f) == 0
    assert skew_residue_form(T ** -1, T ** 3, T ** 2) == 0


def test_skew_form_nonsquare_is_nondegenerate_on_window():
    f = T
    gram = [[skew_residue_form(T ** i, T ** m, f) for m in range(-8, 9)] for i in range(-5, 6)]
    assert linalg.rank(gram) == 11


def test_dual_numbers():
    h = Dual(0, 1)
    assert h * h == 0
    x = Dual(2, 1)
    assert (1 / x) * x == 1
    p = LaurentPoly.parse("t^3 + t^-1")
    v = p(x)
    assert v.a == p(2) and v.b == p.derivative()(2)


def test_linalg_basics():
    m = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert linalg.rank(m) == 2
    ns = linalg.nullspace(m)
    assert len(ns) == 1
    assert all(sum(Fraction(a) * b for a, b in zip(row, ns[0])) == 0 for row in m)
    assert linalg.det([[1, 2], [3, 4]]) == -2
    assert linalg.solve([[1, 1], [1, -1]], [3, 1]) == [2, 1]
    assert linalg.solve([[1, 1], [1, 1]], [1, 2]) is None
