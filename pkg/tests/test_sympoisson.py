from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from virwitt.errors import DomainError
from virwitt.exactalg import T
from virwitt.liealg import AlgebraTag, VirElement
from virwitt.localfn import LocalFunction, b_chi, gram_matrix, rank_b, window_basis
from virwitt.sympoisson import (
    BPoly,
    SymPoly,
    b_poisson,
    d_poisson_identity,
    det_D,
    ev_chi,
    i_n_vanishes_at,
    j_gamma_member,
    p_gamma_map,
    poisson_bracket,
)
from virwitt import linalg

from support import rand_one_point

rats = st.fractions(min_value=-5, max_value=5, max_denominator=3)
monos = st.lists(st.integers(-3, 3), min_size=0, max_size=2).map(lambda es: (tuple(sorted(es)), 0))
sympolys = st.dictionaries(monos, rats, max_size=3).map(SymPoly)
gammas = [Fraction(0), Fraction(1), Fraction(2), Fraction(-1, 2)]


def e(i):
    return SymPoly.gen(i)


def test_generator_bracket():
    assert poisson_bracket(e(1), e(2)) == e(3)
    assert poisson_bracket(e(2), e(-2), central=True) == e(0) * -4 + SymPoly.z() * 12
    assert str(SymPoly.parse("e_-1^2 + 3*e_0*e_1")) == "e_-1^2 + 3*e_0*e_1"


@settings(max_examples=50, deadline=None)
@given(sympolys, sympolys, sympolys)
def test_leibniz_and_jacobi(p, q, r):
    assert poisson_bracket(p, q * r) == poisson_bracket(p, q) * r + q * poisson_bracket(p, r)
    jac = poisson_bracket(p, poisson_bracket(q, r)) + poisson_bracket(q, poisson_bracket(r, p)) + poisson_bracket(r, poisson_bracket(p, q))
    assert jac.is_zero()


@pytest.mark.parametrize("gamma", gammas)
def test_p_gamma_is_a_poisson_map(gamma):
    for i in range(-4, 5):
        for j in range(-4, 5):
            lhs = p_gamma_map(poisson_bracket(e(i), e(j)), gamma)
            rhs = b_poisson(p_gamma_map(e(i), gamma), p_gamma_map(e(j), gamma))
            assert lhs == rhs


def test_b_bracket_convention():
    y, tt = BPoly({(0, 1): 1}), BPoly({(1, 0): 1})
    assert b_poisson(y, tt) == 1
    n, m, g = 2, -3, Fraction(5)
    got = b_poisson(p_gamma_map(e(n), g), p_gamma_map(e(m), g))
    assert got == BPoly({(m + n + 1, 1): m - n, (m + n, 0): g * (m + n + 1) * (m - n)})


def test_j_gamma_examples():
    assert j_gamma_member(SymPoly.parse("e_1^2 - e_0*e_2"), 0)
    assert not j_gamma_member(SymPoly.parse("e_1^2 - e_0*e_2"), 1)
    assert str(p_gamma_map(e(1), 2)) == "t^2*y + 4*t"


def test_evaluation_factors_through_p_gamma():
    rng = random.Random(7)
    for _ in range(10):
        chi = LocalFunction(AlgebraTag.W, (rand_one_point(rng, 1, AlgebraTag.W),))
        pt = chi.points[0]
        alpha, gamma = pt.coeffs[0], pt.coeffs[1]
        for text in ["e_1^2 - e_0*e_2", "e_-1*e_3 + 2*e_2", "e_-2^3"]:
            p = SymPoly.parse(text)
            assert ev_chi(p, chi) == p_gamma_map(p, gamma).evaluate(pt.x, alpha)


def test_ev_chi_on_brackets_is_b_chi():
    rng = random.Random(3)
    chi = LocalFunction(AlgebraTag.W, (rand_one_point(rng, 3, AlgebraTag.W),))
    for i in range(-2, 3):
        for j in range(-2, 3):
            u, v = VirElement.basis(i), VirElement.basis(j)
            assert ev_chi(poisson_bracket(e(i), e(j)), chi) == b_chi(chi, u, v)


def test_det_d_derivation_identity():
    us = [VirElement.basis(-1), VirElement.basis(1)]
    vs = [VirElement.basis(0), VirElement.basis(2)]
    for w in [VirElement.basis(1), VirElement(T ** 3 - T ** -1)]:
        lhs, rhs = d_poisson_identity(us, vs, w)
        assert lhs == rhs


def test_det_d_evaluates_to_gram_minor():
    rng = random.Random(11)
    chi = LocalFunction(AlgebraTag.WGEQ_M1, (rand_one_point(rng, 2),))
    basis = window_basis(chi)
    g = gram_matrix(chi, basis)
    rows, cols = [0, 2], [1, 3]
    d = det_D([basis[r] for r in rows], [basis[c] for c in cols])
    assert ev_chi(d, chi) == linalg.det([[g[r][c] for c in cols] for r in rows])


def test_i_n_vanishing_tracks_rank():
    rng = random.Random(5)
    for n in range(0, 5):
        chi = LocalFunction(AlgebraTag.WGEQ_M1, (rand_one_point(rng, n),))
        r = rank_b(chi)
        assert i_n_vanishes_at(chi, r)
        assert not i_n_vanishes_at(chi, r - 1)


def test_i_n_window_too_small():
    chi = LocalFunction.one_point(1, [0, 0, 1], AlgebraTag.W)
    with pytest.raises(DomainError):
        i_n_vanishes_at(chi, 1, window=(-1, 2))
