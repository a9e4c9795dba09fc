"""Random generators and independent sympy oracles shared by the tests."""

from __future__ import annotations

import random
from fractions import Fraction
from math import factorial

import sympy as sp

from virwitt.dloc import DLocElement
from virwitt.exactalg import Jet, LaurentPoly
from virwitt.liealg import AlgebraTag, VirElement
from virwitt.localfn import LocalFunction, OnePointLocal

t = sp.Symbol("t")


def rand_rat(rng: random.Random, lo: int = -5, hi: int = 5, den: int = 3) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def rand_nonzero(rng: random.Random, lo: int = -5, hi: int = 5, den: int = 3) -> Fraction:
    while True:
        v = rand_rat(rng, lo, hi, den)
        if v:
            return v


def rand_laurent(rng: random.Random, lo: int = -6, hi: int = 6, terms: int = 3) -> LaurentPoly:
    return LaurentPoly({rng.randint(lo, hi): rand_rat(rng) for _ in range(terms)})


def rand_one_point(rng: random.Random, n: int, tag: AlgebraTag = AlgebraTag.WGEQ_M1, x=None) -> OnePointLocal:
    if x is None:
        x = rand_nonzero(rng)
    coeffs = [rand_rat(rng) for _ in range(n)] + [rand_nonzero(rng)]
    return OnePointLocal(Fraction(x), tuple(coeffs), tag)


def rand_local(rng: random.Random, points: int, max_order: int, tag: AlgebraTag = AlgebraTag.WGEQ_M1) -> LocalFunction:
    xs: list[Fraction] = []
    while len(xs) < points:
        x = rand_nonzero(rng)
        if x not in xs:
            xs.append(x)
    return LocalFunction(tag, tuple(rand_one_point(rng, rng.randint(0, max_order), tag, x) for x in xs))


def rand_dloc(rng: random.Random, x, order: int) -> DLocElement:
    c = [Fraction(x), rand_nonzero(rng, -3, 3, 2)] + [rand_rat(rng, -3, 3, 2) for _ in range(order - 1)]
    return DLocElement(Jet(x, c))


def to_sympy(p: LaurentPoly):
    return sum((sp.Rational(c.numerator, c.denominator) * t ** d for d, c in p.coeffs().items()), sp.Integer(0))


def sym_rat(v) -> Fraction:
    v = sp.Rational(sp.simplify(v))
    return Fraction(int(v.p), int(v.q))


def oracle_eval(chi: OnePointLocal, f_expr) -> Fraction:
    """sum alpha_k f^(k)(x) by sympy differentiation."""
    total = Fraction(0)
    for k, a in enumerate(chi.coeffs):
        total += a * sym_rat(sp.diff(f_expr, t, k).subs(t, sp.Rational(chi.x.numerator, chi.x.denominator)))
    return total


def oracle_pullback(g: DLocElement, chi: OnePointLocal) -> OnePointLocal:
    """chi o E_s computed by sympy series of u(s)/s' for each basis field."""
    x = sp.Rational(g.x.numerator, g.x.denominator)
    n = chi.order
    s_expr = sum(sp.Rational(c.numerator, c.denominator) * (t - x) ** k for k, c in enumerate(g.s.c))
    ds = sp.diff(s_expr, t)
    vals = []
    for m in range(n + 1):
        field = (s_expr - x) ** m / ds
        ser = sp.series(field, t, x, n + 1).removeO()
        vals.append(oracle_eval(chi, ser) / factorial(m))
    return OnePointLocal(chi.x, tuple(vals), chi.tag)


def field(expr: str, tag: AlgebraTag = AlgebraTag.W) -> VirElement:
    return VirElement(LaurentPoly.parse(expr), 0, tag)


CODES = ["W(f)", "W^{2;1}", "W^{2;2}", "W^{3A}", "W^{3B1}", "W^{3B2}", "W^{3C1}", "W^{3C2}", "W^{3C3}", "W^{3C4}", "W^{3C5}"]
_TWO_PARAM = {"W^{3C2}", "W^{3C3}", "W^{3C4}", "W^{3C5}"}


def distinct_points(rng: random.Random, k: int) -> list[Fraction]:
    xs: list[Fraction] = []
    while len(xs) < k:
        x = rand_nonzero(rng)
        if x not in xs:
            xs.append(x)
    return xs


def rand_code_params(rng: random.Random, code: str) -> dict:
    """Random admissible parameters for a codimension <= 3 table entry."""
    from virwitt.exactalg import FactoredPoly

    if code == "W(f)":
        mults = rng.choice([[1], [2], [3], [1, 1], [2, 1], [1, 1, 1]])
        xs = distinct_points(rng, len(mults))
        return {"f": FactoredPoly(list(zip(xs, mults)))}
    if code == "W^{3A}":
        x, y = distinct_points(rng, 2)
        while True:
            al, be = rand_rat(rng), rand_rat(rng)
            if al * x + be != 0 and al * y + be != 0:
                return {"x": x, "y": y, "alpha": al, "beta": be}
    if code in ("W^{3B1}", "W^{3B2}"):
        x, y = distinct_points(rng, 2)
        return {"x": x, "y": y, "alpha": rand_rat(rng)}
    params = {"x": rand_nonzero(rng), "alpha": rand_rat(rng)}
    if code in _TWO_PARAM:
        params["beta"] = rand_rat(rng)
    return params


def scramble(rng: random.Random, pres):
    """Same subalgebra, different presentation: bigger floor, mixed generators, floor multiples added."""
    from virwitt.exactalg import FactoredPoly
    from virwitt.subalg import SubalgebraPresentation

    x, m = rng.choice(pres.f0.roots)
    extra = rng.randint(0, 2)
    roots = [(r, k + extra if r == x else k) for r, k in pres.f0.roots]
    f0 = FactoredPoly(roots)
    old = pres.f0.expand()
    gens = list(pres.generators) + [old.shift_degree(j) for j in range(extra)]
    mixed = []
    for i in range(len(gens)):
        g = gens[i] * rand_nonzero(rng)
        for j in range(i + 1, len(gens)):
            if rng.random() < 0.5:
                g = g + gens[j] * rand_rat(rng)
        mixed.append(g + old * rand_laurent(rng, -2, 2, 2))
    if mixed and rng.random() < 0.5:
        mixed.append(mixed[0] * rand_rat(rng) + old * rand_laurent(rng, -2, 2, 1))
    return SubalgebraPresentation(f0, tuple(mixed), pres.tag)


def same_params(code: str, got: dict, want: dict) -> bool:
    """Parameter equality; W^{3A} is symmetric in (x, y) and projective in (alpha, beta)."""
    if code == "W^{3A}":
        s = want["alpha"] if want["alpha"] != 0 else want["beta"]
        x, y = sorted((want["x"], want["y"]))
        want = dict(want, x=x, y=y, alpha=want["alpha"] / s, beta=want["beta"] / s)
    return got == want
