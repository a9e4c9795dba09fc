"""Finite-codimension subalgebras of W presented as W(f0) + span(generators).

Everything is computed in the finite-dimensional quotient k[t, t^-1] / (f0),
coordinatised by Taylor coefficients at the roots of f0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .errors import DomainError, ParseError
from .exactalg import FactoredPoly, LaurentPoly, T, as_laurent, gbinom
from .grammar import parse_rational
from .liealg import AlgebraTag, VirElement, vir_bracket
from . import linalg


@dataclass(frozen=True)
class SubalgebraPresentation:
    f0: FactoredPoly
    generators: tuple[LaurentPoly, ...] = ()
    tag: AlgebraTag = AlgebraTag.W

    def __post_init__(self):
        gens = tuple(g.f if isinstance(g, VirElement) else as_laurent(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if self.tag not in (AlgebraTag.W, AlgebraTag.VIR):
            raise DomainError(f"subalgebra presentations are supported for W and Vir, not {self.tag.value}")
        if any(x == 0 for x, _ in self.f0.roots):
            raise DomainError("f0 may not vanish at 0: t is a unit in k[t, t^-1]")
        if self.f0.degree == 0:
            raise DomainError("f0 must have positive degree")

    @classmethod
    def from_json(cls, data) -> "SubalgebraPresentation":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", data, exc.pos) from None
        if not isinstance(data, dict) or "f0" not in data:
            raise ParseError("subalgebra presentation needs 'f0'")
        gens = data.get("generators", [])
        if not isinstance(gens, list):
            raise ParseError("'generators' must be a list")
        return cls(
            FactoredPoly.from_json(data["f0"]),
            tuple(LaurentPoly.parse(g) for g in gens),
            AlgebraTag.parse(data.get("tag", "W")),
        )

    def to_json(self) -> dict:
        return {"f0": self.f0.to_json(), "generators": [str(g) for g in self.generators], "tag": self.tag.value}


def coords(p: LaurentPoly, f: FactoredPoly) -> list[Fraction]:
    """Image of p in k[t, t^-1]/(f): Taylor coefficients below each root multiplicity."""
    out: list[Fraction] = []
    for x, m in f.roots:
        out.extend(p.taylor(x, m - 1))
    return out


def _jet_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a[i] * b[k - i] for i in range(k + 1) if a[i]), Fraction(0)) for k in range(len(a))]


def _times_t(jet: Sequence[Fraction], x: Fraction) -> list[Fraction]:
    """Taylor jet at x of t * p, from that of p (t = x + (t - x))."""
    return [x * jet[0]] + [x * jet[k] + jet[k - 1] for k in range(1, len(jet))]


def _factor_jet(y: Fraction, e: int, x: Fraction, m: int) -> list[Fraction]:
    """Taylor coefficients of (t - y)^e at x, below order m."""
    return [gbinom(e, k) * (x - y) ** (e - k) if k <= e else Fraction(0) for k in range(m)]


class _Quotient:
    """The image of the subalgebra in k[t, t^-1]/(f0)."""

    def __init__(self, pres: SubalgebraPresentation):
        self.pres = pres
        self.f0 = pres.f0
        self.roots = pres.f0.roots
        self.dim = pres.f0.degree
        self.span = linalg.SpanReducer([coords(g, self.f0) for g in pres.generators], self.dim)

    def jets(self, p: LaurentPoly) -> list[list[Fraction]]:
        return [p.taylor(x, m - 1) for x, m in self.roots]

    def contains(self, p: LaurentPoly) -> bool:
        return self.span.contains(coords(p, self.f0))

    def contains_ideal(self, h) -> bool:
        """Whether h * k[t, t^-1] lies in the subalgebra; h is a Laurent polynomial or its jets."""
        jets = self.jets(h) if isinstance(h, LaurentPoly) else h
        # t is a unit mod f0, so h t^m for 0 <= m < deg f0 span h k[t, t^-1] mod f0
        for _ in range(self.dim):
            if not self.span.contains([c for j in jets for c in j]):
                return False
            jets = [_times_t(j, x) for j, (x, _) in zip(jets, self.roots)]
        return True

    @property
    def codim(self) -> int:
        return self.dim - self.span.dim


def _bracket(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b.derivative() - a.derivative() * b


def verify_subalgebra(pres: SubalgebraPresentation) -> bool:
    """Closure under the bracket, including brackets with W(f0)."""
    q = _Quotient(pres)
    gens = pres.generators
    for i, a in enumerate(gens):
        for b in gens[i + 1 :]:
            if not q.contains(_bracket(a, b)):
                return False
    # [g, f0 r] = g f0' r + f0 (g r' - g' r); the second summand lies in W(f0)
    df0 = q.jets(pres.f0.expand().derivative())
    for g in gens:
        if not q.contains_ideal([_jet_mul(a, b) for a, b in zip(q.jets(g), df0)]):
            return False
    return True


def codimension(pres: SubalgebraPresentation) -> int:
    return _Quotient(pres).codim


def minimal_f(pres: SubalgebraPresentation) -> FactoredPoly:
    """Monic f of least degree with W(f) inside the subalgebra."""
    q = _Quotient(pres)
    roots = q.roots
    candidates = sorted(product(*[range(m + 1) for _, m in roots]), key=lambda e: (sum(e), e))
    for exps in candidates:
        jets = []
        for x, m in roots:
            jet = [Fraction(1)] + [Fraction(0)] * (m - 1)
            for (y, _), e in zip(roots, exps):
                if e:
                    jet = _jet_mul(jet, _factor_jet(y, e, x, m))
            jets.append(jet)
        if q.contains_ideal(jets):
            return FactoredPoly([(x, e) for (x, _), e in zip(roots, exps)])
    raise AssertionError("f0 itself must satisfy W(f0) inside the subalgebra")


def support(pres: SubalgebraPresentation) -> list[Fraction]:
    """Points x with the subalgebra inside W(t - x)."""
    return [x for x, _ in minimal_f(pres).roots]


@dataclass(frozen=True)
class OnePointInvariants:
    d: int
    a: int
    ldeg: frozenset
    sdeg: frozenset
    x: Fraction | None = None
    basis: tuple = ()


def _local_rows(pres: SubalgebraPresentation, x: Fraction, a: int) -> list[list[Fraction]]:
    """Reduced echelon basis (pivots at lowest degree) of the image in k[[t-x]]/(t-x)^a."""
    rows = [g.taylor(x, a - 1) for g in pres.generators]
    red, _ = linalg.rref(rows) if rows else ([], [])
    return red


def one_point_invariants(pres: SubalgebraPresentation) -> OnePointInvariants:
    f = minimal_f(pres)
    if len(f.roots) != 1:
        raise DomainError(f"subalgebra is not supported at one point (support size {len(f.roots)})")
    (x, a), = f.roots
    d = codimension(pres)
    basis = _local_rows(pres, x, a)
    ns = sorted(next(k for k, v in enumerate(row) if v) for row in basis)
    ldeg = frozenset(n - 1 for n in ns)
    if a == d:
        sdeg = frozenset()
    else:
        sdeg = frozenset(g - 1 for g in range(1, a) if g not in ns)
    return OnePointInvariants(d, a, ldeg, sdeg, x, tuple(tuple(r) for r in basis))


@dataclass(frozen=True)
class ClassificationCode:
    code: str
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"code": self.code, "params": {k: (v.to_json() if isinstance(v, FactoredPoly) else str(v)) for k, v in self.params.items()}}

    def __str__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.code}[{inner}]"


# one-point families: code -> (a, reduced basis template as functions of (alpha, beta))
def _one_point_table():
    def row(a, entries):
        r = [Fraction(0)] * a
        for k, v in entries.items():
            r[k] = Fraction(v)
        return r

    return {
        "W^{2;1}": (3, lambda al, be: [row(3, {1: 1, 2: al})]),
        "W^{2;2}": (4, lambda al, be: [row(4, {1: 1, 3: al}), row(4, {2: 1})]),
        "W^{3C1}": (4, lambda al, be: [row(4, {2: 1, 3: al})]),
        "W^{3C2}": (4, lambda al, be: [row(4, {1: 1, 2: al, 3: be})]),
        "W^{3C3}": (5, lambda al, be: [row(5, {1: 1, 2: al, 4: be}), row(5, {3: 1, 4: -al})]),
        "W^{3C4}": (6, lambda al, be: [row(6, {1: 1, 2: al, 5: be}), row(6, {3: 1, 5: -al * al}), row(6, {4: 1, 5: -2 * al})]),
        "W^{3C5}": (5, lambda al, be: [row(5, {1: 1, 3: al, 4: be}), row(5, {2: 1, 4: al / 2})]),
    }


ONE_POINT_TABLE = _one_point_table()

_SDEG_CODE = {
    (2, frozenset({1})): "W^{2;1}",
    (2, frozenset({2})): "W^{2;2}",
    (3, frozenset({0, 2})): "W^{3C1}",
    (3, frozenset({1, 2})): "W^{3C2}",
    (3, frozenset({1, 3})): "W^{3C3}",
    (3, frozenset({1, 4})): "W^{3C4}",
    (3, frozenset({2, 3})): "W^{3C5}",
}

# which template entries carry alpha and beta
_PARAM_SLOTS = {
    "W^{2;1}": ((0, 2), None),
    "W^{2;2}": ((0, 3), None),
    "W^{3C1}": ((0, 3), None),
    "W^{3C2}": ((0, 2), (0, 3)),
    "W^{3C3}": ((0, 2), (0, 4)),
    "W^{3C4}": ((0, 2), (0, 5)),
    "W^{3C5}": ((0, 3), (0, 4)),
}


def _match_one_point(code: str, basis: Sequence[Sequence[Fraction]], x: Fraction) -> ClassificationCode:
    a, template = ONE_POINT_TABLE[code]
    (ra, ca), beta_slot = _PARAM_SLOTS[code]
    al = basis[ra][ca]
    be = basis[beta_slot[0]][beta_slot[1]] if beta_slot else Fraction(0)
    expect = template(al, be)
    if [list(r) for r in basis] != expect:
        raise DomainError(f"local basis does not match the {code} normal form")
    params = {"x": x, "alpha": al}
    if beta_slot:
        params["beta"] = be
    return ClassificationCode(code, params)


def _normalize_3a(al: Fraction, be: Fraction) -> tuple[Fraction, Fraction]:
    """(alpha, beta) are defined up to a common nonzero factor: scale the first nonzero to 1."""
    s = al if al != 0 else be
    return al / s, be / s


def classify(pres: SubalgebraPresentation) -> ClassificationCode:
    """Name of the subalgebra in the codimension <= 3 tables, with parameters."""
    if not verify_subalgebra(pres):
        raise DomainError("presentation is not closed under the bracket")
    d = codimension(pres)
    if d > 3:
        raise DomainError(f"codimension {d} is outside the classified range (at most 3)")
    f = minimal_f(pres)
    if d == f.degree:
        return ClassificationCode("W(f)", {"f": f})
    roots = f.roots
    if len(roots) == 1:
        inv = one_point_invariants(pres)
        code = _SDEG_CODE.get((d, inv.sdeg))
        if code is None or ONE_POINT_TABLE[code][0] != inv.a:
            raise DomainError(f"no table entry for codimension {d}, a = {inv.a}, sdeg = {sorted(inv.sdeg)}")
        return _match_one_point(code, inv.basis, inv.x)
    if len(roots) == 2 and d == 3:
        (x, ax), (y, ay) = roots
        if (ax, ay) == (2, 2):
            fx = (T - x) * (T - y)
            g = next(g for g in pres.generators if not linalg.SpanReducer([], f.degree).contains(coords(g, f)))
            dg = g.derivative()
            qx = dg(x) / (x - y)
            qy = dg(y) / (y - x)
            al = (qy - qx) / (y - x)
            be = qx - al * x
            if al * x + be == 0 or al * y + be == 0:
                raise DomainError("degenerate 3A parameters")
            al, be = _normalize_3a(al, be)
            return ClassificationCode("W^{3A}", {"x": x, "y": y, "alpha": al, "beta": be})
        if ax < ay:
            (x, ax), (y, ay) = (y, ay), (x, ax)
        if ay == 1 and ax in (3, 4):
            basis = _local_rows(pres, x, ax)
            code = "W^{3B1}" if ax == 3 else "W^{3B2}"
            inner = _match_one_point("W^{2;1}" if ax == 3 else "W^{2;2}", basis, x)
            return ClassificationCode(code, {"x": x, "y": y, "alpha": inner.params["alpha"]})
    raise DomainError(f"no table entry for codimension {d} with minimal f = {f}")


def crt_lift(f0: FactoredPoly, local: Mapping) -> LaurentPoly:
    """Polynomial of degree < deg f0 with prescribed Taylor coefficients at each root."""
    target: list[Fraction] = []
    for x, m in f0.roots:
        vals = list(local.get(x, [])) + [Fraction(0)] * m
        target.extend(Fraction(v) for v in vals[:m])
    D = f0.degree
    cols = [coords(LaurentPoly.monomial(k), f0) for k in range(D)]
    mat = [[cols[k][r] for k in range(D)] for r in range(D)]
    sol = linalg.solve(mat, target)
    if sol is None:
        raise AssertionError("CRT system is singular")
    return LaurentPoly({k: v for k, v in enumerate(sol)})


def _local_poly(x: Fraction, row: Sequence[Fraction]) -> LaurentPoly:
    u = T - x
    out = LaurentPoly()
    for k, v in enumerate(row):
        if v:
            out = out + u ** k * v
    return out


def generate(code: str, params: Mapping) -> SubalgebraPresentation:
    """Presentation of the table entry ``code`` with the given parameters."""
    p = {k: (v if isinstance(v, FactoredPoly) else Fraction(v)) for k, v in params.items()}
    if code == "W(f)":
        return SubalgebraPresentation(p["f"], ())
    if code in ONE_POINT_TABLE:
        a, template = ONE_POINT_TABLE[code]
        x = p["x"]
        rows = template(p.get("alpha", Fraction(0)), p.get("beta", Fraction(0)))
        return SubalgebraPresentation(FactoredPoly([(x, a)]), tuple(_local_poly(x, r) for r in rows))
    if code == "W^{3A}":
        x, y, al, be = p["x"], p["y"], p["alpha"], p["beta"]
        if x == y or al * x + be == 0 or al * y + be == 0:
            raise DomainError("3A needs x != y and alpha t + beta nonzero at x and y")
        f0 = FactoredPoly([(x, 2), (y, 2)])
        return SubalgebraPresentation(f0, ((T - x) * (T - y) * (T * al + be),))
    if code in ("W^{3B1}", "W^{3B2}"):
        x, y = p["x"], p["y"]
        a = 3 if code == "W^{3B1}" else 4
        inner = "W^{2;1}" if a == 3 else "W^{2;2}"
        rows = ONE_POINT_TABLE[inner][1](p["alpha"], Fraction(0))
        f0 = FactoredPoly([(x, a), (y, 1)])
        return SubalgebraPresentation(f0, tuple(crt_lift(f0, {x: r, y: [0]}) for r in rows))
    raise DomainError(f"unknown classification code {code!r}")


def ldeg_semigroup_check(inv: OnePointInvariants) -> bool:
    """For distinct l1, l2 in ldeg: l1 + l2 >= a - 1 or l1 + l2 lies in ldeg."""
    ls = sorted(inv.ldeg)
    for i, l1 in enumerate(ls):
        for l2 in ls[i + 1 :]:
            s = l1 + l2
            if s < inv.a - 1 and s not in inv.ldeg:
                return False
    return True


def gaps_bound_check(inv: OnePointInvariants) -> bool:
    """Gap bounds: g_i <= 2i - 1 when the first gap is 1, else g_i <= 2i + 1."""
    if inv.a <= inv.d:
        raise DomainError("gap bounds need a > d")
    gaps = sorted(s + 1 for s in inv.sdeg)
    if not gaps:
        return True
    slack = -1 if gaps[0] == 1 else 1
    return all(g <= 2 * i + slack for i, g in enumerate(gaps, start=1))


@dataclass(frozen=True)
class ZExpression:
    """z = sum coeff * [v_p, v_q] with v_p = f t^p d/dt + lambda_p z."""

    terms: tuple[tuple[Fraction, int, int], ...]

    def evaluate(self, f: LaurentPoly, lifts: Mapping[int, Fraction]) -> VirElement:
        total = VirElement(LaurentPoly(), 0, AlgebraTag.VIR)
        for c, p, q in self.terms:
            vp = VirElement(f.shift_degree(p), lifts.get(p, 0), AlgebraTag.VIR)
            vq = VirElement(f.shift_degree(q), lifts.get(q, 0), AlgebraTag.VIR)
            total = total + vir_bracket(vp, vq).scale(c)
        return total


def vir_express_z(f, lifts: Mapping[int, object] | None = None) -> ZExpression:
    """Write z as a combination of brackets of lifts v_p = f t^p d/dt + lambda_p z.

    ``lifts`` maps the available exponents p to lambda_p; by default p ranges over
    [-6, 6] with lambda_p = 0.
    """
    f = as_laurent(f)
    if f.is_zero():
        raise DomainError("f must be nonzero")
    if lifts is None:
        lifts = {p: 0 for p in range(-6, 7)}
    lifts = {int(p): parse_rational(v) if isinstance(v, str) else Fraction(v) for p, v in lifts.items()}
    avail = sorted(lifts)
    f2 = f * f
    z = VirElement(LaurentPoly(), 1, AlgebraTag.VIR)
    needed = None
    for e in sorted(f2.coeffs(), key=abs):
        dsum = 2 - e
        qs = [q for q in range(min(avail + [dsum]) - abs(dsum) - 4, max(avail + [dsum]) + abs(dsum) + 5) if 2 * q != dsum]
        pairs = [(q1, q2) for q1 in qs for q2 in qs if q1 < q2 and q1 + q2 != dsum]
        pairs.sort(key=lambda pr: (max(abs(pr[0]), abs(pr[1]), abs(dsum - pr[0]), abs(dsum - pr[1])), pr))
        for q1, q2 in pairs:
            want = {q1, q2, dsum - q1, dsum - q2}
            if not want <= set(avail):
                if needed is None:
                    needed = (dsum, q1, q2)
                continue
            c1 = Fraction(1, 2 * q1 - dsum)
            c2 = -Fraction(1, 2 * q2 - dsum)
            trial = ZExpression(((c1, dsum - q1, q1), (c2, dsum - q2, q2)))
            val = trial.evaluate(f, lifts)
            if val.f.is_zero() and val.central != 0:
                k = 1 / val.central
                expr = ZExpression(tuple((c * k, p, q) for c, p, q in trial.terms))
                if expr.evaluate(f, lifts) != z:
                    raise AssertionError("z expression failed to verify")
                return expr
    if needed is None:
        raise DomainError("no bracket combination produces z")
    dsum, q1, q2 = needed
    raise DomainError(
        f"insufficient range of p: need lifts for p in {sorted({q1, q2, dsum - q1, dsum - q2})} (d = {dsum}, q1 = {q1}, q2 = {q2})"
    )
