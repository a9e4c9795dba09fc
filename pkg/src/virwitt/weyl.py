"""The localized Weyl algebra A = k[t, t^-1]<d> with d t = t d + 1, and the
modules N_x = k[t, t^-1, (t-x)^-1] / k[t, t^-1] with basis d^k delta_x."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .errors import DomainError, ParseError
from .exactalg import LaurentPoly, falling, format_terms, gbinom
from .grammar import parse_expression, parse_rational
from .liealg import VirElement
from .sympoisson import BPoly
from . import linalg


class WeylElement:
    """Normal-ordered sum of c * t^i d^k."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms: dict[tuple[int, int], Fraction] = {}
        if terms:
            for (i, k), c in terms.items():
                c = Fraction(c)
                if c:
                    if k < 0:
                        raise DomainError("negative power of d")
                    self.terms[(int(i), int(k))] = c

    @classmethod
    def const(cls, c) -> "WeylElement":
        return cls({(0, 0): c})

    @classmethod
    def t(cls, i: int = 1) -> "WeylElement":
        return cls({(i, 0): 1})

    @classmethod
    def d(cls, k: int = 1) -> "WeylElement":
        return cls({(0, k): 1})

    @classmethod
    def from_laurent(cls, f: LaurentPoly) -> "WeylElement":
        return cls({(i, 0): c for i, c in f.coeffs().items()})

    @classmethod
    def parse(cls, text: str) -> "WeylElement":
        """Products are read left to right, so ``d*t`` is ``t*d + 1``."""
        return parse_expression(text, {"t": cls.t(), "d": cls.d()}, cls.const)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = WeylElement.const(other)
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _coerce(self, other):
        if isinstance(other, WeylElement):
            return other
        if isinstance(other, (int, Fraction)):
            return WeylElement.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, 0) + c
        return WeylElement(out)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return WeylElement({m: c * other for m, c in self.terms.items()})
        if not isinstance(other, WeylElement):
            return NotImplemented
        return weyl_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) == 1:
                ((i, j), c), = self.terms.items()
                if j == 0:
                    return WeylElement({(i * k, 0): Fraction(1) / c ** (-k)})
            raise ValueError("only powers of t are invertible")
        out = WeylElement.const(1)
        for _ in range(k):
            out = weyl_mul(out, self)
        return out

    def order(self) -> int:
        return max((k for _, k in self.terms), default=-1)

    def d_slice(self, k: int) -> LaurentPoly:
        return LaurentPoly({i: c for (i, kk), c in self.terms.items() if kk == k})

    def __repr__(self):
        return f"WeylElement({self})"

    def __str__(self) -> str:
        def body(i, k):
            parts = []
            if i:
                parts.append("t" if i == 1 else f"t^{i}")
            if k:
                parts.append("d" if k == 1 else f"d^{k}")
            return "*".join(parts)

        keys = sorted(self.terms, key=lambda m: (-m[1], -m[0]))
        return format_terms((body(*m), self.terms[m]) for m in keys)


def weyl_mul(a: WeylElement, b: WeylElement) -> WeylElement:
    """(t^i d^k)(t^j d^l) = sum_m C(k, m) (j)_m t^(i+j-m) d^(k+l-m)."""
    out: dict[tuple[int, int], Fraction] = {}
    for (i, k), c1 in a.terms.items():
        for (j, l), c2 in b.terms.items():
            for m in range(k + 1):
                f = falling(j, m)
                if f == 0:
                    break
                coef = c1 * c2 * gbinom(k, m) * f
                key = (i + j - m, k + l - m)
                out[key] = out.get(key, 0) + coef
    return WeylElement(out)


def pi_gamma(u: VirElement, gamma) -> WeylElement:
    """f d/dt -> f d + gamma f'."""
    gamma = Fraction(gamma)
    if u.central:
        raise DomainError("the central element has no image in the Weyl algebra")
    out = {(i, 1): c for i, c in u.f.coeffs().items()}
    for i, c in u.f.derivative().coeffs().items():
        out[(i, 0)] = out.get((i, 0), 0) + gamma * c
    return WeylElement(out)


def pi_gamma_word(word: Sequence[VirElement], gamma) -> WeylElement:
    out = WeylElement.const(1)
    for u in word:
        out = weyl_mul(out, pi_gamma(u, gamma))
    return out


def to_d_left(a: WeylElement) -> dict[tuple[int, int], Fraction]:
    """Coefficients in the form sum c * d^k t^i.

    Uses t^j d^k = sum_m (-1)^m C(k, m) (j)_m d^(k-m) t^(j-m).
    """
    out: dict[tuple[int, int], Fraction] = {}
    for (j, k), c in a.terms.items():
        for m in range(k + 1):
            f = falling(j, m)
            if f == 0:
                break
            key = (j - m, k - m)
            out[key] = out.get(key, 0) + c * (-1) ** m * gbinom(k, m) * f
    return {key: v for key, v in out.items() if v}


def pi_image_test(a: WeylElement, which: int) -> bool:
    """Membership in the image of pi_0 (k + A d) or of pi_1 (k + d A)."""
    if which == 0:
        zero_slice = {i: c for (i, k), c in a.terms.items() if k == 0}
    elif which == 1:
        zero_slice = {i: c for (i, k), c in to_d_left(a).items() if k == 0}
    else:
        raise DomainError("image test is defined for gamma = 0 and gamma = 1")
    return all(i == 0 for i in zero_slice)


def normal_symbol(a: WeylElement) -> BPoly:
    """Replace d by y in the normal-ordered form."""
    return BPoly(dict(a.terms))


def top_symbol(a: WeylElement) -> BPoly:
    n = a.order()
    return BPoly({m: c for m, c in a.terms.items() if m[1] == n})


@dataclass(frozen=True)
class NVector:
    """sum_k coeffs[k] d^k delta_x in N_x, x != 0."""

    x: Fraction
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        x = Fraction(self.x)
        if x == 0:
            raise DomainError("N_x needs x != 0")
        c = [Fraction(v) for v in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def delta(cls, x, k: int = 0) -> "NVector":
        return cls(x, tuple([0] * k + [1]))

    @classmethod
    def from_json(cls, data) -> "NVector":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", data, exc.pos) from None
        if not isinstance(data, dict) or "x" not in data or "coeffs" not in data:
            raise ParseError("module vector needs 'x' and 'coeffs'")
        return cls(parse_rational(data["x"]), tuple(parse_rational(v) for v in data["coeffs"]))

    def to_json(self) -> dict:
        return {"x": str(self.x), "coeffs": [str(c) for c in self.coeffs]}

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "NVector") -> "NVector":
        if other.x != self.x:
            raise DomainError("vectors in different modules")
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return NVector(self.x, tuple(p + q for p, q in zip(a, b)))

    def scale(self, c) -> "NVector":
        return NVector(self.x, tuple(v * Fraction(c) for v in self.coeffs))

    def padded(self, n: int) -> list[Fraction]:
        return list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))


# principal part coordinates: {m: c} for c (t - x)^(-m), m >= 1;  d^k delta = (-1)^k k! (t-x)^(-k-1)

def _to_principal(v: NVector) -> dict[int, Fraction]:
    return {k + 1: c * (-1) ** k * factorial(k) for k, c in enumerate(v.coeffs) if c}


def _from_principal(x: Fraction, pp: dict[int, Fraction]) -> NVector:
    top = max((m for m, c in pp.items() if c), default=0)
    return NVector(x, tuple(pp.get(k + 1, 0) * (-1) ** k / factorial(k) for k in range(top)))


def weyl_act_N(a: WeylElement, v: NVector) -> NVector:
    x = v.x
    pp = _to_principal(v)
    out: dict[int, Fraction] = {}
    for (i, k), c in a.terms.items():
        cur = dict(pp)
        for _ in range(k):
            cur = {m + 1: -m * val for m, val in cur.items()}
        for m, val in cur.items():
            # t^i = sum_j C(i, j) x^(i-j) (t-x)^j; keep negative total powers
            for j in range(m):
                coef = gbinom(i, j) * x ** (i - j)
                if coef:
                    key = m - j
                    out[key] = out.get(key, 0) + c * val * coef
    return _from_principal(x, out)


def w_act_N_gamma(u: VirElement, v: NVector, gamma) -> NVector:
    return weyl_act_N(pi_gamma(u, gamma), v)


@dataclass(frozen=True)
class SpanResult:
    dimension: int
    reaches_delta: bool
    basis: tuple[NVector, ...]


def cyclic_span(v: NVector, gamma, degree_bound: int) -> SpanResult:
    """Span of W-words of length <= degree_bound applied to v (action pi_gamma).

    Fields (t - x)^j d/dt with j > (pole order) + 1 act by zero on a vector, so a
    finite generating set of W suffices at each step.
    """
    if degree_bound < 0:
        raise DomainError("degree_bound must be non-negative")
    x = v.x
    from .exactalg import T

    def width(vecs):
        return max((len(w.coeffs) for w in vecs), default=0)

    basis = [v] if not v.is_zero() else []
    frontier = list(basis)
    for _ in range(degree_bound):
        K = width(basis) + 1
        gens = [VirElement((T - x) ** j) for j in range(K + 2)]
        new = []
        for w in frontier:
            for g in gens:
                img = w_act_N_gamma(g, w, gamma)
                if not img.is_zero():
                    new.append(img)
        n = max(width(basis), width(new))
        red = linalg.SpanReducer([b.padded(n) for b in basis], n)
        added = []
        for w in new:
            r = red.reduce(w.padded(n))
            if any(r):
                added.append(w)
                red = linalg.SpanReducer([b.padded(n) for b in basis + added], n)
        if not added:
            break
        basis = basis + added
        frontier = added
    n = width(basis)
    red = linalg.SpanReducer([b.padded(n) for b in basis], n)
    delta = NVector.delta(x).padded(max(n, 1))
    reaches = red.contains(delta) if n else False
    return SpanResult(red.dim, reaches, tuple(basis))
