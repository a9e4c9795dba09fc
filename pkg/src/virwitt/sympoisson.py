"""Symmetric algebras with their Poisson brackets.

``SymPoly`` lives in S(W) (optionally with the central generator z),
``BPoly`` in k[t, t^-1, y] with {y, t} = 1.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .errors import DomainError, ParseError
from .exactalg import LaurentPoly, format_terms
from .grammar import parse_expression
from .liealg import AlgebraTag, VirElement, bracket, virasoro_cocycle

# monomial key: (sorted tuple of e-indices, power of z)
Mono = tuple[tuple[int, ...], int]

_ONE_MONO: Mono = ((), 0)


def _mono_mul(a: Mono, b: Mono) -> Mono:
    return (tuple(sorted(a[0] + b[0])), a[1] + b[1])


class SymPoly:
    """Polynomial in the generators e_i (= t^(i+1) d/dt) and z."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms: dict[Mono, Fraction] = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[(tuple(sorted(m[0])), m[1])] = c

    @classmethod
    def gen(cls, i: int) -> "SymPoly":
        return cls({((i,), 0): 1})

    @classmethod
    def z(cls) -> "SymPoly":
        return cls({((), 1): 1})

    @classmethod
    def const(cls, c) -> "SymPoly":
        return cls({_ONE_MONO: c})

    @classmethod
    def from_element(cls, u: VirElement) -> "SymPoly":
        terms = {((d - 1,), 0): c for d, c in u.f.coeffs().items()}
        if u.central:
            terms[((), 1)] = u.central
        return cls(terms)

    @classmethod
    def parse(cls, text: str) -> "SymPoly":
        def atom(name: str, pos: int):
            if name == "z":
                return cls.z()
            m = re.fullmatch(r"e_\{?(-?\d+)\}?", name)
            if m is None:
                raise ParseError(f"unknown symbol {name!r}", text, pos)
            return cls.gen(int(m.group(1)))

        return parse_expression(text, atom, cls.const)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SymPoly.const(other)
        if not isinstance(other, SymPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _coerce(self, other):
        if isinstance(other, SymPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return SymPoly.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, 0) + c
        return SymPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return SymPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SymPoly({m: c * other for m, c in self.terms.items()})
        if not isinstance(other, SymPoly):
            return NotImplemented
        out: dict[Mono, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return SymPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("SymPoly powers must be non-negative integers")
        out = SymPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def variables(self) -> set:
        vs: set = set()
        for (es, zp) in self.terms:
            vs.update(es)
            if zp:
                vs.add("z")
        return vs

    def partial(self, var) -> "SymPoly":
        """Derivative in the generator ``var`` (an index, or ``"z"``)."""
        out: dict[Mono, Fraction] = {}
        for (es, zp), c in self.terms.items():
            if var == "z":
                if zp:
                    m = (es, zp - 1)
                    out[m] = out.get(m, 0) + c * zp
                continue
            k = es.count(var)
            if k:
                lst = list(es)
                lst.remove(var)
                m = (tuple(lst), zp)
                out[m] = out.get(m, 0) + c * k
        return SymPoly(out)

    def substitute(self, images: Callable[[object], object], one):
        """Ring homomorphism given the image of every generator."""
        total = None
        cache: dict = {}

        def img(v):
            if v not in cache:
                cache[v] = images(v)
            return cache[v]

        for (es, zp), c in self.terms.items():
            term = one * c
            for e in es:
                term = term * img(e)
            for _ in range(zp):
                term = term * img("z")
            total = term if total is None else total + term
        return one * 0 if total is None else total

    def degree(self) -> int:
        return max((len(es) + zp for es, zp in self.terms), default=0)

    def __repr__(self):
        return f"SymPoly({self})"

    def __str__(self) -> str:
        def body(m: Mono) -> str:
            es, zp = m
            parts = []
            for i in sorted(set(es)):
                k = es.count(i)
                parts.append(f"e_{i}" if k == 1 else f"e_{i}^{k}")
            if zp:
                parts.append("z" if zp == 1 else f"z^{zp}")
            return "*".join(parts)

        keys = sorted(self.terms, key=lambda m: (-(len(m[0]) + m[1]), m))
        return format_terms((body(m), self.terms[m]) for m in keys)


def _generator_bracket(i, j, central: bool) -> SymPoly:
    if i == "z" or j == "z":
        return SymPoly()
    out = SymPoly({((i + j,), 0): j - i})
    if central:
        w = virasoro_cocycle(LaurentPoly.monomial(i + 1), LaurentPoly.monomial(j + 1))
        if w:
            out = out + SymPoly.z() * w
    return out


def poisson_bracket(p: SymPoly, q: SymPoly, central: bool = False) -> SymPoly:
    """Extension of the Lie bracket to S(W) (S(Vir) with ``central``) as a biderivation."""
    out = SymPoly()
    dq = {b: q.partial(b) for b in q.variables() if b != "z"}
    for a in p.variables():
        if a == "z":
            continue
        da = p.partial(a)
        for b, db in dq.items():
            gb = _generator_bracket(a, b, central)
            if not gb.is_zero():
                out = out + da * db * gb
    return out


class BPoly:
    """Element of k[t, t^-1, y]: map (t-degree, y-degree) -> coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms: dict[tuple[int, int], Fraction] = {}
        if terms:
            for (i, k), c in terms.items():
                c = Fraction(c)
                if c:
                    if k < 0:
                        raise DomainError("negative power of y")
                    self.terms[(int(i), int(k))] = c

    @classmethod
    def const(cls, c) -> "BPoly":
        return cls({(0, 0): c})

    @classmethod
    def parse(cls, text: str) -> "BPoly":
        return parse_expression(text, {"t": cls({(1, 0): 1}), "y": cls({(0, 1): 1})}, cls.const)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BPoly.const(other)
        if not isinstance(other, BPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _coerce(self, other):
        if isinstance(other, BPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return BPoly.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, 0) + c
        return BPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return BPoly({m: c * other for m, c in self.terms.items()})
        if not isinstance(other, BPoly):
            return NotImplemented
        out: dict = {}
        for (i1, k1), c1 in self.terms.items():
            for (i2, k2), c2 in other.terms.items():
                m = (i1 + i2, k1 + k2)
                out[m] = out.get(m, 0) + c1 * c2
        return BPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) == 1:
                ((i, j), c), = self.terms.items()
                if j == 0:
                    return BPoly({(i * k, 0): Fraction(1) / c ** (-k)})
            raise ValueError("only powers of t are invertible")
        out = BPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def d_t(self) -> "BPoly":
        return BPoly({(i - 1, k): c * i for (i, k), c in self.terms.items() if i})

    def d_y(self) -> "BPoly":
        return BPoly({(i, k - 1): c * k for (i, k), c in self.terms.items() if k})

    def evaluate(self, t, y) -> Fraction:
        t = Fraction(t)
        if t == 0 and any(i < 0 for i, _ in self.terms):
            raise DomainError("pole at t = 0")
        return sum((c * t ** i * Fraction(y) ** k for (i, k), c in self.terms.items()), Fraction(0))

    def __repr__(self):
        return f"BPoly({self})"

    def __str__(self) -> str:
        def body(i: int, k: int) -> str:
            parts = []
            if i:
                parts.append("t" if i == 1 else f"t^{i}")
            if k:
                parts.append("y" if k == 1 else f"y^{k}")
            return "*".join(parts)

        keys = sorted(self.terms, key=lambda m: (-m[1], -m[0]))
        return format_terms((body(*m), self.terms[m]) for m in keys)


def b_poisson(p: BPoly, q: BPoly) -> BPoly:
    """{P, Q} = P_y Q_t - P_t Q_y, so that {y, t} = 1."""
    return p.d_y() * q.d_t() - p.d_t() * q.d_y()


def p_gamma_image(i: int, gamma) -> BPoly:
    gamma = Fraction(gamma)
    return BPoly({(i + 1, 1): 1, (i, 0): gamma * (i + 1)})


def p_gamma_map(p: SymPoly, gamma) -> BPoly:
    """Algebra map S(W) -> B with e_i -> t^(i+1) y + gamma (i+1) t^i and z -> 0."""
    return p.substitute(lambda v: BPoly() if v == "z" else p_gamma_image(v, gamma), BPoly.const(1))


def j_gamma_member(p: SymPoly, gamma) -> bool:
    return p_gamma_map(p, gamma).is_zero()


def ev_chi(p: SymPoly, chi) -> Fraction:
    """Evaluate at the point ``chi`` of W*: e_i -> chi(e_i), z -> 0."""
    from .localfn import eval_local

    def image(v):
        if v == "z":
            return Fraction(0)
        return eval_local(chi, VirElement(LaurentPoly.monomial(v + 1), 0, chi.tag))

    return p.substitute(image, Fraction(1))


def _det(rows: list[list]) -> object:
    """Cofactor expansion with memoised minors; works over any commutative ring."""
    n = len(rows)
    if n == 0:
        return SymPoly.const(1)
    memo: dict = {}

    def minor(r: int, cols: tuple[int, ...]):
        if r == n:
            return None
        key = (r, cols)
        if key in memo:
            return memo[key]
        total = None
        for idx, c in enumerate(cols):
            entry = rows[r][c]
            if isinstance(entry, SymPoly) and entry.is_zero():
                continue
            rest = minor(r + 1, cols[:idx] + cols[idx + 1 :])
            term = entry if rest is None else entry * rest
            if idx % 2:
                term = -term
            total = term if total is None else total + term
        if total is None:
            total = rows[0][0] * 0
        memo[key] = total
        return total

    return minor(0, tuple(range(n)))


def det_D(us: Sequence[VirElement], vs: Sequence[VirElement]) -> SymPoly:
    """det of the matrix of brackets [u_i, v_j], read in S(W)."""
    if len(us) != len(vs):
        raise DomainError("det_D needs tuples of equal length")
    rows = [[SymPoly.from_element(bracket(u, v)) for v in vs] for u in us]
    return _det(rows)


def i_n_vanishes_at(chi, n: int, window: tuple[int, int] | None = None) -> bool:
    """Whether every generator D(u; v) of I(n) vanishes at ``chi``.

    The (n+1)-tuples range over the window basis of ``chi`` (see
    :func:`virwitt.localfn.window_basis`); ev_chi(D(u; v)) is the minor of the
    evaluated bracket matrix, so each minor is computed directly.
    """
    from .linalg import det
    from .localfn import gram_matrix, window_basis

    basis = window_basis(chi, window)
    if n < 0:
        raise DomainError("n must be non-negative")
    size = n + 1
    if size > len(basis):
        return True
    gram = gram_matrix(chi, basis)
    idx = range(len(basis))
    for rows in combinations(idx, size):
        sub = [gram[r] for r in rows]
        for cols in combinations(idx, size):
            if det([[row[c] for c in cols] for row in sub]) != 0:
                return False
    return True


def d_poisson_identity(us: Sequence[VirElement], vs: Sequence[VirElement], w: VirElement) -> tuple[SymPoly, SymPoly]:
    """Both sides of {D(u; v), w} = sum of D with one slot replaced by its bracket with w."""
    lhs = poisson_bracket(det_D(us, vs), SymPoly.from_element(w))
    rhs = SymPoly()
    for i in range(len(us)):
        us2 = list(us)
        us2[i] = bracket(us[i], w)
        rhs = rhs + det_D(us2, vs)
    for j in range(len(vs)):
        vs2 = list(vs)
        vs2[j] = bracket(vs[j], w)
        rhs = rhs + det_D(us, vs2)
    return lhs, rhs
