"""Local functions: finite sums of derivative evaluations of a vector field.

A one-point local function at ``x`` with weights ``alpha_0..alpha_n`` sends
``f d/dt`` to ``sum alpha_k f^(k)(x)``.  Its order is ``n`` (the last weight is
nonzero after normalization).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .errors import DomainError, ParseError
from .exactalg import Jet, LaurentPoly, T
from .grammar import parse_rational
from .liealg import AlgebraTag, VirElement
from . import linalg


def _forced_zero_weights(tag: AlgebraTag, x: Fraction) -> int:
    """Number of leading weights that see nothing: fields of the tag vanish to this order at x."""
    if x == 0 and tag.min_t_degree:
        return tag.min_t_degree
    return 0


@dataclass(frozen=True)
class OnePointLocal:
    x: Fraction
    coeffs: tuple[Fraction, ...]
    tag: AlgebraTag = AlgebraTag.W

    def __post_init__(self):
        x = Fraction(self.x)
        if x == 0 and self.tag.is_laurent:
            raise DomainError(f"base point 0 is not allowed for {self.tag.value}")
        c = [Fraction(a) for a in self.coeffs]
        for k in range(min(_forced_zero_weights(self.tag, x), len(c))):
            c[k] = Fraction(0)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def order(self) -> int:
        """Order n; -1 for the zero functional."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def on_jet(self, jet: Jet) -> Fraction:
        """Value on a field given by its jet at x (jet order >= n)."""
        total = Fraction(0)
        for k, a in enumerate(self.coeffs):
            if a:
                total += a * factorial(k) * jet[k]
        return total

    def dual_coords(self) -> list[Fraction]:
        """Coordinates on the dual basis e_{-1}^*..e_{n-1}^* of e_i(x) = (t-x)^(i+1) d/dt."""
        return [a * factorial(k) for k, a in enumerate(self.coeffs)]

    @classmethod
    def from_dual(cls, x, coords: Sequence, tag: AlgebraTag = AlgebraTag.W) -> "OnePointLocal":
        return cls(Fraction(x), tuple(Fraction(v) / factorial(k) for k, v in enumerate(coords)), tag)


@dataclass(frozen=True)
class LocalFunction:
    """Finite sum of one-point local functions at distinct base points."""

    tag: AlgebraTag
    points: tuple[OnePointLocal, ...] = field(default_factory=tuple)

    def __post_init__(self):
        merged: dict[Fraction, list[Fraction]] = {}
        for p in self.points:
            if p.tag is not self.tag:
                p = OnePointLocal(p.x, p.coeffs, self.tag)
            acc = merged.setdefault(p.x, [])
            for k, a in enumerate(p.coeffs):
                if k < len(acc):
                    acc[k] += a
                else:
                    acc.append(a)
        pts = []
        for x in sorted(merged):
            p = OnePointLocal(x, tuple(merged[x]), self.tag)
            if not p.is_zero():
                pts.append(p)
        object.__setattr__(self, "points", tuple(pts))

    @classmethod
    def one_point(cls, x, coeffs: Iterable, tag: AlgebraTag = AlgebraTag.W) -> "LocalFunction":
        return cls(tag, (OnePointLocal(Fraction(x), tuple(coeffs), tag),))

    @property
    def order(self) -> int:
        return max((p.order for p in self.points), default=-1)

    def is_zero(self) -> bool:
        return not self.points

    def __add__(self, other: "LocalFunction") -> "LocalFunction":
        if other.tag is not self.tag:
            raise DomainError("algebra tags differ")
        return LocalFunction(self.tag, self.points + other.points)

    def scale(self, c) -> "LocalFunction":
        c = Fraction(c)
        return LocalFunction(self.tag, tuple(OnePointLocal(p.x, tuple(a * c for a in p.coeffs), self.tag) for p in self.points))

    def to_json(self) -> dict:
        return {
            "tag": self.tag.value,
            "points": [{"x": str(p.x), "coeffs": [str(a) for a in p.coeffs]} for p in self.points],
            "central": "0",
        }

    def __str__(self) -> str:
        return json.dumps(self.to_json())


def parse_local_function(data) -> LocalFunction:
    """Build a LocalFunction from its JSON text or decoded dict."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", data, exc.pos) from None
    if not isinstance(data, dict):
        raise ParseError("local function must be a JSON object")
    try:
        tag = AlgebraTag.parse(data.get("tag", "W"))
        central = parse_rational(data.get("central", "0"))
        points = data.get("points", [])
        if not isinstance(points, list):
            raise ParseError("'points' must be a list")
        pts = []
        for i, p in enumerate(points):
            if not isinstance(p, dict) or "x" not in p or "coeffs" not in p:
                raise ParseError(f"point {i} needs 'x' and 'coeffs'")
            pts.append(OnePointLocal(parse_rational(p["x"]), tuple(parse_rational(a) for a in p["coeffs"]), tag))
    except (TypeError, AttributeError) as exc:
        raise ParseError(f"malformed local function: {exc}") from None
    if central != 0:
        raise DomainError("local functions vanish on the central element")
    return LocalFunction(tag, tuple(pts))


def eval_local(chi: LocalFunction, u: VirElement) -> Fraction:
    if u.tag is not chi.tag:
        raise DomainError(f"algebra tags differ: {chi.tag.value} vs {u.tag.value}")
    total = Fraction(0)
    for p in chi.points:
        total += p.on_jet(Jet(p.x, u.f.taylor(p.x, max(p.order, 0))))
    return total


def _bracket_jet(a: Jet, b: Jet) -> Jet:
    """Jet of f g' - f' g from jets of f and g (one order lost)."""
    n = min(a.order, b.order) - 1
    return a.truncate(n) * b.derivative().truncate(n) - a.derivative().truncate(n) * b.truncate(n)


def b_chi(chi: LocalFunction, u: VirElement, v: VirElement) -> Fraction:
    """B_chi(u, v) = chi([u, v]); the central part pairs to zero."""
    if not (u.tag is v.tag is chi.tag):
        raise DomainError("algebra tags differ")
    total = Fraction(0)
    for p in chi.points:
        n = p.order
        ju = Jet(p.x, u.f.taylor(p.x, n + 1))
        jv = Jet(p.x, v.f.taylor(p.x, n + 1))
        total += p.on_jet(_bracket_jet(ju, jv))
    return total


def window_basis(chi: LocalFunction, window: tuple[int, int] | None = None) -> list[VirElement]:
    """Fields spanning W modulo a subspace on which B_chi vanishes identically.

    Point x_j with order n_j contributes (t - x_j)^(i+1) h_j d/dt for i in the
    window, where h_j = prod over the other points (t - x_l)^(n_l + 2) (times the
    power of t the tag requires).  Different points give B_chi-orthogonal blocks.
    """
    if chi.is_zero():
        return []
    lo, hi = (-1, chi.order + 1) if window is None else window
    if lo > -1 or hi < chi.order + 1:
        raise DomainError(f"window [{lo}, {hi}] is too small; need [-1, {chi.order + 1}]")
    tag = chi.tag
    amb = tag.min_t_degree or 0
    out = []
    for j, p in enumerate(chi.points):
        h = LaurentPoly.const(1)
        for l, q in enumerate(chi.points):
            if l != j:
                h = h * (T - q.x) ** (q.order + 2)
        start = lo
        if p.x == 0 and amb:
            start = max(lo, amb - 1)
        else:
            h = h * T ** amb
        for i in range(start, hi + 1):
            out.append(VirElement((T - p.x) ** (i + 1) * h, 0, tag))
    return out


def gram_matrix(chi: LocalFunction, basis: Sequence[VirElement]) -> list[list[Fraction]]:
    """Matrix of B_chi on ``basis`` via jets at each base point."""
    jets = [[Jet(p.x, u.f.taylor(p.x, p.order + 1)) for p in chi.points] for u in basis]
    m = len(basis)
    g = [[Fraction(0)] * m for _ in range(m)]
    for a in range(m):
        for b in range(a + 1, m):
            val = Fraction(0)
            for k, p in enumerate(chi.points):
                val += p.on_jet(_bracket_jet(jets[a][k], jets[b][k]))
            g[a][b] = val
            g[b][a] = -val
    return g


def rank_b(chi: LocalFunction) -> int:
    """Rank of the alternating form B_chi."""
    basis = window_basis(chi)
    return linalg.rank(gram_matrix(chi, basis)) if basis else 0


def order_partition(chi: LocalFunction) -> tuple[int, ...]:
    return tuple(sorted((p.order for p in chi.points), reverse=True))


def isotropy_window(chi: LocalFunction, window: tuple[int, int] | None = None) -> list[VirElement]:
    """Basis of the radical of B_chi inside the window span."""
    basis = window_basis(chi, window)
    if not basis:
        return []
    out = []
    for vec in linalg.nullspace(gram_matrix(chi, basis), len(basis)):
        f = LaurentPoly()
        for c, u in zip(vec, basis):
            if c:
                f = f + u.f * c
        out.append(VirElement(f, 0, chi.tag))
    return out


def locality_sequence(chi: LocalFunction, f: LaurentPoly, count: int) -> list[Fraction]:
    """chi(f t^i d/dt) for i = 0..count-1."""
    return [eval_local(chi, VirElement(f.shift_degree(i), 0, chi.tag)) for i in range(count)]


def berlekamp_massey(seq: Sequence[Fraction]) -> list[Fraction]:
    """Shortest connection polynomial C (C[0] = 1) with sum_i C[i] s[n-i] = 0 for n >= len(C)-1."""
    s = [Fraction(v) for v in seq]
    c = [Fraction(1)]
    b = [Fraction(1)]
    length = 0
    shift = 1
    last = Fraction(1)
    for n in range(len(s)):
        d = s[n]
        for i in range(1, length + 1):
            d += c[i] * s[n - i]
        if d == 0:
            shift += 1
            continue
        coef = d / last
        new_c = c + [Fraction(0)] * max(0, len(b) + shift - len(c))
        for i, bi in enumerate(b):
            new_c[i + shift] -= coef * bi
        if 2 * length <= n:
            b, last, length, shift = c, d, n + 1 - length, 1
        else:
            shift += 1
        c = new_c
    c = c + [Fraction(0)] * (length + 1 - len(c))
    return c[: length + 1]


def recurrence_detect(seq: Sequence, dmax: int) -> LaurentPoly | None:
    """Minimal monic h = sum h_k t^k with sum h_k s_{m+k} = 0 for all m, if deg h <= dmax.

    Needs at least 2*dmax + 2 terms.  Minimality is certified by a nonsingular
    Hankel block of size deg h.
    """
    seq = [parse_rational(v) if isinstance(v, str) else Fraction(v) for v in seq]
    if dmax < 0:
        raise DomainError("dmax must be non-negative")
    if len(seq) < 2 * dmax + 2:
        raise DomainError(f"need at least {2 * dmax + 2} terms for dmax = {dmax}, got {len(seq)}")
    c = berlekamp_massey(seq)
    length = len(c) - 1
    if length > dmax:
        return None
    h = LaurentPoly({length - i: ci for i, ci in enumerate(c)})
    for m in range(len(seq) - length):
        if sum(h[k] * seq[m + k] for k in range(length + 1)) != 0:
            return None
    if length and linalg.det([[seq[i + j] for j in range(length)] for i in range(length)]) == 0:
        raise AssertionError("recurrence minimality certificate failed")
    return h


@dataclass(frozen=True)
class PrimitiveDescriptor:
    """Order partition together with one rational invariant per odd-order point."""

    partition: tuple[int, ...]
    invariants: tuple[tuple[int, Fraction], ...]
    zero_component: tuple | None = None
