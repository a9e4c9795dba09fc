"""Formal coordinate changes fixing a point, and their action on local functions.

A ``DLocElement`` is a jet ``s`` at ``x`` with ``s(x) = x`` and ``s'(x) != 0``.
It acts on vector fields by ``f d/dt -> f(s) / s' d/dt`` and on local
functions by pullback, ``(g . chi)(u) = chi(g . u)``, so that
``act(g, act(h, chi)) = act(g o h, chi)`` with ``(g o h)(t) = g(h(t))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .errors import DomainError
from .exactalg import Dual, Jet, LaurentPoly, T
from .liealg import AlgebraTag, VirElement
from .localfn import LocalFunction, OnePointLocal, PrimitiveDescriptor, eval_local, _bracket_jet


@dataclass(frozen=True)
class DLocElement:
    s: Jet

    def __post_init__(self):
        if self.s.order < 1:
            raise DomainError("coordinate change needs a jet of order >= 1")
        if self.s[0] != self.s.x:
            raise DomainError("coordinate change must fix its base point")
        if self.s[1] == 0:
            raise DomainError("coordinate change must have nonzero derivative at its base point")

    @property
    def x(self) -> Fraction:
        return self.s.x

    @property
    def order(self) -> int:
        return self.s.order

    @classmethod
    def identity(cls, x, order: int) -> "DLocElement":
        return cls(Jet.identity(x, order))

    @classmethod
    def dilation(cls, x, lam, order: int) -> "DLocElement":
        """t - x -> lam (t - x)."""
        c = [Fraction(0)] * (order + 1)
        c[0] = Fraction(x)
        c[1] = Fraction(lam)
        return cls(Jet(x, c))

    @classmethod
    def elementary(cls, x, a, j: int, order: int) -> "DLocElement":
        """t -> t + a (t - x)^(j+1), j >= 1."""
        if j < 1:
            raise DomainError("elementary step needs j >= 1")
        c = list(Jet.identity(x, order).c)
        if j + 1 <= order:
            c[j + 1] = Fraction(a)
        return cls(Jet(x, c))

    @classmethod
    def from_poly(cls, x, p: LaurentPoly, order: int) -> "DLocElement":
        return cls(Jet(x, p.taylor(Fraction(x), order)))

    def compose(self, other: "DLocElement") -> "DLocElement":
        """self o other, i.e. t -> self(other(t))."""
        return DLocElement(self.s.compose(other.s))

    def inverse(self) -> "DLocElement":
        ident = Jet.identity(self.x, self.order)
        inv1 = 1 / self.s[1]
        r = ident
        for _ in range(self.order):
            r = r - (self.s.compose(r) - ident) * inv1
        return DLocElement(r)


def act_on_field(g: DLocElement, u: Jet) -> Jet:
    """Jet of E_s(u) = u(s) / s'; the result has order min(u.order, g.order - 1)."""
    if u.x != g.x:
        raise DomainError("field jet and coordinate change at different points")
    n = min(u.order, g.order - 1)
    if n < 0:
        raise DomainError("order underflow")
    s = g.s.truncate(n + 1)
    return u.truncate(n).compose(s.truncate(n)) * s.derivative().reciprocal()


def _pullback_coords(beta: Sequence, s: Jet, n: int) -> list:
    """Dual coordinates of chi o E_s from those of chi (both over e_{-1}..e_{n-1})."""
    sig = Jet(s.x, [0] + list(s.c[1 : n + 1])) if n >= 1 else Jet(s.x, [0])
    r = s.truncate(n + 1).derivative().reciprocal() if n >= 0 else None
    # sigma is sparse for the elementary steps of canonicalize, so multiply by its nonzero terms only
    sig_nz = [(i, v) for i, v in enumerate(sig.c) if v != 0]
    live = [k for k in range(n + 1) if beta[k] != 0]
    out = []
    p = list(r.c) if r is not None else []
    for m in range(n + 1):
        val = 0
        for k in live:
            if k >= m:
                val = val + beta[k] * p[k]
        out.append(val)
        if m < n:
            # sigma^m r vanishes below index m
            nxt = [0] * (m + 1)
            for k in range(m + 1, n + 1):
                acc = 0
                for i, v in sig_nz:
                    if i > k - m:
                        break
                    acc = acc + v * p[k - i]
                nxt.append(acc)
            p = nxt
    return out


def _component(chi, x=None) -> OnePointLocal:
    if isinstance(chi, OnePointLocal):
        return chi
    if len(chi.points) == 0:
        if x is None:
            raise DomainError("zero functional has no base point")
        return OnePointLocal(x, (), chi.tag)
    if len(chi.points) != 1:
        raise DomainError("coordinate changes act on functionals supported at one point")
    return chi.points[0]


def act_on_local(g: DLocElement, chi):
    """Pullback g . chi; accepts a OnePointLocal or a one-point LocalFunction."""
    p = _component(chi, g.x)
    if p.is_zero():
        return chi
    if p.x != g.x:
        raise DomainError(f"functional at {p.x} but coordinate change at {g.x}")
    n = p.order
    if n > g.order - 1:
        raise DomainError(f"coordinate change of order {g.order} cannot act on order {n}")
    coords = _pullback_coords(p.dual_coords(), g.s, n)
    q = OnePointLocal.from_dual(p.x, coords, p.tag)
    return q if isinstance(chi, OnePointLocal) else LocalFunction(chi.tag, (q,))


def xi_action(s, chi: LocalFunction) -> LocalFunction:
    """(s d/dt) . chi, where (u . chi)(v) = chi([u, v])."""
    s = s.f if isinstance(s, VirElement) else s
    pts = []
    for p in chi.points:
        n = p.order + 1
        js = Jet(p.x, s.taylor(p.x, n + 1))
        vals = []
        for m in range(n + 1):
            e = Jet(p.x, [1 if k == m else 0 for k in range(n + 2)])
            vals.append(p.on_jet(_bracket_jet(js, e)) / factorial(m))
        pts.append(OnePointLocal(p.x, tuple(vals), chi.tag))
    return LocalFunction(chi.tag, tuple(pts))


def xi_action_dual(s, chi) -> LocalFunction:
    """Derivative at h = 0 of the pullback by t -> t + h s, in dual numbers; needs s(x) = 0."""
    s = s.f if isinstance(s, VirElement) else s
    p = _component(chi)
    n = p.order
    sj = s.taylor(p.x, n + 1)
    if sj[0] != 0:
        raise DomainError("s must vanish at the base point")
    ident = Jet.identity(p.x, n + 1).c
    jet = Jet(p.x, [Dual(ident[k], sj[k]) for k in range(n + 2)])
    coords = _pullback_coords(p.dual_coords(), jet, n)
    return LocalFunction(p.tag, (OnePointLocal.from_dual(p.x, [c.b for c in coords], p.tag),))


def shift(chi: LocalFunction, h) -> LocalFunction:
    """Translate every base point by h."""
    h = Fraction(h)
    if chi.tag in (AlgebraTag.WGEQ0, AlgebraTag.WGEQ1):
        raise DomainError(f"translations do not act on {chi.tag.value}")
    pts = []
    for p in chi.points:
        y = p.x + h
        if y == 0 and chi.tag.is_laurent:
            raise DomainError("shift would move a base point to 0")
        pts.append(OnePointLocal(y, p.coeffs, chi.tag))
    return LocalFunction(chi.tag, tuple(pts))


def _lowest_index(p: OnePointLocal) -> int:
    """Lowest dual index e_i^* that the tag can see at this point."""
    if p.x == 0 and p.tag.min_t_degree:
        return p.tag.min_t_degree - 1
    return -1


@dataclass(frozen=True)
class CanonicalForm:
    """c e_{n-1}^* (+ b e_k^* when n = 2k + 1 > 1) together with a witness."""

    x: Fraction
    order: int
    c: Fraction
    b: Fraction | None
    k: int | None
    form: OnePointLocal
    witness: DLocElement | None


def canonicalize(chi, with_witness: bool = True) -> CanonicalForm:
    """Staircase reduction of a one-point functional by steps t -> t + a (t-x)^(j+1)."""
    p = _component(chi)
    if p.is_zero():
        raise DomainError("the zero functional has no canonical form")
    n = p.order
    x = p.x
    N = n + 2
    lo = _lowest_index(p)
    coords = p.dual_coords()  # coords[i + 1] is the e_i^* coordinate
    c = coords[n]
    witness = DLocElement.identity(x, N) if with_witness else None
    k = (n - 1) // 2 if n % 2 == 1 and n > 1 else None
    for j in range(1, n - lo):
        target = n - 1 - j
        if target == k:
            continue
        cur = coords[target + 1]
        if cur == 0:
            continue
        a = -cur / ((n - 1 - 2 * j) * c)
        step = DLocElement.elementary(x, a, j, N)
        coords = _pullback_coords(coords, step.s, n)
        if coords[target + 1] != 0:
            raise AssertionError("staircase step failed to clear its coordinate")
        if witness is not None:
            witness = step.compose(witness)
    for i in range(lo, n - 1):
        if i != k and coords[i + 1] != 0:
            raise AssertionError("staircase left a nonzero coordinate")
    form = OnePointLocal.from_dual(x, coords, p.tag)
    b = coords[k + 1] if k is not None else None
    return CanonicalForm(x, n, c, b, k, form, witness)


def _middle_coefficient(p: OnePointLocal) -> tuple[Fraction, Fraction | None]:
    """(c, b) of the canonical form without the full staircase.

    Pullback coordinates are triangular (index m depends only on indices >= m), and
    the steps below e_k^* never touch index k, so only the top half is reduced.
    """
    n = p.order
    coords = p.dual_coords()
    c = coords[n]
    if n % 2 == 0 or n == 1:
        return c, None
    k = (n - 1) // 2
    coords = [0] * (k + 1) + list(coords[k + 1 :])
    for j in range(1, n - 1 - k):
        target = n - 1 - j
        cur = coords[target + 1]
        if cur != 0:
            a = -cur / ((n - 1 - 2 * j) * c)
            coords = _pullback_coords(coords, DLocElement.elementary(p.x, a, j, n + 2).s, n)
    return c, coords[k + 1]


def _point_invariant(p: OnePointLocal) -> tuple:
    n = p.order
    if p.x == 0 and p.tag is AlgebraTag.WGEQ1:
        cf = canonicalize(p, with_witness=False)
        return (n, cf.c, cf.b)
    if n % 2 == 0:
        return (n, None)
    if n == 1:
        return (n, p.coeffs[1])
    c, b = _middle_coefficient(p)
    return (n, b * b / c)


def orbit_invariant(chi: LocalFunction) -> PrimitiveDescriptor:
    """Complete invariant of the Poisson core of a local function."""
    zero = None
    others = []
    for p in chi.points:
        if p.x == 0 and p.tag in (AlgebraTag.WGEQ0, AlgebraTag.WGEQ1):
            zero = _point_invariant(p)
        else:
            others.append(p)
    partition = tuple(sorted((p.order for p in others), reverse=True))
    invs = tuple(sorted((_point_invariant(p) for p in others if p.order % 2 == 1), key=lambda v: (v[0], v[1])))
    return PrimitiveDescriptor(partition, invs, zero)


primitive_descriptor = orbit_invariant


def orbit_equal(chi1: LocalFunction, chi2: LocalFunction) -> bool:
    if chi1.tag is not chi2.tag:
        raise DomainError("algebra tags differ")
    return orbit_invariant(chi1) == orbit_invariant(chi2)


def _point_orbit_dim(p: OnePointLocal) -> int:
    n = p.order
    if p.x == 0 and p.tag is AlgebraTag.WGEQ0:
        return n if n % 2 == 0 else n - 1
    if p.x == 0 and p.tag is AlgebraTag.WGEQ1:
        return n - 2 if n % 2 == 0 else n - 3
    return 2 * ((n + 2) // 2)


def orbit_dim(chi: LocalFunction) -> int:
    """Dimension of the coadjoint orbit through chi."""
    return sum(_point_orbit_dim(p) for p in chi.points)


def dloc_orbit_dim(p: OnePointLocal) -> int:
    """Dimension of the orbit of the full coordinate-change group on order-n functionals at x."""
    if p.is_zero():
        return 0
    n = p.order
    if n == 1:
        return 1
    return n + 1 if n % 2 == 0 else n


def closure_less(lo: LocalFunction, hi: LocalFunction) -> bool | None:
    """Whether ``lo`` lies in the orbit closure of ``hi`` and not in its orbit.

    Exact for one-point functionals at a common base point (compare DLoc orbit
    dimensions). For several points only the componentwise sufficient condition is
    known, so the answer may be ``None`` (undecided).
    """
    if lo.tag is not hi.tag:
        raise DomainError("algebra tags differ")
    if lo.tag not in (AlgebraTag.W, AlgebraTag.WGEQ_M1, AlgebraTag.VIR):
        raise DomainError(f"closure order is only determined for W, Wgeq-1 and Vir, not {lo.tag.value}")
    if len(lo.points) <= 1 and len(hi.points) <= 1:
        xs = {p.x for p in lo.points + hi.points}
        if len(xs) > 1:
            raise DomainError("functionals must share their base point")
        d_lo = dloc_orbit_dim(lo.points[0]) if lo.points else 0
        d_hi = dloc_orbit_dim(hi.points[0]) if hi.points else 0
        return d_lo < d_hi
    # a strictly smaller orbit in the closure has strictly smaller dimension
    if orbit_dim(lo) >= orbit_dim(hi):
        return False
    hi_at = {q.x: q for q in hi.points}
    for p in lo.points:
        q = hi_at.get(p.x)
        if q is None:
            return None
        same_orbit = _point_invariant(p) == _point_invariant(q)
        if not same_orbit and dloc_orbit_dim(p) >= dloc_orbit_dim(q):
            return None
    return True