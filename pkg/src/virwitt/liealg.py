"""Witt-type Lie algebras of vector fields f d/dt and the Virasoro extension."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ParseError
from .exactalg import FactoredPoly, LaurentPoly, T, as_laurent, format_terms
from .grammar import parse_expression


class AlgebraTag(enum.Enum):
    W = "W"
    WGEQ_M1 = "Wgeq-1"
    WGEQ0 = "Wgeq0"
    WGEQ1 = "Wgeq1"
    VIR = "Vir"

    @classmethod
    def parse(cls, name: str) -> "AlgebraTag":
        aliases = {"W>=-1": "Wgeq-1", "W>=0": "Wgeq0", "W>=1": "Wgeq1", "W_{>=-1}": "Wgeq-1"}
        name = aliases.get(name, name)
        for tag in cls:
            if tag.value == name:
                return tag
        raise ParseError(f"unknown algebra tag {name!r}")

    @property
    def min_t_degree(self) -> int | None:
        """Smallest power of t allowed in a coefficient, or ``None`` for Laurent tags."""
        return {AlgebraTag.WGEQ_M1: 0, AlgebraTag.WGEQ0: 1, AlgebraTag.WGEQ1: 2}.get(self)

    @property
    def is_laurent(self) -> bool:
        return self in (AlgebraTag.W, AlgebraTag.VIR)


def admits(tag: AlgebraTag, f: LaurentPoly) -> bool:
    lo = tag.min_t_degree
    return lo is None or f.is_zero() or f.min_degree >= lo


@dataclass(frozen=True)
class VirElement:
    """The vector field ``f d/dt`` plus ``central * z`` (Virasoro only)."""

    f: LaurentPoly
    central: Fraction = Fraction(0)
    tag: AlgebraTag = AlgebraTag.W

    def __post_init__(self):
        object.__setattr__(self, "f", as_laurent(self.f))
        object.__setattr__(self, "central", Fraction(self.central))
        if self.central and self.tag is not AlgebraTag.VIR:
            raise DomainError(f"central term is only allowed in Vir, not {self.tag.value}")
        if not admits(self.tag, self.f):
            raise DomainError(f"{self.f} d/dt is not an element of {self.tag.value}")

    @classmethod
    def basis(cls, i: int, tag: AlgebraTag = AlgebraTag.W) -> "VirElement":
        """e_i = t^(i+1) d/dt."""
        return cls(LaurentPoly.monomial(i + 1), 0, tag)

    def _same(self, other: "VirElement"):
        if self.tag is not other.tag:
            raise DomainError(f"algebra tags differ: {self.tag.value} vs {other.tag.value}")

    def __add__(self, other: "VirElement") -> "VirElement":
        self._same(other)
        return VirElement(self.f + other.f, self.central + other.central, self.tag)

    def __sub__(self, other: "VirElement") -> "VirElement":
        self._same(other)
        return VirElement(self.f - other.f, self.central - other.central, self.tag)

    def __neg__(self) -> "VirElement":
        return VirElement(-self.f, -self.central, self.tag)

    def scale(self, c) -> "VirElement":
        c = Fraction(c)
        return VirElement(self.f * c, self.central * c, self.tag)

    def is_zero(self) -> bool:
        return self.f.is_zero() and self.central == 0

    def __str__(self) -> str:
        items = [(f"t^{d}" if d not in (0, 1) else ("t" if d == 1 else ""), c) for d, c in sorted(self.f.coeffs().items(), reverse=True)]
        items.append(("z", self.central))
        return format_terms(items)


def witt_bracket(u: VirElement, v: VirElement) -> VirElement:
    """[f d, g d] = (f g' - f' g) d."""
    u._same(v)
    if u.tag is AlgebraTag.VIR:
        raise DomainError("use vir_bracket for Vir elements")
    return VirElement(u.f * v.f.derivative() - u.f.derivative() * v.f, 0, u.tag)


def virasoro_cocycle(f: LaurentPoly, g: LaurentPoly) -> Fraction:
    """Res_0 (f' g'' - f'' g')."""
    f1, g1 = f.derivative(), g.derivative()
    return (f1 * g1.derivative() - f1.derivative() * g1).residue()


def vir_bracket(u: VirElement, v: VirElement) -> VirElement:
    u._same(v)
    if u.tag is not AlgebraTag.VIR:
        raise DomainError("vir_bracket needs Vir elements")
    f, g = u.f, v.f
    return VirElement(f * g.derivative() - f.derivative() * g, virasoro_cocycle(f, g), AlgebraTag.VIR)


def bracket(u: VirElement, v: VirElement) -> VirElement:
    if u.tag is AlgebraTag.VIR:
        return vir_bracket(u, v)
    return witt_bracket(u, v)


def wf_membership(u: VirElement, f: FactoredPoly) -> bool:
    """Whether ``u`` lies in W(f) = f * (coefficient ring) * d/dt."""
    return f.divides(u.f, units_t=u.tag.is_laurent)


class _Expr:
    """Parsing helper: Laurent part plus z-coefficient; z may appear only linearly."""

    __slots__ = ("f", "z")

    def __init__(self, f: LaurentPoly, z=Fraction(0)):
        self.f = f
        self.z = Fraction(z)

    def __add__(self, o):
        return _Expr(self.f + o.f, self.z + o.z)

    def __sub__(self, o):
        return _Expr(self.f - o.f, self.z - o.z)

    def __neg__(self):
        return _Expr(-self.f, -self.z)

    def _scalar(self):
        if self.z or (self.f and (self.f.max_degree != 0 or self.f.min_degree != 0)):
            return None
        return self.f[0]

    def __mul__(self, o):
        if self.z == 0 and o.z == 0:
            return _Expr(self.f * o.f)
        a, b = self._scalar(), o._scalar()
        if a is not None:
            return _Expr(o.f * a, o.z * a)
        if b is not None:
            return _Expr(self.f * b, self.z * b)
        raise ValueError("z may only be multiplied by a constant")

    def __pow__(self, k):
        if self.z:
            if k == 1:
                return self
            raise ValueError("z may not be raised to a power")
        return _Expr(self.f ** k)


def parse_element(text: str, tag: AlgebraTag = AlgebraTag.W) -> VirElement:
    """Parse ``f`` or ``f + c*z`` where f is a Laurent polynomial in t."""
    atoms = {"t": _Expr(T), "z": _Expr(LaurentPoly(), 1)}
    try:
        expr = parse_expression(text, atoms, lambda c: _Expr(LaurentPoly.const(c)))
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), text, 0) from None
    return VirElement(expr.f, expr.z, tag)
