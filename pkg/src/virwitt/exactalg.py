"""Exact arithmetic layer: Laurent polynomials, factored polynomials and jets.

All scalars are ``fractions.Fraction``.  Jets accept any coefficient type that
supports ring operations with ``Fraction`` (dual numbers are used this way).
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping

from .errors import DomainError, ParseError
from .grammar import parse_expression, parse_rational

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def falling(d: int, k: int) -> int:
    """d (d-1) ... (d-k+1); valid for negative d."""
    out = 1
    for i in range(k):
        out *= d - i
    return out


def gbinom(d: int, k: int) -> Fraction:
    """Binomial coefficient C(d, k) for any integer d and k >= 0."""
    return Fraction(falling(d, k), factorial(k))


def _fmt_coeff_term(c: Fraction, body: str, first: bool) -> str:
    neg = c < 0
    a = -c if neg else c
    if body == "":
        core = str(a)
    elif a == 1:
        core = body
    else:
        core = f"{a}*{body}"
    if first:
        return ("-" if neg else "") + core
    return (" - " if neg else " + ") + core


def format_terms(items: Iterable[tuple[str, Fraction]]) -> str:
    """Join ``(monomial_text, coeff)`` pairs as ``c*m + ...``; empty gives ``0``."""
    out = []
    for body, c in items:
        if c == 0:
            continue
        out.append(_fmt_coeff_term(c, body, not out))
    return "".join(out) if out else "0"


class LaurentPoly:
    """Immutable element of k[t, t^-1]: a finite map degree -> coefficient."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        c = {}
        if coeffs:
            for d, v in coeffs.items():
                v = Fraction(v)
                if v != 0:
                    c[int(d)] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c: dict) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj._c = c
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, deg: int, coeff=1) -> "LaurentPoly":
        return cls({deg: coeff})

    @classmethod
    def const(cls, c) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        value = parse_expression(text, {"t": T}, cls.const)
        if not isinstance(value, LaurentPoly):
            raise ParseError("not a Laurent polynomial", text, 0)
        return value

    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def __getitem__(self, deg: int) -> Fraction:
        return self._c.get(deg, ZERO)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    @property
    def min_degree(self) -> int | None:
        return min(self._c) if self._c else None

    @property
    def max_degree(self) -> int | None:
        return max(self._c) if self._c else None

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._c == ({0: Fraction(other)} if other != 0 else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    @staticmethod
    def _coerce(other) -> "LaurentPoly | None":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        c = dict(self._c)
        for d, v in o._c.items():
            s = c.get(d, ZERO) + v
            if s:
                c[d] = s
            else:
                c.pop(d, None)
        return LaurentPoly._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({d: -v for d, v in self._c.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return LaurentPoly()
            return LaurentPoly._raw({d: v * other for d, v in self._c.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        c: dict[int, Fraction] = {}
        for d1, v1 in self._c.items():
            for d2, v2 in other._c.items():
                c[d1 + d2] = c.get(d1 + d2, ZERO) + v1 * v2
        return LaurentPoly({d: v for d, v in c.items() if v})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (ONE / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if len(self._c) != 1:
                raise ValueError("only monomials are invertible in k[t, t^-1]")
            (d, v), = self._c.items()
            return LaurentPoly({d * k: Fraction(1) / v ** (-k)})
        out = LaurentPoly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self, k: int = 1) -> "LaurentPoly":
        c = {}
        for d, v in self._c.items():
            f = falling(d, k)
            if f:
                c[d - k] = v * f
        return LaurentPoly._raw(c)

    def shift_degree(self, k: int) -> "LaurentPoly":
        """Multiply by t^k."""
        return LaurentPoly._raw({d + k: v for d, v in self._c.items()})

    def __call__(self, x):
        """Evaluate at ``x``; negative powers need ``x`` invertible."""
        if not self._c:
            return ZERO
        if isinstance(x, (int, Fraction)) and x == 0 and min(self._c) < 0:
            raise DomainError("pole at t = 0")
        total = ZERO
        inv = None
        for d, v in self._c.items():
            if d >= 0:
                total = total + v * (x ** d if d else 1)
            else:
                if inv is None:
                    inv = ONE / x
                total = total + v * inv ** (-d)
        return total

    def residue(self) -> Fraction:
        return self._c.get(-1, ZERO)

    def taylor(self, x, order: int) -> list[Fraction]:
        """Coefficients c_0..c_order of the expansion in powers of (t - x)."""
        if x == 0:
            if self._c and min(self._c) < 0:
                raise DomainError("Laurent polynomial has a pole at t = 0")
            return [self._c.get(k, ZERO) for k in range(order + 1)]
        out = [ZERO] * (order + 1)
        x = Fraction(x)
        for d, v in self._c.items():
            for k in range(order + 1):
                b = falling(d, k)
                if b == 0:
                    if d >= 0:
                        break
                    continue
                out[k] += v * Fraction(b, factorial(k)) * x ** (d - k)
        return out

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    def __str__(self) -> str:
        return format_terms((_t_power(d), v) for d, v in sorted(self._c.items(), reverse=True))


def _t_power(d: int) -> str:
    if d == 0:
        return ""
    if d == 1:
        return "t"
    return f"t^{d}"


T = LaurentPoly.monomial(1)


def as_laurent(value) -> LaurentPoly:
    if isinstance(value, LaurentPoly):
        return value
    if isinstance(value, str):
        return LaurentPoly.parse(value)
    if isinstance(value, (int, Fraction)):
        return LaurentPoly.const(value)
    raise TypeError(f"cannot interpret {value!r} as a Laurent polynomial")


def lp_derivative(p: LaurentPoly) -> LaurentPoly:
    return p.derivative()


def residue0(p: LaurentPoly) -> Fraction:
    return p.residue()


def taylor_jet(p: LaurentPoly, x, order: int) -> "Jet":
    return Jet(x, p.taylor(Fraction(x), order))


def skew_residue_form(a: LaurentPoly, b: LaurentPoly, f: LaurentPoly) -> Fraction:
    """Res_0 f (a b' - a' b)."""
    return (f * (a * b.derivative() - a.derivative() * b)).residue()


class FactoredPoly:
    """scalar * t^t_power * prod (t - x)^m over distinct rational roots x."""

    __slots__ = ("scalar", "roots", "t_power")

    def __init__(self, roots: Mapping | Iterable = (), scalar=1, t_power: int = 0):
        merged: dict[Fraction, int] = {}
        pairs = roots.items() if isinstance(roots, Mapping) else roots
        for x, m in pairs:
            x = Fraction(x)
            m = int(m)
            if m < 0:
                raise DomainError("negative root multiplicity")
            if m:
                merged[x] = merged.get(x, 0) + m
        scalar = Fraction(scalar)
        if scalar == 0:
            raise DomainError("zero polynomial has no factorization")
        self.scalar = scalar
        self.roots = tuple(sorted(merged.items()))
        self.t_power = int(t_power)

    def __eq__(self, other):
        if not isinstance(other, FactoredPoly):
            return NotImplemented
        return (self.scalar, self.roots, self.t_power) == (other.scalar, other.roots, other.t_power)

    def __hash__(self):
        return hash((self.scalar, self.roots, self.t_power))

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    def multiplicity(self, x) -> int:
        return dict(self.roots).get(Fraction(x), 0)

    def expand(self) -> LaurentPoly:
        out = LaurentPoly.monomial(self.t_power, self.scalar)
        for x, m in self.roots:
            out = out * (T - x) ** m
        return out

    def radical(self) -> "FactoredPoly":
        return FactoredPoly([(x, 1) for x, _ in self.roots])

    def monic(self) -> "FactoredPoly":
        return FactoredPoly(self.roots)

    def divides(self, p: LaurentPoly, units_t: bool = True) -> bool:
        """Whether this divides ``p``; with ``units_t`` powers of t are units."""
        if p.is_zero():
            return True
        for x, m in self.roots:
            if x == 0:
                if units_t:
                    continue
                if p.min_degree < m:
                    return False
            elif any(p.taylor(x, m - 1)):
                return False
        if not units_t and self.t_power > 0 and p.min_degree < self.t_power:
            return False
        return True

    def to_json(self) -> dict:
        out: dict = {"roots": [[str(x), m] for x, m in self.roots]}
        if self.scalar != 1:
            out["scalar"] = str(self.scalar)
        if self.t_power:
            out["t_power"] = self.t_power
        return out

    @classmethod
    def from_json(cls, data) -> "FactoredPoly":
        if not isinstance(data, dict) or "roots" not in data:
            raise ParseError("factored polynomial needs a 'roots' list")
        try:
            roots = [(parse_rational(x), int(m)) for x, m in data["roots"]]
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad root entry: {exc}") from None
        return cls(roots, parse_rational(data.get("scalar", "1")), int(data.get("t_power", 0)))

    def __repr__(self) -> str:
        return f"FactoredPoly({self})"

    def __str__(self) -> str:
        parts = []
        if self.scalar != 1:
            parts.append(str(self.scalar))
        if self.t_power:
            parts.append(_t_power(self.t_power))
        for x, m in self.roots:
            base = "t" if x == 0 else (f"(t - {x})" if x > 0 else f"(t + {-x})")
            parts.append(base if m == 1 else f"{base}^{m}")
        return "*".join(parts) if parts else "1"


class Jet:
    """Truncated expansion sum c_k (t - x)^k, k = 0..order."""

    __slots__ = ("x", "c")

    def __init__(self, x, coeffs: Iterable):
        self.x = Fraction(x)
        self.c = tuple(coeffs)
        if not self.c:
            raise DomainError("jet needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @classmethod
    def zero(cls, x, order: int) -> "Jet":
        return cls(x, [ZERO] * (order + 1))

    @classmethod
    def identity(cls, x, order: int) -> "Jet":
        """The coordinate t itself."""
        c = [ZERO] * (order + 1)
        c[0] = Fraction(x)
        if order >= 1:
            c[1] = ONE
        return cls(x, c)

    def __getitem__(self, k: int):
        return self.c[k] if 0 <= k < len(self.c) else ZERO

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self.x == other.x and self.c == other.c

    def __hash__(self):
        return hash((self.x, self.c))

    def _check(self, other: "Jet") -> int:
        if self.x != other.x:
            raise DomainError("jets at different base points")
        return min(self.order, other.order)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise DomainError(f"cannot raise jet order from {self.order} to {order}")
        return Jet(self.x, self.c[: order + 1])

    def __add__(self, other):
        if isinstance(other, Jet):
            n = self._check(other)
            return Jet(self.x, [self.c[k] + other.c[k] for k in range(n + 1)])
        c = list(self.c)
        c[0] = c[0] + other
        return Jet(self.x, c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.x, [-a for a in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            n = self._check(other)
            a, b = self.c, other.c
            out = []
            for k in range(n + 1):
                s = ZERO
                for i in range(k + 1):
                    ai = a[i]
                    if ai != 0:
                        s = s + ai * b[k - i]
                out.append(s)
            return Jet(self.x, out)
        return Jet(self.x, [a * other for a in self.c])

    __rmul__ = __mul__

    def derivative(self) -> "Jet":
        """d/dt; the result has order one less."""
        if self.order == 0:
            raise DomainError("order underflow: derivative of an order-0 jet")
        return Jet(self.x, [k * self.c[k] for k in range(1, len(self.c))])

    def reciprocal(self) -> "Jet":
        a = self.c
        if a[0] == 0:
            raise DomainError("jet is not invertible (zero constant term)")
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, len(a)):
            s = ZERO
            for i in range(1, k + 1):
                s = s + a[i] * out[k - i]
            out.append(-s * inv0)
        return Jet(self.x, out)

    def compose(self, s: "Jet") -> "Jet":
        """This jet evaluated at t = s(t); requires s(x) = x."""
        if s.x != self.x:
            raise DomainError("jets at different base points")
        if s.c[0] != self.x:
            raise DomainError("inner jet must fix the base point")
        n = min(self.order, s.order)
        sigma = Jet(self.x, [ZERO] + list(s.c[1 : n + 1]))
        acc = Jet(self.x, [self.c[n]] + [ZERO] * n)
        for k in range(n - 1, -1, -1):
            acc = acc * sigma + self.c[k]
        return acc

    def value(self):
        return self.c[0]

    def to_laurent(self) -> LaurentPoly:
        out = LaurentPoly()
        u = T - self.x
        for k, a in enumerate(self.c):
            if a:
                out = out + u ** k * a
        return out

    def __repr__(self) -> str:
        return f"Jet(x={self.x}, {list(map(str, self.c))})"


class Dual:
    """a + b h with h^2 = 0."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @staticmethod
    def _c(o) -> "Dual | None":
        if isinstance(o, Dual):
            return o
        if isinstance(o, (int, Fraction)):
            return Dual(o)
        return None

    def __add__(self, o):
        o = self._c(o)
        if o is None:
            return NotImplemented
        return Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __sub__(self, o):
        o = self._c(o)
        if o is None:
            return NotImplemented
        return Dual(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._c(o)
        if o is None:
            return NotImplemented
        return Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def reciprocal(self) -> "Dual":
        if self.a == 0:
            raise ZeroDivisionError("dual number with zero real part")
        return Dual(1 / self.a, -self.b / (self.a * self.a))

    def __truediv__(self, o):
        o = self._c(o)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, o):
        o = self._c(o)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        out = Dual(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        o = self._c(o)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __ne__(self, o):
        eq = self.__eq__(o)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f"Dual({self.a}, {self.b})"
