"""Exact arithmetic over Q and real quadratic fields Q(sqrt(d)).

Elements of Q are `fractions.Fraction`; elements of Q(sqrt(d)) are
`QuadFieldElem`. Every predicate here (sign at a real embedding, squareness,
square-class equality) is decided in integer arithmetic; there is no floating
point anywhere in this module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

Rational = Fraction

__all__ = [
    "Rational",
    "QuadFieldElem",
    "TotallyRealField",
    "SquareClass",
    "InternalConsistencyError",
    "sign_at",
    "is_square",
    "in_k_infinity_star",
    "is_algebraic_integer",
    "is_squarefree",
    "squarefree_part",
    "format_element",
    "parse_element",
]


class InternalConsistencyError(RuntimeError):
    """An invariant that must hold by construction failed; this is a bug signal."""


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return False
        p += 1
    return True


@lru_cache(maxsize=None)
def _valid_field_tag(d: int) -> bool:
    # element constructors run hot inside matrix arithmetic; memoize the check
    return d >= 2 and is_squarefree(d)


def _is_square_int(n: int) -> bool:
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def squarefree_part(n: int) -> int:
    """Signed squarefree part of n: the unique squarefree s with n = s * m**2."""
    if n == 0:
        raise ValueError("squarefree part of zero undefined")
    sign = -1 if n < 0 else 1
    n = abs(n)
    if n < 10**10:  # trial division; sympy stays unloaded for everyday values
        out = sign
        p = 2
        while p * p <= n:
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                if e % 2:
                    out *= p
            p += 1
        return out * n
    from sympy import factorint  # heavy import, keep local

    out = sign
    for p, e in factorint(n).items():
        if e % 2:
            out *= p
    return out


@dataclass(frozen=True)
class QuadFieldElem:
    """Exact element a + b*sqrt(d) of the real quadratic field Q(sqrt(d))."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        if not isinstance(self.a, Fraction):
            object.__setattr__(self, "a", Fraction(self.a))
        if not isinstance(self.b, Fraction):
            object.__setattr__(self, "b", Fraction(self.b))
        if not _valid_field_tag(self.d):
            raise ValueError(f"d must be squarefree and >= 2, got {self.d}")

    def _lift(self, other):
        if isinstance(other, QuadFieldElem):
            if other.d != self.d:
                raise ValueError(
                    f"cannot mix elements of Q(sqrt {self.d}) and Q(sqrt {other.d})"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QuadFieldElem(Fraction(other), Fraction(0), self.d)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadFieldElem(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadFieldElem(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadFieldElem(
            self.a * o.a + self.b * o.b * self.d,
            self.a * o.b + self.b * o.a,
            self.d,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        nrm = o.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        return self * QuadFieldElem(o.a / nrm, -o.b / nrm, self.d)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return QuadFieldElem(-self.a, -self.b, self.d)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return (1 / self) ** (-exponent)
        out = QuadFieldElem(Fraction(1), Fraction(0), self.d)
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __eq__(self, other):
        if isinstance(other, QuadFieldElem):
            if other.d == self.d:
                return self.a == other.a and self.b == other.b
            # rational values are shared between fields
            return self.b == 0 and other.b == 0 and self.a == other.a
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def conjugate(self) -> "QuadFieldElem":
        return QuadFieldElem(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def trace(self) -> Fraction:
        return 2 * self.a

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"QuadFieldElem({self.a!s}, {self.b!s}, d={self.d})"


@dataclass(frozen=True)
class TotallyRealField:
    """Q (d is None) or the real quadratic field Q(sqrt(d)).

    Real embeddings are indexed 0..degree-1; for a quadratic field, place 0
    sends sqrt(d) to the positive square root and place 1 to the negative one.
    `id_place` marks the distinguished place.
    """

    d: int | None = None
    id_place: int = 0

    def __post_init__(self):
        if self.d is not None and (self.d < 2 or not is_squarefree(self.d)):
            raise ValueError(f"d must be squarefree and >= 2, got {self.d}")
        if not 0 <= self.id_place < self.degree:
            raise ValueError(f"id_place {self.id_place} out of range for degree {self.degree}")

    @classmethod
    def rationals(cls) -> "TotallyRealField":
        return cls(None, 0)

    @classmethod
    def real_quadratic(cls, d: int, id_place: int = 0) -> "TotallyRealField":
        return cls(d, id_place)

    @classmethod
    def from_label(cls, label: str, id_place: int = 0) -> "TotallyRealField":
        """Parse "Q" or "Q(sqrt D)"."""
        text = label.strip()
        if text == "Q":
            return cls.rationals()
        m = re.fullmatch(r"Q\(sqrt\s*(\d+)\)", text)
        if m:
            return cls.real_quadratic(int(m.group(1)), id_place)
        raise ValueError(f"cannot parse field label {label!r}")

    @property
    def degree(self) -> int:
        return 1 if self.d is None else 2

    @property
    def is_rationals(self) -> bool:
        return self.d is None

    @property
    def places(self) -> tuple[int, ...]:
        return tuple(range(self.degree))

    def non_id_places(self) -> tuple[int, ...]:
        return tuple(v for v in self.places if v != self.id_place)

    def coerce(self, x):
        """Lift x into this field's element type."""
        if isinstance(x, QuadFieldElem):
            if self.is_rationals:
                if x.is_rational:
                    return x.a
                raise ValueError(f"{x} is not a rational number")
            if x.d != self.d:
                raise ValueError(f"{x} does not lie in Q(sqrt {self.d})")
            return x
        if isinstance(x, (int, Fraction)):
            if self.is_rationals:
                return Fraction(x)
            return QuadFieldElem(Fraction(x), Fraction(0), self.d)
        raise TypeError(f"cannot coerce {x!r} into {self.label()}")

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def sqrt_gen(self) -> QuadFieldElem:
        """The element sqrt(d); only for quadratic fields."""
        if self.is_rationals:
            raise ValueError("Q has no quadratic generator")
        return QuadFieldElem(Fraction(0), Fraction(1), self.d)

    def label(self) -> str:
        return "Q" if self.is_rationals else f"Q(sqrt {self.d})"


def _sign_fraction(x: Fraction) -> int:
    return 1 if x > 0 else -1


def _sign_quad(a: Fraction, b: Fraction, d: int) -> int:
    # sign of a + b*sqrt(d) with b already adjusted for the embedding;
    # case-split on the signs of a, b and compare a^2 against b^2 d, so no
    # real approximation is ever taken (equality is impossible: sqrt(d) is
    # irrational)
    if b == 0:
        return _sign_fraction(a)
    if a == 0:
        return _sign_fraction(b)
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    if a * a > b * b * d:
        return _sign_fraction(a)
    return _sign_fraction(b)


def sign_at(x, place: int = 0) -> int:
    """Exact sign (+1 or -1) of x under the real embedding with the given index."""
    if isinstance(x, QuadFieldElem):
        if not x:
            raise ValueError("sign of zero undefined")
        if place not in (0, 1):
            raise ValueError(f"place {place} out of range for a quadratic field")
        return _sign_quad(x.a, x.b if place == 0 else -x.b, x.d)
    x = Fraction(x)
    if x == 0:
        raise ValueError("sign of zero undefined")
    if place != 0:
        raise ValueError("rational numbers have a single real place")
    return _sign_fraction(x)


def _fraction_is_square(q: Fraction) -> bool:
    return q > 0 and _is_square_int(q.numerator) and _is_square_int(q.denominator)


def _fraction_sqrt(q: Fraction) -> Fraction:
    # assumes _fraction_is_square(q)
    return Fraction(isqrt(q.numerator), isqrt(q.denominator))


def is_square(x) -> bool:
    """True iff x is a square inside its own field.

    Over Q(sqrt d) with x = a + b*sqrt(d), b != 0: x is a square iff its norm
    a^2 - b^2 d is the square of a rational c >= 0 and one of (a+c)/2, (a-c)/2
    is a rational square u^2 whose companion v = b/(2u) reproduces x exactly.
    """
    if isinstance(x, QuadFieldElem):
        if not x:
            raise ValueError("squareness of zero undefined")
        if x.is_rational:
            # either a rational square or d times one ((v*sqrt(d))^2 = v^2 d)
            return _fraction_is_square(x.a) or _fraction_is_square(x.a / x.d)
        nrm = x.norm()
        if not _fraction_is_square(nrm):
            return False
        c = _fraction_sqrt(nrm)
        for cand in ((x.a + c) / 2, (x.a - c) / 2):
            if cand != 0 and _fraction_is_square(cand):
                u = _fraction_sqrt(cand)
                v = x.b / (2 * u)
                if u * u + v * v * x.d == x.a:
                    return True
        return False
    x = Fraction(x)
    if x == 0:
        raise ValueError("squareness of zero undefined")
    return _fraction_is_square(x)


def in_k_infinity_star(x, field: TotallyRealField) -> bool:
    """True iff x is positive at every real place other than the Id place.

    Vacuously true over Q. The value at the Id place itself is unconstrained.
    """
    x = field.coerce(x)
    if not x:
        raise ValueError("zero is not an element of k*")
    return all(sign_at(x, v) == 1 for v in field.non_id_places())


def is_algebraic_integer(x) -> bool:
    """True iff x lies in the ring of integers of its field."""
    if isinstance(x, QuadFieldElem):
        return x.trace().denominator == 1 and x.norm().denominator == 1
    return Fraction(x).denominator == 1


@dataclass(frozen=True, eq=False)
class SquareClass:
    """An element of k*/(k*)^2, the value group of the spinor norm.

    Two classes are equal iff the quotient of their representatives is a
    square in the field. Over Q the representative is kept canonical (the
    signed squarefree integer); over Q(sqrt d) no canonical form is imposed
    and equality always goes through the quotient test.
    """

    field: TotallyRealField
    representative: object

    __hash__ = None  # equality is by square-quotient; no general canonical form

    @classmethod
    def of(cls, field: TotallyRealField, x) -> "SquareClass":
        x = field.coerce(x)
        if not x:
            raise ValueError("square class of zero undefined")
        if field.is_rationals:
            x = Fraction(squarefree_part(x.numerator * x.denominator))
        return cls(field, x)

    @classmethod
    def trivial(cls, field: TotallyRealField) -> "SquareClass":
        return cls.of(field, 1)

    def __eq__(self, other):
        if not isinstance(other, SquareClass):
            return NotImplemented
        if self.field != other.field:
            return False
        if self.field.is_rationals:
            return self.representative == other.representative
        return is_square(self.representative / other.representative)

    def __mul__(self, other):
        if not isinstance(other, SquareClass):
            return NotImplemented
        if self.field != other.field:
            raise ValueError("square classes of different fields")
        if self.field.is_rationals:
            p = self.representative.numerator * other.representative.numerator
            # both representatives are squarefree, so the square part of the
            # product is exactly gcd^2
            g = gcd(self.representative.numerator, other.representative.numerator)
            return SquareClass(self.field, Fraction(p // (g * g)))
        return SquareClass(self.field, self.representative * other.representative)

    @property
    def is_trivial(self) -> bool:
        if self.field.is_rationals:
            return self.representative == 1
        return is_square(self.representative)

    def __repr__(self):
        return f"SquareClass({self.field.label()}, {format_element(self.representative)})"


_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")
_QUADRATIC_RE = re.compile(r"^(-?\d+)/(\d+)\+(-?\d+)/(\d+)\*sqrt\((\d+)\)$")


def format_element(x) -> str:
    """Wire encoding: "p/q" over Q, "p/q+r/s*sqrt(d)" over Q(sqrt d).

    Whitespace-free, minus signs attached to numerators; parse_element
    round-trips this bit-exactly.
    """
    if isinstance(x, QuadFieldElem):
        return (
            f"{x.a.numerator}/{x.a.denominator}"
            f"+{x.b.numerator}/{x.b.denominator}*sqrt({x.d})"
        )
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_element(text: str, field: TotallyRealField):
    """Parse the wire encoding into an element of `field`.

    Plain integers and rationals are accepted for either field; the full
    quadratic form is accepted only when its d matches the field's.
    """
    m = _RATIONAL_RE.match(text)
    if m:
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return field.coerce(Fraction(int(m.group(1)), den))
    m = _QUADRATIC_RE.match(text)
    if m:
        if field.is_rationals:
            raise ValueError(f"{text!r} is not an element of Q")
        pa, qa, pb, qb, d = (int(g) for g in m.groups())
        if qa == 0 or qb == 0:
            raise ValueError(f"zero denominator in {text!r}")
        if d != field.d:
            raise ValueError(f"{text!r} does not lie in Q(sqrt {field.d})")
        return QuadFieldElem(Fraction(pa, qa), Fraction(pb, qb), d)
    raise ValueError(f"cannot parse field element {text!r}")
