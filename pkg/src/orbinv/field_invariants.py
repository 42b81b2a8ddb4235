"""Class numbers, units and the restricted 2-class number of totally real fields.

The wide class number of a real quadratic field is obtained from the cycle
structure of reduced indefinite binary quadratic forms of the fundamental
discriminant, together with the norm of the fundamental unit; an independent
Dirichlet analytic evaluation is provided as an oracle. The headline quantity
is the restricted 2-class number

    h_inf_2 = 2**(degree - 1) * h2 / [U : U_inf],

a positive integer whose triviality certifies uniqueness of the associated
arithmetic groups up to conjugation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import mpmath

from .exact_arith import (
    InternalConsistencyError,
    QuadFieldElem,
    TotallyRealField,
    is_algebraic_integer,
    is_squarefree,
    sign_at,
)

__all__ = [
    "BinaryQuadraticForm",
    "FormCycle",
    "UnitGroupData",
    "FieldInvariants",
    "RestrictedTwoClassBound",
    "fundamental_discriminant",
    "fundamental_unit",
    "reduced_forms",
    "reduction_step",
    "form_cycles",
    "narrow_class_number",
    "class_number",
    "two_class_number",
    "unit_group_data",
    "unit_index_infinity",
    "unit_index_from_sign_vectors",
    "restricted_class_number",
    "restricted_class_number_from_invariants",
    "analytic_class_number_oracle",
    "squarefree_range",
]


def _check_d(d: int) -> None:
    if d < 2 or not is_squarefree(d):
        raise ValueError(f"d must be squarefree and >= 2, got {d}")


def fundamental_discriminant(d: int) -> int:
    """Discriminant of the maximal order of Q(sqrt d): d if d = 1 mod 4, else 4d."""
    _check_d(d)
    return d if d % 4 == 1 else 4 * d


def squarefree_range(dmax: int) -> list[int]:
    """Squarefree integers d with 2 <= d <= dmax."""
    return [d for d in range(2, dmax + 1) if is_squarefree(d)]


# ---------------------------------------------------------------------------
# Fundamental unit by continued fractions
# ---------------------------------------------------------------------------


def fundamental_unit(d: int) -> QuadFieldElem:
    """Fundamental unit eps > 1 of the ring of integers of Q(sqrt d).

    Expands sqrt(d) (d = 2, 3 mod 4) or (1 + sqrt(d))/2 (d = 1 mod 4) as a
    continued fraction with exact (P, Q) state arithmetic; one full period of
    the expansion yields the smallest unit above 1. The result is verified to
    be an algebraic integer of norm +-1 exceeding 1 before it is returned.
    """
    _check_d(d)
    if d % 4 == 1:
        P, Q = 1, 2
    else:
        P, Q = 0, 1
    s = isqrt(d)
    # T = [[p_{k-1}, p_{k-2}], [q_{k-1}, q_{k-2}]], the convergent matrix
    t11, t12, t21, t22 = 1, 0, 0, 1
    seen: dict[tuple[int, int], tuple[int, int, int, int]] = {}
    while True:
        state = (P, Q)
        if state in seen:
            u11, u12, u21, u22 = seen[state]
            break
        seen[state] = (t11, t12, t21, t22)
        a = (P + s) // Q  # floor((P + sqrt d)/Q); exact because sqrt d is irrational
        P = a * Q - P
        if (d - P * P) % Q:
            raise InternalConsistencyError("continued fraction lost Q | d - P^2")
        Q = (d - P * P) // Q
        if Q <= 0:
            raise InternalConsistencyError("continued fraction state left the positive domain")
        t11, t12, t21, t22 = t11 * a + t12, t11, t21 * a + t22, t21
    # The period matrix N = U^-1 T fixes alpha = (P + sqrt d)/Q, and
    # eps = N21 * alpha + N22 is the unit of one full period.
    det_u = u11 * u22 - u12 * u21  # +-1
    n21 = det_u * (-u21 * t11 + u11 * t21)
    n22 = det_u * (-u21 * t12 + u11 * t22)
    alpha = QuadFieldElem(Fraction(state[0], state[1]), Fraction(1, state[1]), d)
    eps = n21 * alpha + n22
    if not is_algebraic_integer(eps) or eps.norm() not in (1, -1):
        raise InternalConsistencyError(f"continued fraction produced a non-unit for d={d}")
    if sign_at(eps - 1, 0) != 1:
        raise InternalConsistencyError(f"continued fraction unit for d={d} is not > 1")
    return eps


# ---------------------------------------------------------------------------
# Unit group data and the totally positive index
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitGroupData:
    fundamental_unit: QuadFieldElem | None
    unit_norm: int | None
    unit_index_infinity: int


def unit_index_from_sign_vectors(degree: int, sign_vectors) -> int:
    """[U : U_inf] from sign vectors of unit generators at the non-Id places.

    Each vector has one +-1 entry per real place other than Id; the index is
    2**rank of those vectors over the field with two elements. The vector of
    -1 (all entries -1) must be included by the caller.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    width = degree - 1
    basis: list[int] = []
    for vec in sign_vectors:
        vec = tuple(vec)
        if len(vec) != width or any(s not in (1, -1) for s in vec):
            raise ValueError(f"bad sign vector {vec!r} for degree {degree}")
        m = sum(1 << j for j, sgn in enumerate(vec) if sgn == -1)
        for b in basis:
            m = min(m, m ^ b)
        if m:
            basis.append(m)
    return 2 ** len(basis)


def unit_group_data(field: TotallyRealField) -> UnitGroupData:
    """Fundamental unit, its norm and [U : U_inf] for a field of degree <= 2."""
    if field.is_rationals:
        return UnitGroupData(None, None, 1)
    eps = fundamental_unit(field.d)
    vectors = [
        tuple(sign_at(field.coerce(-1), v) for v in field.non_id_places()),
        tuple(sign_at(eps, v) for v in field.non_id_places()),
    ]
    index = unit_index_from_sign_vectors(field.degree, vectors)
    return UnitGroupData(eps, int(eps.norm()), index)


def unit_index_infinity(field: TotallyRealField) -> int:
    return unit_group_data(field).unit_index_infinity


# ---------------------------------------------------------------------------
# Indefinite binary quadratic forms and their reduction cycles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BinaryQuadraticForm:
    """Primitive integral form a x^2 + b xy + c y^2, indefinite irrational case."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        D = self.discriminant
        if D <= 0 or _is_square(D):
            raise ValueError(f"discriminant {D} must be positive and not a square")
        from math import gcd

        if gcd(gcd(abs(self.a), abs(self.b)), abs(self.c)) != 1:
            raise ValueError(f"form ({self.a},{self.b},{self.c}) is not primitive")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def is_reduced(self) -> bool:
        # 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b, by integer squaring
        D = self.discriminant
        b = self.b
        if b <= 0 or b * b >= D:
            return False
        ta = 2 * abs(self.a)
        if (ta + b) ** 2 <= D:
            return False
        return ta <= b or (ta - b) ** 2 < D

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


def _is_square(n: int) -> bool:
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def reduction_step(form: BinaryQuadraticForm) -> BinaryQuadraticForm:
    """Right-neighbor step on reduced forms: (a,b,c) -> (c, r, (r^2-D)/(4c)).

    r is the unique integer with r = -b mod 2|c| inside (sqrt(D) - 2|c|, sqrt(D));
    on reduced forms this is a bijection whose orbits are the reduction cycles.
    """
    if not form.is_reduced:
        raise ValueError(f"reduction step requires a reduced form, got {form}")
    D = form.discriminant
    s = isqrt(D)
    g = 2 * abs(form.c)
    r = s - (s + form.b) % g
    if (r * r - D) % (4 * form.c):
        raise InternalConsistencyError("reduction step lost integrality")
    nxt = BinaryQuadraticForm(form.c, r, (r * r - D) // (4 * form.c))
    if not nxt.is_reduced:
        raise InternalConsistencyError(f"reduction step left the reduced domain at {form}")
    return nxt


def reduced_forms(D: int) -> list[BinaryQuadraticForm]:
    """All reduced primitive forms of discriminant D (D > 0, not a square)."""
    if D <= 0 or _is_square(D):
        raise ValueError(f"discriminant {D} must be positive and not a square")
    if D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a discriminant")
    s = isqrt(D)
    out = []
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        ac4 = b * b - D  # = 4ac < 0
        ta = 2
        while True:  # 2|a| over even integers in (sqrt D - b, sqrt D + b)
            if (ta + b) ** 2 > D and (ta <= b or (ta - b) ** 2 < D):
                if ac4 % (2 * ta) == 0:
                    a = ta // 2
                    c = ac4 // (4 * a)
                    for sign in (1, -1):
                        try:
                            form = BinaryQuadraticForm(sign * a, b, sign * c)
                        except ValueError:
                            continue  # imprimitive
                        out.append(form)
            elif (ta - b) ** 2 >= D and ta > b:
                break
            ta += 2
    out.sort(key=lambda f: (f.b, f.a, f.c))
    return out


@dataclass(frozen=True)
class FormCycle:
    """A reduction cycle: applying the step to the last form yields the first."""

    forms: tuple[BinaryQuadraticForm, ...]

    def __len__(self):
        return len(self.forms)


def form_cycles(D: int) -> list[FormCycle]:
    """Partition of the reduced forms of discriminant D into reduction cycles."""
    forms = reduced_forms(D)
    pool = set((f.a, f.b, f.c) for f in forms)
    cycles = []
    for start in forms:
        key = (start.a, start.b, start.c)
        if key not in pool:
            continue
        cycle = []
        cur = start
        while True:
            k = (cur.a, cur.b, cur.c)
            if k not in pool:
                raise InternalConsistencyError(f"cycle through {start} escaped the reduced set")
            pool.remove(k)
            cycle.append(cur)
            cur = reduction_step(cur)
            if cur == start:
                break
        cycles.append(FormCycle(tuple(cycle)))
    if pool:
        raise InternalConsistencyError("reduction step did not partition the reduced forms")
    return cycles


def narrow_class_number(d: int) -> int:
    """h+ of Q(sqrt d): the number of reduction cycles of the fundamental discriminant."""
    return len(form_cycles(fundamental_discriminant(d)))


def class_number(field: TotallyRealField) -> int:
    """Wide class number h; 1 for Q, h+ or h+/2 for Q(sqrt d) by the unit norm."""
    if field.is_rationals:
        return 1
    if field.degree > 2:
        raise ValueError("unsupported degree")
    h_plus = narrow_class_number(field.d)
    if fundamental_unit(field.d).norm() == -1:
        return h_plus
    if h_plus % 2:
        raise InternalConsistencyError(f"h+ = {h_plus} odd with unit norm +1 for d={field.d}")
    return h_plus // 2


def two_class_number(h: int) -> int:
    """Order 2**v2(h) of the 2-Sylow subgroup of an abelian group of order h."""
    if h < 1:
        raise ValueError(f"group order must be >= 1, got {h}")
    return h & -h


# ---------------------------------------------------------------------------
# The restricted 2-class number bundle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldInvariants:
    field: TotallyRealField
    h: int
    h2: int
    h_plus: int
    units: UnitGroupData
    h_inf_2: int
    uniqueness_certified: bool


def _h_inf_2(degree: int, h2: int, unit_index: int) -> int:
    numerator = 2 ** (degree - 1) * h2
    if numerator % unit_index:
        raise InternalConsistencyError(
            f"2^{degree - 1} * {h2} is not divisible by the unit index {unit_index}"
        )
    return numerator // unit_index


def restricted_class_number(field: TotallyRealField) -> FieldInvariants:
    """Full invariant bundle with h_inf_2 = 2**(degree-1) * h2 / [U:U_inf].

    h_inf_2 = 1 certifies that the class number of every coherent collection
    is 1, i.e. the associated arithmetic subgroups are unique up to conjugacy.
    """
    units = unit_group_data(field)
    if field.is_rationals:
        h = h_plus = 1
    else:
        h_plus = narrow_class_number(field.d)
        h = h_plus if units.unit_norm == -1 else h_plus // 2
        if units.unit_norm == 1 and h_plus % 2:
            raise InternalConsistencyError(f"h+ = {h_plus} odd with unit norm +1")
    h2 = two_class_number(h)
    h_inf_2 = _h_inf_2(field.degree, h2, units.unit_index_infinity)
    return FieldInvariants(
        field=field,
        h=h,
        h2=h2,
        h_plus=h_plus,
        units=units,
        h_inf_2=h_inf_2,
        uniqueness_certified=(h_inf_2 == 1),
    )


@dataclass(frozen=True)
class RestrictedTwoClassBound:
    """Formula-level bundle for caller-supplied invariants of any degree."""

    degree: int
    h: int
    h2: int
    unit_index_infinity: int
    h_inf_2: int
    uniqueness_certified: bool


def restricted_class_number_from_invariants(
    degree: int, h: int, unit_sign_vectors
) -> RestrictedTwoClassBound:
    """Evaluate h_inf_2 for a totally real field given (h, unit sign vectors).

    Supports degree >= 3, where no class-group engine is provided; the caller
    supplies the class number and the signs of unit generators (including -1)
    at the places other than Id.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if h < 1:
        raise ValueError("class number must be >= 1")
    h2 = two_class_number(h)
    index = unit_index_from_sign_vectors(degree, unit_sign_vectors)
    h_inf_2 = _h_inf_2(degree, h2, index)
    return RestrictedTwoClassBound(
        degree=degree,
        h=h,
        h2=h2,
        unit_index_infinity=index,
        h_inf_2=h_inf_2,
        uniqueness_certified=(h_inf_2 == 1),
    )


# ---------------------------------------------------------------------------
# Dirichlet analytic class number oracle
# ---------------------------------------------------------------------------


def _jacobi(a: int, n: int) -> int:
    # Jacobi symbol (a/n) for odd n >= 1
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _kronecker(D: int, n: int) -> int:
    # Kronecker symbol (D/n) for n >= 1 and a discriminant D > 0
    result = 1
    while n % 2 == 0:
        if D % 2 == 0:
            return 0
        n //= 2
        if D % 8 in (3, 5):
            result = -result
    return result * _jacobi(D % n, n) if n > 1 else result


def analytic_class_number_oracle(d: int, digits: int = 40) -> int:
    """h of Q(sqrt d) from the Dirichlet class number formula.

    Evaluates  h = -sum_{a<D} chi_D(a) log sin(pi a / D) / (2 log eps)  with
    `digits` decimal digits of working precision (>= 30) and rounds to the
    nearest integer; refuses to answer when the rounding residual is not far
    below 1, so a wrong answer cannot slip through silently.

    This path never touches the form-reduction machinery and serves as its
    independent cross-check.
    """
    if digits < 30:
        raise ValueError("at least 30 working digits required")
    D = fundamental_discriminant(d)
    eps = fundamental_unit(d)
    with mpmath.workdps(digits):
        total = mpmath.mpf(0)
        pi_over_D = mpmath.pi / D
        for a in range(1, D):
            chi = _kronecker(D, a)
            if chi:
                term = mpmath.log(mpmath.sin(pi_over_D * a))
                total += term if chi == 1 else -term
        regulator = mpmath.log(mpmath.mpf(eps.a.numerator) / eps.a.denominator
                               + mpmath.mpf(eps.b.numerator) / eps.b.denominator
                               * mpmath.sqrt(d))
        value = -total / (2 * regulator)
        h = int(mpmath.nint(value))
        residual = abs(value - h)
        if residual > mpmath.mpf(10) ** -10:
            raise ValueError(f"insufficient precision: residual {residual} for d={d}")
    if h < 1:
        raise InternalConsistencyError(f"analytic evaluation produced h={h} for d={d}")
    return h
