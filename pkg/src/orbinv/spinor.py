"""Diagonal quadratic forms, reflection decompositions and spinor norms.

Everything here is exact: isometries are matrices over Q or Q(sqrt d) that
preserve the form entry-by-entry, reflection decompositions recompose to the
source matrix exactly, and the spinor norm lands in k*/(k*)^2 via the product
of the form values of the reflection vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .exact_arith import (
    InternalConsistencyError,
    QuadFieldElem,
    SquareClass,
    TotallyRealField,
    in_k_infinity_star,
    is_algebraic_integer,
    sign_at,
)

__all__ = [
    "DiagonalForm",
    "Isometry",
    "ReflectionDecomposition",
    "NormalizerReport",
    "admissibility_check",
    "preserves_form",
    "reflect",
    "cartan_dieudonne_decompose",
    "decompose_matrix",
    "spinor_norm",
    "spinor_norm_of_matrix",
    "so0_membership",
    "stabilizes_standard_lattice",
    "standard_admissible_form",
    "normalizer_index_check",
    "identity_matrix",
    "mat_mul",
    "mat_vec",
]


@dataclass(frozen=True)
class DiagonalForm:
    """Diagonal quadratic form <a_0, ..., a_n> over a totally real field."""

    field: TotallyRealField
    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(self.field.coerce(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) < 3:
            raise ValueError("dimension n+1 must be at least 3")
        if any(not c for c in coeffs):
            raise ValueError("form coefficients must be nonzero")

    @property
    def dim(self) -> int:
        return len(self.coefficients)

    @property
    def n(self) -> int:
        return self.dim - 1

    def coerce_vector(self, v) -> tuple:
        v = tuple(self.field.coerce(x) for x in v)
        if len(v) != self.dim:
            raise ValueError(f"vector length {len(v)} does not match dimension {self.dim}")
        return v

    def evaluate(self, v):
        """f(v) = sum a_i v_i^2."""
        v = self.coerce_vector(v)
        total = self.field.zero()
        for c, x in zip(self.coefficients, v):
            total = total + c * x * x
        return total

    def bilinear(self, u, v):
        """Polar form B(u, v) = sum a_i u_i v_i, with B(v, v) = f(v)."""
        u = self.coerce_vector(u)
        v = self.coerce_vector(v)
        total = self.field.zero()
        for c, x, y in zip(self.coefficients, u, v):
            total = total + c * x * y
        return total

    def basis_vector(self, i: int) -> tuple:
        one = self.field.one()
        zero = self.field.zero()
        return tuple(one if j == i else zero for j in range(self.dim))


# ---------------------------------------------------------------------------
# Exact matrix helpers
# ---------------------------------------------------------------------------


def identity_matrix(field: TotallyRealField, size: int) -> tuple:
    one = field.one()
    zero = field.zero()
    return tuple(tuple(one if i == j else zero for j in range(size)) for i in range(size))


def mat_mul(a, b) -> tuple:
    size = len(a)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(1, size)), a[i][0] * b[0][j])
              for j in range(size))
        for i in range(size)
    )


def mat_vec(a, v) -> tuple:
    size = len(a)
    return tuple(
        sum((a[i][k] * v[k] for k in range(1, size)), a[i][0] * v[0]) for i in range(size)
    )


def _mat_det(field: TotallyRealField, matrix) -> object:
    size = len(matrix)
    m = [list(row) for row in matrix]
    det = field.one()
    for col in range(size):
        pivot = next((r for r in range(col, size) if m[r][col] != 0), None)
        if pivot is None:
            return field.zero()
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        pv = m[col][col]
        det = det * pv
        for r in range(col + 1, size):
            if m[r][col] != 0:
                factor = m[r][col] / pv
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return det


def preserves_form(form: DiagonalForm, matrix) -> bool:
    """Exact test of g^T F g == F for F = diag(coefficients)."""
    field = form.field
    f = form.coefficients
    size = form.dim
    zero = field.zero()
    rows = tuple(tuple(field.coerce(x) for x in row) for row in matrix)
    if len(rows) != size or any(len(r) != size for r in rows):
        return False
    for j in range(size):
        for k in range(j, size):
            total = zero
            for i in range(size):
                total = total + rows[i][j] * f[i] * rows[i][k]
            if total != (f[j] if j == k else zero):
                return False
    return True


# ---------------------------------------------------------------------------
# Isometries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Isometry:
    """An exact matrix g with g^T F g = F and det g = +1 (an element of SO(f))."""

    form: DiagonalForm
    matrix: tuple

    def __post_init__(self):
        field = self.form.field
        size = self.form.dim
        rows = tuple(tuple(field.coerce(x) for x in row) for row in self.matrix)
        if len(rows) != size or any(len(r) != size for r in rows):
            raise ValueError(f"matrix must be {size}x{size}")
        object.__setattr__(self, "matrix", rows)
        if not preserves_form(self.form, rows):
            raise ValueError("matrix does not preserve the form")
        if _mat_det(field, rows) != 1:
            raise ValueError("matrix does not have determinant +1")

    @classmethod
    def identity(cls, form: DiagonalForm) -> "Isometry":
        return cls(form, identity_matrix(form.field, form.dim))

    @classmethod
    def from_reflections(cls, form: DiagonalForm, vectors) -> "Isometry":
        """Product of the reflections in the given vectors (must be even in number)."""
        out = identity_matrix(form.field, form.dim)
        for v in vectors:
            out = mat_mul(out, reflect(v, form))
        return cls(form, out)

    def __mul__(self, other: "Isometry") -> "Isometry":
        if not isinstance(other, Isometry):
            return NotImplemented
        if other.form != self.form:
            raise ValueError("isometries of different forms")
        return Isometry(self.form, mat_mul(self.matrix, other.matrix))

    def inverse(self) -> "Isometry":
        # g^-1 = F^-1 g^T F for an isometry of F = diag(f)
        f = self.form.coefficients
        size = self.form.dim
        rows = tuple(
            tuple(self.matrix[j][i] * f[j] / f[i] for j in range(size)) for i in range(size)
        )
        return Isometry(self.form, rows)


# ---------------------------------------------------------------------------
# Admissibility and the SO_0 component
# ---------------------------------------------------------------------------


def _signs_at(form: DiagonalForm, place: int) -> tuple[int, ...]:
    return tuple(sign_at(c, place) for c in form.coefficients)


def admissibility_check(form: DiagonalForm) -> bool:
    """True iff the form has signature (1, n) at the Id place, up to a global
    sign flip, and is definite at every other real place."""
    signs = _signs_at(form, form.field.id_place)
    if signs.count(1) not in (1, form.dim - 1):
        return False
    for place in form.field.non_id_places():
        other = _signs_at(form, place)
        if len(set(other)) != 1:
            return False
    return True


def _hyperbolic_axis(form: DiagonalForm) -> int:
    # index of the coefficient carrying the (1, n) direction at Id, i.e. the
    # minority sign; a global flip by -1 does not move it
    if not admissibility_check(form):
        raise ValueError("form is not admissible")
    signs = _signs_at(form, form.field.id_place)
    minority = 1 if signs.count(1) == 1 else -1
    return signs.index(minority)


def so0_membership(g: Isometry) -> bool:
    """True iff g preserves the positive cone component at the Id place.

    With x the coordinate vector of the hyperbolic axis, the condition
    B(g x, x) > 0 at Id reduces to the diagonal entry of g on that axis being
    positive at Id (the form coefficient cancels against its own sign).
    """
    axis = _hyperbolic_axis(g.form)
    return sign_at(g.matrix[axis][axis], g.form.field.id_place) == 1


# ---------------------------------------------------------------------------
# Reflections and the constructive decomposition
# ---------------------------------------------------------------------------


def reflect(v, form: DiagonalForm) -> tuple:
    """Matrix of the reflection x -> x - 2 B(x, v)/f(v) * v (determinant -1).

    Returned as a raw orthogonal matrix rather than an Isometry so that odd
    products can be composed internally.
    """
    v = form.coerce_vector(v)
    qv = form.evaluate(v)
    if not qv:
        raise ValueError("isotropic reflection vector")
    f = form.coefficients
    size = form.dim
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            t = -2 * f[j] * v[j] * v[i] / qv
            if i == j:
                t = t + 1
            row.append(t)
        rows.append(tuple(row))
    return tuple(rows)


def _vector_sub(u, v):
    return tuple(x - y for x, y in zip(u, v))


def _primitive_vector(field: TotallyRealField, v) -> tuple:
    # rescale by a positive rational to clear denominators and common integer
    # factors, then flip the sign so the first nonzero coordinate is positive
    # at Id; rational rescaling leaves the reflection and the square class of
    # f(v) unchanged
    parts: list[Fraction] = []
    for x in v:
        if isinstance(x, QuadFieldElem):
            parts.extend((x.a, x.b))
        else:
            parts.append(Fraction(x))
    den = 1
    for p in parts:
        den = lcm(den, p.denominator)
    num = 0
    for p in parts:
        num = gcd(num, p.numerator * (den // p.denominator))
    scale = Fraction(den, num)
    w = tuple(x * scale for x in v)
    first = next(x for x in w if x)
    if sign_at(first, field.id_place) == -1:
        w = tuple(-x for x in w)
    return w


def decompose_matrix(form: DiagonalForm, matrix, pivot_order=None) -> list:
    """Reflection vectors whose product, left to right, equals `matrix`.

    Accepts any exact isometry of the form, special or not. Basis vectors are
    processed in index order unless `pivot_order` gives another permutation.
    When the natural reflection vector g x - x is isotropic, the standard
    two-reflection correction applies: reflect in x first, then in the now
    anisotropic difference. At most 2(n+1) vectors are produced, at most n+1
    when no correction is needed.
    """
    field = form.field
    size = form.dim
    order = tuple(range(size)) if pivot_order is None else tuple(pivot_order)
    if sorted(order) != list(range(size)):
        raise ValueError(f"pivot order must be a permutation of 0..{size - 1}")
    if not preserves_form(form, matrix):
        raise ValueError("matrix does not preserve the form")
    h = tuple(tuple(field.coerce(x) for x in row) for row in matrix)
    vectors = []
    for i in order:
        x = form.basis_vector(i)
        y = mat_vec(h, x)
        if y == x:
            continue
        w = _vector_sub(y, x)
        if form.evaluate(w):
            vectors.append(w)
            h = mat_mul(reflect(w, form), h)
        else:
            vectors.append(x)
            h = mat_mul(reflect(x, form), h)
            w = _vector_sub(mat_vec(h, x), x)
            if not form.evaluate(w):
                raise InternalConsistencyError("two-reflection correction stayed isotropic")
            vectors.append(w)
            h = mat_mul(reflect(w, form), h)
    if h != identity_matrix(field, size):
        raise InternalConsistencyError("decomposition did not reach the identity")
    return [_primitive_vector(field, v) for v in vectors]


@dataclass(frozen=True)
class ReflectionDecomposition:
    """Ordered anisotropic vectors whose reflections multiply to the source."""

    form: DiagonalForm
    vectors: tuple

    @property
    def length(self) -> int:
        return len(self.vectors)

    def recompose(self) -> tuple:
        out = identity_matrix(self.form.field, self.form.dim)
        for v in self.vectors:
            out = mat_mul(out, reflect(v, self.form))
        return out


def cartan_dieudonne_decompose(g: Isometry, pivot_order=None) -> ReflectionDecomposition:
    """Deterministic reflection decomposition of a special isometry.

    The length is always even since det g = +1.
    """
    vectors = decompose_matrix(g.form, g.matrix, pivot_order)
    if len(vectors) % 2:
        raise InternalConsistencyError("odd reflection count for a special isometry")
    return ReflectionDecomposition(g.form, tuple(vectors))


# ---------------------------------------------------------------------------
# Spinor norm
# ---------------------------------------------------------------------------


def _spinor_class(form: DiagonalForm, vectors) -> SquareClass:
    field = form.field
    out = SquareClass.trivial(field)
    for v in vectors:
        out = out * SquareClass.of(field, form.evaluate(v))
    return out


def spinor_norm(g: Isometry) -> SquareClass:
    """Class of prod f(v_i) in k*/(k*)^2 over a reflection decomposition of g.

    Independent of the decomposition, so any pivot order gives the same class.
    """
    return _spinor_class(g.form, cartan_dieudonne_decompose(g).vectors)


def spinor_norm_of_matrix(form: DiagonalForm, matrix) -> tuple[SquareClass, int]:
    """Spinor norm of any exact orthogonal matrix, plus its determinant sign.

    Determinant -1 inputs lie outside SO(f); the returned sign flags them.
    """
    vectors = decompose_matrix(form, matrix)
    return _spinor_class(form, vectors), -1 if len(vectors) % 2 else 1


# ---------------------------------------------------------------------------
# Lattice stabilization and the normalizer index report
# ---------------------------------------------------------------------------


def stabilizes_standard_lattice(g: Isometry) -> bool:
    """True iff g maps O_k^(n+1) onto itself: integral entries, unit determinant."""
    if any(not is_algebraic_integer(x) for row in g.matrix for x in row):
        return False
    det = _mat_det(g.form.field, g.matrix)
    if isinstance(det, QuadFieldElem):
        return is_algebraic_integer(det) and det.norm() in (1, -1)
    return det in (1, -1)


def _golden(field: TotallyRealField) -> QuadFieldElem:
    return field.coerce(QuadFieldElem(Fraction(1, 2), Fraction(1, 2), 5))


def _fixed_class_representatives(field: TotallyRealField) -> tuple:
    # the two fixed square classes entering the normalizer index count; known
    # only for Q and Q(sqrt 5)
    if field.is_rationals:
        return (field.coerce(1), field.coerce(-1))
    if field.d == 5:
        phi = _golden(field)
        nontrivial = phi.conjugate() if field.id_place == 0 else phi
        return (field.coerce(1), nontrivial)
    raise ValueError("normalizer index data available only for Q and Q(sqrt 5)")


def standard_admissible_form(field: TotallyRealField, n: int) -> DiagonalForm:
    """The admissible diagonal form <c, -1, ..., -1> used for lattice checks.

    c = 1 over Q; over Q(sqrt 5), c is whichever of the golden ratio and its
    conjugate is positive at the Id place (so the form is negative definite at
    the other real place).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if field.is_rationals:
        c = field.coerce(1)
    elif field.d == 5:
        phi = _golden(field)
        c = phi if field.id_place == 0 else phi.conjugate()
    else:
        raise ValueError("standard admissible form available only for Q and Q(sqrt 5)")
    return DiagonalForm(field, (c,) + (field.coerce(-1),) * n)


@dataclass(frozen=True)
class NormalizerReport:
    """Verification record for the index of a principal subgroup in its normalizer."""

    field: TotallyRealField
    n: int
    index_gamma_lambda: int
    witness: Isometry
    witness_in_so0: bool
    witness_spinor_class: SquareClass
    form: DiagonalForm
    fixed_classes: tuple
    fixed_classes_in_k_infinity_star: tuple
    witness_spinor_class_is_fixed: bool
    witness_stabilizes_lattice: bool


def normalizer_index_check(field: TotallyRealField, n: int) -> NormalizerReport:
    """Index = #(fixed square classes), with diag(-1,-1,1,...,1) as the witness
    normalizing element outside SO_0.

    The witness is verified to preserve the standard admissible diagonal form,
    to stabilize the lattice O_k^(n+1), and to fail SO_0 membership; each
    fixed representative is checked to lie in k_infinity^*.
    """
    if n < 4 or n % 2:
        raise ValueError(f"n must be even and >= 4, got {n}")
    fixed = _fixed_class_representatives(field)
    form = standard_admissible_form(field, n)
    one = field.one()
    diag = (-one, -one) + (one,) * (n - 1)
    witness = Isometry(
        form,
        tuple(tuple(diag[i] if i == j else field.zero() for j in range(n + 1)) for i in range(n + 1)),
    )
    fixed_classes = tuple(SquareClass.of(field, t) for t in fixed)
    witness_class = spinor_norm(witness)
    return NormalizerReport(
        field=field,
        n=n,
        index_gamma_lambda=len(fixed_classes),
        witness=witness,
        witness_in_so0=so0_membership(witness),
        witness_spinor_class=witness_class,
        form=form,
        fixed_classes=fixed_classes,
        fixed_classes_in_k_infinity_star=tuple(in_k_infinity_star(t, field) for t in fixed),
        witness_spinor_class_is_fixed=any(witness_class == t for t in fixed_classes),
        witness_stabilizes_lattice=stabilizes_standard_lattice(witness),
    )
