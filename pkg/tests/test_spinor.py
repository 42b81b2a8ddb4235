import random
from fractions import Fraction

import pytest

from conftest import (
    SEED,
    admissible_form,
    golden,
    quad_field,
    random_anisotropic_vectors,
    random_isometry,
    rationals,
)
from orbinv import (
    DiagonalForm,
    Isometry,
    QuadFieldElem,
    SquareClass,
    admissibility_check,
    cartan_dieudonne_decompose,
    decompose_matrix,
    in_k_infinity_star,
    normalizer_index_check,
    preserves_form,
    reflect,
    so0_membership,
    spinor_norm,
    spinor_norm_of_matrix,
    stabilizes_standard_lattice,
    standard_admissible_form,
)

Q = rationals()
K5 = quad_field(5)
LORENTZ5 = DiagonalForm(Q, (1, -1, -1, -1, -1))
LORENTZ3 = DiagonalForm(Q, (1, -1, -1))


def diag_matrix(form, entries):
    zero = form.field.zero()
    return tuple(
        tuple(form.field.coerce(entries[i]) if i == j else zero for j in range(form.dim))
        for i in range(form.dim)
    )


# --- admissibility ---


def test_admissibility_examples():
    assert admissibility_check(LORENTZ5)
    assert not admissibility_check(DiagonalForm(K5, (1, -1, -1, -1, -1)))
    assert admissibility_check(DiagonalForm(K5, (golden(), -1, -1, -1, -1)))


def test_admissibility_accepts_global_sign_flip():
    assert admissibility_check(DiagonalForm(Q, (-1, 1, 1, 1)))
    assert not admissibility_check(DiagonalForm(Q, (1, 1, -1, -1)))


def test_form_validation():
    with pytest.raises(ValueError):
        DiagonalForm(Q, (1, -1))  # dimension below 3
    with pytest.raises(ValueError):
        DiagonalForm(Q, (1, 0, -1))


# --- reflections ---


def test_reflection_examples():
    assert reflect((0, 1, 0, 0, 0), LORENTZ5) == diag_matrix(LORENTZ5, (1, -1, 1, 1, 1))
    assert reflect((1, 0, 0, 0, 0), LORENTZ5) == diag_matrix(LORENTZ5, (-1, 1, 1, 1, 1))
    with pytest.raises(ValueError):
        reflect((1, 0, 1, 0, 0), LORENTZ5)  # isotropic: f(e0 + e2) = 0


def test_reflection_is_an_involution():
    rng = random.Random(2)
    for form in (LORENTZ3, admissible_form(K5, 3)):
        for v in random_anisotropic_vectors(rng, form, 10):
            r = reflect(v, form)
            assert preserves_form(form, r)
            from orbinv.spinor import identity_matrix, mat_mul

            assert mat_mul(r, r) == identity_matrix(form.field, form.dim)


# --- isometries ---


def test_isometry_validation():
    with pytest.raises(ValueError):
        Isometry(LORENTZ3, ((1, 0, 0), (0, 1, 0), (0, 0, 2)))  # not orthogonal
    with pytest.raises(ValueError):
        Isometry(LORENTZ3, diag_matrix(LORENTZ3, (-1, 1, 1)))  # determinant -1
    with pytest.raises(ValueError):
        Isometry(LORENTZ3, ((1, 0), (0, 1)))


def test_isometry_products_and_inverses():
    rng = random.Random(4)
    form = admissible_form(K5, 3)
    for _ in range(10):
        g = random_isometry(rng, form)
        h = random_isometry(rng, form)
        gh = g * h  # constructor revalidates: product is an isometry
        assert (gh * h.inverse()).matrix == g.matrix
        assert (g * g.inverse()).matrix == Isometry.identity(form).matrix


# --- decomposition ---


def test_identity_decomposes_to_nothing():
    dec = cartan_dieudonne_decompose(Isometry.identity(LORENTZ5))
    assert dec.length == 0
    assert dec.recompose() == Isometry.identity(LORENTZ5).matrix


def test_witness_decomposes_into_two_coordinate_reflections():
    g = Isometry(LORENTZ5, diag_matrix(LORENTZ5, (-1, -1, 1, 1, 1)))
    dec = cartan_dieudonne_decompose(g)
    assert [tuple(map(int, v)) for v in dec.vectors] == [
        (1, 0, 0, 0, 0),
        (0, 1, 0, 0, 0),
    ]


def test_rational_boost_block_decomposition():
    m = (
        (Fraction(5, 3), Fraction(4, 3), 0),
        (Fraction(4, 3), Fraction(5, 3), 0),
        (0, 0, 1),
    )
    g = Isometry(LORENTZ3, m)
    dec = cartan_dieudonne_decompose(g)
    assert dec.length == 2
    assert dec.recompose() == g.matrix


def test_decomposition_length_bound_and_parity():
    rng = random.Random(SEED)
    for form in (LORENTZ3, LORENTZ5, admissible_form(K5, 3)):
        for _ in range(10):
            g = random_isometry(rng, form)
            dec = cartan_dieudonne_decompose(g)
            assert dec.length % 2 == 0
            assert dec.length <= 2 * form.dim
            assert dec.recompose() == g.matrix


def test_isotropic_difference_correction_path():
    # send e1 to y = (5,1,3,4): then y - e1 = (5,0,3,4) is isotropic, so a
    # decomposition pivoting on index 1 first must take the two-reflection
    # correction branch
    form = DiagonalForm(Q, (1, -1, -1, -1))
    y = (5, 1, 3, 4)
    g = Isometry.from_reflections(form, [y, (5, 2, 3, 4)])  # second vector is y + e1
    from orbinv.spinor import mat_vec

    image = mat_vec(g.matrix, form.basis_vector(1))
    assert image == form.coerce_vector(y)
    assert form.evaluate(tuple(a - b for a, b in zip(image, form.basis_vector(1)))) == 0
    dec_vectors = decompose_matrix(form, g.matrix, pivot_order=(1, 0, 2, 3))
    recomposed = Isometry.from_reflections(form, dec_vectors)
    assert recomposed.matrix == g.matrix
    # the corrected decomposition still lands in the same square class
    cls = SquareClass.trivial(Q)
    for v in dec_vectors:
        cls = cls * SquareClass.of(Q, form.evaluate(v))
    assert cls == spinor_norm(g)


def test_bad_pivot_order_rejected():
    g = Isometry.identity(LORENTZ3)
    with pytest.raises(ValueError):
        cartan_dieudonne_decompose(g, pivot_order=(0, 1))
    with pytest.raises(ValueError):
        cartan_dieudonne_decompose(g, pivot_order=(0, 1, 1))


def test_decompose_rejects_non_isometries():
    with pytest.raises(ValueError):
        decompose_matrix(LORENTZ3, ((2, 0, 0), (0, 1, 0), (0, 0, 1)))


# --- spinor norm ---


def test_spinor_norm_examples():
    assert spinor_norm(Isometry.identity(LORENTZ5)).is_trivial
    g = Isometry(LORENTZ5, diag_matrix(LORENTZ5, (1, -1, -1, 1, 1)))
    assert spinor_norm(g).is_trivial  # (-1)(-1) is a square
    w = Isometry(LORENTZ5, diag_matrix(LORENTZ5, (-1, -1, 1, 1, 1)))
    assert spinor_norm(w) == SquareClass.of(Q, -1)


def test_spinor_norm_multiplicative():
    rng = random.Random(SEED + 1)
    for form in (LORENTZ3, admissible_form(K5, 3)):
        samples = [random_isometry(rng, form) for _ in range(12)]
        classes = [spinor_norm(g) for g in samples]
        for i in range(0, 12, 2):
            assert spinor_norm(samples[i] * samples[i + 1]) == classes[i] * classes[i + 1]


def test_spinor_norm_independent_of_pivot_order():
    rng = random.Random(SEED + 2)
    form = admissible_form(K5, 3)
    orders = [(0, 1, 2), (2, 1, 0), (1, 2, 0)]
    for _ in range(6):
        g = random_isometry(rng, form)
        reference = spinor_norm(g)
        for order in orders:
            dec = cartan_dieudonne_decompose(g, pivot_order=order)
            assert dec.recompose() == g.matrix
            cls = SquareClass.trivial(form.field)
            for v in dec.vectors:
                cls = cls * SquareClass.of(form.field, form.evaluate(v))
            assert cls == reference


def test_spinor_norm_of_matrix_flags_determinant():
    refl = reflect((1, 0, 0, 0, 0), LORENTZ5)
    cls, det = spinor_norm_of_matrix(LORENTZ5, refl)
    assert det == -1
    assert cls == SquareClass.of(Q, 1)  # f(e0) = 1
    cls, det = spinor_norm_of_matrix(LORENTZ5, diag_matrix(LORENTZ5, (-1, -1, 1, 1, 1)))
    assert det == 1 and cls == SquareClass.of(Q, -1)


def test_sampled_spinor_classes_have_representatives_in_k_infinity():
    rng = random.Random(SEED + 3)
    for dim in (3, 5):
        form = admissible_form(K5, dim)
        for _ in range(10):
            cls = spinor_norm(random_isometry(rng, form))
            assert in_k_infinity_star(cls.representative, K5)


# --- SO_0 membership ---


def test_so0_examples():
    assert so0_membership(Isometry.identity(LORENTZ5))
    w = Isometry(LORENTZ5, diag_matrix(LORENTZ5, (-1, -1, 1, 1, 1)))
    assert not so0_membership(w)
    m = (
        (Fraction(5, 3), Fraction(4, 3), 0),
        (Fraction(4, 3), Fraction(5, 3), 0),
        (0, 0, 1),
    )
    assert so0_membership(Isometry(LORENTZ3, m))


def test_so0_requires_admissible_form():
    form = DiagonalForm(Q, (1, 1, -1, -1))
    g = Isometry.identity(form)
    with pytest.raises(ValueError):
        so0_membership(g)


def test_so0_is_a_sign_homomorphism():
    rng = random.Random(SEED + 4)
    form = LORENTZ3
    samples = [random_isometry(rng, form) for _ in range(12)]
    flags = [so0_membership(g) for g in samples]
    for i in range(0, 12, 2):
        product_flag = so0_membership(samples[i] * samples[i + 1])
        assert product_flag == (flags[i] == flags[i + 1])


def test_so0_with_flipped_signature():
    form = DiagonalForm(Q, (-1, 1, 1, 1, 1))
    w = Isometry(form, diag_matrix(form, (-1, -1, 1, 1, 1)))
    assert not so0_membership(w)
    assert so0_membership(Isometry.identity(form))


# --- lattice stabilization and the normalizer report ---


def test_lattice_stabilization():
    w = Isometry(LORENTZ5, diag_matrix(LORENTZ5, (-1, -1, 1, 1, 1)))
    assert stabilizes_standard_lattice(w)
    m = (
        (Fraction(5, 3), Fraction(4, 3), 0),
        (Fraction(4, 3), Fraction(5, 3), 0),
        (0, 0, 1),
    )
    assert not stabilizes_standard_lattice(Isometry(LORENTZ3, m))
    # golden-ratio multiples are integral over Q(sqrt 5)
    phi = golden()
    form5 = standard_admissible_form(K5, 4)
    assert stabilizes_standard_lattice(Isometry.identity(form5))


def test_standard_admissible_forms():
    assert standard_admissible_form(Q, 4).coefficients[0] == 1
    f5 = standard_admissible_form(K5, 4)
    assert admissibility_check(f5)
    assert f5.coefficients[0] == golden()
    flipped = standard_admissible_form(quad_field(5, id_place=1), 4)
    assert admissibility_check(flipped)
    assert flipped.coefficients[0] == golden().conjugate()
    with pytest.raises(ValueError):
        standard_admissible_form(quad_field(10), 4)


@pytest.mark.parametrize("label", ["Q", "Q(sqrt 5)"])
@pytest.mark.parametrize("n", [4, 6])
def test_normalizer_report(label, n):
    from orbinv import TotallyRealField

    field = TotallyRealField.from_label(label)
    report = normalizer_index_check(field, n)
    assert report.index_gamma_lambda == 2
    assert not report.witness_in_so0
    assert report.witness_stabilizes_lattice
    assert report.witness_spinor_class_is_fixed
    assert all(report.fixed_classes_in_k_infinity_star)
    assert report.witness.matrix[0][0] == -1 and report.witness.matrix[1][1] == -1


def test_normalizer_report_witness_class_over_q():
    report = normalizer_index_check(Q, 4)
    assert report.witness_spinor_class == SquareClass.of(Q, -1)


def test_normalizer_report_golden_fixed_set():
    report = normalizer_index_check(K5, 4)
    reps = [c.representative for c in report.fixed_classes]
    assert reps[0] == 1
    assert reps[1] == golden().conjugate()  # (1 - sqrt 5)/2
    assert in_k_infinity_star(reps[1], K5)


def test_normalizer_rejects_unsupported_inputs():
    with pytest.raises(ValueError):
        normalizer_index_check(quad_field(10), 4)
    with pytest.raises(ValueError):
        normalizer_index_check(Q, 5)
    with pytest.raises(ValueError):
        normalizer_index_check(Q, 2)
