"""Shared factories for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from orbinv import DiagonalForm, Isometry, QuadFieldElem, TotallyRealField

SEED = 20260808


def rationals() -> TotallyRealField:
    return TotallyRealField.rationals()


def quad_field(d: int, id_place: int = 0) -> TotallyRealField:
    return TotallyRealField.real_quadratic(d, id_place)


def golden() -> QuadFieldElem:
    return QuadFieldElem(Fraction(1, 2), Fraction(1, 2), 5)


def admissible_form(field: TotallyRealField, dim: int) -> DiagonalForm:
    """<1, -1, ..., -1> over Q, <phi, -1, ..., -1> over Q(sqrt 5)."""
    lead = 1 if field.is_rationals else golden()
    return DiagonalForm(field, (lead,) + (-1,) * (dim - 1))


def random_anisotropic_vectors(rng: random.Random, form: DiagonalForm, count: int) -> list:
    out = []
    while len(out) < count:
        v = tuple(rng.randint(-5, 5) for _ in range(form.dim))
        if any(v) and form.evaluate(v) != 0:
            out.append(v)
    return out


def random_isometry(rng: random.Random, form: DiagonalForm) -> Isometry:
    """Product of 2 to 8 reflections in random anisotropic integer vectors."""
    count = rng.choice([2, 4, 6, 8])
    return Isometry.from_reflections(form, random_anisotropic_vectors(rng, form, count))
