"""Batch command-line front end with byte-deterministic JSON output.

All integer payloads are emitted as decimal strings; field elements use the
exact wire encoding from `exact_arith`; the only raw JSON numbers are the
explicitly float-valued growth-bound fields, printed to full stated precision.
Exit codes: 0 success, 2 validation error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

import mpmath

from .exact_arith import (
    InternalConsistencyError,
    TotallyRealField,
    format_element,
    in_k_infinity_star,
    parse_element,
)
from . import field_invariants as fi
from . import growth_bound as gb
from . import spinor

PRECISION_ENV = "ORBINV_PRECISION_BITS"

_NUMBER_TOKEN_RE = re.compile(r"^-?\d+(\.\d+)?([eE][-+]?\d+)?$")


class CommandError(Exception):
    def __init__(self, error: str, detail: str):
        super().__init__(detail)
        self.error = error
        self.detail = detail


class _Parser(argparse.ArgumentParser):
    # argparse would print usage and exit; surface a machine-readable error instead
    def error(self, message):
        raise CommandError("invalid-arguments", message)


class _FloatToken(str):
    """A pre-rendered JSON number token, emitted without quotes."""


def _float_token(value: mpmath.mpf, precision_bits: int) -> _FloatToken:
    digits = max(17, int(precision_bits * 0.30103) + 2)
    text = mpmath.nstr(value, digits)
    if not _NUMBER_TOKEN_RE.match(text):
        raise InternalConsistencyError(f"float rendering produced a non-number token {text!r}")
    return _FloatToken(text)


def _dumps(doc) -> str:
    tokens: list[str] = []

    def strip(obj):
        if isinstance(obj, _FloatToken):
            tokens.append(str(obj))
            return f"@@RAWFLOAT{len(tokens) - 1}@@"
        if isinstance(obj, dict):
            return {k: strip(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [strip(v) for v in obj]
        return obj

    text = json.dumps(strip(doc), indent=2)
    for i, tok in enumerate(tokens):
        text = text.replace(f'"@@RAWFLOAT{i}@@"', tok)
    return text


def _parse_field(label: str, id_place: int = 0) -> TotallyRealField:
    try:
        return TotallyRealField.from_label(label, id_place)
    except ValueError as exc:
        raise CommandError("invalid-field", str(exc))


def _parse_form(field: TotallyRealField, text: str) -> spinor.DiagonalForm:
    coeffs = [parse_element(part, field) for part in text.split(",")]
    return spinor.DiagonalForm(field, tuple(coeffs))


def _parse_matrix(field: TotallyRealField, text: str):
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CommandError("invalid-matrix", f"matrix is not valid JSON: {exc}")
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise CommandError("invalid-matrix", "matrix must be a JSON array of arrays")
    out = []
    for row in rows:
        parsed = []
        for entry in row:
            if not isinstance(entry, str):
                raise CommandError("invalid-matrix", "matrix entries must be element strings")
            parsed.append(parse_element(entry, field))
        out.append(tuple(parsed))
    return tuple(out)


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV, "128")
    try:
        bits = int(raw)
    except ValueError:
        raise CommandError("invalid-environment", f"{PRECISION_ENV}={raw!r} is not an integer")
    return bits


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _invariants_payload(inv: fi.FieldInvariants) -> dict:
    units = inv.units
    return {
        "field": inv.field.label(),
        "h": str(inv.h),
        "h2": str(inv.h2),
        "h_plus": str(inv.h_plus),
        "fundamental_unit": None
        if units.fundamental_unit is None
        else format_element(units.fundamental_unit),
        "unit_norm": None if units.unit_norm is None else str(units.unit_norm),
        "unit_index_infinity": str(units.unit_index_infinity),
        "h_inf_2": str(inv.h_inf_2),
        "uniqueness_certified": inv.uniqueness_certified,
    }


def _cmd_field_invariants(args) -> dict:
    field = _parse_field(args.field, args.id_place)
    return _invariants_payload(fi.restricted_class_number(field))


def _cmd_sweep(args) -> dict:
    if args.dmax < 2:
        raise CommandError("invalid-arguments", "--dmax must be at least 2")
    rows = []
    all_agree = True
    for d in fi.squarefree_range(args.dmax):
        field = TotallyRealField.real_quadratic(d)
        inv = fi.restricted_class_number(field)
        analytic = fi.analytic_class_number_oracle(d)
        agree = analytic == inv.h
        all_agree = all_agree and agree
        row = {"d": str(d), "D": str(fi.fundamental_discriminant(d))}
        row.update(_invariants_payload(inv))
        row["analytic_h"] = str(analytic)
        row["oracle_agreement"] = agree
        rows.append(row)
    return {
        "dmax": str(args.dmax),
        "count": str(len(rows)),
        "all_oracle_agreement": all_agree,
        "rows": rows,
    }


def _spinor_inputs(args):
    field = _parse_field(args.field)
    form = _parse_form(field, args.form)
    matrix = _parse_matrix(field, args.matrix)
    if len(matrix) != form.dim or any(len(r) != form.dim for r in matrix):
        raise CommandError("invalid-matrix", f"matrix must be {form.dim}x{form.dim}")
    if not spinor.preserves_form(form, matrix):
        raise CommandError("invalid-matrix", "matrix does not preserve the form")
    return field, form, matrix


def _cmd_spinor_norm(args) -> dict:
    field, form, matrix = _spinor_inputs(args)
    cls, det = spinor.spinor_norm_of_matrix(form, matrix)
    in_so0 = None
    if det == 1 and spinor.admissibility_check(form):
        in_so0 = spinor.so0_membership(spinor.Isometry(form, matrix))
    return {
        "spinor_class": format_element(cls.representative),
        "in_k_infinity_star": in_k_infinity_star(cls.representative, field),
        "in_so0": in_so0,
        "decomposition_length": str(len(spinor.decompose_matrix(form, matrix))),
        "determinant": str(det),
    }


def _cmd_decompose(args) -> dict:
    field, form, matrix = _spinor_inputs(args)
    vectors = spinor.decompose_matrix(form, matrix)
    cls, det = spinor.spinor_norm_of_matrix(form, matrix)
    return {
        "vectors": [[format_element(x) for x in v] for v in vectors],
        "length": str(len(vectors)),
        "determinant": str(det),
        "spinor_class": format_element(cls.representative),
    }


def _cmd_check_normalizer(args) -> dict:
    field = _parse_field(args.field)
    report = spinor.normalizer_index_check(field, args.n)
    return {
        "field": field.label(),
        "n": str(report.n),
        "index_gamma_lambda": str(report.index_gamma_lambda),
        "fixed_square_classes": [format_element(c.representative) for c in report.fixed_classes],
        "fixed_classes_in_k_infinity_star": list(report.fixed_classes_in_k_infinity_star),
        "form": [format_element(c) for c in report.form.coefficients],
        "witness_matrix": [[format_element(x) for x in row] for row in report.witness.matrix],
        "witness_in_so0": report.witness_in_so0,
        "witness_spinor_class": format_element(report.witness_spinor_class.representative),
        "witness_spinor_class_is_fixed": report.witness_spinor_class_is_fixed,
        "witness_stabilizes_lattice": report.witness_stabilizes_lattice,
    }


def _cmd_growth_bound(args) -> dict:
    precision = args.precision if args.precision is not None else _default_precision()
    if args.certify is not None:
        if args.r is not None or args.degree is not None:
            raise CommandError("invalid-arguments", "--certify excludes --r/--degree")
        cert = gb.superexponential_certificate(args.certify, precision)
        return {
            "r_max": str(cert.r_max),
            "precision_bits": str(cert.precision_bits),
            "ratio_identity_verified": cert.ratio_identity_verified,
            "value_increase_threshold": None
            if cert.value_increase_threshold is None
            else str(cert.value_increase_threshold),
            "factorial_ratio_threshold": None
            if cert.factorial_ratio_threshold is None
            else str(cert.factorial_ratio_threshold),
            "monotone_from_threshold": cert.monotone_from_threshold,
            "threshold_reached": cert.threshold_reached,
            "rows": [
                {
                    "r": str(v.r),
                    "numerator": str(v.exact_numerator),
                    "pi_power": str(v.pi_power),
                    "float_value": _float_token(v.float_value, v.precision_bits),
                }
                for v in cert.values
            ],
        }
    if args.r is None:
        raise CommandError("invalid-arguments", "either --r or --certify is required")
    value = gb.euler_char_bound(args.r, args.degree if args.degree is not None else 1, precision)
    return {
        "numerator": str(value.exact_numerator),
        "pi_power": str(value.pi_power),
        "float_value": _float_token(value.float_value, value.precision_bits),
        "precision_bits": str(value.precision_bits),
    }


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="orbinv", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, handler, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(handler=handler)
        p.add_argument("--out", help="also write the JSON document to this path")
        return p

    p = add("field-invariants", _cmd_field_invariants,
            help="class numbers, units and the restricted 2-class number")
    p.add_argument("--field", required=True, help='"Q" or "Q(sqrt D)"')
    p.add_argument("--id-place", type=int, default=0, dest="id_place")

    p = add("sweep", _cmd_sweep,
            help="invariants for all squarefree d up to --dmax, with the analytic oracle")
    p.add_argument("--dmax", type=int, required=True)

    for name, handler in (("spinor-norm", _cmd_spinor_norm), ("decompose", _cmd_decompose)):
        p = add(name, handler, help=f"{name} of an exact isometry of a diagonal form")
        p.add_argument("--field", required=True)
        p.add_argument("--form", required=True, help='comma-separated coefficients "a0,a1,..."')
        p.add_argument("--matrix", required=True, help="JSON array of arrays of element strings")

    p = add("check-normalizer", _cmd_check_normalizer,
            help="normalizer index report with the diag(-1,-1,1,...,1) witness")
    p.add_argument("--field", required=True)
    p.add_argument("--n", type=int, required=True)

    p = add("growth-bound", _cmd_growth_bound,
            help="Euler characteristic lower bound, exact and float")
    p.add_argument("--r", type=int)
    p.add_argument("--degree", type=int)
    p.add_argument("--precision", type=int)
    p.add_argument("--certify", type=int, metavar="R_MAX")

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        doc = args.handler(args)
    except CommandError as exc:
        sys.stderr.write(_dumps({"error": exc.error, "detail": exc.detail}) + "\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(_dumps({"error": "validation", "detail": str(exc)}) + "\n")
        return 2
    except InternalConsistencyError as exc:
        sys.stderr.write(_dumps({"error": "internal-consistency", "detail": str(exc)}) + "\n")
        return 3
    payload = _dumps(doc) + "\n"
    sys.stdout.write(payload)
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
