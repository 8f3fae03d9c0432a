"""Exact arithmetic: fields, truncated series, polynomials and matrix kernels."""

from .fields import (
    QQ,
    ExtensionField,
    Field,
    FieldElement,
    GF,
    PrimeField,
    Rationals,
    extension_field,
    field_from_spec,
    field_label,
    is_irreducible,
)
from .kernels import BACKEND
from .matrix import ExactMatrix, kernel_basis, rank, rref
from .series import Series, hensel_root

__all__ = [
    "BACKEND",
    "QQ",
    "ExactMatrix",
    "ExtensionField",
    "Field",
    "FieldElement",
    "GF",
    "PrimeField",
    "Rationals",
    "Series",
    "extension_field",
    "field_from_spec",
    "field_label",
    "hensel_root",
    "is_irreducible",
    "kernel_basis",
    "rank",
    "rref",
]
