"""Symbolic and numerical verification of conformal-algebra localisation identities."""

from .algebras import (
    AlgebraSpec,
    derived_definition,
    expand_derived,
    jacobi,
    make_algebra,
)
from .ncalg import (
    Expr,
    InconclusiveError,
    RejectedInput,
    commutator,
    equals,
    normalize,
    sym_product,
)
from .parser import format_expr, parse_expr
from .scalar import Scalar

__all__ = [
    "AlgebraSpec",
    "Expr",
    "InconclusiveError",
    "RejectedInput",
    "Scalar",
    "commutator",
    "derived_definition",
    "equals",
    "expand_derived",
    "format_expr",
    "jacobi",
    "make_algebra",
    "normalize",
    "parse_expr",
    "sym_product",
]
