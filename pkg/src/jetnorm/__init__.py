"""Exact normal forms of matrices over truncated multivariate power series."""

from .errors import (ConfigurationError, DegreeRangeError, GuardrailError, InvalidInputError, JetnormError,
                     NotInSubspaceError, ParseError, ShapeError, SingularConstantTermError,
                     TruncationMismatchError, UnknownVariableError)
from .gradedlin import (GradedBasis, GradedSubspace, LinearOperatorMatrix, assemble_action, decompose, kernel,
                        preimage_nu, v_space, w_complement)
from .groups import GroupElementJet, GroupKind, LieElementJet, act, compose, exp_lie, invert_jet
from .jets import MatrixJet, SeriesJet, apply_diff_op, d_operator, inner_product
from .normalform import (NormalFormResult, check_pde, constant_preprocess, determinacy_report, jet_equivalence,
                         normal_form, one_variable_nf, verify_certificate)
from .parser import parse_poly_matrix
from .scalars import QQ, Field, GaussianRational

__all__ = [
    "ConfigurationError", "DegreeRangeError", "GuardrailError", "InvalidInputError", "JetnormError",
    "NotInSubspaceError", "ParseError", "ShapeError", "SingularConstantTermError", "TruncationMismatchError",
    "UnknownVariableError",
    "GradedBasis", "GradedSubspace", "LinearOperatorMatrix", "assemble_action", "decompose", "kernel",
    "preimage_nu", "v_space", "w_complement",
    "GroupElementJet", "GroupKind", "LieElementJet", "act", "compose", "exp_lie", "invert_jet",
    "MatrixJet", "SeriesJet", "apply_diff_op", "d_operator", "inner_product",
    "NormalFormResult", "check_pde", "constant_preprocess", "determinacy_report", "jet_equivalence",
    "normal_form", "one_variable_nf", "verify_certificate",
    "parse_poly_matrix", "QQ", "Field", "GaussianRational",
]
