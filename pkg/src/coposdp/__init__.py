"""Copositivity detection for symmetric matrices and tensors by tight moment relaxations."""

__version__ = "0.1.0"

from .polyalg import (
    Polynomial,
    SymmetricTensor,
    eval_form,
    gradient,
    multiplier_polynomials,
    tensor_from_entries,
)
from .moment import TruncatedMomentSequence, localizing_template, moment_template, tms_of_point
from .relax import build_classic, build_refutation, build_tight, min_order
from .sdp import SdpProblem, SdpSolution, Status, solve
from .detect import DetectionReport, Refutation, Verdict, detect_copositivity, extract_point, sign_test
from .oracle import simplex_minimize, simplicial_partition_check, verify_refutation
from .instances import NAMES as BUILTIN_NAMES, builtin_example
from .cli import parse_tensor_file, serialize_tensor

__all__ = [
    "Polynomial",
    "SymmetricTensor",
    "eval_form",
    "gradient",
    "multiplier_polynomials",
    "tensor_from_entries",
    "TruncatedMomentSequence",
    "localizing_template",
    "moment_template",
    "tms_of_point",
    "build_classic",
    "build_refutation",
    "build_tight",
    "min_order",
    "SdpProblem",
    "SdpSolution",
    "Status",
    "solve",
    "DetectionReport",
    "Refutation",
    "Verdict",
    "detect_copositivity",
    "extract_point",
    "sign_test",
    "simplex_minimize",
    "simplicial_partition_check",
    "verify_refutation",
    "BUILTIN_NAMES",
    "builtin_example",
    "parse_tensor_file",
    "serialize_tensor",
]
