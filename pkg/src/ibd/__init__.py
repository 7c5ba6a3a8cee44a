"""Integration by differentiation: operator rules for definite integrals with numerical oracles."""

from .cases import CaseRecord, run_case, verify_all
from .exact import ExactValue, PiMonomial
from .expr import ExpPoly, parse
from .kernels import DIVERGES, Kernel, elementary_laplace_kernel, limit_at_zero
from .psido import SeriesOp, ShiftSum
from .qcalc import QContext, jackson_integral, kurokawa_check
from .rules import apply_operator, laplace_eval

__version__ = "0.1.0"

__all__ = [
    "CaseRecord", "DIVERGES", "ExactValue", "ExpPoly", "Kernel", "PiMonomial", "QContext", "SeriesOp",
    "ShiftSum", "apply_operator", "elementary_laplace_kernel", "jackson_integral", "kurokawa_check",
    "laplace_eval", "limit_at_zero", "parse", "run_case", "verify_all",
]
