"""latgad: vertex-isolating gadget construction and SAT/parity-to-CVP
instance compilation, with brute-force validation oracles."""

from .errors import (
    DegenerateConstructionError,
    InvalidInputError,
    LatgadError,
    NumericDegeneracyError,
    ResourceLimitError,
    UnsupportedParametersError,
    VerificationError,
)
from .formulas import Clause, CspFormula, XorConstraint, parse_dimacs, parse_xor
from .gadgets import (
    IsolatingGadget,
    OnOffGadget,
    VerificationReport,
    even_p_obstruction,
    find_isolating_parallelepiped,
    find_shift,
    on_off_to_ip,
    parity_gadget,
    to_isolating_lattice,
    to_on_off,
    verify_lattice_condition,
    verify_parallelepiped,
)
from .numeric import CubePoint, PNorm, Tolerance, fourier_vector, pnorm
from .oracle import CvpSolution, cvp_enumerate, max_sat_brute, validate_reduction
from .reductions import (
    CvpInstance,
    CvppArtifacts,
    csp_to_cvp_gap,
    cvpp_inf_preprocess,
    cvpp_inf_query,
    cvpp_preprocess,
    cvpp_query,
    parity_gap_params,
    sat_gap_params,
    sat_to_cvp,
)

__version__ = "0.1.0"

__all__ = [
    "Clause",
    "CspFormula",
    "CubePoint",
    "CvpInstance",
    "CvpSolution",
    "CvppArtifacts",
    "DegenerateConstructionError",
    "InvalidInputError",
    "IsolatingGadget",
    "LatgadError",
    "NumericDegeneracyError",
    "OnOffGadget",
    "PNorm",
    "ResourceLimitError",
    "Tolerance",
    "UnsupportedParametersError",
    "VerificationError",
    "VerificationReport",
    "XorConstraint",
    "csp_to_cvp_gap",
    "cvp_enumerate",
    "cvpp_inf_preprocess",
    "cvpp_inf_query",
    "cvpp_preprocess",
    "cvpp_query",
    "even_p_obstruction",
    "find_isolating_parallelepiped",
    "find_shift",
    "fourier_vector",
    "max_sat_brute",
    "on_off_to_ip",
    "parity_gadget",
    "parity_gap_params",
    "parse_dimacs",
    "parse_xor",
    "pnorm",
    "sat_gap_params",
    "sat_to_cvp",
    "to_isolating_lattice",
    "to_on_off",
    "validate_reduction",
    "verify_lattice_condition",
    "verify_parallelepiped",
]
