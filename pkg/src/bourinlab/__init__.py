"""Numerical verification of norm inequalities for weighted matrix means."""
from .dense import InvalidInputError, PsdMatrix, hermitian_eig, jacobi_eigh, psd_power
from .expressions import RangeError, b_expr, b_expr_z, block_gram, contraction_factor, f_expr, f_expr_z
from .search import SearchConfig, SearchResult, hill_climb, load, margin, persist, sweep_t
from .spectrum import AlgebraModel, BlockOperator, SingularSpectrum, mu_of, submajorizes
from .verifier import INEQUALITY_IDS, CheckReport, SuiteConfig, check_bourin_t, run_suite

__version__ = "0.1.0"

__all__ = [
    "InvalidInputError", "PsdMatrix", "hermitian_eig", "jacobi_eigh", "psd_power",
    "RangeError", "b_expr", "b_expr_z", "block_gram", "contraction_factor", "f_expr", "f_expr_z",
    "SearchConfig", "SearchResult", "hill_climb", "load", "margin", "persist", "sweep_t",
    "AlgebraModel", "BlockOperator", "SingularSpectrum", "mu_of", "submajorizes",
    "INEQUALITY_IDS", "CheckReport", "SuiteConfig", "check_bourin_t", "run_suite",
]
