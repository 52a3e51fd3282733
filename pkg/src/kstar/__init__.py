"""K-ordered star calculus on the Weyl algebra."""
from .errors import KStarError
from .weyl import ANTINORMAL, NORMAL, WEYL, ExprParam, HbarConfig, WeylPoly, intertwine, star_product
from .starexp import GaussPoly, classify, exchanging_interval, exp_2H, polar_element, riccati_flow
from .words import EvalGrid, IntegralElement, default_grid, matrix_element, star_delta, vacuum
from .diag import DiagSeries, HybridDiag, diag_embed, diag_exp
from .dispatch import RunConfig, run_eval, run_verify

__version__ = "0.1.0"

__all__ = [
    "ANTINORMAL", "NORMAL", "WEYL", "DiagSeries", "EvalGrid", "ExprParam", "GaussPoly", "HbarConfig",
    "HybridDiag", "IntegralElement", "KStarError", "RunConfig", "WeylPoly", "classify", "default_grid",
    "diag_embed", "diag_exp", "exchanging_interval", "exp_2H", "intertwine", "matrix_element",
    "polar_element", "riccati_flow", "run_eval", "run_verify", "star_delta", "star_product", "vacuum",
]
