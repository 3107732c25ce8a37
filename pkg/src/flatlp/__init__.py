"""Linear programming by recursive flattest-plane dimension reduction."""
from .errors import FlatLPError
from .model import LpProblem, Tolerances, is_feasible, normalize_rows, objective_value, residual
from .oracle import oracle_solve
from .reduce import SolveConfig, SolveOutcome, Status, solve

__all__ = [
    "FlatLPError",
    "LpProblem",
    "SolveConfig",
    "SolveOutcome",
    "Status",
    "Tolerances",
    "is_feasible",
    "normalize_rows",
    "objective_value",
    "oracle_solve",
    "residual",
    "solve",
]
__version__ = "0.1.0"
