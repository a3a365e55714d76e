"""Conic problem container, interior-point solve and SDPA interchange."""
from .problem import NONNEG, PSD, SOC, ConeBlock, ConicProblem, VariableLayout
from .sdpa import export_sdpa, parse_sdpa
from .solver import DEFAULT_MAX_ITER, DEFAULT_TOL, SolveResult, Status, solve

__all__ = [
    "NONNEG", "PSD", "SOC", "ConeBlock", "ConicProblem", "VariableLayout",
    "export_sdpa", "parse_sdpa", "SolveResult", "Status", "solve",
    "DEFAULT_TOL", "DEFAULT_MAX_ITER",
]
