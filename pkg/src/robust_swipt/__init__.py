"""Robust chance-constrained beamforming for secure SWIPT downlinks.

Two safe convex approximations of the outage-constrained power
minimisation are provided: sphere bounding with the S-procedure
(:func:`assemble_method1`) and a Bernstein-type bound
(:func:`assemble_method2`). :func:`design` assembles, solves and extracts
beamformers in one call.
"""
from .bernstein import assemble_method2, bernstein_bound_check
from .complexity import ComplexityEstimate, estimate
from .errors import ConfigError, DomainError, NotPSD, NotRankOne, RobustSwiptError, UnsupportedCone
from .quadforms import BeamformerSet, VectorBeamformers, build_couplings, eval_events, eval_realized
from .scenario import Geometry, Scenario, SystemConfig, draw_errors, generate_scenario
from .solution import (
    BeamformingSolution, Method, OutageReport, check_rank_one, design, design_baseline,
    design_benchmark, extract, validate_outage,
)
from .sprocedure import assemble_method1

__all__ = [
    "assemble_method1", "assemble_method2", "bernstein_bound_check", "ComplexityEstimate", "estimate",
    "ConfigError", "DomainError", "NotPSD", "NotRankOne", "RobustSwiptError", "UnsupportedCone",
    "BeamformerSet", "VectorBeamformers", "build_couplings", "eval_events", "eval_realized",
    "Geometry", "Scenario", "SystemConfig", "draw_errors", "generate_scenario",
    "BeamformingSolution", "Method", "OutageReport", "check_rank_one", "design", "design_baseline",
    "design_benchmark", "extract", "validate_outage",
]
