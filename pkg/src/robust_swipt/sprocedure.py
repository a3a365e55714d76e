"""Sphere-bounding safe approximation solved through the S-procedure.

Each chance constraint is replaced by the requirement that its event holds
for every error vector inside a ball whose probability mass is ``1 - tol``.
For CN(0, I_M) errors, ``2 |e|^2`` is chi-square with ``2M`` degrees of
freedom, so the squared radius is ``chi2_inv_cdf(2M, 1 - tol) / 2``. The
robust quadratic inequality over the ball becomes one ``(M+1) x (M+1)``
complex LMI with a non-negative multiplier.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import assembly
from .conic.problem import ConicProblem, hermitian_lmi_block
from .errors import DomainError
from .linalg import chi2_inv_cdf
from .quadforms import channel_gain
from .scenario import Scenario, SystemConfig


@dataclass(frozen=True)
class SphereRadii:
    """Squared ball radii: ``R[i]`` (SINR), ``Q_leak[i, t]`` (leakage), ``Q_pow[t]`` (power)."""

    R: np.ndarray
    Q_leak: np.ndarray
    Q_pow: np.ndarray


def squared_radius(M: int, tolerance: float) -> float:
    if not 0.0 < tolerance < 1.0:
        raise DomainError(f"outage tolerance must lie strictly inside (0, 1) for the sphere bound, got {tolerance}")
    return chi2_inv_cdf(2 * M, 1.0 - tolerance) / 2.0


def compute_radii(config: SystemConfig) -> SphereRadii:
    sq = np.vectorize(lambda tol: squared_radius(config.M, float(tol)), otypes=[float])
    return SphereRadii(
        R=sq(config.rho) if config.U else np.zeros(0),
        Q_leak=sq(config.rho_leak).reshape(config.U, config.N) if config.N else np.zeros((config.U, 0)),
        Q_pow=sq(config.varrho) if config.N else np.zeros(0),
    )


def _corner(M: int, corner: float) -> np.ndarray:
    D = np.zeros((M + 1, M + 1), dtype=complex)
    D[M, M] = corner
    return D


def _multiplier(M: int, radius_sq: float) -> np.ndarray:
    D = np.zeros((M + 1, M + 1), dtype=complex)
    D[:M, :M] = np.eye(M)
    D[M, M] = -radius_sq
    return D


def _robust_lmi(layout, config, which, sqrt_cov, est, const, aux_index, radius_sq, label):
    """``E^H X E + diag(mult*I, const - mult*radius)`` with ``E = [S, est]``.

    The LMI is divided by the channel gain, so the multiplier is expressed
    relative to it.
    """
    E = np.column_stack([sqrt_cov, est])
    g = channel_gain(sqrt_cov, est)
    terms = assembly.linear_terms(layout, config, which, lambda Y: E.conj().T @ Y @ E / g)
    terms.append((aux_index, _multiplier(config.M, radius_sq)))
    return hermitian_lmi_block(layout.n_vars, _corner(config.M, const / g), terms, label)


def assemble_method1(scenario: Scenario, config: SystemConfig | None = None, *, include_leakage: bool = True) -> ConicProblem:
    """Build the S-procedure SDP (rank constraints dropped).

    Block order: SINR LMIs, leakage LMIs (``i`` major), power LMIs, the
    ``W``/``V`` PSD blocks, then one non-negative block holding the
    multipliers ``alpha``, ``lambda``, ``beta``. With ``include_leakage=False``
    the leakage LMIs and their multipliers are omitted.
    """
    config = config or scenario.config
    radii = compute_radii(config)
    layout = assembly.matrix_layout(config)
    U, N = config.U, config.N
    alpha = [layout.add_aux(f"alpha[{i}]") for i in range(U)]
    lam = {}
    if include_leakage:
        lam = {(i, t): layout.add_aux(f"lambda[{i},{t}]") for i in range(U) for t in range(N)}
    beta = [layout.add_aux(f"beta[{t}]") for t in range(N)]

    blocks = []
    for i in range(U):
        blocks.append(_robust_lmi(layout, config, ("A", i), scenario.H_sqrt[i], scenario.h_est[i],
                                  -config.sigma2_I[i], alpha[i], radii.R[i], f"sinr[{i}]"))
    for (i, t), idx in lam.items():
        blocks.append(_robust_lmi(layout, config, ("B", i, t), scenario.G_sqrt[t], scenario.g_est[t],
                                  config.sigma2_E[t], idx, radii.Q_leak[i, t], f"leak[{i},{t}]"))
    for t in range(N):
        blocks.append(_robust_lmi(layout, config, ("C",), scenario.G_sqrt[t], scenario.g_est[t],
                                  -config.P_req[t], beta[t], radii.Q_pow[t], f"power[{t}]"))
    blocks.extend(assembly.variable_psd_blocks(layout, config))
    aux = alpha + list(lam.values()) + beta
    blocks.append(assembly.nonneg_block(layout.n_vars, [(0.0, [(k, 1.0)]) for k in aux], "multipliers"))
    return ConicProblem(
        layout.n_vars, assembly.trace_objective(layout), blocks, layout,
        meta={"method": "method1", "include_leakage": include_leakage, "config": config, "radii": radii},
    )
