"""Bernstein-type safe approximation of the outage constraints.

For ``x ~ CN(0, I)`` and ``f(x) = x^H Y x + 2 Re{x^H u} + c``, with
probability at least ``1 - exp(-delta)``

    f(x) >= tr(Y) + c - sqrt(2 delta) * sqrt(|Y|_F^2 + 2 |u|^2) - delta * s+(-Y).

Requiring the right-hand side to be non-negative with ``delta = -ln(tol)``
is a convex, conservative surrogate of ``Pr(f >= 0) >= 1 - tol``. Each
surrogate is split into a linear inequality, a second-order cone (norm term,
auxiliary ``theta``) and a shifted LMI (eigenvalue term, auxiliary
``vartheta >= 0``).

Every surrogate is divided by its channel gain ``|est|^2 + tr(S^2)`` before
assembly, so the auxiliaries ``theta``/``vartheta`` are expressed relative
to that gain and sit on the same scale as the beamforming matrices.

The second-order cones can alternatively be written as LMIs using the
block recipe ``C(theta) + D + D^H + E + E^H`` with
``D = T(est) X P(S)`` and ``E = sum_p U_p (S X S) K_p``; see
:func:`arrow_lmi_image`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import assembly
from .conic.problem import PSD, SOC, BlockBuilder, ConeBlock, ConicProblem, hermitian_lmi_block
from .linalg import s_plus
from .quadforms import BeamformerSet, CouplingMatrices, build_couplings, channel_gain
from .scenario import Scenario, SystemConfig

NATIVE_SOC = "native-soc"
LMI = "lmi"


@dataclass(frozen=True)
class BernsteinParams:
    delta: np.ndarray
    delta_leak: np.ndarray
    mu: np.ndarray


def bernstein_params(config: SystemConfig) -> BernsteinParams:
    # -log(1) evaluates to -0.0; keep the zeros positive
    return BernsteinParams(
        delta=np.abs(-np.log(config.rho)),
        delta_leak=np.abs(-np.log(config.rho_leak)),
        mu=np.abs(-np.log(config.varrho)),
    )


def realvec(z) -> np.ndarray:
    """Interleave real and imaginary parts: ``[Re z0, Im z0, Re z1, ...]``."""
    z = np.asarray(z, dtype=complex).ravel()
    return np.column_stack([z.real, z.imag]).ravel()


def soc_vector(X, sqrt_cov, est) -> np.ndarray:
    """Complex stacked vector ``[sqrt(2) S X est ; vec(S X S)]`` (column-major vec)."""
    Y = sqrt_cov @ X @ sqrt_cov
    return np.concatenate([np.sqrt(2.0) * (sqrt_cov @ X @ est), Y.ravel(order="F")])


def arrow_lmi_image(X, sqrt_cov, est) -> np.ndarray:
    """Variable part ``D + D^H + E + E^H`` of the LMI form of the norm constraint.

    The matrices are built literally: ``T = sqrt(2) e_last est^H``,
    ``P = S [I_M, 0, ..., 0]``, ``U_p = e_last u_p^T`` and ``K_p`` selecting the
    ``(p+1)``-th group of ``M`` columns, the first group being reserved for
    the ``S X est`` part.
    """
    M = sqrt_cov.shape[0]
    n = M * M + M + 1
    e_last = np.zeros((n, 1))
    e_last[-1, 0] = 1.0
    T = np.sqrt(2.0) * e_last @ np.asarray(est, dtype=complex).reshape(1, M).conj()
    J = np.zeros((M, n))
    J[:, :M] = np.eye(M)
    P = sqrt_cov @ J
    D = T @ X @ P
    Y = sqrt_cov @ X @ sqrt_cov
    E = np.zeros((n, n), dtype=complex)
    for p in range(M):
        U_p = e_last @ np.eye(M)[p].reshape(1, M)
        K_p = np.zeros((M, n))
        K_p[:, M * (p + 1):M * (p + 2)] = np.eye(M)
        E += U_p @ Y @ K_p
    return D + D.conj().T + E + E.conj().T


@dataclass(frozen=True)
class _Family:
    which: tuple
    sqrt_cov: np.ndarray
    est: np.ndarray
    const: float
    delta: float
    theta: int
    vartheta: int
    tag: str

    @property
    def scale(self) -> float:
        return channel_gain(self.sqrt_cov, self.est)


def _families(layout, scenario: Scenario, config: SystemConfig, include_leakage: bool):
    bp = bernstein_params(config)
    U, N = config.U, config.N
    fams = []
    for i in range(U):
        fams.append(_Family(("A", i), scenario.H_sqrt[i], scenario.h_est[i], -config.sigma2_I[i],
                            bp.delta[i], layout.add_aux(f"theta[{i}]"), layout.add_aux(f"vartheta[{i}]"),
                            f"sinr[{i}]"))
    if include_leakage:
        for i in range(U):
            for t in range(N):
                fams.append(_Family(("B", i, t), scenario.G_sqrt[t], scenario.g_est[t], config.sigma2_E[t],
                                    bp.delta_leak[i, t], layout.add_aux(f"theta_leak[{i},{t}]"),
                                    layout.add_aux(f"vartheta_leak[{i},{t}]"), f"leak[{i},{t}]"))
    for t in range(N):
        fams.append(_Family(("C",), scenario.G_sqrt[t], scenario.g_est[t], -config.P_req[t],
                            bp.mu[t], layout.add_aux(f"a[{t}]"), layout.add_aux(f"b[{t}]"), f"power[{t}]"))
    return fams


def _linear_row(layout, config, fam: _Family):
    S, est, g = fam.sqrt_cov, fam.est, fam.scale
    terms = assembly.linear_terms(
        layout, config, fam.which,
        lambda X: float(np.trace(S @ X @ S).real + (est.conj() @ X @ est).real) / g,
    )
    terms = [(k, float(v)) for k, v in terms]
    terms.append((fam.theta, -np.sqrt(2.0 * fam.delta)))
    terms.append((fam.vartheta, -fam.delta))
    return fam.const / g, terms


def _soc_block(layout, config, fam: _Family) -> ConeBlock:
    M = config.M
    dim = 1 + 2 * (M * M + M)
    b = BlockBuilder(layout.n_vars, dim)
    acc: dict[int, np.ndarray] = {}
    for k, img in assembly.linear_terms(layout, config, fam.which,
                                        lambda X: realvec(soc_vector(X, fam.sqrt_cov, fam.est)) / fam.scale):
        acc[k] = acc.get(k, 0) + np.concatenate([[0.0], img])
    head = np.zeros(dim)
    head[0] = 1.0
    acc[fam.theta] = head
    for k in sorted(acc):
        b.add(k, acc[k])
    return ConeBlock(SOC, dim, b.const, b.coef(), f"soc:{fam.tag}")


def _arrow_block(layout, config, fam: _Family) -> ConeBlock:
    M = config.M
    n = M * M + M + 1
    terms = assembly.linear_terms(layout, config, fam.which,
                                  lambda X: arrow_lmi_image(X, fam.sqrt_cov, fam.est) / fam.scale)
    terms.append((fam.theta, np.eye(n)))
    return hermitian_lmi_block(layout.n_vars, np.zeros((n, n)), terms, f"arrow:{fam.tag}")


def _shift_block(layout, config, fam: _Family) -> ConeBlock:
    S, g = fam.sqrt_cov, fam.scale
    terms = assembly.linear_terms(layout, config, fam.which, lambda X: S @ X @ S / g)
    terms.append((fam.vartheta, np.eye(config.M)))
    return hermitian_lmi_block(layout.n_vars, np.zeros((config.M, config.M)), terms, f"shift:{fam.tag}")


def assemble_method2(
    scenario: Scenario, config: SystemConfig | None = None, encoding: str = NATIVE_SOC,
    *, include_leakage: bool = True,
) -> ConicProblem:
    """Build the Bernstein-type conic program (rank constraints dropped).

    Block order: one non-negative block with the linear surrogate rows, the
    norm constraints (SOC, or arrow LMIs with ``encoding="lmi"``), the shifted
    LMIs, the ``W``/``V`` PSD blocks, then one non-negative block for the
    ``vartheta``-type auxiliaries.
    """
    if encoding not in (NATIVE_SOC, LMI):
        raise ValueError(f"unknown encoding {encoding!r}")
    config = config or scenario.config
    layout = assembly.matrix_layout(config)
    fams = _families(layout, scenario, config, include_leakage)
    nv = layout.n_vars

    blocks = [assembly.nonneg_block(nv, [_linear_row(layout, config, f) for f in fams], "bernstein-linear")]
    norm_block = _soc_block if encoding == NATIVE_SOC else _arrow_block
    blocks.extend(norm_block(layout, config, f) for f in fams)
    blocks.extend(_shift_block(layout, config, f) for f in fams)
    blocks.extend(assembly.variable_psd_blocks(layout, config))
    blocks.append(assembly.nonneg_block(nv, [(0.0, [(f.vartheta, 1.0)]) for f in fams], "vartheta"))
    return ConicProblem(
        nv, assembly.trace_objective(layout), blocks, layout,
        meta={"method": "method2", "encoding": encoding, "include_leakage": include_leakage,
              "config": config, "params": bernstein_params(config)},
    )


@dataclass
class BernsteinSlack:
    """Deterministic Bernstein left-hand side minus zero for every chance constraint."""

    sinr: np.ndarray
    leak: np.ndarray
    power: np.ndarray

    def min(self) -> float:
        vals = [a.min() for a in (self.sinr, self.leak, self.power) if a.size]
        return float(min(vals))


def bernstein_lhs(X, sqrt_cov, est, const, delta) -> float:
    Y = sqrt_cov @ X @ sqrt_cov
    u = sqrt_cov @ X @ est
    norm = np.sqrt(np.linalg.norm(Y, "fro") ** 2 + 2.0 * np.linalg.norm(u) ** 2)
    return float(np.trace(Y).real + (est.conj() @ X @ est).real + const
                 - np.sqrt(2.0 * delta) * norm - delta * s_plus(-Y))


def bernstein_bound_check(cm: CouplingMatrices | None, scenario: Scenario, config: SystemConfig | None = None,
                          bf: BeamformerSet | None = None) -> BernsteinSlack:
    """Evaluate the surrogate constraints with exact norms and eigenvalues (no auxiliaries).

    Pass either the coupling matrices or a beamformer set.
    """
    config = config or scenario.config
    if cm is None:
        cm = build_couplings(bf, config)
    bp = bernstein_params(config)
    U, N = config.U, config.N
    sinr = np.array([bernstein_lhs(cm.A[i], scenario.H_sqrt[i], scenario.h_est[i], -config.sigma2_I[i], bp.delta[i])
                     for i in range(U)])
    leak = np.array([[bernstein_lhs(cm.B[i, t], scenario.G_sqrt[t], scenario.g_est[t], config.sigma2_E[t],
                                    bp.delta_leak[i, t]) for t in range(N)] for i in range(U)]).reshape(U, N)
    power = np.array([bernstein_lhs(cm.C, scenario.G_sqrt[t], scenario.g_est[t], -config.P_req[t], bp.mu[t])
                      for t in range(N)])
    return BernsteinSlack(sinr, leak, power)


__all__ = [
    "NATIVE_SOC", "LMI", "PSD", "BernsteinParams", "bernstein_params", "assemble_method2",
    "bernstein_bound_check", "arrow_lmi_image", "soc_vector", "realvec",
]
