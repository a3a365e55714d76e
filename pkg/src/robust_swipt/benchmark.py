"""Perfect-CSI design: every event evaluated at the estimated channels only.

Each constraint becomes the scalar inequality ``est^H X est + const >= 0``;
rows are divided by ``|est|^2`` to put them on the scale of the matrices.
"""
from __future__ import annotations

import numpy as np

from . import assembly
from .conic.problem import ConicProblem
from .scenario import Scenario, SystemConfig


def _row(layout, config, which, est, const, label_rows):
    g = float(np.linalg.norm(est) ** 2) or 1.0
    terms = assembly.linear_terms(layout, config, which, lambda X: float((est.conj() @ X @ est).real) / g)
    label_rows.append(which)
    return const / g, [(k, float(v)) for k, v in terms]


def assemble_perfect_csi(scenario: Scenario, config: SystemConfig | None = None, *,
                         include_leakage: bool = True) -> ConicProblem:
    """SDR of the power minimisation with known channels ``h_est``, ``g_est``.

    Block order: one non-negative block (SINR rows, leakage rows ``i`` major,
    power rows), then the ``W``/``V`` PSD blocks. Covariances are ignored.
    """
    config = config or scenario.config
    layout = assembly.matrix_layout(config)
    U, N = config.U, config.N
    rows, which = [], []
    for i in range(U):
        rows.append(_row(layout, config, ("A", i), scenario.h_est[i], -config.sigma2_I[i], which))
    if include_leakage:
        for i in range(U):
            for t in range(N):
                rows.append(_row(layout, config, ("B", i, t), scenario.g_est[t], config.sigma2_E[t], which))
    for t in range(N):
        rows.append(_row(layout, config, ("C",), scenario.g_est[t], -config.P_req[t], which))
    blocks = [assembly.nonneg_block(layout.n_vars, rows, "perfect-csi")]
    blocks.extend(assembly.variable_psd_blocks(layout, config))
    return ConicProblem(
        layout.n_vars, assembly.trace_objective(layout), blocks, layout,
        meta={"method": "benchmark", "include_leakage": include_leakage, "config": config, "rows": which},
    )
