"""Shared pieces for turning beamforming designs into :class:`ConicProblem` instances.

Every design problem has the same matrix variables: ``W0..W{U-1}`` then
``V0..V{N-1}``, each Hermitian ``M x M`` (``M*M`` real parameters, see
:class:`~robust_swipt.conic.problem.VariableLayout`), followed by
method-specific auxiliary scalars. The objective is the total transmit power
``sum tr(W) + sum tr(V)``.
"""
from __future__ import annotations

import numpy as np

from .conic.problem import (
    NONNEG, BlockBuilder, ConeBlock, VariableLayout, hermitian_basis, hermitian_lmi_block,
    hermitian_to_params,
)
from .quadforms import BeamformerSet, coupling_coefficients
from .scenario import SystemConfig


def w_name(i: int) -> str:
    return f"W{i}"


def v_name(t: int) -> str:
    return f"V{t}"


def matrix_layout(config: SystemConfig) -> VariableLayout:
    layout = VariableLayout()
    for i in range(config.U):
        layout.add_matrix(w_name(i), config.M)
    for t in range(config.N):
        layout.add_matrix(v_name(t), config.M)
    return layout


def trace_objective(layout: VariableLayout) -> np.ndarray:
    c = np.zeros(layout.n_vars)
    for mv in layout.matrices.values():
        diag = [mv.offset + k for k, E in enumerate(hermitian_basis(mv.M)) if np.trace(E).real != 0]
        c[diag] = 1.0
    return c


def coupling_weights(config: SystemConfig, which: tuple) -> list[tuple[str, float]]:
    """``(matrix name, coefficient)`` pairs expressing A[i], B[i, t] or C."""
    a_W, a_V, b_W, b_V = coupling_coefficients(config)
    if which[0] == "A":
        i = which[1]
        pairs = [(w_name(j), a_W[i, j]) for j in range(config.U)]
        pairs += [(v_name(t), a_V[i, t]) for t in range(config.N)]
    elif which[0] == "B":
        i, t = which[1], which[2]
        pairs = [(w_name(j), b_W[i, t, j]) for j in range(config.U)]
        pairs += [(v_name(p), b_V[i, t, p]) for p in range(config.N)]
    elif which[0] == "C":
        pairs = [(w_name(j), 1.0) for j in range(config.U)] + [(v_name(t), 1.0) for t in range(config.N)]
    else:
        raise ValueError(which)
    return [(name, float(w)) for name, w in pairs if w != 0.0]


def linear_terms(layout: VariableLayout, config: SystemConfig, which: tuple, linear_map):
    """Variable terms of ``linear_map(X)`` where ``X`` is the coupling matrix ``which``.

    ``linear_map`` must be linear in its Hermitian argument; it is evaluated
    once per basis matrix.
    """
    basis = hermitian_basis(config.M)
    images = [np.asarray(linear_map(E)) for E in basis]
    terms = []
    for name, weight in coupling_weights(config, which):
        off = layout.matrices[name].offset
        for k, img in enumerate(images):
            terms.append((off + k, weight * img))
    return terms


def variable_psd_blocks(layout: VariableLayout, config: SystemConfig) -> list[ConeBlock]:
    """``W_i >= 0`` and ``V_t >= 0`` as embedded real LMIs of size 2M."""
    basis = hermitian_basis(config.M)
    blocks = []
    for name, mv in layout.matrices.items():
        terms = [(mv.offset + k, E) for k, E in enumerate(basis)]
        blocks.append(hermitian_lmi_block(layout.n_vars, np.zeros((config.M, config.M)), terms, f"psd:{name}"))
    return blocks


def nonneg_block(n_vars: int, rows: list[tuple[float, list[tuple[int, float]]]], label: str) -> ConeBlock:
    """Non-negative block from rows ``(constant, [(var, coefficient), ...])``."""
    b = BlockBuilder(n_vars, len(rows))
    cols: dict[int, np.ndarray] = {}
    for r, (const, terms) in enumerate(rows):
        b.const[r] = const
        for k, v in terms:
            cols.setdefault(k, np.zeros(len(rows)))[r] += v
    for k in sorted(cols):
        b.add(k, cols[k])
    return ConeBlock(NONNEG, len(rows), b.const, b.coef(), label)


def unpack(layout: VariableLayout, config: SystemConfig, x) -> BeamformerSet:
    W = [layout.matrix(w_name(i), x) for i in range(config.U)]
    V = [layout.matrix(v_name(t), x) for t in range(config.N)]
    return BeamformerSet(np.array(W), np.array(V).reshape(config.N, config.M, config.M), check=False)


def pack(layout: VariableLayout, bf: BeamformerSet, aux: dict | None = None) -> np.ndarray:
    """Variable vector for given matrices (and optional auxiliary values)."""
    x = np.zeros(layout.n_vars)
    for i, W in enumerate(bf.W):
        mv = layout.matrices[w_name(i)]
        x[mv.offset:mv.offset + mv.M ** 2] = hermitian_to_params(W)
    for t, V in enumerate(bf.V):
        mv = layout.matrices[v_name(t)]
        x[mv.offset:mv.offset + mv.M ** 2] = hermitian_to_params(V)
    for name, val in (aux or {}).items():
        x[layout.aux[name]] = val
    return x
