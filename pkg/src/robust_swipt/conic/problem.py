"""Standard-form container for block-structured conic programs.

A :class:`ConicProblem` is

    minimize    c @ x
    subject to  const_b + coef_b @ x  in  K_b     for every block b,

with ``K_b`` the non-negative orthant, a second-order cone
``{(t, y): t >= |y|}``, or the cone of real symmetric PSD matrices. PSD block
values are stored as full ``size x size`` matrices flattened row-major.
All decision variables are free; cone membership only enters through blocks.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ..linalg import embed_real

NONNEG, SOC, PSD = "nonneg", "soc", "psd"


@dataclass(frozen=True, eq=False)
class ConeBlock:
    kind: str
    size: int
    const: np.ndarray
    coef: sparse.csr_matrix
    label: str = ""

    def __post_init__(self):
        if self.kind not in (NONNEG, SOC, PSD):
            raise ValueError(f"unknown cone kind {self.kind!r}")
        const = np.asarray(self.const, dtype=float).ravel()
        if const.shape[0] != self.dim:
            raise ValueError(f"block {self.label!r}: constant has length {const.shape[0]}, expected {self.dim}")
        coef = sparse.csr_matrix(self.coef, dtype=float)
        if coef.shape[0] != self.dim:
            raise ValueError(f"block {self.label!r}: coefficient rows {coef.shape[0]} != {self.dim}")
        object.__setattr__(self, "const", const)
        object.__setattr__(self, "coef", coef)

    @property
    def dim(self) -> int:
        return self.size * self.size if self.kind == PSD else self.size

    def value(self, x) -> np.ndarray:
        """Block value at ``x``; PSD blocks come back as square matrices."""
        v = self.const + self.coef @ np.asarray(x, dtype=float)
        if self.kind == PSD:
            v = v.reshape(self.size, self.size)
            return 0.5 * (v + v.T)
        return v

    def violation(self, x) -> float:
        """Distance-style measure of how far the value at ``x`` is outside the cone (0 if inside)."""
        return cone_violation(self.kind, self.value(x))

    def scaled(self, s: float, col_scale: np.ndarray | None = None) -> ConeBlock:
        coef = self.coef * s
        if col_scale is not None:
            coef = coef @ sparse.diags(col_scale)
        return ConeBlock(self.kind, self.size, self.const * s, coef, self.label)


def cone_violation(kind: str, v: np.ndarray) -> float:
    if kind == NONNEG:
        return float(max(0.0, -np.min(v))) if v.size else 0.0
    if kind == SOC:
        return float(max(0.0, np.linalg.norm(v[1:]) - v[0]))
    return float(max(0.0, -np.linalg.eigvalsh(v)[0]))


@dataclass(frozen=True)
class MatrixVar:
    """A Hermitian matrix variable occupying ``M*M`` consecutive entries of ``x``."""

    name: str
    offset: int
    M: int


@dataclass
class VariableLayout:
    """Maps entries of the variable vector to matrix parameters and named auxiliaries.

    A Hermitian ``M x M`` matrix uses ``M*M`` real parameters ordered by the
    upper triangle row by row: the diagonal entry ``(r, r)`` contributes its
    real value, each off-diagonal ``(r, c)``, ``c > r`` contributes
    ``Re`` then ``Im`` of entry ``(r, c)``. Auxiliary scalars follow all
    matrix variables.
    """

    matrices: dict = field(default_factory=dict)
    aux: dict = field(default_factory=dict)
    n_vars: int = 0

    def add_matrix(self, name: str, M: int) -> MatrixVar:
        mv = MatrixVar(name, self.n_vars, M)
        self.matrices[name] = mv
        self.n_vars += M * M
        return mv

    def add_aux(self, name: str) -> int:
        if name in self.aux:
            raise ValueError(f"duplicate auxiliary {name!r}")
        self.aux[name] = self.n_vars
        self.n_vars += 1
        return self.aux[name]

    def matrix(self, name: str, x) -> np.ndarray:
        mv = self.matrices[name]
        return params_to_hermitian(np.asarray(x)[mv.offset:mv.offset + mv.M * mv.M], mv.M)

    def aux_value(self, name: str, x) -> float:
        return float(np.asarray(x)[self.aux[name]])

    def describe(self, k: int) -> str:
        for mv in self.matrices.values():
            if mv.offset <= k < mv.offset + mv.M * mv.M:
                r, c, part = param_index(mv.M)[k - mv.offset]
                return f"{mv.name}[{r},{c}].{part}"
        for name, idx in self.aux.items():
            if idx == k:
                return name
        raise IndexError(k)


def param_index(M: int) -> list[tuple[int, int, str]]:
    """``(row, col, 're'|'im')`` for each of the ``M*M`` real parameters."""
    out = []
    for r in range(M):
        for c in range(r, M):
            if r == c:
                out.append((r, r, "re"))
            else:
                out.append((r, c, "re"))
                out.append((r, c, "im"))
    return out


def hermitian_basis(M: int) -> np.ndarray:
    """Basis matrices ``E_k`` (shape ``[M*M, M, M]``) with ``X = sum_k x_k E_k``."""
    out = np.zeros((M * M, M, M), dtype=complex)
    for k, (r, c, part) in enumerate(param_index(M)):
        if r == c:
            out[k, r, r] = 1.0
        elif part == "re":
            out[k, r, c] = out[k, c, r] = 1.0
        else:
            out[k, r, c] = 1j
            out[k, c, r] = -1j
    return out


def params_to_hermitian(p, M: int) -> np.ndarray:
    return np.tensordot(np.asarray(p, dtype=float), hermitian_basis(M), axes=1)


def hermitian_to_params(X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    out = []
    for r, c, part in param_index(X.shape[0]):
        out.append(X[r, c].real if part == "re" else X[r, c].imag)
    return np.array(out)


class BlockBuilder:
    """Accumulates an affine block ``const + sum_k x_k F_k`` column by column."""

    def __init__(self, n_vars: int, dim: int):
        self.n_vars = n_vars
        self.dim = dim
        self.const = np.zeros(dim)
        self._rows: list[np.ndarray] = []
        self._cols: list[np.ndarray] = []
        self._vals: list[np.ndarray] = []

    def add(self, k: int, column, drop: float = 0.0):
        column = np.asarray(column, dtype=float).ravel()
        nz = np.nonzero(np.abs(column) > drop)[0]
        if nz.size:
            self._rows.append(nz)
            self._cols.append(np.full(nz.size, k))
            self._vals.append(column[nz])

    def coef(self) -> sparse.csr_matrix:
        if not self._rows:
            return sparse.csr_matrix((self.dim, self.n_vars))
        rows = np.concatenate(self._rows)
        cols = np.concatenate(self._cols)
        vals = np.concatenate(self._vals)
        return sparse.csr_matrix(sparse.coo_matrix((vals, (rows, cols)), shape=(self.dim, self.n_vars)))


def hermitian_lmi_block(n_vars: int, const, terms, label: str) -> ConeBlock:
    """PSD block from a complex Hermitian affine map, embedded as a real symmetric LMI.

    ``terms`` is an iterable of ``(variable index, complex Hermitian coefficient)``;
    repeated indices are summed.
    """
    const = np.asarray(const, dtype=complex)
    s = const.shape[0]
    acc: dict[int, np.ndarray] = {}
    for k, F in terms:
        acc[k] = acc.get(k, 0) + np.asarray(F, dtype=complex)
    b = BlockBuilder(n_vars, 4 * s * s)
    b.const = embed_real(const).ravel()
    for k in sorted(acc):
        b.add(k, embed_real(acc[k]))
    return ConeBlock(PSD, 2 * s, b.const, b.coef(), label)


@dataclass(eq=False)
class ConicProblem:
    n_vars: int
    c: np.ndarray
    blocks: list[ConeBlock]
    layout: VariableLayout | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        if self.c.shape[0] != self.n_vars:
            raise ValueError("objective length must equal n_vars")
        for b in self.blocks:
            if b.coef.shape[1] != self.n_vars:
                raise ValueError(f"block {b.label!r} has {b.coef.shape[1]} columns, expected {self.n_vars}")

    def objective(self, x) -> float:
        return float(self.c @ np.asarray(x, dtype=float))

    def counts(self) -> dict:
        """Block counts keyed by ``(kind, size)``; nonneg blocks are counted per scalar entry."""
        out: dict = {}
        for b in self.blocks:
            if b.kind == NONNEG:
                out[(NONNEG, 1)] = out.get((NONNEG, 1), 0) + b.size
            else:
                out[(b.kind, b.size)] = out.get((b.kind, b.size), 0) + 1
        return out

    def max_violation(self, x) -> float:
        return max((b.violation(x) for b in self.blocks), default=0.0)

    def has_soc(self) -> bool:
        return any(b.kind == SOC for b in self.blocks)
