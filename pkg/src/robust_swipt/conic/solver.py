"""Interior-point solve of a :class:`ConicProblem`.

The heavy lifting is done by CVXOPT's ``conelp`` (Nesterov-Todd scaled
primal-dual path following on the homogeneous self-dual embedding with
Mehrotra correction). Around it this module

* equilibrates the problem (per-block row scaling, per-variable column
  scaling, objective normalisation), because the wireless problems mix
  quantities from 1e-10 W noise floors to tens of watts;
* certifies the returned point itself: cone residuals, dual residual,
  duality gap and per-block complementarity are recomputed from the raw
  iterates, and ``Optimal`` is reported only when all of them are within
  ``tol``.

All residuals in :class:`SolveResult` refer to the equilibrated problem,
where every block and variable has unit scale.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .problem import NONNEG, PSD, SOC, ConicProblem, cone_violation

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 200


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    MAX_ITER = "MaxIter"
    NUMERICAL_TROUBLE = "NumericalTrouble"


@dataclass
class SolveResult:
    status: Status
    x: np.ndarray | None
    objective: float
    dual_objective: float
    gap: float
    primal_residual: float
    dual_residual: float
    iterations: int
    wall_time: float
    duals: list = field(default_factory=list, repr=False)
    complementarity: list = field(default_factory=list, repr=False)
    scaled_norms: dict = field(default_factory=dict, repr=False)

    @property
    def ok(self) -> bool:
        return self.status is Status.OPTIMAL

    def summary(self) -> dict:
        return {
            "status": self.status.value, "objective": self.objective,
            "dual_objective": self.dual_objective, "gap": self.gap,
            "primal_residual": self.primal_residual, "dual_residual": self.dual_residual,
            "iterations": self.iterations, "wall_time": self.wall_time,
        }


@dataclass
class _Scaled:
    order: list            # block indices in cvxopt order (nonneg, soc, psd)
    row_scale: list        # per block: scalar (soc/psd) or vector (nonneg)
    col_scale: np.ndarray
    c_norm: float
    c: np.ndarray
    consts: list
    coefs: list


def _block_row_norms(b, coef):
    a = abs(coef).max(axis=1).toarray().ravel() if coef.nnz else np.zeros(coef.shape[0])
    if b.kind == NONNEG:
        return a
    return np.max(a) if a.size else 0.0


def _equilibrate(p: ConicProblem, iters: int = 25) -> _Scaled:
    order = [k for kind in (NONNEG, SOC, PSD) for k, b in enumerate(p.blocks) if b.kind == kind]
    coefs = {k: p.blocks[k].coef.tocsr(copy=True) for k in order}
    row_scale = {k: (np.ones(p.blocks[k].size) if p.blocks[k].kind == NONNEG else 1.0) for k in order}
    col = np.ones(p.n_vars)
    for _ in range(iters):
        for k in order:
            b = p.blocks[k]
            nrm = _block_row_norms(b, coefs[k])
            s = 1.0 / np.sqrt(np.where(nrm > 0, nrm, 1.0))
            row_scale[k] = row_scale[k] * s
            coefs[k] = sparse.diags(np.broadcast_to(s, (coefs[k].shape[0],))) @ coefs[k]
        colmax = np.zeros(p.n_vars)
        for k in order:
            if coefs[k].nnz:
                colmax = np.maximum(colmax, abs(coefs[k]).max(axis=0).toarray().ravel())
        d = 1.0 / np.sqrt(np.where(colmax > 0, colmax, 1.0))
        col *= d
        D = sparse.diags(d)
        for k in order:
            coefs[k] = (coefs[k] @ D).tocsr()
    consts = []
    for k in order:
        b = p.blocks[k]
        consts.append(b.const * np.broadcast_to(row_scale[k], (b.dim,)) if b.kind == NONNEG
                      else b.const * row_scale[k])
    c = p.c * col
    c_norm = float(np.max(np.abs(c))) or 1.0
    return _Scaled(order, [row_scale[k] for k in order], col, c_norm, c / c_norm,
                   consts, [coefs[k] for k in order])


def _sym_from_lower(v, n):
    m = np.asarray(v).reshape(n, n, order="F")
    low = np.tril(m)
    return low + np.tril(m, -1).T


def solve(p: ConicProblem, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SolveResult:
    """Minimise ``p.c @ x`` over the product cone; see :class:`SolveResult` for outcomes."""
    import cvxopt
    from cvxopt import solvers

    if not 1e-10 <= tol <= 1e-2:
        raise ValueError(f"tol must lie in [1e-10, 1e-2], got {tol}")
    t0 = time.perf_counter()
    sc = _equilibrate(p)
    blocks = [p.blocks[k] for k in sc.order]

    G = sparse.vstack([-cf for cf in sc.coefs], format="coo") if blocks else sparse.coo_matrix((0, p.n_vars))
    h = np.concatenate(sc.consts) if blocks else np.zeros(0)
    dims = {
        "l": int(sum(b.size for b in blocks if b.kind == NONNEG)),
        "q": [int(b.size) for b in blocks if b.kind == SOC],
        "s": [int(b.size) for b in blocks if b.kind == PSD],
    }
    Gc = cvxopt.spmatrix(G.data.tolist(), G.row.tolist(), G.col.tolist(), size=G.shape)
    opts = {
        "show_progress": False, "maxiters": int(max_iter), "abstol": tol * 0.1,
        "reltol": tol * 0.1, "feastol": tol * 0.1, "refinement": 2,
    }
    try:
        sol = solvers.conelp(cvxopt.matrix(sc.c), Gc, cvxopt.matrix(h), dims, options=opts)
    except (ArithmeticError, ValueError) as exc:
        return SolveResult(Status.NUMERICAL_TROUBLE, None, np.nan, np.nan, np.inf, np.inf, np.inf,
                           0, time.perf_counter() - t0, scaled_norms={"error": str(exc)})
    iters = int(sol["iterations"])
    wall = time.perf_counter() - t0

    if sol["status"] == "primal infeasible":
        return SolveResult(Status.INFEASIBLE, None, np.nan, np.nan, np.inf, np.inf, np.inf, iters, wall)
    if sol["status"] == "dual infeasible":
        return SolveResult(Status.UNBOUNDED, None, -np.inf, np.nan, np.inf, np.inf, np.inf, iters, wall)

    xs = np.array(sol["x"]).ravel()
    zs = np.array(sol["z"]).ravel()

    # certify on the equilibrated problem
    offs = np.cumsum([0] + [b.dim for b in blocks])
    z_blocks, s_blocks, prim_viol, compl = [], [], 0.0, []
    dual_res = sc.c.copy()
    for j, b in enumerate(blocks):
        s = sc.consts[j] + sc.coefs[j] @ xs
        z = zs[offs[j]:offs[j + 1]]
        if b.kind == PSD:
            z = _sym_from_lower(z, b.size).ravel()
            s = s.reshape(b.size, b.size)
            s = (0.5 * (s + s.T)).ravel()
            val = s.reshape(b.size, b.size)
        else:
            val = s
        prim_viol = max(prim_viol, cone_violation(b.kind, val))
        compl.append(float(s @ z))
        dual_res -= sc.coefs[j].T @ z
        z_blocks.append(z)
        s_blocks.append(s)
    h_norm = float(np.linalg.norm(h))
    pobj = float(sc.c @ xs)
    dobj = -float(sum(sc.consts[j] @ z_blocks[j] for j in range(len(blocks))))
    gap = abs(pobj - dobj) / (1.0 + abs(pobj))
    pres = prim_viol / (1.0 + h_norm)
    dres = float(np.linalg.norm(dual_res)) / (1.0 + float(np.linalg.norm(sc.c)))

    x = xs * sc.col_scale
    duals = [None] * len(p.blocks)
    comp_out = [None] * len(p.blocks)
    for j, k in enumerate(sc.order):
        rs = np.broadcast_to(sc.row_scale[j], (blocks[j].size,)) if blocks[j].kind == NONNEG else sc.row_scale[j]
        duals[k] = zs_orig = z_blocks[j] * rs * sc.c_norm
        if blocks[j].kind == PSD:
            duals[k] = zs_orig.reshape(blocks[j].size, blocks[j].size)
        comp_out[k] = compl[j]

    certified = gap <= tol and pres <= tol and dres <= tol
    if certified:
        status = Status.OPTIMAL
    elif sol["status"] == "unknown" and iters >= max_iter:
        status = Status.MAX_ITER
    else:
        status = Status.NUMERICAL_TROUBLE
    return SolveResult(
        status=status, x=x, objective=p.objective(x),
        dual_objective=dobj * sc.c_norm, gap=gap, primal_residual=pres, dual_residual=dres,
        iterations=iters, wall_time=wall, duals=duals, complementarity=comp_out,
        scaled_norms={"h": h_norm, "c": float(np.linalg.norm(sc.c)), "c_norm": sc.c_norm,
                      "scaled_objective": pobj, "scaled_dual_objective": dobj,
                      "cvxopt_status": sol["status"]},
    )
