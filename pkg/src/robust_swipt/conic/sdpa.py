"""SDPA sparse format (``.dat-s``) export and parsing.

SDPA's primal form is ``min c @ x  s.t.  sum_k x_k F_k - F_0 >= 0``, so a
block ``const + coef @ x`` is written with ``F_0 = -const`` and
``F_k = coef[:, k]``. PSD blocks keep their order; all non-negative entries
are merged into one trailing diagonal block (negative size in the block
structure line). Second-order cones are not expressible in the format.
"""
from __future__ import annotations

import numpy as np

from ..errors import UnsupportedCone
from .problem import NONNEG, PSD, BlockBuilder, ConeBlock, ConicProblem


def _fmt(v: float) -> str:
    return repr(float(v))


def export_sdpa(p: ConicProblem) -> str:
    if p.has_soc():
        raise UnsupportedCone("SDPA format cannot express second-order cones; use the LMI encoding")
    psd = [b for b in p.blocks if b.kind == PSD]
    nonneg = [b for b in p.blocks if b.kind == NONNEG]
    n_diag = sum(b.size for b in nonneg)
    struct = [b.size for b in psd] + ([-n_diag] if n_diag else [])

    lines = [str(p.n_vars), str(len(struct)), " ".join(str(s) for s in struct),
             " ".join(_fmt(v) for v in p.c)]
    entries: list[tuple[int, int, int, int, float]] = []
    for blk, b in enumerate(psd, start=1):
        s = b.size
        F0 = -b.const.reshape(s, s)
        iu, ju = np.triu_indices(s)
        for i, j in zip(iu, ju):
            if F0[i, j] != 0.0:
                entries.append((0, blk, i + 1, j + 1, F0[i, j]))
        coo = b.coef.tocoo()
        for r, k, v in zip(coo.row, coo.col, coo.data):
            i, j = divmod(int(r), s)
            if i <= j and v != 0.0:
                entries.append((int(k) + 1, blk, i + 1, j + 1, v))
    if n_diag:
        blk = len(psd) + 1
        off = 0
        for b in nonneg:
            for r in range(b.size):
                if b.const[r] != 0.0:
                    entries.append((0, blk, off + r + 1, off + r + 1, -b.const[r]))
            coo = b.coef.tocoo()
            for r, k, v in zip(coo.row, coo.col, coo.data):
                if v != 0.0:
                    entries.append((int(k) + 1, blk, off + int(r) + 1, off + int(r) + 1, v))
            off += b.size
    entries.sort(key=lambda e: e[:4])
    lines.extend(f"{k} {blk} {i} {j} {_fmt(v)}" for k, blk, i, j, v in entries)
    return "\n".join(lines) + "\n"


def _numbers(line: str) -> list[str]:
    for ch in ",{}()":
        line = line.replace(ch, " ")
    return line.split()


def parse_sdpa(text: str) -> ConicProblem:
    """Parse SDPA sparse text into a :class:`ConicProblem` (PSD blocks, one nonneg block)."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and ln[0] not in '"*']
    m = int(_numbers(lines[0])[0])
    nblock = int(_numbers(lines[1])[0])
    struct = [int(float(s)) for s in _numbers(lines[2])[:nblock]]
    c = np.array([float(s) for s in _numbers(lines[3])[:m]])

    builders = []
    for s in struct:
        size = abs(s)
        builders.append(BlockBuilder(m, size * size if s > 0 else size))
    cols: list[dict] = [dict() for _ in struct]
    for ln in lines[4:]:
        k, blk, i, j, v = _numbers(ln)[:5]
        k, blk, i, j, v = int(k), int(blk) - 1, int(i) - 1, int(j) - 1, float(v)
        s = struct[blk]
        if s > 0:
            size = s
            idx = [i * size + j, j * size + i] if i != j else [i * size + i]
        else:
            if i != j:
                raise ValueError("off-diagonal entry in a diagonal block")
            idx = [i]
        if k == 0:
            for r in idx:
                builders[blk].const[r] -= v
        else:
            col = cols[blk].setdefault(k - 1, np.zeros(builders[blk].dim))
            for r in idx:
                col[r] += v
    blocks = []
    for blk, s in enumerate(struct):
        for k in sorted(cols[blk]):
            builders[blk].add(k, cols[blk][k])
        kind = PSD if s > 0 else NONNEG
        blocks.append(ConeBlock(kind, abs(s), builders[blk].const, builders[blk].coef(), f"sdpa-block-{blk + 1}"))
    return ConicProblem(m, c, blocks)

