"""Pure-Python fallback for the compiled elimination kernels.

Same signatures as ``_kernels``; works on sparse row dictionaries
internally so it stays usable on the sparse Koszul matrices.
"""

from __future__ import annotations

import numpy as np


def _sparse_rows(A, p):
    rows = []
    for row in np.asarray(A):
        d = {j: int(v) % p for j, v in enumerate(row) if int(v) % p}
        rows.append(d)
    return rows


def _eliminate(rows, ncols, p, full):
    pivots = []
    pivot_rows = []
    active = [r for r in rows if r]
    for c in range(ncols):
        idx = None
        for i, r in enumerate(active):
            if c in r:
                idx = i
                break
        if idx is None:
            continue
        prow = active.pop(idx)
        inv = pow(prow[c], -1, p)
        prow = {j: v * inv % p for j, v in prow.items()}
        nxt = []
        for r in active:
            f = r.get(c)
            if f:
                for j, v in prow.items():
                    w = (r.get(j, 0) - f * v) % p
                    if w:
                        r[j] = w
                    else:
                        r.pop(j, None)
            if r:
                nxt.append(r)
        active = nxt
        if full:
            for r in pivot_rows:
                f = r.get(c)
                if f:
                    for j, v in prow.items():
                        w = (r.get(j, 0) - f * v) % p
                        if w:
                            r[j] = w
                        else:
                            r.pop(j, None)
        pivots.append(c)
        pivot_rows.append(prow)
        if not active:
            break
    return pivots, pivot_rows


def rank_modp(A, p):
    A = np.asarray(A)
    if A.size == 0:
        return 0
    pivots, _ = _eliminate(_sparse_rows(A, p), A.shape[1], p, False)
    return len(pivots)


def rref_modp(A, p):
    A = np.asarray(A)
    if A.size == 0:
        return np.zeros((0, A.shape[1] if A.ndim == 2 else 0), dtype=np.int64), []
    pivots, prs = _eliminate(_sparse_rows(A, p), A.shape[1], p, True)
    R = np.zeros((len(prs), A.shape[1]), dtype=np.int64)
    for i, r in enumerate(prs):
        for j, v in r.items():
            R[i, j] = v
    return R, pivots
