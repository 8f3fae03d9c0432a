"""Sparse exact matrices with rank and right-kernel computations."""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm

import numpy as np

from ..errors import FieldMismatchError, RationalSizeError
from . import kernels
from .fields import FieldElement, PrimeField, Rationals

# Rational elimination is refused beyond this dimension (coefficient blow-up).
RATIONAL_SIZE_LIMIT = 2000


class ExactMatrix:
    """A rows x cols matrix over one field, stored as {(i, j): raw value}.

    Zero entries are never stored.
    """

    __slots__ = ("field", "nrows", "ncols", "entries")

    def __init__(self, field, nrows, ncols, entries=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        clean = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < nrows and 0 <= j < ncols):
                    raise IndexError(f"entry ({i}, {j}) outside {nrows}x{ncols}")
                v = _raw(field, v)
                if not field.is_zero(v):
                    clean[(i, j)] = v
        self.entries = clean

    @classmethod
    def from_rows(cls, field, rows, ncols=None):
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        entries = {}
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise ValueError("ragged rows")
            for j, v in enumerate(r):
                entries[(i, j)] = v
        return cls(field, len(rows), ncols, entries)

    @classmethod
    def from_row_dicts(cls, field, rows, ncols):
        m = cls(field, len(rows), ncols)
        ent = m.entries
        for i, r in enumerate(rows):
            for j, v in r.items():
                if not field.is_zero(v):
                    ent[(i, j)] = v
        return m

    @classmethod
    def identity(cls, field, n):
        return cls(field, n, n, {(i, i): field.one for i in range(n)})

    @classmethod
    def zeros(cls, field, nrows, ncols):
        return cls(field, nrows, ncols)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def nnz(self):
        return len(self.entries)

    def __getitem__(self, ij):
        return FieldElement(self.field, self.entries.get(ij, self.field.zero))

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.field == other.field
            and self.shape == other.shape
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"ExactMatrix({self.field}, {self.nrows}x{self.ncols}, nnz={self.nnz})"

    def row_dicts(self):
        rows = [dict() for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def to_rows(self):
        K = self.field
        out = [[K.zero] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def column(self, j):
        K = self.field
        col = [K.zero] * self.nrows
        for (i, jj), v in self.entries.items():
            if jj == j:
                col[i] = v
        return col

    def transpose(self):
        return ExactMatrix(self.field, self.ncols, self.nrows, {(j, i): v for (i, j), v in self.entries.items()})

    def __matmul__(self, other):
        if self.field != other.field:
            raise FieldMismatchError(f"cannot multiply matrices over {self.field} and {other.field}")
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        K = self.field
        by_row = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        out = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                key = (i, j)
                out[key] = K.add(out.get(key, K.zero), K.mul(a, b))
        return ExactMatrix(K, self.nrows, other.ncols, out)

    def is_zero(self):
        return not self.entries

    def rank(self):
        return rank(self)

    def kernel_basis(self):
        return kernel_basis(self)


def _raw(field, v):
    if isinstance(v, FieldElement):
        if v.field != field:
            raise FieldMismatchError(f"entry over {v.field} in a matrix over {field}")
        return v.value
    if isinstance(v, (int, Fraction)) or isinstance(v, tuple):
        return field.coerce(v)
    return v


# ---------------------------------------------------------------- rank


def rank(M):
    """Exact rank of an :class:`ExactMatrix`."""
    K = M.field
    if not M.entries:
        return 0
    if isinstance(K, PrimeField):
        return kernels.rank_modp(_dense_int64(M), K.p)
    if isinstance(K, Rationals):
        if max(M.nrows, M.ncols) > RATIONAL_SIZE_LIMIT:
            raise RationalSizeError(
                f"{M.nrows}x{M.ncols} rational matrix exceeds {RATIONAL_SIZE_LIMIT}; use F_p mode"
            )
        return _rank_rational(M)
    return len(_rref_generic(K, M.row_dicts(), M.ncols)[0])


def _dense_int64(M):
    A = np.zeros((M.nrows, M.ncols), dtype=np.int64)
    if M.entries:
        idx = np.array(list(M.entries.keys()), dtype=np.int64)
        A[idx[:, 0], idx[:, 1]] = np.fromiter(M.entries.values(), dtype=np.int64, count=len(M.entries))
    return A


def _integer_rows(M):
    """Rows scaled to primitive integer vectors (same row space over Q)."""
    rows = []
    for r in M.row_dicts():
        if not r:
            continue
        den = reduce(lcm, (v.denominator for v in r.values()), 1)
        ir = {j: int(v * den) for j, v in r.items()}
        g = reduce(gcd, ir.values())
        if g != 1:
            ir = {j: v // g for j, v in ir.items()}
        rows.append(ir)
    return rows


def _rank_rational(M):
    """Fraction-free sparse elimination with a Markowitz-style pivot rule.

    Each step pivots on the shortest active row, at its column with the fewest
    active entries; rows are kept primitive to hold coefficient growth down.
    """
    rows = dict(enumerate(_integer_rows(M)))
    cols = {}
    for i, r in rows.items():
        for j in r:
            cols.setdefault(j, set()).add(i)
    rk = 0
    while rows:
        pi = min(rows, key=lambda i: (len(rows[i]), i))
        prow = rows.pop(pi)
        pc = min(prow, key=lambda j: (len(cols[j]), j))
        for j in prow:
            cols[j].discard(pi)
        a = prow[pc]
        for i in list(cols[pc]):
            r = rows[i]
            b = r[pc]
            g = gcd(a, b)
            ma, mb = a // g, b // g
            new = {}
            for j, v in r.items():
                new[j] = v * ma
            for j, v in prow.items():
                w = new.get(j, 0) - v * mb
                if w:
                    new[j] = w
                else:
                    new.pop(j, None)
            for j in r:
                if j not in new:
                    cols[j].discard(i)
            if new:
                c = reduce(gcd, new.values())
                if c != 1 and c != -1:
                    new = {j: v // c for j, v in new.items()}
                for j in new:
                    if j not in r:
                        cols.setdefault(j, set()).add(i)
                rows[i] = new
            else:
                del rows[i]
        rk += 1
    return rk


# ---------------------------------------------------------------- RREF and kernel


def _rref_generic(K, rows, ncols):
    """Sparse reduced row echelon form over any field; returns (pivots, rows)."""
    active = [dict(r) for r in rows if r]
    pivots, prows = [], []
    for c in range(ncols):
        idx = None
        for i, r in enumerate(active):
            if c in r:
                idx = i
                break
        if idx is None:
            continue
        prow = active.pop(idx)
        inv = K.inv(prow[c])
        prow = {j: K.mul(v, inv) for j, v in prow.items()}
        for group in (active, prows):
            for r in group:
                f = r.get(c)
                if f is None:
                    continue
                for j, v in prow.items():
                    w = K.sub(r.get(j, K.zero), K.mul(f, v))
                    if K.is_zero(w):
                        r.pop(j, None)
                    else:
                        r[j] = w
        active = [r for r in active if r]
        pivots.append(c)
        prows.append(prow)
        if not active:
            break
    return pivots, prows


def rref(M):
    """Reduced row echelon form: (pivot columns, list of row dicts)."""
    K = M.field
    if isinstance(K, PrimeField) and M.entries:
        R, piv = kernels.rref_modp(_dense_int64(M), K.p)
        rows = [{j: int(v) for j, v in enumerate(row) if v} for row in R]
        return list(piv), rows
    return _rref_generic(K, M.row_dicts(), M.ncols)


def kernel_vectors(M):
    """Right-kernel basis as sparse dicts, plus the free column of each vector.

    Vector k has a 1 at ``free[k]`` and 0 at every other free column.
    """
    K = M.field
    if isinstance(K, Rationals) and max(M.nrows, M.ncols) > RATIONAL_SIZE_LIMIT:
        raise RationalSizeError(f"{M.nrows}x{M.ncols} rational matrix exceeds {RATIONAL_SIZE_LIMIT}")
    pivots, prows = rref(M)
    pivset = set(pivots)
    free = [j for j in range(M.ncols) if j not in pivset]
    vectors = []
    for f in free:
        vec = {f: K.one}
        for pc, row in zip(pivots, prows):
            v = row.get(f)
            if v is not None and not K.is_zero(v):
                vec[pc] = K.neg(v)
        vectors.append(vec)
    return vectors, free


def kernel_basis(M):
    """Columns form a basis of the right kernel {v : M v = 0}.

    Returned as an ncols x (ncols - rank) :class:`ExactMatrix`; the basis
    vector for free column f has a 1 in position f and zeros in the other
    free positions.
    """
    vectors, _ = kernel_vectors(M)
    entries = {(i, k): v for k, vec in enumerate(vectors) for i, v in vec.items()}
    return ExactMatrix(M.field, M.ncols, len(vectors), entries)
