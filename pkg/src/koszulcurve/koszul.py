"""Koszul differentials, dimensions of K_{p,q}(C,B;L) and Betti tables.

The strand through K_{p,q} is

    wedge^{p+1} V (x) W_{q-1} -> wedge^p V (x) W_q -> wedge^{p-1} V (x) W_{q+1}

with V = H^0(L), W_q = H^0(B + qL) (zero for q < 0), and the differential
d(v_S (x) w) = sum_j (-1)^j v_{S - i_j} (x) (v_{i_j} * w).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from dataclasses import field as dc_field
from math import comb

from .curves import MAX_ENUMERATION_DEGREE, Divisor, DivisorSpec
from .errors import RangeError, UsageError
from .exactalg.fields import PrimeField, field_label
from .exactalg.matrix import ExactMatrix, rank
from .rrspaces import h0, mult_map, principal_shift, rr_space


def wedge_enum(n, p):
    """All p-subsets of range(n) as sorted tuples, in lexicographic order."""
    if p < 0 or p > n:
        return []
    return list(itertools.combinations(range(n), p))


def _normalize(model, D):
    if isinstance(D, DivisorSpec):
        return D
    if isinstance(D, Divisor):
        if D.is_normalized():
            return D.to_spec()
        return principal_shift(model, D)[0]
    raise TypeError(f"expected a divisor, got {type(D).__name__}")


class GradedSectionData:
    """The section module R(C,B;L) = sum_q H^0(B + qL) with V = H^0(L) acting.

    B and L may carry positive parts; they are moved to normalized shape by
    principal shifts first (an isomorphism of graded modules).  Spaces and
    multiplication maps are built on demand and memoized.
    """

    def __init__(self, model, B, L):
        self.model = model
        self.B = _normalize(model, B)
        self.L = _normalize(model, L)
        self.V = rr_space(model, self.L)
        self._W = {}
        self._mult = {}

    @property
    def n(self):
        return self.V.dim

    def divisor(self, q):
        return self.B + q * self.L

    def W(self, q):
        if q < 0:
            return None
        sp = self._W.get(q)
        if sp is None:
            sp = self._W[q] = rr_space(self.model, self.divisor(q))
        return sp

    def w_dim(self, q):
        W = self.W(q)
        return 0 if W is None else W.dim

    def mult(self, q):
        """Structure constants of V x W_q -> W_{q+1}."""
        mm = self._mult.get(q)
        if mm is None:
            mm = self._mult[q] = mult_map(self.V, self.W(q), self.W(q + 1))
        return mm


def koszul_differential(data, p, q):
    """Matrix of wedge^p V (x) W_q -> wedge^{p-1} V (x) W_{q+1}.

    Rows index the target pairs (T, t) and columns the domain pairs (S, k),
    both ordered by wedge_enum and then basis index.
    """
    n = data.n
    K = data.model.field
    wq = data.w_dim(q)
    wq1 = data.w_dim(q + 1)
    src = wedge_enum(n, p)
    tgt = wedge_enum(n, p - 1)
    nrows, ncols = len(tgt) * wq1, len(src) * wq
    if p == 0 or nrows == 0 or ncols == 0:
        return ExactMatrix(K, nrows, ncols)
    if q + 1 < 0:
        raise RangeError(f"W_{q + 1} is outside the module")
    consts = data.mult(q).constants
    tindex = {T: i for i, T in enumerate(tgt)}
    entries = {}
    for si, S in enumerate(src):
        for j, i in enumerate(S):
            T = tindex[S[:j] + S[j + 1:]]
            row_consts = consts[i]
            for k in range(wq):
                col = si * wq + k
                for t, c in row_consts[k].items():
                    v = c if j % 2 == 0 else K.neg(c)
                    key = (T * wq1 + t, col)
                    old = entries.get(key)
                    entries[key] = v if old is None else K.add(old, v)
    return ExactMatrix(K, nrows, ncols, entries)


def check_globally_generated(model, L):
    """Raise UsageError unless L is base-point free (as far as can be decided)."""
    g = model.genus
    L = _normalize(model, L)
    if L.degree < 0:
        raise UsageError(f"L = {L.label()} has negative degree")
    if L.degree >= 2 * g:
        return
    n = h0(model, L)
    if n == 0:
        raise UsageError(f"L = {L.label()} has no sections")
    # A closed point P is a base point iff every section vanishes there.
    # The base locus has degree <= deg L, so bounded enumeration is complete.
    if not L.conditions and not model.has_base_point:
        return  # m*H with m >= 1: x^m, y^m, z^m have no common zero
    if not L.conditions and model.has_base_point:
        candidates = [model.infinity]
    elif isinstance(model.field, PrimeField) and L.degree <= MAX_ENUMERATION_DEGREE:
        candidates = model.enumerate_closed_points(L.degree)
    else:
        raise UsageError(
            f"cannot certify that L = {L.label()} (deg {L.degree} < 2g = {2 * g}) is globally generated over {model.field}"
        )
    for P in candidates:
        if h0(model, L.to_divisor() - Divisor(model, 0, {P: 1})) == n:
            raise UsageError(f"L = {L.label()} has a base point at {P.label()}")


class KoszulComplex:
    """Ranks of the differentials of one (B, L) pair, memoized per (p, q)."""

    def __init__(self, data):
        self.data = data
        self._ranks = {}

    def rank(self, p, q):
        if p <= 0 or p > self.data.n or q < 0:
            return 0
        key = (p, q)
        r = self._ranks.get(key)
        if r is None:
            M = koszul_differential(self.data, p, q)
            r = self._ranks[key] = rank(M) if M.entries else 0
        return r

    def chain_dim(self, p, q):
        return comb(self.data.n, p) * self.data.w_dim(q) if 0 <= p <= self.data.n else 0

    def dim(self, p, q):
        return self.chain_dim(p, q) - self.rank(p, q) - self.rank(p + 1, q - 1)

    def matrix_size(self, p, q):
        n = self.data.n
        return comb(n, p) * self.data.w_dim(q) + comb(n, p - 1) * self.data.w_dim(q + 1) if p >= 1 else 0


def koszul_dim(model, B, L, p, q, check_gg=True):
    """dim K_{p,q}(C,B;L)."""
    if p < 0:
        raise UsageError("p must be nonnegative")
    if check_gg:
        check_globally_generated(model, L)
    data = GradedSectionData(model, B, L)
    return KoszulComplex(data).dim(p, q)


@dataclass
class BettiTable:
    """dims[p][q] = dim K_{p,q}(C,B;L) for 0 <= p < h^0(L), 0 <= q <= q_max."""

    dims: list
    g: int
    degL: int
    degB: int
    h0L: int
    q_max: int
    B: str = ""
    L: str = ""
    field_label: str = ""
    gon: int | None = None
    exceptional: bool | None = None
    ranks: dict = dc_field(default_factory=dict, repr=False)
    section_dims: list = dc_field(default_factory=list, repr=False)

    @property
    def p_max(self):
        return len(self.dims) - 1

    def __getitem__(self, pq):
        p, q = pq
        if 0 <= p < len(self.dims) and 0 <= q <= self.q_max:
            return self.dims[p][q]
        return 0

    def row(self, q):
        """K_{p,q} for p = 0..p_max."""
        return [self.dims[p][q] for p in range(len(self.dims))]

    def nonzero_range(self, q=1):
        return [p for p in range(len(self.dims)) if self.dims[p][q]]

    def format(self):
        width = max(3, max((len(str(v)) for r in self.dims for v in r), default=1))
        head = "q\\p " + " ".join(str(p).rjust(width) for p in range(len(self.dims)))
        lines = [head]
        for q in range(self.q_max + 1):
            cells = " ".join(("-" if v == 0 else str(v)).rjust(width) for v in self.row(q))
            lines.append(f"{q:>3} " + cells)
        return "\n".join(lines)


def betti_table(model, B, L, q_max=3, check_gg=True, data=None):
    """All dims K_{p,q} for 0 <= p <= h^0(L)-1 and 0 <= q <= q_max.

    Differential ranks are evaluated smallest matrix first; each rank is
    computed once and shared by the two cells that need it.
    """
    if check_gg:
        check_globally_generated(model, L)
    if data is None:
        data = GradedSectionData(model, B, L)
    cx = KoszulComplex(data)
    n = data.n
    needed = set()
    for p in range(n):
        for q in range(q_max + 1):
            needed.add((p, q))
            needed.add((p + 1, q - 1))
    for p, q in sorted(needed, key=lambda pq: (cx.matrix_size(*pq), pq)):
        cx.rank(p, q)
    dims = [[cx.dim(p, q) for q in range(q_max + 1)] for p in range(max(n, 1))]
    return BettiTable(
        dims=dims,
        g=model.genus,
        degL=data.L.degree,
        degB=data.B.degree,
        h0L=n,
        q_max=q_max,
        B=data.B.label(),
        L=data.L.label(),
        field_label=field_label(model.field),
        ranks=dict(cx._ranks),
        section_dims=[data.w_dim(k) for k in range(q_max + 2)],
    )


@dataclass
class HilbertResult:
    ok: bool
    lhs: list
    rhs: list
    first_mismatch: int | None = None

    def __bool__(self):
        return self.ok


def hilbert_check(table, data):
    """Compare sum (-1)^p K_{p,q} t^{p+q} with (1-t)^{h0(L)} sum_n h0(B+nL) t^n.

    Coefficients are compared up to degree p_max + q_max.
    """
    if table.q_max < 2:
        raise UsageError("hilbert_check needs a table with q_max >= 2")
    N = table.p_max + table.q_max
    lhs = [0] * (N + 1)
    for p in range(table.p_max + 1):
        for q in range(table.q_max + 1):
            if p + q <= N:
                lhs[p + q] += (-1) ** p * table.dims[p][q]
    hs = [data.w_dim(k) for k in range(N + 1)]
    n = data.n
    rhs = [sum((-1) ** i * comb(n, i) * hs[k - i] for i in range(min(n, k) + 1)) for k in range(N + 1)]
    for k in range(N + 1):
        if lhs[k] != rhs[k]:
            return HilbertResult(False, lhs, rhs, k)
    return HilbertResult(True, lhs, rhs)
