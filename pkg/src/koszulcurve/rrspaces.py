"""Riemann-Roch spaces H^0(D) as explicit function bases.

H^0(m * base - E) is the subspace of the ambient monomial space H^0(m * base)
cut out by vanishing conditions: at a point P of multiplicity k the first k
coefficients of the local expansion must vanish.  Divisors with a positive
part away from the base are first moved by explicit principal divisors
(:func:`principal_shift`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .curves import HYPERELLIPTIC, RATIONAL, CurvePoint, Divisor, DivisorSpec
from .errors import InternalError, InvalidDivisorError, NormalizationError, ShiftFailure
from .exactalg import polys
from .exactalg.fields import ExtensionField, extension_field
from .exactalg.matrix import ExactMatrix, kernel_vectors


class FunctionRep:
    """A function in H^0(m * base): a combination of ambient monomial keys.

    ``coeffs`` maps model keys (see :meth:`CurveModel.ambient_keys`) to raw
    values of the model field; it is always in normal form.
    """

    __slots__ = ("model", "m", "coeffs")

    def __init__(self, model, m, coeffs):
        K = model.field
        self.model = model
        self.m = m
        self.coeffs = {k: v for k, v in coeffs.items() if not K.is_zero(v)}

    @classmethod
    def monomial(cls, model, m, key):
        return cls(model, m, {key: model.field.one})

    @classmethod
    def constant(cls, model, c=None):
        key = model.ambient_keys(0)[0]
        return cls(model, 0, {key: model.field.one if c is None else model.field.coerce(c)})

    def __mul__(self, other):
        K = self.model.field
        if not isinstance(other, FunctionRep):
            c = K.coerce(other)
            return FunctionRep(self.model, self.m, {k: K.mul(c, v) for k, v in self.coeffs.items()})
        out = {}
        mul_keys = self.model.mul_keys
        for k1, a in self.coeffs.items():
            for k2, b in other.coeffs.items():
                ab = K.mul(a, b)
                for k, c in mul_keys(k1, k2).items():
                    out[k] = K.add(out.get(k, K.zero), K.mul(ab, c))
        return FunctionRep(self.model, self.m + other.m, out)

    __rmul__ = __mul__

    def __add__(self, other):
        K = self.model.field
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = K.add(out.get(k, K.zero), v)
        return FunctionRep(self.model, max(self.m, other.m), out)

    def __neg__(self):
        K = self.model.field
        return FunctionRep(self.model, self.m, {k: K.neg(v) for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, FunctionRep) and self.model == other.model and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def is_zero(self):
        return not self.coeffs

    def expand(self, ctx):
        """Local expansion at the point of ``ctx``."""
        K = ctx.field
        base = self.model.field
        acc = None
        for key, c in self.coeffs.items():
            term = self.model.key_series(key, ctx) * (K.embed(c) if K != base else c)
            acc = term if acc is None else acc + term
        if acc is None:
            from .exactalg.series import Series

            return Series(K, [], ctx.precision)
        return acc

    def order_at(self, P, cap=16):
        """Vanishing order at P, or ``cap`` if it is at least ``cap``."""
        ctx = self.model.expansion_ctx(P, cap)
        return self.expand(ctx).valuation()

    def __repr__(self):
        K = self.model.field
        parts = [f"{K.format(v)}*{_key_label(self.model, k)}" for k, v in sorted(self.coeffs.items())]
        return "FunctionRep(" + (" + ".join(parts) or "0") + ")"


def _key_label(model, key):
    if model.family == RATIONAL:
        return f"x^{key[0]}"
    if model.family == HYPERELLIPTIC:
        return f"x^{key[0]}" + ("*y" if key[1] else "")
    return "x^{}*y^{}*z^{}".format(*key)


class RRSpace:
    """A basis of H^0(D) inside the ambient space H^0(m * base).

    The basis comes from a kernel computation and is reduced with respect
    to ``free``: basis vector i has coordinate 1 at ambient index
    ``free[i]`` and 0 at every other free index, so coordinates of a member
    are read off directly.
    """

    def __init__(self, divisor, keys, vectors, free):
        self.divisor = divisor
        self.model = divisor.model
        self.ambient_bound = divisor.base_multiple
        self.keys = keys
        self.vectors = vectors
        self.free = free
        self._index = {k: i for i, k in enumerate(keys)}
        self.basis = [FunctionRep(self.model, self.ambient_bound, {keys[j]: v for j, v in vec.items()}) for vec in vectors]

    @property
    def dim(self):
        return len(self.basis)

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"RRSpace({self.divisor.label()}, dim={self.dim})"

    def coordinates(self, f):
        """Coordinates of ``f`` in :attr:`basis`; raises if f is not in the span."""
        K = self.model.field
        idx = self._index
        for k in f.coeffs:
            if k not in idx:
                raise InternalError(f"monomial {k} outside the ambient space of {self.divisor.label()}")
        coords = [f.coeffs.get(self.keys[j], K.zero) for j in self.free]
        residual = {idx[k]: v for k, v in f.coeffs.items()}
        for c, vec in zip(coords, self.vectors):
            if K.is_zero(c):
                continue
            for j, v in vec.items():
                w = K.sub(residual.get(j, K.zero), K.mul(c, v))
                if K.is_zero(w):
                    residual.pop(j, None)
                else:
                    residual[j] = w
        if residual:
            raise InternalError(f"function does not lie in H^0({self.divisor.label()})")
        return coords

    def contains(self, f):
        try:
            self.coordinates(f)
        except InternalError:
            return False
        return True


def ambient_basis(model, m):
    """Monomial basis of H^0(m * base)."""
    return [FunctionRep.monomial(model, m, k) for k in model.ambient_keys(m)]


def condition_matrix(model, D, keys):
    """Rows: flattened expansion coefficients t^0..t^{k-1} at each condition point."""
    K = model.field
    rows = []
    for P, k in D.conditions:
        ctx = model.expansion_ctx(P, k)
        KP = P.field
        series = [model.key_series(key, ctx) for key in keys]
        e = P.degree
        for i in range(k):
            flat = [KP.to_base(s[i]) if e > 1 else (s[i],) for s in series]
            for c in range(e):
                rows.append({j: flat[j][c] for j in range(len(keys)) if not K.is_zero(flat[j][c])})
    return ExactMatrix.from_row_dicts(K, rows, len(keys))


def _cache(model):
    return model.__dict__.setdefault("_rr_cache", {})


def rr_space(model, D):
    """Basis of H^0(D) for a normalized divisor ``D = m * base - E``."""
    if isinstance(D, Divisor):
        if not D.is_normalized():
            raise NormalizationError("rr_space needs a normalized divisor; use principal_shift first")
        D = D.to_spec()
    if D.model != model:
        raise InvalidDivisorError("divisor belongs to a different model")
    cache = _cache(model)
    sp = cache.get(D)
    if sp is not None:
        return sp
    for P, _ in D.conditions:
        if P.is_infinity:
            raise NormalizationError("condition at the base point")
        if not model.contains(P.coords, P.field):
            raise InvalidDivisorError(f"{P.label()} is not on the curve")
    keys = model.ambient_keys(D.base_multiple)
    K = model.field
    if D.degree < 0 or not keys:
        sp = RRSpace(D, keys, [], [])
    elif not D.conditions:
        sp = RRSpace(D, keys, [{j: K.one} for j in range(len(keys))], list(range(len(keys))))
    else:
        M = condition_matrix(model, D, keys)
        vectors, free = kernel_vectors(M)
        sp = RRSpace(D, keys, vectors, free)
    cache[D] = sp
    return sp


def h0(model, D):
    """dim H^0(D); divisors with a positive part are shifted first."""
    if isinstance(D, Divisor):
        if D.degree < 0:
            return 0
        if not D.is_normalized():
            D, _ = principal_shift(model, D)
        else:
            D = D.to_spec()
    return rr_space(model, D).dim


def h0_effective(model, E):
    """h^0 of an effective divisor E = sum k_i P_i (points may include infinity).

    Uses Riemann-Roch with Serre duality: deg E - g + 1 + h^0(K - E).
    """
    items = list(E.items()) if isinstance(E, dict) else list(E)
    deg = sum(P.degree * k for P, k in items)
    KmE = model.divisor(model.canonical_multiple, items)
    return deg - model.genus + 1 + rr_space(model, KmE).dim


def h1(model, D):
    """h^1(D) = h^0(K - D)."""
    return h0(model, model.canonical_divisor().to_divisor() - (D.to_divisor() if isinstance(D, DivisorSpec) else D))


# ---------------------------------------------------------------- principal shifts


def _minpoly(K, a, base):
    """Minimal polynomial over the prime field of a (raw value of K)."""
    if not isinstance(K, ExtensionField):
        return [base.neg(a), base.one]
    conj = [a]
    cur = a
    while True:
        cur = K.frobenius(cur)
        if cur == a:
            break
        conj.append(cur)
    poly = [K.one]
    for c in conj:
        poly = polys.mul(K, poly, [K.neg(c), K.one])
    return [c[0] for c in poly]


def _principal_divisor(model, P, choice=0):
    """(h, div(h)) for an explicit function h vanishing at P, with poles only at the base."""
    K = model.field
    if model.family == RATIONAL:
        h = _minpoly(P.field, P.coords[0], K)
        e = len(h) - 1
        func = FunctionRep(model, e, {(i,): c for i, c in enumerate(h)})
        return func, Divisor(model, -e, {P: 1})
    if model.family == HYPERELLIPTIC:
        KP = P.field
        a, b = P.coords
        h = _minpoly(KP, a, K)
        e1 = len(h) - 1
        func = FunctionRep(model, 2 * e1, {(i, 0): c for i, c in enumerate(h)})
        if KP.is_zero(b):
            zeros = {P: 2}
        else:
            Pbar = model.conjugate(P)
            zeros = {P: 1} if Pbar == P else {P: 1, Pbar: 1}
        div = Divisor(model, -2 * e1, zeros)
        if div.degree != 0:
            raise InternalError("principal divisor of nonzero degree")
        return func, div
    return _plane_line_divisor(model, P, choice)


def _candidate_directions():
    seen = set()
    rng = range(-2, 3)
    base = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1), (1, -1, 0), (1, 0, -1), (0, 1, -1)]
    for v in base + [t for t in itertools.product(rng, rng, rng)]:
        if v == (0, 0, 0) or v in seen:
            continue
        seen.add(v)
        yield v


def _line_intersection(model, P, V):
    """Intersection divisor of the line through P and V with the curve, or None
    when a residual point is not representable over the working field."""
    K = model.field
    R = model.line_restriction(P, V)
    d = model.d
    if not R:
        return None  # line is a component (cannot happen for smooth curves)
    mu = 0
    while mu < len(R) and K.is_zero(R[mu]):
        mu += 1
    rest = R[mu:]
    nu = d - (len(R) - 1)
    zeros = {P: mu}
    if nu > 0:
        Vpt = model.point(V)
        zeros[Vpt] = zeros.get(Vpt, 0) + nu
    remaining = len(rest) - 1
    if remaining == 0:
        return zeros
    if K.characteristic == 0:
        roots = polys.roots_rational(rest)
        found = 0
        for s, mult in roots.items():
            pt = model.point(tuple(K.add(P.coords[i], K.mul(s, K.coerce(V[i]))) for i in range(3)))
            zeros[pt] = zeros.get(pt, 0) + mult
            found += mult
        return zeros if found == remaining else None
    for e in range(1, remaining + 1):
        Ke = extension_field(K.p, e)
        emb = [Ke.embed(c) if e > 1 else c for c in rest]
        for s in polys.roots_finite(Ke, emb):
            if e > 1 and any(Ke.in_subfield(s, k) for k in range(1, e) if e % k == 0):
                continue
            mult = polys.multiplicity(Ke, emb, s)
            coords = []
            for i in range(3):
                pi = Ke.embed(P.coords[i]) if e > 1 else P.coords[i]
                vi = Ke.embed(K.coerce(V[i])) if e > 1 else K.coerce(V[i])
                coords.append(Ke.add(pi, Ke.mul(s, vi)))
            pt = model.point(tuple(coords), Ke)
            zeros[pt] = zeros.get(pt, 0) + mult
    # each root of exact degree e was visited once per conjugate
    zeros_dedup = {}
    total = 0
    for pt, k in zeros.items():
        if pt.degree > 1:
            k //= pt.degree
        zeros_dedup[pt] = k
        total += k * pt.degree
    return zeros_dedup if total == d else None


def _plane_line_divisor(model, P, choice):
    if P.degree != 1:
        raise ShiftFailure(f"plane shifts need a degree-1 point, got {P.label()}", P)
    K = model.field
    skipped = 0
    tried = 0
    for V in _candidate_directions():
        Vr = tuple(K.coerce(c) for c in V)
        # V must differ from P projectively
        cross = (
            K.sub(K.mul(P.coords[1], Vr[2]), K.mul(P.coords[2], Vr[1])),
            K.sub(K.mul(P.coords[2], Vr[0]), K.mul(P.coords[0], Vr[2])),
            K.sub(K.mul(P.coords[0], Vr[1]), K.mul(P.coords[1], Vr[0])),
        )
        if all(K.is_zero(c) for c in cross):
            continue
        tried += 1
        if tried > 200:
            break
        zeros = _line_intersection(model, P, Vr)
        if zeros is None:
            continue
        if skipped < choice:
            skipped += 1
            continue
        line = FunctionRep(model, 1, {(1, 0, 0): cross[0], (0, 1, 0): cross[1], (0, 0, 1): cross[2]})
        return line, Divisor(model, -1, zeros)
    raise ShiftFailure(f"no line through {P.label()} has residual points over {K}", P)


def principal_shift(model, D, choice=0):
    """Move the positive part of D off the base: returns ``(D', h)`` with
    ``D' = D - div(h)`` normalized, so that f -> f*h maps L(D) onto L(D')."""
    if isinstance(D, DivisorSpec):
        return D, FunctionRep.constant(model)
    D = Divisor(model, D.base_multiple, dict(D.points))
    h = FunctionRep.constant(model)
    guard = 0
    while not D.is_normalized():
        guard += 1
        if guard > 1000:
            raise ShiftFailure("principal shift did not terminate")
        P = min(D.positive_part, key=CurvePoint.sort_key)
        func, div = _principal_divisor(model, P, choice)
        D = D - div
        h = h * func
    return D.to_spec(), h


def is_linearly_equivalent(model, D1, D2):
    """D1 ~ D2, decided by h^0(D1 - D2) >= 1 on the degree-0 difference."""
    d1 = D1.to_divisor() if isinstance(D1, DivisorSpec) else D1
    d2 = D2.to_divisor() if isinstance(D2, DivisorSpec) else D2
    if d1.degree != d2.degree:
        return False
    diff = d1 - d2
    if diff.base_multiple == 0 and not diff.points:
        return True
    return h0(model, diff) >= 1


# ---------------------------------------------------------------- multiplication maps


@dataclass(frozen=True)
class MultMap:
    """Structure constants of V x W -> target: ``constants[i][j]`` is a dict
    target-index -> coefficient of v_i * w_j."""

    V: RRSpace
    W: RRSpace
    target: RRSpace
    constants: tuple

    def product_coordinates(self, i, j):
        return self.constants[i][j]


def mult_map(V, W, target=None):
    """Multiplication H^0(D1) x H^0(D2) -> H^0(D1 + D2) in the given bases."""
    model = V.model
    if target is None:
        target = rr_space(model, V.divisor + W.divisor)
    K = model.field
    consts = []
    for v in V.basis:
        row = []
        for w in W.basis:
            prod = v * w
            coords = target.coordinates(prod)
            row.append({k: c for k, c in enumerate(coords) if not K.is_zero(c)})
        consts.append(tuple(row))
    return MultMap(V, W, target, tuple(consts))
