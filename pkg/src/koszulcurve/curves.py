"""Explicit curve models: rational, odd-degree hyperelliptic and smooth plane.

Every model exposes the same small interface used by the Riemann-Roch
layer:

* ``ambient_keys(m)`` -- a monomial basis of H^0(m * base);
* ``mul_keys(k1, k2)`` -- the product of two basis monomials, in normal form;
* ``expansion_ctx(point, precision)`` and ``key_series(key, ctx)`` -- local
  power-series expansions at a point.

Points over F_{p^e} are stored as one canonical representative of their
Frobenius orbit, so a :class:`CurvePoint` *is* a closed point.
"""

from __future__ import annotations

import math
import random

from .errors import (
    InvalidDivisorError,
    InvalidModelError,
    NormalizationError,
    SingularPointError,
    UnsupportedFieldError,
    UsageError,
)
from .exactalg import polys
from .exactalg.fields import QQ, ExtensionField, PrimeField, Rationals, extension_field, field_label
from .exactalg.series import Series, hensel_root

RATIONAL = "rational"
HYPERELLIPTIC = "hyperelliptic"
PLANE = "plane"

MAX_ENUMERATION_DEGREE = 4


# ---------------------------------------------------------------- points


class CurvePoint:
    """A closed point of a model.

    ``coords`` are raw values of ``field`` (the residue field: the model's
    field, or F_{p^e} for a degree-e point); ``None`` marks the point at
    infinity of a rational or hyperelliptic model.
    """

    __slots__ = ("model", "coords", "field", "_hash")

    def __init__(self, model, coords, field=None):
        self.model = model
        self.field = model.field if field is None else field
        self.coords = None if coords is None else tuple(coords)
        self._hash = hash((model, self.field, self.coords))

    @property
    def is_infinity(self):
        return self.coords is None

    @property
    def degree(self):
        """Residue degree e (the point contributes e to divisor degrees)."""
        return self.field.degree if isinstance(self.field, ExtensionField) else 1

    def __eq__(self, other):
        return (
            isinstance(other, CurvePoint)
            and self.model == other.model
            and self.field == other.field
            and self.coords == other.coords
        )

    def __hash__(self):
        return self._hash

    def sort_key(self):
        if self.coords is None:
            return (self.degree, 0, ())
        return (self.degree, 1, tuple(self.field.sort_key(c) for c in self.coords))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def label(self):
        if self.coords is None:
            return "Pinf"
        K = self.field
        parts = [K.format(c) for c in self.coords]
        sep = ":" if self.model.family == PLANE else ","
        body = "(" + sep.join(parts) + ")"
        if self.degree > 1:
            return f"[ext: {self.degree}, " + ", ".join(parts) + "]"
        return body

    def __repr__(self):
        return f"CurvePoint({self.label()})"


def _orbit_canonical(K, coords):
    """Smallest Frobenius conjugate of a coordinate tuple, and the orbit size."""
    if not isinstance(K, ExtensionField):
        return tuple(coords), 1
    conj = [tuple(coords)]
    cur = tuple(coords)
    for _ in range(1, K.degree):
        cur = tuple(K.frobenius(c) for c in cur)
        if cur == conj[0]:
            break
        conj.append(cur)
    best = min(conj, key=lambda cs: tuple(K.sort_key(c) for c in cs))
    return best, len(conj)


# ---------------------------------------------------------------- divisors


class DivisorSpec:
    """The normalized divisor ``m * base - sum k_i P_i`` with all k_i > 0.

    ``base`` is the point at infinity for rational and hyperelliptic models
    and the hyperplane class H for plane models.  Build instances with
    :meth:`CurveModel.divisor`, which merges repeated points and absorbs
    conditions at the point at infinity into ``m``.
    """

    __slots__ = ("model", "base_multiple", "conditions")

    def __init__(self, model, base_multiple, conditions=()):
        merged = {}
        for P, k in conditions:
            if P.model != model:
                raise InvalidDivisorError(f"{P} belongs to a different model")
            if P.is_infinity:
                raise NormalizationError("condition at the base point; absorb it into the base multiple")
            if k <= 0:
                raise NormalizationError(f"condition multiplicity must be positive, got {k} at {P}")
            merged[P] = merged.get(P, 0) + k
        self.model = model
        self.base_multiple = int(base_multiple)
        self.conditions = tuple(sorted(merged.items(), key=lambda pk: pk[0].sort_key()))

    @property
    def degree(self):
        return self.base_multiple * self.model.base_degree - sum(P.degree * k for P, k in self.conditions)

    def __eq__(self, other):
        return (
            isinstance(other, DivisorSpec)
            and self.model == other.model
            and self.base_multiple == other.base_multiple
            and self.conditions == other.conditions
        )

    def __hash__(self):
        return hash((self.model, self.base_multiple, self.conditions))

    def __add__(self, other):
        if isinstance(other, DivisorSpec):
            return DivisorSpec(self.model, self.base_multiple + other.base_multiple, self.conditions + other.conditions)
        return self.to_divisor() + other

    def __rmul__(self, q):
        if not isinstance(q, int) or q < 0:
            return NotImplemented
        return DivisorSpec(self.model, q * self.base_multiple, tuple((P, q * k) for P, k in self.conditions if q))

    __mul__ = __rmul__

    def __sub__(self, other):
        return self.to_divisor() - other

    def __neg__(self):
        return -self.to_divisor()

    def to_divisor(self):
        return Divisor(self.model, self.base_multiple, {P: -k for P, k in self.conditions})

    def label(self):
        base = "H" if self.model.family == PLANE else "Pinf"
        s = f"{self.base_multiple}*{base}"
        for P, k in self.conditions:
            s += f" - {k}*{P.label()}"
        return s

    def __repr__(self):
        return f"DivisorSpec({self.label()})"


class Divisor:
    """A divisor with signed point coefficients (positive parts allowed)."""

    __slots__ = ("model", "base_multiple", "points")

    def __init__(self, model, base_multiple, points=None):
        self.model = model
        m = int(base_multiple)
        pts = {}
        for P, k in (points or {}).items():
            if P.is_infinity:
                m += k
                continue
            if P.model != model:
                raise InvalidDivisorError(f"{P} belongs to a different model")
            pts[P] = pts.get(P, 0) + k
        self.base_multiple = m
        self.points = {P: k for P, k in pts.items() if k}

    @property
    def degree(self):
        return self.base_multiple * self.model.base_degree + sum(P.degree * k for P, k in self.points.items())

    @property
    def positive_part(self):
        return {P: k for P, k in self.points.items() if k > 0}

    def is_normalized(self):
        return all(k < 0 for k in self.points.values())

    def to_spec(self):
        if not self.is_normalized():
            raise NormalizationError(f"divisor has positive part {self.positive_part}")
        return DivisorSpec(self.model, self.base_multiple, tuple((P, -k) for P, k in self.points.items()))

    def _coerce(self, other):
        if isinstance(other, DivisorSpec):
            return other.to_divisor()
        return other

    def __add__(self, other):
        other = self._coerce(other)
        pts = dict(self.points)
        for P, k in other.points.items():
            pts[P] = pts.get(P, 0) + k
        return Divisor(self.model, self.base_multiple + other.base_multiple, pts)

    def __neg__(self):
        return Divisor(self.model, -self.base_multiple, {P: -k for P, k in self.points.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rmul__(self, q):
        return Divisor(self.model, q * self.base_multiple, {P: q * k for P, k in self.points.items()})

    def __eq__(self, other):
        other = self._coerce(other)
        return (
            isinstance(other, Divisor)
            and self.model == other.model
            and self.base_multiple == other.base_multiple
            and self.points == other.points
        )

    def __hash__(self):
        return hash((self.model, self.base_multiple, frozenset(self.points.items())))

    def label(self):
        base = "H" if self.model.family == PLANE else "Pinf"
        s = f"{self.base_multiple}*{base}"
        for P, k in sorted(self.points.items(), key=lambda pk: pk[0].sort_key()):
            s += f" {'+' if k > 0 else '-'} {abs(k)}*{P.label()}"
        return s

    def __repr__(self):
        return f"Divisor({self.label()})"


# ---------------------------------------------------------------- expansions


class ExpansionCtx:
    """Local expansions of the coordinate functions at a point.

    ``coords`` maps a coordinate name to its :class:`Series` in the local
    parameter t; ``uniformizer`` names the function whose expansion is t
    (shifted by its value at the point); ``chart`` records the
    dehomogenizing coordinate of plane models.
    """

    def __init__(self, point, precision, coords, uniformizer, chart=None):
        self.point = point
        self.precision = precision
        self.coords = coords
        self.uniformizer = uniformizer
        self.chart = chart
        self._powers = {}

    @property
    def field(self):
        return self.point.field

    def power(self, name, k):
        key = (name, k)
        s = self._powers.get(key)
        if s is None:
            if k == 0:
                s = Series.constant(self.field, self.field.one, self.precision)
            else:
                s = self.power(name, k - 1) * self.coords[name]
            self._powers[key] = s
        return s

    def __repr__(self):
        return f"ExpansionCtx({self.point.label()}, t={self.uniformizer}, prec={self.precision})"


# ---------------------------------------------------------------- models


class CurveModel:
    """Common machinery; see the family subclasses."""

    family = None
    base_degree = 1
    has_base_point = True

    def __init__(self, field):
        if not isinstance(field, (Rationals, PrimeField)):
            raise InvalidModelError(f"models must be defined over Q or a prime field, not {field}")
        self.field = field
        self._mul_cache = {}
        self._ctx_cache = {}

    # identity ---------------------------------------------------------
    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return self is other or (isinstance(other, CurveModel) and self._key() == other._key())

    def __hash__(self):
        h = self.__dict__.get("_hash_cache")
        if h is None:
            h = self._hash_cache = hash(self._key())
        return h

    # invariants -------------------------------------------------------
    @property
    def genus(self):
        raise NotImplementedError

    def canonical_divisor(self):
        return DivisorSpec(self, self.canonical_multiple)

    def divisor(self, base_multiple, conditions=()):
        """Normalized divisor ``m * base - sum k P``; conditions at infinity are absorbed."""
        m = base_multiple
        rest = []
        for P, k in conditions:
            if P.is_infinity:
                m -= k
            else:
                rest.append((P, k))
        return DivisorSpec(self, m, rest)

    def general_divisor(self, base_multiple, points=None):
        return Divisor(self, base_multiple, points or {})

    @property
    def infinity(self):
        if not self.has_base_point:
            raise UsageError("plane models have no distinguished base point")
        return CurvePoint(self, None)

    # points -----------------------------------------------------------
    def point(self, coords, field=None):
        """Validate and canonicalize a point given by coordinates over ``field``."""
        K = self.field if field is None else field
        if K.characteristic != self.field.characteristic:
            raise InvalidDivisorError(f"point field {K} incompatible with model field {self.field}")
        if isinstance(K, ExtensionField) and K.base != self.field:
            raise InvalidDivisorError(f"{K} is not an extension of {self.field}")
        raw = tuple(K.coerce(c) for c in coords)
        raw = self._normalize_coords(K, raw)
        if not self.contains(raw, K):
            sep = ":" if len(raw) == 3 else ","
            shown = sep.join(K.format(c) for c in raw)
            raise InvalidDivisorError(f"point ({shown}) is not on the curve")
        canon, size = _orbit_canonical(K, raw)
        if isinstance(K, ExtensionField) and size != K.degree:
            raise InvalidDivisorError(
                f"point is defined over a subfield of degree {size}; give it over that field"
            )
        return CurvePoint(self, canon, K)

    def _normalize_coords(self, K, raw):
        return raw

    def _embed_poly(self, K, f):
        """Coefficient list over the model field, embedded in K."""
        if K == self.field:
            return list(f)
        return [K.embed(c) for c in f]

    def enumerate_closed_points(self, max_degree):
        if not isinstance(self.field, PrimeField):
            raise UnsupportedFieldError("closed-point enumeration needs a prime field")
        if max_degree > MAX_ENUMERATION_DEGREE:
            raise UsageError(f"max_degree {max_degree} exceeds the desk-scale bound {MAX_ENUMERATION_DEGREE}")
        out = []
        for e in range(1, max_degree + 1):
            out.extend(self.closed_points_of_degree(e))
        return out

    def closed_points_of_degree(self, e):
        if not isinstance(self.field, PrimeField):
            raise UnsupportedFieldError("closed-point enumeration needs a prime field")
        cache = self.__dict__.setdefault("_closed_cache", {})
        if e not in cache:
            K = extension_field(self.field.p, e)
            pts = set()
            for coords in self._points_over(K):
                canon, size = _orbit_canonical(K, coords)
                if size == e:
                    pts.add(CurvePoint(self, canon, K))
            if e == 1 and self.has_base_point:
                pts.add(self.infinity)
            cache[e] = sorted(pts, key=CurvePoint.sort_key)
        return list(cache[e])

    def _points_over(self, K):
        raise NotImplementedError

    # expansions -------------------------------------------------------
    def expansion_ctx(self, point, precision):
        if point.is_infinity:
            raise NormalizationError("no expansion context at the base point")
        key = (point, precision)
        ctx = self._ctx_cache.get(key)
        if ctx is None:
            ctx = self._build_ctx(point, max(precision, 1))
            self._ctx_cache[key] = ctx
        return ctx

    def mul_keys(self, k1, k2):
        key = (k1, k2) if k1 <= k2 else (k2, k1)
        r = self._mul_cache.get(key)
        if r is None:
            r = self._mul_keys(*key)
            self._mul_cache[key] = r
        return r

    def with_field(self, field):
        """The same model with coefficients reduced into another field."""
        raise NotImplementedError

    def transfer_point(self, P, model):
        """Reduce a degree-1 point of this model into ``model`` (e.g. Q -> F_p)."""
        if P.is_infinity:
            return model.infinity
        if P.degree != 1:
            raise UsageError("only degree-1 points can be transferred between fields")
        return model.point(tuple(model.field.coerce(c) for c in P.coords))

    def transfer_divisor(self, D, model):
        return model.divisor(D.base_multiple, [(self.transfer_point(P, model), k) for P, k in D.conditions])


def _poly_from_any(field, f):
    return polys.trim(field, [field.coerce(c) for c in f])


class RationalCurve(CurveModel):
    """The projective line with affine coordinate x and base point P_inf."""

    family = RATIONAL

    def __init__(self, field=QQ):
        super().__init__(field)

    def _key(self):
        return (RATIONAL, self.field)

    def __repr__(self):
        return f"RationalCurve({field_label(self.field)})"

    @property
    def genus(self):
        return 0

    canonical_multiple = -2

    def contains(self, raw, K):
        return len(raw) == 1

    def ambient_keys(self, m):
        return [(i,) for i in range(m + 1)] if m >= 0 else []

    def key_weight(self, key):
        return key[0]

    def _mul_keys(self, k1, k2):
        return {(k1[0] + k2[0],): self.field.one}

    def _build_ctx(self, P, prec):
        K = P.field
        return ExpansionCtx(P, prec, {"x": Series.variable(K, prec, P.coords[0])}, "x")

    def key_series(self, key, ctx):
        return ctx.power("x", key[0])

    def _points_over(self, K):
        for x in K.elements():
            yield (x,)

    def with_field(self, field):
        return RationalCurve(field)

    def describe(self):
        return {"family": RATIONAL}


class HyperellipticCurve(CurveModel):
    """y^2 = f(x) with deg f = 2g + 1 odd and f squarefree; one point at infinity."""

    family = HYPERELLIPTIC

    def __init__(self, f, field=QQ):
        super().__init__(field)
        if field.characteristic == 2:
            raise InvalidModelError("hyperelliptic models need odd characteristic")
        self.f = tuple(_poly_from_any(field, f))
        d = len(self.f) - 1
        if d < 3 or d % 2 == 0:
            raise InvalidModelError(f"f must have odd degree 2g+1 >= 3, got degree {d}")
        g = polys.gcd(field, list(self.f), polys.derivative(field, list(self.f)))
        if len(g) > 1:
            raise InvalidModelError("f is not squarefree (gcd(f, f') != 1)")
        self._g = (d - 1) // 2

    def _key(self):
        return (HYPERELLIPTIC, self.field, self.f)

    def __repr__(self):
        return f"HyperellipticCurve(y^2 = {format_univariate(self.field, self.f)}, {field_label(self.field)})"

    @property
    def genus(self):
        return self._g

    @property
    def canonical_multiple(self):
        return 2 * self._g - 2

    def contains(self, raw, K):
        if len(raw) != 2:
            return False
        x, y = raw
        fx = polys.evaluate(K, self._embed_poly(K, self.f), x)
        return K.is_zero(K.sub(K.mul(y, y), fx))

    def ambient_keys(self, m):
        if m < 0:
            return []
        g = self._g
        keys = [(i, 0) for i in range(m // 2 + 1)]
        keys += [(j, 1) for j in range(0, (m - 2 * g - 1) // 2 + 1)] if m >= 2 * g + 1 else []
        return keys

    def key_weight(self, key):
        return 2 * key[0] + key[1] * (2 * self._g + 1)

    def _mul_keys(self, k1, k2):
        (i, a), (j, b) = k1, k2
        one = self.field.one
        if a + b < 2:
            return {(i + j, a + b): one}
        return {(i + j + k, 0): c for k, c in enumerate(self.f) if not self.field.is_zero(c)}

    def _build_ctx(self, P, prec):
        K = P.field
        a, b = P.coords
        f = self._embed_poly(K, self.f)
        if not K.is_zero(b):
            ft = polys.compose_linear(K, f, a, K.one)
            F = [-Series(K, ft, prec), Series(K, [], prec), Series.constant(K, K.one, prec)]
            y = hensel_root(F, b, prec)
            return ExpansionCtx(P, prec, {"x": Series.variable(K, prec, a), "y": y}, "x")
        # Weierstrass point: y is a uniformizer, x solves f(x) = t^2.
        F = [Series.constant(K, c, prec) for c in f]
        F[0] = F[0] - Series(K, [K.zero, K.zero, K.one], prec)
        try:
            x = hensel_root(F, a, prec)
        except SingularPointError as exc:
            raise SingularPointError(f"f'({a}) = 0 at a Weierstrass point") from exc
        return ExpansionCtx(P, prec, {"x": x, "y": Series.variable(K, prec)}, "y")

    def key_series(self, key, ctx):
        i, j = key
        s = ctx.power("x", i)
        return s * ctx.coords["y"] if j else s

    def conjugate(self, P):
        """The image of P under the hyperelliptic involution y -> -y."""
        if P.is_infinity:
            return P
        K = P.field
        x, y = P.coords
        return self.point((x, K.neg(y)), K)

    def _points_over(self, K):
        f = self._embed_poly(K, self.f)
        half = (K.order - 1) // 2
        for x in _frobenius_minimal_elements(K):
            v = polys.evaluate(K, f, x)
            if K.is_zero(v):
                yield (x, K.zero)
                continue
            if K.pow(v, half) != K.one:
                continue
            for y in polys.roots_finite(K, [K.neg(v), K.zero, K.one]):
                yield (x, y)

    def with_field(self, field):
        return HyperellipticCurve([field.coerce(c) for c in self.f], field)

    def describe(self):
        return {"family": HYPERELLIPTIC, "f": format_univariate(self.field, self.f)}


def _frobenius_minimal_elements(K):
    """Elements of K that are the smallest in their Frobenius orbit."""
    if not isinstance(K, ExtensionField):
        yield from K.elements()
        return
    for x in K.elements():
        cur = x
        keep = True
        kx = K.sort_key(x)
        for _ in range(1, K.degree):
            cur = K.frobenius(cur)
            if cur == x:
                break
            if K.sort_key(cur) < kx:
                keep = False
                break
        if keep:
            yield x


def _lm_key(mono):
    # lex order with z > y > x on exponent tuples (a, b, c) of x^a y^b z^c
    return (mono[2], mono[1], mono[0])


class PlaneCurve(CurveModel):
    """A smooth plane curve F(x, y, z) = 0 of degree d >= 3.

    ``F`` is a dict mapping exponent triples (a, b, c) of x^a y^b z^c to
    coefficients.  Sections of O(m) are forms of degree m reduced modulo F
    by its leading monomial in lex order z > y > x.
    """

    family = PLANE
    has_base_point = False

    def __init__(self, F, field=QQ, check_smooth=True):
        super().__init__(field)
        terms = {}
        for mono, c in dict(F).items():
            c = field.coerce(c)
            if not field.is_zero(c):
                terms[tuple(int(e) for e in mono)] = c
        degs = {sum(m) for m in terms}
        if len(degs) != 1:
            raise InvalidModelError("F must be a nonzero homogeneous polynomial")
        d = degs.pop()
        if d < 3:
            raise InvalidModelError(f"plane model needs degree >= 3, got {d}")
        self.F = dict(sorted(terms.items()))
        self.d = d
        self.base_degree = d
        self.lm = max(terms, key=_lm_key)
        self._lc_inv = field.inv(terms[self.lm])
        self._nf_cache = {}
        if check_smooth:
            self._check_smooth()

    def _key(self):
        return (PLANE, self.field, tuple(self.F.items()))

    def __repr__(self):
        return f"PlaneCurve({format_form(self.field, self.F)} = 0, {field_label(self.field)})"

    @property
    def genus(self):
        return (self.d - 1) * (self.d - 2) // 2

    @property
    def canonical_multiple(self):
        return self.d - 3

    @property
    def pure_power_anchor(self):
        """True when the coefficient of z^d is nonzero (the reduction is by z^d)."""
        return self.lm == (0, 0, self.d)

    def _sympy_poly(self):
        import sympy

        x, y, z = sympy.symbols("x y z")
        K = self.field
        expr = 0
        for (a, b, c), v in self.F.items():
            if isinstance(K, Rationals):
                coef = sympy.Rational(v.numerator, v.denominator)
            else:
                coef = int(v)
            expr += coef * x**a * y**b * z**c
        return expr, (x, y, z)

    def _check_smooth(self):
        """No common projective zero of F and its partials over the algebraic closure.

        Checked by a Groebner basis of (F, F_x, F_y, F_z): the ideal is
        irrelevant exactly when its leading terms contain a pure power of
        every variable.
        """
        import sympy

        expr, gens = self._sympy_poly()
        ideal = [expr] + [sympy.diff(expr, v) for v in gens]
        ideal = [e for e in ideal if e != 0]
        kwargs = {"order": "grevlex"}
        if isinstance(self.field, PrimeField):
            kwargs["modulus"] = self.field.p
        G = sympy.groebner(ideal, *gens, **kwargs)
        pure = set()
        for g in G.exprs:
            lm = sympy.Poly(g, *gens).monoms(order="grevlex")[0]
            nz = [i for i, e in enumerate(lm) if e]
            if len(nz) == 1:
                pure.add(nz[0])
        if pure != {0, 1, 2}:
            raise InvalidModelError("plane curve is singular (F and its partials have a common zero)")

    @classmethod
    def with_pure_power(cls, F, field=QQ, seed=0, tries=50):
        """Apply a random shear x -> x + a z, y -> y + b z until the
        coefficient of z^d becomes nonzero; returns (model, (a, b))."""
        rng = random.Random(seed)
        model = cls(F, field)
        if model.pure_power_anchor:
            return model, (0, 0)
        for _ in range(tries):
            a, b = rng.randint(-3, 3), rng.randint(-3, 3)
            G = shear_xy(field, model.F, field.coerce(a), field.coerce(b))
            cand = cls(G, field, check_smooth=False)
            if cand.pure_power_anchor:
                return cls(G, field), (a, b)
        raise InvalidModelError("no substitution produced a pure power of z")

    def evaluate_F(self, K, pt):
        x, y, z = pt
        acc = K.zero
        for (a, b, c), v in self.F.items():
            term = K.mul(K.embed(v) if K != self.field else v, K.mul(K.pow(x, a), K.mul(K.pow(y, b), K.pow(z, c))))
            acc = K.add(acc, term)
        return acc

    def contains(self, raw, K):
        if len(raw) != 3 or all(K.is_zero(c) for c in raw):
            return False
        return K.is_zero(self.evaluate_F(K, raw))

    def _normalize_coords(self, K, raw):
        if len(raw) != 3:
            return raw
        for c in reversed(raw):
            if not K.is_zero(c):
                inv = K.inv(c)
                return tuple(K.mul(v, inv) for v in raw)
        raise InvalidDivisorError("(0:0:0) is not a projective point")

    # normal forms -----------------------------------------------------
    def normal_form_monomial(self, mono):
        nf = self._nf_cache.get(mono)
        if nf is not None:
            return nf
        K = self.field
        lm = self.lm
        if all(mono[i] >= lm[i] for i in range(3)):
            q = tuple(mono[i] - lm[i] for i in range(3))
            out = {}
            factor = K.neg(self._lc_inv)
            for t, c in self.F.items():
                if t == lm:
                    continue
                sub = self.normal_form_monomial(tuple(q[i] + t[i] for i in range(3)))
                coef = K.mul(factor, c)
                for mm, v in sub.items():
                    w = K.add(out.get(mm, K.zero), K.mul(coef, v))
                    if K.is_zero(w):
                        out.pop(mm, None)
                    else:
                        out[mm] = w
            nf = out
        else:
            nf = {mono: K.one}
        self._nf_cache[mono] = nf
        return nf

    def ambient_keys(self, m):
        if m < 0:
            return []
        lm = self.lm
        keys = []
        for c in range(m, -1, -1):
            for b in range(m - c, -1, -1):
                mono = (m - b - c, b, c)
                if not all(mono[i] >= lm[i] for i in range(3)):
                    keys.append(mono)
        return keys

    def key_weight(self, key):
        return sum(key)

    def _mul_keys(self, k1, k2):
        return self.normal_form_monomial(tuple(k1[i] + k2[i] for i in range(3)))

    def _build_ctx(self, P, prec):
        K = P.field
        coords = P.coords
        chart = max(i for i in range(3) if not K.is_zero(coords[i]))
        u_idx, v_idx = [i for i in range(3) if i != chart]
        u0, v0 = coords[u_idx], coords[v_idx]
        terms = []
        for mono, c in self.F.items():
            coef = K.embed(c) if K != self.field else c
            terms.append((mono[u_idx], mono[v_idx], coef))

        def partial(which):
            acc = K.zero
            for a, b, c in terms:
                if which == 0 and a:
                    acc = K.add(acc, K.mul(K.mul(c, K.from_int(a)), K.mul(K.pow(u0, a - 1), K.pow(v0, b))))
                if which == 1 and b:
                    acc = K.add(acc, K.mul(K.mul(c, K.from_int(b)), K.mul(K.pow(u0, a), K.pow(v0, b - 1))))
            return acc

        names = "xyz"
        if not K.is_zero(partial(1)):
            param, param0, dep, dep0, param_pos = u_idx, u0, v_idx, v0, 0
        elif not K.is_zero(partial(0)):
            param, param0, dep, dep0, param_pos = v_idx, v0, u_idx, u0, 1
        else:
            raise SingularPointError(f"both affine partials vanish at {P}")
        shifted = Series.variable(K, prec, param0)
        maxdeg = max(t[param_pos] for t in terms)
        powers = [Series.constant(K, K.one, prec)]
        for _ in range(maxdeg):
            powers.append(powers[-1] * shifted)
        depdeg = max(t[1 - param_pos] for t in terms)
        Fser = [Series(K, [], prec) for _ in range(depdeg + 1)]
        for t in terms:
            Fser[t[1 - param_pos]] = Fser[t[1 - param_pos]] + powers[t[param_pos]] * t[2]
        dep_series = hensel_root(Fser, dep0, prec)
        series = {
            names[chart]: Series.constant(K, K.one, prec),
            names[param]: shifted,
            names[dep]: dep_series,
        }
        return ExpansionCtx(P, prec, series, names[param], chart=names[chart])

    def key_series(self, key, ctx):
        s = None
        for name, e in zip("xyz", key):
            if e:
                t = ctx.power(name, e)
                s = t if s is None else s * t
        if s is None:
            return ctx.power("x", 0)
        return s

    def _points_over(self, K):
        F = self.F

        def restricted(fix):
            # polynomial in the free variable after fixing the others
            out = {}
            for (a, b, c), v in F.items():
                val, deg = fix(a, b, c)
                if K.is_zero(val):
                    continue
                coef = K.mul(K.embed(v) if K != self.field else v, val)
                out[deg] = K.add(out.get(deg, K.zero), coef)
            n = max(out) if out else -1
            return polys.trim(K, [out.get(i, K.zero) for i in range(n + 1)])

        one = K.one
        for x in _frobenius_minimal_elements(K):
            g = restricted(lambda a, b, c: (K.pow(x, a), b))
            if not g:
                for y in K.elements():
                    yield (x, y, one)
                continue
            for y in polys.roots_finite(K, g):
                yield (x, y, one)
        g = restricted(lambda a, b, c: (K.one if c == 0 else K.zero, a))
        for x in polys.roots_finite(K, g):
            yield (x, one, K.zero)
        if K.is_zero(self.evaluate_F(K, (one, K.zero, K.zero))):
            yield (one, K.zero, K.zero)

    def with_field(self, field):
        return PlaneCurve({m: field.coerce(c) for m, c in self.F.items()}, field)

    def describe(self):
        return {"family": PLANE, "F": format_form(self.field, self.F)}

    def line_restriction(self, P, V):
        """Coefficients (in s) of F(P + s V), over the field of P and V."""
        Kf = P.field
        acc = []
        for (a, b, c), v in self.F.items():
            coef = Kf.embed(v) if Kf != self.field else v
            term = [coef]
            for idx, e in ((0, a), (1, b), (2, c)):
                lin = [P.coords[idx] if P.coords else Kf.zero, V[idx]]
                for _ in range(e):
                    term = polys.mul(Kf, term, lin)
            acc = polys.add(Kf, acc, term)
        return acc


def shear_xy(field, F, a, b):
    """F(x + a z, y + b z, z) as an exponent dict; its z^d coefficient is F(a, b, 1)."""
    K = field
    out = {}
    for (i, j, k), c in F.items():
        for i1 in range(i + 1):
            for j1 in range(j + 1):
                mult = math.comb(i, i1) * math.comb(j, j1)
                coef = K.mul(c, K.mul(K.from_int(mult), K.mul(K.pow(a, i - i1), K.pow(b, j - j1))))
                mono = (i1, j1, k + (i - i1) + (j - j1))
                out[mono] = K.add(out.get(mono, K.zero), coef)
    return {m: v for m, v in out.items() if not K.is_zero(v)}


# ---------------------------------------------------------------- formatting


def _signed_coef(K, c):
    """(negative?, magnitude string); F_p residues use the symmetric range."""
    if K.characteristic == 0:
        return c < 0, str(abs(c))
    if isinstance(c, int) and c > K.characteristic // 2:
        return True, str(K.characteristic - c)
    return False, K.format(c)


def _join_terms(terms):
    """terms: (negative, coefficient string, monomial string) in display order."""
    out = ""
    for i, (neg, cs, mono) in enumerate(terms):
        body = cs if not mono else (mono if cs == "1" else f"{cs}*{mono}")
        if i == 0:
            out = ("-" if neg else "") + body
        else:
            out += (" - " if neg else " + ") + body
    return out or "0"


def format_univariate(K, f, var="x"):
    terms = []
    for i in range(len(f) - 1, -1, -1):
        if K.is_zero(f[i]):
            continue
        neg, cs = _signed_coef(K, f[i])
        terms.append((neg, cs, "" if i == 0 else (var if i == 1 else f"{var}^{i}")))
    return _join_terms(terms)


def format_form(K, F):
    terms = []
    for mono, c in sorted(F.items(), key=lambda mc: _lm_key(mc[0]), reverse=True):
        parts = [name if e == 1 else f"{name}^{e}" for name, e in zip("xyz", mono) if e]
        neg, cs = _signed_coef(K, c)
        terms.append((neg, cs, "*".join(parts)))
    return _join_terms(terms)


# ---------------------------------------------------------------- module-level API


def genus(model):
    return model.genus


def canonical_divisor(model):
    return model.canonical_divisor()


def enumerate_closed_points(model, max_degree):
    return model.enumerate_closed_points(max_degree)


def expansion_ctx(model, point, precision):
    return model.expansion_ctx(point, precision)


def klein_quartic(field=QQ):
    """x^3 y + y^3 z + z^3 x."""
    return PlaneCurve({(3, 1, 0): 1, (0, 3, 1): 1, (1, 0, 3): 1}, field)
