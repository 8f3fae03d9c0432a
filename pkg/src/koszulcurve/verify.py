"""Geometric predicates and theorem-pattern verifiers.

Every verifier returns a report dataclass carrying the intermediate numbers
(h^0 values, Koszul dimensions, expected ranges) so a verdict can be
re-derived by hand.  ``verdict`` is False only when a computed dimension
contradicts the predicted pattern.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from math import comb

from .curves import HYPERELLIPTIC, MAX_ENUMERATION_DEGREE, PLANE, RATIONAL
from .errors import ClassificationError, ShiftFailure, UnsupportedFieldError, UsageError
from .exactalg.fields import PrimeField, field_label
from .koszul import GradedSectionData, KoszulComplex, _normalize, betti_table, hilbert_check
from .rrspaces import _plane_line_divisor, h0, h0_effective, is_linearly_equivalent

FAMILY_FORMULA = "FamilyFormula"
BRUTE_FORCE = "BruteForce"


def is_plane_quartic(model):
    return model.family == PLANE and model.d == 4


def _divisor_label(items):
    return " + ".join(f"{k}*{P.label()}" for P, k in items) or "0"


# ---------------------------------------------------------------- gonality


@dataclass
class GonalityCertificate:
    value: int
    method: str
    witness: tuple | None = None  # ((CurvePoint, multiplicity), ...)
    exhaustive_up_to: int | None = None
    field_label: str = ""
    notes: str = ""

    def witness_label(self):
        return None if self.witness is None else _divisor_label(self.witness)

    def verify(self, model):
        """Re-check the witness: degree equals value and h^0 >= 2."""
        if self.witness is None:
            return True
        deg = sum(P.degree * k for P, k in self.witness)
        return deg == self.value and h0_effective(model, list(self.witness)) >= 2


def effective_divisors(model, k, max_point_degree=None):
    """All effective divisors of degree k supported on closed points of degree
    <= min(k, max_point_degree), as tuples of (point, multiplicity)."""
    top = min(k, max_point_degree or k, MAX_ENUMERATION_DEGREE)
    pts = model.enumerate_closed_points(top)

    def rec(start, remaining):
        if remaining == 0:
            yield ()
            return
        for i in range(start, len(pts)):
            P = pts[i]
            e = P.degree
            for mult in range(remaining // e, 0, -1):
                for rest in rec(i + 1, remaining - mult * e):
                    yield ((P, mult),) + rest

    yield from rec(0, k)


def _rational_point(model, bound=3):
    """A degree-1 point with small coordinates, or None."""
    K = model.field
    if isinstance(K, PrimeField):
        pts = [P for P in model.closed_points_of_degree(1) if not P.is_infinity]
        return pts[0] if pts else None
    rng = range(-bound, bound + 1)
    for c in itertools.product(rng, repeat=3):
        if c == (0, 0, 0):
            continue
        try:
            return model.point(c)
        except Exception:
            continue
    return None


def _plane_witness(model):
    P = _rational_point(model)
    if P is None:
        return None
    for choice in range(8):
        try:
            _, div = _plane_line_divisor(model, P, choice)
        except ShiftFailure:
            return None
        zeros = dict(div.points)
        zeros[P] -= 1
        items = tuple((Q, k) for Q, k in sorted(zeros.items(), key=lambda qk: qk[0].sort_key()) if k)
        if h0_effective(model, list(items)) >= 2:
            return items
    return None


def gonality(model, method=FAMILY_FORMULA, max_k=None):
    """Gonality with a certificate.

    FamilyFormula uses the classical values (1, 2, d-1) and attaches an
    explicit pencil; BruteForce searches every effective divisor of degree
    k = 1, 2, ... over the prime field.
    """
    K = model.field
    if method == FAMILY_FORMULA:
        if model.family == RATIONAL:
            return GonalityCertificate(1, method, ((model.infinity, 1),), field_label=field_label(K))
        if model.family == HYPERELLIPTIC:
            return GonalityCertificate(2, method, ((model.infinity, 2),), field_label=field_label(K), notes="the g^1_2 |2 Pinf|")
        witness = _plane_witness(model)
        if witness is not None:
            return GonalityCertificate(model.d - 1, method, witness, field_label=field_label(K), notes="residual of a line through a point")
        if isinstance(K, PrimeField):
            return gonality(model, BRUTE_FORCE, max_k)
        raise UnsupportedFieldError("no rational point found for the plane witness; use F_p mode for brute force")
    if method != BRUTE_FORCE:
        raise UsageError(f"unknown gonality method {method!r}")
    if not isinstance(K, PrimeField):
        raise UnsupportedFieldError("brute-force gonality needs a prime field")
    # Brill-Noether: gon <= floor((g+3)/2)
    limit = max_k or (model.genus + 3) // 2
    limit = max(limit, 1)
    for k in range(1, limit + 1):
        if k > MAX_ENUMERATION_DEGREE:
            break
        for E in effective_divisors(model, k):
            if h0_effective(model, list(E)) >= 2:
                return GonalityCertificate(
                    k,
                    method,
                    E,
                    exhaustive_up_to=k,
                    field_label=field_label(K),
                    notes=f"no F_{K.p}-rational divisor of degree < {k} moves; a pencil of degree {k} exists",
                )
    raise UsageError(f"no pencil of degree <= {limit} found over {K}")


# ---------------------------------------------------------------- p-very ampleness


@dataclass
class VeryAmpleResult:
    value: bool
    witness: tuple | None
    exhaustive: bool
    checked: int
    h0B: int

    def __iter__(self):
        yield self.value
        yield self.witness

    def __bool__(self):
        return self.value


def _minus_effective(model, B, xi):
    conds = list(B.conditions) + list(xi)
    return model.divisor(B.base_multiple, conds)


def is_p_very_ample(model, B, p, points=None):
    """B is p-very ample iff h^0(B - xi) = h^0(B) - (p+1) for every effective xi of degree p+1.

    Over F_p the search is exhaustive (closed points of degree <= p+1).
    Over Q only divisors supported on ``points`` are tried and the result
    is marked non-exhaustive.
    """
    if p < 0:
        raise UsageError("p must be nonnegative")
    B = _normalize(model, B)
    n = h0(model, B)
    k = p + 1
    if isinstance(model.field, PrimeField) and points is None:
        if k > MAX_ENUMERATION_DEGREE:
            raise UsageError(f"p + 1 = {k} exceeds the enumeration bound {MAX_ENUMERATION_DEGREE}")
        candidates = effective_divisors(model, k)
        exhaustive = True
    else:
        if points is None:
            raise UnsupportedFieldError("exhaustive p-very-ampleness needs a prime field; pass points for a partial check")
        candidates = _divisors_on(points, k)
        exhaustive = False
    checked = 0
    for xi in candidates:
        checked += 1
        D = _minus_effective(model, B, xi)
        val = h0(model, D) if D.degree >= 0 else 0
        if val != n - k:
            return VeryAmpleResult(False, xi, exhaustive, checked, n)
    return VeryAmpleResult(True, None, exhaustive, checked, n)


def _divisors_on(points, k):
    pts = sorted(set(points), key=lambda P: P.sort_key())

    def rec(start, remaining):
        if remaining == 0:
            yield ()
            return
        for i in range(start, len(pts)):
            e = pts[i].degree
            for mult in range(remaining // e, 0, -1):
                for rest in rec(i + 1, remaining - mult * e):
                    yield ((pts[i], mult),) + rest

    return rec(0, k)


# ---------------------------------------------------------------- classification


class SmallH0Case(enum.Enum):
    H0_AT_LEAST_P3 = "h0>=p+3"
    H0_P1_TRIVIAL = "h0=p+1, p=0, B trivial"
    H0_P1_RATIONAL_NORMAL = "h0=p+1, rational normal curve"
    H0_P2_CASE_I = "h0=p+2, (i) g=0, B=O(p+1)"
    H0_P2_CASE_II = "h0=p+2, (ii) g=1, deg B=p+2"
    H0_P2_CASE_III_PENCIL = "h0=p+2, (iii) p=0, base point free pencil"
    H0_P2_CASE_III_PLANE = "h0=p+2, (iii) p=1, plane curve"


def classify_small_h0(model, B, p):
    """Which branch of the classification of p-very ample B with small h^0 applies.

    B is assumed p-very ample.  Each branch's structural claims are checked
    and a ClassificationError is raised if none fits.
    """
    B = _normalize(model, B)
    n = h0(model, B)
    g = model.genus
    deg = B.degree
    if n >= p + 3:
        return SmallH0Case.H0_AT_LEAST_P3
    if n == p + 1:
        if p == 0 and deg == 0 and is_linearly_equivalent(model, B, model.divisor(0)):
            return SmallH0Case.H0_P1_TRIVIAL
        if p >= 1 and g == 0 and deg == p:
            return SmallH0Case.H0_P1_RATIONAL_NORMAL
        raise ClassificationError(f"h0(B) = p+1 = {n} but (B, p) = ({B.label()}, {p}) fits no branch")
    if n == p + 2:
        if g == 0 and deg == p + 1:
            return SmallH0Case.H0_P2_CASE_I
        if g == 1 and deg == p + 2:
            return SmallH0Case.H0_P2_CASE_II
        if g >= 2 and p == 0:
            return SmallH0Case.H0_P2_CASE_III_PENCIL
        if g >= 2 and p == 1 and deg >= 4 and 2 * g == (deg - 1) * (deg - 2):
            # a very ample net maps C isomorphically onto a plane curve of degree deg B
            return SmallH0Case.H0_P2_CASE_III_PLANE
        raise ClassificationError(f"h0(B) = p+2 = {n} but (B, p) = ({B.label()}, {p}) fits no branch")
    raise ClassificationError(f"h0(B) = {n} < p+1 is impossible for a {p}-very ample B")


# ---------------------------------------------------------------- pattern checks


@dataclass
class PatternReport:
    curve: str
    field_label: str
    L: str
    g: int
    degL: int
    gon: int
    r: int
    exceptional: bool
    expected: list
    dims: dict
    verdict: bool
    extra: dict = field(default_factory=dict)

    @property
    def computed_range(self):
        return [p for p, v in sorted(self.dims.items()) if v]


def is_exceptional(model, L):
    """L ~ 2K and (g = 2 or C is a plane quartic)."""
    if not (model.genus == 2 or is_plane_quartic(model)):
        return False
    return is_linearly_equivalent(model, L, 2 * model.canonical_divisor())


def gonality_pattern_check(model, L, gon=None):
    """K_{p,1}(C;L) != 0 exactly for 1 <= p <= deg L - g - gon, plus the index
    deg L - g - gon + 1 in the exceptional cases; requires g >= 2 and deg L >= 4g-4."""
    g = model.genus
    L = _normalize(model, L)
    if g < 2:
        raise UsageError(f"the gonality pattern needs g >= 2, got g = {g}")
    if L.degree < 4 * g - 4:
        raise UsageError(f"the gonality pattern needs deg L >= 4g-4 = {4 * g - 4}, got {L.degree}")
    if gon is None:
        gon = gonality(model).value
    exc = is_exceptional(model, L)
    top = L.degree - g - gon
    expected = list(range(1, top + 1)) + ([top + 1] if exc else [])
    data = GradedSectionData(model, model.divisor(0), L)
    cx = KoszulComplex(data)
    r = data.n - 1
    dims = {p: cx.dim(p, 1) for p in range(1, r + 1)}
    computed = [p for p in sorted(dims) if dims[p]]
    return PatternReport(
        curve=model.describe(),
        field_label=field_label(model.field),
        L=L.label(),
        g=g,
        degL=L.degree,
        gon=gon,
        r=r,
        exceptional=exc,
        expected=expected,
        dims=dims,
        verdict=computed == expected,
        extra={"h0L": data.n, "sections": [data.w_dim(q) for q in range(3)]},
    )


@dataclass
class VanishingReport:
    curve: str
    field_label: str
    B: str
    L: str
    p: int
    g: int
    h0B: int
    branch: str
    expected: int
    computed: int
    verdict: bool


def bvanishing_check(model, B, p):
    """K_{p,1}(C,B;B+K) against 0 / dim S^p H^0(K) / 0 for h^0(B) >= p+3 / = p+2 / = p+1."""
    B = _normalize(model, B)
    g = model.genus
    n = h0(model, B)
    L = B + model.canonical_divisor()
    if n >= p + 3:
        branch, expected = "h0>=p+3", 0
    elif n == p + 2:
        branch, expected = "h0=p+2", comb(p + g - 1, g - 1) if g >= 1 else (1 if p == 0 else 0)
    elif n == p + 1:
        branch, expected = "h0=p+1", 0
    else:
        raise UsageError(f"h0(B) = {n} < p+1: B cannot be {p}-very ample")
    data = GradedSectionData(model, B, L)
    computed = KoszulComplex(data).dim(p, 1)
    return VanishingReport(
        curve=model.describe(),
        field_label=field_label(model.field),
        B=B.label(),
        L=L.label(),
        p=p,
        g=g,
        h0B=n,
        branch=branch,
        expected=expected,
        computed=computed,
        verdict=computed == expected,
    )


@dataclass
class CorollaryReport:
    curve: str
    field_label: str
    B: str
    L: str
    p: int
    g: int
    h0B: int
    L_is_B_plus_K: bool
    exceptional: bool
    case: str
    dims: dict
    verdict: bool


def corollary_pattern_check(model, B, L, p):
    """For p-very ample B and deg(L - B) >= 2g-2: K_{p,1}(C,B;L) = 0 except when
    L ~ B + K with B a base point free pencil (p = 0) or a plane net (p = 1);
    then K_{p,1} != 0 and K_{p-1,1} = 0."""
    g = model.genus
    if g < 2:
        raise UsageError(f"the corollary needs g >= 2, got g = {g}")
    B = _normalize(model, B)
    L = _normalize(model, L)
    if L.degree - B.degree < 2 * g - 2:
        raise UsageError(f"deg(L - B) = {L.degree - B.degree} < 2g-2 = {2 * g - 2}")
    n = h0(model, B)
    on_line = is_linearly_equivalent(model, L.to_divisor(), B + model.canonical_divisor())
    case = ""
    exceptional = False
    if on_line and n == p + 2:
        c = classify_small_h0(model, B, p)
        case = c.value
        exceptional = c in (SmallH0Case.H0_P2_CASE_III_PENCIL, SmallH0Case.H0_P2_CASE_III_PLANE)
    data = GradedSectionData(model, B, L)
    cx = KoszulComplex(data)
    dims = {p: cx.dim(p, 1)}
    if p >= 1:
        dims[p - 1] = cx.dim(p - 1, 1)
    if exceptional:
        verdict = dims[p] != 0 and dims.get(p - 1, 0) == 0
    else:
        verdict = dims[p] == 0
    return CorollaryReport(
        curve=model.describe(),
        field_label=field_label(model.field),
        B=B.label(),
        L=L.label(),
        p=p,
        g=g,
        h0B=n,
        L_is_B_plus_K=on_line,
        exceptional=exceptional,
        case=case,
        dims=dict(sorted(dims.items())),
        verdict=verdict,
    )


@dataclass
class GenusGonalityReport:
    curve: str
    g: int
    gon: int
    equality: bool
    equality_expected: bool
    verdict: bool


def genus_gonality_check(model, gon=None):
    """g >= gon, with equality exactly for g = 2 or plane quartics."""
    g = model.genus
    if g < 2:
        raise UsageError(f"needs g >= 2, got g = {g}")
    if gon is None:
        gon = gonality(model).value
    eq_expected = g == 2 or is_plane_quartic(model)
    return GenusGonalityReport(
        curve=model.describe(),
        g=g,
        gon=gon,
        equality=gon == g,
        equality_expected=eq_expected,
        verdict=gon <= g and (gon == g) == eq_expected,
    )


# ---------------------------------------------------------------- consistency checks


@dataclass
class DualityReport:
    r: int
    left: dict
    right: dict
    verdict: bool


def duality_check(model, L):
    """dim K_{p,1}(C;L) = dim K_{r-1-p,1}(C,K;L) for all p, r = h^0(L) - 1.

    Both sides come from independent rank computations.
    """
    L = _normalize(model, L)
    left_cx = KoszulComplex(GradedSectionData(model, model.divisor(0), L))
    right_cx = KoszulComplex(GradedSectionData(model, model.canonical_divisor(), L))
    r = left_cx.data.n - 1
    left = {p: left_cx.dim(p, 1) for p in range(0, r)}
    right = {p: right_cx.dim(r - 1 - p, 1) for p in range(0, r)}
    return DualityReport(r, left, right, left == right)


@dataclass
class ReductionReport:
    primes: tuple
    rational: list
    modular: dict
    agree: dict


def reduction_check(model, B, L, primes=(10007, 31013), q_max=3):
    """Compare a Betti table over Q with its reductions modulo the given primes.

    Disagreement flags a bad prime; it is reported, not raised.
    """
    from .exactalg.fields import GF

    B = _normalize(model, B)
    L = _normalize(model, L)
    base = betti_table(model, B, L, q_max=q_max, check_gg=False).dims
    modular, agree = {}, {}
    for p in primes:
        mp = model.with_field(GF(p))
        tb = betti_table(mp, model.transfer_divisor(B, mp), model.transfer_divisor(L, mp), q_max=q_max, check_gg=False)
        modular[p] = tb.dims
        agree[p] = tb.dims == base
    return ReductionReport(tuple(primes), base, modular, agree)


def table_with_checks(model, B, L, q_max=3, check_gg=True):
    """Betti table plus its Hilbert-identity check and gonality metadata."""
    B = _normalize(model, B)
    L = _normalize(model, L)
    data = GradedSectionData(model, B, L)
    table = betti_table(model, B, L, q_max=q_max, check_gg=check_gg, data=data)
    if model.genus >= 2 or model.family == RATIONAL:
        try:
            table.gon = gonality(model).value
        except (UnsupportedFieldError, UsageError):
            table.gon = None
    if model.genus >= 2:
        table.exceptional = is_exceptional(model, L) and L.degree == 4 * model.genus - 4
    else:
        table.exceptional = False
    return table, hilbert_check(table, data)
