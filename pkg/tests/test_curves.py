import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koszulcurve.curves import HyperellipticCurve, PlaneCurve, RationalCurve, klein_quartic
from koszulcurve.errors import InvalidDivisorError, InvalidModelError, NormalizationError, UnsupportedFieldError
from koszulcurve.exactalg.fields import GF, QQ
from koszulcurve.exactalg.series import Series
from koszulcurve.rrspaces import h0

from conftest import GENUS2_F, GENUS3_F


def equation_series(model, ctx):
    """The defining equation evaluated on the local expansions."""
    K = ctx.field
    prec = ctx.precision
    X = ctx.coords
    if model.family == "hyperelliptic":
        acc = Series(K, [], prec)
        for c in reversed(model.f):
            acc = acc * X["x"] + Series.constant(K, K.embed(c), prec)
        return X["y"] * X["y"] - acc
    acc = Series(K, [], prec)
    for (a, b, c), v in model.F.items():
        term = Series.constant(K, K.embed(v), prec)
        for name, e in (("x", a), ("y", b), ("z", c)):
            term = term * ctx.power(name, e)
        acc = acc + term
    return acc


# ---------------------------------------------------------------- genus and canonical class


def test_genus_examples(p1, genus2, klein):
    assert p1.genus == 0
    assert genus2.genus == 2
    assert klein.genus == 3


def test_canonical_examples(p1, genus2, klein):
    K2 = genus2.canonical_divisor()
    assert (K2.base_multiple, K2.degree, h0(genus2, K2)) == (2, 2, 2)
    KK = klein.canonical_divisor()
    assert (KK.base_multiple, KK.degree, h0(klein, KK)) == (1, 4, 3)
    KP = p1.canonical_divisor()
    assert (KP.base_multiple, h0(p1, KP)) == (-2, 0)


@pytest.mark.parametrize("name", ["genus2_f11", "genus3_f11", "klein_f11"])
def test_canonical_plus_point(name, request):
    C = request.getfixturevalue(name)
    g = C.genus
    for P in C.enumerate_closed_points(1)[:5]:
        D = C.canonical_divisor() + C.general_divisor(0, {P: 1})
        assert D.degree == 2 * g - 1
        assert h0(C, D) == g


# ---------------------------------------------------------------- model validation


def test_non_squarefree_rejected():
    with pytest.raises(InvalidModelError):
        HyperellipticCurve([0, 0, 1, 0, 0, 1])  # x^2 (x^3 + 1)


def test_even_degree_rejected():
    with pytest.raises(InvalidModelError):
        HyperellipticCurve([1, 0, 0, 0, 0, 0, 1])


def test_singular_plane_rejected():
    # nodal cubic y^2 z = x^3 + x^2 z
    with pytest.raises(InvalidModelError):
        PlaneCurve({(0, 2, 1): 1, (3, 0, 0): -1, (2, 0, 1): -1})


def test_pure_power_anchor_change_of_coordinates():
    # x^4 + y^4 + x z^3 has no z^4 term
    F = {(4, 0, 0): 1, (0, 4, 0): 1, (1, 0, 3): 1}
    C, (a, b) = PlaneCurve.with_pure_power(F)
    assert C.genus == 3 and C.pure_power_anchor
    # z^4 coefficient is F(a, b, 1)
    assert C.F[(0, 0, 4)] == a**4 + b**4 + a


def test_point_not_on_curve(klein):
    with pytest.raises(InvalidDivisorError, match="not on the curve"):
        klein.point((1, 1, 1))


def test_condition_at_infinity_rejected(genus2):
    from koszulcurve.curves import DivisorSpec

    with pytest.raises(NormalizationError):
        DivisorSpec(genus2, 4, [(genus2.infinity, 1)])
    assert genus2.divisor(4, [(genus2.infinity, 1)]).base_multiple == 3


# ---------------------------------------------------------------- closed points


def test_rational_points_f5():
    assert len(RationalCurve(GF(5)).enumerate_closed_points(1)) == 6


def test_point_counts_match_oracle(oracle, genus2_f11, genus3_f11, klein_f11):
    counts = oracle["counts"]
    assert len(genus2_f11.enumerate_closed_points(1)) == counts["genus2_F11"]
    assert len(genus3_f11.enumerate_closed_points(1)) == counts["genus3_F11"]
    assert len(klein_f11.enumerate_closed_points(1)) == counts["klein_F11"]
    assert len(HyperellipticCurve(GENUS2_F, GF(13)).enumerate_closed_points(1)) == counts["genus2_F13"]
    assert len(klein_quartic(GF(13)).enumerate_closed_points(1)) == counts["klein_F13"]


def test_klein_coordinate_points(klein_f11):
    labels = {P.label() for P in klein_f11.enumerate_closed_points(1)}
    assert {"(1:0:0)", "(0:1:0)", "(0:0:1)"} <= labels


@pytest.mark.parametrize("p", [11, 13, 17, 19])  # 5 and 7 are bad primes for these models
@pytest.mark.parametrize("family", ["g2", "g3", "klein"])
def test_hasse_weil(p, family):
    C = {"g2": lambda K: HyperellipticCurve(GENUS2_F, K), "g3": lambda K: HyperellipticCurve(GENUS3_F, K), "klein": klein_quartic}[family](GF(p))
    n = len(C.enumerate_closed_points(1))
    assert abs(n - (p + 1)) <= 2 * C.genus * math.sqrt(p)


def test_degree2_points_consistent(genus2_f11):
    # #C(F_121) = #C(F_11) + 2 * (closed points of degree 2)
    n1 = len(genus2_f11.closed_points_of_degree(1))
    n2 = len(genus2_f11.closed_points_of_degree(2))
    total = n1 + 2 * n2
    assert abs(total - (121 + 1)) <= 2 * 2 * 11


def test_enumeration_over_q_unsupported(genus2):
    with pytest.raises(UnsupportedFieldError):
        genus2.enumerate_closed_points(1)


# ---------------------------------------------------------------- expansions


def test_expansion_weierstrass_point(genus2):
    ctx = genus2.expansion_ctx(genus2.point((1, 0)), 3)
    assert ctx.uniformizer == "y"
    assert list(ctx.coords["x"].coeffs) == [1, 0, QQ.coerce("1/5")]


def test_expansion_f13(genus2):
    C = genus2.with_field(GF(13))
    ctx = C.expansion_ctx(C.point((0, 5)), 4)
    assert ctx.uniformizer == "x"
    assert ctx.coords["y"][0] == 5
    assert equation_series(C, ctx).is_zero()


def test_expansion_klein(klein):
    ctx = klein.expansion_ctx(klein.point((1, 0, 0)), 6)
    assert equation_series(klein, ctx).is_zero()


def test_expansion_at_infinity_rejected(genus2):
    with pytest.raises(NormalizationError):
        genus2.expansion_ctx(genus2.infinity, 2)


@pytest.mark.parametrize("name", ["genus2_f11", "genus3_f11", "klein_f11"])
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_expansion_invariant(name, request, data):
    C = request.getfixturevalue(name)
    e = data.draw(st.integers(1, 2))
    pts = [P for P in C.closed_points_of_degree(e) if not P.is_infinity]
    P = data.draw(st.sampled_from(pts))
    prec = data.draw(st.integers(1, 7))
    ctx = C.expansion_ctx(P, prec)
    assert equation_series(C, ctx).is_zero()
    # the uniformizer expands to (value at P) + t
    u = ctx.coords[ctx.uniformizer]
    assert prec < 2 or u[1] == ctx.field.one
