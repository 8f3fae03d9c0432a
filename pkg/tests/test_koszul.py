import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koszulcurve.curves import RationalCurve
from koszulcurve.errors import UsageError
from koszulcurve.exactalg.fields import GF
from koszulcurve.exactalg.matrix import ExactMatrix, rank
from koszulcurve.koszul import (
    BettiTable,
    GradedSectionData,
    KoszulComplex,
    betti_table,
    check_globally_generated,
    hilbert_check,
    koszul_differential,
    koszul_dim,
    wedge_enum,
)


def test_wedge_enum_examples():
    assert wedge_enum(3, 2) == [(0, 1), (0, 2), (1, 2)]
    assert wedge_enum(5, 0) == [()]
    assert len(wedge_enum(6, 3)) == 20
    assert wedge_enum(2, 3) == []


# ---------------------------------------------------------------- differentials


def test_differential_p0_is_zero(genus2):
    data = GradedSectionData(genus2, genus2.divisor(0), genus2.divisor(4))
    M = koszul_differential(data, 0, 1)
    assert M.is_zero() and M.nrows == 0


def test_differential_p1_is_multiplication(genus2):
    data = GradedSectionData(genus2, genus2.divisor(0), genus2.divisor(4))
    M = koszul_differential(data, 1, 0)
    # W_0 = constants: d(v_i (x) 1) = v_i, so the matrix is the inclusion V -> W_1
    assert M.shape == (3, 3)
    assert M == ExactMatrix.identity(genus2.field, 3)
    M11 = koszul_differential(data, 1, 1)
    mm = data.mult(1)
    for i in range(data.n):
        for k in range(data.w_dim(1)):
            for t, c in mm.constants[i][k].items():
                assert M11.entries[(t, i * data.w_dim(1) + k)] == c


def test_sign_convention(p1):
    # on P^1 with L = O(1): d(v0 ^ v1 (x) 1) = v1 (x) v0 - v0 (x) v1
    data = GradedSectionData(p1, p1.divisor(0), p1.divisor(1))
    M = koszul_differential(data, 2, 0)
    # target index T * 2 + t: T = 0 is {0}, T = 1 is {1}; W_1 basis {1, x}
    assert M.entries == {(1 * 2 + 0, 0): 1, (0 * 2 + 1, 0): -1}


def _assert_dd_zero(data, p_max, q_max):
    for p in range(1, p_max + 1):
        for q in range(0, q_max + 1):
            A = koszul_differential(data, p, q)
            B = koszul_differential(data, p + 1, q - 1) if q >= 1 else None
            if B is not None and A.ncols and B.ncols:
                assert (A @ B).is_zero(), (p, q)


def test_dd_zero_twisted_cubic(p1):
    data = GradedSectionData(p1, p1.divisor(0), p1.divisor(3))
    _assert_dd_zero(data, 4, 3)


@pytest.mark.parametrize(
    "name,B,L",
    [("genus2_f11", 0, 4), ("genus2_f11", 2, 5), ("genus3_f11", 0, 8), ("klein_f11", 0, 2), ("klein_f11", 1, 2)],
)
def test_dd_zero_suite_models(name, B, L, request):
    C = request.getfixturevalue(name)
    data = GradedSectionData(C, C.divisor(B), C.divisor(L))
    _assert_dd_zero(data, data.n - 1, 2)


# ---------------------------------------------------------------- single cells


def test_koszul_dim_genus2(genus2):
    assert koszul_dim(genus2, genus2.divisor(0), genus2.divisor(4), 1, 1) == 1
    assert koszul_dim(genus2, genus2.divisor(0), genus2.divisor(4), 2, 1) == 0


def test_koszul_dim_klein(klein):
    assert koszul_dim(klein, klein.divisor(0), klein.divisor(2), 3, 1) == 3


@pytest.mark.parametrize("p", [2, 3, 4])
def test_koszul_dim_rational(p1, p):
    assert koszul_dim(p1, p1.divisor(p), p1.divisor(p - 2), 2, 1) == 0


def test_koszul_dim_rejects_base_points(genus2):
    with pytest.raises(UsageError, match="base point"):
        koszul_dim(genus2, genus2.divisor(0), genus2.divisor(1), 0, 0)
    with pytest.raises(UsageError):
        koszul_dim(genus2, genus2.divisor(0), genus2.divisor(4), -1, 0)


def test_global_generation_cases(genus2, klein, genus2_f11):
    check_globally_generated(genus2, genus2.divisor(2))  # the canonical pencil
    check_globally_generated(klein, klein.divisor(1))  # plane sections: deg 4 < 2g
    # K + P has P as a base point (h0(K + P) = h0(K) = g)
    C = genus2_f11
    P = next(Q for Q in C.enumerate_closed_points(1) if not Q.is_infinity)
    with pytest.raises(UsageError, match="base point"):
        check_globally_generated(C, C.canonical_divisor() + C.general_divisor(0, {P: 1}))


# ---------------------------------------------------------------- Betti tables vs the independent oracle


ORACLE_CASES = [
    ("twisted_cubic", "p1", 0, 3),
    ("rational_normal_quartic", "p1", 0, 4),
    ("genus2_L4", "genus2", 0, 4),
    ("genus2_L5", "genus2", 0, 5),
    ("genus2_B2_L4", "genus2", 2, 4),
    ("genus3_L8", "genus3", 0, 8),
    ("klein_L2H", "klein", 0, 2),
]


@pytest.mark.parametrize("key,model,B,L", ORACLE_CASES, ids=[c[0] for c in ORACLE_CASES])
def test_betti_matches_oracle(oracle, key, model, B, L, request):
    C = request.getfixturevalue(model)
    t = betti_table(C, C.divisor(B), C.divisor(L))
    assert t.dims == oracle[key]


def test_twisted_cubic_table(p1):
    t = betti_table(p1, p1.divisor(0), p1.divisor(3))
    nonzero = {(p, q): t[p, q] for p in range(4) for q in range(4) if t[p, q]}
    assert nonzero == {(0, 0): 1, (1, 1): 3, (2, 1): 2}
    assert t.format().splitlines()[0].startswith("q\\p")


def test_genus2_row_q1(genus2):
    t = betti_table(genus2, genus2.divisor(0), genus2.divisor(4))
    assert t.row(1) == [0, 1, 0]
    assert t.nonzero_range(1) == [1]


@pytest.mark.parametrize("name,L", [("genus2_f11", 5), ("genus3_f11", 8), ("klein_f11", 2), ("p1_f7", 5)])
def test_generation_in_degree_zero(name, L, request):
    C = RationalCurve(GF(7)) if name == "p1_f7" else request.getfixturevalue(name)
    t = betti_table(C, C.divisor(0), C.divisor(L))
    assert t[0, 0] == 1
    assert all(t[p, 0] == 0 for p in range(1, t.p_max + 1))
    assert all(v >= 0 for row in t.dims for v in row)
    assert t.row(3) == [0] * (t.p_max + 1)


# ---------------------------------------------------------------- Hilbert identity


def test_hilbert_twisted_cubic(p1):
    data = GradedSectionData(p1, p1.divisor(0), p1.divisor(3))
    t = betti_table(p1, p1.divisor(0), p1.divisor(3), data=data)
    res = hilbert_check(t, data)
    assert res.ok
    assert res.lhs[:4] == [1, 0, -3, 2]


def test_hilbert_genus2(genus2):
    data = GradedSectionData(genus2, genus2.divisor(0), genus2.divisor(4))
    t = betti_table(genus2, genus2.divisor(0), genus2.divisor(4), data=data)
    assert hilbert_check(t, data)
    assert [data.w_dim(n) for n in range(1, 5)] == [4 * n - 1 for n in range(1, 5)]


def test_hilbert_detects_tampering(genus2):
    data = GradedSectionData(genus2, genus2.divisor(0), genus2.divisor(4))
    t = betti_table(genus2, genus2.divisor(0), genus2.divisor(4), data=data)
    bad = BettiTable(dims=[row[:] for row in t.dims], g=t.g, degL=t.degL, degB=t.degB, h0L=t.h0L, q_max=t.q_max)
    bad.dims[1][1] += 1
    res = hilbert_check(bad, data)
    assert not res.ok and res.first_mismatch == 2


def test_hilbert_needs_q2(genus2):
    t = betti_table(genus2, genus2.divisor(0), genus2.divisor(4), q_max=1)
    with pytest.raises(UsageError):
        hilbert_check(t, GradedSectionData(genus2, genus2.divisor(0), genus2.divisor(4)))


@pytest.mark.parametrize("name", ["genus2_f11", "genus3_f11", "klein_f11"])
@settings(max_examples=12, deadline=None)
@given(data=st.data())
def test_hilbert_random_pairs(name, request, data):
    C = request.getfixturevalue(name)
    g = C.genus
    if C.family == "plane":
        Lm = data.draw(st.integers(1, 2))
        Bm = data.draw(st.integers(0, 2))
    else:
        Lm = data.draw(st.integers(2 * g + 1, 2 * g + 3))
        Bm = data.draw(st.integers(0, 2 * g + 1))
    sd = GradedSectionData(C, C.divisor(Bm), C.divisor(Lm))
    t = betti_table(C, C.divisor(Bm), C.divisor(Lm), data=sd)
    assert hilbert_check(t, sd)
    cx = KoszulComplex(sd)
    for (p, q), r in t.ranks.items():
        assert r == cx.rank(p, q) == rank(koszul_differential(sd, p, q))


def test_rank_memo_is_shared(genus2):
    data = GradedSectionData(genus2, genus2.divisor(0), genus2.divisor(5))
    cx = KoszulComplex(data)
    cx.dim(1, 1)
    cx.dim(0, 2)
    # rank(1, 1) is computed once and reused by K_{0,2}
    assert set(cx._ranks) == {(1, 1), (2, 0)}


def test_q_vs_fp_small(genus2, klein):
    for C, L in ((genus2, 5), (klein, 2)):
        tq = betti_table(C, C.divisor(0), C.divisor(L))
        Cp = C.with_field(GF(10007))
        tp = betti_table(Cp, Cp.divisor(0), Cp.divisor(L))
        assert tq.dims == tp.dims
