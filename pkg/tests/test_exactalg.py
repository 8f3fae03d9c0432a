import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koszulcurve.errors import FieldMismatchError, SingularPointError
from koszulcurve.exactalg import _kernels_py, kernels
from koszulcurve.exactalg.fields import GF, QQ, ExtensionField, extension_field, field_from_spec, is_irreducible
from koszulcurve.exactalg.matrix import ExactMatrix, kernel_basis, rank
from koszulcurve.exactalg.series import Series, eval_poly_series, hensel_root

FIELDS = [QQ, GF(7), GF(10007), extension_field(5, 3), extension_field(3, 2)]


# ---------------------------------------------------------------- fields


@pytest.mark.parametrize("K", FIELDS, ids=str)
@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_field_axioms(K, seed):
    rng = random.Random(seed)
    a, b, c = (K.random_element(rng) for _ in range(3))
    add, mul = K.add, K.mul
    assert add(add(a, b), c) == add(a, add(b, c))
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))
    assert add(a, K.neg(a)) == K.zero
    assert mul(a, b) == mul(b, a)
    if not K.is_zero(a):
        assert mul(a, K.inv(a)) == K.one


def test_rationals_reduced():
    v = QQ.coerce(Fraction(6, -4))
    assert (v.numerator, v.denominator) == (-3, 2)


def test_prime_field_residues():
    K = GF(13)
    assert K.coerce(-1) == 12
    assert K.mul(5, 5) == 12


def test_extension_minpoly_irreducible():
    E = extension_field(7, 4)
    assert isinstance(E, ExtensionField)
    assert is_irreducible(GF(7), list(E.minpoly))
    # x^2 + 1 splits mod 5
    with pytest.raises(ValueError):
        ExtensionField(5, [1, 0, 1])


def test_field_element_mismatch():
    with pytest.raises(FieldMismatchError):
        GF(7)(1) + GF(11)(1)


def test_field_from_spec():
    assert field_from_spec("Q") is QQ
    assert field_from_spec("Fp:10007") == GF(10007)
    with pytest.raises(ValueError):
        field_from_spec("R")


# ---------------------------------------------------------------- rank and kernel


def test_rank_examples():
    assert rank(ExactMatrix.identity(QQ, 2)) == 2
    assert rank(ExactMatrix.zeros(QQ, 3, 5)) == 0
    assert rank(ExactMatrix.from_rows(QQ, [[1] * 3] * 3)) == 1


def test_kernel_examples():
    assert kernel_basis(ExactMatrix.identity(QQ, 4)).shape == (4, 0)
    K0 = kernel_basis(ExactMatrix.zeros(QQ, 2, 3))
    assert K0.shape == (3, 3) and rank(K0) == 3
    M = ExactMatrix.from_rows(QQ, [[1, 1, 0]])
    Kb = kernel_basis(M)
    assert Kb.shape == (3, 2)
    assert (M @ Kb).is_zero()


def test_mixed_field_entries_rejected():
    with pytest.raises(FieldMismatchError):
        ExactMatrix(QQ, 1, 1, {(0, 0): GF(7)(1)})


def _random_matrix(K, rng, nrows, ncols, density=0.5, height=5):
    ent = {}
    for i in range(nrows):
        for j in range(ncols):
            if rng.random() < density:
                ent[(i, j)] = K.coerce(Fraction(rng.randint(-height, height), rng.randint(1, 3))) if K is QQ else K.random_element(rng)
    return ExactMatrix(K, nrows, ncols, ent)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), shape=st.tuples(st.integers(1, 9), st.integers(1, 9)))
def test_kernel_exactness(seed, shape):
    rng = random.Random(seed)
    K = rng.choice(FIELDS)
    M = _random_matrix(K, rng, *shape)
    Kb = kernel_basis(M)
    r = rank(M)
    assert Kb.ncols == M.ncols - r
    assert (M @ Kb).is_zero()
    assert rank(Kb) == Kb.ncols


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_rank_low_rank_products(seed):
    rng = random.Random(seed)
    k = rng.randint(0, 4)
    A = _random_matrix(QQ, rng, 7, k, density=1.0) if k else ExactMatrix.zeros(QQ, 7, 0)
    B = _random_matrix(QQ, rng, k, 6, density=1.0) if k else ExactMatrix.zeros(QQ, 0, 6)
    assert rank(A @ B) <= k


def test_modular_consistency():
    # rank over Q equals rank mod a large prime in (nearly) all trials
    rng = random.Random(2024)
    primes = [1000003, 998244353, 2147483629]
    trials, agree = 200, 0
    for _ in range(trials):
        nr, nc = rng.randint(2, 8), rng.randint(2, 8)
        rows = [[rng.randint(-9, 9) if rng.random() < 0.6 else 0 for _ in range(nc)] for _ in range(nr)]
        if rng.random() < 0.5 and nr > 1:
            rows[-1] = [a + b for a, b in zip(rows[0], rows[1 % nr])]
        p = rng.choice(primes)
        agree += rank(ExactMatrix.from_rows(QQ, rows)) == rank(ExactMatrix.from_rows(GF(p), rows))
    assert agree >= 0.99 * trials


@pytest.mark.skipif(kernels.compiled_backend is None, reason="compiled kernels not built")
@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_compiled_matches_python(seed):
    rng = np.random.default_rng(seed)
    p = int(rng.choice([7, 10007, 31013]))
    A = rng.integers(0, p, size=(int(rng.integers(1, 12)), int(rng.integers(1, 12))))
    A[rng.random(A.shape) < 0.5] = 0
    assert kernels.compiled_backend.rank_modp(A, p) == _kernels_py.rank_modp(A, p)
    R1, piv1 = kernels.compiled_backend.rref_modp(A, p)
    R2, piv2 = _kernels_py.rref_modp(A, p)
    assert list(piv1) == list(piv2)
    assert np.array_equal(np.asarray(R1), np.asarray(R2))


# ---------------------------------------------------------------- series and Hensel lifting


def _poly_t(K, coeffs, prec):
    return Series(K, [K.coerce(c) for c in coeffs], prec)


def test_hensel_binomial_series():
    K = QQ
    F = [_poly_t(K, [-1, -1], 3), _poly_t(K, [0], 3), _poly_t(K, [1], 3)]
    s = hensel_root(F, K.one, 3)
    assert list(s.coeffs) == [1, Fraction(1, 2), Fraction(-1, 8)]


def test_hensel_linear():
    K = QQ
    F = [_poly_t(K, [0, -1], 4), _poly_t(K, [1], 4)]
    assert list(hensel_root(F, K.zero, 4).coeffs) == [0, 1, 0, 0]


def test_hensel_genus2_over_f13():
    K = GF(13)
    prec = 2
    f = _poly_t(K, [-1, 0, 0, 0, 0, 1], prec)  # x^5 - 1 expanded at a = 0
    F = [-f, _poly_t(K, [0], prec), _poly_t(K, [1], prec)]
    s = hensel_root(F, K.coerce(5), prec)
    assert s[0] == 5
    assert (s * s - f).is_zero()


def test_hensel_singular():
    K = QQ
    F = [_poly_t(K, [0, 1], 3), _poly_t(K, [0], 3), _poly_t(K, [1], 3)]  # y^2 + t at y0 = 0
    with pytest.raises(SingularPointError):
        hensel_root(F, K.zero, 3)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), prec=st.integers(1, 8))
def test_hensel_substitution_vanishes(seed, prec):
    rng = random.Random(seed)
    K = rng.choice([QQ, GF(10007), extension_field(7, 2)])
    # F(t, Y) = Y^3 + a(t) Y + b(t) with a root y0 at t=0 made simple by construction
    y0 = K.random_element(rng)
    a = [K.random_element(rng) for _ in range(prec)]
    c = K.add(K.mul(K.from_int(3), K.mul(y0, y0)), a[0])
    if K.is_zero(c):
        a[0] = K.add(a[0], K.one)
    b = [K.random_element(rng) for _ in range(prec)]
    b[0] = K.neg(K.add(K.mul(y0, K.mul(y0, y0)), K.mul(a[0], y0)))
    F = [Series(K, b, prec), Series(K, a, prec), Series(K, [], prec), Series(K, [K.one], prec)]
    s = hensel_root(F, y0, prec)
    assert eval_poly_series(F, s).is_zero()
