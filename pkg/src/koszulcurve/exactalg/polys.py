"""Dense univariate polynomials over a :class:`~koszulcurve.exactalg.fields.Field`.

Polynomials are plain lists of raw field values, lowest degree first, with no
trailing zeros (the zero polynomial is ``[]``).  Every function takes the
field explicitly, so the same code serves Q, F_p and F_{p^e}.
"""

from __future__ import annotations

import random

from ..errors import UnsupportedFieldError


def trim(K, f):
    f = list(f)
    while f and K.is_zero(f[-1]):
        f.pop()
    return f


def degree(f):
    return len(f) - 1


def add(K, f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else K.zero
        b = g[i] if i < len(g) else K.zero
        out.append(K.add(a, b))
    return trim(K, out)


def sub(K, f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else K.zero
        b = g[i] if i < len(g) else K.zero
        out.append(K.sub(a, b))
    return trim(K, out)


def scale(K, f, c):
    return trim(K, [K.mul(c, a) for a in f])


def mul(K, f, g):
    if not f or not g:
        return []
    out = [K.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if K.is_zero(a):
            continue
        for j, b in enumerate(g):
            out[i + j] = K.add(out[i + j], K.mul(a, b))
    return trim(K, out)


def divmod_(K, f, g):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    dg = len(g) - 1
    inv_lc = K.inv(g[-1])
    if len(f) <= dg:
        return [], trim(K, f)
    q = [K.zero] * (len(f) - dg)
    for k in range(len(f) - 1, dg - 1, -1):
        c = f[k]
        if K.is_zero(c):
            continue
        c = K.mul(c, inv_lc)
        q[k - dg] = c
        for j in range(dg + 1):
            f[k - dg + j] = K.sub(f[k - dg + j], K.mul(c, g[j]))
    return trim(K, q), trim(K, f[:dg])


def rem(K, f, g):
    return divmod_(K, f, g)[1]


def monic(K, f):
    if not f:
        return []
    return scale(K, f, K.inv(f[-1]))


def gcd(K, f, g):
    f, g = trim(K, f), trim(K, g)
    while g:
        f, g = g, rem(K, f, g)
    return monic(K, f)


def powmod(K, f, n, m):
    result = [K.one]
    base = rem(K, f, m)
    while n:
        if n & 1:
            result = rem(K, mul(K, result, base), m)
        n >>= 1
        if n:
            base = rem(K, mul(K, base, base), m)
    return rem(K, result, m)


def evaluate(K, f, x):
    acc = K.zero
    for c in reversed(f):
        acc = K.add(K.mul(acc, x), c)
    return acc


def derivative(K, f):
    return trim(K, [K.mul(K.from_int(i), f[i]) for i in range(1, len(f))])


def compose_linear(K, f, a, b):
    """Return f(a + b*s) as a polynomial in s."""
    out = []
    lin = [a, b]
    for c in reversed(f):
        out = add(K, mul(K, out, lin), [c] if not K.is_zero(c) else [])
    return out


def multiplicity(K, f, r):
    """Largest k with (x - r)^k dividing f (f nonzero)."""
    k = 0
    lin = [K.neg(r), K.one]
    while f:
        q, rr = divmod_(K, f, lin)
        if rr:
            break
        f = q
        k += 1
    return k


def _split_linear_product(K, h, rng):
    """Roots of a monic squarefree h that splits into linear factors over K."""
    if len(h) <= 1:
        return []
    if len(h) == 2:
        return [K.neg(h[0])]
    q = K.order
    while True:
        delta = K.random_element(rng)
        u = [delta, K.one]
        if K.characteristic == 2:
            k = q.bit_length() - 1
            t = rem(K, u, h)
            acc = list(t)
            for _ in range(k - 1):
                t = rem(K, mul(K, t, t), h)
                acc = add(K, acc, t)
            w = acc
        else:
            w = sub(K, powmod(K, u, (q - 1) // 2, h), [K.one])
        d = gcd(K, h, w)
        if 0 < len(d) - 1 < len(h) - 1:
            other = divmod_(K, h, d)[0]
            return _split_linear_product(K, d, rng) + _split_linear_product(K, monic(K, other), rng)


def roots_finite(K, f, seed=0):
    """Distinct roots of f in the finite field K, in deterministic order."""
    f = trim(K, f)
    if len(f) <= 1:
        return []
    f = monic(K, f)
    q = K.order
    if q <= 64:
        return [x for x in K.elements() if K.is_zero(evaluate(K, f, x))]
    xq = powmod(K, [K.zero, K.one], q, f)
    h = gcd(K, f, sub(K, xq, [K.zero, K.one]))
    rng = random.Random(seed)
    roots = _split_linear_product(K, h, rng)
    return sorted(roots, key=K.sort_key)


def roots_rational(f):
    """Rational roots of f with coefficients in Q (as Fractions) with multiplicities."""
    from fractions import Fraction

    import sympy

    f = [Fraction(c) for c in f]
    while f and f[-1] == 0:
        f.pop()
    if len(f) <= 1:
        return {}
    x = sympy.Symbol("x")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(f))
    found = sympy.Poly(expr, x, domain="QQ").ground_roots()
    return {Fraction(int(r.p), int(r.q)): int(m) for r, m in found.items()}


def roots_with_multiplicity(K, f):
    """Dict root -> multiplicity over K (Q or a finite field)."""
    if K.is_finite:
        return {r: multiplicity(K, f, r) for r in roots_finite(K, f)}
    if K.characteristic == 0:
        return roots_rational(f)
    raise UnsupportedFieldError(f"no root finder over {K}")
