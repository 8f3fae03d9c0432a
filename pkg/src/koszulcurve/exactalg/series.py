"""Truncated power series in one variable t and Newton/Hensel lifting."""

from __future__ import annotations

from ..errors import SingularPointError


class Series:
    """``coeffs[i]`` is the coefficient of t^i; known modulo t^precision."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs, precision=None):
        coeffs = list(coeffs)
        if precision is not None:
            coeffs = coeffs[:precision] + [field.zero] * (precision - len(coeffs))
        self.field = field
        self.coeffs = tuple(coeffs)

    @classmethod
    def constant(cls, field, c, precision):
        return cls(field, [c], precision)

    @classmethod
    def variable(cls, field, precision, shift=None):
        """The series ``shift + t``."""
        s = field.zero if shift is None else shift
        return cls(field, [s, field.one], precision)

    @property
    def precision(self):
        return len(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __repr__(self):
        K = self.field
        terms = [f"{K.format(c)}*t^{i}" for i, c in enumerate(self.coeffs) if not K.is_zero(c)]
        return f"Series({' + '.join(terms) or '0'} + O(t^{self.precision}))"

    def __eq__(self, other):
        return isinstance(other, Series) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def truncate(self, precision):
        return Series(self.field, self.coeffs[:precision], precision)

    def _coerce(self, other):
        if isinstance(other, Series):
            return other
        return Series.constant(self.field, self.field.coerce(other) if not isinstance(other, tuple) else other, self.precision)

    def __add__(self, other):
        other = self._coerce(other)
        K = self.field
        n = min(self.precision, other.precision)
        return Series(K, [K.add(self.coeffs[i], other.coeffs[i]) for i in range(n)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        K = self.field
        n = min(self.precision, other.precision)
        return Series(K, [K.sub(self.coeffs[i], other.coeffs[i]) for i in range(n)])

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        K = self.field
        return Series(K, [K.neg(c) for c in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, Series):
            K = self.field
            c = K.coerce(other) if not isinstance(other, tuple) else other
            return Series(K, [K.mul(c, a) for a in self.coeffs])
        K = self.field
        n = min(self.precision, other.precision)
        a, b = self.coeffs, other.coeffs
        out = [K.zero] * n
        for i in range(n):
            ai = a[i]
            if K.is_zero(ai):
                continue
            for j in range(n - i):
                bj = b[j]
                if not K.is_zero(bj):
                    out[i + j] = K.add(out[i + j], K.mul(ai, bj))
        return Series(K, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        result = Series.constant(self.field, self.field.one, self.precision)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self):
        K = self.field
        a = self.coeffs
        if not a or K.is_zero(a[0]):
            raise ZeroDivisionError("series with zero constant term is not invertible")
        n = len(a)
        inv0 = K.inv(a[0])
        out = [inv0]
        for k in range(1, n):
            acc = K.zero
            for j in range(1, k + 1):
                acc = K.add(acc, K.mul(a[j], out[k - j]))
            out.append(K.neg(K.mul(acc, inv0)))
        return Series(K, out)

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.inverse()
        K = self.field
        return self * K.inv(K.coerce(other) if not isinstance(other, tuple) else other)

    def is_zero(self):
        return all(self.field.is_zero(c) for c in self.coeffs)

    def valuation(self):
        """Index of the first nonzero coefficient, or the precision if none."""
        for i, c in enumerate(self.coeffs):
            if not self.field.is_zero(c):
                return i
        return self.precision


def eval_poly_series(F, s):
    """Evaluate sum F[i] * s^i where F is a list of Series coefficients."""
    K = s.field
    acc = Series(K, [], s.precision)
    for c in reversed(F):
        acc = acc * s + c
    return acc


def hensel_root(F, y0, precision):
    """Lift a simple root ``y0`` of F(0, Y) to a series root of F(t, Y).

    ``F`` is the list of coefficients (as :class:`Series` in t) of the powers
    of Y.  Returns ``s`` with ``s(0) = y0`` and ``F(t, s(t)) = 0 mod
    t^precision``; raises :class:`SingularPointError` if dF/dY(0, y0) = 0.
    """
    if not F:
        raise ValueError("empty polynomial")
    K = F[0].field
    if any(c.precision < precision for c in F):
        raise ValueError("coefficient series known to insufficient precision")
    F = [c.truncate(precision) for c in F]
    dF = [F[i] * K.from_int(i) for i in range(1, len(F))]

    def at0(coeffs):
        acc = K.zero
        for c in reversed(coeffs):
            acc = K.add(K.mul(acc, y0), c[0])
        return acc

    if not K.is_zero(at0(F)):
        raise ValueError("y0 is not a root of F(0, Y)")
    if not dF or K.is_zero(at0(dF)):
        raise SingularPointError("dF/dY vanishes at the base point")

    s = Series.constant(K, y0, 1)
    prec = 1
    while prec < precision:
        prec = min(2 * prec, precision)
        s = Series(K, s.coeffs, prec)
        Fs = eval_poly_series([c.truncate(prec) for c in F], s)
        dFs = eval_poly_series([c.truncate(prec) for c in dF], s)
        s = s - Fs / dFs
    return s.truncate(precision)
