"""Exact fields: Q, prime fields F_p and extensions F_{p^e}.

A field object owns the arithmetic on *raw* values (``Fraction`` for Q,
``int`` in ``[0, p)`` for F_p, coefficient tuples for F_{p^e}); hot code
works with raw values directly.  :class:`FieldElement` wraps a raw value
together with its field for the public, operator-overloaded API.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache, total_ordering

from ..errors import FieldMismatchError, UnsupportedFieldError
from . import polys


def is_prime(n):
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """Common interface; subclasses implement the raw arithmetic."""

    characteristic = 0
    degree = 1
    is_finite = False

    def __call__(self, value):
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatchError(f"element of {value.field} used as element of {self}")
            return value
        return FieldElement(self, self.coerce(value))

    def neg(self, a):
        return self.sub(self.zero, a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n):
        if n < 0:
            return self.pow(self.inv(a), -n)
        result = self.one
        while n:
            if n & 1:
                result = self.mul(result, a)
            n >>= 1
            if n:
                a = self.mul(a, a)
        return result

    def is_zero(self, a):
        return a == self.zero

    def from_int(self, n):
        return self.coerce(n)

    def sort_key(self, a):
        return a

    @property
    def base(self):
        """The prime field (or Q) this field is a vector space over."""
        return self

    def to_base(self, a):
        """Coordinates of ``a`` over :attr:`base`."""
        return (a,)

    def embed(self, a):
        """Embed a raw value of :attr:`base` into this field."""
        return a

    def random_element(self, rng):
        raise NotImplementedError


class Rationals(Field):
    """The field Q with ``fractions.Fraction`` values."""

    zero = Fraction(0)
    one = Fraction(1)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def coerce(self, v):
        if isinstance(v, Fraction):
            return v
        if isinstance(v, (int, str)):
            return Fraction(v)
        if hasattr(v, "numerator") and hasattr(v, "denominator"):
            return Fraction(int(v.numerator), int(v.denominator))
        raise TypeError(f"cannot coerce {v!r} into QQ")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in QQ")
        return 1 / a

    def div(self, a, b):
        return a / b

    def is_zero(self, a):
        return a == 0

    def random_element(self, rng, height=20):
        num = rng.randint(-height, height)
        den = rng.randint(1, height)
        return Fraction(num, den)

    def format(self, a):
        return str(a)


QQ = Rationals()


class PrimeField(Field):
    """F_p with integer residues in ``[0, p)``."""

    is_finite = True
    zero = 0
    one = 1

    def __init__(self, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.order = p

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def coerce(self, v):
        if isinstance(v, int):
            return v % self.p
        if isinstance(v, Fraction) or (hasattr(v, "numerator") and hasattr(v, "denominator")):
            num, den = int(v.numerator), int(v.denominator)
            if den % self.p == 0:
                raise ZeroDivisionError(f"denominator {den} vanishes mod {self.p}")
            return num * pow(den, -1, self.p) % self.p
        if isinstance(v, str):
            return self.coerce(Fraction(v))
        raise TypeError(f"cannot coerce {v!r} into GF({self.p})")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError(f"inverse of zero in GF({self.p})")
        return pow(a, -1, self.p)

    def pow(self, a, n):
        if n < 0:
            return pow(self.inv(a), -n, self.p)
        return pow(a, n, self.p)

    def is_zero(self, a):
        return a == 0

    def elements(self):
        return range(self.p)

    def random_element(self, rng):
        return rng.randrange(self.p)

    def frobenius(self, a):
        return a

    def format(self, a):
        return str(a)


@lru_cache(maxsize=None)
def GF(p):
    return PrimeField(p)


def is_irreducible(Fp, f):
    """Ben-Or test: monic f of degree e over F_p is irreducible iff it has no
    factor in common with x^{p^k} - x for every k <= e/2."""
    e = len(f) - 1
    if e <= 0:
        return False
    if e == 1:
        return True
    x = [0, 1]
    xp = list(x)
    for _ in range(1, e // 2 + 1):
        xp = polys.powmod(Fp, xp, Fp.p, f)
        if len(polys.gcd(Fp, f, polys.sub(Fp, xp, x))) > 1:
            return False
    return True


class ExtensionField(Field):
    """F_{p^e} = F_p[a]/(minpoly); values are length-e coefficient tuples."""

    is_finite = True

    def __init__(self, p, minpoly):
        Fp = GF(p)
        mp = [Fp.coerce(c) for c in minpoly]
        mp = polys.trim(Fp, mp)
        if len(mp) < 2:
            raise ValueError("minimal polynomial must have degree >= 1")
        mp = polys.monic(Fp, mp)
        if not is_irreducible(Fp, mp):
            raise ValueError(f"{mp} is not irreducible over GF({p})")
        self.p = p
        self.characteristic = p
        self.minpoly = tuple(mp)
        self.degree = len(mp) - 1
        self.order = p**self.degree
        self._Fp = Fp
        self.zero = (0,) * self.degree
        self.one = (1,) + (0,) * (self.degree - 1)

    def __repr__(self):
        return f"GF({self.p}^{self.degree})"

    def __eq__(self, other):
        return isinstance(other, ExtensionField) and other.minpoly == self.minpoly and other.p == self.p

    def __hash__(self):
        return hash(("GFext", self.p, self.minpoly))

    @property
    def base(self):
        return self._Fp

    @property
    def generator(self):
        if self.degree == 1:
            return (self._Fp.neg(self.minpoly[0]),)
        return (0, 1) + (0,) * (self.degree - 2)

    def coerce(self, v):
        if isinstance(v, tuple):
            if len(v) != self.degree:
                raise ValueError(f"expected {self.degree} coordinates, got {len(v)}")
            return tuple(c % self.p for c in v)
        if isinstance(v, (list,)):
            return self._reduce([self._Fp.coerce(c) for c in v])
        return self.embed(self._Fp.coerce(v))

    def embed(self, a):
        return (a % self.p,) + (0,) * (self.degree - 1)

    def to_base(self, a):
        return a

    def _reduce(self, coeffs):
        p, e, mp = self.p, self.degree, self.minpoly
        c = [x % p for x in coeffs]
        for k in range(len(c) - 1, e - 1, -1):
            t = c[k]
            if t:
                for j in range(e):
                    c[k - e + j] = (c[k - e + j] - t * mp[j]) % p
        c = c[:e] + [0] * (e - len(c))
        return tuple(c)

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple(-x % p for x in a)

    def mul(self, a, b):
        e = self.degree
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return self._reduce(prod)

    def inv(self, a):
        if not any(a):
            raise ZeroDivisionError(f"inverse of zero in {self}")
        return self.pow(a, self.order - 2)

    def is_zero(self, a):
        return not any(a)

    def from_int(self, n):
        return self.embed(n % self.p)

    def sort_key(self, a):
        return tuple(reversed(a))

    def elements(self):
        import itertools

        for t in itertools.product(range(self.p), repeat=self.degree):
            yield tuple(reversed(t))

    def random_element(self, rng):
        return tuple(rng.randrange(self.p) for _ in range(self.degree))

    def frobenius(self, a, k=1):
        return self.pow(a, self.p**k)

    def in_subfield(self, a, k):
        """True when ``a`` lies in F_{p^k}."""
        return self.frobenius(a, k) == a

    def format(self, a):
        terms = []
        for i, c in enumerate(a):
            if c:
                if i == 0:
                    terms.append(str(c))
                elif i == 1:
                    terms.append(f"{c}*a" if c != 1 else "a")
                else:
                    terms.append(f"{c}*a^{i}" if c != 1 else f"a^{i}")
        return " + ".join(terms) if terms else "0"


@lru_cache(maxsize=None)
def extension_field(p, e, seed=0):
    """The canonical F_{p^e} used throughout: the first monic irreducible
    polynomial produced by a seeded random search."""
    Fp = GF(p)
    if e == 1:
        return Fp
    rng = random.Random(f"minpoly-{p}-{e}-{seed}")
    while True:
        f = [rng.randrange(p) for _ in range(e)] + [1]
        if f[0] == 0:
            continue
        if is_irreducible(Fp, f):
            return ExtensionField(p, f)


def field_from_spec(text):
    """Parse ``Q`` / ``QQ`` / ``Fp:<prime>`` / ``GF(p)``."""
    t = text.strip()
    if t.upper() in ("Q", "QQ"):
        return QQ
    for prefix in ("Fp:", "FP:", "fp:", "GF:"):
        if t.startswith(prefix):
            return GF(int(t[len(prefix):]))
    if t.upper().startswith("GF(") and t.endswith(")"):
        return GF(int(t[3:-1]))
    raise ValueError(f"unknown field specification {text!r}")


def field_label(K):
    if K.characteristic == 0:
        return "Q"
    if K.degree == 1:
        return f"Fp:{K.characteristic}"
    return f"Fp:{K.characteristic}^{K.degree}"


@total_ordering
class FieldElement:
    """An immutable field element: raw value plus its field."""

    __slots__ = ("field", "value")

    def __init__(self, field, value):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"cannot combine elements of {self.field} and {other.field}")
            return other.value
        return self.field.coerce(other)

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._other(other)))

    def __rtruediv__(self, other):
        return FieldElement(self.field, self.field.div(self._other(other), self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, n):
        return FieldElement(self.field, self.field.pow(self.value, n))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def is_zero(self):
        return self.field.is_zero(self.value)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field.coerce(other)
        except (TypeError, ValueError, ZeroDivisionError):
            return NotImplemented

    def __lt__(self, other):
        return self.field.sort_key(self.value) < self.field.sort_key(self._other(other))

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"{self.field}({self.field.format(self.value)})"

    def __str__(self):
        return self.field.format(self.value)


def require_finite(K, what="this operation"):
    if not K.is_finite:
        raise UnsupportedFieldError(f"{what} needs a finite field, got {K}")
