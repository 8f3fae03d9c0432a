"""Job files: key-value blocks describing a curve, two divisors and a command.

    [curve]
    family = hyperelliptic        # rational | hyperelliptic | plane
    f = "x^5 - 1"                 # plane curves use F = "x^3*y + ..."
    field = Q                     # or Fp:<prime>

    [divisors]
    B = "0*Pinf"
    L = "4*Pinf"

    [job]
    command = verify-thm11
    p = 1

Polynomials need explicit ``*``.  Divisors are sums of terms ``k*atom`` where
atom is the base (``Pinf`` or ``H``), an affine point ``(a,b)``, a projective
point ``(a:b:c)``, or an extension point ``[ext: e, c1, c2, ...]`` whose
coordinates are polynomials in the generator ``a`` of F_{p^e}.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .curves import HYPERELLIPTIC, PLANE, RATIONAL, Divisor, HyperellipticCurve, PlaneCurve, RationalCurve
from .errors import InvalidDivisorError, InvalidModelError, KoszulCurveError, ParseError
from .exactalg.fields import QQ, PrimeField, extension_field, field_from_spec

COMMANDS = ("betti", "koszul", "gonality", "pva", "verify-thm11", "verify-thm12", "verify-cor", "duality")
SECTIONS = {
    "curve": ("family", "f", "F", "field"),
    "divisors": ("B", "L"),
    "job": ("command", "p", "q", "brute", "format", "q_max", "name"),
}

# ---------------------------------------------------------------- tokenizer

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass
class Token:
    kind: str  # num, name, op, end
    text: str
    pos: int


def tokenize(text, where=(None, 0)):
    line, offset = where
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None or m.end() == i:
            break
        if m.group(1) is not None:
            out.append(Token("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(Token("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^(),:[]":
                raise ParseError(f"unexpected character {ch!r}", line, offset + m.start(3) + 1)
            out.append(Token("op", ch, m.start(3)))
        i = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Cursor:
    def __init__(self, text, where):
        self.text = text
        self.line, self.offset = where
        self.toks = tokenize(text, where)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, self.line, self.offset + tok.pos + 1)

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            return self.take()
        return None

    def expect(self, text):
        t = self.accept(text)
        if t is None:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return t


# ---------------------------------------------------------------- polynomials


def _padd(a, b, sign=1):
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, 0) + sign * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def _pmul(a, b):
    out = {}
    for k1, v1 in a.items():
        for k2, v2 in b.items():
            k = tuple(x + y for x, y in zip(k1, k2))
            w = out.get(k, 0) + v1 * v2
            if w:
                out[k] = w
            else:
                out.pop(k, None)
    return out


class _PolyParser:
    def __init__(self, cur, variables):
        self.cur = cur
        self.vars = variables
        self.n = len(variables)

    def const(self, c):
        return {(0,) * self.n: Fraction(c)} if c else {}

    def expr(self):
        cur = self.cur
        sign = 1
        if cur.accept("-"):
            sign = -1
        else:
            cur.accept("+")
        acc = _padd({}, self.term(), sign)
        while True:
            if cur.accept("+"):
                acc = _padd(acc, self.term())
            elif cur.accept("-"):
                acc = _padd(acc, self.term(), -1)
            else:
                return acc

    def term(self):
        cur = self.cur
        acc = self.factor()
        while True:
            if cur.accept("*"):
                acc = _pmul(acc, self.factor())
            elif cur.tok.kind == "op" and cur.tok.text == "/":
                slash = cur.take()
                t = cur.tok
                if t.kind != "num":
                    raise cur.error("only integer denominators are allowed after '/'")
                cur.take()
                if int(t.text) == 0:
                    raise cur.error("division by zero", slash)
                acc = {k: v / int(t.text) for k, v in acc.items()}
            elif cur.tok.kind in ("num", "name") or (cur.tok.kind == "op" and cur.tok.text == "("):
                raise cur.error("implicit multiplication is not allowed; write '*'")
            else:
                return acc

    def factor(self):
        cur = self.cur
        base = self.atom()
        if cur.accept("^"):
            t = cur.tok
            if t.kind != "num":
                raise cur.error("exponent must be a nonnegative integer")
            cur.take()
            e = int(t.text)
            out = self.const(1)
            for _ in range(e):
                out = _pmul(out, base)
            return out
        return base

    def atom(self):
        cur = self.cur
        t = cur.tok
        if t.kind == "num":
            cur.take()
            return self.const(int(t.text))
        if t.kind == "name":
            if t.text not in self.vars:
                raise cur.error(f"unknown variable {t.text!r}; expected one of {', '.join(self.vars)}")
            cur.take()
            k = [0] * self.n
            k[self.vars.index(t.text)] = 1
            return {tuple(k): Fraction(1)}
        if cur.accept("("):
            inner = self.expr()
            cur.expect(")")
            return inner
        raise cur.error(f"expected a number, variable or '(', found {t.text or 'end of input'!r}")


def parse_polynomial(text, variables=("x",), where=(None, 0)):
    """Parse into {exponent tuple: Fraction}."""
    cur = _Cursor(text, where)
    poly = _PolyParser(cur, variables).expr()
    if cur.tok.kind != "end":
        raise cur.error(f"unexpected {cur.tok.text!r}")
    return poly


def parse_number(text):
    """A rational constant such as ``-3/4``."""
    poly = parse_polynomial(text, ())
    return poly.get((), Fraction(0))


# ---------------------------------------------------------------- curves


def build_curve(family, poly_text, field, where=(None, 0)):
    try:
        if family == RATIONAL:
            return RationalCurve(field)
        if family == HYPERELLIPTIC:
            poly = parse_polynomial(poly_text, ("x",), where)
            deg = max((k[0] for k in poly), default=0)
            coeffs = [poly.get((i,), Fraction(0)) for i in range(deg + 1)]
            return HyperellipticCurve(coeffs, field)
        if family == PLANE:
            poly = parse_polynomial(poly_text, ("x", "y", "z"), where)
            degs = {sum(k) for k in poly}
            if len(degs) != 1:
                raise ParseError("plane curve polynomial must be homogeneous", *where)
            return PlaneCurve(poly, field)
    except (InvalidModelError, ZeroDivisionError) as exc:
        raise InvalidModelError(f"{family} curve: {exc}") from exc
    raise ParseError(f"unknown curve family {family!r}; use rational, hyperelliptic or plane", *where)


# ---------------------------------------------------------------- divisors


def _coordinates(cur, stop, Kpt):
    """Comma- or colon-separated coordinates up to ``stop``.

    Each coordinate is a constant, or a polynomial in the generator ``a``
    when the point lives over an extension field.
    """
    polys = []
    variables = ("a",) if Kpt is not None else ()
    while True:
        start = cur.i
        depth = 0
        while True:
            t = cur.tok
            if t.kind == "end":
                raise cur.error(f"unterminated point; expected {stop!r}")
            if t.kind == "op" and t.text == "(":
                depth += 1
            elif t.kind == "op" and t.text == ")" and depth:
                depth -= 1
            elif depth == 0 and t.kind == "op" and t.text in (",", ":", stop):
                break
            cur.take()
        if cur.i == start:
            raise cur.error("empty coordinate")
        a, b = cur.toks[start].pos, cur.tok.pos
        polys.append(parse_polynomial(cur.text[a:b], variables, (cur.line, cur.offset + a)))
        if cur.take().text == stop:
            return polys


def _point_from_polys(model, polys, Kpt, cur, tok):
    K = model.field
    try:
        if Kpt is None:
            vals = [p.get((), Fraction(0)) for p in polys]
            return model.point(tuple(K.coerce(v) for v in vals))
        coords = []
        for p in polys:
            deg = max((k[0] for k in p), default=0)
            coords.append([K.coerce(p.get((i,), Fraction(0))) for i in range(deg + 1)])
        return model.point(tuple(coords), Kpt)
    except (InvalidDivisorError, ZeroDivisionError) as exc:
        loc = f"column {cur.offset + tok.pos + 1}"
        if cur.line is not None:
            loc = f"line {cur.line}, {loc}"
        raise InvalidDivisorError(f"{loc}: {exc}") from exc


def parse_divisor(text, model, where=(None, 0)):
    """Parse a divisor expression into a :class:`Divisor` (positive parts allowed)."""
    cur = _Cursor(text, where)
    base_name = "H" if model.family == PLANE else "Pinf"
    m = 0
    points = {}
    first = True
    while cur.tok.kind != "end":
        sign = 1
        if cur.accept("-"):
            sign = -1
        elif cur.accept("+"):
            pass
        elif not first:
            raise cur.error("expected '+' or '-' between divisor terms")
        first = False
        k = 1
        if cur.tok.kind == "num":
            k = int(cur.take().text)
            if cur.accept("*") is None:
                if cur.tok.kind in ("end",) or (cur.tok.kind == "op" and cur.tok.text in "+-"):
                    raise cur.error(f"a bare number is not a divisor; write '{k}*{base_name}'")
                raise cur.error("implicit multiplication is not allowed; write '*'")
        t = cur.tok
        if t.kind == "name":
            cur.take()
            if t.text in ("Pinf", "H"):
                if t.text != base_name:
                    raise cur.error(f"base {t.text!r} does not match this model; use {base_name!r}", t)
                m += sign * k
                continue
            raise cur.error(f"unknown divisor atom {t.text!r}", t)
        if cur.accept("("):
            polys = _coordinates(cur, ")", None)
            expected = {RATIONAL: 1, HYPERELLIPTIC: 2, PLANE: 3}[model.family]
            if len(polys) != expected:
                raise cur.error(f"{model.family} points have {expected} coordinate(s), got {len(polys)}", t)
            P = _point_from_polys(model, polys, None, cur, t)
        elif cur.accept("["):
            name = cur.tok
            if name.kind != "name" or name.text != "ext":
                raise cur.error("extension points start with 'ext:'")
            cur.take()
            cur.expect(":")
            et = cur.tok
            if et.kind != "num":
                raise cur.error("expected the extension degree")
            e = int(cur.take().text)
            cur.expect(",")
            if not isinstance(model.field, PrimeField):
                raise cur.error("extension points need an F_p model", t)
            Kpt = extension_field(model.field.p, e) if e > 1 else None
            polys = _coordinates(cur, "]", Kpt)
            expected = {RATIONAL: 1, HYPERELLIPTIC: 2, PLANE: 3}[model.family]
            if len(polys) != expected:
                raise cur.error(f"{model.family} points have {expected} coordinate(s), got {len(polys)}", t)
            P = _point_from_polys(model, polys, Kpt, cur, t)
        else:
            raise cur.error(f"expected a divisor term, found {t.text or 'end of input'!r}")
        points[P] = points.get(P, 0) + sign * k
    return Divisor(model, m, points)


# ---------------------------------------------------------------- job files


@dataclass
class JobSpec:
    family: str
    poly: str | None
    field_text: str
    model: object
    B: object
    L: object
    B_text: str
    L_text: str
    command: str | None = None
    params: dict = field(default_factory=dict)
    name: str = ""

    def curve_summary(self):
        d = dict(self.model.describe())
        return d


def _read_blocks(text):
    blocks = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped[0] in "#;":
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", lineno, len(raw.rstrip()) + 1)
            section = stripped[1:-1].strip()
            if section not in SECTIONS:
                raise ParseError(f"unknown section [{section}]", lineno, raw.index("[") + 2)
            if section in blocks:
                raise ParseError(f"duplicate section [{section}]", lineno, raw.index("[") + 1)
            blocks[section] = {}
            continue
        if section is None:
            raise ParseError("key outside of any section", lineno, 1)
        if "=" not in raw:
            raise ParseError("expected 'key = value'", lineno, len(raw) - len(raw.lstrip()) + 1)
        eq = raw.index("=")
        key = raw[:eq].strip()
        if key not in SECTIONS[section]:
            raise ParseError(f"unknown key {key!r} in [{section}]", lineno, raw.index(key) + 1 if key else 1)
        rest = raw[eq + 1:]
        vstart = eq + 1 + (len(rest) - len(rest.lstrip()))
        value = rest.strip()
        if value and value[0] in "\"'":
            q = value[0]
            end = value.find(q, 1)
            if end < 0:
                raise ParseError("unterminated string", lineno, vstart + 1)
            trailing = value[end + 1:].strip()
            if trailing and trailing[0] not in "#;":
                raise ParseError("text after closing quote", lineno, vstart + end + 2)
            value = value[1:end]
            vstart += 1
        else:
            for c in "#;":
                cut = value.find(" " + c)
                if cut >= 0:
                    value = value[:cut].rstrip()
        blocks[section][key] = (value, lineno, vstart)
    return blocks


def parse_job(text, field_override=None):
    """Parse and validate a job file; raises ParseError or InvalidDivisorError with positions."""
    blocks = _read_blocks(text)
    if "curve" not in blocks:
        raise ParseError("missing [curve] section", 1, 1)
    curve = blocks["curve"]
    if "family" not in curve:
        raise ParseError("[curve] needs a family", 1, 1)
    family, fl, fc = curve["family"]
    family = family.lower()
    field_text = field_override or curve.get("field", ("Q", 0, 0))[0]
    try:
        K = field_from_spec(field_text)
    except (ValueError, KoszulCurveError) as exc:
        where = curve.get("field", (None, None, None))
        raise ParseError(f"bad field {field_text!r}: {exc}", where[1], (where[2] or 0) + 1) from exc
    poly_key = {HYPERELLIPTIC: "f", PLANE: "F"}.get(family)
    poly_text, where = None, (fl, fc)
    if poly_key is not None:
        if poly_key not in curve:
            raise ParseError(f"{family} curves need '{poly_key} = ...'", fl, 1)
        poly_text, pl, pc = curve[poly_key]
        where = (pl, pc)
    elif family not in (RATIONAL,):
        raise ParseError(f"unknown curve family {family!r}; use rational, hyperelliptic or plane", fl, fc + 1)
    model = build_curve(family, poly_text, K, where)
    base = "H" if family == PLANE else "Pinf"
    divs = blocks.get("divisors", {})
    parsed = {}
    texts = {}
    for key, default in (("B", f"0*{base}"), ("L", None)):
        if key in divs:
            t, ln, col = divs[key]
            parsed[key] = parse_divisor(t, model, (ln, col))
            texts[key] = t
        elif default is not None:
            parsed[key] = parse_divisor(default, model)
            texts[key] = default
        else:
            parsed[key] = None
            texts[key] = ""
    job = blocks.get("job", {})
    command = job.get("command", (None,))[0]
    if command is not None and command not in COMMANDS:
        _, ln, col = job["command"]
        raise ParseError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}", ln, col + 1)
    params = {}
    for key in ("p", "q", "q_max"):
        if key in job:
            v, ln, col = job[key]
            try:
                params[key] = int(v)
            except ValueError:
                raise ParseError(f"{key} must be an integer", ln, col + 1) from None
    if "brute" in job:
        params["brute"] = job["brute"][0].lower() in ("1", "true", "yes")
    if "format" in job:
        params["format"] = job["format"][0]
    return JobSpec(
        family=family,
        poly=poly_text,
        field_text=field_text,
        model=model,
        B=parsed["B"],
        L=parsed["L"],
        B_text=texts["B"],
        L_text=texts["L"],
        command=command,
        params=params,
        name=job.get("name", ("",))[0],
    )


__all__ = ["JobSpec", "parse_job", "parse_divisor", "parse_polynomial", "parse_number", "build_curve", "QQ"]
