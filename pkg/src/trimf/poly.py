"""Sparse polynomials in x1, x2, x3 over Q or F_p.

A Field object is the tag of a scalar: over Q scalars are Fractions,
over F_p they are ints in range(p).  Polynomials keep a dict from exponent
triples to nonzero scalars.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .lgroup import LElement, WeightTriple, constants, ldegree


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


class Field:
    """Q (p = 0) or the prime field F_p."""

    def __init__(self, p: int = 0):
        if p and not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    @property
    def char(self) -> int:
        return self.p

    @property
    def name(self) -> str:
        return f"F{self.p}" if self.p else "Q"

    @classmethod
    def parse(cls, text: str) -> Field:
        t = text.strip().lower()
        if t in ("q", "qq", "0"):
            return QQ
        m = re.fullmatch(r"(?:f|gf|fp)?_?(\d+)", t)
        if not m:
            raise ValueError(f"unknown field {text!r}; use q, f2, f3, f5, f7, ...")
        return cls(int(m.group(1)))

    def __call__(self, v):
        if isinstance(v, str):
            v = Fraction(v)
        if self.p:
            v = Fraction(v)
            if v.denominator % self.p == 0:
                raise ZeroDivisionError(f"{v} has no image in {self.name}")
            return v.numerator * pow(v.denominator, -1, self.p) % self.p
        return Fraction(v)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p) if self.p else 1 / a

    def fmt(self, a) -> str:
        return str(a)

    def signed(self, a) -> int | Fraction:
        """Symmetric representative; used for printing and reduction checks."""
        if self.p and a > self.p // 2:
            return a - self.p
        return a

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"Field({self.name})"


QQ = Field(0)
FIELDS = {name: Field.parse(name) for name in ("q", "f2", "f3", "f5", "f7")}


class Poly:
    """Sparse polynomial with an optional declared L-degree."""

    __slots__ = ("degree", "field", "terms")

    def __init__(self, field: Field, terms=None, degree: LElement | None = None):
        self.field = field
        self.terms = {}
        for e, c in (terms or {}).items():
            c = field(c)
            if c:
                self.terms[tuple(e)] = c
        self.degree = degree
        if degree is not None:
            for e in self.terms:
                if ldegree(degree.w, e) != degree:
                    raise ValueError(f"monomial {e} is not of degree {degree}")

    # -- constructors --
    @classmethod
    def zero(cls, field: Field) -> Poly:
        return cls(field)

    @classmethod
    def const(cls, field: Field, c=1) -> Poly:
        return cls(field, {(0, 0, 0): field(c)})

    @classmethod
    def monomial(cls, field: Field, exp, c=1) -> Poly:
        return cls(field, {tuple(exp): field(c)})

    # -- queries --
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def constant_term(self):
        return self.terms.get((0, 0, 0), self.field.zero)

    def is_homogeneous(self, d: LElement) -> bool:
        return all(ldegree(d.w, e) == d for e in self.terms)

    def ldegrees(self, w: WeightTriple) -> set[LElement]:
        return {ldegree(w, e) for e in self.terms}

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    # -- arithmetic --
    def _same(self, other: Poly):
        if not isinstance(other, Poly):
            raise TypeError(f"expected Poly, got {type(other).__name__}")
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field.name} vs {other.field.name}")

    def __add__(self, other: Poly) -> Poly:
        self._same(other)
        F = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = F.add(out.get(e, F.zero), c)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        deg = self.degree if self.degree == other.degree else None
        return Poly._raw(F, out, deg)

    def __neg__(self) -> Poly:
        F = self.field
        return Poly._raw(F, {e: F.neg(c) for e, c in self.terms.items()}, self.degree)

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other) -> Poly:
        F = self.field
        if not isinstance(other, Poly):
            c = F(other)
            if not c:
                return Poly(F)
            return Poly._raw(F, {e: F.mul(a, c) for e, a in self.terms.items()}, self.degree)
        self._same(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                s = F.add(out.get(e, F.zero), F.mul(c1, c2))
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        deg = None
        if self.degree is not None and other.degree is not None:
            deg = self.degree + other.degree
        return Poly._raw(F, out, deg)

    __rmul__ = __mul__

    @classmethod
    def _raw(cls, field, terms, degree=None) -> Poly:
        p = cls.__new__(cls)
        p.field = field
        p.terms = terms
        p.degree = degree
        return p

    def with_degree(self, d: LElement) -> Poly:
        return Poly(self.field, self.terms, d)

    def to_field(self, F: Field) -> Poly:
        """Image under Q -> F_p, or the lift F_p -> Q by symmetric residues."""
        if F == self.field:
            return self
        if self.field.p:
            if F.p:
                raise ValueError("can only reduce from Q")
            q = self.field.p
            return Poly(F, {e: F(c - q if 2 * c > q else c) for e, c in self.terms.items()},
                        self.degree)
        return Poly(F, {e: F(c) for e, c in self.terms.items()}, self.degree)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, frozenset(self.terms.items())))

    # -- io --
    def sorted_terms(self):
        return sorted(self.terms.items())

    def to_json(self) -> list[dict]:
        return [{"coef": str(c), "exp": list(e)} for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, field: Field, obj) -> Poly:
        if isinstance(obj, str):
            return parse_poly(field, obj)
        return cls(field, {tuple(t["exp"]): field(t["coef"]) for t in obj})

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly[{self.field.name}]({format_poly(self)})"


def f_of(w: WeightTriple, field: Field = QQ) -> Poly:
    """The triangle singularity x1^p1 + x2^p2 + x3^p3, of degree c."""
    w = WeightTriple.of(w)
    p1, p2, p3 = w.p
    return Poly(field, {(p1, 0, 0): 1, (0, p2, 0): 1, (0, 0, p3): 1}, constants(w).c)


# ---- text format ------------------------------------------------------------
# Accepts both x,y,z and x1,x2,x3 spellings, e.g. "-y*z^3 + 2x1^2".

_VARS = {"x": 0, "y": 1, "z": 2, "x1": 0, "x2": 1, "x3": 2}
_TERM = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*((?:(?:x[123]|[xyz])(?:\^\d+)?\s*\*?\s*)*)")
_FACTOR = re.compile(r"(x[123]|[xyz])(?:\^(\d+))?")


def parse_poly(field: Field, text: str) -> Poly:
    s = text.replace(" ", "")
    if s in ("", "0"):
        return Poly(field)
    terms: dict = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial {text!r} at column {pos + 1}")
        sign, coef, factors = m.groups()
        if not coef and not factors:
            raise ValueError(f"cannot parse polynomial {text!r} at column {pos + 1}")
        c = Fraction(coef) if coef else Fraction(1)
        if sign == "-":
            c = -c
        exp = [0, 0, 0]
        for fm in _FACTOR.finditer(factors or ""):
            exp[_VARS[fm.group(1)]] += int(fm.group(2) or 1)
        e = tuple(exp)
        terms[e] = terms.get(e, 0) + c
        pos = m.end()
    return Poly(field, {e: field(c) for e, c in terms.items() if c})


def format_poly(p: Poly, names=("x", "y", "z")) -> str:
    if not p.terms:
        return "0"
    out = []
    for e, c in sorted(p.terms.items(), reverse=True):
        c = p.field.signed(c)
        mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
        neg = c < 0
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            body = str(a)
        out.append(("-" if neg else "+") + body)
    s = "".join(out)
    return s[1:] if s[0] == "+" else s
