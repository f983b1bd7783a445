"""The grading group L(p1, p2, p3).

L is the abelian group on x1, x2, x3 subject to p1*x1 = p2*x2 = p3*x3 =: c.
Every element has a unique normal form

    l1*x1 + l2*x2 + l3*x3 + l*c,    0 <= li <= pi - 1,

which is what LElement stores.  Equality, hashing and the partial order
all go through the normal form.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from typing import NamedTuple


@dataclass(frozen=True)
class WeightTriple:
    p1: int
    p2: int
    p3: int

    def __post_init__(self):
        for p in self.p:
            if not isinstance(p, int) or p < 2:
                raise ValueError(f"weights must be integers >= 2, got {self.p}")

    @property
    def p(self) -> tuple[int, int, int]:
        return (self.p1, self.p2, self.p3)

    @property
    def pbar(self) -> int:
        return lcm(*self.p)

    def euler_char(self) -> Fraction:
        """chi = 1/p1 + 1/p2 + 1/p3 - 1."""
        return sum((Fraction(1, p) for p in self.p), Fraction(-1))

    def is_domestic(self) -> bool:
        return self.euler_char() > 0

    @classmethod
    def parse(cls, text: str) -> WeightTriple:
        parts = [s for s in re.split(r"[,\s()]+", text.strip()) if s]
        if len(parts) != 3:
            raise ValueError(f"expected three weights, got {text!r}")
        return cls(*(int(s) for s in parts))

    @classmethod
    def of(cls, w) -> WeightTriple:
        if isinstance(w, WeightTriple):
            return w
        if isinstance(w, str):
            return cls.parse(w)
        return cls(*(int(p) for p in w))

    def to_json(self) -> list[int]:
        return list(self.p)

    def __str__(self):
        return f"({self.p1},{self.p2},{self.p3})"


@dataclass(frozen=True)
class LElement:
    """An element of L(w) in normal form.  Build with normalize()."""
    w: WeightTriple
    l1: int
    l2: int
    l3: int
    l: int

    def __post_init__(self):
        for li, p in zip(self.ls, self.w.p):
            if not 0 <= li < p:
                raise ValueError(f"not in normal form: {self.ls} for weights {self.w}")

    @property
    def ls(self) -> tuple[int, int, int]:
        return (self.l1, self.l2, self.l3)

    @property
    def raw(self) -> tuple[int, int, int, int]:
        return (self.l1, self.l2, self.l3, self.l)

    def _check(self, other: LElement):
        if not isinstance(other, LElement):
            return NotImplemented
        if other.w != self.w:
            raise ValueError(f"weight mismatch: {self.w} vs {other.w}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return normalize(self.w, [a + b for a, b in zip(self.raw, other.raw)])

    def __neg__(self):
        return normalize(self.w, [-a for a in self.raw])

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return normalize(self.w, [a - b for a, b in zip(self.raw, other.raw)])

    def __mul__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return normalize(self.w, [k * a for a in self.raw])

    __rmul__ = __mul__

    def delta(self) -> int:
        return delta(self)

    def is_effective(self) -> bool:
        return self.l >= 0

    def is_zero(self) -> bool:
        return self.raw == (0, 0, 0, 0)

    def to_json(self) -> dict:
        return {"l": list(self.ls), "c": self.l}

    @classmethod
    def from_json(cls, w: WeightTriple, obj) -> LElement:
        if isinstance(obj, dict):
            return normalize(w, [*obj["l"], obj["c"]])
        if isinstance(obj, str):
            return parse_lelement(w, obj)
        return normalize(w, obj)

    def sort_key(self):
        return (self.delta(), self.l, self.ls)

    def __str__(self):
        return format_lelement(self)

    def __repr__(self):
        return f"LElement{self.w}[{self.l1},{self.l2},{self.l3};{self.l}]"


def normalize(w: WeightTriple, coeffs) -> LElement:
    """Normal form of a1*x1 + a2*x2 + a3*x3 + a4*c."""
    a = list(coeffs)
    if len(a) == 3:
        a.append(0)
    if len(a) != 4:
        raise ValueError(f"expected 3 or 4 coefficients, got {coeffs!r}")
    l = a[3]
    ls = []
    for ai, p in zip(a[:3], w.p):
        q, r = divmod(ai, p)
        ls.append(r)
        l += q
    return LElement(w, ls[0], ls[1], ls[2], l)


def add(x: LElement, y: LElement) -> LElement:
    return x + y


def neg(x: LElement) -> LElement:
    return -x


def delta(x: LElement) -> int:
    """Degree map: x_i -> pbar/p_i, c -> pbar."""
    pb = x.w.pbar
    return sum(li * (pb // p) for li, p in zip(x.ls, x.w.p)) + x.l * pb


def is_effective(x: LElement) -> bool:
    """x >= 0, i.e. x is the degree of some monomial.

    In normal form this is l >= 0; the test-suite confirms it against
    a brute-force monomial search.
    """
    return x.l >= 0


def leq(x: LElement, y: LElement) -> bool:
    return is_effective(y - x)


def dim_T(x: LElement) -> int:
    """Number of monomials of degree x in k[x1,x2,x3]."""
    return comb(x.l + 2, 2) if x.l >= 0 else 0


def dim_S(x: LElement) -> int:
    """dim of the degree-x piece of S = T/(f); f has degree c."""
    return dim_T(x) - (comb(x.l + 1, 2) if x.l >= 1 else 0)


def monomial_basis(x: LElement) -> list[tuple[int, int, int]]:
    """Exponent vectors of all monomials of degree x, sorted lexicographically.

    A monomial x1^a1 x2^a2 x3^a3 has degree x iff ai = li + pi*ki with
    k1 + k2 + k3 = l and all ki >= 0.
    """
    if x.l < 0:
        return []
    out = []
    for k1 in range(x.l + 1):
        for k2 in range(x.l - k1 + 1):
            k3 = x.l - k1 - k2
            out.append(tuple(li + p * k for li, p, k in zip(x.ls, x.w.p, (k1, k2, k3))))
    out.sort()
    return out


def small_monomial(x: LElement) -> tuple[int, int, int] | None:
    """The spanning monomial of S_x when x > 0 and dim S_x = 1 with l = 0."""
    if x.l == 0 and x.ls != (0, 0, 0):
        return x.ls
    return None


def ldegree(w: WeightTriple, exp) -> LElement:
    """Degree of the monomial with exponent vector exp."""
    return normalize(w, [*exp, 0])


class Constants(NamedTuple):
    c: LElement
    omega: LElement
    dominant: LElement
    x: tuple[LElement, LElement, LElement]
    zero: LElement


def constants(w: WeightTriple) -> Constants:
    w = WeightTriple.of(w)
    zero = normalize(w, (0, 0, 0, 0))
    c = normalize(w, (0, 0, 0, 1))
    omega = normalize(w, (-1, -1, -1, 1))
    xs = tuple(normalize(w, e) for e in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)))
    return Constants(c, omega, c + 2 * omega, xs, zero)


# ---- Smith normal form ----------------------------------------------------

def smith_invariants(rows: list[list[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form of an integer matrix."""
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < m and t < n:
        # pivot = smallest nonzero |entry| in the remaining block
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    a[i] = [u - q * v for u, v in zip(a[i], a[t])]
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for r in a:
                        r[j] -= q * r[t]
                if a[t][j]:
                    dirty = True
            if not dirty:
                # make the pivot divide the rest of the block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                a[t] = [u + v for u, v in zip(a[t], a[bad[0]])]
                continue
            # move the smallest entry of row/col t into the pivot slot
            best = (t, t)
            for i in range(t, m):
                if a[i][t] and abs(a[i][t]) < abs(a[best[0]][best[1]]):
                    best = (i, t)
            for j in range(t, n):
                if a[t][j] and abs(a[t][j]) < abs(a[best[0]][best[1]]):
                    best = (t, j)
            i, j = best
            a[t], a[i] = a[i], a[t]
            for r in a:
                r[t], r[j] = r[j], r[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def relation_matrix(w: WeightTriple) -> list[list[int]]:
    p1, p2, p3 = w.p
    return [[p1, -p2, 0], [0, p2, -p3]]


def group_structure(w: WeightTriple) -> tuple[int, list[int]]:
    """(free rank, torsion invariants) of L(w) via Smith normal form."""
    w = WeightTriple.of(w)
    d = smith_invariants(relation_matrix(w))
    return 3 - len(d), [x for x in d if x > 1]


def torsion_order(w: WeightTriple) -> int:
    out = 1
    for d in group_structure(w)[1]:
        out *= d
    return out


def omega_index(w: WeightTriple) -> int:
    """Order of L / Z*omega, i.e. the number of tau-orbits of line bundles."""
    w = WeightTriple.of(w)
    om = constants(w).omega
    # omega = 0 as an extra relation, written in the generators x1, x2, x3
    rel = [om.l1 + om.l * w.p1, om.l2, om.l3]
    d = smith_invariants(relation_matrix(w) + [rel])
    if len(d) < 3:
        raise ValueError(f"omega has finite order in L{w}")
    out = 1
    for x in d:
        out *= x
    return out


def halves(x: LElement) -> list[LElement]:
    """All y with 2y = x."""
    w = x.w
    out = []
    for l1 in range(w.p1):
        for l2 in range(w.p2):
            for l3 in range(w.p3):
                base = normalize(w, (2 * l1, 2 * l2, 2 * l3, 0))
                if base.ls != x.ls or (x.l - base.l) % 2:
                    continue
                out.append(LElement(w, l1, l2, l3, (x.l - base.l) // 2))
    return out


# ---- text format ------------------------------------------------------------

_TOKEN = re.compile(r"\s*([+-]?)\s*(\d*)\s*\*?\s*(x1|x2|x3|omega|c|w)?\s*")


def parse_lelement(w: WeightTriple, text: str) -> LElement:
    """Parse expressions like 'x2-2x3+w', '2c', '-x1+3*w', '0'."""
    w = WeightTriple.of(w)
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty L-element")
    k = constants(w)
    if s == "0":
        return k.zero
    gens = {"x1": k.x[0], "x2": k.x[1], "x3": k.x[2], "c": k.c, "w": k.omega, "omega": k.omega}
    total = k.zero
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse L-element {text!r} at column {pos + 1}")
        sign, num, gen = m.groups()
        if not num and not gen:
            raise ValueError(f"cannot parse L-element {text!r} at column {pos + 1}")
        coef = int(num) if num else 1
        if sign == "-":
            coef = -coef
        if gen is None:
            raise ValueError(f"bare integer {coef} in L-element {text!r}")
        total = total + coef * gens[gen]
        pos = m.end()
    return total


def format_lelement(x: LElement) -> str:
    parts = []
    for name, v in (("x1", x.l1), ("x2", x.l2), ("x3", x.l3), ("c", x.l)):
        if v == 0:
            continue
        coef = "" if abs(v) == 1 else str(abs(v))
        parts.append(("-" if v < 0 else "+") + coef + name)
    if not parts:
        return "0"
    s = "".join(parts)
    return s[1:] if s[0] == "+" else s
