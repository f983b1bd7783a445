"""The Auslander-Reiten quiver Z Delta of vector bundles for domestic weights.

A vertex (orbit, k) stands for tau^k of the orbit representative, i.e. the
representative twisted by k*omega.  Representatives of bundle orbits come
from the cover tables, line orbits from data/quivers.json.  The degree shift
by x in L is computed by bundle arithmetic: a line moves within L, a bundle
of higher rank is found again by its projective cover.

Columns place the quiver in the plane: every arrow goes one column to the
right and tau moves two columns to the left, so a mesh unit is two columns.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache

from .covers import (
    CoverSpec,
    DomesticBundleId,
    bundle_stats,
    domestic_cover,
    load_table,
)
from .gmf import MatrixFactorization, trivial_mf
from .lgroup import LElement, WeightTriple, constants, delta, parse_lelement
from .poly import QQ, Field
from .resources import load_json


class QuiverError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ARVertex:
    orbit: str
    tau: int = 0

    @property
    def id(self) -> str:
        return f"{self.orbit}:{self.tau}"

    def to_json(self) -> dict:
        return {"orbit": self.orbit, "tau": self.tau}

    @classmethod
    def from_json(cls, obj) -> ARVertex:
        if isinstance(obj, str):
            orbit, _, k = obj.rpartition(":")
            return cls(orbit, int(k))
        return cls(obj["orbit"], int(obj["tau"]))

    def __str__(self):
        return self.id


def tau(v: ARVertex) -> ARVertex:
    return ARVertex(v.orbit, v.tau + 1)


def tau_inv(v: ARVertex) -> ARVertex:
    return ARVertex(v.orbit, v.tau - 1)


@dataclass(frozen=True)
class Orbit:
    name: str
    rank: int
    twist: LElement | None = None       # lines: the representative O(twist)


def _data() -> dict:
    return load_json("quivers.json")


def _type_key(w: WeightTriple) -> str:
    return "2,2,n" if w.p[:2] == (2, 2) else ",".join(map(str, w.p))


def _fill(t: str, n: int | None, i: int) -> str:
    if n is None:
        return t
    return (t.replace("{i+1}", str(i + 1)).replace("{n-2-i}", str(n - 2 - i))
            .replace("{n-2}", str(n - 2)).replace("{i}", str(i)))


def _expand(pairs, n: int | None) -> list[tuple[str, str]]:
    """Instantiate the (2,2,n) templates E{i}, E{i+1}, E{n-2}, E{n-2-i}."""
    out = []
    for a, b in pairs:
        if "{i" in a + b or "-i}" in a + b:
            top = n - 2 if "{i+1}" in a + b else n - 1
            out += [(_fill(a, n, i), _fill(b, n, i)) for i in range(top)]
        else:
            out.append((_fill(a, n, 0), _fill(b, n, 0)))
    return out


class ARQuiver:
    """Z Delta for one domestic weight triple (sorted, of type (2,a,b))."""

    def __init__(self, w):
        w = WeightTriple.of(w)
        if not w.is_domestic() or w.p != tuple(sorted(w.p)):
            raise QuiverError(f"the quiver needs a sorted domestic weight triple, got {w}")
        self.w = w
        k = constants(w)
        self.omega = k.omega
        self.d = -delta(k.omega)        # slope step of tau; positive
        raw = _data()["types"][_type_key(w)]
        n = w.p3 if w.p[:2] == (2, 2) else None
        self.orbits: dict[str, Orbit] = {}
        for name, text in raw["lines"].items():
            self.orbits[name] = Orbit(name, 1, parse_lelement(w, text))
        table = load_table(w)
        for name, row in table.items():
            self.orbits[name] = Orbit(name, row.rank)
        self.edges = _expand(raw["edges"], n)
        refl = _expand(raw["reflection"], n)
        self.reflection = {o: o for o in self.orbits}
        for a, b in refl:
            self.reflection[a], self.reflection[b] = b, a
        self._neighbours = {o: [] for o in self.orbits}
        for a, b in self.edges:
            if a not in self.orbits or b not in self.orbits:
                raise QuiverError(f"edge {a}-{b} names an unknown orbit")
            self._neighbours[a].append(b)
            self._neighbours[b].append(a)
        self._covers = {o: domestic_cover(DomesticBundleId(w, o)) for o in table}
        self._deg0 = {o: self._degree0(o) for o in self.orbits}
        self._arrow_offset = {}
        for a, b in self.edges:
            self._arrow_offset[a, b] = self._offset(a, b)
            self._arrow_offset[b, a] = self._offset(b, a)
        self.column_offset = self._columns()
        self._gen: dict[str, dict] = {}

    # ---- basic data --------------------------------------------------------

    def __repr__(self):
        return f"ARQuiver{self.w}"

    @property
    def orbit_names(self) -> list[str]:
        return list(self.orbits)

    def rank(self, v: ARVertex | str) -> int:
        o = v.orbit if isinstance(v, ARVertex) else v
        if o not in self.orbits:
            raise QuiverError(f"unknown orbit {o!r} for weights {self.w}; "
                              f"valid: {', '.join(self.orbits)}")
        return self.orbits[o].rank

    def neighbours(self, orbit: str) -> list[str]:
        return list(self._neighbours[orbit])

    def _degree0(self, o: str) -> int:
        orb = self.orbits[o]
        if orb.twist is not None:
            return delta(orb.twist)
        return bundle_stats(self._covers[o]).degree

    def degree(self, v: ARVertex) -> int:
        # deg E(k w) = deg E + k rk(E) delta(w)
        return self._deg0[v.orbit] - v.tau * self.rank(v) * self.d

    def slope(self, v: ARVertex) -> Fraction:
        return Fraction(self.degree(v), self.rank(v))

    def stats(self, v: ARVertex) -> dict:
        return {"rank": self.rank(v), "degree": self.degree(v), "slope": self.slope(v)}

    def line_twist(self, v: ARVertex) -> LElement:
        orb = self.orbits[v.orbit]
        if orb.twist is None:
            raise QuiverError(f"{v} is not a line bundle")
        return orb.twist + v.tau * self.omega

    def bundle_id(self, v: ARVertex) -> DomesticBundleId:
        if self.rank(v) == 1:
            raise QuiverError(f"{v} is a line bundle; use line_twist")
        return DomesticBundleId(self.w, v.orbit, v.tau)

    def cover(self, v: ARVertex) -> CoverSpec:
        if self.rank(v) == 1:
            return CoverSpec((self.line_twist(v),), 1)
        return self._covers[v.orbit].shifted(v.tau * self.omega)

    # ---- locating bundles --------------------------------------------------

    def _omega_multiple(self, y: LElement) -> int | None:
        """k with y = k*omega, or None."""
        dy = delta(y)
        if dy % self.d:
            return None
        k = -dy // self.d
        return k if k * self.omega == y else None

    def line_position(self, x: LElement) -> ARVertex:
        """The vertex of the line bundle O(x)."""
        for o, orb in self.orbits.items():
            if orb.twist is not None:
                k = self._omega_multiple(x - orb.twist)
                if k is not None:
                    return ARVertex(o, k)
        raise QuiverError(f"no line orbit contains O({x})")

    def locate(self, cover: CoverSpec) -> ARVertex:
        """The vertex of rank >= 2 whose projective cover is `cover`."""
        first = cover.summands[0]
        for o, base in self._covers.items():
            if base.rank != cover.rank:
                continue
            for s in set(base.summands):
                k = self._omega_multiple(first - s)
                if k is not None and base.shifted(k * self.omega) == cover:
                    return ARVertex(o, k)
        raise QuiverError(f"no indecomposable of rank {cover.rank} has cover {cover}")

    def shift_direct(self, v: ARVertex, x: LElement) -> ARVertex:
        """The vertex of E(x), where E sits at v."""
        if self.rank(v) == 1:
            return self.line_position(self.line_twist(v) + x)
        return self.locate(self.cover(v).shifted(x))

    # ---- shift action by normal form ---------------------------------------

    def generator_table(self, g: str) -> dict[str, tuple[str, int]]:
        """orbit -> (orbit', t): shifting the representative by g lands at (orbit', t)."""
        if g in self._gen:
            return self._gen[g]
        k = constants(self.w)
        gen = {"x1": k.x[0], "x2": k.x[1], "x3": k.x[2], "c": k.c}[g]
        out = {}
        for o in self.orbits:
            img = self.shift_direct(ARVertex(o, 0), gen)
            out[o] = (img.orbit, img.tau)
        self._gen[g] = out
        return out

    def _apply(self, v: ARVertex, g: str, times: int) -> ARVertex:
        table = self.generator_table(g)
        if times < 0:
            inv = {o2: (o, -t) for o, (o2, t) in table.items()}
            table, times = inv, -times
        for _ in range(times):
            o, t = table[v.orbit]
            v = ARVertex(o, v.tau + t)
        return v

    def shift(self, v: ARVertex, x: LElement) -> ARVertex:
        """E(x) for E at v, by composing the generator actions along the
        normal form x = l1 x1 + l2 x2 + l3 x3 + l c."""
        self.rank(v)
        for g, times in zip(("x1", "x2", "x3", "c"), x.raw):
            v = self._apply(v, g, times)
        return v

    # ---- arrows and the plane layout ---------------------------------------

    def _offset(self, a: str, b: str) -> int:
        """e with (a, k) -> (b, k + e) an arrow: slope(a,k) < slope(b,k+e) < slope(a,k-1)."""
        sa = Fraction(self._deg0[a], self.orbits[a].rank)
        sb = Fraction(self._deg0[b], self.orbits[b].rank)
        q = (sb - sa) / self.d
        if q.denominator == 1:
            raise QuiverError(f"orbits {a} and {b} have vertices of equal slope")
        return q.numerator // q.denominator

    def arrows_from(self, v: ARVertex) -> list[ARVertex]:
        return [ARVertex(b, v.tau + self._arrow_offset[v.orbit, b])
                for b in self._neighbours[v.orbit]]

    def arrows_to(self, v: ARVertex) -> list[ARVertex]:
        return [ARVertex(b, v.tau - self._arrow_offset[b, v.orbit])
                for b in self._neighbours[v.orbit]]

    def _columns(self) -> dict[str, int]:
        root = next(iter(self.orbits))
        col = {root: 0}
        todo = [root]
        while todo:
            a = todo.pop()
            for b in self._neighbours[a]:
                c = col[a] + 1 + 2 * self._arrow_offset[a, b]
                if b in col:
                    if col[b] != c:
                        raise QuiverError(f"inconsistent columns at {b}")
                    continue
                col[b] = c
                todo.append(b)
        if len(col) != len(self.orbits):
            raise QuiverError("the orbit graph is disconnected")
        lo = min(col.values())
        return {o: c - lo for o, c in col.items()}

    def column(self, v: ARVertex) -> int:
        return self.column_offset[v.orbit] - 2 * v.tau

    def at_column(self, orbit: str, col: int) -> ARVertex | None:
        """The vertex of the orbit in that column, if the parity fits."""
        d = self.column_offset[orbit] - col
        return ARVertex(orbit, d // 2) if d % 2 == 0 else None

    def reflect(self, v: ARVertex) -> ARVertex:
        """Reflection on the central axis; a vertex goes to the partner orbit in
        the same column, or one column to the right when the parity forces it."""
        o = self.reflection[v.orbit]
        c = self.column(v)
        return self.at_column(o, c) or self.at_column(o, c + 1)

    def glide(self, v: ARVertex, half_units: int) -> ARVertex:
        """Reflection followed by a translation of half_units columns."""
        o = self.reflection[v.orbit]
        u = self.at_column(o, self.column(v) + half_units)
        if u is None:
            raise QuiverError(f"no vertex of {o} at column {self.column(v) + half_units}")
        return u

    # ---- factorizations ----------------------------------------------------

    def mf_for_vertex(self, v: ARVertex, field: Field = QQ,
                      alternate: bool = False) -> tuple[MatrixFactorization, LElement]:
        """The factorization of the bundle at v and the shift of its labels
        against the orbit representative.  Lines give the trivial (f, 1)."""
        from .frame import mf_domestic
        if self.rank(v) == 1:
            y = self.line_twist(v)
            return trivial_mf(self.w, field, y), y
        return mf_domestic(self.bundle_id(v), field, alternate), v.tau * self.omega

    # ---- export ------------------------------------------------------------

    def vertices(self, window) -> list[ARVertex]:
        lo, hi = _window(window)
        return [ARVertex(o, k) for k in range(lo, hi) for o in self.orbits]

    def export(self, window, fmt: str = "json"):
        if fmt == "json":
            return self.to_json(window)
        if fmt == "dot":
            return self.to_dot(window)
        raise QuiverError(f"unknown quiver format {fmt!r}; use json or dot")

    def _vertex_json(self, v: ARVertex) -> dict:
        cov = self.cover(v)
        return {"id": v.id, "orbit": v.orbit, "tau": v.tau, "rank": self.rank(v),
                "degree": self.degree(v), "slope": str(self.slope(v)),
                "column": self.column(v), "cover": [str(s) for s in cov.sorted()]}

    def _arrows(self, vs: list[ARVertex]) -> list[tuple[ARVertex, ARVertex]]:
        have = set(vs)
        return [(v, u) for v in vs for u in self.arrows_from(v) if u in have]

    def to_json(self, window) -> dict:
        vs = self.vertices(window)
        return {"weights": self.w.to_json(), "window": list(_window(window)),
                "orbits": [{"name": o, "rank": orb.rank, "column": self.column_offset[o]}
                           for o, orb in self.orbits.items()],
                "vertices": [self._vertex_json(v) for v in vs],
                "arrows": [[a.id, b.id] for a, b in self._arrows(vs)]}

    def to_dot(self, window) -> str:
        vs = self.vertices(window)
        rows = {o: i for i, o in enumerate(sorted(self.orbits, key=lambda o: (
            self.orbits[o].rank, o)))}
        out = [f'digraph "AR{self.w}" {{', "  node [shape=plaintext];"]
        for v in vs:
            label = f"{v.orbit}@{v.tau}\\nrk {self.rank(v)}  mu {self.slope(v)}"
            out.append(f'  "{v.id}" [label="{label}", pos="{self.column(v)},{rows[v.orbit]}!"];')
        for a, b in self._arrows(vs):
            out.append(f'  "{a.id}" -> "{b.id}";')
        out.append("}")
        return "\n".join(out) + "\n"


def _window(window) -> tuple[int, int]:
    if isinstance(window, int):
        return (0, max(window, 0))
    lo, hi = window
    return (lo, max(lo, hi))


@cache
def quiver(w) -> ARQuiver:
    return ARQuiver(WeightTriple.of(w))


def export_quiver(w, window, fmt: str = "json"):
    return quiver(WeightTriple.of(w)).export(window, fmt)


def vertex_from_json(obj) -> ARVertex:
    return ARVertex.from_json(obj)
