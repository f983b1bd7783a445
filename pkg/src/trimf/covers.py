"""Projective covers and injective hulls of vector bundles, as multisets of twists.

For weights (2,a,b) a bundle E of rank r has a cover of 2r line bundles and
sits in 0 -> E(-x1) -> pc(E) -> E -> 0, so ih(E) = pc(E)(x1).  Covers of
extension bundles have a closed form; the domestic tables are shipped as
data (see data/covers_*.json) together with their recorded errata.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache
from itertools import product

from .lgroup import (
    LElement,
    WeightTriple,
    constants,
    delta,
    halves,
    is_effective,
    normalize,
    parse_lelement,
)
from .resources import load_json


class InvalidBundle(ValueError):
    pass


# ---- cover multisets ------------------------------------------------------------

@dataclass(frozen=True)
class CoverSpec:
    """A multiset of line-bundle twists and the rank of the bundle it covers."""
    summands: tuple[LElement, ...]
    rank: int

    def __post_init__(self):
        # a line bundle is projective and is its own cover
        n = len(self.summands)
        if n and self.summands[0].w.p1 == 2 and n != 2 * self.rank and (n, self.rank) != (1, 1):
            raise ValueError(f"a cover of a rank {self.rank} bundle has {2 * self.rank} "
                             f"summands for weights (2,a,b), got {len(self.summands)}")

    @classmethod
    def of(cls, summands, rank: int | None = None) -> CoverSpec:
        s = tuple(summands)
        if rank is None:
            if len(s) % 2:
                raise ValueError(f"odd cover size {len(s)}; pass the rank explicitly")
            rank = len(s) // 2
        return cls(s, rank)

    @property
    def w(self) -> WeightTriple:
        return self.summands[0].w

    def __len__(self):
        return len(self.summands)

    def __iter__(self):
        return iter(self.summands)

    def key(self) -> tuple:
        """Canonical form of the multiset."""
        return tuple(sorted(s.raw for s in self.summands))

    def shifted(self, y: LElement) -> CoverSpec:
        return CoverSpec(tuple(s + y for s in self.summands), self.rank)

    def __eq__(self, other):
        if not isinstance(other, CoverSpec):
            return NotImplemented
        return self.rank == other.rank and self.key() == other.key()

    def __hash__(self):
        return hash((self.rank, self.key()))

    def sorted(self) -> list[LElement]:
        return sorted(self.summands, key=LElement.sort_key)

    def to_json(self) -> dict:
        return {"rank": self.rank, "summands": [s.to_json() for s in self.summands]}

    @classmethod
    def from_json(cls, w: WeightTriple, obj: dict) -> CoverSpec:
        return cls(tuple(LElement.from_json(w, s) for s in obj["summands"]), obj["rank"])

    def __str__(self):
        return "{" + ", ".join(str(s) for s in self.summands) + "}"


def covers_isomorphic(a: CoverSpec, b: CoverSpec) -> bool:
    return a.key() == b.key()


def horseshoe(pcX: CoverSpec, pcY: CoverSpec) -> CoverSpec:
    """Cover of the middle term of a sequence 0 -> X -> E -> Y -> 0 that
    satisfies the horseshoe conditions: the union of both covers."""
    return CoverSpec(pcX.summands + pcY.summands, pcX.rank + pcY.rank)


def multiplicity_profile(cover) -> dict[LElement, int]:
    return dict(Counter(cover))


def hom_orthogonal(twists) -> bool:
    """No nonzero maps between distinct summands: no difference is effective."""
    ts = list(twists)
    return all(i == j or not is_effective(b - a)
               for i, a in enumerate(ts) for j, b in enumerate(ts))


# ---- extension bundles ----------------------------------------------------------

def _check_x(x: LElement):
    dom = constants(x.w).dominant
    if not (is_effective(x) and is_effective(dom - x)):
        raise InvalidBundle(f"need 0 <= x <= dominant element, got x = {x}")


@dataclass(frozen=True)
class ExtensionBundle:
    """Middle term of the nonsplit sequence 0 -> L(w) -> E -> L(x) -> 0."""
    L: LElement
    x: LElement

    def __post_init__(self):
        _check_x(self.x)

    def shifted(self, y: LElement) -> ExtensionBundle:
        return ExtensionBundle(self.L + y, self.x)

    def cover(self) -> CoverSpec:
        return ext_cover(self.L, self.x)

    def hull(self) -> CoverSpec:
        return ext_hull(self.L, self.x)

    def det(self) -> LElement:
        return 2 * self.L + constants(self.L.w).omega + self.x


def ext_cover(L: LElement, x: LElement) -> CoverSpec:
    _check_x(x)
    k = constants(L.w)
    return CoverSpec((L + k.omega,) + tuple(L + x - (1 + li) * xi for li, xi in zip(x.ls, k.x)), 2)


def ext_hull(L: LElement, x: LElement) -> CoverSpec:
    _check_x(x)
    k = constants(L.w)
    return CoverSpec((L + x,) + tuple(L + (1 + li) * xi + k.omega for li, xi in zip(x.ls, k.x)), 2)


def extension_range(w: WeightTriple) -> list[LElement]:
    """All x with 0 <= x <= dominant element: l_i <= p_i - 2 and l = 0."""
    w = WeightTriple.of(w)
    return [normalize(w, (a, b, c, 0))
            for a, b, c in product(range(w.p1 - 1), range(w.p2 - 1), range(w.p3 - 1))]


def find_extension_data(cover: CoverSpec) -> list[ExtensionBundle]:
    """All (L, x) whose extension bundle has the given cover."""
    if cover.rank != 2:
        return []
    om = constants(cover.w).omega
    out = []
    for s in sorted(set(cover.summands), key=LElement.sort_key):
        L = s - om
        for x in extension_range(cover.w):
            if ext_cover(L, x) == cover:
                out.append(ExtensionBundle(L, x))
    return out


# ---- degree bookkeeping ---------------------------------------------------------

@dataclass(frozen=True)
class BundleStats:
    rank: int
    degree: int
    slope: Fraction
    det: LElement | None
    det_candidates: tuple[LElement, ...] = field(default=())

    def to_json(self) -> dict:
        return {"rank": self.rank, "degree": self.degree, "slope": str(self.slope),
                "det": None if self.det is None else self.det.to_json(),
                "det_candidates": [d.to_json() for d in self.det_candidates]}


def bundle_stats(cover: CoverSpec, hint: LElement | None = None) -> BundleStats:
    """Rank, det, degree and slope of E from pc(E), weights (2,a,b).

    From 0 -> E(-x1) -> pc(E) -> E -> 0 we get det pc(E) = 2 det E - rk(E) x1,
    so 2 det E = sum(cover) + rk x1.  With 2-torsion in L the halving is not
    unique; a hint (from constructive data) then picks the value, and without
    one det is left as None.
    """
    w = cover.w
    if w.p1 != 2:
        raise ValueError(f"cover bookkeeping needs weights (2,a,b), got {w}")
    if len(cover) != 2 * cover.rank:
        raise ValueError(f"cover of size {len(cover)} does not fit rank {cover.rank}")
    k = constants(w)
    total = k.zero
    for s in cover:
        total = total + s
    two_det = total + cover.rank * k.x[0]
    cands = tuple(sorted(halves(two_det), key=LElement.sort_key))
    if not cands:
        raise ValueError(f"sum of cover {two_det} is not divisible by 2 in L")
    deg = delta(two_det) // 2
    det = None
    if len(cands) == 1:
        det = cands[0]
    elif hint is not None:
        if hint not in cands:
            raise ValueError(f"hint {hint} does not satisfy 2 det = {two_det}")
        det = hint
    return BundleStats(cover.rank, deg, Fraction(deg, cover.rank), det, cands)


# ---- domestic tables ------------------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    name: str
    rank: int
    printed: tuple[LElement, ...]
    cover: tuple[LElement, ...]
    tau: int = 0                    # the printed row is for tau^k of the named bundle
    errata: tuple = ()


def _data(name: str) -> dict:
    return load_json(name)


def table_file(w: WeightTriple) -> str:
    w = WeightTriple.of(w)
    if not w.is_domestic() or w.p != tuple(sorted(w.p)):
        raise InvalidBundle(f"no cover table for weights {w}; use a sorted domestic triple")
    if w.p[:2] == (2, 2):
        return "covers_2_2_n.json"
    return "covers_{}_{}_{}.json".format(*w.p)


@cache
def load_table(w: WeightTriple) -> dict[str, TableRow]:
    """Orbit representatives and their covers, errata applied."""
    w = WeightTriple.of(w)
    raw = _data(table_file(w))
    rows = raw["rows"] if "rows" in raw else _expand_family(w, raw["family"])
    out = {}
    for r in rows:
        printed = tuple(parse_lelement(w, s) for s in r["cover"])
        fixed = list(r["cover"])
        for e in r.get("errata", ()):
            fixed[e["index"]] = e["corrected"]
        out[r["name"]] = TableRow(r["name"], r["rank"], printed,
                                  tuple(parse_lelement(w, s) for s in fixed),
                                  r.get("tau", 0), tuple(r.get("errata", ())))
    return out


def _expand_family(w: WeightTriple, fam: dict) -> list[dict]:
    n = w.p3
    return [{"name": fam["name"].format(i=i), "rank": fam["rank"],
             "cover": [s.format(i=i) for s in fam["cover"]]} for i in range(n - 1)]


def orbit_names(w: WeightTriple) -> list[str]:
    """Representatives of the tau-orbits of indecomposables of rank >= 2."""
    return list(load_table(WeightTriple.of(w)))


_ID = re.compile(r"^\s*([A-Za-z]\w*?)\s*(?:@\s*(?:tau\s*=\s*)?(-?\d+))?\s*(?:\+\s*(.+))?$")


@dataclass(frozen=True)
class DomesticBundleId:
    """tau^k of a named orbit representative, further twisted by `shift`."""
    w: WeightTriple
    name: str
    tau: int = 0
    shift: LElement | None = None

    def __post_init__(self):
        names = orbit_names(self.w)
        if self.name not in names:
            raise InvalidBundle(f"unknown bundle {self.name!r} for weights {self.w}; "
                                f"valid names: {', '.join(names)}")

    @property
    def rank(self) -> int:
        return load_table(self.w)[self.name].rank

    def total_shift(self) -> LElement:
        k = constants(self.w)
        y = self.tau * k.omega
        return y + self.shift if self.shift is not None else y

    @classmethod
    def parse(cls, w: WeightTriple, text: str) -> DomesticBundleId:
        """'E6', 'E2@tau=3', 'E3@-1+x1-2x3'."""
        w = WeightTriple.of(w)
        m = _ID.match(text)
        if not m:
            raise InvalidBundle(f"cannot parse bundle id {text!r}; use NAME[@tau=K][+LELEMENT]")
        name, tau, shift = m.groups()
        return cls(w, name, int(tau or 0), parse_lelement(w, shift) if shift else None)

    def __str__(self):
        s = self.name
        if self.tau:
            s += f"@tau={self.tau}"
        if self.shift is not None and not self.shift.is_zero():
            s += f"+{self.shift}"
        return s


def domestic_cover(bid: DomesticBundleId, printed: bool = False) -> CoverSpec:
    """pc(tau^k E (y)) = pc(E)(k w + y), looked up from the representative."""
    row = load_table(bid.w)[bid.name]
    base = CoverSpec(row.printed if printed else row.cover, row.rank)
    if row.tau:
        base = base.shifted(-row.tau * constants(bid.w).omega)
    return base.shifted(bid.total_shift())


def domestic_hull(bid: DomesticBundleId) -> CoverSpec:
    return domestic_cover(bid).shifted(constants(bid.w).x[0])


def domestic_stats(bid: DomesticBundleId) -> BundleStats:
    """bundle_stats with det fixed by extension data where the rank is two."""
    cov = domestic_cover(bid)
    hint = None
    if cov.rank == 2:
        data = find_extension_data(cov)
        if data:
            hint = data[0].det()
    return bundle_stats(cov, hint)


# ---- uniqueness audit -----------------------------------------------------------

@dataclass
class AuditReport:
    w: WeightTriple
    window: int
    bundles: int
    collisions: list[tuple[str, str]]

    @property
    def passed(self) -> bool:
        return not self.collisions

    def to_json(self) -> dict:
        return {"weights": self.w.to_json(), "window": self.window, "bundles": self.bundles,
                "collisions": [list(c) for c in self.collisions], "passed": self.passed}


def uniqueness_audit(w: WeightTriple, window: int = 20) -> AuditReport:
    """Distinct indecomposables of rank >= 2 with tau-power in [0, window)
    must have distinct covers."""
    w = WeightTriple.of(w)
    seen: dict[tuple, str] = {}
    collisions = []
    count = 0
    for name in orbit_names(w):
        for k in range(window):
            bid = DomesticBundleId(w, name, k)
            key = domestic_cover(bid).key()
            count += 1
            if key in seen:
                collisions.append((seen[key], str(bid)))
            else:
                seen[key] = str(bid)
    return AuditReport(w, window, count, collisions)
