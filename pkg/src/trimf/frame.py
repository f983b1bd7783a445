"""Factorization frames, scalar specialization search, and the explicit
matrix factorizations for rank two and for the domestic weight types.

A frame is the coefficient-free monomial skeleton of a factorization: with
rows labelled by P0 = pc(E) and columns by P1, entry (i, j) is the small
monomial spanning S_(row_i - col_j), or absent when that space is zero.
Specialization puts a scalar in front of every present monomial.
"""
from __future__ import annotations

import ast
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .covers import (
    CoverSpec,
    DomesticBundleId,
    InvalidBundle,
    domestic_cover,
    ext_cover,
    load_table,
)
from .gmf import MatrixFactorization, _matchings, sign_equivalent, verify
from .lgroup import LElement, WeightTriple, constants, dim_S, small_monomial
from .poly import QQ, Field, Poly
from .resources import load_json


class FrameError(ValueError):
    pass


# ---- frames -------------------------------------------------------------------

Exp = tuple[int, int, int]


@dataclass
class FrameSpec:
    w: WeightTriple
    rows: list[LElement]                    # P0 twists, the rows of U
    cols: list[LElement]                    # P1 twists, the columns of U
    U: list[list[Exp | None]]
    V: list[list[Exp | None]]               # rows P1 + c, columns P0
    forced_u: set[tuple[int, int]] = field(default_factory=set)
    forced_v: set[tuple[int, int]] = field(default_factory=set)
    symmetric: bool = False
    name: str = ""

    @property
    def size(self) -> int:
        return len(self.rows)

    def support(self, which: str = "u") -> set[tuple[int, int]]:
        m = self.U if which == "u" else self.V
        return {(i, j) for i, r in enumerate(m) for j, e in enumerate(r) if e is not None}

    def text(self, which: str = "u") -> str:
        names = ("x", "y", "z")
        m = self.U if which == "u" else self.V
        cells = [["0" if e is None else
                  "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k) or "1"
                  for e in r] for r in m]
        width = max(len(c) for r in cells for c in r)
        return "\n".join("[" + " ".join(c.rjust(width) for c in r) + "]" for r in cells)

    def to_json(self) -> dict:
        return {
            "weights": self.w.to_json(), "name": self.name, "symmetric": self.symmetric,
            "rows": [z.to_json() for z in self.rows], "cols": [y.to_json() for y in self.cols],
            "U": [[None if e is None else list(e) for e in r] for r in self.U],
            "V": [[None if e is None else list(e) for e in r] for r in self.V],
            "forced_u": sorted(list(p) for p in self.forced_u),
            "forced_v": sorted(list(p) for p in self.forced_v),
        }


def _skeleton(rows: list[LElement], cols: list[LElement]) -> list[list[Exp | None]]:
    out = []
    for z in rows:
        r = []
        for y in cols:
            d = z - y
            if dim_S(d) == 0:
                r.append(None)
                continue
            m = small_monomial(d)
            if m is None:
                raise FrameError(f"S_({d}) is nonzero but not spanned by a small monomial; "
                                 "these labels do not come from a minimal resolution")
            r.append(m)
        out.append(r)
    return out


def build_frame(cover: CoverSpec, w: WeightTriple | None = None, name: str = "") -> FrameSpec:
    """Frame of the bundle with the given cover, weights (2,a,b).

    Rows are the cover, columns the cover shifted by -x1.  For ranks two and
    three every summand of pc and ih has a one-dimensional Hom to or from the
    bundle, so every present entry must get a nonzero scalar.
    """
    w = WeightTriple.of(w) if w is not None else cover.w
    if w.p1 != 2:
        raise FrameError(f"frames from covers need weights (2,a,b), got {w}")
    x1 = constants(w).x[0]
    rows = list(cover.summands)
    cols = [z - x1 for z in rows]
    U = _skeleton(rows, cols)
    fr = FrameSpec(w, rows, cols, U, [list(r) for r in U], symmetric=True, name=name)
    if cover.rank in (2, 3):
        fr.forced_u = fr.support("u")
        fr.forced_v = set(fr.forced_u)
    return fr


def build_frame_general(w: WeightTriple, x: LElement) -> FrameSpec:
    """Frame of the extension bundle <O, x> for arbitrary weights."""
    w = WeightTriple.of(w)
    p0, p1 = rank2_labels(w, x)
    c = constants(w).c
    U = _skeleton(p0, p1)
    V = _skeleton([y + c for y in p1], p0)
    fr = FrameSpec(w, p0, p1, U, V, name=f"<O,{x}>")
    fr.forced_u, fr.forced_v = fr.support("u"), fr.support("v")
    return fr


def frame_from_mf(mf: MatrixFactorization) -> FrameSpec:
    """The frame with the labels of an existing factorization."""
    c = constants(mf.w).c
    U = _skeleton(mf.p0, mf.p1)
    V = _skeleton([y + c for y in mf.p1], mf.p0)
    x1 = constants(mf.w).x[0] if mf.w.p1 == 2 else None
    sym = x1 is not None and [y + x1 for y in mf.p1] == list(mf.p0)
    return FrameSpec(mf.w, list(mf.p0), list(mf.p1), U, V, symmetric=sym, name=mf.name)


def specialize(frame: FrameSpec, lam_u: dict, lam_v: dict | None = None,
               field: Field = QQ) -> MatrixFactorization:
    """Scalars times frame monomials; missing scalars count as zero."""
    if lam_v is None:
        lam_v = lam_u

    def mat(M, lam):
        return [[Poly.monomial(field, e, lam.get((i, j), 0)) if e is not None else Poly(field)
                 for j, e in enumerate(r)] for i, r in enumerate(M)]

    return MatrixFactorization.from_entries(frame.w, mat(frame.U, lam_u), mat(frame.V, lam_v),
                                            frame.rows, frame.cols, field, frame.name)


# ---- specialization search ---------------------------------------------------

@dataclass
class SearchResult:
    solutions: list[MatrixFactorization]
    truncated: bool
    nodes: int

    def __len__(self):
        return len(self.solutions)


class _Problem:
    """Quadratic equations sum(a * lam[p] * lam[q]) = target over small integers."""

    def __init__(self, nvars: int, cons: list[tuple[list[tuple[int, int, int]], int]],
                 domains: list[tuple[int, ...]]):
        self.n = nvars
        self.cons = cons
        self.domains = domains
        self.touch: list[list[int]] = [[] for _ in range(nvars)]
        for ci, (terms, _) in enumerate(cons):
            for v in {v for t in terms for v in t[1:]}:
                self.touch[v].append(ci)
        # most constrained first; ties broken by index for determinism
        self.order = sorted(range(nvars), key=lambda v: (-len(self.touch[v]), v))
        self.bound = [max(abs(a) for a in d) if d else 0 for d in domains]

    def consistent(self, val: list, ci: int) -> bool:
        terms, target = self.cons[ci]
        acc = 0
        slack = 0
        for a, p, q in terms:
            vp, vq = val[p], val[q]
            if vp is not None and vq is not None:
                acc += a * vp * vq
            elif vp == 0 or vq == 0:
                continue
            else:
                bp = abs(vp) if vp is not None else self.bound[p]
                bq = abs(vq) if vq is not None else self.bound[q]
                slack += abs(a) * bp * bq
        return abs(target - acc) <= slack

    def propagate(self, val: list, trail: list, ci: int) -> bool:
        """If one term is left with one unknown factor, that factor is forced."""
        terms, target = self.cons[ci]
        acc = 0
        open_terms = []
        for a, p, q in terms:
            vp, vq = val[p], val[q]
            if vp is not None and vq is not None:
                acc += a * vp * vq
            elif vp == 0 or vq == 0:
                continue
            else:
                open_terms.append((a, p, q))
        if len(open_terms) != 1:
            return True
        a, p, q = open_terms[0]
        if val[p] is None and val[q] is None:
            return True
        known, unk = (val[p], q) if val[p] is not None else (val[q], p)
        need = target - acc
        if need % (a * known):
            return False
        x = need // (a * known)
        if x not in self.domains[unk]:
            return False
        val[unk] = x
        trail.append(unk)
        return True

    def solve(self, prefix: dict[int, int] | None = None, limit: int | None = None,
              max_nodes: int | None = None):
        val: list = [None] * self.n
        out = []
        nodes = 0
        stopped = False
        for v, x in (prefix or {}).items():
            val[v] = x

        def settle(trail, start) -> bool:
            # propagate to a fixed point from the variables assigned since start
            k = start
            while k < len(trail):
                v = trail[k]
                k += 1
                for ci in self.touch[v]:
                    if not self.consistent(val, ci) or not self.propagate(val, trail, ci):
                        return False
            return True

        def rec(pos: int):
            nonlocal nodes, stopped
            if stopped:
                return
            while pos < self.n and val[self.order[pos]] is not None:
                pos += 1
            if pos == self.n:
                out.append(list(val))
                if limit is not None and len(out) >= limit:
                    stopped = True
                return
            v = self.order[pos]
            for x in self.domains[v]:
                nodes += 1
                if max_nodes is not None and nodes > max_nodes:
                    stopped = True
                    return
                val[v] = x
                trail = [v]
                if settle(trail, 0):
                    rec(pos + 1)
                for u in trail:
                    val[u] = None
                if stopped:
                    return

        pre = list((prefix or {}).keys())
        ok = all(self.consistent(val, ci) for v in pre for ci in self.touch[v])
        if ok and settle(pre, 0):
            rec(0)
        return out, stopped, nodes


def _build_problem(frame: FrameSpec, scalars, symmetric: bool, forced_zero_u, forced_zero_v):
    w = frame.w
    f_terms = {tuple(p * (i == j) for j in range(3)): 1 for i, p in enumerate(w.p)}
    n = frame.size
    var_u = {}
    var_v = {}
    domains = []

    def dom(forced, zero):
        if zero:
            return (0,)
        return tuple(s for s in scalars if s != 0) if forced else tuple(scalars)

    for (i, j) in sorted(frame.support("u")):
        var_u[(i, j)] = len(domains)
        domains.append(dom((i, j) in frame.forced_u, (i, j) in forced_zero_u))
    if symmetric:
        var_v = var_u
    else:
        for (i, j) in sorted(frame.support("v")):
            var_v[(i, j)] = len(domains)
            domains.append(dom((i, j) in frame.forced_v, (i, j) in forced_zero_v))

    cons = []
    pairs = [(frame.U, var_u, frame.V, var_v)]
    if not symmetric:
        pairs.append((frame.V, var_v, frame.U, var_u))
    for A, va, B, vb in pairs:
        for i in range(n):
            for l in range(n):
                groups: dict[Exp, list] = {}
                for j in range(n):
                    a, b = A[i][j], B[j][l]
                    if a is None or b is None:
                        continue
                    mono = (a[0] + b[0], a[1] + b[1], a[2] + b[2])
                    groups.setdefault(mono, []).append((1, va[(i, j)], vb[(j, l)]))
                for mono, terms in groups.items():
                    cons.append((terms, f_terms.get(mono, 0) if i == l else 0))
                if i == l:
                    for mono in f_terms:
                        if mono not in groups:
                            cons.append(([], 1))      # f cannot appear: unsolvable
    return _Problem(len(domains), cons, domains), var_u, var_v


def _solve_branch(args):
    prob, prefix, limit, max_nodes = args
    return prob.solve(prefix, limit, max_nodes)


def search_specialization(frame: FrameSpec, scalars=(0, 1, -1), symmetric: bool | None = None,
                          limit: int | None = 50, field: Field = QQ,
                          forced_zero_u=(), forced_zero_v=(), dedup: bool = True,
                          max_nodes: int | None = None, jobs: int = 1) -> SearchResult:
    """All specializations with scalars from `scalars` that factor f.

    When symmetric, V is tied to U and the single equation u^2 = f Id is
    solved.  Results are deduplicated up to conjugation by diagonal signs;
    hitting `limit` or `max_nodes` sets `truncated`.
    """
    if symmetric is None:
        symmetric = frame.symmetric
    if symmetric and not frame.symmetric:
        raise FrameError("symmetric search needs a frame with P0 = P1(x1)")
    scalars = tuple(dict.fromkeys(int(s) for s in scalars))
    fz_u, fz_v = set(map(tuple, forced_zero_u)), set(map(tuple, forced_zero_v))
    if symmetric:
        fz_u |= fz_v
    prob, var_u, var_v = _build_problem(frame, scalars, symmetric, fz_u, fz_v)
    if any(not terms and target for terms, target in prob.cons):
        return SearchResult([], False, 0)

    if jobs > 1 and prob.n:
        v0 = prob.order[0]
        tasks = [(prob, {v0: x}, limit, max_nodes) for x in prob.domains[v0]]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_solve_branch, tasks))
    else:
        parts = [prob.solve(None, limit, max_nodes)]

    raw, truncated, nodes = [], False, 0
    for sols, stop, cnt in parts:
        raw += sols
        truncated |= stop
        nodes += cnt

    out: list[MatrixFactorization] = []
    for val in raw:
        lam_u = {ij: val[v] for ij, v in var_u.items()}
        lam_v = {ij: val[v] for ij, v in var_v.items()}
        mf = specialize(frame, lam_u, lam_v, field)
        if not verify(mf).passed:
            continue
        if dedup and any(sign_equivalent(mf, o, conjugation=symmetric) for o in out):
            continue
        out.append(mf)
        if limit is not None and len(out) >= limit:
            truncated = truncated or len(raw) > len(out)
            break
    return SearchResult(out, truncated, nodes)


# ---- label inference ---------------------------------------------------------

def infer_labels(entries: list[list[Poly]], w: WeightTriple, symmetric: bool = True,
                 anchor: LElement | None = None) -> list[LElement]:
    """Row labels (P0) making a square matrix graded as a symmetric u.

    Entry (i, j) has degree z_i - z_j + x1; labels are fixed up to one global
    shift, chosen so that z_0 = anchor.  Raises if the support is
    disconnected or the degrees are inconsistent.
    """
    if not symmetric:
        raise NotImplementedError("only symmetric matrices are supported")
    w = WeightTriple.of(w)
    k = constants(w)
    n = len(entries)
    z: list[LElement | None] = [None] * n
    z[0] = anchor if anchor is not None else k.zero
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            for a, b, p, sign in ((i, j, entries[i][j], 1), (j, i, entries[j][i], -1)):
                if not p:
                    continue
                degs = p.ldegrees(w)
                if len(degs) != 1:
                    raise FrameError(f"entry {a},{b} is not homogeneous")
                d = next(iter(degs)) - k.x[0]           # z_a - z_b
                other = j
                want = z[i] - d if sign == 1 else z[i] + d
                if z[other] is None:
                    z[other] = want
                    stack.append(other)
                elif z[other] != want:
                    raise FrameError(f"inconsistent degrees around entry {a},{b}")
    if any(v is None for v in z):
        raise FrameError("support graph is disconnected; labels are not determined")
    return z


def match_labels(labels: list[LElement], cover: list[LElement]) -> list[int] | None:
    """perm with labels[i] + s = cover[perm[i]] for one global shift s."""
    for c0 in dict.fromkeys(cover):
        s = c0 - labels[0]
        shifted = [z + s for z in labels]
        for p in _matchings(cover, shifted):
            return p
    return None


# ---- templates -----------------------------------------------------------------

def _data(name: str) -> dict:
    return load_json(name)


_FACTOR = re.compile(r"([xyz])(?:\^\{([^{}]*)\}|\^(\d+))?")
_VAR = {"x": 0, "y": 1, "z": 2}


def _eval(expr: str, env: dict) -> int:
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise KeyError(f"unknown parameter {node.id!r} in {expr!r}")
            return env[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult)):
            a, b = ev(node.left), ev(node.right)
            return a + b if isinstance(node.op, ast.Add) else a - b if isinstance(node.op, ast.Sub) else a * b
        raise ValueError(f"unsupported exponent expression {expr!r}")
    return ev(ast.parse(expr, mode="eval"))


def expand_cell(cell: str, env: dict, field: Field = QQ) -> Poly:
    """Evaluate a display cell such as '-z^{c-(1+l_3)}' or 'yz^{2}'."""
    s = cell.replace(" ", "")
    if s == "0":
        return Poly(field)
    sign = 1
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        s = s[1:]
    exp = [0, 0, 0]
    pos = 0
    while pos < len(s):
        m = _FACTOR.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse cell {cell!r}")
        e = 1
        if m.group(2) is not None:
            e = _eval(m.group(2), env)
        elif m.group(3) is not None:
            e = int(m.group(3))
        if e < 0:
            raise ValueError(f"negative exponent in {cell!r} for {env}")
        exp[_VAR[m.group(1)]] += e
        pos = m.end()
    return Poly.monomial(field, exp, sign)


def expand_template(cells: list[list[str]], env: dict, field: Field = QQ) -> list[list[Poly]]:
    return [[expand_cell(c, env, field) for c in r] for r in cells]


def template(name: str) -> dict:
    return _data("templates.json")[name]


# ---- rank two ------------------------------------------------------------------

def _check_range(w: WeightTriple, x: LElement):
    dom = constants(w).dominant
    if not (x.is_effective() and (dom - x).is_effective()):
        raise InvalidBundle(f"need 0 <= x <= dominant element {dom}, got {x}")


def rank2_labels(w: WeightTriple, x: LElement) -> tuple[list[LElement], list[LElement]]:
    """(P0, P1) for <O, x>: P0 = pc, P1 = ih - c."""
    k = constants(w)
    p0 = list(ext_cover(k.zero, x))
    p1 = [x - k.c] + [(1 + li) * xi + k.omega - k.c for li, xi in zip(x.ls, k.x)]
    return p0, p1


def mf_rank2_general(w: WeightTriple, x: LElement, field: Field = QQ) -> MatrixFactorization:
    """The 4x4 factorization of the extension bundle <O, x>, any weights.

    In the displayed pair, u_x is the map P0 -> P1(c) and v_x the map
    P1 -> P0; here u always denotes P1 -> P0, so the roles are swapped.
    """
    w = WeightTriple.of(w)
    _check_range(w, x)
    a, b, c = w.p
    env = {"a": a, "b": b, "c": c, "l_1": x.l1, "l_2": x.l2, "l_3": x.l3}
    u = expand_template(template("general_v")["cells"], env, field)
    v = expand_template(template("general_u")["cells"], env, field)
    p0, p1 = rank2_labels(w, x)
    return MatrixFactorization.from_entries(w, u, v, p0, p1, field, f"<O,{x}>")


def mf_rank2_symmetric(w: WeightTriple, x: LElement, field: Field = QQ) -> MatrixFactorization:
    """u = v with u^2 = f Id for <O, x>, weights (2,a,b), x = l2 x2 + l3 x3."""
    w = WeightTriple.of(w)
    if w.p1 != 2:
        raise InvalidBundle(f"symmetric rank-two factorization needs weights (2,a,b), got {w}")
    if x.l1 != 0 or x.l != 0 or x.l2 > w.p2 - 2 or x.l3 > w.p3 - 2:
        raise InvalidBundle(f"need x = l2 x2 + l3 x3 with l2 <= {w.p2 - 2}, l3 <= {w.p3 - 2}; got {x}")
    env = {"a": w.p2, "b": w.p3, "l_2": x.l2, "l_3": x.l3}
    u = expand_template(template("symmetric_2ab")["cells"], env, field)
    return MatrixFactorization.symmetric(w, u, list(ext_cover(constants(w).zero, x)), field,
                                         f"<O,{x}>")


# ---- domestic ------------------------------------------------------------------

def _matrix_file(w: WeightTriple) -> str:
    return "matrices_{}_{}_{}.json".format(*w.p)


def stored_matrices(w: WeightTriple) -> list[dict]:
    w = WeightTriple.of(w)
    if w.p[:2] == (2, 2):
        return []
    return _data(_matrix_file(w))["matrices"]


def _entry_for(w: WeightTriple, name: str, alternate: bool) -> tuple[dict, list[int]]:
    for m in stored_matrices(w):
        if name in m["bundles"] and bool(m.get("alternate")) == alternate:
            return m, m["bundles"][name]
    kind = "alternate " if alternate else ""
    raise InvalidBundle(f"no {kind}stored matrix for {name} in weights {w}")


def stored_cells(m: dict, verbatim: bool = False) -> list[list[str]]:
    cells = [list(r) for r in m["cells"]]
    if not verbatim:
        for e in m.get("errata", ()):
            i, j = e["entry"]
            cells[i][j] = e["corrected"]
    return cells


def mf_domestic(bid: DomesticBundleId, field: Field = QQ, alternate: bool = False,
                verbatim: bool = False) -> MatrixFactorization:
    """The stored symmetric factorization of the orbit, labelled by pc of bid.

    The matrix does not depend on the tau-power or twist; only the labels
    move.  verbatim=True skips the recorded errata of the printed matrices.
    """
    w = bid.w
    cover = list(domestic_cover(bid))
    if w.p[:2] == (2, 2):
        if alternate:
            raise InvalidBundle("no alternate factorization for weights (2,2,n)")
        i = int(bid.name[1:])
        u = expand_template(template("family_2_2_n")["cells"], {"n": w.p3, "i": i}, field)
        return MatrixFactorization.symmetric(w, u, cover, field, str(bid))
    m, perm = _entry_for(w, bid.name, alternate)
    u = [[expand_cell(c, {}, field) for c in r] for r in stored_cells(m, verbatim)]
    name = str(bid) + ("'" if alternate else "")
    mf = MatrixFactorization.symmetric(w, u, [cover[p] for p in perm], field, name)
    if m.get("errata") and not verbatim:
        mf.notes.append("errata applied: " + "; ".join(
            f"[{e['entry'][0]},{e['entry'][1]}] {e['printed']} -> {e['corrected']}"
            for e in m["errata"]))
    return mf


def domestic_ids(w: WeightTriple) -> list[DomesticBundleId]:
    """One id per orbit representative (rank >= 2)."""
    w = WeightTriple.of(w)
    return [DomesticBundleId(w, name) for name in load_table(w)]


def explicit_factorizations(w: WeightTriple, field: Field = QQ) -> list[MatrixFactorization]:
    """Every stored matrix with every bundle it is stated for, plus alternates."""
    w = WeightTriple.of(w)
    out = [mf_domestic(b, field) for b in domestic_ids(w)]
    for m in stored_matrices(w):
        if m.get("alternate"):
            for name in m["bundles"]:
                out.append(mf_domestic(DomesticBundleId(w, name), field, alternate=True))
    return out
