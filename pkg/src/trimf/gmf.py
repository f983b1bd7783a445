"""Graded matrices over T = k[x1,x2,x3] and graded matrix factorizations.

Degree labels are line-bundle twists: a free module is a sum of T(y), and
a label list records the y's.  A matrix with row labels r (target) and column
labels s (source) maps sum T(s_j) -> sum T(r_i), so entry (i, j) must be
homogeneous of degree r[i] - s[j].

A factorization (u, v) of f consists of
    u : P1 -> P0      rows = P0 twists,     cols = P1 twists
    v : P0 -> P1(c)   rows = P1 twists + c, cols = P0 twists
with u*v = f*Id and v*u = f*Id.  For weights (2,a,b) it is symmetric when
P0 = P1(x1) and v = u, so the single identity u^2 = f*Id remains.
"""
from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field as dc_field

from .lgroup import LElement, WeightTriple, constants, ldegree, monomial_basis
from .linalg import nullspace, rank
from .poly import QQ, Field, Poly, f_of, format_poly, parse_poly


class UnsupportedCharacteristic(ValueError):
    pass


@dataclass
class GradedMatrix:
    entries: list[list[Poly]]
    row_degrees: list[LElement]
    col_degrees: list[LElement]
    w: WeightTriple
    field: Field = QQ

    def __post_init__(self):
        if len(self.entries) != len(self.row_degrees):
            raise ValueError("row label count does not match the matrix")
        for r in self.entries:
            if len(r) != len(self.col_degrees):
                raise ValueError("column label count does not match the matrix")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_degrees), len(self.col_degrees)

    def entry_degree(self, i: int, j: int) -> LElement:
        return self.row_degrees[i] - self.col_degrees[j]

    def grading_violations(self) -> list[tuple[int, int, LElement, tuple]]:
        """(i, j, expected degree, offending exponent) for each bad monomial."""
        bad = []
        for i, row in enumerate(self.entries):
            for j, p in enumerate(row):
                if not p:
                    continue
                d = self.entry_degree(i, j)
                for e in p.terms:
                    if ldegree(self.w, e) != d:
                        bad.append((i, j, d, e))
        return bad

    def is_graded(self) -> bool:
        return not self.grading_violations()

    def shifted(self, x: LElement) -> GradedMatrix:
        """Same matrix, every label shifted by x."""
        return GradedMatrix(self.entries, [r + x for r in self.row_degrees],
                            [c + x for c in self.col_degrees], self.w, self.field)

    def support(self) -> set[tuple[int, int]]:
        return {(i, j) for i, r in enumerate(self.entries) for j, p in enumerate(r) if p}

    def to_field(self, F: Field) -> GradedMatrix:
        return GradedMatrix([[p.to_field(F) for p in r] for r in self.entries],
                            self.row_degrees, self.col_degrees, self.w, F)

    def __matmul__(self, other: GradedMatrix) -> list[list[Poly]]:
        return matmul(self.entries, other.entries, self.field)

    def text(self) -> str:
        cells = [[format_poly(p) for p in r] for r in self.entries]
        width = max((len(c) for r in cells for c in r), default=1)
        return "\n".join("[" + " ".join(c.rjust(width) for c in r) + "]" for r in cells)


def matmul(a: list[list[Poly]], b: list[list[Poly]], F: Field) -> list[list[Poly]]:
    n, m = len(a), len(b[0]) if b else 0
    inner = len(b)
    out = []
    for i in range(n):
        row = []
        for k in range(m):
            acc = Poly(F)
            for j in range(inner):
                if a[i][j] and b[j][k]:
                    acc = acc + a[i][j] * b[j][k]
            row.append(acc)
        out.append(row)
    return out


def identity_entries(n: int, F: Field, scale: Poly | None = None) -> list[list[Poly]]:
    one = scale if scale is not None else Poly.const(F, 1)
    return [[one if i == j else Poly(F) for j in range(n)] for i in range(n)]


@dataclass
class MatrixFactorization:
    u: GradedMatrix
    v: GradedMatrix
    w: WeightTriple
    field: Field = QQ
    name: str = ""
    notes: list[str] = dc_field(default_factory=list)

    @classmethod
    def from_entries(cls, w: WeightTriple, u, v, p0: list[LElement], p1: list[LElement],
                     field: Field = QQ, name: str = "") -> MatrixFactorization:
        """Build from entry arrays; p0 labels the rows of u, p1 its columns."""
        c = constants(w).c
        U = GradedMatrix(u, list(p0), list(p1), w, field)
        V = GradedMatrix(v, [y + c for y in p1], list(p0), w, field)
        return cls(U, V, w, field, name)

    @classmethod
    def symmetric(cls, w: WeightTriple, u, p0: list[LElement], field: Field = QQ,
                  name: str = "") -> MatrixFactorization:
        x1 = constants(w).x[0]
        return cls.from_entries(w, u, u, p0, [z - x1 for z in p0], field, name)

    @property
    def size(self) -> int:
        return len(self.u.entries)

    @property
    def p0(self) -> list[LElement]:
        return self.u.row_degrees

    @property
    def p1(self) -> list[LElement]:
        return self.u.col_degrees

    def shifted(self, x: LElement) -> MatrixFactorization:
        return MatrixFactorization(self.u.shifted(x), self.v.shifted(x), self.w, self.field,
                                   self.name, list(self.notes))

    def to_field(self, F: Field) -> MatrixFactorization:
        return MatrixFactorization(self.u.to_field(F), self.v.to_field(F), self.w, F,
                                   self.name, list(self.notes))

    def to_json(self) -> dict:
        sym = is_symmetric(self) if self.w.p1 == 2 else False
        out = {
            "weights": self.w.to_json(),
            "field": self.field.name,
            "rows": [z.to_json() for z in self.p0],
            "cols": [y.to_json() for y in self.p1],
            "u": [[p.to_json() for p in r] for r in self.u.entries],
            "symmetric": sym,
        }
        if self.name:
            out["name"] = self.name
        if not sym:
            out["v"] = [[p.to_json() for p in r] for r in self.v.entries]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> MatrixFactorization:
        w = WeightTriple.of(obj["weights"])
        F = Field.parse(obj.get("field", "Q"))
        p0 = [LElement.from_json(w, z) for z in obj["rows"]]
        p1 = [LElement.from_json(w, y) for y in obj["cols"]]
        u = [[Poly.from_json(F, t) for t in r] for r in obj["u"]]
        if "v" in obj and obj["v"] is not None:
            v = [[Poly.from_json(F, t) for t in r] for r in obj["v"]]
        elif obj.get("symmetric"):
            v = u
        else:
            raise ValueError("'v' missing and factorization not marked symmetric")
        return cls.from_entries(w, u, v, p0, p1, F, obj.get("name", ""))


# ---- verification -----------------------------------------------------------

@dataclass
class VerificationReport:
    grading: list[tuple[str, int, int, LElement, tuple]]
    label_errors: list[str]
    residual_uv: list[tuple[int, int, Poly]]
    residual_vu: list[tuple[int, int, Poly]]

    @property
    def passed(self) -> bool:
        return not (self.grading or self.label_errors or self.residual_uv or self.residual_vu)

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "grading_violations": [
                {"matrix": m, "entry": [i, j], "expected": str(d), "exp": list(e)}
                for m, i, j, d, e in self.grading],
            "label_errors": self.label_errors,
            "residual_uv": [{"entry": [i, j], "value": str(p)} for i, j, p in self.residual_uv],
            "residual_vu": [{"entry": [i, j], "value": str(p)} for i, j, p in self.residual_vu],
        }

    def summary(self) -> str:
        if self.passed:
            return "pass"
        parts = []
        if self.grading:
            m, i, j, d, e = self.grading[0]
            parts.append(f"{len(self.grading)} grading violation(s), first {m}[{i},{j}] "
                         f"exp {e} not of degree {d}")
        parts += self.label_errors
        for tag, res in (("u*v", self.residual_uv), ("v*u", self.residual_vu)):
            if res:
                i, j, p = res[0]
                parts.append(f"{tag} - f*Id nonzero at {len(res)} entr(y/ies), first [{i},{j}] = {p}")
        return "fail: " + "; ".join(parts)


def verify_mf(u: GradedMatrix, v: GradedMatrix, w: WeightTriple | None = None) -> VerificationReport:
    w = WeightTriple.of(w) if w is not None else u.w
    n = len(u.entries)
    if u.shape != (n, n) or v.shape != (n, n):
        raise ValueError(f"need square matrices of equal size, got {u.shape} and {v.shape}")
    if u.field != v.field:
        raise ValueError(f"field mismatch: {u.field.name} vs {v.field.name}")
    F = u.field
    c = constants(w).c
    grading = [("u", *t) for t in u.grading_violations()] + [("v", *t) for t in v.grading_violations()]
    labels = []
    if [y + c for y in u.col_degrees] != list(v.row_degrees):
        labels.append("v row labels are not the column labels of u shifted by c")
    if list(u.row_degrees) != list(v.col_degrees):
        labels.append("v column labels are not the row labels of u")
    f = f_of(w, F)
    fid = identity_entries(n, F, f)

    def residual(a, b):
        prod = matmul(a, b, F)
        return [(i, j, prod[i][j] - fid[i][j]) for i in range(n) for j in range(n)
                if prod[i][j] != fid[i][j]]

    return VerificationReport(grading, labels, residual(u.entries, v.entries),
                              residual(v.entries, u.entries))


def verify(mf: MatrixFactorization) -> VerificationReport:
    return verify_mf(mf.u, mf.v, mf.w)


def is_symmetric(mf: MatrixFactorization) -> bool:
    if mf.w.p1 != 2:
        raise ValueError(f"symmetry needs weights (2,a,b), got {mf.w}")
    x1 = constants(mf.w).x[0]
    if mf.u.entries != mf.v.entries:
        return False
    return [y + x1 for y in mf.p1] == list(mf.p0)


def is_reduced(mf: MatrixFactorization) -> bool:
    return not any(p.constant_term() for m in (mf.u, mf.v) for r in m.entries for p in r)


def direct_sum(a: MatrixFactorization, b: MatrixFactorization) -> MatrixFactorization:
    if a.w != b.w or a.field != b.field:
        raise ValueError("direct sum needs equal weights and field")
    F = a.field

    def block(x, y):
        n, m = len(x), len(y)
        z = Poly(F)
        return ([r + [z] * m for r in x] + [[z] * n + r for r in y])

    name = f"{a.name}+{b.name}" if a.name or b.name else ""
    return MatrixFactorization.from_entries(
        a.w, block(a.u.entries, b.u.entries), block(a.v.entries, b.v.entries),
        a.p0 + b.p0, a.p1 + b.p1, F, name)


def suspension(mf: MatrixFactorization) -> MatrixFactorization:
    """(v, u): P0 -> P1(c) -> P0(c), i.e. the degree-shift shadow of [1]."""
    c = constants(mf.w).c
    return MatrixFactorization.from_entries(
        mf.w, mf.v.entries, mf.u.entries, [y + c for y in mf.p1], list(mf.p0), mf.field,
        f"{mf.name}[1]" if mf.name else "")


def trivial_mf(w: WeightTriple, field: Field = QQ, y: LElement | None = None,
               kind: str = "f1") -> MatrixFactorization:
    """The factorizations (f, 1): T(y-c) -> T(y) and (1, f): T(y) -> T(y)."""
    k = constants(w)
    y = k.zero if y is None else y
    f = f_of(w, field)
    one = Poly.const(field, 1)
    if kind == "f1":
        return MatrixFactorization.from_entries(w, [[f]], [[one]], [y], [y - k.c], field, "(f,1)")
    return MatrixFactorization.from_entries(w, [[one]], [[f]], [y], [y], field, "(1,f)")


# ---- sign and permutation equivalence ---------------------------------------

def _sign_solve(n0: int, n1: int, rel) -> bool:
    """Find s0 in {+-1}^n0, s1 in {+-1}^n1 with s0[i]*s1[j] = r for (i, j, r) in rel."""
    parent = list(range(n0 + n1))
    par = [1] * (n0 + n1)        # parity of node relative to its parent

    def find(a):
        if parent[a] == a:
            return a, 1
        root, p = find(parent[a])
        parent[a] = root
        par[a] *= p
        return root, par[a]

    for i, j, r in rel:
        a, b = i, n0 + j
        ra, pa = find(a)
        rb, pb = find(b)
        if ra == rb:
            if pa * pb != r:
                return False
        else:
            parent[ra] = rb
            par[ra] = pa * pb * r
    return True


def sign_equivalent(a: MatrixFactorization, b: MatrixFactorization,
                    conjugation: bool = False) -> bool:
    """b = (D0 u D1, D1 v D0) for diagonal sign matrices D0, D1.

    With conjugation=True additionally D1 = +-D0, the natural notion for
    symmetric factorizations (u -> eps * D u D).
    """
    if a.size != b.size or a.field != b.field:
        return False
    n = a.size
    rel = []
    for (x, y, transpose) in ((a.u.entries, b.u.entries, False), (a.v.entries, b.v.entries, True)):
        for i in range(n):
            for j in range(n):
                p, q = x[i][j], y[i][j]
                if not p and not q:
                    continue
                if (not p) or (not q):
                    return False
                if q == p:
                    r = 1
                elif q == -p:
                    r = -1
                else:
                    return False
                rel.append((j, i, r) if transpose else (i, j, r))
    if not conjugation:
        return _sign_solve(n, n, rel)
    for eps in (1, -1):
        # D1 = eps*D0: s0[i]*s0[j] = r*eps, a parity problem on one vertex set
        rel2 = [(i, j, r * eps) for i, j, r in rel]
        if _sign_solve_single(n, rel2):
            return True
    return False


def _sign_solve_single(n: int, rel) -> bool:
    # s[i]*s[j] = r; a loop (i == i) needs r = 1
    parent = list(range(n))
    par = [1] * n

    def find(a):
        if parent[a] == a:
            return a, 1
        root, p = find(parent[a])
        parent[a] = root
        par[a] *= p
        return root, par[a]

    for i, j, r in rel:
        ra, pa = find(i)
        rb, pb = find(j)
        if ra == rb:
            if pa * pb != r:
                return False
        else:
            parent[ra] = rb
            par[ra] = pa * pb * r
    return True


def permuted(mf: MatrixFactorization, perm0: list[int], perm1: list[int]) -> MatrixFactorization:
    """Reorder P0 summands by perm0 and P1 summands by perm1."""
    u = [[mf.u.entries[i][j] for j in perm1] for i in perm0]
    v = [[mf.v.entries[j][i] for i in perm0] for j in perm1]
    return MatrixFactorization.from_entries(mf.w, u, v, [mf.p0[i] for i in perm0],
                                            [mf.p1[j] for j in perm1], mf.field, mf.name)


def _matchings(src: list[LElement], dst: list[LElement]):
    """All permutations p with src[p[k]] == dst[k]."""
    if sorted(src, key=LElement.sort_key) != sorted(dst, key=LElement.sort_key):
        return
    slots = [[i for i, s in enumerate(src) if s == d] for d in dst]

    def rec(k, used, acc):
        if k == len(dst):
            yield list(acc)
            return
        for i in slots[k]:
            if i not in used:
                used.add(i)
                acc.append(i)
                yield from rec(k + 1, used, acc)
                acc.pop()
                used.discard(i)

    yield from rec(0, set(), [])


def signed_permutation_equivalent(a: MatrixFactorization, b: MatrixFactorization) -> bool:
    """b is a with P0, P1 summands permuted (matching labels) and rescaled by signs."""
    for p0 in _matchings(a.p0, b.p0):
        for p1 in _matchings(a.p1, b.p1):
            if sign_equivalent(permuted(a, p0, p1), b):
                return True
    return False


# ---- endomorphisms ------------------------------------------------------------

@dataclass
class EndAlgebra:
    """Degree-zero endomorphisms (F1, F0) with F0 u = u F1 and F1 v = v F0."""
    mf: MatrixFactorization
    unknowns: list[tuple[str, int, int, tuple]]   # (block, i, j, exponent)
    basis: list[list]                             # vectors in unknown coordinates
    free: list[int]                               # coordinate index of each basis vector
    mult: list[list[list]] | None = None          # mult[i][j] = coords of e_i e_j

    @property
    def dim(self) -> int:
        return len(self.basis)

    def unknown_pattern(self, block: str = "F0") -> dict[tuple[int, int], int]:
        """Number of monomial unknowns per entry of F0 (on P0) or F1 (on P1)."""
        out: dict[tuple[int, int], int] = {}
        for b, i, j, _ in self.unknowns:
            if b == block:
                out[(i, j)] = out.get((i, j), 0) + 1
        return out

    def element(self, vec) -> tuple[list[list[Poly]], list[list[Poly]]]:
        """The pair (F1, F0) for a coordinate vector in the unknown space."""
        F = self.mf.field
        n = self.mf.size
        mats = {"F0": [[Poly(F) for _ in range(n)] for _ in range(n)],
                "F1": [[Poly(F) for _ in range(n)] for _ in range(n)]}
        for k, (b, i, j, e) in enumerate(self.unknowns):
            if vec[k]:
                mats[b][i][j] = mats[b][i][j] + Poly.monomial(F, e, vec[k])
        return mats["F1"], mats["F0"]

    def coords(self, F1, F0) -> list:
        """Coordinates of an endomorphism pair in the unknown space."""
        F = self.mf.field
        out = []
        for b, i, j, e in self.unknowns:
            m = F0 if b == "F0" else F1
            out.append(m[i][j].terms.get(e, F.zero))
        return out

    def contains_identity(self) -> bool:
        n = self.mf.size
        F = self.mf.field
        idm = identity_entries(n, F)
        vec = self.coords(idm, idm)
        # solution space membership: reconstruct from free coordinates
        combo = [vec[k] for k in self.free]
        return self._combine(combo) == vec

    def _combine(self, combo) -> list:
        F = self.mf.field
        out = [F.zero] * len(self.unknowns)
        for a, b in zip(combo, self.basis):
            if a:
                for k, v in enumerate(b):
                    if v:
                        out[k] = F.add(out[k], F.mul(a, v))
        return out

    def structure_constants(self) -> list[list[list]]:
        if self.mult is None:
            F = self.mf.field
            elems = [self.element(b) for b in self.basis]
            mult = []
            for F1a, F0a in elems:
                row = []
                for F1b, F0b in elems:
                    prod = self.coords(matmul(F1a, F1b, F), matmul(F0a, F0b, F))
                    row.append([prod[k] for k in self.free])
                mult.append(row)
            self.mult = mult
        return self.mult

    def radical_dim(self) -> int:
        """dim of the radical of the trace form Tr(L_{ab}) on the regular module."""
        F = self.mf.field
        d = self.dim
        if F.p and F.p <= d:
            raise UnsupportedCharacteristic(
                f"trace-form radical needs char 0 or p > dim End = {d}; got {F.name}")
        m = self.structure_constants()
        # t[k] = Tr(L_{e_k}) = sum_j coeff of e_j in e_k e_j
        t = [F.zero] * d
        for k in range(d):
            acc = F.zero
            for j in range(d):
                acc = F.add(acc, m[k][j][j])
            t[k] = acc
        gram = []
        for i in range(d):
            row = {}
            for j in range(d):
                acc = F.zero
                for k in range(d):
                    if m[i][j][k] and t[k]:
                        acc = F.add(acc, F.mul(m[i][j][k], t[k]))
                if acc:
                    row[j] = acc
            gram.append(row)
        return d - rank(F, gram, d)


def endomorphism_algebra(mf: MatrixFactorization) -> EndAlgebra:
    F = mf.field
    n = mf.size
    unknowns = []
    index = {}
    for block, labels in (("F0", mf.p0), ("F1", mf.p1)):
        for i in range(n):
            for j in range(n):
                for e in monomial_basis(labels[i] - labels[j]):
                    index[(block, i, j, e)] = len(unknowns)
                    unknowns.append((block, i, j, e))
    by_entry: dict[tuple[str, int, int], list[tuple[tuple, int]]] = {}
    for (b, i, j, e), k in index.items():
        by_entry.setdefault((b, i, j), []).append((e, k))

    eqs: dict[tuple, dict[int, object]] = {}

    def add_term(key, var, coef):
        row = eqs.setdefault(key, {})
        s = F.add(row.get(var, F.zero), coef)
        if s:
            row[var] = s
        else:
            row.pop(var, None)

    # F0*u - u*F1 = 0  and  F1*v - v*F0 = 0
    for tag, left, mat, right in (("u", "F0", mf.u.entries, "F1"), ("v", "F1", mf.v.entries, "F0")):
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    # (left)[i][k] * mat[k][j]
                    p = mat[k][j]
                    if p:
                        for e, var in by_entry.get((left, i, k), ()):
                            for me, mc in p.terms.items():
                                mono = (e[0] + me[0], e[1] + me[1], e[2] + me[2])
                                add_term((tag, i, j, mono), var, mc)
                    # - mat[i][k] * (right)[k][j]
                    p = mat[i][k]
                    if p:
                        for e, var in by_entry.get((right, k, j), ()):
                            for me, mc in p.terms.items():
                                mono = (e[0] + me[0], e[1] + me[1], e[2] + me[2])
                                add_term((tag, i, j, mono), var, F.neg(mc))
    basis, free = nullspace(F, list(eqs.values()), len(unknowns))
    return EndAlgebra(mf, unknowns, basis, free)


def is_indecomposable(mf: MatrixFactorization, algebra: EndAlgebra | None = None) -> bool:
    """End(mf) is local, tested as dim End / rad End = 1 (trace-form radical)."""
    A = algebra or endomorphism_algebra(mf)
    if A.dim == 0:
        return False
    return A.dim - A.radical_dim() == 1


def entries_from_text(field: Field, rows: list[str | list[str]]) -> list[list[Poly]]:
    """Parse rows given as lists of strings (or ' , '-joined strings)."""
    out = []
    for r in rows:
        cells = r if isinstance(r, list) else [c for c in r.split(",")]
        out.append([parse_poly(field, c) for c in cells])
    return out
