"""The acceptance checks, one function per criterion.

Each check returns a CheckResult; the CLI runs them for `verify-paper` and the
test suite prints one line per result.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import product

from .ar import ARVertex, quiver, tau
from .covers import (
    CoverSpec,
    DomesticBundleId,
    covers_isomorphic,
    domestic_cover,
    ext_cover,
    ext_hull,
    extension_range,
    find_extension_data,
    hom_orthogonal,
    horseshoe,
    load_table,
    multiplicity_profile,
    uniqueness_audit,
)
from .frame import (
    build_frame,
    domestic_ids,
    explicit_factorizations,
    mf_domestic,
    mf_rank2_general,
    search_specialization,
    stored_matrices,
)
from .gmf import (
    direct_sum,
    endomorphism_algebra,
    is_indecomposable,
    is_symmetric,
    sign_equivalent,
    suspension,
    verify,
)
from .lgroup import (
    WeightTriple,
    constants,
    delta,
    dim_S,
    dim_T,
    ldegree,
    monomial_basis,
    normalize,
    small_monomial,
)
from .poly import FIELDS, Field

EXCEPTIONAL = [WeightTriple(2, 3, 3), WeightTriple(2, 3, 4), WeightTriple(2, 3, 5)]


def family(n_max: int = 10) -> list[WeightTriple]:
    return [WeightTriple(2, 2, n) for n in range(2, n_max + 1)]


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float | None = None
    findings: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def within_budget(self) -> bool:
        return self.budget is None or self.seconds <= self.budget

    @property
    def ok(self) -> bool:
        return self.passed and self.within_budget

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        t = f"{self.seconds:.2f}s" + (f" (budget {self.budget:g}s)" if self.budget else "")
        return f"[{status}] {self.key} {self.title}: {self.detail} [{t}]"

    def to_json(self) -> dict:
        return {"key": self.key, "title": self.title, "passed": self.ok,
                "correct": self.passed, "seconds": round(self.seconds, 4), "budget": self.budget,
                "detail": self.detail, "findings": self.findings, "failures": self.failures[:20]}


def _timed(key: str, title: str, budget: float | None):
    def deco(fn):
        def run(*args, **kw) -> CheckResult:
            t0 = time.perf_counter()
            res = fn(*args, **kw)
            res.key, res.title, res.budget = key, title, budget
            res.seconds = time.perf_counter() - t0
            return res
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        run.key = key
        return run
    return deco


def _result(failures: list[str], detail: str, findings=()) -> CheckResult:
    return CheckResult("", "", not failures, detail, findings=list(findings),
                       failures=failures)


# ---- 1 ---------------------------------------------------------------------------

def explicit_suite(n_max: int = 10) -> list:
    """Every displayed matrix with its cover labels: (weights, mf over Q)."""
    out = []
    for w in family(n_max):
        out += [(w, mf_domestic(b)) for b in domestic_ids(w)]
    for w in EXCEPTIONAL:
        out += [(w, mf) for mf in explicit_factorizations(w)]
    w = WeightTriple(2, 3, 4)
    k = constants(w)
    for name in ("E2", "E3"):
        out.append((w, mf_domestic(DomesticBundleId(w, name, 0, k.x[0] - 2 * k.x[2]))))
    return out


@_timed("C1", "explicit matrices u^2 = f Id", 5.0)
def check_explicit_matrices(fields: list[Field] | None = None, n_max: int = 10) -> CheckResult:
    fields = fields or [FIELDS[k] for k in ("q", "f2", "f3", "f5", "f7")]
    failures = []
    suite = explicit_suite(n_max)
    for w, mf in suite:
        for F in fields:
            rep = verify(mf.to_field(F))
            if not rep.passed:
                failures.append(f"{w} {mf.name} over {F.name}: {rep.summary()}")
    notes = []
    for w in EXCEPTIONAL:
        for m in stored_matrices(w):
            if m.get("errata"):
                notes.append(f"{w} {m['name']}: {len(m['errata'])} recorded erratum entries applied")
    return _result(failures, f"{len(suite)} matrices x {len(fields)} fields, "
                             f"{len(failures)} failures", notes)


# ---- 2 ---------------------------------------------------------------------------

@_timed("C2", "general rank-2 sweep 2 <= a,b,c <= 6", 30.0)
def check_rank2_sweep(top: int = 6) -> CheckResult:
    failures = []
    cases = 0
    for a, b, c in product(range(2, top + 1), repeat=3):
        w = WeightTriple(a, b, c)
        for x in extension_range(w):
            cases += 1
            rep = verify(mf_rank2_general(w, x))
            if not rep.passed:
                failures.append(f"{w} x={x}: {rep.summary()}")
    finding = ("the displayed pair verifies with u taken from the second display and v from "
               "the first, under the row-minus-column degree convention")
    return _result(failures, f"{cases} cases, {len(failures)} failures", [finding])


# ---- 3 ---------------------------------------------------------------------------

@_timed("C3", "symmetry and suspension", None)
def check_symmetry(n_max: int = 10) -> CheckResult:
    failures = []
    suite = explicit_suite(n_max)
    for w, mf in suite:
        if not is_symmetric(mf):
            failures.append(f"{w} {mf.name}: not symmetric")
        rep = verify(suspension(mf))
        if not rep.passed:
            failures.append(f"{w} {mf.name}: suspension {rep.summary()}")
    return _result(failures, f"{len(suite)} factorizations symmetric, suspensions verify"
                   if not failures else f"{len(failures)} failures")


# ---- 4 ---------------------------------------------------------------------------

def example_block_specialization():
    """The E4 frame of (2,3,4) searched with its off-diagonal block forced to 0."""
    w = WeightTriple(2, 3, 4)
    fr = build_frame(domestic_cover(DomesticBundleId(w, "E4")))
    zero = [(i, j) for i in range(4) for j in range(4, 8)]
    return search_specialization(fr, forced_zero_u=zero, limit=5)


def e4_pattern() -> dict:
    """Off-diagonal endomorphism unknowns of u_E4, per block, as {(i,j): exps}."""
    mf = mf_domestic(DomesticBundleId(WeightTriple(2, 3, 4), "E4"))
    A = endomorphism_algebra(mf)
    out = {"dim": A.dim}
    for block in ("F0", "F1"):
        out[block] = {(i, j): e for b, i, j, e in A.unknowns if b == block and i != j}
        out[block + "_diag"] = sum(1 for b, i, j, _ in A.unknowns if b == block and i == j)
    return out


@_timed("C4", "indecomposability", 60.0)
def check_indecomposable(n_max: int = 10) -> CheckResult:
    failures = []
    suite = explicit_suite(n_max)
    for w, mf in suite:
        if not is_indecomposable(mf):
            failures.append(f"{w} {mf.name}: decomposable")
    w = WeightTriple(2, 3, 4)
    e2 = mf_domestic(DomesticBundleId(w, "E2"))
    if is_indecomposable(direct_sum(e2, e2)):
        failures.append("E2 + E2 reported indecomposable")
    res = example_block_specialization()
    if not res.solutions:
        failures.append("block specialization of the E4 frame found nothing")
    for mf in res.solutions:
        if is_indecomposable(mf):
            failures.append("block specialization of the E4 frame is indecomposable")
    pat = e4_pattern()
    expected = {(4, 3): (0, 0, 1), (6, 1): (0, 0, 1)}
    for block in ("F0", "F1"):
        if pat[block] != expected or pat[block + "_diag"] != 8:
            failures.append(f"E4 endomorphism pattern {block}: {pat[block]}")
    if pat["dim"] != 1:
        failures.append(f"dim End(E4) = {pat['dim']}")
    verbatim = mf_domestic(DomesticBundleId(WeightTriple(2, 3, 5), "E6"), alternate=True,
                           verbatim=True)
    notes = [f"alternate E6 as printed: dim End = {endomorphism_algebra(verbatim).dim}, "
             f"indecomposable = {is_indecomposable(verbatim)}; the stored erratum is used"]
    return _result(failures, f"{len(suite)} explicit factorizations indecomposable; E2+E2 and the "
                   f"E4 block specialization ({len(res.solutions)} found) decomposable; E4 "
                   f"unknowns 8 diagonal + z at (5,4),(7,2)", notes)


# ---- 5 ---------------------------------------------------------------------------

def _cov(w, name, k=0):
    return domestic_cover(DomesticBundleId(w, name, k))


HORSESHOES = [
    ((2, 3, 4), "E4", [("G2", 1), ("G2", 0)]),
    ((2, 3, 5), "E4", [("F2", 2), ("F2", -2)]),
    ((2, 3, 5), "F4", [("F2", 1), ("F2", 0)]),
    ((2, 3, 5), "E5", [("G3", 1), ("F2", -1)]),
    ((2, 3, 5), "E6", [("G3", 0), ("G3", -1)]),
    ((2, 3, 5), "E6", [("F4", 0), ("F2", -1)]),
]
# the alternate E6 sequence is sometimes written with tau F4 as its kernel; the
# covers only add up with F4 itself
E6_ALT_PRINTED = ((2, 3, 5), "E6", [("F4", 1), ("F2", -1)])


@_timed("C5", "cover tables", None)
def check_cover_tables(n_max: int = 10) -> CheckResult:
    failures = []
    rows = 0
    x1s = {}
    for w in family(n_max) + EXCEPTIONAL:
        k = constants(w)
        x1s[w] = k.x[0]
        for name, row in load_table(w).items():
            rows += 1
            cov = _cov(w, name)
            if len(cov) != 2 * row.rank:
                failures.append(f"{w} {name}: cover size {len(cov)}")
            if row.rank in (2, 3) and not hom_orthogonal(cov):
                failures.append(f"{w} {name}: summands not Hom-orthogonal")
            if row.rank == 2:
                data = find_extension_data(cov)
                if not data:
                    failures.append(f"{w} {name}: no extension data")
                for e in data:
                    if ext_hull(e.L, e.x) != ext_cover(e.L, e.x).shifted(k.x[0]):
                        failures.append(f"{w} {name}: hull is not cover + x1")
    for w in family(n_max):
        k = constants(w)
        for i in range(w.p3 - 1):
            if ext_cover(k.zero, i * k.x[2]) != _cov(w, f"E{i}"):
                failures.append(f"{w} E{i} differs from <O, {i} x3>")
    w = WeightTriple(2, 3, 5)
    k = constants(w)
    if ext_cover(k.x[2] - k.x[1], k.x[2]) != _cov(w, "F2", 2):
        failures.append("(2,3,5) tau^2 F2 differs from <O(x3-x2), x3>")
    if ext_cover(k.zero, k.x[2]) != _cov(w, "F2", -2):
        failures.append("(2,3,5) tau^-2 F2 differs from <O, x3>")
    for w in EXCEPTIONAL:
        k = constants(w)
        if ext_cover(-k.omega, k.zero) != _cov(w, "E2"):
            failures.append(f"{w} E2 differs from the Auslander bundle of O(-w)")
    for wt, name, parts in HORSESHOES:
        w = WeightTriple(*wt)
        a, b = (_cov(w, n, t) for n, t in parts)
        if horseshoe(a, b) != _cov(w, name):
            failures.append(f"{w} pc({name}) != pc({parts[0]}) + pc({parts[1]})")
    notes = []
    wt, name, parts = E6_ALT_PRINTED
    w = WeightTriple(*wt)
    if horseshoe(*(_cov(w, n, t) for n, t in parts)) != _cov(w, name):
        notes.append("(2,3,5) pc(tau F4) + pc(tau^- F2) is not pc(E6); pc(F4) + pc(tau^- F2) is")
    for w in EXCEPTIONAL:
        for name, row in load_table(w).items():
            for e in row.errata:
                notes.append(f"{w} {name} summand {e['index']}: printed {e['printed']}, "
                             f"used {e['corrected']}")
    return _result(failures, f"{rows} table rows; hull = cover + x1; {len(HORSESHOES)} horseshoe "
                   f"identities", notes)


# ---- 6 ---------------------------------------------------------------------------

@_timed("C6", "uniqueness by cover", 10.0)
def check_uniqueness(window: int = 20, n_max: int = 8) -> CheckResult:
    failures = []
    total = 0
    for w in family(n_max) + EXCEPTIONAL:
        rep = uniqueness_audit(w, window)
        total += rep.bundles
        failures += [f"{w} {a} ~ {b}" for a, b in rep.collisions]
    # distinct orbits, not only distinct tau-powers
    w = WeightTriple(2, 3, 5)
    if covers_isomorphic(_cov(w, "E2"), _cov(w, "F2")):
        failures.append("(2,3,5) E2 and F2 share a cover")
    return _result(failures, f"{total} bundles in a {window}-step window, "
                   f"{len(failures)} collisions")


# ---- 7 ---------------------------------------------------------------------------

@_timed("C7", "multiplicity of cover summands", None)
def check_multiplicity(n_max: int = 10) -> CheckResult:
    failures = []
    for w in family(n_max) + EXCEPTIONAL:
        for name, row in load_table(w).items():
            prof = multiplicity_profile(_cov(w, name))
            if row.rank <= 5 and max(prof.values()) > 1:
                failures.append(f"{w} {name}: repeated summand")
    e6 = multiplicity_profile(_cov(WeightTriple(2, 3, 5), "E6"))
    doubles = [str(y) for y, m in e6.items() if m > 1]
    if len(e6) != 11 or sum(e6.values()) != 12 or len(doubles) != 1:
        failures.append(f"(2,3,5) E6: {len(e6)} distinct of {sum(e6.values())}")
    w = WeightTriple(2, 3, 5)
    k = constants(w)
    if doubles and doubles[0] != str(k.omega - k.x[2]):
        failures.append(f"(2,3,5) E6 repeats {doubles[0]}")
    return _result(failures, f"rank <= 5 covers multiplicity-free; E6 has {len(e6)} distinct "
                   f"twists among {sum(e6.values())}, repeated: {', '.join(doubles)}")


# ---- 8 ---------------------------------------------------------------------------

def brute_dim_T(x) -> int:
    """Count monomials of degree x by enumerating exponents bounded through delta."""
    w = x.w
    d = delta(x)
    if d < 0:
        return 0
    bar = w.pbar
    b = [d * p // bar for p in w.p]
    n = 0
    for a1 in range(b[0] + 1):
        for a2 in range(b[1] + 1):
            r = d - a1 * bar // w.p1 - a2 * bar // w.p2
            if r < 0 or r % (bar // w.p3):
                continue
            if ldegree(w, (a1, a2, r // (bar // w.p3))) == x:
                n += 1
    return n


SAMPLE_WEIGHTS = [(2, 2, 2), (2, 2, 5), (2, 3, 3), (2, 3, 4), (2, 3, 5), (2, 3, 7), (3, 3, 3),
                  (2, 4, 5), (3, 4, 5), (2, 5, 6), (4, 5, 6), (3, 3, 4)]


@_timed("C8", "Hom-dimension oracle", None)
def check_hom_dims(samples: int = 60, seed: int = 20240) -> CheckResult:
    rnd = random.Random(seed)
    failures = []
    n = 0
    for wt in SAMPLE_WEIGHTS:
        w = WeightTriple(*wt)
        c = constants(w).c
        for _ in range(samples):
            x = normalize(w, (rnd.randrange(-4, 5), rnd.randrange(-6, 7), rnd.randrange(-6, 7),
                              rnd.randrange(-3, 4)))
            n += 1
            bt = brute_dim_T(x)
            if dim_T(x) != bt or len(monomial_basis(x)) != bt:
                failures.append(f"{w} {x}: dim_T {dim_T(x)} vs {bt}")
            if dim_S(x) != bt - brute_dim_T(x - c):
                failures.append(f"{w} {x}: dim_S {dim_S(x)}")
            if bt and 0 < delta(x) < delta(c):
                m = small_monomial(x)
                if bt != 1 or m is None or monomial_basis(x) != [m]:
                    failures.append(f"{w} {x}: no unique small monomial")
    pairs = 0
    for w in family(8) + EXCEPTIONAL:
        x1 = constants(w).x[0]
        c = constants(w).c
        for name in load_table(w):
            cov = list(_cov(w, name))
            for y0 in cov:
                for y1 in cov:
                    u = y0 - (y1 - x1)
                    pairs += 1
                    if dim_T(u) == 0:
                        continue
                    if not (0 < delta(u) < delta(c)) or dim_T(u) != 1 or dim_S(u) != 1 \
                            or small_monomial(u) is None:
                        failures.append(f"{w} {name}: degree {u} breaks the trichotomy")
    return _result(failures, f"{n} random degrees over {len(SAMPLE_WEIGHTS)} weight triples, "
                   f"{pairs} cover pairs; {len(failures)} failures")


# ---- 9 ---------------------------------------------------------------------------

@_timed("C9", "frame fidelity", 120.0)
def check_frames(n_max: int = 10) -> CheckResult:
    failures = []
    count = 0
    for w in family(n_max) + EXCEPTIONAL:
        for bid in domestic_ids(w):
            if bid.rank > 3:
                continue
            mf = mf_domestic(bid)
            fr = build_frame(CoverSpec(tuple(mf.p0), bid.rank))
            sup, fs = mf.u.support(), fr.support("u")
            count += 1
            if not sup <= fs:
                failures.append(f"{w} {bid}: explicit support leaves the frame")
            if bid.rank == 2 and sup != fs:
                failures.append(f"{w} {bid}: rank-2 support differs from the frame")
    w = WeightTriple(2, 3, 3)
    for name in ("E2", "F2", "G2"):
        bid = DomesticBundleId(w, name)
        ref = mf_domestic(bid)
        res = search_specialization(build_frame(domestic_cover(bid)), limit=None)
        if not any(sign_equivalent(ref, mf, conjugation=True) for mf in res.solutions):
            failures.append(f"{w} {name}: search misses the explicit matrix")
    return _result(failures, f"{count} bundles of rank <= 3 inside their frames; (2,3,3) rank-2 "
                   f"searches recover the explicit matrices")


# ---- 10 --------------------------------------------------------------------------

@_timed("C10", "quiver action laws", None)
def check_quiver(samples: int = 100, seed: int = 7) -> CheckResult:
    rnd = random.Random(seed)
    failures = []
    for w in family(8) + EXCEPTIONAL:
        Q = quiver(w)
        k = constants(w)
        names = Q.orbit_names

        def vertex():
            return ARVertex(rnd.choice(names), rnd.randrange(-20, 21))

        def elem():
            return normalize(w, tuple(rnd.randrange(-6, 7) for _ in range(4)))

        for _ in range(50):
            v, x, y = vertex(), elem(), elem()
            if Q.shift(Q.shift(v, x), y) != Q.shift(v, x + y):
                failures.append(f"{w} group law fails at {v}, {x}, {y}")
            if Q.shift(v, x) != Q.shift_direct(v, x):
                failures.append(f"{w} normal form and bundle shift differ at {v}, {x}")
            if Q.shift(v, k.zero) != v:
                failures.append(f"{w} shift by 0 moves {v}")
        for _ in range(samples):
            v = vertex()
            if Q.shift(Q.shift(v, k.x[0]), k.x[0]) != Q.shift(v, k.c):
                failures.append(f"{w} x1 twice differs from c at {v}")
            s = Q.shift(v, k.x[0])
            if w.p == (2, 3, 5) and s != ARVertex(v.orbit, v.tau - 15):
                failures.append(f"(2,3,5) x1 != tau^-15 at {v}")
            if w.p == (2, 3, 3) and s != ARVertex(v.orbit, v.tau - 3):
                failures.append(f"(2,3,3) x1 != tau^-3 at {v}")
            if w.p == (2, 3, 4) and s != Q.glide(v, 12):
                failures.append(f"(2,3,4) x1 is not the glide by 6 mesh units at {v}")
            if w.p[:2] == (2, 2) and Q.rank(v) > 1 and s != Q.glide(v, w.p3):
                failures.append(f"{w} x1 is not the glide by {w.p3} half units at {v}")
            if tau(v) != ARVertex(v.orbit, v.tau + 1):
                failures.append(f"{w} tau at {v}")
    return _result(failures, f"group law, x1^2 = c, (2,3,5) x1 = tau^-15, (2,3,3) x1 = tau^-3, "
                   f"glides for (2,3,4) and (2,2,n); {len(failures)} failures")


CHECKS = [check_explicit_matrices, check_rank2_sweep, check_symmetry, check_indecomposable,
          check_cover_tables, check_uniqueness, check_multiplicity, check_hom_dims, check_frames,
          check_quiver]


def run_check(key: str, fields: list[str] | None = None) -> CheckResult:
    fn = next(c for c in CHECKS if c.key == key)
    if key == "C1" and fields:
        return fn([Field.parse(f) for f in fields])
    return fn()


def run_all(fields: list[str] | None = None) -> list[CheckResult]:
    return [run_check(c.key, fields) for c in CHECKS]


