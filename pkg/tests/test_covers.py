from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import effective_by_search, raw_degree

from trimf.covers import (
    CoverSpec,
    DomesticBundleId,
    InvalidBundle,
    bundle_stats,
    covers_isomorphic,
    domestic_cover,
    domestic_hull,
    domestic_stats,
    ext_cover,
    ext_hull,
    extension_range,
    find_extension_data,
    hom_orthogonal,
    horseshoe,
    load_table,
    multiplicity_profile,
    orbit_names,
    uniqueness_audit,
)
from trimf.lgroup import WeightTriple, constants, delta, parse_lelement

W233, W234, W235 = WeightTriple(2, 3, 3), WeightTriple(2, 3, 4), WeightTriple(2, 3, 5)


def P(w, *texts):
    return sorted((parse_lelement(w, t) for t in texts), key=lambda y: y.sort_key())


def cov(w, name, tau=0, shift=None):
    return domestic_cover(DomesticBundleId(w, name, tau, shift))


@pytest.mark.parametrize("n", range(2, 11))
def test_22n_family(n):
    w = WeightTriple(2, 2, n)
    k = constants(w)
    for i in range(n - 1):
        x = i * k.x[2]
        assert ext_cover(k.zero, x).sorted() == P(w, "w", f"{i}x3-x1", f"{i}x3-x2", "-x3")
        assert cov(w, f"E{i}") == ext_cover(k.zero, x)


def test_auslander_bundle_cover():
    for w in (W233, W234, W235, WeightTriple(3, 4, 5)):
        k = constants(w)
        L = k.x[1]
        assert ext_cover(L, k.zero).sorted() == CoverSpec.of(
            [k.omega + L, L - k.x[0], L - k.x[1], L - k.x[2]], 2).sorted()


def test_extension_range_bounds():
    for t in ((2, 3, 5), (3, 4, 5), (4, 5, 6)):
        w = WeightTriple(*t)
        xs = extension_range(w)
        assert len(xs) == (w.p1 - 1) * (w.p2 - 1) * (w.p3 - 1)
        dom = constants(w).dominant
        assert all(x.l == 0 and (dom - x).l >= 0 for x in xs)
    k = constants(W235)
    with pytest.raises(ValueError):
        ext_cover(k.zero, k.c)


@given(st.integers(0, 200), st.integers(-6, 6), st.integers(-6, 6))
def test_shift_identity(idx, a, b):
    w = WeightTriple(3, 4, 5)
    xs = extension_range(w)
    x = xs[idx % len(xs)]
    k = constants(w)
    y = a * k.x[0] + b * k.x[2]
    assert ext_cover(y, x) == ext_cover(k.zero, x).shifted(y)
    assert ext_hull(y, x) == ext_hull(k.zero, x).shifted(y)


@pytest.mark.parametrize("t", [(2, 3, 5), (2, 4, 6), (2, 5, 5), (2, 3, 7)])
def test_hull_is_cover_plus_x1_for_p1_two(t):
    w = WeightTriple(*t)
    k = constants(w)
    for x in extension_range(w):
        assert ext_hull(k.zero, x) == ext_cover(k.zero, x).shifted(k.x[0])


def test_hom_orthogonal_by_oracle():
    for t in ((2, 3, 5), (3, 3, 4)):
        w = WeightTriple(*t)
        k = constants(w)
        for x in extension_range(w):
            c = list(ext_cover(k.zero, x))
            assert hom_orthogonal(c)
            for a in c:
                for b in c:
                    if a != b:
                        assert not effective_by_search(w.p, raw_degree(b - a))
    assert not hom_orthogonal([k.zero, k.x[0]])


def test_table_233_e3_row():
    assert cov(W233, "E3").sorted() == P(W233, "w", "2w", "x3+3w", "x3+4w", "x2+3w", "x2+4w")


def test_e6_has_eleven_distinct_twists():
    prof = multiplicity_profile(cov(W235, "E6"))
    assert sum(prof.values()) == 12 and len(prof) == 11


def test_tau_shift():
    k = constants(W234)
    assert cov(W234, "E2", 1) == cov(W234, "E2").shifted(k.omega)
    assert cov(W234, "E2", 0, k.x[0]) == cov(W234, "E2").shifted(k.x[0])


def test_domestic_hull():
    k = constants(W235)
    bid = DomesticBundleId(W235, "E4", 3)
    assert domestic_hull(bid) == domestic_cover(bid).shifted(k.x[0])


def test_rank2_rows_have_extension_data(domestic):
    k = constants(domestic)
    for name, row in load_table(domestic).items():
        c = cov(domestic, name)
        assert len(c) == 2 * row.rank
        if row.rank == 2:
            data = find_extension_data(c)
            assert data and all(ext_cover(e.L, e.x) == c for e in data)
            assert all(e.hull() == c.shifted(k.x[0]) for e in data)


def test_errata_are_recorded():
    rows = {w: load_table(w) for w in (W233, W234, W235)}
    fixed = {(str(w), n): len(r.errata) for w, t in rows.items() for n, r in t.items() if r.errata}
    assert fixed == {("(2,3,4)", "E3"): 1, ("(2,3,4)", "F3"): 2, ("(2,3,5)", "F4"): 1}
    # the printed rank-3 rows fail Hom-orthogonality, the printed F4 row the horseshoe
    for w, name in ((W234, "E3"), (W234, "F3")):
        assert not hom_orthogonal(domestic_cover(DomesticBundleId(w, name), printed=True))
        assert hom_orthogonal(cov(w, name))
    printed = domestic_cover(DomesticBundleId(W235, "F4"), printed=True)
    assert horseshoe(cov(W235, "F2", 1), cov(W235, "F2")) == cov(W235, "F4") != printed


@pytest.mark.parametrize("w,name,parts", [
    (W234, "E4", [("G2", 1), ("G2", 0)]),
    (W235, "E4", [("F2", 2), ("F2", -2)]),
    (W235, "F4", [("F2", 1), ("F2", 0)]),
    (W235, "E5", [("G3", 1), ("F2", -1)]),
    (W235, "E6", [("G3", 0), ("G3", -1)]),
    (W235, "E6", [("F4", 0), ("F2", -1)]),
], ids=str)
def test_horseshoe_identities(w, name, parts):
    (a, s), (b, t) = parts
    assert horseshoe(cov(w, a, s), cov(w, b, t)) == cov(w, name)


def test_235_f2_shifts_by_extension_data():
    k = constants(W235)
    assert ext_cover(k.x[2] - k.x[1], k.x[2]) == cov(W235, "F2", 2)
    assert ext_cover(k.zero, k.x[2]) == cov(W235, "F2", -2)


def test_bundle_stats_det_formula(domestic):
    k = constants(domestic)
    for name in orbit_names(domestic):
        bid = DomesticBundleId(domestic, name)
        st_ = domestic_stats(bid)
        c = domestic_cover(bid)
        total = k.zero
        for y in c:
            total = total + y
        assert 2 * st_.degree == delta(total) + c.rank * delta(k.x[0])
        assert st_.slope == Fraction(st_.degree, st_.rank)
        if st_.det is not None:
            assert 2 * st_.det == total + c.rank * k.x[0]


def test_rank2_det_is_L_plus_x_plus_omega():
    for w in (W233, W234, W235, WeightTriple(2, 2, 6)):
        k = constants(w)
        for x in extension_range(w):
            st_ = bundle_stats(ext_cover(k.zero, x), x + k.omega)
            assert st_.det == x + k.omega
            assert st_.degree == delta(x + k.omega)


def test_bundle_stats_rejects_bad_input():
    with pytest.raises(ValueError):
        bundle_stats(ext_cover(constants(WeightTriple(3, 3, 4)).zero,
                               constants(WeightTriple(3, 3, 4)).zero))
    with pytest.raises(ValueError):
        CoverSpec.of(list(cov(W235, "E2"))[:3], 2)


def test_bundle_ids():
    bid = DomesticBundleId.parse(W234, "E3@tau=-2+x1-2x3")
    assert (bid.name, bid.tau) == ("E3", -2)
    assert bid.shift == parse_lelement(W234, "x1-2x3")
    assert DomesticBundleId.parse(W234, str(bid)) == bid
    assert bid.rank == 3
    with pytest.raises(InvalidBundle):
        DomesticBundleId(W234, "E9")
    with pytest.raises(InvalidBundle):
        DomesticBundleId.parse(W234, "E3@@")
    with pytest.raises(InvalidBundle):
        load_table(WeightTriple(3, 3, 3))


def test_orbit_ranks():
    ranks = {w: sorted(r.rank for r in load_table(w).values()) for w in (W233, W234, W235)}
    assert ranks[W233] == [2, 2, 2, 3]
    assert ranks[W234] == [2, 2, 2, 3, 3, 4]
    assert ranks[W235] == [2, 2, 3, 3, 4, 4, 5, 6]


def test_uniqueness_audit(domestic):
    rep = uniqueness_audit(domestic, 20)
    assert rep.passed and rep.bundles == 20 * len(orbit_names(domestic))


def test_cover_keys():
    assert not covers_isomorphic(cov(W235, "E2"), cov(W235, "E2", 1))
    assert covers_isomorphic(cov(W235, "E2"), CoverSpec.of(list(cov(W235, "E2"))[::-1], 2))


def test_multiplicity_free_up_to_rank_five(domestic):
    for name, row in load_table(domestic).items():
        if row.rank <= 5:
            assert max(multiplicity_profile(cov(domestic, name)).values()) == 1
