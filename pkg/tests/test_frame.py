from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import is_f_times_identity, matmul, pdict

from trimf.covers import (
    CoverSpec,
    DomesticBundleId,
    InvalidBundle,
    domestic_cover,
    extension_range,
    load_table,
)
from trimf.frame import (
    FrameError,
    build_frame,
    build_frame_general,
    domestic_ids,
    expand_cell,
    expand_template,
    explicit_factorizations,
    frame_from_mf,
    infer_labels,
    match_labels,
    mf_domestic,
    mf_rank2_general,
    mf_rank2_symmetric,
    rank2_labels,
    search_specialization,
    specialize,
    stored_matrices,
    template,
)
from trimf.gmf import MatrixFactorization, is_indecomposable, sign_equivalent, verify
from trimf.lgroup import WeightTriple, constants, normalize
from trimf.poly import QQ, Poly

W233, W234, W235 = WeightTriple(2, 3, 3), WeightTriple(2, 3, 4), WeightTriple(2, 3, 5)


@st.composite
def rank2_cases(draw):
    w = WeightTriple(*(draw(st.integers(2, 7)) for _ in range(3)))
    xs = extension_range(w)
    return w, xs[draw(st.integers(0, len(xs) - 1))]


@given(rank2_cases())
def test_general_rank2_by_product_oracle(case):
    w, x = case
    mf = mf_rank2_general(w, x)
    u = [[pdict(p) for p in r] for r in mf.u.entries]
    v = [[pdict(p) for p in r] for r in mf.v.entries]
    assert is_f_times_identity(matmul(u, v), w.p)
    assert is_f_times_identity(matmul(v, u), w.p)
    assert verify(mf).passed


def test_displayed_roles_need_swapping():
    # taken literally, the displayed pair is graded only where both roles have
    # the same labels: all weights even and x halfway to the dominant element
    graded = []
    for t in product(range(2, 7), repeat=3):
        w = WeightTriple(*t)
        for x in extension_range(w):
            env = {"a": w.p1, "b": w.p2, "c": w.p3, "l_1": x.l1, "l_2": x.l2, "l_3": x.l3}
            u = expand_template(template("general_u")["cells"], env)
            v = expand_template(template("general_v")["cells"], env)
            p0, p1 = rank2_labels(w, x)
            rep = verify(MatrixFactorization.from_entries(w, u, v, p0, p1, QQ))
            if not rep.grading:
                graded.append((t, x.ls))
    assert len(graded) == 27
    assert all(2 * l + 2 == p for t, ls in graded for l, p in zip(ls, t))


@given(rank2_cases())
def test_general_frame_is_the_rank2_support(case):
    w, x = case
    fr = build_frame_general(w, x)
    mf = mf_rank2_general(w, x)
    assert fr.support("u") == mf.u.support()
    assert fr.support("v") == mf.v.support()


def test_rank2_range_is_checked():
    k = constants(W235)
    with pytest.raises(InvalidBundle):
        mf_rank2_general(W235, k.c)
    with pytest.raises(InvalidBundle):
        mf_rank2_symmetric(WeightTriple(3, 3, 3), k.zero)


@pytest.mark.parametrize("t", [(2, 3, 5), (2, 4, 4), (2, 5, 7)])
def test_symmetric_rank2(t):
    w = WeightTriple(*t)
    k = constants(w)
    for l2 in range(w.p2 - 1):
        for l3 in range(w.p3 - 1):
            x = l2 * k.x[1] + l3 * k.x[2]
            mf = mf_rank2_symmetric(w, x)
            assert verify(mf).passed
            fr = build_frame(CoverSpec.of(mf.p0, 2))
            assert fr.support("u") == mf.u.support()


def test_explicit_counts():
    assert [m.name for m in explicit_factorizations(W233)] == ["E2", "F2", "G2", "E3"]
    assert len(explicit_factorizations(W234)) == 6
    assert len(explicit_factorizations(W235)) == 9


def test_every_table_row_has_a_matrix(domestic):
    names = {b.name for b in domestic_ids(domestic)}
    assert names == set(load_table(domestic))
    for bid in domestic_ids(domestic):
        mf = mf_domestic(bid)
        assert CoverSpec.of(mf.p0, bid.rank) == domestic_cover(bid)
        assert verify(mf).passed


def test_frames_contain_explicit_support(domestic):
    for bid in domestic_ids(domestic):
        mf = mf_domestic(bid)
        fr = build_frame(domestic_cover(bid))
        if bid.rank <= 3:
            assert mf.u.support() <= fr.support("u")
        if bid.rank == 2:
            assert mf.u.support() == fr.support("u")


def test_frame_from_mf():
    mf = mf_domestic(DomesticBundleId(W234, "E3"))
    fr = frame_from_mf(mf)
    assert fr.support("u") == mf.u.support()
    assert fr.to_json()["weights"] == [2, 3, 4]
    assert "z" in fr.text()


def test_tau_orbit_uses_same_matrix():
    a = mf_domestic(DomesticBundleId(W235, "E4"))
    b = mf_domestic(DomesticBundleId(W235, "E4", 5))
    k = constants(W235)
    assert a.u.entries == b.u.entries
    assert b.p0 == [y + 5 * k.omega for y in a.p0]


def test_shifted_ids_verify():
    k = constants(W234)
    for name in ("E2", "E3"):
        mf = mf_domestic(DomesticBundleId(W234, name, 0, k.x[0] - 2 * k.x[2]))
        assert verify(mf).passed


def test_verbatim_g2_fails_and_erratum_is_noted():
    bid = DomesticBundleId(W234, "G2")
    assert not verify(mf_domestic(bid, verbatim=True)).passed
    mf = mf_domestic(bid)
    assert verify(mf).passed
    assert any("erratum" in n or "errata" in n for n in mf.notes)


def test_stored_permutations_match_covers():
    for w in (W233, W234, W235):
        for m in stored_matrices(w):
            for name, perm in m["bundles"].items():
                assert sorted(perm) == list(range(len(perm)))
                assert name in load_table(w)


def test_label_inference():
    mf = mf_domestic(DomesticBundleId(W235, "E3"))
    labels = infer_labels(mf.u.entries, W235)
    perm = match_labels(labels, list(mf.p0))
    assert perm is not None
    # labels are fixed up to a global shift, so only the shape of the cover matters
    assert match_labels(labels, [y + constants(W235).x[1] for y in mf.p0]) is not None
    other = list(domestic_cover(DomesticBundleId(W235, "G3")))
    assert match_labels(labels, other) is None


def test_expand_cell():
    env = {"a": 5, "l_1": 1}
    assert expand_cell("-x^{a-(1+l_1)}z", env) == Poly.monomial(QQ, (3, 0, 1), -1)
    assert expand_cell("yz^2", {}) == Poly.monomial(QQ, (0, 1, 2))
    assert expand_cell("0", {}).is_zero()
    with pytest.raises(ValueError):
        expand_cell("x^{l_1-3}", env)
    with pytest.raises(KeyError):
        expand_cell("x^{q}", env)
    with pytest.raises(ValueError):
        expand_cell("x^{a/2}", env)


def test_specialize_all_ones_of_frame():
    fr = build_frame(domestic_cover(DomesticBundleId(W233, "E2")))
    mf = specialize(fr, {ij: 1 for ij in fr.support("u")}, field=QQ)
    assert mf.u.support() == fr.support("u")


@pytest.mark.parametrize("name", ["E2", "F2", "G2"])
def test_233_searches_recover_explicit_matrices(name):
    bid = DomesticBundleId(W233, name)
    res = search_specialization(build_frame(domestic_cover(bid)), limit=None)
    assert len(res) == 1 and not res.truncated
    assert sign_equivalent(mf_domestic(bid), res.solutions[0], conjugation=True)


def test_search_in_parallel_agrees():
    fr = build_frame(domestic_cover(DomesticBundleId(W234, "E2")))
    a = search_specialization(fr, limit=None)
    b = search_specialization(fr, limit=None, jobs=2)
    assert len(a) == len(b) >= 1
    assert all(any(sign_equivalent(x, y, conjugation=True) for y in b.solutions)
               for x in a.solutions)


def test_block_specialization_of_e4_is_decomposable():
    fr = build_frame(domestic_cover(DomesticBundleId(W234, "E4")))
    zero = [(i, j) for i in range(4) for j in range(4, 8)]
    res = search_specialization(fr, forced_zero_u=zero, limit=5)
    assert len(res) == 1
    assert verify(res.solutions[0]).passed
    assert not is_indecomposable(res.solutions[0])


def test_search_limits():
    fr = build_frame(domestic_cover(DomesticBundleId(W234, "E3")))
    res = search_specialization(fr, scalars=(0, 1, -1, 2), limit=1, dedup=False)
    assert len(res) == 1
    assert res.truncated


def test_symmetric_search_needs_symmetric_frame():
    w = WeightTriple(3, 4, 5)
    fr = build_frame_general(w, normalize(w, (1, 1, 1, 0)))
    with pytest.raises(FrameError):
        search_specialization(fr, symmetric=True)
