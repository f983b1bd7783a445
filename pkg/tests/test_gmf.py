import json

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import end_dim, is_f_times_identity, matmul, pdict

from trimf.checks import explicit_suite
from trimf.covers import DomesticBundleId
from trimf.frame import explicit_factorizations, mf_domestic, mf_rank2_general
from trimf.gmf import (
    MatrixFactorization,
    UnsupportedCharacteristic,
    direct_sum,
    endomorphism_algebra,
    entries_from_text,
    is_indecomposable,
    is_reduced,
    is_symmetric,
    sign_equivalent,
    suspension,
    trivial_mf,
    verify,
    verify_mf,
)
from trimf.lgroup import WeightTriple, normalize
from trimf.poly import FIELDS, QQ, Poly

W234 = WeightTriple(2, 3, 4)
W235 = WeightTriple(2, 3, 5)
SUITE = explicit_suite(6)


def e2_234():
    return mf_domestic(DomesticBundleId(W234, "E2"))


def as_dicts(m):
    return [[pdict(p) for p in r] for r in m.entries]


@pytest.mark.parametrize("w,mf", SUITE, ids=[f"{w}-{m.name}" for w, m in SUITE])
def test_explicit_matrix_products_by_oracle(w, mf):
    u, v = as_dicts(mf.u), as_dicts(mf.v)
    assert is_f_times_identity(matmul(u, v), w.p)
    assert is_f_times_identity(matmul(v, u), w.p)
    assert verify(mf).passed


def test_22n_base_case_passes():
    mf = mf_domestic(DomesticBundleId(WeightTriple(2, 2, 2), "E0"))
    assert mf.size == 4
    assert verify(mf).passed


def test_trivial_factorizations_pass():
    for kind in ("f1", "1f"):
        mf = trivial_mf(W235, QQ, kind=kind)
        assert verify(mf).passed
        assert not is_reduced(mf)


def test_sign_flip_fails_with_located_residual():
    mf = mf_domestic(DomesticBundleId(WeightTriple(2, 2, 2), "E0"))
    u = [list(r) for r in mf.u.entries]
    u[0][0] = -u[0][0]
    bad = MatrixFactorization.from_entries(mf.w, u, mf.v.entries, mf.p0, mf.p1, QQ)
    rep = verify(bad)
    assert not rep.passed
    assert rep.residual_uv and rep.residual_vu
    i, j, p = rep.residual_uv[0]
    assert not p.is_zero()
    assert "nonzero" in rep.summary()
    assert rep.to_json()["residual_uv"][0]["entry"] == [i, j]


def test_grading_violation_is_reported():
    mf = e2_234()
    u = [list(r) for r in mf.u.entries]
    u[0][1] = Poly.monomial(QQ, (0, 0, 1))
    bad = MatrixFactorization.from_entries(mf.w, u, mf.v.entries, mf.p0, mf.p1, QQ)
    rep = verify(bad)
    assert rep.grading


def test_size_mismatch_raises():
    mf = e2_234()
    with pytest.raises(ValueError):
        verify_mf(mf.u, trivial_mf(W234).v, W234)


@pytest.mark.parametrize("mf", explicit_factorizations(W235), ids=lambda m: m.name)
def test_235_matrices_are_symmetric(mf):
    assert is_symmetric(mf)
    assert is_reduced(mf)


def test_symmetry_needs_p1_two():
    w = WeightTriple(3, 3, 3)
    mf = mf_rank2_general(w, normalize(w, (1, 1, 1, 0)))
    with pytest.raises(ValueError):
        is_symmetric(mf)
    assert is_reduced(mf)


def test_trivial_is_not_symmetric():
    assert not is_symmetric(trivial_mf(W235))


def test_direct_sum():
    a = e2_234()
    s = direct_sum(a, a)
    assert s.size == 8
    assert verify(s).passed
    t = direct_sum(a, trivial_mf(W234, QQ, kind="1f"))
    assert verify(t).passed
    assert not is_reduced(t)


def test_suspension_verifies():
    for _, mf in SUITE[::5]:
        assert verify(suspension(mf)).passed


@pytest.mark.parametrize("w", [WeightTriple(2, 3, 3), W234, W235], ids=str)
def test_end_dimension_matches_oracle(w):
    for mf in explicit_factorizations(w):
        A = endomorphism_algebra(mf)
        assert A.dim == end_dim(mf) == 1
        assert A.contains_identity()
        assert is_indecomposable(mf, A)


def test_end_of_direct_sum():
    a = e2_234()
    b = mf_domestic(DomesticBundleId(W234, "G2"))
    assert endomorphism_algebra(direct_sum(a, a)).dim == end_dim(direct_sum(a, a)) == 4
    assert endomorphism_algebra(direct_sum(a, b)).dim >= 2
    assert not is_indecomposable(direct_sum(a, a))
    assert not is_indecomposable(direct_sum(a, b))


def test_e4_unknown_pattern():
    mf = mf_domestic(DomesticBundleId(W234, "E4"))
    A = endomorphism_algebra(mf)
    for block in ("F0", "F1"):
        off = sorted((i, j, e) for b, i, j, e in A.unknowns if b == block and i != j)
        assert off == [(4, 3, (0, 0, 1)), (6, 1, (0, 0, 1))]
    assert A.dim == 1


def test_small_characteristic_is_refused():
    a = e2_234().to_field(FIELDS["f2"])
    with pytest.raises(UnsupportedCharacteristic):
        is_indecomposable(direct_sum(a, a))
    assert is_indecomposable(a)          # dim End = 1 < 2


@pytest.mark.parametrize("name", ["f2", "f3", "f5", "f7"])
def test_results_agree_across_fields(name):
    for _, mf in SUITE:
        assert verify(mf.to_field(FIELDS[name])).passed


def test_alternate_e6_as_printed_is_decomposable():
    mf = mf_domestic(DomesticBundleId(W235, "E6"), alternate=True, verbatim=True)
    assert verify(mf).passed
    A = endomorphism_algebra(mf)
    assert A.dim == end_dim(mf) == 2
    assert A.radical_dim() == 0
    assert not is_indecomposable(mf, A)
    fixed = mf_domestic(DomesticBundleId(W235, "E6"), alternate=True)
    assert is_indecomposable(fixed)
    plain = mf_domestic(DomesticBundleId(W235, "E6"))
    assert not sign_equivalent(fixed, plain, conjugation=True)


def test_json_roundtrip():
    for _, mf in SUITE[::7]:
        obj = json.loads(json.dumps(mf.to_json()))
        back = MatrixFactorization.from_json(obj)
        assert back.u.entries == mf.u.entries and back.v.entries == mf.v.entries
        assert back.p0 == mf.p0 and back.p1 == mf.p1
    obj = e2_234().to_json()
    assert obj["symmetric"] and "v" not in obj


def test_json_without_v_needs_symmetric_flag():
    obj = e2_234().to_json()
    obj["symmetric"] = False
    with pytest.raises(ValueError):
        MatrixFactorization.from_json(obj)


@given(st.lists(st.sampled_from([1, -1]), min_size=8, max_size=8))
def test_sign_conjugation_is_detected(signs):
    mf = mf_domestic(DomesticBundleId(W234, "E3"))
    n = mf.size
    d = signs[:n] if n <= 8 else signs + [1] * (n - 8)
    u = [[p * Poly.const(QQ, d[i] * d[j]) for j, p in enumerate(r)]
         for i, r in enumerate(mf.u.entries)]
    other = MatrixFactorization.symmetric(mf.w, u, mf.p0, QQ)
    assert verify(other).passed
    assert sign_equivalent(mf, other, conjugation=True)


def test_entries_from_text():
    rows = entries_from_text(QQ, ["x, 0", ["y^2", "-z"]])
    assert rows[0][0] == Poly.monomial(QQ, (1, 0, 0))
    assert rows[1][1] == Poly.monomial(QQ, (0, 0, 1), -1)
