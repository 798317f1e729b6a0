import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from realcong import grids
from realcong.blocks import (
    BlockError, c_rot, gamma, h_block, h_hat, jordan, parse_block, parse_form, realize, realize_form,
)
from realcong.classify import (
    NONE, SIGN_A, SIGN_N, CanonicalForm, classify_form1, classify_form2, classify_lw_consistency, eps_k,
    fhs_to_hs, form1_to_form2, form2_to_form1, forms_match, hs_to_fhs, lw_to_form1, recover_rotation,
    resolve_signs, rotation_kcf,
)
from realcong.matcore import Matrix, kron
from realcong.witnesses import gamma_sign


def F1(text):
    return CanonicalForm.make("Form1", parse_form(text))


def test_form1_examples():
    assert classify_form1(gamma(2)).specs() == ["R1ii(k=2,N=+1)"]
    assert classify_form1(gamma(2).scale(-1)).specs() == ["R1ii(k=2,N=-1)"]
    assert classify_form1(jordan(2, 0)).specs() == ["R1i(k=2)"]
    s = Matrix([[1, 0, 0, 0], [1, 1, 0, 0], [0, 2, 1, 0], [1, 0, 1, 1]])
    assert s.det() == 1
    got = classify_form1(s @ h_hat(1, 0, F(1, 2)) @ s.T)
    assert got.specs() == ["R1iv(k=1,a=0,b=1/2)"] and not got.ambiguous


def test_form2_examples():
    assert classify_form2(jordan(3, 0)).specs() == ["R2TriI(k=3,a=0)"]
    assert classify_form2(h_block(1, F(1, 2))).specs() == ["R2TriI(k=2,a=1/2)"]
    got = classify_form2(kron(gamma(3), c_rot(F(3, 5), F(4, 5))))
    assert got.specs() == ["R2TriIII(k=3,N=C(-3/5,4/5))"]


def test_unresolved_flags():
    f = classify_form1(Matrix.diag([1, -1]), resolve=False)
    assert f.ambiguity == (SIGN_N, SIGN_N)
    f = classify_form1(kron(gamma(2), c_rot(F(3, 5), F(4, 5))), resolve=False)
    assert f.ambiguity == (SIGN_A,)


def test_resolve_examples():
    f = resolve_signs(gamma(2).scale(-1), F1("R1ii(k=2,N=+1)").__class__.make(
        "Form1", [parse_block("R1ii(k=2,N=+1)")], [SIGN_N]))
    assert f.specs() == ["R1ii(k=2,N=-1)"] and f.ambiguity == (NONE,)
    f = classify_form1(Matrix.diag([1, -1]))
    assert f.specs() == ["R1ii(k=1,N=+1)", "R1ii(k=1,N=-1)"] and not f.ambiguous


# golden outcome of the sign-of-a search on Gamma_4 (x) C(+-3/5, 4/5): both signs resolve
@pytest.mark.parametrize("a", [F(3, 5), F(-3, 5)])
def test_resolve_sign_of_a_golden(a):
    blk = parse_block(f"R1ii(k=4,N=C({a},4/5))")
    f = classify_form1(realize(blk))
    assert f.specs() == [blk.spec()] and not f.ambiguous
    assert any("filtered invariants" in d for d in f.diagnostics)


def test_profile_tie_needs_filtered_stage():
    m = realize_form(parse_form("R1ii(k=2,N=-1)+R1ii(k=4,N=-1)"))
    f = classify_form1(m)
    assert f.specs() == ["R1ii(k=2,N=-1)", "R1ii(k=4,N=-1)"] and not f.ambiguous


@pytest.mark.parametrize("k", range(1, 13))
def test_eps_k_matches_pks_sign(k):
    assert eps_k(k) == gamma_sign(k)


def test_conversion_examples():
    assert form1_to_form2(F1("R1ii(k=2,N=+1)")).specs() == ["R2TriIII(k=2,N=+1)"]
    assert form1_to_form2(F1("R1ii(k=4,N=+1)")).specs() == ["R2TriIII(k=4,N=-1)"]
    hs = lambda t: CanonicalForm.make("HS", parse_form(t))
    assert hs_to_fhs(hs("HSType0(k=3)")).specs() == ["FHSTriI(k=3,mu=0)"]
    assert hs_to_fhs(hs("HSTypeI(k=4,mu=i)")).specs() == ["FHSTriII(k=4,mu=-i)"]
    assert hs_to_fhs(hs("HSTypeII(k=2,mu=2)")).specs() == ["FHSTriI(k=4,mu=2)"]
    with pytest.raises(ValueError):
        form1_to_form2(form1_to_form2(F1("R1i(k=1)")))


@given(st.lists(st.sampled_from(grids.form1_grid(3)), min_size=1, max_size=4))
def test_form1_form2_involution(blocks):
    f = CanonicalForm.make("Form1", blocks)
    assert form2_to_form1(form1_to_form2(f)) == f


@given(st.lists(st.sampled_from(grids.hs_grid(3)), min_size=1, max_size=4))
def test_hs_fhs_involution(blocks):
    f = CanonicalForm.make("HS", blocks)
    assert fhs_to_hs(hs_to_fhs(f)) == f


@pytest.mark.parametrize("blk", grids.form1_grid(3), ids=str)
def test_form2_conversion_agrees_with_classification(blk):
    got = classify_form2(realize(blk))
    want = form1_to_form2(CanonicalForm.make("Form1", [blk]))
    assert forms_match(got, want)


def test_lw_examples():
    lw = lambda t: lw_to_form1(parse_block(t)).specs()
    assert lw("LWalpha3(k=2,alpha=1)") == ["R1i(k=4)"]
    assert lw("LWalpha3(k=1,alpha=3)") == ["R1iii(k=1,a=-1/2)"]
    assert lw("LWbeta5(k=1,a=1,b=1)") == ["R1iv(k=1,a=-1/5,b=2/5)"]
    deg = parse_block("LWbeta4(k=1,eps=+1,b=0)", check=False)
    with pytest.raises(BlockError):
        lw_to_form1(deg)
    assert len(lw_to_form1(deg, allow_degenerate=True).blocks) == 2


def test_consistency_examples():
    r = classify_lw_consistency(parse_block("LWinf4(k=2,eps=+1)"))
    assert r["consistent"] and r["classified"] == ["R1ii(k=2,N=+1)"] and r["facts"]["witness_ok"]
    r = classify_lw_consistency(parse_block("LWbeta4(k=1,eps=+1,b=1)"))
    assert r["kcf"]["complex"] == [["0/1", "1/1", 1]]
    assert r["facts"]["complex_pair"] == ["0", "1"] and r["facts"]["z_nullity"] == 1 and r["consistent"]
    r = classify_lw_consistency(parse_block("LWm3(k=1)"))
    assert r["consistent"] and r["expected"] == ["R1i(k=3)"]


@pytest.mark.parametrize("blk,deg", grids.lw_grid(3), ids=lambda x: str(x))
def test_lw_grid_consistent(blk, deg):
    assert classify_lw_consistency(blk, allow_degenerate=deg)["consistent"]


# (c, d) = complex KCF entry of Gamma_k (x) C(a, b), then back
@pytest.mark.parametrize("a,b", grids.PYTHAGOREAN)
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_recover_rotation(a, b, k):
    for sa in (1, -1):
        c, d = rotation_kcf(sa * a, b, k)
        ra, rb = recover_rotation(c, d, k)
        assert rb == b and ra in (a, -a)


def test_recover_rotation_example():
    assert recover_rotation(F(-7, 25), F(24, 25), 1) == (F(3, 5), F(4, 5))


def _small_vocab():
    return [b for b in grids.form1_grid(2) if b.size <= 4]


@settings(max_examples=15)
@given(st.lists(st.sampled_from(_small_vocab()), min_size=1, max_size=3), st.integers(0, 2 ** 32 - 1))
def test_roundtrip_random_congruence(blocks, seed):
    m = realize_form(blocks)
    rng = random.Random(seed)
    n = m.rows
    while True:
        s = Matrix([[rng.randint(-1, 1) for _ in range(n)] for _ in range(n)]) + Matrix.identity(n)
        if s.det() != 0:
            break
    got = classify_form1(s @ m @ s.T)
    assert forms_match(got, CanonicalForm.make("Form1", blocks))
    if not got.ambiguous:
        assert got == CanonicalForm.make("Form1", blocks)


def test_non_square_rejected():
    with pytest.raises(ValueError):
        classify_form1(Matrix([[1, 2]]))


# observed on rational-image beta4 blocks: the resolved sign of a is eps * (-1)^floor(k/2)
@pytest.mark.parametrize("b", [F(3, 4), F(5, 12)])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
@pytest.mark.parametrize("eps", [1, -1])
def test_beta4_sign_of_a_observation(b, k, eps):
    c, d = (1 - b * b) / (1 + b * b), 2 * b / (1 + b * b)
    a_abs, rb = recover_rotation(c, d, k)
    blk = parse_block(f"LWbeta4(k={k},eps={eps:+d},b={b})")
    got = classify_form1(realize(blk))
    assert not got.ambiguous
    assert (got.blocks[0].n.a, got.blocks[0].n.b) == (eps * (-1) ** (k // 2) * a_abs, rb)
