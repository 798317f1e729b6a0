from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from realcong.blocks import c_rot, gamma, h_block, jordan, realize_form, parse_form
from realcong.classify import BETA4_INSTANCE, beta5_instance
from realcong.matcore import Inertia, Matrix, direct_sum, kron
from realcong.pencil import kcf_of_congruence, kcf_equal
from realcong.verify import (
    check_congruence, check_similarity, congruence_invariant_profile, filtered_profile, nonsingular_core,
    z_block, z_block_nullity,
)
from strategies import int_matrices, invertible_int


def _cosquare(m):
    return m.T.inverse() @ m


def test_similarity_examples():
    assert check_similarity(_cosquare(gamma(3)), jordan(3, 1))
    assert check_similarity(_cosquare(gamma(2)), jordan(2, -1))
    assert not check_similarity(jordan(2, 0), Matrix.zeros(2, 2))
    assert not check_similarity(jordan(2, 1), jordan(3, 1))


@settings(max_examples=25)
@given(st.data())
def test_similarity_invariant(data):
    a = data.draw(int_matrices(n=3, lo=-2, hi=2))
    s = data.draw(invertible_int(3))
    assert check_similarity(a, s @ a @ s.inverse())


def test_z_block_examples():
    assert z_block_nullity(*BETA4_INSTANCE, 2) == (1, True)
    # Z_2(0, I) = [[0, 0], [0, I]]: nullity 2 = dim N(0), and C(I^-1 0) = {0}
    assert z_block_nullity(Matrix.zeros(2, 2), Matrix.identity(2), 2) == (2, True)
    # A nilpotent, B = I: N(A) = C(A), so the criterion fails
    assert z_block_nullity(jordan(2, 0), Matrix.identity(2), 2) == (2, False)
    assert z_block_nullity(Matrix.identity(2), Matrix.identity(2), 2) == (0, True)
    with pytest.raises(ValueError):
        z_block_nullity(Matrix.identity(2), Matrix.identity(2), 1)
    with pytest.raises(ZeroDivisionError):
        z_block_nullity(Matrix.identity(2), Matrix.zeros(2, 2), 2)


def test_z_block_layout():
    a, b = Matrix([[1]]), Matrix([[2]])
    assert z_block(a, b, 3) == Matrix([[0, 0, 1], [0, 1, 2], [1, 2, 0]])


@pytest.mark.parametrize("a,b", [(1, 1), (F(1, 2), 2), (2, F(1, 2))])
def test_beta5_instance_nullity(a, b):
    za, zb = beta5_instance(a, b)
    for k in (2, 3):
        assert z_block_nullity(za, zb, k) == (1, True)


@settings(max_examples=30)
@given(st.data())
def test_z_criterion_equivalence(data):
    n = data.draw(st.integers(1, 3))
    a = data.draw(int_matrices(n=n, lo=-1, hi=1))
    b = data.draw(invertible_int(n))
    k = data.draw(st.integers(2, 3))
    nul, crit = z_block_nullity(a, b, k)
    assert (nul == a.cols - a.rank()) == crit


def test_profile_examples():
    assert congruence_invariant_profile(Matrix.diag([1, -1]), 0) == [Inertia(1, 1, 0)]
    g = gamma(2)
    assert congruence_invariant_profile(g, 0) == [Inertia(1, 0, 1)]
    assert congruence_invariant_profile(g.scale(-1), 0) == [Inertia(0, 1, 1)]


@settings(max_examples=25)
@given(st.data())
def test_profile_is_congruence_invariant(data):
    n = data.draw(st.integers(1, 4))
    a = data.draw(int_matrices(n=n, lo=-2, hi=2))
    s = data.draw(invertible_int(n))
    b = s @ a @ s.T
    assert congruence_invariant_profile(b, 2) == congruence_invariant_profile(a, 2)
    assert check_congruence(s, a, b)


@settings(max_examples=25)
@given(st.data())
def test_filtered_profile_is_congruence_invariant(data):
    n = data.draw(st.integers(1, 4))
    a = data.draw(int_matrices(n=n, lo=-2, hi=2))
    s = data.draw(invertible_int(n))
    factors = ((1, 2), (-1, 2), (("quad", F(0)), 1))
    assert filtered_profile(s @ a @ s.T, factors) == filtered_profile(a, factors)


def test_profile_blind_spot_and_filtered_fix():
    # direct-sum additivity makes the plain profile identical for these two
    a = realize_form(parse_form("R1ii(k=2,N=+1)+R1ii(k=4,N=+1)"))
    b = realize_form(parse_form("R1ii(k=2,N=-1)+R1ii(k=4,N=-1)"))
    assert congruence_invariant_profile(a, 6) == congruence_invariant_profile(b, 6)
    assert filtered_profile(a, ((-1, 4),)) != filtered_profile(b, ((-1, 4),))


@settings(max_examples=20)
@given(st.data())
def test_nonsingular_core_keeps_regular_part(data):
    n = data.draw(st.integers(1, 4))
    a = data.draw(int_matrices(n=n, lo=-1, hi=1))
    core = nonsingular_core(a)
    assert core.rows == 0 or core.det() != 0
    ka, kc = kcf_of_congruence(a, float_fallback=True), kcf_of_congruence(core, float_fallback=True)
    nonzero = lambda k: type(k).make(real=[r for r in k.real if r[0] != 0], complex=k.complex)
    assert kcf_equal(nonzero(ka), nonzero(kc))


def test_nonsingular_core_examples():
    assert nonsingular_core(jordan(3, 0)).rows == 0
    m = direct_sum(direct_sum(jordan(2, 0), c_rot(0, 1)), gamma(1))
    assert nonsingular_core(m).rows == 3
    m = direct_sum(h_block(1, 0), gamma(2))
    assert kcf_equal(kcf_of_congruence(nonsingular_core(m)), kcf_of_congruence(gamma(2)))


def test_check_congruence_star():
    from realcong.matcore import GAUSSIAN, I
    s = Matrix.identity(1, GAUSSIAN).scale(I)
    a = Matrix([[1]]).to_backend(GAUSSIAN)
    assert check_congruence(s, a, a, star=True)
    assert not check_congruence(s, a, a)
    assert kron(gamma(1), gamma(1)) == gamma(1)
