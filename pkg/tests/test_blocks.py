from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from realcong import grids
from realcong.blocks import (
    BlockError, c_jordan, c_rot, f_block, g_block, gamma, gamma_tilde, h_block, h_hat, jordan,
    lw_aux, lw_block, parse_block, parse_form, format_form, realize, realize_form, sym_parts,
    t_block, t_hat,
)
from realcong.matcore import Matrix, charpoly


def test_jordan():
    assert jordan(1, 5) == Matrix([[5]])
    assert jordan(2, 0) == Matrix([[0, 1], [0, 0]])
    h = F(1, 2)
    assert jordan(3, h) == Matrix([[h, 1, 0], [0, h, 1], [0, 0, h]])


def test_gamma_displays():
    assert gamma(1) == Matrix([[1]])
    assert gamma(2) == Matrix([[0, -1], [1, 1]])
    assert gamma(3) == Matrix([[0, 0, 1], [0, -1, -1], [1, 1, 0]])
    assert gamma_tilde(4) == Matrix([[1, 1, 0, 0], [-1, 0, 1, 0], [0, 1, 0, 1], [0, 0, -1, 0]])


@pytest.mark.parametrize("k", range(1, 7))
def test_gamma_closed_rule(k):
    g = gamma(k)
    # anti-diagonal entry in column i (1-based) is (-1)^(k-i) scaled so that entry (k,1) is 1
    for i in range(1, k + 1):
        assert g[k - i, i - 1] == (-1) ** (i - 1)
    assert g[k - 1, 0] == 1
    # corner entries of the display
    assert g[0, k - 1] == (-1) ** (k + 1)
    if k > 1:
        assert g[k - 1, 1] == 1


def test_h_blocks():
    assert h_block(1, 3) == Matrix([[0, 1], [3, 0]])
    assert h_block(1, 0) == jordan(2, 0)
    m = h_block(2, F(1, 2))
    assert m.sub(0, 2, 2, 4) == Matrix.identity(2) and m.sub(2, 4, 0, 2) == jordan(2, F(1, 2))


def test_rotation_blocks():
    assert c_rot(0, 1) == Matrix([[0, 1], [-1, 0]])
    c = c_rot(F(3, 5), F(4, 5))
    m = c_jordan(2, F(3, 5), F(4, 5))
    assert m.sub(0, 2, 0, 2) == c and m.sub(0, 2, 2, 4) == Matrix.identity(2) and m.sub(2, 4, 0, 2).is_zero()
    h = F(1, 2)
    assert h_hat(1, 0, h) == Matrix([[0, 0, 1, 0], [0, 0, 0, 1], [0, h, 0, 0], [-h, 0, 0, 0]])


def test_tridiagonal_blocks():
    assert t_block(1, 7) == Matrix([[0]])
    assert t_block(3, 2) == Matrix([[0, 1, 0], [2, 0, 1], [0, 2, 0]])
    assert t_hat(1, F(1, 3), F(1, 2)).is_zero() and t_hat(1, 1, 1).shape == (2, 2)


def test_singular_blocks():
    assert f_block(0).shape == (0, 1)
    assert f_block(2) == Matrix([[1, 0, 0], [0, 1, 0]])
    assert g_block(1) == Matrix([[0, 1]])


def test_lw_aux():
    assert lw_aux("Delta", 2) == Matrix([[0, 1], [1, 0]])
    assert lw_aux("Lambda", 2) == Matrix([[0, 0], [0, 1]])
    assert lw_aux("SDelta", 3) == Matrix([[0, 0, 0], [0, 0, 1], [0, -1, 0]])
    assert lw_aux("Lambda", 1).is_zero()


@pytest.mark.parametrize("k", range(1, 7))
def test_lambda_rule(k):
    lam = lw_aux("Lambda", k)
    ones = {(i - 1, k + 1 - i) for i in range(2, k + 1)}
    assert all(lam[i, j] == (1 if (i, j) in ones else 0) for i in range(k) for j in range(k))


def test_lw_examples():
    assert lw_block("m3", 0) == Matrix([[0]])
    assert lw_block("inf4", 2, eps=1) == Matrix([[0, 1], [-1, 1]])
    assert lw_block("alpha3", 1, alpha=2) == Matrix([[0, 3], [-1, 0]])


@pytest.mark.parametrize("blk,deg", grids.lw_grid(3))
def test_lw_shapes(blk, deg):
    m = realize(blk)
    assert m.shape == (blk.size, blk.size)
    if blk.family in ("LW-m3", "LW-inf5", "LW-o4", "LW-alpha3", "LW-beta5") and blk.k > 0:
        h = blk.size // 2 if blk.family != "LW-m3" else blk.k + 1
        assert m.sub(0, h, 0, h).is_zero() and m.sub(h, m.rows, h, m.cols).is_zero()
    if blk.family == "LW-beta5":
        x, y = sym_parts(m)
        assert x.is_symmetric() and y.is_symmetric()
        if not deg:
            assert x.det() != 0 and y.det() != 0


def test_realize_examples():
    assert realize(parse_block("R1ii(k=2,N=+1)")) == gamma(2)
    a, b = F(3, 5), F(4, 5)
    assert realize(parse_block("R1ii(k=1,N=C(3/5,4/5))")) == Matrix([[a, b], [-b, a]])
    assert realize(parse_block("R1i(k=2)")) == jordan(2, 0)


def test_validation():
    with pytest.raises(BlockError):
        parse_block("R1ii(k=2,N=C(3/5,-4/5))")
    with pytest.raises(BlockError):
        parse_block("R1iii(k=1,a=1)")
    with pytest.raises(BlockError):
        parse_block("R2TriI(k=3,a=1/2)")
    with pytest.raises(BlockError):
        parse_block("LWinf4(k=3,eps=+1)")
    with pytest.raises(BlockError):
        parse_block("LWbeta5(k=1,a=0,b=1)")
    with pytest.raises(BlockError):
        parse_block("HSTypeI(k=1,mu=2)")


def test_normalization():
    assert parse_block("R1iii(k=1,a=2)").a == F(1, 2)
    b = parse_block("R1iv(k=1,a=0,b=2)")
    assert (b.a, b.b) == (0, F(1, 2))
    with pytest.raises(BlockError):
        parse_block("R1iii(k=1,a=2)", normalize=False)


@given(st.sampled_from(grids.canonical_grid(3) + [b for b, d in grids.lw_grid(3) if not d]))
def test_spec_roundtrip(b):
    again = parse_block(b.spec())
    assert again == b and again.spec() == b.spec()


@given(st.lists(st.sampled_from(grids.form1_grid(2)), min_size=1, max_size=4))
def test_form_ordering_is_canonical(blocks):
    text = format_form(blocks)
    assert format_form(parse_form(text)) == text
    assert realize_form(blocks) == realize_form(list(reversed(blocks)))
    assert format_form(list(reversed(blocks))) == text


@pytest.mark.parametrize("k", range(1, 11))
def test_gamma_cosquare_charpoly(k):
    g = gamma(k)
    q = g.T.inverse() @ g
    d = (-1) ** (k + 1)
    shifted = q - Matrix.identity(k).scale(d)
    assert k - shifted.rank() == 1
    import sympy as sp

    x = sp.Symbol("x")
    assert sp.expand(sp.Poly(charpoly(q), x).as_expr() - (x - d) ** k) == 0
