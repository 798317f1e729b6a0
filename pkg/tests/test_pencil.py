from collections import Counter
from fractions import Fraction as F

import pytest
import sympy as sp
from hypothesis import assume, given, settings, strategies as st

from realcong import grids
from realcong.blocks import gamma, h_hat, jordan, lw_block, parse_block, realize
from realcong.matcore import GAUSSIAN, GaussQ, I, Matrix
from realcong.pencil import (
    RealKcf, UnsupportedExact, expected_form_kcf, expected_real_kcf, kcf_equal, kcf_of_congruence, real_kcf,
    realify_equivalence, scalar_json,
)
from strategies import int_matrices, invertible_int


def test_real_kcf_examples():
    k = real_kcf(Matrix.identity(2), jordan(2, 5))
    assert k.real == ((5, 2),) and not (k.right or k.left or k.inf or k.complex)
    z = real_kcf(Matrix([[0]]), Matrix([[0]]))
    assert z.right == (0,) and z.left == (0,)
    m = lw_block("m3", 1)
    k = real_kcf(m.T, m)
    assert k.right == (1,) and k.left == (1,)


def test_real_kcf_infinite_and_complex():
    k = real_kcf(jordan(2, 0), Matrix.identity(2))
    assert k.inf == (2,)
    k = real_kcf(Matrix.identity(2), Matrix([[0, -1], [1, 0]]))
    assert k.complex == ((0, 1, 1),)


def test_expected_examples():
    assert expected_real_kcf(parse_block("R1ii(k=2,N=+1)")) == RealKcf.make(real=[(-1, 2)])
    assert expected_real_kcf(parse_block("R1iii(k=1,a=1/2)")) == RealKcf.make(real=[(F(1, 2), 1), (2, 1)])
    e = expected_real_kcf(parse_block("R1i(k=3)"))
    assert e.right == (1,) and e.left == (1,)


def test_kcf_equal_examples():
    x = RealKcf.make(real=[(2, 1)])
    assert kcf_equal(x, x)
    assert not kcf_equal(x, RealKcf.make(real=[(F(1, 2), 1)]))
    h = h_hat(1, 0, F(1, 2))
    assert kcf_equal(expected_real_kcf(parse_block("R1iv(k=1,a=0,b=1/2)")), real_kcf(h.T, h))


@pytest.mark.parametrize("blk", grids.canonical_grid(3), ids=str)
def test_table_matches_computed(blk):
    m = realize(blk)
    star = blk.family.startswith(("HS", "FHS"))
    assert kcf_equal(kcf_of_congruence(m, star=star), expected_real_kcf(blk))


@settings(max_examples=25)
@given(st.data())
def test_kcf_invariant_under_strict_equivalence(data):
    n = data.draw(st.integers(1, 4))
    e = data.draw(int_matrices(n=n, lo=-2, hi=2))
    a = data.draw(int_matrices(n=n, lo=-2, hi=2))
    r = data.draw(invertible_int(n))
    s = data.draw(invertible_int(n))
    try:
        base = real_kcf(e, a)
    except UnsupportedExact:
        assume(False)
    assert kcf_equal(real_kcf(r @ e @ s, r @ a @ s), base)


def _sympy_jordan_sizes(m: Matrix):
    """Independent oracle: (eigenvalue, block size) multiset from sympy's Jordan form."""
    sm = sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in r] for r in m.data])
    _, j = sm.jordan_form()
    out, i, n = Counter(), 0, j.rows
    while i < n:
        size = 1
        while i + size < n and j[i + size - 1, i + size] == 1:
            size += 1
        out[(sp.nsimplify(j[i, i]), size)] += 1
        i += size
    return out


@settings(max_examples=25)
@given(int_matrices(n=3, lo=-2, hi=2))
def test_regular_part_against_sympy_jordan(a):
    try:
        k = real_kcf(Matrix.identity(3), a)
    except UnsupportedExact:
        assume(False)
    oracle = _sympy_jordan_sizes(a)
    mine = Counter()
    for mu, size in k.real:
        val = sp.Rational(mu.numerator, mu.denominator) if isinstance(mu, F) else sp.sympify(mu)
        mine[(sp.nsimplify(val), size)] += 1
    for re, im, size in k.complex:
        for sgn in (1, -1):
            val = sp.nsimplify(sp.sympify(re) + sgn * sp.I * sp.sympify(im))
            mine[(val, size)] += 1
    assert sum(s * c for (_, s), c in mine.items()) == 3
    assert {(sp.simplify(v), s): c for (v, s), c in mine.items()} == \
        {(sp.simplify(v), s): c for (v, s), c in oracle.items()}


# frozen from sympy.Matrix.jordan_form on fixed inputs
JORDAN_GOLDEN = [
    ([[2, 1, 0], [0, 2, 0], [0, 0, 3]], {(2, 2): 1, (3, 1): 1}),
    ([[1, 1], [-1, 1]], None),
    ([[0, 1, 0], [0, 0, 1], [0, 0, 0]], {(0, 3): 1}),
]


@pytest.mark.parametrize("rows,sizes", JORDAN_GOLDEN)
def test_jordan_golden(rows, sizes):
    k = real_kcf(Matrix.identity(len(rows)), Matrix(rows))
    if sizes is None:
        assert k.complex == ((1, 1, 1),)
    else:
        assert Counter({(int(m), s): 1 for m, s in k.real}) == Counter(sizes)


def test_realify_examples():
    idn = Matrix.identity(2)
    rt, st_, tau = realify_equivalence(idn, idn, (idn, idn), (idn, idn))
    assert (rt, st_, tau) == (idn, idn, 0)
    ii = Matrix.identity(2, GAUSSIAN).scale(I)
    rt, st_, tau = realify_equivalence(ii, ii, (idn, idn), (idn, idn))
    assert tau == 1 and rt == idn and st_ == idn
    with pytest.raises(ValueError):
        realify_equivalence(idn, idn, (idn, idn), (idn.scale(2), idn))


def test_scalar_json():
    assert scalar_json(F(1, 2)) == "1/2"
    assert scalar_json(GaussQ(0, 1)) == "0/1+1/1i"
    j = scalar_json(sp.sqrt(2))
    assert j == {"minpoly": ["-2/1", "0/1", "1/1"], "which": "+"}
    assert scalar_json(-sp.sqrt(2))["which"] == "-"


def test_expected_form_kcf_sums():
    blocks = [parse_block("R1ii(k=2,N=+1)"), parse_block("R1iii(k=1,a=1/2)")]
    e = expected_form_kcf(blocks)
    assert e == RealKcf.make(real=[(-1, 2), (F(1, 2), 1), (2, 1)])
    m = realize(blocks[0])
    assert m == gamma(2)


def test_float_input_rejected():
    m = Matrix([[1.0]], backend="float")
    with pytest.raises(ValueError):
        real_kcf(m, m)
