from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from realcong.blocks import gamma
from realcong.matcore import (
    GAUSSIAN, BackendMismatch, GaussQ, I, Matrix, direct_sum, format_scalar, inertia_of_symmetric, kron,
    parse_scalar, rank, sym,
)
from strategies import fractions, gaussians, int_matrices, invertible_int


def test_direct_sum_examples():
    assert direct_sum(Matrix([[1]]), Matrix([[2]])) == Matrix([[1, 0], [0, 2]])
    assert direct_sum(Matrix.zeros(0, 0), Matrix([[5]])) == Matrix([[5]])
    assert direct_sum(gamma(1), gamma(1)) == Matrix.identity(2)


def test_kron_examples():
    swap = Matrix([[0, 1], [1, 0]])
    assert kron(swap, Matrix.identity(2)) == Matrix([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
    assert kron(gamma(2), Matrix([[-1]])) == Matrix([[0, 1], [-1, -1]])
    x = Matrix([[1, 2, 3], [4, 5, 6]])
    assert kron(Matrix.identity(1), x) == x


def test_backend_mismatch():
    with pytest.raises(BackendMismatch):
        direct_sum(Matrix([[1]]), Matrix([[I]]))


def test_inertia_examples():
    assert inertia_of_symmetric(Matrix.diag([1, -1])).as_tuple() == (1, 1, 0)
    assert sym(gamma(2)) == Matrix([[0, 0], [0, 1]])
    assert inertia_of_symmetric(sym(gamma(2))).as_tuple() == (1, 0, 1)
    with pytest.raises(ValueError):
        inertia_of_symmetric(gamma(2))


def test_rank_examples():
    assert rank(Matrix.identity(3)) == 3
    assert rank(Matrix([[0, 1], [0, 0]])) == 1


def test_scalar_format():
    assert format_scalar(Fraction(-2, 4)) == "-1/2"
    assert format_scalar(Fraction(3)) == "3/1"
    assert format_scalar(GaussQ(0, 1)) == "0/1+1/1i"
    assert format_scalar(GaussQ(Fraction(1, 2), Fraction(-3, 4))) == "1/2-3/4i"
    assert parse_scalar("i") == I
    assert parse_scalar("(1+2i)/2") == GaussQ(Fraction(1, 2), 1)


@given(st.one_of(fractions, gaussians))
def test_scalar_roundtrip(x):
    assert parse_scalar(format_scalar(x)) == x


@given(int_matrices(), st.booleans())
def test_json_roundtrip(m, cplx):
    if cplx:
        m = m.to_backend(GAUSSIAN).scale(GaussQ(1, 2))
    assert Matrix.from_json(m.to_json()) == m
    assert " " not in m.to_json()


def _numpy_inertia(m):
    ev = np.linalg.eigvalsh(np.array([[float(x) for x in r] for r in m.data]))
    tol = 1e-9 * max(1.0, float(np.abs(ev).max(initial=0)))
    return int((ev > tol).sum()), int((ev < -tol).sum()), int((abs(ev) <= tol).sum())


@given(int_matrices())
def test_inertia_matches_eigenvalue_oracle(m):
    s = m + m.T
    assert inertia_of_symmetric(s).as_tuple() == _numpy_inertia(s)


@given(st.data())
def test_sylvester_law(data):
    m = data.draw(int_matrices())
    s = data.draw(invertible_int(m.rows))
    a = m + m.T
    assert inertia_of_symmetric(s @ a @ s.T) == inertia_of_symmetric(a)


@given(int_matrices())
def test_nullspace_and_rank(m):
    ns = m.nullspace()
    assert ns.cols == m.cols - m.rank()
    assert (m @ ns).is_zero() if ns.cols else True


@given(st.data())
def test_inverse_and_det(data):
    n = data.draw(st.integers(1, 4))
    s = data.draw(invertible_int(n))
    assert s @ s.inverse() == Matrix.identity(n)
    t = data.draw(invertible_int(n))
    assert (s @ t).det() == s.det() * t.det()


@given(int_matrices(hi=3), int_matrices(hi=3), int_matrices(hi=3), int_matrices(hi=3))
def test_kron_mixed_product(a, b, c, d):
    if a.cols != c.rows or b.cols != d.rows:
        c = Matrix.identity(a.cols)
        d = Matrix.identity(b.cols)
    assert kron(a, b) @ kron(c, d) == kron(a @ c, b @ d)


def test_charpoly_small():
    from realcong.matcore import charpoly

    p = charpoly(Matrix([[0, -1], [1, 0]]))
    assert [int(c) for c in p] == [1, 0, 1]
