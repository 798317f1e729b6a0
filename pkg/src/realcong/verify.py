"""Cross-cutting oracles: similarity, the Z_k(A,B) null-space criterion,
and congruence invariants (inertia profile on the nonsingular core)."""
from __future__ import annotations

from fractions import Fraction

from .matcore import GAUSSIAN, RATIONAL, Inertia, Matrix, hstack, inertia_of_symmetric, kron, sym
from .pencil import factor_structure


def check_similarity(a: Matrix, b: Matrix) -> bool:
    """Structural similarity test: same irreducible factors and same rank sequences."""
    if a.shape != b.shape or not a.is_square():
        return False
    cplx = GAUSSIAN in (a.backend, b.backend)
    sa = factor_structure(a, cplx)
    sb = factor_structure(b, cplx)
    key = lambda t: (t[0].degree(), str(t[0].as_expr()))
    sa, sb = sorted(sa, key=key), sorted(sb, key=key)
    if len(sa) != len(sb):
        return False
    return all(ga == gb and pa == pb for (ga, pa), (gb, pb) in zip(sa, sb))


def z_block(a: Matrix, b: Matrix, k: int) -> Matrix:
    """A on the block anti-diagonal, B immediately to its right."""
    anti = Matrix.from_function(k, k, lambda i, j: 1 if i + j == k - 1 else 0)
    nxt = Matrix.from_function(k, k, lambda i, j: 1 if i + j == k else 0)
    bk = GAUSSIAN if GAUSSIAN in (a.backend, b.backend) else RATIONAL
    return kron(anti.to_backend(bk), a.to_backend(bk)) + kron(nxt.to_backend(bk), b.to_backend(bk))


def z_block_nullity(a: Matrix, b: Matrix, k: int):
    """(dim N(Z_k(A,B)), [N(A) meets C(B^-1 A) only in 0]); asserts the equivalence."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if b.det() == 0:
        raise ZeroDivisionError("B must be invertible")
    z = z_block(a, b, k)
    nullity = z.cols - z.rank()
    na = a.nullspace()
    cb = (b.inverse() @ a).colspace()
    if na.cols == 0 or cb.cols == 0:
        criterion = True
    else:
        criterion = hstack(na, cb).rank() == na.cols + cb.cols
    assert (nullity == na.cols) == criterion, "null-space criterion violated"
    return nullity, criterion


def _extend_to_basis(base: Matrix, n: int) -> Matrix:
    cur = base
    cols = []
    eye = Matrix.identity(n, base.backend)
    for j in range(n):
        c = eye.select(cols=[j])
        cand = hstack(cur, c) if cur.cols else c
        if cand.rank() > cur.cols:
            cur = cand
            cols.append(j)
    return eye.select(cols=cols)


def nonsingular_core(a: Matrix) -> Matrix:
    """A nonsingular matrix B with A congruent to B plus nilpotent Jordan blocks.

    Each pass takes the right radical K and the subspace W of vectors v with
    K^T A v = 0. K lies in both radicals of A restricted to W, so A induces a
    form on W/K; that smaller form has the same regular part, and the step
    repeats until nothing singular is left.
    """
    while a.rows and a.det() == 0:
        k = a.nullspace()
        c = _extend_to_basis(k, a.rows)
        if c.cols == 0:
            return Matrix.zeros(0, 0, a.backend)
        a21 = k.T @ a @ c
        b1 = c @ a21.nullspace() if a21.rank() else c
        if b1.cols == 0:
            return Matrix.zeros(0, 0, a.backend)
        a = b1.T @ a @ b1
    return a


def congruence_invariant_profile(a: Matrix, m_max: int = 3):
    """Inertias of sym(M (M^-T M)^m), m = 0..m_max, on the nonsingular core.

    For singular input the list starts with the inertia of sym(A) itself.
    """
    if a.backend != RATIONAL:
        a = a.to_backend(RATIONAL)
    out = []
    core = a
    if a.rows and a.det() == 0:
        out.append(inertia_of_symmetric(sym(a)))
        core = nonsingular_core(a)
    if core.rows == 0:
        return out or [Inertia(0, 0, 0)]
    q = core.T.inverse() @ core
    cur = core
    for _ in range(m_max + 1):
        out.append(inertia_of_symmetric(sym(cur)))
        cur = cur @ q
    return out


def check_congruence(s: Matrix, a: Matrix, b: Matrix, star=False) -> bool:
    return (s @ a @ (s.H if star else s.T)) == b


def filtered_profile(a: Matrix, factors=(), m_max: int = 1):
    """Inertias of sym(M p(Q)) with Q = M^-T M on the nonsingular core.

    ``factors`` holds (f, jmax) with f either a sign d (for Q - dI) or
    ("quad", c) (for Q^2 - 2cQ + I). p runs over f(Q)^j Q^m and
    f(Q)^j Q^m (Q - Q^-1) for j < jmax, m <= m_max. Each such matrix maps to
    a congruent one under A -> S A S^T, so the inertias are invariants; they
    refine the plain profile by isolating the nilpotent levels of each
    unit-circle eigenvalue.
    """
    if a.backend != RATIONAL:
        a = a.to_backend(RATIONAL)
    core = nonsingular_core(a) if a.rows and a.det() == 0 else a
    n = core.rows
    if n == 0:
        return []
    q = core.T.inverse() @ core
    skew = q - q.inverse()
    eye = Matrix.identity(n)
    out = []
    for f, jmax in factors:
        if isinstance(f, tuple):
            fm = q @ q - q.scale(Fraction(2) * f[1]) + eye
        else:
            fm = q - eye.scale(f)
        p = core
        for _ in range(jmax):
            z = p
            for _ in range(m_max + 1):
                out.append(inertia_of_symmetric(sym(z)))
                out.append(inertia_of_symmetric(sym(z @ skew)))
                z = z @ q
            p = p @ fm
            if p.is_zero():
                break
    return out
