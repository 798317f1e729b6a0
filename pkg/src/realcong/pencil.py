"""Real Kronecker canonical form of matrix pairs, expected tables, realification.

A pair (E, A) is read as the pencil lambda*E - A; a regular Jordan block
(I_k, J_k(mu)) therefore carries eigenvalue mu and an infinite block is
(J_k(0), I_k).  Minimal indices follow (F_e, G_e) for right and
(F_e^T, G_e^T) for left singular blocks.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import sympy as sp

from .blocks import CanonicalBlock, Rotation, exact, sabs2, seq, skey
from .matcore import (
    FLOAT, GAUSSIAN, RATIONAL, GaussQ, Matrix, block, charpoly, format_scalar, hstack,
    to_sympy,
)

X = sp.Symbol("x")


class UnsupportedExact(ValueError):
    """An irreducible factor of degree >= 3 showed up in exact mode."""


@dataclass(frozen=True)
class RealKcf:
    right: tuple = ()
    left: tuple = ()
    inf: tuple = ()
    real: tuple = ()      # (mu, k); mu may be complex when field == "complex"
    complex: tuple = ()   # (a, b, k) with b > 0
    field: str = "real"
    diagnostics: tuple = dc_field(default=(), compare=False)

    @staticmethod
    def make(right=(), left=(), inf=(), real=(), complex=(), field="real", diagnostics=()):
        return RealKcf(
            tuple(sorted(right)), tuple(sorted(left)), tuple(sorted(inf)),
            tuple(sorted(((exact(m), k) for m, k in real), key=lambda t: (t[1],) + skey(t[0]))),
            tuple(sorted(((exact(a), exact(b), k) for a, b, k in complex),
                         key=lambda t: (t[2],) + skey(t[0]) + skey(t[1]))),
            field, tuple(diagnostics),
        )

    def __add__(self, o):
        return RealKcf.make(self.right + o.right, self.left + o.left, self.inf + o.inf,
                            self.real + o.real, self.complex + o.complex, self.field)

    def size(self):
        rows = sum(self.right) + sum(e + 1 for e in self.left) + sum(self.inf) + sum(k for _, k in self.real) \
            + sum(2 * k for _, _, k in self.complex)
        cols = sum(e + 1 for e in self.right) + sum(self.left) + sum(self.inf) + sum(k for _, k in self.real) \
            + sum(2 * k for _, _, k in self.complex)
        return rows, cols

    def to_dict(self):
        return {
            "right": list(self.right),
            "left": list(self.left),
            "inf": list(self.inf),
            "real": [[scalar_json(m), k] for m, k in self.real],
            "complex": [[scalar_json(a), scalar_json(b), k] for a, b, k in self.complex],
        }


def scalar_json(x):
    if isinstance(x, (Fraction, GaussQ)):
        return format_scalar(x)
    if isinstance(x, (float, complex)):
        return repr(x)
    x = sp.nsimplify(x)
    if x.is_Rational:
        return format_scalar(Fraction(int(x.p), int(x.q)))
    mp = sp.Poly(sp.minimal_polynomial(x, X), X)
    if mp.degree() != 2:
        return sp.sstr(x)
    mp = mp.monic()
    c = mp.all_coeffs()  # [1, c1, c0]
    roots = sorted(sp.Poly(mp, X).all_roots(), key=lambda r: float(r))
    which = "+" if sp.simplify(x - roots[-1]) == 0 else "-"
    return {"minpoly": [format_scalar(Fraction(int(sp.Rational(c[2]).p), int(sp.Rational(c[2]).q))),
                        format_scalar(Fraction(int(sp.Rational(c[1]).p), int(sp.Rational(c[1]).q))), "1/1"],
            "which": which}


def _multiset_eq(xs, ys, key_eq):
    ys = list(ys)
    for x in xs:
        for i, y in enumerate(ys):
            if key_eq(x, y):
                del ys[i]
                break
        else:
            return False
    return not ys


def _close(x, y, tol=1e-7):
    if isinstance(x, (float, complex)) or isinstance(y, (float, complex)):
        return abs(complex(to_sympy(x) if not isinstance(x, (float, complex)) else x)
                   - complex(to_sympy(y) if not isinstance(y, (float, complex)) else y)) <= tol
    return seq(x, y)


def kcf_equal(x: RealKcf, y: RealKcf) -> bool:
    if (x.right, x.left, x.inf) != (y.right, y.left, y.inf):
        return False
    if len(x.real) != len(y.real) or len(x.complex) != len(y.complex):
        return False
    return _multiset_eq(x.real, y.real, lambda p, q: p[1] == q[1] and _close(p[0], q[0])) and \
        _multiset_eq(x.complex, y.complex,
                     lambda p, q: p[2] == q[2] and _close(p[0], q[0]) and _close(p[1], q[1]))


# subspace helpers -----------------------------------------------------------

def _basis(m: Matrix) -> Matrix:
    return m.colspace() if m.cols else m


def _preimage(m: Matrix, sub: Matrix) -> Matrix:
    """Basis of {x : m x in span(sub)}."""
    if sub.cols == 0:
        return m.nullspace()
    ns = hstack(m, -sub).nullspace()
    return _basis(ns.sub(0, m.cols, 0, ns.cols))


def _intersect(u: Matrix, v: Matrix) -> Matrix:
    if u.cols == 0 or v.cols == 0:
        return Matrix.zeros(u.rows, 0, u.backend)
    ns = hstack(u, -v).nullspace()
    return _basis(u @ ns.sub(0, u.cols, 0, ns.cols))


def _sum(u: Matrix, v: Matrix) -> Matrix:
    if u.cols == 0:
        return _basis(v)
    if v.cols == 0:
        return _basis(u)
    return _basis(hstack(u, v))


def _extend(base: Matrix, target: Matrix) -> Matrix:
    """Columns of `target` that extend `base` to a basis of span(base, target)."""
    cur = base
    cols = []
    for j in range(target.cols):
        c = target.select(cols=[j])
        cand = hstack(cur, c) if cur.cols else c
        if cand.rank() > cur.cols:
            cur = cand
            cols.append(j)
    return target.select(cols=cols)


def _full(n, bk):
    return Matrix.identity(n, bk)


def wong_limits(e: Matrix, a: Matrix):
    n = e.cols
    bk = e.backend
    v = _full(n, bk)
    while True:
        nv = _preimage(a, _basis(e @ v) if v.cols else Matrix.zeros(e.rows, 0, bk))
        if nv.cols == v.cols:
            break
        v = nv
    w = Matrix.zeros(n, 0, bk)
    while True:
        nw = _preimage(e, _basis(a @ w) if w.cols else Matrix.zeros(a.rows, 0, bk))
        if nw.cols == w.cols:
            break
        w = nw
    return v, w


def quasi_kronecker(e: Matrix, a: Matrix):
    """Split (E, A) into underdetermined, regular and overdetermined diagonal blocks."""
    bk = e.backend
    m, n = e.rows, e.cols
    v, w = wong_limits(e, a)
    vw = _intersect(v, w)
    p1 = vw
    r1 = _extend(p1, _sum(v, w))
    q1 = _extend(hstack(p1, r1) if (p1.cols + r1.cols) else Matrix.zeros(n, 0, bk), _full(n, bk))
    ev = _basis(e @ v) if v.cols else Matrix.zeros(m, 0, bk)
    aw = _basis(a @ w) if w.cols else Matrix.zeros(m, 0, bk)
    p2 = _intersect(ev, aw)
    r2 = _extend(p2, _sum(ev, aw))
    q2 = _extend(hstack(p2, r2) if (p2.cols + r2.cols) else Matrix.zeros(m, 0, bk), _full(m, bk))
    T = hstack(p1, r1, q1)
    L = hstack(p2, r2, q2)
    Li = L.inverse()
    e2, a2 = Li @ e @ T, Li @ a @ T
    cuts_c = (0, p1.cols, p1.cols + r1.cols, n)
    cuts_r = (0, p2.cols, p2.cols + r2.cols, m)

    def part(x, i, j):
        return x.sub(cuts_r[i], cuts_r[i + 1], cuts_c[j], cuts_c[j + 1])

    for x in (e2, a2):
        for i, j in ((1, 0), (2, 0), (2, 1)):
            if not part(x, i, j).is_zero():
                raise ArithmeticError("quasi-Kronecker triangularization failed")
    return (part(e2, 0, 0), part(a2, 0, 0)), (part(e2, 1, 1), part(a2, 1, 1)), (part(e2, 2, 2), part(a2, 2, 2))


def _right_indices(e: Matrix, a: Matrix):
    """Right minimal indices of an underdetermined pencil via null spaces of block Toeplitz matrices."""
    m, n = e.rows, e.cols
    count = n - m
    if count <= 0:
        return []
    bk = e.backend
    found = []
    prev = [0, 0]  # N_{d-1}, N_{d-2}
    d = 0
    while len(found) < count:
        rows = []
        for i in range(d + 2):
            row = []
            for j in range(d + 1):
                if i == j:
                    row.append(-a)
                elif i == j + 1:
                    row.append(e)
                else:
                    row.append(Matrix.zeros(m, n, bk))
            rows.append(row)
        big = block(rows)
        nd = big.cols - big.rank()
        c = nd - 2 * prev[0] + prev[1]
        found += [d] * c
        prev = [nd, prev[0]]
        d += 1
        if d > n + 1:
            raise ArithmeticError("minimal index search did not terminate")
    return found


# Jordan structure of a single matrix per irreducible factor ----------------------

def _poly_eval(coeffs, m: Matrix) -> Matrix:
    """Horner evaluation of a polynomial with exact coefficients (highest first)."""
    n = m.rows
    out = Matrix.zeros(n, n, m.backend)
    for c in coeffs:
        out = out @ m + Matrix.identity(n, m.backend).scale(_to_exact(c))
    return out


def _to_exact(c):
    from .matcore import from_sympy
    return from_sympy(c)


def factor_structure(m: Matrix, complex_field=False):
    """[(factor Poly, partition)] for the irreducible factors of the characteristic polynomial."""
    cp = charpoly(m)
    dom = sp.QQ_I if (complex_field or m.backend == GAUSSIAN) else sp.QQ
    poly = sp.Poly(cp, X, domain=dom)
    _, facs = poly.factor_list()
    out = []
    for g, mult in facs:
        g = g.monic()
        d = g.degree()
        gm = _poly_eval(g.all_coeffs(), m)
        part = _partition_from_nullities(gm, d, mult)
        out.append((g, part))
    return out


def _partition_from_nullities(gm: Matrix, d: int, mult: int):
    nulls = [0]
    p = gm
    while nulls[-1] < mult:
        nulls.append((p.cols - p.rank()) // d)
        if len(nulls) > mult + 2:
            raise ArithmeticError("Jordan chain search did not terminate")
        p = p @ gm
    ge = [nulls[j] - nulls[j - 1] for j in range(1, len(nulls))]  # blocks of size >= j
    ge.append(0)
    part = []
    for j in range(1, len(ge)):
        part += [j] * (ge[j - 1] - ge[j])
    return sorted(part, reverse=True)


def _root_values(g: sp.Poly, complex_field: bool, float_fallback: bool):
    """Roots of a monic irreducible factor as exact scalars (or floats in fallback)."""
    d = g.degree()
    if d == 1:
        return [("lin", exact(-g.all_coeffs()[1]))]
    if d == 2 and not complex_field:
        _, p, q = g.all_coeffs()
        disc = p * p - 4 * q
        if disc < 0:
            return [("pair", exact(-p / 2), sp.sqrt(-disc) / 2)]
        r = sp.sqrt(disc)
        return [("lin", (-p + r) / 2), ("lin", (-p - r) / 2)]
    if not float_fallback:
        raise UnsupportedExact(f"irreducible factor of degree {d}; rerun with float fallback")
    import numpy as np

    roots = np.roots([complex(sp.N(c)) for c in g.all_coeffs()])
    if complex_field:
        return [("lin", complex(r)) for r in roots]
    out = []
    for r in roots:
        if abs(r.imag) <= 1e-9:
            out.append(("lin", float(r.real)))
        elif r.imag > 0:
            out.append(("pair", float(r.real), float(r.imag)))
    return out


def _mobius_factor(g: sp.Poly, c):
    """Monic factor whose roots are c + 1/nu for roots nu of g (g(0) != 0)."""
    d = g.degree()
    shift = sp.Poly(X - c, X, domain=g.domain)
    out = sp.Poly(0, X, domain=g.domain)
    for i, gi in enumerate(reversed(g.all_coeffs())):
        out = out + shift ** (d - i) * gi
    return out.monic()


def _regular_kcf(e: Matrix, a: Matrix, complex_field: bool, float_fallback: bool):
    n = e.rows
    if n == 0:
        return [], [], []
    c = None
    for cand in (0, 1, -1, 2, -2, 3, -3, 5, 7, 11, 13):
        if (a - e.scale(cand)).det() != 0:
            c = Fraction(cand)
            break
    if c is None:
        raise ArithmeticError("could not find a regular shift")
    mm = (a - e.scale(c)).inverse() @ e
    inf, real, cplx = [], [], []
    for g, part in factor_structure(mm, complex_field):
        coeffs = g.all_coeffs()
        if g.degree() == 1 and coeffs[1] == 0:
            inf += part
            continue
        h = _mobius_factor(g, to_sympy(c))
        for root in _root_values(h, complex_field, float_fallback):
            if root[0] == "lin":
                real += [(root[1], k) for k in part]
            else:
                cplx += [(root[1], root[2], k) for k in part]
    return inf, real, cplx


def _field_of(*ms):
    return "complex" if any(m.backend == GAUSSIAN and not m.is_real() for m in ms) else "real"


def real_kcf(e: Matrix, a: Matrix, float_fallback=False, field=None) -> RealKcf:
    """Kronecker structure of the pair (e, a)."""
    if e.shape != a.shape:
        raise ValueError("pair matrices must have the same shape")
    if e.backend == FLOAT or a.backend == FLOAT:
        raise ValueError("float input: convert to an exact backend first")
    field = field or _field_of(e, a)
    if field == "real":
        e, a = e.to_backend(RATIONAL) if e.is_real() else e, a.to_backend(RATIONAL) if a.is_real() else a
    else:
        e, a = e.to_backend(GAUSSIAN), a.to_backend(GAUSSIAN)
    (ep, ap), (er, ar), (eq, aq) = quasi_kronecker(e, a)
    right = _right_indices(ep, ap)
    left = _right_indices(eq.T, aq.T)
    inf, real, cplx = _regular_kcf(er, ar, field == "complex", float_fallback)
    diag = ("float-fallback",) if any(isinstance(v, (float, complex)) for v, _ in real) else ()
    return RealKcf.make(right, left, inf, real, cplx, field, diag)


def kcf_of_congruence(m: Matrix, star=False, **kw) -> RealKcf:
    """KCF of (M^T, M), or (M^*, M) when star is set."""
    return real_kcf(m.H if star else m.T, m, **kw)


# expected tables ----------------------------------------------------------------

def _singular_j0(k, field):
    l = k // 2
    if k % 2:
        return RealKcf.make(right=[l], left=[l], field=field)
    return RealKcf.make(inf=[l], real=[(0, l)], field=field)


def _gamma_n(k, n):
    if isinstance(n, Rotation):
        a, b = n.a, n.b
        if seq(a, 0):
            return RealKcf.make(real=[((-1) ** k, k), ((-1) ** k, k)])
        c = exact(sp.nsimplify((-1) ** (k + 1) * (to_sympy(a) ** 2 - to_sympy(b) ** 2)))
        d = exact(sp.nsimplify(2 * sp.Abs(to_sympy(a) * to_sympy(b))))
        return RealKcf.make(complex=[(c, d, k)])
    return RealKcf.make(real=[((-1) ** (k + 1), k)])


def _pair_partner(a, b):
    r = sabs2(a) + sabs2(b)
    return a / r, b / r


def _conj(x):
    return x.conjugate() if isinstance(x, GaussQ) else x


def expected_real_kcf(blk: CanonicalBlock) -> RealKcf:
    f, k = blk.family, blk.k
    if f == "R1-i":
        return _singular_j0(k, "real")
    if f in ("R1-ii", "R2-TriIII"):
        return _gamma_n(k, blk.n)
    if f == "R1-iii":
        return RealKcf.make(real=[(blk.a, k), (1 / blk.a, k)])
    if f in ("R1-iv", "R2-TriII"):
        pa, pb = _pair_partner(blk.a, blk.b)
        return RealKcf.make(complex=[(blk.a, blk.b, k), (pa, pb, k)])
    if f == "R2-TriI":
        if k % 2 or blk.a == 0:
            return _singular_j0(k, "real")
        return RealKcf.make(real=[(blk.a, k // 2), (1 / blk.a, k // 2)])
    if f == "HS-Type0":
        return _singular_j0(k, "complex")
    if f in ("HS-TypeI", "FHS-TriII"):
        mu = GaussQ.coerce(blk.mu)
        return RealKcf.make(real=[(mu * mu * (-1) ** (k + 1), k)], field="complex")
    if f == "HS-TypeII":
        mu = GaussQ.coerce(blk.mu)
        return RealKcf.make(real=[(mu, k), (1 / mu.conjugate(), k)], field="complex")
    if f == "FHS-TriI":
        if k % 2 or blk.mu == 0:
            return _singular_j0(k, "complex")
        mu = GaussQ.coerce(blk.mu)
        return RealKcf.make(real=[(mu, k // 2), (1 / mu.conjugate(), k // 2)], field="complex")
    if f.startswith("LW-"):
        from .classify import lw_to_form1

        out = RealKcf.make()
        for b in lw_to_form1(blk, allow_degenerate=True).blocks:
            out = out + expected_real_kcf(b)
        return out
    raise ValueError(f"no table for family {f}")


def expected_form_kcf(blocks) -> RealKcf:
    field = "complex" if any(b.family.startswith(("HS", "FHS")) for b in blocks) else "real"
    out = RealKcf.make(field=field)
    for b in blocks:
        out = out + expected_real_kcf(b)
    return RealKcf.make(out.right, out.left, out.inf, out.real, out.complex, field)


# realification -----------------------------------------------------------------

def realify_equivalence(r: Matrix, s: Matrix, pair1, pair2):
    """Real (R~, S~) = (R_r + t R_i, S_r + t S_i) with R~ (A, B) = (C, D) S~ and both invertible."""
    a, b = pair1
    c, d = pair2
    if not (r @ a == c @ s and r @ b == d @ s):
        raise ValueError("premise R(A,B) = (C,D)S fails")
    if r.det() == 0 or s.det() == 0:
        raise ValueError("R and S must be invertible")
    rr, ri = r.real_part(), r.imag_part()
    sr, si = s.real_part(), s.imag_part()
    limit = r.rows + s.rows + 1
    for tau in range(limit + 1):
        rt, st = rr + ri.scale(tau), sr + si.scale(tau)
        if rt.det() != 0 and st.det() != 0:
            assert rt @ a == c @ st and rt @ b == d @ st
            return rt, st, tau
    raise ArithmeticError("no admissible tau found")  # impossible: p*q has at most m+n roots
