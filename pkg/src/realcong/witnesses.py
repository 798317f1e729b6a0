"""Explicit congruence / equivalence witnesses and a uniform checker.

Witnesses that involve the unitary 2x2 matrix W (entries with 1/sqrt(2))
store sqrt(2)*W instead, together with ``scale = 1/2``: the checked
identity is ``scale * (X A X^*) == B``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .blocks import (
    BlockError, c_jordan, c_rot, exact, flip, gamma, gamma_tilde, h_block, h_hat, jordan, lw_block,
    t_block, t_hat,
)
from .matcore import GAUSSIAN, GaussQ, I, Matrix, block, direct_sum, kron, permutation_matrix

CONG_T = "congruence-T"
CONG_STAR = "congruence-star"
STRICT = "strict-equivalence"


@dataclass(frozen=True)
class Witness:
    transform: object  # Matrix, or (R, S) for strict equivalence
    relation: str
    source: object
    target: object
    scale: Fraction = Fraction(1)
    name: str = ""
    info: dict = field(default_factory=dict, compare=False)


def _apply(w: Witness, x: Matrix) -> Matrix:
    t = w.transform
    if w.relation == CONG_T:
        return (t @ x @ t.T).scale(w.scale)
    if w.relation == CONG_STAR:
        return (t @ x @ t.H).scale(w.scale)
    raise ValueError(f"unknown relation {w.relation}")


def check_witness(w: Witness) -> bool:
    if w.relation == STRICT:
        r, s = w.transform
        (a, b), (c, d) = w.source, w.target
        if r.cols != a.rows or a.cols != s.rows:
            raise ValueError("dimension mismatch")
        return (r @ a @ s).scale(w.scale) == c and (r @ b @ s).scale(w.scale) == d
    t, a, b = w.transform, w.source, w.target
    if t.cols != a.rows or a.rows != a.cols or t.rows != b.rows:
        raise ValueError("dimension mismatch")
    return _apply(w, a) == b


def congruence(s, a, b, star=False, scale=1, name="") -> Witness:
    return Witness(s, CONG_STAR if star else CONG_T, a, b, Fraction(scale), name)


# complex unitary pieces ------------------------------------------------------

SQRT2_W = Matrix([[-I, -I], [1, -1]])


def _split_mu(mu):
    mu = GaussQ.coerce(exact(mu))
    if mu.im == 0:
        raise BlockError("witness needs a non-real mu (b != 0)")
    return mu, mu.re, mu.im


def w_matrix(mu) -> Witness:
    """sqrt(2)W certifies diag(mu, conj mu) -> C(a, b) under *congruence."""
    mu, a, b = _split_mu(mu)
    src = Matrix.diag([mu, mu.conjugate()])
    return congruence(SQRT2_W, src, c_rot(a, b).to_backend(GAUSSIAN), True, Fraction(1, 2), "W")


def interleave_perm(k: int) -> Matrix:
    """Permutation placing index i at 2i and index k+i at 2i+1."""
    p = []
    for i in range(k):
        p += [i, k + i]
    return permutation_matrix(p)


def _unitary_u(k):
    return kron(Matrix.identity(k, GAUSSIAN), SQRT2_W) @ interleave_perm(k)


def u_matrix(k: int, mu) -> Witness:
    mu, a, b = _split_mu(mu)
    src = direct_sum(jordan(k, mu), jordan(k, mu.conjugate()))
    return congruence(_unitary_u(k), src, c_jordan(k, a, b).to_backend(GAUSSIAN), True, Fraction(1, 2), "U")


def v_matrix(k: int, mu) -> Witness:
    mu, a, b = _split_mu(mu)
    src = direct_sum(t_block(k, mu).to_backend(GAUSSIAN), t_block(k, mu.conjugate()).to_backend(GAUSSIAN))
    return congruence(_unitary_u(k), src, t_hat(k, a, b).to_backend(GAUSSIAN), True, Fraction(1, 2), "V")


def _star_inv(s: Matrix, star: bool) -> Matrix:
    inv = s.inverse()
    return inv.H if star else inv.T


def similarity_to_congruence(s: Matrix, a: Matrix, star=False) -> Witness:
    """M = diag(S^{-*}, S) takes [[0,I],[A,0]] to [[0,I],[S A S^{-1},0]]."""
    n = s.rows
    if s.det() == 0:
        raise ZeroDivisionError("singular similarity")
    bk = max([s, a], key=lambda m: m.backend == GAUSSIAN).backend
    b = s @ a @ s.inverse()
    z = Matrix.zeros(n, n, bk)
    idn = Matrix.identity(n, bk)
    src = block([[z, idn], [a.to_backend(bk), z]])
    tgt = block([[z, idn], [b.to_backend(bk), z]])
    m = direct_sum(_star_inv(s, star).to_backend(bk), s.to_backend(bk))
    return congruence(m, src, tgt, star, 1, "similarity-lift")


def mu_rem_witness(k: int, mu) -> Witness:
    """[[0, J^{-1}],[I, 0]] takes H_2k(mu) to [[0, I],[J^{-*}, 0]]."""
    mu = exact(mu)
    j = jordan(k, mu)
    bk = j.backend
    z = Matrix.zeros(k, k, bk)
    idn = Matrix.identity(k, bk)
    m = block([[z, j.inverse()], [idn, z]])
    star = bk == GAUSSIAN
    tgt = block([[z, idn], [_star_inv(j, star), z]])
    return congruence(m, h_block(k, mu), tgt, star, 1, "mu-reciprocal")


def kron_commute_perm(n: int, p: int) -> Matrix:
    """P with kron(A, B) = P kron(B, A) P^T for A n x n and B p x p."""
    perm = [0] * (n * p)
    for a in range(n):
        for b in range(p):
            perm[a * p + b] = b * n + a
    return permutation_matrix(perm)


# Gamma_k -> +-Gamma~_k ------------------------------------------------------

def pks_matrix(k: int) -> Matrix:
    half = (k + 1) // 2
    sigma = [k - 2 * i + 2 if i <= half else 2 * i - k - 1 for i in range(1, k + 1)]
    p = Matrix.from_function(k, k, lambda r, c: 1 if c == sigma[r] - 1 else 0)
    s = Matrix.diag([-1 if (i + 1) % 4 == 3 else 1 for i in range(k)])
    return p @ s


def gamma_sign(k: int) -> int:
    return 1 if k % 4 in (1, 2) else -1


def pks_witness(k: int):
    """(P_k S_k)^T Gamma_k (P_k S_k) = sign * Gamma~_k, as a congruence with transform (P_k S_k)^T."""
    ps = pks_matrix(k)
    sign = gamma_sign(k)
    return congruence(ps.T, gamma(k), gamma_tilde(k).scale(sign), False, 1, "PkSk"), sign


# LW blocks ----------------------------------------------------------

def _alt(n, start):
    return [start * (-1) ** j for j in range(n)]


def lw_witness(family: str, k: int, eps=None, alpha=None) -> Witness:
    fam = family.replace("LW-", "")
    if fam == "inf4":
        src = lw_block("inf4", k, eps=eps)
        h = k // 2
        s = Matrix.diag(_alt(h, (-1) ** h) + [1] * h)
        return congruence(s, src, gamma(k).scale(eps * (-1) ** (h + 1)), name="inf4")
    if fam == "o3":
        src = lw_block("o3", k, eps=eps)
        h = (k - 1) // 2
        s = Matrix.diag(_alt(h, (-1) ** h) + [1] * (h + 1))
        return congruence(s, src, gamma(k).scale(eps * (-1) ** h), name="o3")
    if fam in ("inf5", "o4"):
        src = lw_block(fam, k)
        signs = _alt(k, 1) if fam == "inf5" else _alt(k, -1)
        s = Matrix.diag(signs + [1] * k)
        p = kron_commute_perm(k, 2)
        tgt = kron(gamma(k), c_rot(0, 1))
        return congruence(p @ s, src, tgt, name=fam)
    if fam in ("alpha3", "alpha3-flip"):
        al = exact(alpha)
        src = lw_block("alpha3", k, alpha=al)
        swap = block([[Matrix.zeros(k, k), Matrix.identity(k)], [Matrix.identity(k), Matrix.zeros(k, k)]])
        sk = _alt(k, 1)
        m = swap @ Matrix.diag(sk + sk[::-1])
        d = flip(k)
        from .blocks import lw_aux
        lam = lw_aux("Lambda", k)
        z = Matrix.zeros(k, k)
        tgt = block([[z, d.scale(1 - al) + lam], [d.scale(al + 1) - lam, z]])
        return congruence(m, src, tgt, name="alpha3-flip")
    raise BlockError(f"no explicit witness for LW family {family!r}")


# proof steps ----------------------------------------------------------------------

def step_witness(kind: str, k: int = 1, mu=None, a=None, b=None) -> Witness:
    if kind == "form1-step1":
        mu, ra, rb = _split_mu(mu)
        g = gamma(k).to_backend(GAUSSIAN)
        src = direct_sum(g.scale(mu), g.scale(mu.conjugate()))
        tgt = kron(gamma(k), c_rot(ra, rb)).to_backend(GAUSSIAN)
        return congruence(_unitary_u(k), src, tgt, True, Fraction(1, 2), kind)
    if kind == "form1-step2":
        mu, ra, rb = _split_mu(mu)
        src = direct_sum(h_block(k, mu), h_block(k, mu.conjugate()))
        perm = list(range(k)) + list(range(2 * k, 3 * k)) + list(range(k, 2 * k)) + list(range(3 * k, 4 * k))
        u = _unitary_u(k)
        m = direct_sum(u, u) @ permutation_matrix(perm)
        return congruence(m, src, h_hat(k, ra, rb).to_backend(GAUSSIAN), True, Fraction(1, 2), kind)
    a, b = exact(a), exact(b)
    d2 = flip(2)
    if kind == "bflip-C":
        return congruence(d2, c_rot(a, b), c_rot(a, -b), name=kind)
    if kind == "bflip-Hhat":
        s = kron(Matrix.identity(2 * k), d2)
        return congruence(s, h_hat(k, a, b), h_hat(k, a, -b), name=kind)
    if kind == "bflip-That":
        s = kron(Matrix.identity(k), d2)
        return congruence(s, t_hat(k, a, b), t_hat(k, a, -b), name=kind)
    raise ValueError(f"unknown step witness {kind!r}")


def is_signed_permutation(m: Matrix) -> bool:
    rows_ok = all(sum(1 for x in r if x) == 1 and all(x in (0, 1, -1) for x in r) for r in m.data)
    cols_ok = all(sum(1 for x in c if x) == 1 for c in m.T.data)
    return rows_ok and cols_ok


def unitary_scaled_ok(t: Matrix, scale=Fraction(1, 2)) -> bool:
    """(sqrt2 X)(sqrt2 X)^* == 2 I, i.e. scale * t t^* == I."""
    return (t @ t.H).scale(scale) == Matrix.identity(t.rows, t.backend)
