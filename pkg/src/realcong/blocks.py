"""Canonical and auxiliary block matrices, and the block data model."""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction

import sympy as sp

from .matcore import (
    GAUSSIAN, RATIONAL, GaussQ, Matrix, block, direct_sum_all, from_sympy, kron,
    parse_scalar, scalar_backend, to_sympy,
)

FAMILIES = (
    "R1-i", "R1-ii", "R1-iii", "R1-iv",
    "R2-TriI", "R2-TriII", "R2-TriIII",
    "HS-Type0", "HS-TypeI", "HS-TypeII",
    "FHS-TriI", "FHS-TriII",
    "LW-m3", "LW-inf4", "LW-inf5", "LW-o3", "LW-o4", "LW-alpha3", "LW-beta4", "LW-beta5",
)
KIND_OF = {f: f.split("-")[0].replace("R1", "Form1").replace("R2", "Form2") for f in FAMILIES}
_COMPACT = {f.replace("-", ""): f for f in FAMILIES}


class BlockError(ValueError):
    pass


# scalars ------------------------------------------------------------------

def exact(x):
    """Normalize a parameter to Fraction, GaussQ (non-real only) or a sympy irrational."""
    if x is None:
        return None
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, GaussQ):
        return x.re if x.im == 0 else x
    if isinstance(x, str):
        try:
            return exact(parse_scalar(x))
        except ValueError:
            return exact(sp.sympify(x.replace("i", "*I") if "sqrt" not in x else x))
    if isinstance(x, sp.Basic):
        x = sp.nsimplify(sp.radsimp(x)) if not x.is_Rational else x
        try:
            return exact(from_sympy(x))
        except ValueError:
            return x
    return Fraction(x)


def is_irrational(x):
    return isinstance(x, sp.Basic)


def sabs2(x):
    """|x|^2 for an exact scalar."""
    if isinstance(x, GaussQ):
        return x.norm2()
    if isinstance(x, sp.Basic):
        return sp.nsimplify(sp.expand(x * sp.conjugate(x)))
    return x * x


def fmt(x) -> str:
    """Compact scalar text used in block specs."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, GaussQ):
        re_ = "" if x.re == 0 else fmt(x.re)
        im = x.im
        mag = "" if abs(im) == 1 else fmt(abs(im))
        sign = "-" if im < 0 else ("+" if re_ else "")
        return f"{re_}{sign}{mag}i"
    if isinstance(x, sp.Basic):
        return sp.sstr(x).replace(" ", "")
    return str(x)


def skey(x):
    if isinstance(x, GaussQ):
        return (float(x.re), float(x.im), fmt(x))
    if isinstance(x, sp.Basic):
        c = complex(sp.N(x, 30))
        return (c.real, c.imag, fmt(x))
    return (float(x), 0.0, fmt(x))


def seq(x, y) -> bool:
    """Exact equality across Fraction/GaussQ/sympy representations."""
    if is_irrational(x) or is_irrational(y):
        return sp.simplify(to_sympy(x) - to_sympy(y)) == 0
    return exact(x) == exact(y)


@dataclass(frozen=True)
class Rotation:
    a: object
    b: object

    def __str__(self):
        return f"C({fmt(self.a)},{fmt(self.b)})"


def _n_key(n):
    if n is None:
        return ()
    if isinstance(n, Rotation):
        return (2,) + skey(n.a) + skey(n.b)
    return (0 if n == 1 else 1,)


@dataclass(frozen=True)
class CanonicalBlock:
    family: str
    k: int
    mu: object = None
    a: object = None
    b: object = None
    alpha: object = None
    eps: int | None = None
    n: object = None  # +1, -1 or Rotation(a, b)

    @property
    def kind(self):
        return KIND_OF[self.family]

    @property
    def size(self):
        return block_size(self)

    def sort_key(self):
        return (FAMILIES.index(self.family), self.k) + tuple(
            skey(v) if v is not None else (0.0, 0.0, "") for v in (self.mu, self.a, self.b, self.alpha)
        ) + (self.eps or 0,) + _n_key(self.n)

    def spec(self) -> str:
        return format_block(self)

    def __str__(self):
        return self.spec()


def make_block(family, k, normalize=True, check=True, **params) -> CanonicalBlock:
    fam = _COMPACT.get(family.replace("-", ""), family)
    if fam not in FAMILIES:
        raise BlockError(f"unknown family {family!r}")
    n = params.pop("n", params.pop("N", None))
    if n is not None and not isinstance(n, Rotation):
        if isinstance(n, tuple):
            n = Rotation(exact(n[0]), exact(n[1]))
        else:
            n = int(n)
    else:
        if n is not None:
            n = Rotation(exact(n.a), exact(n.b))
    eps = params.pop("eps", None)
    vals = {key: exact(params.pop(key, None)) for key in ("mu", "a", "b", "alpha")}
    if params:
        raise BlockError(f"unknown parameters {sorted(params)}")
    blk = CanonicalBlock(fam, int(k), eps=None if eps is None else int(eps), n=n, **vals)
    if normalize:
        blk = normalize_block(blk)
    if check:
        validate(blk)
    return blk


def normalize_block(blk: CanonicalBlock) -> CanonicalBlock:
    """Move parameters into the canonical region (reciprocal/Moebius partner)."""
    f = blk.family
    if f in ("R1-iii", "R2-TriI") and blk.a is not None and blk.a != 0:
        if not is_irrational(blk.a) and abs(blk.a) > 1:
            return replace(blk, a=1 / blk.a)
    if f in ("R1-iv", "R2-TriII") and blk.a is not None and blk.b is not None:
        r = sabs2(blk.a) + sabs2(blk.b)
        if not is_irrational(r) and r > 1:
            return replace(blk, a=blk.a / r, b=blk.b / r)
    return blk


def _req(blk, *names):
    for nm in names:
        if getattr(blk, nm) is None:
            raise BlockError(f"{blk.family} needs parameter {nm}")


def _pos(x):
    return bool(sp.sympify(to_sympy(x)) > 0)


def validate(blk: CanonicalBlock, degenerate=False):
    f, k = blk.family, blk.k
    if f == "LW-m3":
        if k < 0:
            raise BlockError("k must be >= 0")
        return
    if k < 1:
        raise BlockError("k must be >= 1")
    if f in ("HS-TypeI", "FHS-TriII"):
        _req(blk, "mu")
        if not seq(sabs2(blk.mu), 1):
            raise BlockError("|mu| must be 1")
    elif f == "HS-TypeII":
        _req(blk, "mu")
        if blk.mu == 0 or seq(sabs2(blk.mu), 1):
            raise BlockError("mu must be nonzero with |mu| != 1")
    elif f == "FHS-TriI":
        _req(blk, "mu")
        if seq(sabs2(blk.mu), 1):
            raise BlockError("|mu| must differ from 1")
        if k % 2 and blk.mu != 0:
            raise BlockError("mu must be 0 for odd k")
    elif f in ("R1-ii", "R2-TriIII"):
        _req(blk, "n")
        n = blk.n
        if isinstance(n, Rotation):
            if not seq(sabs2(n.a) + sabs2(n.b), 1) or not _pos(n.b):
                raise BlockError("rotation needs a^2+b^2=1 and b>0")
        elif n not in (1, -1):
            raise BlockError("N must be +1, -1 or C(a,b)")
    elif f == "R1-iii":
        _req(blk, "a")
        if blk.a == 0 or not (sabs2(blk.a) < 1):
            raise BlockError("R1-iii needs 0<|a|<1")
    elif f in ("R1-iv", "R2-TriII"):
        _req(blk, "a", "b")
        if not (sabs2(blk.a) + sabs2(blk.b) < 1) or not _pos(blk.b):
            raise BlockError(f"{f} needs a^2+b^2<1 and b>0")
    elif f == "R2-TriI":
        _req(blk, "a")
        if not (sabs2(blk.a) < 1):
            raise BlockError("R2-TriI needs |a|<1")
        if k % 2 and blk.a != 0:
            raise BlockError("R2-TriI needs a=0 for odd k")
    elif f in ("LW-inf4", "LW-o4"):
        if k % 2:
            raise BlockError(f"{f} needs even k")
    elif f in ("LW-inf5", "LW-o3"):
        if k % 2 == 0:
            raise BlockError(f"{f} needs odd k")
    elif f == "LW-alpha3":
        _req(blk, "alpha")
        if not (blk.alpha > 0 or degenerate):
            raise BlockError("alpha must be positive")
    elif f == "LW-beta4":
        _req(blk, "b")
        if blk.b == 0 and not degenerate:
            raise BlockError("beta4 needs b != 0")
    elif f == "LW-beta5":
        _req(blk, "a", "b")
        if (blk.a == 0 or blk.b == 0) and not degenerate:
            raise BlockError("beta5 needs a != 0 and b != 0")
    if f in ("LW-inf4", "LW-o3", "LW-beta4"):
        if blk.eps not in (1, -1):
            raise BlockError(f"{f} needs eps=+1 or -1")


def block_size(blk: CanonicalBlock) -> int:
    f, k = blk.family, blk.k
    if f in ("R1-iii", "HS-TypeII", "LW-inf5", "LW-o4", "LW-alpha3", "LW-beta4"):
        return 2 * k
    if f in ("R1-iv", "R2-TriII", "LW-beta5"):
        return 4 * k
    if f in ("R1-ii", "R2-TriIII"):
        return k * (2 if isinstance(blk.n, Rotation) else 1)
    if f == "LW-m3":
        return 2 * k + 1
    return k


# spec mini-language ---------------------------------------------------------

def format_block(blk: CanonicalBlock) -> str:
    parts = [f"k={blk.k}"]
    for nm in ("mu", "a", "b", "alpha"):
        v = getattr(blk, nm)
        if v is not None:
            parts.append(f"{nm}={fmt(v)}")
    if blk.eps is not None:
        parts.append(f"eps={'+1' if blk.eps == 1 else '-1'}")
    if blk.n is not None:
        parts.append("N=" + (str(blk.n) if isinstance(blk.n, Rotation) else ("+1" if blk.n == 1 else "-1")))
    return f"{blk.family.replace('-', '')}({','.join(parts)})"


_SPEC_RE = re.compile(r"^\s*([A-Za-z0-9\-]+)\((.*)\)\s*$")


def _split_args(s):
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur)
    return out


def parse_block(text: str, normalize=True, check=True) -> CanonicalBlock:
    m = _SPEC_RE.match(text)
    if not m:
        raise BlockError(f"malformed block spec {text!r}")
    fam, args = m.group(1), m.group(2)
    params = {}
    k = None
    for item in _split_args(args):
        if "=" not in item:
            raise BlockError(f"malformed argument {item!r}")
        key, val = (t.strip() for t in item.split("=", 1))
        if key == "k":
            k = int(val)
        elif key == "N":
            cm = re.fullmatch(r"C\((.*)\)", val)
            if cm:
                x, y = _split_args(cm.group(1))
                params["n"] = Rotation(exact(x.strip()), exact(y.strip()))
            else:
                params["n"] = int(val)
        elif key == "eps":
            params["eps"] = int(val)
        elif key in ("mu", "a", "b", "alpha"):
            params[key] = val
        else:
            raise BlockError(f"unknown parameter {key!r}")
    if k is None:
        raise BlockError("block spec needs k")
    return make_block(fam, k, normalize=normalize, check=check, **params)


def split_form(text: str):
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+⊕" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        parts.append(cur)
    return [p.strip() for p in parts if p.strip()]


def parse_form(text: str, normalize=True, check=True):
    return [parse_block(p, normalize, check) for p in split_form(text)]


def format_form(blocks) -> str:
    return "+".join(b.spec() for b in sort_blocks(blocks))


def sort_blocks(blocks):
    return sorted(blocks, key=lambda b: b.sort_key())


# constructors -------------------------------------------------------------

def _bk(*xs):
    return GAUSSIAN if any(scalar_backend(x) == GAUSSIAN for x in xs) else RATIONAL


def _need_k(k, lo=1):
    if k < lo:
        raise BlockError(f"size must be >= {lo}")


def jordan(k: int, mu=0) -> Matrix:
    _need_k(k)
    mu = exact(mu)
    return Matrix.from_function(k, k, lambda i, j: mu if i == j else (1 if j == i + 1 else 0), _bk(mu))


def gamma(k: int) -> Matrix:
    """Anti-triangular block: row r carries (-1)^(k-r) on the anti-diagonal and just right of it."""
    _need_k(k)

    def f(i, j):
        r = i + 1
        if j == k - r or (r >= 2 and j == k - r + 1):
            return (-1) ** (k - r)
        return 0

    return Matrix.from_function(k, k, f)


def gamma_tilde(k: int) -> Matrix:
    _need_k(k)

    def f(i, j):
        if i == 0 and j == 0:
            return 1
        if j == i + 1:
            return 1
        if i == j + 1:
            return -1 if j % 2 == 0 else 1
        return 0

    return Matrix.from_function(k, k, f)


def h_block(k: int, mu) -> Matrix:
    _need_k(k)
    mu = exact(mu)
    bk = _bk(mu)
    z = Matrix.zeros(k, k, bk)
    return block([[z, Matrix.identity(k, bk)], [jordan(k, mu).to_backend(bk), z]])


def c_rot(a, b) -> Matrix:
    a, b = exact(a), exact(b)
    return Matrix([[a, b], [-b, a]])


def c_jordan(k: int, a, b) -> Matrix:
    _need_k(k)
    c = c_rot(a, b)
    return kron(Matrix.identity(k), c) + kron(jordan(k, 0), Matrix.identity(2))


def h_hat(k: int, a, b) -> Matrix:
    _need_k(k)
    z = Matrix.zeros(2 * k, 2 * k)
    return block([[z, Matrix.identity(2 * k)], [c_jordan(k, a, b), z]])


def t_block(k: int, mu=0) -> Matrix:
    _need_k(k)
    mu = exact(mu)
    return Matrix.from_function(k, k, lambda i, j: 1 if j == i + 1 else (mu if i == j + 1 else 0), _bk(mu))


def t_hat(k: int, a, b) -> Matrix:
    """2k x 2k block tridiagonal: I2 above the diagonal, C(a,b) below it."""
    _need_k(k)
    sup = Matrix.from_function(k, k, lambda i, j: 1 if j == i + 1 else 0)
    low = Matrix.from_function(k, k, lambda i, j: 1 if i == j + 1 else 0)
    return kron(sup, Matrix.identity(2)) + kron(low, c_rot(a, b))


def f_block(k: int) -> Matrix:
    if k < 0:
        raise BlockError("size must be >= 0")
    return Matrix.from_function(k, k + 1, lambda i, j: 1 if i == j else 0)


def g_block(k: int) -> Matrix:
    if k < 0:
        raise BlockError("size must be >= 0")
    return Matrix.from_function(k, k + 1, lambda i, j: 1 if j == i + 1 else 0)


def flip(k: int) -> Matrix:
    return Matrix.from_function(k, k, lambda i, j: 1 if i + j == k - 1 else 0)


def lw_aux(name: str, k: int) -> Matrix:
    if name == "L":
        _need_k(k, 0)
        return Matrix.from_function(k + 1, k, lambda i, j: 1 if i in (j, j + 1) else 0)
    _need_k(k)
    if name == "Lplus":
        return Matrix.from_function(k, k + 1, lambda i, j: 1 if j == i else (-1 if j == i + 1 else 0))
    if name == "Delta":
        return flip(k)
    if name == "Lambda":
        # ones at (i, k+2-i) in 1-based indexing for i = 2..k
        return Matrix.from_function(k, k, lambda i, j: 1 if i >= 1 and i + j == k else 0)
    if name == "SDelta":
        if k % 2 == 0:
            h = k // 2
            z = Matrix.zeros(h, h)
            return block([[z, flip(h)], [-flip(h), z]])
        h = (k - 1) // 2
        if h == 0:
            return Matrix.zeros(1, 1)
        z = Matrix.zeros(h, h)
        inner = block([[z, flip(h)], [-flip(h), z]])
        return block([[Matrix.zeros(1, 1), Matrix.zeros(1, 2 * h)], [Matrix.zeros(2 * h, 1), inner]])
    raise BlockError(f"unknown auxiliary matrix {name!r}")


def _anti_bidiag(k, main: Matrix, below: Matrix) -> Matrix:
    """k x k grid with `main` on the block anti-diagonal and `below` just right of it."""
    anti = Matrix.from_function(k, k, lambda i, j: 1 if i + j == k - 1 else 0)
    nxt = Matrix.from_function(k, k, lambda i, j: 1 if i + j == k else 0)
    return kron(anti, main) + kron(nxt, below) if k > 0 else Matrix.zeros(0, 0)


def lw_block(family: str, k: int, eps=None, alpha=None, a=None, b=None, degenerate=False) -> Matrix:
    fam = family if family.startswith("LW-") else "LW-" + family
    blk = CanonicalBlock(fam, k, eps=eps, alpha=exact(alpha), a=exact(a), b=exact(b))
    validate(blk, degenerate=degenerate)
    return _lw_matrix(blk)


def _lw_matrix(blk: CanonicalBlock) -> Matrix:
    f, k = blk.family, blk.k
    if f == "LW-m3":
        if k == 0:
            return Matrix.zeros(1, 1)
        return block([[Matrix.zeros(k + 1, k + 1), lw_aux("L", k)], [lw_aux("Lplus", k), Matrix.zeros(k, k)]])
    D = flip(k)
    Lam = lw_aux("Lambda", k)
    z = Matrix.zeros(k, k)
    if f == "LW-inf4":
        return (lw_aux("SDelta", k) + Lam).scale(blk.eps)
    if f == "LW-inf5":
        return block([[z, D + Lam], [-D + Lam, z]])
    if f == "LW-o3":
        return (D + lw_aux("SDelta", k)).scale(blk.eps)
    if f == "LW-o4":
        return block([[z, D + Lam], [D - Lam, z]])
    if f == "LW-alpha3":
        al = blk.alpha
        return block([[z, D.scale(al + 1) + Lam], [D.scale(1 - al) - Lam, z]])
    if f == "LW-beta4":
        bb = abs(blk.b)
        R = Matrix([[1, bb], [-bb, 1]])
        S = Matrix([[0, 1], [-1, 0]])
        return _anti_bidiag(k, R, S).scale(blk.eps)
    if f == "LW-beta5":
        a, bb = blk.a, blk.b
        T = Matrix([[bb, a - 1], [a - 1, -bb]])
        Rp = Matrix([[bb, a + 1], [a + 1, -bb]])
        Sp = Matrix([[0, 1], [1, 0]])
        X = _anti_bidiag(k, Rp, Sp)
        Y = _anti_bidiag(k, -T, -Sp)
        zz = Matrix.zeros(2 * k, 2 * k)
        return block([[zz, X], [Y, zz]])
    raise BlockError(f"not an LW family: {f}")


def _n_matrix(n) -> Matrix:
    if isinstance(n, Rotation):
        return _c_any(n.a, n.b)
    return Matrix([[n]])


def _c_any(a, b) -> Matrix:
    if is_irrational(a) or is_irrational(b):
        # symbolic entries: only used for display, never for exact elimination
        m = object.__new__(Matrix)
        m.rows, m.cols, m.backend = 2, 2, "symbolic"
        m.data = ((a, b), (-b, a))
        return m
    return c_rot(a, b)


def realize(blk: CanonicalBlock) -> Matrix:
    f, k = blk.family, blk.k
    if f.startswith("LW-"):
        return _lw_matrix(blk)
    if f in ("R1-i", "HS-Type0"):
        return jordan(k, 0)
    if f == "R1-ii":
        return _kron_n(gamma(k), blk.n)
    if f == "R2-TriIII":
        return _kron_n(gamma_tilde(k), blk.n)
    if f == "R1-iii":
        return h_block(k, blk.a)
    if f == "R1-iv":
        return h_hat(k, blk.a, blk.b)
    if f == "R2-TriI":
        return t_block(k, blk.a)
    if f == "R2-TriII":
        return t_hat(2 * k, blk.a, blk.b)
    if f == "HS-TypeI":
        return gamma(k).scale(blk.mu)
    if f == "HS-TypeII":
        return h_block(k, blk.mu)
    if f == "FHS-TriI":
        return t_block(k, blk.mu)
    if f == "FHS-TriII":
        return gamma_tilde(k).scale(blk.mu)
    raise BlockError(f"unknown family {f}")


def _kron_n(g: Matrix, n) -> Matrix:
    nm = _n_matrix(n)
    if nm.backend == "symbolic":
        raise BlockError("block with irrational parameters has no exact matrix")
    return kron(g, nm)


def realize_form(blocks) -> Matrix:
    ms = [realize(b) for b in sort_blocks(blocks)]
    return direct_sum_all(ms)


def sym_parts(m: Matrix):
    """Off-diagonal blocks (top-right, bottom-left) of an even-sized 2x2 block matrix."""
    h = m.rows // 2
    return m.sub(0, h, h, m.cols), m.sub(h, m.rows, 0, h)
