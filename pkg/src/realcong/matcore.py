"""Dense matrices over exact rationals, Gaussian rationals, or floats.

Entries are stored row-major as tuples.  Rational matrices hold
``Fraction`` entries, Gaussian matrices hold ``GaussQ`` entries and the
float backend holds Python ``complex`` values.  All operations return new
matrices; nothing is mutated after construction.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

RATIONAL = "rational"
GAUSSIAN = "gaussian"
FLOAT = "float"
_ORDER = {RATIONAL: 0, GAUSSIAN: 1, FLOAT: 2}

DEFAULT_TOL = 1e-9


class BackendMismatch(ValueError):
    pass


class GaussQ:
    """Gaussian rational re + i*im with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @staticmethod
    def coerce(x):
        if isinstance(x, GaussQ):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussQ(x, 0)
        if isinstance(x, complex):
            raise TypeError("float complex cannot be coerced exactly")
        return GaussQ(Fraction(x), 0)

    def conjugate(self):
        return GaussQ(self.re, -self.im)

    def norm2(self):
        return self.re * self.re + self.im * self.im

    def __add__(self, o):
        if isinstance(o, GaussQ):
            return GaussQ(self.re + o.re, self.im + o.im)
        if isinstance(o, (int, Fraction)):
            return GaussQ(self.re + o, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, o):
        if isinstance(o, GaussQ):
            return GaussQ(self.re - o.re, self.im - o.im)
        if isinstance(o, (int, Fraction)):
            return GaussQ(self.re - o, self.im)
        return NotImplemented

    def __rsub__(self, o):
        return (-self).__add__(o)

    def __mul__(self, o):
        if isinstance(o, GaussQ):
            return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
        if isinstance(o, (int, Fraction)):
            return GaussQ(self.re * o, self.im * o)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)):
            return GaussQ(self.re / o, self.im / o)
        if isinstance(o, GaussQ):
            d = o.norm2()
            if d == 0:
                raise ZeroDivisionError("GaussQ division by zero")
            n = self * o.conjugate()
            return GaussQ(n.re / d, n.im / d)
        return NotImplemented

    def __rtruediv__(self, o):
        return GaussQ.coerce(o) / self

    def __eq__(self, o):
        if isinstance(o, GaussQ):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Fraction)):
            return self.im == 0 and self.re == o
        return NotImplemented

    def __hash__(self):
        return hash(self.re) if self.im == 0 else hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


I = GaussQ(0, 1)


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    """Serialize an exact scalar: 'p/q' or 'p/q+r/s i'."""
    if isinstance(x, GaussQ):
        im = x.im
        sign = "-" if im < 0 else "+"
        return f"{_frac_str(x.re)}{sign}{_frac_str(abs(im))}i"
    if isinstance(x, complex):
        return repr(x)
    return _frac_str(Fraction(x))


_RAT = r"[+-]?\d+(?:/\d+)?"
_GAUSS_RE = re.compile(rf"^({_RAT})?(?:([+-])(\d+(?:/\d+)?)?\s?i|([+-]?)(\d+(?:/\d+)?)?\s?i)$")


def parse_scalar(s):
    """Parse 'p/q', 'p/q+r/s i', 'r/s i', 'i', '-i' or '(x+yi)/d' into an exact scalar."""
    if isinstance(s, (int, Fraction, GaussQ)):
        return s
    if isinstance(s, float):
        return Fraction(s)
    t = str(s).strip().replace(" ", "")
    m = re.fullmatch(r"\((.*)\)/(\d+)", t)
    if m:
        return parse_scalar(m.group(1)) / Fraction(int(m.group(2)))
    if "i" not in t:
        return Fraction(t)
    m = _GAUSS_RE.match(t)
    if not m:
        raise ValueError(f"malformed scalar {s!r}")
    if m.group(2) is not None:
        re_part = Fraction(m.group(1))
        im = Fraction(m.group(3)) if m.group(3) else Fraction(1)
        if m.group(2) == "-":
            im = -im
    else:
        if m.group(1) is not None:
            raise ValueError(f"malformed scalar {s!r}")
        re_part = Fraction(0)
        im = Fraction(m.group(5)) if m.group(5) else Fraction(1)
        if m.group(4) == "-":
            im = -im
    return GaussQ(re_part, im)


def scalar_backend(x) -> str:
    if isinstance(x, GaussQ):
        return GAUSSIAN
    if isinstance(x, (complex, float)):
        return FLOAT
    return RATIONAL


def _convert(x, backend):
    if backend == RATIONAL:
        if isinstance(x, GaussQ):
            if x.im != 0:
                raise BackendMismatch("non-real entry in rational matrix")
            return x.re
        if isinstance(x, (complex, float)):
            raise BackendMismatch("float entry in rational matrix")
        return x if type(x) is Fraction else Fraction(x)
    if backend == GAUSSIAN:
        if isinstance(x, (complex, float)):
            raise BackendMismatch("float entry in gaussian matrix")
        return GaussQ.coerce(x)
    return complex(x)


def conj(x):
    if isinstance(x, (GaussQ, complex)):
        return x.conjugate()
    return x


@dataclass(frozen=True)
class Inertia:
    n_plus: int
    n_minus: int
    n_zero: int

    def as_tuple(self):
        return (self.n_plus, self.n_minus, self.n_zero)


class Matrix:
    """Immutable dense matrix with a backend tag."""

    __slots__ = ("rows", "cols", "data", "backend")

    def __init__(self, data, rows=None, cols=None, backend=None):
        data = [list(r) for r in data]
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("ragged matrix data")
        if backend is None:
            backend = RATIONAL
            for r in data:
                for x in r:
                    b = scalar_backend(x)
                    if _ORDER[b] > _ORDER[backend]:
                        backend = b
        self.rows = rows
        self.cols = cols
        self.backend = backend
        self.data = tuple(tuple(_convert(x, backend) for x in r) for r in data)

    @classmethod
    def _raw(cls, data, rows, cols, backend):
        m = object.__new__(cls)
        m.rows, m.cols, m.backend, m.data = rows, cols, backend, data
        return m

    # construction helpers
    @classmethod
    def zeros(cls, rows, cols, backend=RATIONAL):
        z = _convert(0, backend)
        return cls._raw(tuple((z,) * cols for _ in range(rows)), rows, cols, backend)

    @classmethod
    def identity(cls, n, backend=RATIONAL):
        z, o = _convert(0, backend), _convert(1, backend)
        return cls._raw(tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), n, n, backend)

    @classmethod
    def diag(cls, entries, backend=None):
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n, n, backend)

    @classmethod
    def from_function(cls, rows, cols, f, backend=None):
        return cls([[f(i, j) for j in range(cols)] for i in range(rows)], rows, cols, backend)

    # basic protocol
    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def tolist(self):
        return [list(r) for r in self.data]

    def __eq__(self, o):
        if not isinstance(o, Matrix):
            return NotImplemented
        return self.shape == o.shape and all(
            x == y for r, s in zip(self.data, o.data) for x, y in zip(r, s)
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        body = "; ".join(", ".join(format_scalar(x) for x in r) for r in self.data)
        return f"Matrix<{self.rows}x{self.cols},{self.backend}>[{body}]"

    def to_backend(self, backend):
        if backend == self.backend:
            return self
        if _ORDER[backend] < _ORDER[self.backend]:
            # demotion is allowed only if lossless
            return Matrix(self.data, self.rows, self.cols, backend)
        return Matrix(self.data, self.rows, self.cols, backend)

    def _unify(self, o):
        if self.backend == o.backend:
            return self, o
        b = self.backend if _ORDER[self.backend] > _ORDER[o.backend] else o.backend
        return self.to_backend(b), o.to_backend(b)

    # arithmetic
    def __add__(self, o):
        a, b = self._unify(o)
        if a.shape != b.shape:
            raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
        return Matrix._raw(
            tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a.data, b.data)),
            a.rows, a.cols, a.backend,
        )

    def __sub__(self, o):
        return self + (-o)

    def __neg__(self):
        return Matrix._raw(tuple(tuple(-x for x in r) for r in self.data), self.rows, self.cols, self.backend)

    def scale(self, c):
        b = self.backend
        cb = scalar_backend(c)
        if _ORDER[cb] > _ORDER[b]:
            return self.to_backend(cb).scale(c)
        c = _convert(c, b)
        return Matrix._raw(tuple(tuple(c * x for x in r) for r in self.data), self.rows, self.cols, b)

    def __matmul__(self, o):
        a, b = self._unify(o)
        if a.cols != b.rows:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        zero = _convert(0, a.backend)
        bt = list(zip(*b.data)) if b.rows else [()] * b.cols
        out = []
        for r in a.data:
            row = []
            for c in bt:
                s = zero
                for x, y in zip(r, c):
                    if x and y:
                        s = s + x * y
                row.append(s)
            out.append(tuple(row))
        return Matrix._raw(tuple(out), a.rows, b.cols, a.backend)

    @property
    def T(self):
        return Matrix._raw(tuple(zip(*self.data)) if self.rows else tuple(() for _ in range(self.cols)),
                           self.cols, self.rows, self.backend)

    @property
    def H(self):
        t = self.T
        if self.backend == RATIONAL:
            return t
        return Matrix._raw(tuple(tuple(conj(x) for x in r) for r in t.data), t.rows, t.cols, t.backend)

    def conj(self):
        if self.backend == RATIONAL:
            return self
        return Matrix._raw(tuple(tuple(conj(x) for x in r) for r in self.data), self.rows, self.cols, self.backend)

    def real_part(self):
        if self.backend == RATIONAL:
            return self
        return Matrix([[x.real if isinstance(x, complex) else x.re for x in r] for r in self.data],
                      self.rows, self.cols, RATIONAL if self.backend == GAUSSIAN else FLOAT)

    def imag_part(self):
        if self.backend == RATIONAL:
            return Matrix.zeros(self.rows, self.cols)
        return Matrix([[x.imag if isinstance(x, complex) else x.im for x in r] for r in self.data],
                      self.rows, self.cols, RATIONAL if self.backend == GAUSSIAN else FLOAT)

    def is_real(self):
        if self.backend == RATIONAL:
            return True
        if self.backend == GAUSSIAN:
            return all(x.im == 0 for r in self.data for x in r)
        return all(x.imag == 0 for r in self.data for x in r)

    def is_zero(self, tol=None):
        if self.backend == FLOAT:
            t = DEFAULT_TOL if tol is None else tol
            return all(abs(x) <= t for r in self.data for x in r)
        return all(not x for r in self.data for x in r)

    def is_square(self):
        return self.rows == self.cols

    def is_symmetric(self):
        return self.is_square() and self == self.T

    def sub(self, r0, r1, c0, c1):
        return Matrix._raw(tuple(r[c0:c1] for r in self.data[r0:r1]), r1 - r0, c1 - c0, self.backend)

    def select(self, rows=None, cols=None):
        rows = range(self.rows) if rows is None else rows
        cols = range(self.cols) if cols is None else cols
        return Matrix._raw(tuple(tuple(self.data[i][j] for j in cols) for i in rows),
                           len(rows), len(cols), self.backend)

    def power(self, e):
        out = Matrix.identity(self.rows, self.backend)
        base = self
        while e:
            if e & 1:
                out = out @ base
            base = base @ base
            e >>= 1
        return out

    # elimination based
    def rank(self, tol=None):
        return len(_rref(self, tol)[1])

    def nullspace(self, tol=None):
        """Basis of the right null space, as a cols x d matrix."""
        red, piv = _rref(self, tol)
        free = [j for j in range(self.cols) if j not in piv]
        zero, one = _convert(0, self.backend), _convert(1, self.backend)
        vecs = []
        for f in free:
            v = [zero] * self.cols
            v[f] = one
            for r, p in enumerate(piv):
                v[p] = -red[r][f]
            vecs.append(v)
        if not vecs:
            return Matrix.zeros(self.cols, 0, self.backend)
        return Matrix(vecs, len(vecs), self.cols, self.backend).T

    def colspace(self, tol=None):
        """Basis (subset of the columns) of the column space."""
        _, piv = _rref(self, tol)
        return self.select(cols=piv)

    def inverse(self):
        if not self.is_square():
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        aug = hstack(self, Matrix.identity(n, self.backend))
        red, piv = _rref(aug, None)
        if piv[:n] != list(range(n)) or len(piv) < n:
            raise ZeroDivisionError("singular matrix")
        return Matrix([r[n:] for r in red[:n]], n, n, self.backend)

    def det(self):
        if not self.is_square():
            raise ValueError("det of non-square matrix")
        n = self.rows
        m = [list(r) for r in self.data]
        d = _convert(1, self.backend)
        for c in range(n):
            p = next((r for r in range(c, n) if _nonzero(m[r][c], None)), None)
            if p is None:
                return _convert(0, self.backend)
            if p != c:
                m[c], m[p] = m[p], m[c]
                d = -d
            d = d * m[c][c]
            inv = 1 / m[c][c] if self.backend != GAUSSIAN else GaussQ(1) / m[c][c]
            for r in range(c + 1, n):
                if m[r][c]:
                    f = m[r][c] * inv
                    m[r] = [x - f * y for x, y in zip(m[r], m[c])]
        return d

    def solve(self, b):
        """Particular solution X of self @ X = b; raises if inconsistent."""
        a, bb = self._unify(b)
        aug = hstack(a, bb)
        red, piv = _rref(aug, None)
        if any(p >= a.cols for p in piv):
            raise ValueError("inconsistent linear system")
        zero = _convert(0, a.backend)
        out = [[zero] * bb.cols for _ in range(a.cols)]
        for r, p in enumerate(piv):
            out[p] = list(red[r][a.cols:])
        return Matrix(out, a.cols, bb.cols, a.backend)

    # serialization
    def to_dict(self):
        if self.backend == FLOAT:
            data = [[[x.real, x.imag] for x in r] for r in self.data]
        else:
            data = [[format_scalar(x) for x in r] for r in self.data]
        return {"rows": self.rows, "cols": self.cols, "backend": self.backend, "data": data}

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d):
        rows, cols, backend = d["rows"], d["cols"], d["backend"]
        if backend not in _ORDER:
            raise ValueError(f"unknown backend {backend!r}")
        if backend == FLOAT:
            data = [[complex(*x) if isinstance(x, list) else complex(x) for x in r] for r in d["data"]]
        else:
            data = [[parse_scalar(x) for x in r] for r in d["data"]]
        if rows == 0:
            data = []
        return cls(data, rows, cols, backend)

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


def _nonzero(x, tol):
    if isinstance(x, complex):
        return abs(x) > (DEFAULT_TOL if tol is None else tol)
    return bool(x)


def _rref(m: Matrix, tol):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    rows = [list(r) for r in m.data]
    piv = []
    r = 0
    floaty = m.backend == FLOAT
    one = _convert(1, m.backend)
    for c in range(m.cols):
        if r == len(rows):
            break
        if floaty:
            p = max(range(r, len(rows)), key=lambda i: abs(rows[i][c]))
            if not _nonzero(rows[p][c], tol):
                continue
        else:
            p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
            if p is None:
                continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = one / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and _nonzero(rows[i][c], tol if floaty else None):
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], pr)]
        piv.append(c)
        r += 1
    return rows, piv


def hstack(*ms):
    ms = [m for m in ms]
    b = max((m.backend for m in ms), key=_ORDER.get)
    ms = [m.to_backend(b) for m in ms]
    rows = ms[0].rows
    if any(m.rows != rows for m in ms):
        raise ValueError("hstack row mismatch")
    data = tuple(tuple(x for m in ms for x in m.data[i]) for i in range(rows))
    return Matrix._raw(data, rows, sum(m.cols for m in ms), b)


def vstack(*ms):
    b = max((m.backend for m in ms), key=_ORDER.get)
    ms = [m.to_backend(b) for m in ms]
    cols = ms[0].cols
    if any(m.cols != cols for m in ms):
        raise ValueError("vstack column mismatch")
    return Matrix._raw(tuple(r for m in ms for r in m.data), sum(m.rows for m in ms), cols, b)


def block(grid):
    """Assemble a block matrix from a grid of matrices."""
    return vstack(*[hstack(*row) for row in grid])


def direct_sum(a: Matrix, b: Matrix) -> Matrix:
    if a.backend != b.backend:
        raise BackendMismatch(f"direct_sum of {a.backend} and {b.backend}")
    bk = a.backend
    return block([[a, Matrix.zeros(a.rows, b.cols, bk)], [Matrix.zeros(b.rows, a.cols, bk), b]])


def direct_sum_all(ms, backend=None):
    if backend is None:
        backend = max((m.backend for m in ms), key=_ORDER.get, default=RATIONAL)
    out = Matrix.zeros(0, 0, backend)
    for m in ms:
        out = direct_sum(out, m.to_backend(backend))
    return out


def kron(a: Matrix, b: Matrix) -> Matrix:
    if a.backend != b.backend:
        raise BackendMismatch(f"kron of {a.backend} and {b.backend}")
    data = []
    for i in range(a.rows):
        for k in range(b.rows):
            data.append(tuple(a.data[i][j] * b.data[k][l] for j in range(a.cols) for l in range(b.cols)))
    return Matrix._raw(tuple(data), a.rows * b.rows, a.cols * b.cols, a.backend)


def rank(m: Matrix, tol=None) -> int:
    return m.rank(tol)


def sym(m: Matrix) -> Matrix:
    return (m + m.T).scale(Fraction(1, 2))


def inertia_of_symmetric(m: Matrix) -> Inertia:
    """Signature by symmetric elimination with 1x1 and 2x2 pivots."""
    if m.backend != RATIONAL:
        raise ValueError("inertia needs a rational matrix")
    if not m.is_symmetric():
        raise ValueError("inertia of non-symmetric matrix")
    a = [list(r) for r in m.data]
    pos = neg = 0
    while a:
        n = len(a)
        d = next((i for i in range(n) if a[i][i]), None)
        if d is not None:
            p = a[d][d]
            if p > 0:
                pos += 1
            else:
                neg += 1
            rest = [i for i in range(n) if i != d]
            a = [[a[i][j] - a[i][d] * a[d][j] / p for j in rest] for i in rest]
            continue
        off = next(((i, j) for i in range(n) for j in range(i + 1, n) if a[i][j]), None)
        if off is None:
            break
        # zero diagonal: [[0,c],[c,0]] has one positive and one negative eigenvalue
        i0, j0 = off
        c = a[i0][j0]
        pos += 1
        neg += 1
        rest = [i for i in range(n) if i not in off]
        # inverse of [[0,c],[c,0]] is [[0,1/c],[1/c,0]]
        a = [[a[i][j] - (a[i][i0] * a[j0][j] + a[i][j0] * a[i0][j]) / c for j in rest] for i in rest]
    return Inertia(pos, neg, m.rows - pos - neg)


def permutation_matrix(perm, backend=RATIONAL):
    """Matrix P with P[i, perm[i]] = 1, so (P @ x)[i] = x[perm[i]]."""
    n = len(perm)
    z, o = _convert(0, backend), _convert(1, backend)
    return Matrix._raw(tuple(tuple(o if j == perm[i] else z for j in range(n)) for i in range(n)), n, n, backend)


def charpoly(m: Matrix):
    """Characteristic polynomial coefficients, highest degree first, as sympy numbers."""
    import sympy as sp
    from sympy.polys.matrices import DomainMatrix

    if m.backend == RATIONAL:
        dom = sp.QQ
        rows = [[dom(x.numerator, x.denominator) for x in r] for r in m.data]
    elif m.backend == GAUSSIAN:
        dom = sp.QQ_I
        rows = [[dom(sp.QQ(x.re.numerator, x.re.denominator), sp.QQ(x.im.numerator, x.im.denominator))
                 for x in r] for r in m.data]
    else:
        raise ValueError("charpoly needs an exact matrix")
    if m.rows == 0:
        return [sp.Integer(1)]
    dm = DomainMatrix(rows, m.shape, dom)
    return [dom.to_sympy(c) for c in dm.charpoly()]


def to_sympy(x):
    import sympy as sp

    if isinstance(x, GaussQ):
        return sp.Rational(x.re.numerator, x.re.denominator) + sp.I * sp.Rational(x.im.numerator, x.im.denominator)
    if isinstance(x, complex):
        return sp.Float(x.real) + sp.I * sp.Float(x.imag)
    if isinstance(x, Rational):
        return sp.Rational(x.numerator, x.denominator)
    return sp.sympify(x)


def from_sympy(x):
    """Convert a sympy rational or Gaussian rational to Fraction/GaussQ."""
    import sympy as sp

    x = sp.nsimplify(x) if isinstance(x, sp.Float) else sp.sympify(x)
    re_, im_ = x.as_real_imag()
    re_, im_ = sp.nsimplify(re_), sp.nsimplify(im_)
    if not (re_.is_Rational and im_.is_Rational):
        raise ValueError(f"{x} is not a Gaussian rational")
    r = Fraction(int(re_.p), int(re_.q))
    if im_ == 0:
        return r
    return GaussQ(r, Fraction(int(im_.p), int(im_.q)))


def as_matrix(x) -> Matrix:
    if isinstance(x, Matrix):
        return x
    return Matrix(x)
