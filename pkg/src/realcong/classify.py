"""Canonical forms under real congruence: KCF table inversion, sign resolution,
and conversion between the four block vocabularies."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction

import sympy as sp

from .blocks import (
    BlockError, CanonicalBlock, Rotation, exact, fmt, is_irrational, make_block, realize,
    realize_form, seq, sort_blocks, validate,
)
from .matcore import GaussQ, Matrix, to_sympy
from .pencil import RealKcf, _close, kcf_of_congruence

SIGN_N = "sign-of-N"
SIGN_A = "sign-of-a"
NONE = "none"
SIGN_CAP = 2 ** 12


class ClassificationError(ValueError):
    pass


@dataclass(frozen=True)
class CanonicalForm:
    kind: str
    blocks: tuple
    ambiguity: tuple = ()
    diagnostics: tuple = field(default=(), compare=False)

    @staticmethod
    def make(kind, blocks, ambiguity=None, diagnostics=()):
        blocks = list(blocks)
        amb = list(ambiguity) if ambiguity is not None else [NONE] * len(blocks)
        order = sorted(range(len(blocks)), key=lambda i: blocks[i].sort_key())
        for b in blocks:
            if b.kind != kind:
                raise BlockError(f"block {b} does not belong to kind {kind}")
        return CanonicalForm(kind, tuple(blocks[i] for i in order), tuple(amb[i] for i in order),
                             tuple(diagnostics))

    @property
    def ambiguous(self):
        return [i for i, f in enumerate(self.ambiguity) if f != NONE]

    def specs(self):
        return [b.spec() for b in self.blocks]

    def to_dict(self):
        return {"kind": self.kind, "blocks": self.specs(), "ambiguous": self.ambiguous,
                "ambiguity": list(self.ambiguity), "diagnostics": list(self.diagnostics)}

    def __str__(self):
        return "+".join(self.specs())


# scalar helpers ---------------------------------------------------------------

def _num(x):
    if isinstance(x, (float, complex)):
        return x
    return complex(sp.N(to_sympy(x), 30))


def _real_lt(x, y):
    return _num(x).real < _num(y).real


def _sqrt(x):
    if isinstance(x, float):
        return x ** 0.5
    return exact(sp.sqrt(to_sympy(x)))


def _neg(x):
    return -x


def _take(pool, pred):
    for i, item in enumerate(pool):
        if pred(item):
            return pool.pop(i)
    return None


def recover_rotation(c, d, k):
    """(a, b) with a >= 0 and Gamma_k (x) C(a, b) producing the complex KCF entry (c, d, k)."""
    s = c if k % 2 else -c
    if isinstance(c, float) or isinstance(d, float):
        a = ((1 + s) / 2) ** 0.5
        return a, d / (2 * (1 + s)) ** 0.5
    a = _sqrt((1 + s) / 2 if not is_irrational(s) else (1 + to_sympy(s)) / 2)
    den = _sqrt(2 * (1 + s) if not is_irrational(s) else 2 * (1 + to_sympy(s)))
    b = exact(to_sympy(d) / to_sympy(den))
    return a, b


def rotation_kcf(a, b, k):
    """Forward map (a, b) -> ((-1)^{k+1}(a^2 - b^2), 2|ab|)."""
    sa, sb = to_sympy(a), to_sympy(b)
    c = exact(sp.nsimplify((-1) ** (k + 1) * (sa ** 2 - sb ** 2)))
    d = exact(sp.nsimplify(2 * sp.Abs(sa * sb)))
    return c, d


# KCF table inversion ---------------------------------------------------------------

def form1_from_kcf(kcf: RealKcf, tol=None) -> CanonicalForm:
    eq = (lambda x, y: abs(_num(x) - _num(y)) <= tol) if tol else _close
    blocks, flags = [], []

    def add(b, flag=NONE):
        blocks.append(b)
        flags.append(flag)

    left = list(kcf.left)
    for e in kcf.right:
        if e not in left:
            raise ClassificationError(f"not realizable as real congruence class: right index {e} unpaired")
        left.remove(e)
        add(make_block("R1-i", 2 * e + 1))
    if left:
        raise ClassificationError(f"not realizable as real congruence class: left indices {left} unpaired")

    real = list(kcf.real)
    for l in kcf.inf:
        hit = _take(real, lambda t: t[1] == l and eq(t[0], 0))
        if hit is None:
            raise ClassificationError(f"not realizable as real congruence class: infinite block {l} unpaired")
        add(make_block("R1-i", 2 * l))

    unit_rest = []
    others = []
    for mu, k in real:
        if eq(mu, 0):
            raise ClassificationError("not realizable as real congruence class: zero eigenvalue unpaired")
        if eq(mu, 1) or eq(mu, -1):
            delta = 1 if eq(mu, 1) else -1
            if delta == (-1) ** (k + 1):
                add(make_block("R1-ii", k, n=1), SIGN_N)
            else:
                unit_rest.append(k)
        else:
            others.append((mu, k))
    for k in sorted(set(unit_rest)):
        cnt = unit_rest.count(k)
        if cnt % 2:
            raise ClassificationError(f"not realizable as real congruence class: unpaired eigenvalue {(-1) ** k}")
        for _ in range(cnt // 2):
            add(make_block("R1-ii", k, n=Rotation(Fraction(0), Fraction(1))))

    inside = [t for t in others if abs(_num(t[0]).real) < 1]
    outside = [t for t in others if abs(_num(t[0]).real) > 1]
    for mu, k in inside:
        hit = _take(outside, lambda t: t[1] == k and eq(t[0] * mu, 1) if not is_irrational(mu) and not is_irrational(t[0])
                    else t[1] == k and eq(to_sympy(t[0]) * to_sympy(mu), 1))
        if hit is None:
            raise ClassificationError(f"not realizable as real congruence class: eigenvalue {fmt(mu)} lacks reciprocal")
        add(make_block("R1-iii", k, a=mu, check=tol is None))
    if outside:
        raise ClassificationError("not realizable as real congruence class: unpaired reciprocal eigenvalue")

    cplx = list(kcf.complex)
    unit = [t for t in cplx if eq(_sq(t[0]) + _sq(t[1]), 1)]
    rest = [t for t in cplx if t not in unit]
    for c, d, k in unit:
        a, b = recover_rotation(c, d, k)
        add(make_block("R1-ii", k, n=Rotation(a, b), check=tol is None), SIGN_A)
    small = [t for t in rest if _num(_sq(t[0]) + _sq(t[1])).real < 1]
    big = [t for t in rest if _num(_sq(t[0]) + _sq(t[1])).real > 1]
    for c, d, k in small:
        r = _sq(c) + _sq(d)
        hit = _take(big, lambda t: t[2] == k and eq(t[0], c / r) and eq(t[1], d / r))
        if hit is None:
            raise ClassificationError("not realizable as real congruence class: complex pair lacks Moebius partner")
        add(make_block("R1-iv", k, a=c, b=d, check=tol is None))
    if big:
        raise ClassificationError("not realizable as real congruence class: unpaired complex pair")
    return CanonicalForm.make("Form1", blocks, flags, kcf.diagnostics)


def _sq(x):
    if isinstance(x, (float, complex)):
        return x * x
    return exact(sp.nsimplify(to_sympy(x) ** 2)) if is_irrational(x) else x * x


def classify_form1(a: Matrix, float_fallback=False, tolerance=None, resolve=True, m_max=None) -> CanonicalForm:
    if not a.is_square():
        raise ValueError("matrix must be square")
    if not a.is_real():
        raise ValueError("matrix must be real")
    kcf = kcf_of_congruence(a, float_fallback=float_fallback)
    form = form1_from_kcf(kcf, tol=tolerance if a.backend == "float" else None)
    if resolve and form.ambiguous:
        form = resolve_signs(a, form, m_max=m_max)
    return form


def classify_form2(a: Matrix, **kw) -> CanonicalForm:
    return form1_to_form2(classify_form1(a, **kw))


# sign resolution ---------------------------------------------------------------------

def _flip(b: CanonicalBlock) -> CanonicalBlock:
    if isinstance(b.n, Rotation):
        return replace(b, n=Rotation(_neg(b.n.a), b.n.b))
    return replace(b, n=-b.n)


def _abs_block(b: CanonicalBlock) -> CanonicalBlock:
    if b.family not in ("R1-ii", "R2-TriIII") or b.n is None:
        return b
    if isinstance(b.n, Rotation):
        return b if not _real_lt(b.n.a, 0) else _flip(b)
    return replace(b, n=1)


def _realizable(b: CanonicalBlock) -> bool:
    vals = [b.mu, b.a, b.b, b.alpha] + ([b.n.a, b.n.b] if isinstance(b.n, Rotation) else [])
    return not any(is_irrational(v) or isinstance(v, (float, complex)) for v in vals)


def _unit_factors(blocks):
    """(factor, largest block size) for the unit-circle eigenvalues of ambiguous blocks."""
    jmax = {}
    for b in blocks:
        if isinstance(b.n, Rotation):
            key = ("quad", rotation_kcf(b.n.a, b.n.b, b.k)[0])
        else:
            key = (-1) ** (b.k + 1)
        jmax[key] = max(jmax.get(key, 0), b.k)
    return sorted(jmax.items(), key=lambda t: str(t[0]))


def resolve_signs(a: Matrix, form: CanonicalForm, m_max=None, cap=SIGN_CAP) -> CanonicalForm:
    """Pick the sign assignment whose congruence-invariant profile matches ``a``."""
    from .verify import congruence_invariant_profile, filtered_profile

    idx = form.ambiguous
    if not idx:
        return form
    blocks = list(form.blocks)
    if form.kind == "Form2":
        f1 = resolve_signs(a, form2_to_form1(form), m_max, cap)
        return form1_to_form2(f1)
    if not all(_realizable(b) for b in blocks):
        return replace(form, diagnostics=form.diagnostics + ("sign resolution skipped: inexact parameters",))
    # identical ambiguous blocks only matter through how many of them are negated
    groups = {}
    for i in idx:
        groups.setdefault(_abs_block(blocks[i]), []).append(i)
    keys = sorted(groups, key=lambda b: b.sort_key())
    total = 1
    for g in keys:
        total *= len(groups[g]) + 1
    if total > cap:
        return replace(form, diagnostics=form.diagnostics + (f"sign resolution skipped: {total} assignments exceed cap {cap}",))
    n = a.rows
    mm = n if m_max is None else m_max
    target = congruence_invariant_profile(a, mm)
    survivors = []
    for counts in itertools.product(*[range(len(groups[g]) + 1) for g in keys]):
        cand = list(blocks)
        for g, c in zip(keys, counts):
            for j, i in enumerate(groups[g]):
                cand[i] = _flip(g) if j < c else g
        if congruence_invariant_profile(realize_form(cand), mm) == target:
            survivors.append((counts, cand))
    if not survivors:
        return replace(form, diagnostics=form.diagnostics + ("sign resolution found no consistent assignment",))
    diag = list(form.diagnostics)
    if len(survivors) > 1:
        # tie-break with inertias filtered through the unit-circle eigenvalue factors
        factors = _unit_factors([blocks[i] for i in idx])
        ref = filtered_profile(a, factors)
        kept = [s for s in survivors if filtered_profile(realize_form(s[1]), factors) == ref]
        if kept and len(kept) < len(survivors):
            diag.append(f"filtered invariants reduced survivors {len(survivors)} -> {len(kept)}")
            survivors = kept
    counts, cand = survivors[0]
    flags = list(form.ambiguity)
    if len(survivors) == 1:
        for i in idx:
            flags[i] = NONE
    else:
        varying = {g for gi, g in enumerate(keys) if len({s[0][gi] for s in survivors}) > 1}
        for g in keys:
            if g not in varying:
                for i in groups[g]:
                    flags[i] = NONE
        diag.append("sign survivors: " + "; ".join("+".join(b.spec() for b in sort_blocks(s[1])) for s in survivors))
    return CanonicalForm.make(form.kind, cand, flags, diag)


# conversions ---------------------------------------------------------------------

def eps_k(k: int) -> int:
    return 1 if k % 4 in (1, 2) else -1


def _need(f: CanonicalForm, kind):
    if f.kind != kind:
        raise ValueError(f"expected a {kind} form, got {f.kind}")


def _n_times(n, e):
    if isinstance(n, Rotation):
        return Rotation(n.a if e == 1 else _neg(n.a), n.b)
    return n * e


def form1_to_form2(f: CanonicalForm) -> CanonicalForm:
    _need(f, "Form1")
    out = []
    for b in f.blocks:
        if b.family == "R1-i":
            out.append(make_block("R2-TriI", b.k, a=0))
        elif b.family == "R1-ii":
            out.append(make_block("R2-TriIII", b.k, n=_n_times(b.n, eps_k(b.k)), check=_realizable(b)))
        elif b.family == "R1-iii":
            out.append(make_block("R2-TriI", 2 * b.k, a=b.a, check=_realizable(b)))
        else:
            out.append(make_block("R2-TriII", b.k, a=b.a, b=b.b, check=_realizable(b)))
    return CanonicalForm.make("Form2", out, f.ambiguity, f.diagnostics)


def form2_to_form1(f: CanonicalForm) -> CanonicalForm:
    _need(f, "Form2")
    out = []
    for b in f.blocks:
        if b.family == "R2-TriI":
            if b.a == 0:
                out.append(make_block("R1-i", b.k))
            else:
                out.append(make_block("R1-iii", b.k // 2, a=b.a, check=_realizable(b)))
        elif b.family == "R2-TriIII":
            out.append(make_block("R1-ii", b.k, n=_n_times(b.n, eps_k(b.k)), check=_realizable(b)))
        else:
            out.append(make_block("R1-iv", b.k, a=b.a, b=b.b, check=_realizable(b)))
    return CanonicalForm.make("Form1", out, f.ambiguity, f.diagnostics)


def hs_to_fhs(f: CanonicalForm) -> CanonicalForm:
    _need(f, "HS")
    out = []
    for b in f.blocks:
        if b.family == "HS-Type0":
            out.append(make_block("FHS-TriI", b.k, mu=0))
        elif b.family == "HS-TypeI":
            out.append(make_block("FHS-TriII", b.k, mu=b.mu * eps_k(b.k)))
        else:
            out.append(make_block("FHS-TriI", 2 * b.k, mu=b.mu))
    return CanonicalForm.make("FHS", out, f.ambiguity, f.diagnostics)


def fhs_to_hs(f: CanonicalForm) -> CanonicalForm:
    _need(f, "FHS")
    out = []
    for b in f.blocks:
        if b.family == "FHS-TriI":
            if b.mu == 0:
                out.append(make_block("HS-Type0", b.k))
            else:
                out.append(make_block("HS-TypeII", b.k // 2, mu=b.mu))
        else:
            out.append(make_block("HS-TypeI", b.k, mu=b.mu * eps_k(b.k)))
    return CanonicalForm.make("HS", out, f.ambiguity, f.diagnostics)


# LW blocks ---------------------------------------------------------------

def _rot_block(k, a, b):
    return make_block("R1-ii", k, n=Rotation(exact(a), exact(b)), check=False)


def _beta4_rotation(k, b):
    bb = sp.Abs(to_sympy(b))
    root = sp.sqrt(1 + bb ** 2)
    if k % 2 == 0:
        return _rot_block(k, bb / root, 1 / root)
    return _rot_block(k, 1 / root, bb / root)


def lw_to_form1(blk: CanonicalBlock, allow_degenerate=False) -> CanonicalForm:
    f, k = blk.family, blk.k
    if not f.startswith("LW-"):
        raise ValueError(f"{blk} is not an LW block")
    validate(blk, degenerate=allow_degenerate)
    out, flags = [], []

    def add(b, flag=NONE, times=1):
        out.extend([b] * times)
        flags.extend([flag] * times)

    if f == "LW-m3":
        add(make_block("R1-i", 2 * k + 1))
    elif f == "LW-inf4":
        add(make_block("R1-ii", k, n=blk.eps * (-1) ** (k // 2 + 1)))
    elif f in ("LW-inf5", "LW-o4"):
        add(make_block("R1-ii", k, n=Rotation(Fraction(0), Fraction(1))))
    elif f == "LW-o3":
        add(make_block("R1-ii", k, n=blk.eps * (-1) ** ((k - 1) // 2)))
    elif f == "LW-alpha3":
        al = blk.alpha
        if al == 1:
            add(make_block("R1-i", 2 * k))
        elif al == -1:
            raise BlockError("alpha = -1 has no image")
        else:
            add(make_block("R1-iii", k, a=(1 - al) / (1 + al)))
    elif f == "LW-beta4":
        if blk.b == 0:
            if k % 2 == 0:
                add(make_block("R1-ii", k, n=Rotation(Fraction(0), Fraction(1))))
            else:
                add(make_block("R1-ii", k, n=blk.eps * (-1) ** ((k - 1) // 2)), times=2)
        else:
            add(_beta4_rotation(k, blk.b), SIGN_A)
    elif f == "LW-beta5":
        a, b = blk.a, blk.b
        if b == 0 and a == 0:
            if k % 2 == 0:
                add(make_block("R1-ii", k, n=Rotation(Fraction(0), Fraction(1))), times=2)
            else:
                add(make_block("R1-ii", k, n=1), times=2)
                add(make_block("R1-ii", k, n=-1), times=2)
        elif b == 0 and abs(a) == 1:
            add(make_block("R1-i", 2 * k), times=2)
        elif b == 0:
            add(make_block("R1-iii", k, a=(1 - abs(a)) / (1 + abs(a))), times=2)
        elif a == 0:
            add(_beta4_rotation(k, b), SIGN_A, times=2)
        else:
            den = (1 + abs(a)) ** 2 + b * b
            add(make_block("R1-iv", k, a=(1 - (a * a + b * b)) / den, b=2 * abs(b) / den))
    else:
        raise ValueError(f"unknown LW family {f}")
    return CanonicalForm.make("Form1", out, flags)


def forms_match(f: CanonicalForm, g: CanonicalForm) -> bool:
    """Multiset equality, ignoring signs on blocks flagged ambiguous on either side."""
    if f.kind != g.kind or len(f.blocks) != len(g.blocks):
        return False
    pool = list(zip(g.blocks, g.ambiguity))
    for b, fl in zip(f.blocks, f.ambiguity):
        hit = _take(pool, lambda t: _block_eq(t[0], b))
        if hit is None:
            hit = _take(pool, lambda t: (fl != NONE or t[1] != NONE) and _block_eq(_abs_block(t[0]), _abs_block(b)))
        if hit is None:
            return False
    return True


def _block_eq(x: CanonicalBlock, y: CanonicalBlock) -> bool:
    if (x.family, x.k, x.eps) != (y.family, y.k, y.eps):
        return False
    for nm in ("mu", "a", "b", "alpha"):
        u, v = getattr(x, nm), getattr(y, nm)
        if (u is None) != (v is None) or (u is not None and not _close(u, v)):
            return False
    if isinstance(x.n, Rotation) and isinstance(y.n, Rotation):
        return _close(x.n.a, y.n.a) and _close(x.n.b, y.n.b)
    return x.n == y.n


# consistency ---------------------------------------------------------------------

def beta4_pair(b):
    """((1-b^2)/(1+b^2), 2|b|/(1+b^2)): the complex KCF entry of the beta4 block."""
    b = exact(b)
    return (1 - b * b) / (1 + b * b), 2 * abs(b) / (1 + b * b)


def beta5_pairs(a, b):
    """The complex pair of the beta5 block and its Moebius partner."""
    a, b = exact(a), exact(b)
    r = a * a + b * b
    dm, dp = (a - 1) ** 2 + b * b, (a + 1) ** 2 + b * b
    return ((1 - r) / dm, 2 * abs(b) / dm), ((1 - r) / dp, 2 * abs(b) / dp)


def beta5_instance(a, b):
    """(R' - l1 T, (1 - l1) S') with l1 the eigenvalue of geometric multiplicity one."""
    a, b = exact(a), exact(b)
    l1 = GaussQ(a * a + b * b - 1, 2 * b) / ((a - 1) ** 2 + b * b)
    t = Matrix([[b, a - 1], [a - 1, -b]])
    rp = Matrix([[b, a + 1], [a + 1, -b]])
    sp_ = Matrix([[0, 1], [1, 0]])
    return rp - t.scale(l1), sp_.scale(1 - l1)


BETA4_INSTANCE = (Matrix([[1, GaussQ(0, -1)], [GaussQ(0, 1), 1]]), Matrix([[0, -1], [1, 0]]))


def classify_lw_consistency(blk: CanonicalBlock, allow_degenerate=False) -> dict:
    from .verify import z_block_nullity
    from .witnesses import check_witness, lw_witness

    expected = lw_to_form1(blk, allow_degenerate)
    m = realize(blk)
    got = classify_form1(m)
    kcf = kcf_of_congruence(m)
    report = {
        "block": blk.spec(),
        "expected": expected.specs(),
        "expected_ambiguous": expected.ambiguous,
        "classified": got.specs(),
        "classified_ambiguous": got.ambiguous,
        "kcf": kcf.to_dict(),
        "facts": {},
    }
    ok = forms_match(got, expected)
    facts = report["facts"]
    if blk.family == "LW-beta4" and blk.b != 0:
        c, d = beta4_pair(blk.b)
        facts["complex_pair"] = [fmt(c), fmt(d)]
        facts["complex_pair_ok"] = len(kcf.complex) == 1 and seq(kcf.complex[0][0], c) and seq(kcf.complex[0][1], d)
        nul, crit = z_block_nullity(*BETA4_INSTANCE, max(blk.k, 2))
        facts["z_nullity"], facts["z_criterion"] = nul, crit
        ok = ok and facts["complex_pair_ok"] and nul == 1 and crit
    if blk.family == "LW-beta5" and blk.a != 0 and blk.b != 0:
        p, q = beta5_pairs(blk.a, blk.b)
        facts["complex_pairs"] = [[fmt(p[0]), fmt(p[1])], [fmt(q[0]), fmt(q[1])]]
        have = sorted((x[0], x[1]) for x in kcf.complex)
        facts["complex_pairs_ok"] = have == sorted([p, q]) and all(x[2] == blk.k for x in kcf.complex)
        za, zb = beta5_instance(blk.a, blk.b)
        nul, crit = z_block_nullity(za, zb, max(blk.k, 2))
        facts["z_nullity"], facts["z_criterion"] = nul, crit
        ok = ok and facts["complex_pairs_ok"] and nul == 1 and crit
    if blk.family in ("LW-inf4", "LW-o3", "LW-inf5", "LW-o4"):
        w = lw_witness(blk.family, blk.k, eps=blk.eps)
        facts["witness_ok"] = check_witness(w)
        ok = ok and facts["witness_ok"]
    report["consistent"] = bool(ok)
    return report
