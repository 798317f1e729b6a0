"""Acceptance suites. Each criterion returns a SuiteResult; the CLI `selftest`
command and tests/test_acceptance.py both run these."""
from __future__ import annotations

import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction as F

from . import grids
from .blocks import Rotation, gamma, h_block, jordan, make_block, realize, realize_form
from .classify import (
    SIGN_A, SIGN_N, CanonicalForm, beta4_pair, beta5_pairs, beta5_instance, BETA4_INSTANCE,
    classify_form1, classify_lw_consistency, forms_match, recover_rotation, rotation_kcf,
)
from .matcore import GAUSSIAN, GaussQ, I, Matrix, direct_sum, kron
from .pencil import expected_real_kcf, kcf_equal, kcf_of_congruence, realify_equivalence
from .verify import check_similarity, z_block_nullity
from . import witnesses as W

# sign-of-a blocks resolved / seen in the seed-0 round trip; frozen from a run
SIGN_A_GOLDEN = (123, 123)


@dataclass
class SuiteResult:
    number: int
    name: str
    passed: bool
    checked: int
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        extra = "".join(f" {k}={v}" for k, v in self.details.items())
        return f"criterion {self.number} [{self.name}]: {tag} ({self.checked} checks, {len(self.failures)} failures){extra}"


def seed_from_env(default=0):
    return int(os.environ.get("REALCONG_SEED", default))


def _rand_invertible(rng, n, lo=-2, hi=2, gaussian=False):
    while True:
        if gaussian:
            m = Matrix([[GaussQ(rng.randint(lo, hi), rng.randint(lo, hi)) for _ in range(n)] for _ in range(n)])
        else:
            m = Matrix([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])
        if m.det() != 0:
            return m


# 1 -------------------------------------------------------------------------------

def criterion_1(seed=0):
    fails, n = [], 0
    for b in grids.canonical_grid():
        star = b.kind in ("HS", "FHS")
        n += 1
        if not kcf_equal(kcf_of_congruence(realize(b), star=star), expected_real_kcf(b)):
            fails.append(b.spec())
    return SuiteResult(1, "table reproduction", not fails, n, fails)


# 2 -------------------------------------------------------------------------------

def all_witnesses(seed=0):
    """Every constructive witness on its parameter grid, as (label, Witness)."""
    rng = random.Random(seed)
    out = []
    cmu = [GaussQ(0, 1), GaussQ(F(3, 5), F(4, 5)), GaussQ(F(1, 2), F(1, 2)), GaussQ(-2, 3), GaussQ(F(1, 2), -1)]
    for mu in cmu:
        out.append((f"W mu={mu}", W.w_matrix(mu)))
        for k in range(1, 5):
            out.append((f"U k={k} mu={mu}", W.u_matrix(k, mu)))
            out.append((f"V k={k} mu={mu}", W.v_matrix(k, mu)))
            out.append((f"step1 k={k} mu={mu}", W.step_witness("form1-step1", k, mu=mu)))
            out.append((f"step2 k={k} mu={mu}", W.step_witness("form1-step2", k, mu=mu)))
    for n in (1, 2, 3):
        for star in (False, True):
            s = _rand_invertible(rng, n, gaussian=star)
            a = Matrix([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
            out.append((f"similarity n={n} star={star}", W.similarity_to_congruence(s, a, star)))
    out.append(("similarity J2", W.similarity_to_congruence(Matrix.diag([1, 2]), jordan(2, 0))))
    for k in range(1, 5):
        for mu in (F(2), F(1, 2), F(-3), GaussQ(1, 2), GaussQ(F(1, 2), F(1, 3))):
            out.append((f"mu-reciprocal k={k} mu={mu}", W.mu_rem_witness(k, mu)))
    for k in range(1, 13):
        w, _ = W.pks_witness(k)
        out.append((f"PkSk k={k}", w))
    for n_, p in [(1, 3), (2, 2), (2, 3), (3, 2)]:
        a = Matrix([[rng.randint(-3, 3) for _ in range(n_)] for _ in range(n_)])
        b = Matrix([[rng.randint(-3, 3) for _ in range(p)] for _ in range(p)])
        out.append((f"kron-commute {n_},{p}", W.congruence(W.kron_commute_perm(n_, p), kron(b, a), kron(a, b))))
    for k in (2, 4, 6):
        for e in (1, -1):
            out.append((f"inf4 k={k} eps={e}", W.lw_witness("inf4", k, eps=e)))
        out.append((f"o4 k={k}", W.lw_witness("o4", k)))
    for k in (1, 3, 5):
        for e in (1, -1):
            out.append((f"o3 k={k} eps={e}", W.lw_witness("o3", k, eps=e)))
        out.append((f"inf5 k={k}", W.lw_witness("inf5", k)))
    for k in range(1, 5):
        for al in (F(1), F(2), F(1, 3), F(5, 2)):
            out.append((f"alpha3-flip k={k} alpha={al}", W.lw_witness("alpha3-flip", k, alpha=al)))
    for a, b in [(F(0), F(1)), (F(3, 5), F(4, 5)), (F(1, 2), F(1, 3)), (F(-2), F(5))]:
        out.append((f"bflip-C {a},{b}", W.step_witness("bflip-C", a=a, b=b)))
        for k in (1, 2, 3):
            out.append((f"bflip-Hhat k={k} {a},{b}", W.step_witness("bflip-Hhat", k, a=a, b=b)))
            out.append((f"bflip-That k={k} {a},{b}", W.step_witness("bflip-That", k, a=a, b=b)))
    return out


def criterion_2(seed=0):
    ws = all_witnesses(seed)
    fails = [lbl for lbl, w in ws if not W.check_witness(w)]
    sign_ok = all(W.pks_witness(k)[1] == (1 if k % 4 in (1, 2) else -1) for k in range(1, 13))
    if not sign_ok:
        fails.append("PkSk sign rule")
    return SuiteResult(2, "witness suite", not fails, len(ws) + 1, fails)


# 3 -------------------------------------------------------------------------------

def roundtrip_vocabulary():
    v = []
    for k in range(1, 5):
        v.append(make_block("R1-i", k))
        v += [make_block("R1-ii", k, n=1), make_block("R1-ii", k, n=-1)]
    for k in range(1, 4):
        v += [make_block("R1-ii", k, n=Rotation(a, b)) for a, b in grids.ROTATIONS]
    for k in (1, 2):
        v += [make_block("R1-iii", k, a=a) for a in grids.H_PARAMS]
    v += [make_block("R1-iv", 1, a=a, b=b) for a, b in grids.HHAT_PARAMS]
    return v


def random_form(rng, vocab, max_blocks=5, max_n=10):
    blocks, n = [], 0
    for _ in range(rng.randint(1, max_blocks)):
        fits = [b for b in vocab if n + b.size <= max_n]
        if not fits:
            break
        b = rng.choice(fits)
        blocks.append(b)
        n += b.size
    return blocks


def roundtrip_case(rng, vocab):
    src = random_form(rng, vocab)
    a = realize_form(src)
    s = _rand_invertible(rng, a.rows)
    got = classify_form1(s @ a @ s.T)
    source = CanonicalForm.make("Form1", src)
    up_to_flags = forms_match(got, source)
    exact_eq = got.blocks == source.blocks
    def count(flag):
        return sum(1 for b in src if (flag == SIGN_N and b.family == "R1-ii" and not isinstance(b.n, Rotation))
                   or (flag == SIGN_A and isinstance(b.n, Rotation) and b.n.a != 0))
    unresolved_n = sum(1 for f in got.ambiguity if f == SIGN_N)
    unresolved_a = sum(1 for f in got.ambiguity if f == SIGN_A)
    # sound: once every flag is cleared, the answer must be exactly the source
    sound = bool(got.ambiguous) or exact_eq
    return {
        "source": [b.spec() for b in source.blocks], "classified": got.specs(),
        "up_to_flags": up_to_flags, "sound": sound,
        "n_blocks": count(SIGN_N), "n_unresolved": unresolved_n,
        "a_blocks": count(SIGN_A), "a_unresolved": unresolved_a,
        "stage2": int(any(d.startswith("filtered invariants") for d in got.diagnostics)),
    }


def criterion_3(seed=0, cases=200):
    rng = random.Random(seed)
    vocab = roundtrip_vocabulary()
    fails = []
    tot = {"n_blocks": 0, "n_unresolved": 0, "a_blocks": 0, "a_unresolved": 0, "stage2": 0}
    for i in range(cases):
        r = roundtrip_case(rng, vocab)
        for key in tot:
            tot[key] += r[key]
        if not (r["up_to_flags"] and r["sound"]):
            fails.append((i, r["source"], r["classified"]))
        elif r["n_unresolved"]:
            fails.append((i, "sign-of-N unresolved", r["source"]))
    a_res = (tot["a_blocks"] - tot["a_unresolved"], tot["a_blocks"])
    details = {
        "sign_N_rate": f"{tot['n_blocks'] - tot['n_unresolved']}/{tot['n_blocks']}",
        "sign_a_rate": f"{a_res[0]}/{a_res[1]}",
        "filtered_tiebreaks": tot["stage2"],
    }
    if SIGN_A_GOLDEN is not None and seed == 0 and cases == 200 and a_res != SIGN_A_GOLDEN:
        fails.append(("sign-of-a golden", a_res, SIGN_A_GOLDEN))
    res = SuiteResult(3, "round-trip classification", not fails, cases, fails, details)
    res.details["_sign_a"] = a_res
    return res


# 4 -------------------------------------------------------------------------------

def criterion_4(seed=0):
    fails, n = [], 0
    for blk, degenerate in grids.lw_grid():
        n += 1
        rep = classify_lw_consistency(blk, degenerate)
        if not rep["consistent"]:
            fails.append(rep)
    vals = [F(1), F(1, 2), F(2)]
    for b in vals:
        n += 1
        blk = make_block("LW-beta4", 1, eps=1, b=b)
        c, d = beta4_pair(b)
        if c != (1 - b * b) / (1 + b * b) or d != 2 * b / (1 + b * b):
            fails.append(("beta4 formula", b))
        kcf = kcf_of_congruence(realize(blk))
        if [(x[0], x[1]) for x in kcf.complex] != [(c, d)]:
            fails.append(("beta4 pair", b, kcf.to_dict()))
        for a in vals:
            n += 1
            blk = make_block("LW-beta5", 1, a=a, b=b)
            p, q = beta5_pairs(a, b)
            r = p[0] ** 2 + p[1] ** 2
            if (q[0], q[1]) != (p[0] / r, p[1] / r):
                fails.append(("beta5 partner", a, b))
            kcf = kcf_of_congruence(realize(blk))
            if sorted((x[0], x[1]) for x in kcf.complex) != sorted([p, q]):
                fails.append(("beta5 pairs", a, b, kcf.to_dict()))
    return SuiteResult(4, "LW block table", not fails, n, fails)


# 5 -------------------------------------------------------------------------------

def criterion_5(seed=0):
    fails, n = [], 0
    for k in range(1, 7):
        g = gamma(k)
        n += 1
        if not check_similarity(g.T.inverse() @ g, jordan(k, (-1) ** (k + 1))):
            fails.append(("gamma", k))
        for mu in (F(2), F(1, 2), F(-3), GaussQ(F(1, 2), 1)):
            n += 1
            h = h_block(k, mu)
            lhs = h.H.inverse() @ h
            mu_g = GaussQ.coerce(mu)
            rhs = direct_sum(jordan(k, mu), jordan(k, 1 / mu_g.conjugate() if isinstance(mu, GaussQ) else 1 / mu))
            if not check_similarity(lhs, rhs):
                fails.append(("H", k, str(mu)))
    return SuiteResult(5, "cosquare similarity", not fails, n, fails)


# 6 -------------------------------------------------------------------------------

def realification_instance(rng):
    """Real pairs (A,B), (C,D) and complex R, S with R(A,B) = (C,D)S."""
    n = rng.randint(1, 4)
    m_ = Matrix([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
    eye = Matrix.identity(n)

    def poly():
        out = Matrix.zeros(n, n)
        p = eye
        for _ in range(rng.randint(1, 3)):
            out = out + p.scale(rng.randint(-2, 2))
            p = p @ m_
        return out

    while True:
        q = poly().to_backend(GAUSSIAN) + poly().to_backend(GAUSSIAN).scale(I)
        if q.det() != 0:
            break
    x = _rand_invertible(rng, n)
    y = _rand_invertible(rng, n)
    xi = x.inverse()
    a, b = xi @ y, xi @ m_ @ y
    # (I, M) is fixed by any polynomial in M: Q (I, M) = (I, M) Q
    r = q @ x.to_backend(GAUSSIAN)
    s = q @ y.to_backend(GAUSSIAN)
    return r, s, (a, b), (eye, m_)


def criterion_6(seed=0, cases=100):
    rng = random.Random(seed)
    fails, taus = [], []
    for i in range(cases):
        r, s, p1, p2 = realification_instance(rng)
        try:
            rt, st, tau = realify_equivalence(r, s, p1, p2)
        except Exception as exc:  # noqa: BLE001 - any failure is a failed instance
            fails.append((i, repr(exc)))
            continue
        if tau > r.rows + s.rows + 1 or not (rt.is_real() and st.is_real()):
            fails.append((i, tau))
        taus.append(tau)
    return SuiteResult(6, "realification", not fails, cases, fails, {"max_tau": max(taus) if taus else None})


# 7 -------------------------------------------------------------------------------

def random_z_instance(rng):
    n = rng.randint(1, 3)
    k = rng.randint(2, 4)
    cplx = rng.random() < 0.5

    def entry():
        return GaussQ(rng.randint(-2, 2), rng.randint(-1, 1)) if cplx else rng.randint(-2, 2)

    while True:
        b = Matrix([[entry() for _ in range(n)] for _ in range(n)])
        if b.det() != 0:
            break
    if rng.random() < 0.4:
        # A = B N with N strictly upper triangular: B^-1 A = N meets its own kernel
        nil = Matrix.from_function(n, n, lambda i, j: entry() if j > i else 0)
        return b @ nil.to_backend(b.backend), b, k
    # low-rank A keeps the kernel nontrivial
    r = rng.randint(0, n)
    if r == 0:
        return Matrix.zeros(n, n), b, k
    u = Matrix([[entry() for _ in range(r)] for _ in range(n)])
    v = Matrix([[entry() for _ in range(n)] for _ in range(r)])
    return u @ v, b, k


def criterion_7(seed=0, cases=100):
    rng = random.Random(seed)
    fails, outcomes = [], {True: 0, False: 0}
    for i in range(cases):
        a, b, k = random_z_instance(rng)
        try:
            _, crit = z_block_nullity(a, b, k)
            outcomes[crit] += 1
        except AssertionError:
            fails.append(i)
    nul, crit = z_block_nullity(*BETA4_INSTANCE, 2)
    if (nul, crit) != (1, True):
        fails.append(("beta4 instance", nul, crit))
    for a_, b_ in [(1, 1), (F(1, 2), 2), (2, F(1, 2))]:
        za, zb = beta5_instance(a_, b_)
        nul, crit = z_block_nullity(za, zb, 2)
        if (nul, crit) != (1, True):
            fails.append(("beta5 instance", a_, b_, nul, crit))
    return SuiteResult(7, "Z-block null-space criterion", not fails, cases + 4, fails,
                       {"criterion_true": outcomes[True], "criterion_false": outcomes[False]})


# 8 -------------------------------------------------------------------------------

def criterion_8(seed=0):
    fails, n = [], 0
    for a, b in grids.PYTHAGOREAN:
        for sa in (1, -1):
            for k in range(1, 5):
                n += 1
                c, d = rotation_kcf(sa * a, b, k)
                ra, rb = recover_rotation(c, d, k)
                if not (ra == a and rb == b):
                    fails.append((str(sa * a), str(b), k, str(ra), str(rb)))
                # the recovered pair must reproduce the same KCF entry
                if rotation_kcf(-ra, rb, k) != (c, d):
                    fails.append(("forward", str(sa * a), str(b), k))
    return SuiteResult(8, "rotation parameter recovery", not fails, n, fails)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def run_criterion(number, seed=0):
    t = time.time()
    res = CRITERIA[number](seed=seed)
    res.seconds = round(time.time() - t, 2)
    res.details.pop("_sign_a", None)
    return res


def run_all(seed=0, jobs=1, which=None):
    which = sorted(which or CRITERIA)
    if jobs <= 1:
        return [run_criterion(n, seed) for n in which]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as ex:
        futs = {n: ex.submit(run_criterion, n, seed) for n in which}
        return [futs[n].result() for n in which]
