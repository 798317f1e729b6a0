"""Command-line entry point. All output is JSON except `tables --format markdown`."""
from __future__ import annotations

import argparse
import json
import sys

from . import grids
from .blocks import BlockError, CanonicalBlock, make_block, parse_block, parse_form, realize, validate
from .classify import (
    CanonicalForm, ClassificationError, classify_form1, classify_form2, classify_lw_consistency,
    fhs_to_hs, form1_to_form2, form2_to_form1, hs_to_fhs, lw_to_form1,
)
from .matcore import Matrix, format_scalar
from .pencil import UnsupportedExact, kcf_equal, kcf_of_congruence, real_kcf
from .verify import check_congruence, congruence_invariant_profile
from . import witnesses as W


class UsageError(Exception):
    pass


def _emit(obj):
    print(json.dumps(obj, sort_keys=False, separators=(",", ":")))


def load_matrix(path: str) -> Matrix:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from exc
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from exc
    try:
        return Matrix.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: not a matrix: {exc}") from exc


def _parse_lw(spec: str, degenerate: bool) -> CanonicalBlock:
    blk = parse_block(spec, normalize=False, check=False)
    validate(blk, degenerate=degenerate)
    return blk


# subcommands ------------------------------------------------------------------------

def cmd_block(args):
    blk = parse_block(args.spec, check=not args.degenerate)
    if args.degenerate:
        validate(blk, degenerate=True)
    _emit(realize(blk).to_dict())
    return 0


def cmd_canon(args):
    a = load_matrix(args.matrix)
    fn = classify_form1 if args.form == "1" else classify_form2
    form = fn(a, float_fallback=args.float_fallback, tolerance=args.tolerance)
    _emit({"blocks": form.specs(), "ambiguous": form.ambiguous, "diagnostics": list(form.diagnostics)})
    return 0


_CONVERT = {
    ("form1", "form2"): form1_to_form2,
    ("form2", "form1"): form2_to_form1,
    ("hs", "fhs"): hs_to_fhs,
    ("fhs", "hs"): fhs_to_hs,
}
_KIND = {"form1": "Form1", "form2": "Form2", "hs": "HS", "fhs": "FHS"}


def cmd_convert(args):
    src, dst = args.src, args.dst
    if src == "lw":
        if dst not in ("form1", "form2"):
            raise UsageError("lw converts to form1 or form2")
        out = lw_to_form1(_parse_lw(args.spec, args.degenerate), allow_degenerate=args.degenerate)
        if dst == "form2":
            out = form1_to_form2(out)
    elif (src, dst) in _CONVERT:
        out = _CONVERT[(src, dst)](CanonicalForm.make(_KIND[src], parse_form(args.spec)))
    elif src == dst and src in _KIND:
        out = CanonicalForm.make(_KIND[src], parse_form(args.spec))
    else:
        raise UsageError(f"no conversion from {src} to {dst}")
    _emit(str(out))
    return 0


def cmd_consistency(args):
    rep = classify_lw_consistency(_parse_lw(args.spec, args.degenerate), args.degenerate)
    _emit(rep)
    return 0 if rep["consistent"] else 1


def cmd_kcf(args):
    e, a = load_matrix(args.e), load_matrix(args.a)
    if e.shape != a.shape:
        raise UsageError("pencil matrices must have the same shape")
    _emit(real_kcf(e, a, float_fallback=args.float_fallback).to_dict())
    return 0


def _wparams(items):
    out = {}
    for it in items:
        if "=" not in it:
            raise UsageError(f"witness parameter {it!r} is not key=value")
        key, val = it.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _witness(name, p):
    k = int(p.get("k", 1))
    mu, a, b, alpha = p.get("mu"), p.get("a"), p.get("b"), p.get("alpha")
    eps = int(p["eps"]) if "eps" in p else None
    if name == "W":
        return W.w_matrix(mu), f"diag({mu},conj)", "C(a,b)"
    if name == "U":
        return W.u_matrix(k, mu), f"J_{k}({mu})+J_{k}(conj)", f"C_{2 * k}(a,b)"
    if name == "V":
        return W.v_matrix(k, mu), f"T_{k}({mu})+T_{k}(conj)", f"That_{2 * k}(a,b)"
    if name == "PkSk":
        w, sign = W.pks_witness(k)
        return w, f"Gamma_{k}", f"{'+' if sign == 1 else '-'}Gammatilde_{k}"
    if name == "mu-reciprocal":
        return W.mu_rem_witness(k, mu), f"H_{2 * k}({mu})", "[[0,I],[J^-*,0]]"
    if name in ("inf4", "o3", "inf5", "o4"):
        w = W.lw_witness(name, k, eps=eps)
        blk = make_block("LW-" + name, k, eps=eps)
        return w, blk.spec(), str(lw_to_form1(blk))
    if name == "alpha3-flip":
        w = W.lw_witness("alpha3-flip", k, alpha=alpha)
        return w, make_block("LW-alpha3", k, alpha=alpha).spec(), "alpha3 with the sign of alpha reversed"
    if name in ("form1-step1", "form1-step2"):
        w = W.step_witness(name, k, mu=mu)
        src = f"mu*Gamma_{k}+conj" if name == "form1-step1" else f"H_{2 * k}({mu})+H_{2 * k}(conj)"
        return w, src, ("Gamma (x) C(a,b)" if name == "form1-step1" else f"Hhat_{4 * k}(a,b)")
    if name in ("bflip-C", "bflip-Hhat", "bflip-That"):
        return W.step_witness(name, k, a=a, b=b), f"{name[6:]}(a,b)", f"{name[6:]}(a,-b)"
    raise UsageError(f"unknown witness {name!r}")


def cmd_witness(args):
    w, src, tgt = _witness(args.name, _wparams(args.params))
    ok = W.check_witness(w)
    _emit({
        "transform": w.transform.to_dict(),
        "scale": format_scalar(w.scale),
        "certificate": {"relation": w.relation, "source-spec": src, "target-spec": tgt, "verified": ok},
    })
    return 0 if ok else 1


def cmd_verify(args):
    if args.what == "congruence":
        if len(args.files) != 3:
            raise UsageError("verify congruence needs S.json A.json B.json")
        s, a, b = (load_matrix(f) for f in args.files)
        if s.cols != a.rows or a.rows != a.cols or b.shape != (s.rows, s.rows):
            raise UsageError("dimension mismatch")
        ok = check_congruence(s, a, b, star=args.star)
        _emit({"relation": W.CONG_STAR if args.star else W.CONG_T, "verified": ok})
        return 0 if ok else 1
    if len(args.files) != 1:
        raise UsageError("verify profile needs one matrix")
    a = load_matrix(args.files[0])
    prof = congruence_invariant_profile(a, args.m)
    _emit({"profile": [list(p.as_tuple()) for p in prof]})
    return 0


# tables ---------------------------------------------------------------------------

def _kcf_agree(x: CanonicalBlock, images, star=False):
    lhs = kcf_of_congruence(realize(x), star=star)
    rhs = None
    for b in images:
        k = kcf_of_congruence(realize(b), star=star)
        rhs = k if rhs is None else rhs + k
    return kcf_equal(lhs, rhs)


def build_tables(kmax=3):
    rel1 = []
    for b in grids.hs_grid(kmax):
        img = hs_to_fhs(CanonicalForm.make("HS", [b]))
        rel1.append({"source": b.spec(), "image": str(img), "kcf_agrees": _kcf_agree(b, img.blocks, True)})
    rel2 = []
    for b in grids.form1_grid(kmax):
        img = form1_to_form2(CanonicalForm.make("Form1", [b]))
        rel2.append({"source": b.spec(), "image": str(img), "kcf_agrees": _kcf_agree(b, img.blocks)})
    t1, apx = [], []
    for b, deg in grids.lw_grid(kmax):
        img = lw_to_form1(b, allow_degenerate=deg)
        row = {"source": b.spec(), "image": str(img),
               "ambiguous": [img.blocks[i].spec() for i in img.ambiguous],
               "consistent": classify_lw_consistency(b, deg)["consistent"]}
        (apx if deg else t1).append(row)
    return {"hs_to_fhs": rel1, "form1_to_form2": rel2, "lw_to_form1": t1, "lw_degenerate": apx}


def _markdown(tables):
    out = []
    titles = {"hs_to_fhs": "HS to FHS (*congruence)", "form1_to_form2": "Form 1 to Form 2",
              "lw_to_form1": "LW blocks to Form 1", "lw_degenerate": "Degenerate beta4/beta5 blocks"}
    for key, rows in tables.items():
        out.append(f"### {titles[key]}\n")
        check = "kcf_agrees" if "kcf_agrees" in rows[0] else "consistent"
        out.append(f"| source | image | {check} |")
        out.append("|---|---|---|")
        for r in rows:
            out.append(f"| `{r['source']}` | `{r['image']}` | {'yes' if r[check] else 'NO'} |")
        out.append("")
    return "\n".join(out)


def cmd_tables(args):
    t = build_tables(args.kmax)
    if args.format == "markdown":
        print(_markdown(t))
    else:
        _emit(t)
    ok = all(r.get("kcf_agrees", r.get("consistent")) for rows in t.values() for r in rows)
    return 0 if ok else 1


def cmd_selftest(args):
    from .suites import run_all, seed_from_env

    which = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_all(seed=seed_from_env(), jobs=args.jobs, which=which)
    report = [{"criterion": r.number, "name": r.name, "passed": r.passed, "checks": r.checked,
               "failures": len(r.failures), "details": r.details} for r in results]
    for r in results:
        print(r.line(), file=sys.stderr)
    _emit({"passed": all(r.passed for r in results), "criteria": report})
    return 0 if all(r.passed for r in results) else 1


# parser ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="realcong", description="Real congruence canonical forms.")
    p.add_argument("--float-fallback", action="store_true", help="allow floating eigenvalues for high-degree factors")
    p.add_argument("--tolerance", type=float, default=None, help="tolerance for the float fallback")
    # the same flags after the subcommand; SUPPRESS keeps the top-level value when absent
    num = argparse.ArgumentParser(add_help=False)
    num.add_argument("--float-fallback", action="store_true", default=argparse.SUPPRESS)
    num.add_argument("--tolerance", type=float, default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("block", help="print the matrix of a block spec")
    s.add_argument("spec")
    s.add_argument("--degenerate", action="store_true")
    s.set_defaults(fn=cmd_block)

    s = sub.add_parser("canon", help="canonical form of a real matrix", parents=[num])
    s.add_argument("--form", choices=["1", "2"], default="1")
    s.add_argument("matrix")
    s.set_defaults(fn=cmd_canon)

    s = sub.add_parser("convert", help="convert between block vocabularies")
    s.add_argument("--from", dest="src", required=True, choices=["lw", "form1", "form2", "hs", "fhs"])
    s.add_argument("--to", dest="dst", required=True, choices=["form1", "form2", "hs", "fhs"])
    s.add_argument("--degenerate", action="store_true")
    s.add_argument("spec")
    s.set_defaults(fn=cmd_convert)

    s = sub.add_parser("consistency", help="check an LW block against its table image")
    s.add_argument("spec")
    s.add_argument("--degenerate", action="store_true")
    s.set_defaults(fn=cmd_consistency)

    s = sub.add_parser("kcf", help="real Kronecker form of the pencil (E, A)", parents=[num])
    s.add_argument("e")
    s.add_argument("a")
    s.set_defaults(fn=cmd_kcf)

    s = sub.add_parser("witness", help="print and certify a constructive witness")
    s.add_argument("name")
    s.add_argument("params", nargs="*", help="key=value (k, mu, a, b, alpha, eps)")
    s.set_defaults(fn=cmd_witness)

    s = sub.add_parser("verify", help="check a congruence or print the invariant profile")
    s.add_argument("what", choices=["congruence", "profile"])
    s.add_argument("files", nargs="+")
    s.add_argument("--star", action="store_true")
    s.add_argument("--m", type=int, default=3)
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("tables", help="correspondence tables on a parameter grid")
    s.add_argument("--format", choices=["json", "markdown"], default="json")
    s.add_argument("--kmax", type=int, default=3)
    s.set_defaults(fn=cmd_tables)

    s = sub.add_parser("selftest", help="run the acceptance suites")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--only", default=None, help="comma-separated criterion numbers")
    s.set_defaults(fn=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BlockError, ValueError, UnsupportedExact) as exc:
        if isinstance(exc, ClassificationError):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
