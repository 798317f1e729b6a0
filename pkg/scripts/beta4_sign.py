"""Which sign of a does the classifier pick for beta4 blocks with rational images?

For b with 1 + b^2 a rational square the rotation parameters are rational, so
sign resolution can run exactly. Prints the resolved rotation for each
(b, k, eps) and whether it matches eps * (-1)^floor(k/2) times |a|.

    python3 scripts/beta4_sign.py --kmax 5
"""
import argparse
from fractions import Fraction as F

from realcong.blocks import make_block, realize
from realcong.classify import classify_form1, rotation_kcf, recover_rotation

B_VALUES = [F(3, 4), F(4, 3), F(5, 12), F(12, 5), F(8, 15)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--kmax", type=int, default=5)
    args = ap.parse_args()
    agree = total = 0
    for b in B_VALUES:
        c, d = (1 - b * b) / (1 + b * b), 2 * b / (1 + b * b)
        for k in range(1, args.kmax + 1):
            a_abs, rb = recover_rotation(c, d, k)
            for eps in (1, -1):
                blk = make_block("LW-beta4", k, eps=eps, b=b)
                got = classify_form1(realize(blk))
                (res,) = got.blocks
                guess = eps * (-1) ** (k // 2) * abs(a_abs)
                ok = not got.ambiguous and res.n.a == guess and res.n.b == rb
                assert rotation_kcf(res.n.a, res.n.b, k) == (c, d)
                agree += ok
                total += 1
                flag = "" if not got.ambiguous else "  (unresolved)"
                print(f"b={str(b):>5} k={k} eps={eps:+d} -> {res.spec():<28} "
                      f"{'matches' if ok else 'differs'}{flag}")
    print(f"\neps*(-1)^floor(k/2) rule: {agree}/{total}")


if __name__ == "__main__":
    main()
