"""Sign-resolution statistics of the round-trip suite over several seeds.

    python3 scripts/roundtrip_signs.py --seeds 0 1 2 --cases 200
"""
import argparse

from realcong.suites import criterion_3


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    ap.add_argument("--cases", type=int, default=200)
    args = ap.parse_args()
    print("seed  pass  sign-of-N  sign-of-a  filtered-tiebreaks")
    for s in args.seeds:
        r = criterion_3(seed=s, cases=args.cases)
        d = r.details
        print(f"{s:>4}  {'yes' if r.passed else 'NO':>4}  {d['sign_N_rate']:>9}  {d['sign_a_rate']:>9}  "
              f"{d['filtered_tiebreaks']:>18}")
        for f in r.failures[:5]:
            print("      ", f)


if __name__ == "__main__":
    main()
