"""Print the block-correspondence tables (markdown) on the standard parameter grid.

    python3 scripts/reproduce_tables.py --kmax 3 > tables.md
"""
import argparse
import sys

from realcong.cli import _markdown, build_tables


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--kmax", type=int, default=3)
    args = ap.parse_args()
    tables = build_tables(args.kmax)
    print(_markdown(tables))
    bad = [r["source"] for rows in tables.values() for r in rows if not r.get("kcf_agrees", r.get("consistent"))]
    if bad:
        print("disagreements: " + ", ".join(bad), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
