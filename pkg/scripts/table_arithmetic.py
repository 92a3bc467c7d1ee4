"""Multi-stroke ratios from published frame counts.

    python scripts/table_arithmetic.py
    python scripts/table_arithmetic.py --counts 2975/15196 2351/6361 120/400
"""

import argparse

from sketchforge.evalkit import ratio_from_counts

PUBLISHED = {"QuickDraw": (2975, 15196), "Scenes": (2351, 6361)}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--counts", nargs="*", default=None, help="multi/considered pairs")
    args = ap.parse_args()
    rows = PUBLISHED.items() if not args.counts else \
        [(c, tuple(int(v) for v in c.split("/"))) for c in args.counts]
    print(f"{'set':<12}{'multi':>7}{'frames':>8}{'ratio %':>10}")
    for name, (multi, total) in rows:
        print(f"{name:<12}{multi:>7}{total:>8}{100 * ratio_from_counts(multi, total):>10.2f}")


if __name__ == "__main__":
    main()
