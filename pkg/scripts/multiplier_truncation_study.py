"""Trace how the multiplier sup depends on the truncation depth.

The bound checks cap the sup of I(xi) at a fixed depth, and one of the
release criteria asks the sup to settle to 1e-6 once the depth doubles past
20.  It does not: the increments decay like 1/n_k in the high-frequency part
but only geometrically in the count of low-frequency terms near the argmax,
and at depth 20-40 the sup still moves by a few parts in a thousand.  This
script prints the sup at a ladder of depths together with the per-step delta
so the plateau (or lack of one) is visible directly.

    python3 scripts/multiplier_truncation_study.py --seq geometric:1:2:81 \
        --depths 5,10,20,40,80 --xi log:1e-6:1e6:8192
"""

import argparse
import sys

from lacvar import parse_sequence, parse_xi_grid, sup_scan


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seq", default="geometric:1:2:81")
    ap.add_argument("--depths", default="5,10,20,40,80")
    ap.add_argument("--xi", default="log:1e-6:1e6:8192")
    ap.add_argument("--csv", help="optional output CSV path")
    args = ap.parse_args(argv)

    seq = parse_sequence(args.seq)
    xi = parse_xi_grid(args.xi)
    depths = [int(d) for d in args.depths.split(",")]
    if max(depths) > len(seq) - 1:
        print(
            f"error: depth {max(depths)} needs at least {max(depths) + 1} scales, "
            f"sequence has {len(seq)}",
            file=sys.stderr,
        )
        return 2

    rows = []
    prev = None
    print(f"{'depth':>6} {'sup I':>20} {'argmax xi':>14} {'delta':>12}")
    for k in depths:
        s = sup_scan(seq, xi, k)
        delta = s.sup_i - prev if prev is not None else float("nan")
        print(f"{k:>6} {s.sup_i:>20.12f} {s.argmax_xi:>14.6g} {delta:>12.3e}")
        rows.append((k, s.sup_i, s.argmax_xi, delta))
        prev = s.sup_i

    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("depth,sup_i,argmax_xi,delta\n")
            for k, sup_i, arg, delta in rows:
                fh.write(f"{k},{sup_i:.17g},{arg:.17g},{delta:.17g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
