"""Run every built-in verification scenario and write one report per kind.

Usage:
    python3 scripts/run_all_scenarios.py --out-dir reports [--seed 0] [--csv]

Exit status is the number of failed scenarios (capped at 99), so a zero exit
means everything passed.  Note that fourier_bound and refine_domination fail
by design under the default thresholds; pass --skip-known-red to leave them
out of the exit status while still writing their reports.
"""

import argparse
import os
import sys
import time

from lacvar import SCENARIO_KINDS, default_scenario, emit_report, from_config, run_scenario

KNOWN_RED = ("fourier_bound", "refine_domination")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="reports")
    ap.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    ap.add_argument("--csv", action="store_true", help="also write per-case CSV tables")
    ap.add_argument("--skip-known-red", action="store_true")
    args = ap.parse_args(argv)

    os.makedirs(args.out_dir, exist_ok=True)
    failures = 0
    for kind in SCENARIO_KINDS:
        sc = default_scenario(kind)
        if args.seed is not None:
            sc = from_config({**sc.to_dict(), "seed": args.seed})
        t0 = time.perf_counter()
        rep = run_scenario(sc)
        dt = time.perf_counter() - t0
        with open(os.path.join(args.out_dir, f"{kind}.json"), "wb") as fh:
            fh.write(emit_report(rep, "json"))
        if args.csv:
            with open(os.path.join(args.out_dir, f"{kind}.csv"), "wb") as fh:
                fh.write(emit_report(rep, "csv"))
        verdict = "PASS" if rep.passed else "FAIL"
        bad = [c.name for c in rep.checks if not c.passed]
        note = f"  failed: {', '.join(bad)}" if bad else ""
        print(f"{kind:<20} {verdict}  {len(rep.cases):>4} cases  {dt:6.2f}s{note}")
        if not rep.passed and not (args.skip_known_red and kind in KNOWN_RED):
            failures += 1
    return min(failures, 99)


if __name__ == "__main__":
    sys.exit(main())
