"""Run the acceptance criteria and print one line per criterion.

    python scripts/run_suite.py [--only 2 --only 8] [--seed 0] [--json out.json]
"""

import argparse
import sys
import time

from pvpatch.config import RunConfig
from pvpatch.serialize import dumps
from pvpatch.suite import run_suite


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", type=int, action="append")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--t-prec", type=int, default=10)
    ap.add_argument("--degree-cap", type=int, default=4)
    ap.add_argument("--json", help="also write the full results here")
    args = ap.parse_args(argv)

    cfg = RunConfig(t_prec=args.t_prec, degree_cap=args.degree_cap, seed=args.seed)
    t0 = time.perf_counter()
    results = run_suite(cfg, args.only)
    for r in results:
        print(f"{r.line()}  {r.seconds:.2f}s")
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} passed in {time.perf_counter() - t0:.1f}s")
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(dumps({"config": cfg.to_json(), "criteria": [r.to_json() for r in results]}) + "\n")
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
