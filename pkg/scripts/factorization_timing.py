"""Time the factorization on random GL_n(F0) matrices.

    python scripts/factorization_timing.py --count 30 --prec 8 12 16
"""

import argparse
import random
import statistics
import time

from pvpatch.factorization import factorize, random_laurent_matrix, reassembly_residual


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--prec", type=int, nargs="+", default=[8, 12])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    window = (-6, 6)
    print(f"{'n':>2} {'prec':>4} {'median_s':>9} {'max_s':>7} {'ok':>5}")
    for prec in args.prec:
        for n in (1, 2, 3):
            rng = random.Random(args.seed)
            times, ok = [], 0
            for _ in range(args.count):
                A = random_laurent_matrix(rng, n, prec, window)
                t0 = time.perf_counter()
                fz = factorize(A, prec, window)
                times.append(time.perf_counter() - t0)
                ok += reassembly_residual(fz, A) >= prec and fz.audit()
            print(f"{n:>2} {prec:>4} {statistics.median(times):9.4f} {max(times):7.4f} {ok:>2}/{args.count}")


if __name__ == "__main__":
    main()
