"""Wall time and candidate counts of the solver as the player count grows.

    python3 scripts/solver_scaling.py --kind dominant --sizes 4 8 16 32 --k 3
"""

import argparse
import sys
import time

import numpy as np

from anoneq.game import GENERATOR_KINDS, generate
from anoneq.ptas import SolverConfig, solve, uniform_candidate_count


def timed_solve(game, config, repeats):
    best, cert = np.inf, None
    for _ in range(repeats):
        t0 = time.perf_counter()
        cert = solve(game, config)
        best = min(best, time.perf_counter() - t0)
    return best, cert


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kind", choices=GENERATOR_KINDS, default="dominant")
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32])
    ap.add_argument("--epsilon", type=float, default=0.2)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args(argv)

    times = []
    print(f"{'n':>4} {'seconds':>10} {'evaluated':>10} {'uniform family':>15} {'method':>15}")
    for n in args.sizes:
        game = generate(args.kind, n, args.seed)
        config = SolverConfig(eps=args.epsilon, k=args.k)
        secs, cert = timed_solve(game, config, args.repeats)
        times.append(secs)
        print(
            f"{n:>4} {secs:>10.4f} {cert.stats['evaluated']:>10} "
            f"{uniform_candidate_count(n, cert.k):>15} {cert.method:>15}"
        )
    if len(args.sizes) > 1:
        slope = np.polyfit(np.log(args.sizes), np.log(times), 1)[0]
        print(f"log-log slope: {slope:.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
