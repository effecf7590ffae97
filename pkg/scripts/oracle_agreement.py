"""Solver output against grid brute force on small random games.

    python3 scripts/oracle_agreement.py --games 50 --grid 20
"""

import argparse
import sys

import numpy as np

from anoneq.equilibrium import brute_force_nash, is_eps_nash, regrets
from anoneq.game import generate
from anoneq.ptas import SolverConfig, solve


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--games", type=int, default=50)
    ap.add_argument("--grid", type=int, default=20)
    ap.add_argument("--epsilon", type=float, default=0.2)
    ap.add_argument("--oracle-epsilon", type=float, default=0.25)
    ap.add_argument("--max-players", type=int, default=4)
    ap.add_argument("--seed", type=int, default=1000)
    args = ap.parse_args(argv)

    disagreements = 0
    for idx in range(args.games):
        n = 2 + idx % (args.max_players - 1)
        game = generate("random", n, args.seed + idx)
        found = brute_force_nash(game, args.grid, args.oracle_epsilon)
        cert = solve(game, SolverConfig(eps=args.epsilon))
        ok = is_eps_nash(game, cert.profile, args.oracle_epsilon)[0]
        best_grid = min((c.eps_nash for c in found), default=np.nan)
        disagreements += not ok
        print(
            f"seed={args.seed + idx:5d} n={n} oracle_hits={len(found):6d} best_grid_eps={best_grid:.4f} "
            f"solver_eps={regrets(game, cert.profile).eps_nash:.4f} k={cert.k} {cert.method}"
            + ("" if ok else "  DISAGREE")
        )
    print(f"disagreements: {disagreements}/{args.games}")
    return 1 if disagreements else 0


if __name__ == "__main__":
    sys.exit(main())
