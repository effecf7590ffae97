"""Command-line front end: ``anoneq {solve,verify,round,bounds,gen}``.

Reports are ``key: value`` lines on stdout. Profiles are space-separated
probabilities of playing strategy 2, in player order.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import dist
from .equilibrium import DEFAULT_TOL, is_eps_nash, regrets
from .game import GENERATOR_KINDS, generate, read_game, save_game
from .ptas import SolverConfig, SolverExhausted, solve, workers_from_env
from .rounding import RoundingParams, round_profile

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class InputError(Exception):
    pass


def fmt_vec(xs) -> str:
    return " ".join(repr(float(x)) for x in xs)


def emit(key: str, value) -> None:
    if isinstance(value, (list, tuple, np.ndarray)):
        value = fmt_vec(value)
    elif isinstance(value, bool):
        value = "pass" if value else "fail"
    print(f"{key}: {value}")


def parse_probs(text: str) -> np.ndarray:
    if text.strip() and not any(ch.isspace() for ch in text.strip()):
        path = Path(text.strip())
        try:
            if path.is_file():
                text = path.read_text(encoding="utf-8")
        except OSError:
            pass
    try:
        p = np.array([float(t) for t in text.replace(",", " ").split()], dtype=float)
    except ValueError as exc:
        raise InputError(f"bad probability list: {exc}") from None
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise InputError("probabilities must lie in [0, 1]")
    return p


def _load(path: str):
    try:
        return read_game(path)
    except OSError as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _epsilon(value: float) -> float:
    if not 0 < value < 1:
        raise InputError(f"--epsilon must lie in (0, 1), got {value}")
    return value


def cmd_solve(args) -> int:
    game = _load(args.game)
    eps = _epsilon(args.epsilon)
    try:
        config = SolverConfig(
            eps=eps,
            k=args.k,
            c=args.c,
            max_k=args.max_k,
            sparse_cap=args.sparse_cap,
            tol=args.tol,
            best=args.best,
            workers=workers_from_env(),
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.seed_report is not None:
        emit("seed", args.seed_report)
    try:
        cert = solve(game, config)
    except SolverExhausted as exc:
        emit("status", "exhausted")
        emit("reason", str(exc))
        emit("candidates", exc.stats["candidates"])
        emit("wall_time", f"{exc.stats['wall_time']:.6f}")
        return EXIT_CAP
    rep = regrets(game, cert.profile)
    emit("status", "ok")
    emit("players", game.n)
    emit("profile", cert.profile)
    emit("regrets", cert.regret)
    emit("eps_target", eps)
    emit("eps_nash", rep.eps_nash)
    emit("eps_approx", rep.eps_approx)
    emit("method", cert.method)
    emit("k", cert.k)
    emit("candidates", cert.stats["candidates"])
    emit("evaluated", cert.stats["evaluated"])
    emit("wall_time", f"{cert.stats['wall_time']:.6f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    game = _load(args.game)
    profile = parse_probs(args.profile)
    if profile.size != game.n:
        raise InputError(f"profile has {profile.size} entries, game has {game.n} players")
    if args.epsilon < 0:
        raise InputError("--epsilon must be nonnegative")
    ok, util = is_eps_nash(game, profile, args.epsilon, args.tol)
    rep = regrets(game, profile)
    emit("verdict", ok)
    emit("eps", args.epsilon)
    emit("eps_nash", rep.eps_nash)
    emit("eps_approx", rep.eps_approx)
    emit("regrets", rep.support)
    for i, (a, b) in enumerate(util):
        emit(f"player_{i}", f"u1={float(a)!r} u2={float(b)!r} p={float(profile[i])!r}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_round(args) -> int:
    p = parse_probs(args.profile)
    try:
        params = RoundingParams(args.k)
        report = round_profile(p, params, args.n)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    emit("p_prime", report.p_prime)
    emit("q", report.q_profile)
    emit("structure", report.structure.kind)
    if report.structure.kind == "uniform":
        emit("shared_q", report.structure.q)
        emit("shared_count", len(report.structure.shared_set))
    else:
        emit("mixers", len(report.structure.mixed))
    emit("tv_full", report.tv_full)
    emit("tv_leave_one_out_max", report.max_tv_leave_one_out)
    emit("clamped", str(report.clamped).lower())
    for name, (lhs, rhs, ok) in report.lemma_checks.items():
        emit(f"check {name}", f"lhs={lhs!r} rhs={rhs!r} {'pass' if ok else 'fail'}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    p = parse_probs(args.probs)
    mu = float(p.sum())
    var = float(np.sum(p * (1 - p)))
    if var <= 0:
        raise InputError("zero variance: every probability is 0 or 1")
    pmf = dist.poisson_binomial(p)
    tp = dist.TranslatedPoissonParams(mu, var)
    rb = dist.rollin_bound(p)
    emit("mu", mu)
    emit("sigma2", var)
    emit("rollin_bound", rb)
    if args.compare == "tp":
        tv = dist.tv_distance(pmf, dist.translated_poisson_pmf(tp))
        bound = rb
    else:
        # binomial with the same length and mean, reached through the two TP laws
        qbar = mu / p.size
        other = np.full(p.size, qbar)
        tv = dist.tv_distance(pmf, dist.binomial_pmf(p.size, qbar))
        tp_other = dist.TranslatedPoissonParams(float(other.sum()), float(np.sum(other * (1 - other))))
        pair = dist.tp_distance_bound(tp, tp_other)
        emit("rollin_bound_binomial", dist.rollin_bound(other))
        emit("tp_pair_bound", pair)
        bound = rb + dist.rollin_bound(other) + pair
    ok = tv <= bound
    emit("compare", args.compare)
    emit("tv", tv)
    emit("bound", bound)
    emit("dominance", ok)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_gen(args) -> int:
    if args.players < 1:
        raise InputError("--players must be positive")
    text = save_game(generate(args.kind, args.players, args.seed))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        emit("written", args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="anoneq", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="compute an eps-Nash equilibrium")
    s.add_argument("game")
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--max-k", type=int, default=None)
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.add_argument("--best", action="store_true", help="minimum-regret certificate at the first successful k")
    s.add_argument("--sparse-cap", type=int, default=10**6)
    s.add_argument("--seed-report", default=None, help="label echoed into the report")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a profile")
    v.add_argument("game")
    v.add_argument("profile", help="inline probabilities or a file holding them")
    v.add_argument("--epsilon", type=float, default=0.0)
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("round", help="round a profile and report all distances")
    r.add_argument("profile")
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--n", type=int, default=None, help="grid size n (default: profile length)")
    r.set_defaults(func=cmd_round)

    b = sub.add_parser("bounds", help="exact TV against approximation bounds")
    b.add_argument("probs")
    b.add_argument("--compare", choices=("tp", "binomial"), default="tp")
    b.set_defaults(func=cmd_bounds)

    g = sub.add_parser("gen", help="write a generated game")
    g.add_argument("--kind", choices=GENERATOR_KINDS, required=True)
    g.add_argument("--players", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
