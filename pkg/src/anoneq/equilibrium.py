"""Expected utilities and epsilon-Nash checks, plus a grid brute-force oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dist import CountPmf, leave_one_out_masses
from .game import AnonymousGame

DEFAULT_TOL = 1e-9
BRUTE_FORCE_LIMIT = 10**7


def check_profile(game: AnonymousGame, profile: Sequence[float]) -> np.ndarray:
    p = np.asarray(profile, dtype=float).reshape(-1)
    if p.size != game.n:
        raise ValueError(f"profile has {p.size} entries, game has {game.n} players")
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise ValueError("profile entries must lie in [0, 1]")
    return p


@dataclass(frozen=True)
class EquilibriumCertificate:
    profile: np.ndarray
    regret: np.ndarray
    epsilon: float
    method: str
    k: int | None = None
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def eps_nash(self) -> float:
        return float(self.regret.max(initial=0.0))


@dataclass(frozen=True)
class RegretReport:
    """``approx[i]``: gain from the best deviation; ``support[i]``: worst supported gap."""

    approx: np.ndarray
    support: np.ndarray
    utilities: np.ndarray

    @property
    def eps_approx(self) -> float:
        return float(self.approx.max(initial=0.0))

    @property
    def eps_nash(self) -> float:
        return float(self.support.max(initial=0.0))


def expected_utility(game: AnonymousGame, others: CountPmf, i: int, s: int) -> float:
    """E[u_s^i(x)] with x ~ ``others``, the count of other players on strategy 2."""
    if s not in (1, 2):
        raise ValueError("strategy must be 1 or 2")
    if others.offset != 0 or len(others) != game.n:
        raise ValueError(f"others-PMF must cover 0..{game.n - 1}")
    return float(others.mass @ game.payoff[i, s - 1])


def utility_pairs(game: AnonymousGame, profile: Sequence[float]) -> np.ndarray:
    """(n, 2) array of each player's expected payoff for strategies 1 and 2."""
    p = check_profile(game, profile)
    loo = leave_one_out_masses(p)
    return np.einsum("ism,im->is", game.payoff, loo)


def support_gaps(util: np.ndarray, p: np.ndarray) -> np.ndarray:
    gap1 = util[..., 1] - util[..., 0]
    # strategy 1 is supported when p < 1, strategy 2 when p > 0
    from1 = np.where(p < 1, np.maximum(gap1, 0.0), 0.0)
    from2 = np.where(p > 0, np.maximum(-gap1, 0.0), 0.0)
    return np.maximum(from1, from2)


def is_eps_nash(game: AnonymousGame, profile: Sequence[float], eps: float, tol: float = DEFAULT_TOL):
    """Return ``(ok, utilities)`` for the support form of the epsilon-Nash condition."""
    p = check_profile(game, profile)
    util = utility_pairs(game, p)
    ok = bool(np.all(support_gaps(util, p) <= eps + tol))
    return ok, util


def regrets(game: AnonymousGame, profile: Sequence[float]) -> RegretReport:
    p = check_profile(game, profile)
    util = utility_pairs(game, p)
    realized = p * util[:, 1] + (1 - p) * util[:, 0]
    approx = np.maximum(util.max(axis=1) - realized, 0.0)
    return RegretReport(approx=approx, support=support_gaps(util, p), utilities=util)


def certify(game: AnonymousGame, profile, eps: float, method: str, k: int | None = None, **stats):
    p = check_profile(game, profile)
    return EquilibriumCertificate(
        profile=p, regret=regrets(game, p).support, epsilon=eps, method=method, k=k, stats=stats
    )


def _batch_loo_utilities(game: AnonymousGame, P: np.ndarray) -> np.ndarray:
    """Utilities for a batch of profiles, shape (batch, n, 2)."""
    batch, n = P.shape
    out = np.empty((batch, n, 2))
    for i in range(n):
        mass = np.zeros((batch, n))
        mass[:, 0] = 1.0
        t = 0
        for j in range(n):
            if j == i:
                continue
            pj = P[:, j : j + 1]
            t += 1
            mass[:, 1 : t + 1] = mass[:, 1 : t + 1] * (1 - pj) + mass[:, :t] * pj
            mass[:, 0] *= 1 - pj[:, 0]
        out[:, i, :] = mass @ game.payoff[i].T
    return out


def brute_force_nash(
    game: AnonymousGame,
    grid: int,
    eps: float,
    tol: float = DEFAULT_TOL,
    chunk: int = 50_000,
) -> list[EquilibriumCertificate]:
    """Every profile on the {0, 1/G, ..., 1}^n lattice that is eps-Nash."""
    if grid < 1:
        raise ValueError("grid must be positive")
    n = game.n
    if (grid + 1) ** n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"(G+1)^n = {(grid + 1) ** n} exceeds the enumeration limit")
    values = np.arange(grid + 1) / grid
    found = []
    it = itertools.product(range(grid + 1), repeat=n)
    while True:
        idx = np.array(list(itertools.islice(it, chunk)), dtype=int).reshape(-1, n)
        if idx.size == 0:
            break
        P = values[idx]
        util = _batch_loo_utilities(game, P)
        gaps = support_gaps(util, P)
        for row in np.flatnonzero(np.all(gaps <= eps + tol, axis=1)):
            found.append(
                EquilibriumCertificate(profile=P[row].copy(), regret=gaps[row].copy(), epsilon=eps, method="brute-force")
            )
    return found
