"""Approximate-equilibrium search over the two quantized profile families.

For a quantization ``k`` the solver tries

* uniform candidates ``(m, q, m')``: m players share ``q = l/(kn)``, m' play
  strategy 2 purely, the rest strategy 1;
* sparse candidates ``(m, m', phi)``: fewer than ``k**3`` players mix on the
  ``1/k**2`` grid with counts ``phi``.

Each candidate is a partition of the players over a handful of values; a
max-flow decides whether the players can be placed at epsilon-best responses.
Every profile read off a flow is re-verified with :func:`is_eps_nash` before
it is returned, so the unknown constant linking ``k`` and ``eps`` only affects
running time.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .equilibrium import DEFAULT_TOL, EquilibriumCertificate, certify, is_eps_nash
from .flow import _build, _merge, extract_assignment, max_flow, sparse_theta
from .game import AnonymousGame

log = logging.getLogger(__name__)

THREADS_ENV = "ANONEQ_THREADS"


class SolverExhausted(RuntimeError):
    """No verified candidate up to ``max_k``."""

    def __init__(self, message: str, stats: dict):
        super().__init__(message)
        self.stats = stats


@dataclass
class SolverConfig:
    eps: float
    k: int | None = None
    c: float = 1.0
    max_k: int | None = None
    sparse_cap: int = 10**6
    tol: float = DEFAULT_TOL
    best: bool = False
    workers: int = 1

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps!r}")
        if self.k is not None and self.k < 2:
            raise ValueError("k must be at least 2")
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.sparse_cap < 1:
            raise ValueError("sparse_cap must be positive")

    @property
    def k0(self) -> int:
        if self.k is not None:
            return self.k
        return max(2, math.ceil(self.c / self.eps))

    @property
    def k_max(self) -> int:
        if self.max_k is not None:
            return max(self.max_k, self.k0)
        return max(self.k0, math.ceil(4 / self.eps))


def workers_from_env(default: int = 1) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default
    n = int(raw)
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0")
    return n or (os.cpu_count() or 1)


# -- candidate enumeration -------------------------------------------------


def uniform_candidates(n: int, k: int) -> Iterator[tuple[int, int, int]]:
    """``(m, m', l)`` in ascending m, then m', then l; l is 0 when m = 0."""
    for m in range(n + 1):
        for m_prime in range(n - m + 1):
            for ell in range(k * n + 1) if m > 0 else (0,):
                yield m, m_prime, ell


def uniform_candidate_count(n: int, k: int) -> int:
    return sum((n - m + 1) * (k * n + 1 if m > 0 else 1) for m in range(n + 1))


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of ``total`` into ``parts`` parts, lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def composition_count(total: int, parts: int) -> int:
    return math.comb(total + parts - 1, parts - 1)


def sparse_candidates(n: int, k: int) -> Iterator[tuple[int, int, tuple[int, ...]]]:
    for m in range(min(k**3 - 1, n) + 1):
        for m_prime in range(n - m + 1):
            for phi in compositions(m, k * k + 1):
                yield m, m_prime, phi


# -- candidate evaluation --------------------------------------------------


def _theta_key(values, theta) -> tuple:
    return tuple(sorted((v, c) for v, c in zip(values, theta) if c > 0))


def evaluate_partition(game: AnonymousGame, values, theta, eps: float, tol: float) -> np.ndarray | None:
    """Profile realizing ``theta`` with everyone at an eps-best response, if any."""
    # value nodes with zero quota carry no arcs
    kept = [(v, c) for v, c in zip(values, theta) if c > 0]
    net = _build(game, [v for v, _ in kept], [c for _, c in kept], eps, tol)
    placed = {t for t in net.tails if t != net.source and t not in net.value_nodes}
    if len(placed) < game.n:
        return None
    value, flow = max_flow(net)
    if value < game.n:
        return None
    return extract_assignment(net, flow)


_WORKER_GAME: AnonymousGame | None = None


def _init_worker(game: AnonymousGame) -> None:
    global _WORKER_GAME
    _WORKER_GAME = game


def _worker_eval(job):
    values, theta, eps, tol = job
    return evaluate_partition(_WORKER_GAME, values, theta, eps, tol)


@dataclass
class _Search:
    """Shared state for one solve: dedup cache, counters, optional pool."""

    game: AnonymousGame
    eps: float
    tol: float
    best: bool = False
    pool: ProcessPoolExecutor | None = None
    batch: int = 64
    seen: set = field(default_factory=set)
    evaluated: int = 0
    best_cert: EquilibriumCertificate | None = None

    def _verify(self, profile, method: str, k: int):
        ok, _ = is_eps_nash(self.game, profile, self.eps, self.tol)
        if not ok:
            log.warning("flow assignment failed re-verification at k=%d (%s)", k, method)
            return None
        return certify(self.game, profile, self.eps, method, k=k)

    def run(self, partitions: Iterator[tuple[list, list]], method: str, k: int):
        """Evaluate partitions in order; first verified (or best) certificate wins."""
        pending = []
        for values, theta in partitions:
            key = _theta_key(values, theta)
            if key in self.seen:
                continue
            self.seen.add(key)
            pending.append((values, theta))
            if self.pool is None or len(pending) >= self.batch:
                hit = self._flush(pending, method, k)
                pending = []
                if hit is not None and not self.best:
                    return hit
        if pending:
            hit = self._flush(pending, method, k)
            if hit is not None and not self.best:
                return hit
        return None

    def _flush(self, jobs, method: str, k: int):
        self.evaluated += len(jobs)
        if self.pool is None:
            results = [evaluate_partition(self.game, v, t, self.eps, self.tol) for v, t in jobs]
        else:
            results = list(self.pool.map(_worker_eval, [(v, t, self.eps, self.tol) for v, t in jobs]))
        first = None
        for profile in results:
            if profile is None:
                continue
            cert = self._verify(profile, method, k)
            if cert is None:
                continue
            if first is None:
                first = cert
            if self.best_cert is None or cert.eps_nash < self.best_cert.eps_nash:
                self.best_cert = cert
            if not self.best:
                break
        return first


def _uniform_partitions(n: int, k: int, counter: dict) -> Iterator[tuple[list, list]]:
    for m, m_prime, ell in uniform_candidates(n, k):
        counter["uniform"] += 1
        q = ell / (k * n)
        yield _merge([(0.0, n - m - m_prime), (q, m), (1.0, m_prime)])


def _sparse_partitions(n: int, k: int, cap: int, counter: dict) -> Iterator[tuple[list, list]]:
    values = [i / (k * k) for i in range(k * k + 1)]
    for m, m_prime, phi in sparse_candidates(n, k):
        if counter["sparse"] >= cap:
            counter["sparse_truncated"] = True
            return
        counter["sparse"] += 1
        yield values, sparse_theta(n, m, m_prime, phi, k)


def _new_counter() -> dict:
    return {"uniform": 0, "sparse": 0, "sparse_truncated": False}


def search_uniform(game: AnonymousGame, k: int, eps: float, tol: float = DEFAULT_TOL, stats: dict | None = None):
    """First verified profile of uniform shape, or None after exhausting the family."""
    if k < 2:
        raise ValueError("k must be at least 2")
    counter = _new_counter() if stats is None else stats
    counter.setdefault("uniform", 0)
    return _Search(game, eps, tol).run(_uniform_partitions(game.n, k, counter), "uniform-search", k)


def search_sparse(
    game: AnonymousGame,
    k: int,
    eps: float,
    tol: float = DEFAULT_TOL,
    sparse_cap: int = 10**6,
    stats: dict | None = None,
):
    """First verified profile of sparse shape. Sets ``stats['sparse_truncated']`` at the cap."""
    if k < 2:
        raise ValueError("k must be at least 2")
    counter = _new_counter() if stats is None else stats
    counter.setdefault("sparse", 0)
    counter.setdefault("sparse_truncated", False)
    return _Search(game, eps, tol).run(_sparse_partitions(game.n, k, sparse_cap, counter), "sparse-search", k)


def solve(game: AnonymousGame, config: SolverConfig) -> EquilibriumCertificate:
    """Escalate k from ``config.k0`` to ``config.k_max``; uniform search first at each k."""
    started = time.perf_counter()
    per_k = []
    pool = None
    if config.workers > 1:
        pool = ProcessPoolExecutor(config.workers, initializer=_init_worker, initargs=(game,))
    search = _Search(game, config.eps, config.tol, best=config.best, pool=pool)
    try:
        for k in range(config.k0, config.k_max + 1):
            t0 = time.perf_counter()
            counter = _new_counter()
            cert = search.run(_uniform_partitions(game.n, k, counter), "uniform-search", k)
            if cert is None or config.best:
                hit = search.run(_sparse_partitions(game.n, k, config.sparse_cap, counter), "sparse-search", k)
                cert = cert or hit
            counter.update(k=k, seconds=time.perf_counter() - t0)
            per_k.append(counter)
            log.info("k=%d: %s", k, counter)
            if config.best and search.best_cert is not None:
                cert = search.best_cert
            if cert is not None:
                break
    finally:
        if pool is not None:
            pool.shutdown()

    stats = {
        "per_k": per_k,
        "candidates": sum(c["uniform"] + c["sparse"] for c in per_k),
        "evaluated": search.evaluated,
        "wall_time": time.perf_counter() - started,
    }
    if cert is None:
        capped = any(c["sparse_truncated"] for c in per_k)
        msg = f"no verified candidate for k in [{config.k0}, {config.k_max}]"
        if capped:
            msg += f"; sparse search truncated at {config.sparse_cap} candidates"
        raise SolverExhausted(msg, stats)
    ok, _ = is_eps_nash(game, cert.profile, config.eps, config.tol)
    assert ok, "returned certificate failed verification"
    return EquilibriumCertificate(cert.profile, cert.regret, cert.epsilon, cert.method, cert.k, stats)
