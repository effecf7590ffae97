"""Integral max-flow and the player-to-strategy-value feasibility networks.

A candidate equilibrium shape is a partition ``theta`` of the n players over a
few mixed-strategy values. Whether players can be placed so that everyone is
at an epsilon-best response is a bipartite b-matching, solved as a max-flow
from a source through players and values to a sink.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .dist import pb_mass
from .equilibrium import DEFAULT_TOL, support_gaps
from .game import AnonymousGame


@dataclass
class FlowNetwork:
    """Directed graph with integer capacities; node 0 is the source, node 1 the sink.

    For networks built from games, ``players[i]`` and ``value_nodes[v]`` give the
    node ids, ``values[v]`` the mixed strategy and ``theta[v]`` its quota.
    """

    n_nodes: int
    tails: list = field(default_factory=list)
    heads: list = field(default_factory=list)
    caps: list = field(default_factory=list)
    players: list = field(default_factory=list)
    values: list = field(default_factory=list)
    theta: list = field(default_factory=list)
    value_nodes: list = field(default_factory=list)

    source = 0
    sink = 1

    def add_node(self) -> int:
        self.n_nodes += 1
        return self.n_nodes - 1

    def add_arc(self, u: int, v: int, cap: int) -> int:
        if cap < 0 or int(cap) != cap:
            raise ValueError("capacities must be nonnegative integers")
        if v == self.source or u == self.sink:
            raise ValueError("source takes no in-arcs and sink no out-arcs")
        self.tails.append(u)
        self.heads.append(v)
        self.caps.append(int(cap))
        return len(self.caps) - 1

    @property
    def n_players(self) -> int:
        return len(self.players)


def max_flow(net: FlowNetwork) -> tuple[int, list[int]]:
    """Dinic's algorithm. Returns the flow value and the flow on every arc."""
    n_arcs = len(net.caps)
    # residual graph: arc 2a forward, 2a+1 backward
    head = [0] * (2 * n_arcs)
    res = [0] * (2 * n_arcs)
    adj: list[list[int]] = [[] for _ in range(net.n_nodes)]
    for a, (u, v, c) in enumerate(zip(net.tails, net.heads, net.caps)):
        head[2 * a], res[2 * a] = v, c
        head[2 * a + 1], res[2 * a + 1] = u, 0
        adj[u].append(2 * a)
        adj[v].append(2 * a + 1)

    s, t = net.source, net.sink
    value = 0
    while True:
        level = [-1] * net.n_nodes
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in adj[u]:
                if res[e] > 0 and level[head[e]] < 0:
                    level[head[e]] = level[u] + 1
                    queue.append(head[e])
        if level[t] < 0:
            break
        ptr = [0] * net.n_nodes

        def push(u: int, limit: int) -> int:
            if u == t:
                return limit
            while ptr[u] < len(adj[u]):
                e = adj[u][ptr[u]]
                v = head[e]
                if res[e] > 0 and level[v] == level[u] + 1:
                    got = push(v, min(limit, res[e]))
                    if got:
                        res[e] -= got
                        res[e ^ 1] += got
                        return got
                ptr[u] += 1
            return 0

        while True:
            got = push(s, 1 << 60)
            if not got:
                break
            value += got

    flow = [net.caps[a] - res[2 * a] for a in range(n_arcs)]
    return value, flow


def others_mass(values: Sequence[float], theta: Sequence[int], drop: int) -> np.ndarray:
    """Count-of-strategy-2 PMF for the multiset ``theta`` less one player at ``drop``."""
    probs = []
    for v, (sigma, count) in enumerate(zip(values, theta)):
        probs.extend([sigma] * (count - (v == drop)))
    return pb_mass(np.asarray(probs, dtype=float))


def _build(game: AnonymousGame, values: list[float], theta: list[int], eps: float, tol: float) -> FlowNetwork:
    n = game.n
    if sum(theta) != n or any(c < 0 for c in theta):
        raise ValueError(f"theta {theta} is not a partition of {n} players")
    net = FlowNetwork(n_nodes=2, values=list(values), theta=list(theta))
    net.players = [net.add_node() for _ in range(n)]
    net.value_nodes = [net.add_node() for _ in values]
    for node in net.players:
        net.add_arc(net.source, node, 1)
    for v, sigma in enumerate(values):
        if theta[v] == 0:
            continue
        util = game.payoff @ others_mass(values, theta, v)
        ok = support_gaps(util, np.full(n, sigma)) <= eps + tol
        for i in np.flatnonzero(ok):
            net.add_arc(net.players[i], net.value_nodes[v], 1)
    for v, node in enumerate(net.value_nodes):
        net.add_arc(node, net.sink, theta[v])
    return net


def _merge(pairs: list[tuple[float, int]]) -> tuple[list[float], list[int]]:
    merged: dict[float, int] = {}
    for sigma, count in pairs:
        merged[sigma] = merged.get(sigma, 0) + count
    return list(merged), list(merged.values())


def build_network_uniform(
    game: AnonymousGame, m: int, q: float, m_prime: int, eps: float, tol: float = DEFAULT_TOL
) -> FlowNetwork:
    """m players share q, m' play 1, the rest play 0. Equal values are merged."""
    n = game.n
    if m < 0 or m_prime < 0 or m + m_prime > n:
        raise ValueError(f"need 0 <= m, m' and m + m' <= n, got m={m}, m'={m_prime}, n={n}")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    values, theta = _merge([(0.0, n - m - m_prime), (float(q), m), (1.0, m_prime)])
    return _build(game, values, theta, eps, tol)


def sparse_theta(n: int, m: int, m_prime: int, phi: Mapping[int, int] | Sequence[int], k: int) -> list[int]:
    k2 = k * k
    if isinstance(phi, Mapping):
        counts = [0] * (k2 + 1)
        for i, c in phi.items():
            if not 0 <= i <= k2:
                raise ValueError(f"grid index {i} outside 0..{k2}")
            counts[i] += c
    else:
        counts = list(phi)
        if len(counts) != k2 + 1:
            raise ValueError(f"phi needs {k2 + 1} entries")
    if any(c < 0 for c in counts) or sum(counts) != m:
        raise ValueError("phi must be a composition of m")
    if m_prime < 0 or m + m_prime > n:
        raise ValueError("need m + m' <= n")
    counts[0] += n - m - m_prime
    counts[k2] += m_prime
    return counts


def build_network_sparse(
    game: AnonymousGame,
    m: int,
    m_prime: int,
    phi: Mapping[int, int] | Sequence[int],
    eps: float,
    tol: float = DEFAULT_TOL,
    *,
    k: int,
) -> FlowNetwork:
    """Values i/k**2 for i = 0..k**2; ``phi`` counts the m mixers per grid index."""
    theta = sparse_theta(game.n, m, m_prime, phi, k)
    values = [i / (k * k) for i in range(k * k + 1)]
    return _build(game, values, theta, eps, tol)


def extract_assignment(net: FlowNetwork, flow: Sequence[int]) -> np.ndarray | None:
    """Read each player's value off its saturated arc; None unless every player is placed."""
    n = net.n_players
    value_of_node = {node: v for v, node in enumerate(net.value_nodes)}
    player_of_node = {node: i for i, node in enumerate(net.players)}
    out = np.full(n, np.nan)
    for a, f in enumerate(flow):
        if f and net.tails[a] in player_of_node:
            out[player_of_node[net.tails[a]]] = net.values[value_of_node[net.heads[a]]]
    if np.isnan(out).any():
        return None
    return out
