"""Slow, independent reference computations used only by the tests."""

import itertools
import math

import numpy as np


def enumerate_pb(probs):
    """Sum-of-Bernoullis PMF by summing over all 2^n outcomes."""
    n = len(probs)
    out = np.zeros(n + 1)
    for bits in itertools.product((0, 1), repeat=n):
        w = 1.0
        for b, p in zip(bits, probs):
            w *= p if b else 1 - p
        out[sum(bits)] += w
    return out


def enumerate_utilities(payoff, profile):
    """(n, 2) expected utilities by enumerating the other players' pure choices."""
    n = len(profile)
    util = np.zeros((n, 2))
    for i in range(n):
        others = [profile[j] for j in range(n) if j != i]
        dist = enumerate_pb(others)
        for s in range(2):
            util[i, s] = sum(dist[m] * payoff[i][s][m] for m in range(n))
    return util


def pure_nash(payoff):
    """All pure profiles (tuples of 0/1 = plays strategy 2) with no profitable deviation."""
    n = len(payoff)
    found = []
    for prof in itertools.product((0, 1), repeat=n):
        ok = True
        for i in range(n):
            m = sum(prof) - prof[i]
            if payoff[i][1 - prof[i]][m] > payoff[i][prof[i]][m]:
                ok = False
        if ok:
            found.append(prof)
    return found


def binomial_direct(m, q):
    return np.array([math.comb(m, j) * q**j * (1 - q) ** (m - j) for j in range(m + 1)])


def min_cut_value(net):
    """Minimum s-t cut by enumerating every subset of the internal nodes."""
    internal = [v for v in range(net.n_nodes) if v not in (net.source, net.sink)]
    best = math.inf
    for r in range(len(internal) + 1):
        for side in itertools.combinations(internal, r):
            S = set(side) | {net.source}
            cut = sum(c for u, v, c in zip(net.tails, net.heads, net.caps) if u in S and v not in S)
            best = min(best, cut)
    return best


def assignment_exists(net):
    """Place every player on an adjacent value node without exceeding any quota."""
    n = net.n_players
    adj = {i: set() for i in range(n)}
    node_to_value = {node: v for v, node in enumerate(net.value_nodes)}
    player_of = {node: i for i, node in enumerate(net.players)}
    for u, v in zip(net.tails, net.heads):
        if u in player_of and v in node_to_value:
            adj[player_of[u]].add(node_to_value[v])
    quota = list(net.theta)

    def place(i):
        if i == n:
            return True
        for v in adj[i]:
            if quota[v] > 0:
                quota[v] -= 1
                if place(i + 1):
                    return True
                quota[v] += 1
        return False

    return place(0)
