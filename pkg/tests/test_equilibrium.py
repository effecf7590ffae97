import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anoneq.dist import CountPmf, poisson_binomial
from anoneq.equilibrium import brute_force_nash, expected_utility, is_eps_nash, regrets, utility_pairs
from anoneq.game import AnonymousGame, generate
from oracles import enumerate_utilities


def test_expected_utility_dominant():
    g = generate("dominant", 4)
    others = poisson_binomial([0.2, 0.9, 0.4])
    assert expected_utility(g, others, 0, 2) == 1.0


def test_expected_utility_anticoordination():
    g = generate("anticoordination", 2)
    assert g.u1[0].tolist() == [0.0, 1.0]
    assert expected_utility(g, poisson_binomial([0.5]), 0, 1) == pytest.approx(0.5)


def test_expected_utility_point_mass():
    g = generate("random", 4, 7)
    others = CountPmf(np.array([0, 0, 1.0, 0]))
    assert expected_utility(g, others, 3, 1) == g.payoff[3, 0, 2]


def test_expected_utility_size_mismatch():
    g = generate("random", 3, 0)
    with pytest.raises(ValueError):
        expected_utility(g, poisson_binomial([0.5]), 0, 1)


def random_game(n, seed):
    return generate("random", n, seed)


@given(st.integers(1, 6), st.integers(0, 10_000), st.data())
def test_utilities_match_enumeration(n, seed, data):
    g = random_game(n, seed)
    p = data.draw(st.lists(st.floats(0, 1), min_size=n, max_size=n))
    np.testing.assert_allclose(utility_pairs(g, p), enumerate_utilities(g.payoff.tolist(), p), atol=1e-12)


def test_is_eps_nash_examples():
    g = generate("dominant", 3)
    assert is_eps_nash(g, [1, 1, 1], 0.0)[0]
    assert not is_eps_nash(g, [0.5, 1, 1], 0.0)[0]
    c = generate("coordination", 2)
    ok, util = is_eps_nash(c, [0.5, 0.5], 0.0)
    assert ok
    np.testing.assert_allclose(util, 0.5)


def test_regret_examples():
    a = generate("anticoordination", 2)
    assert np.all(regrets(a, [0, 1]).approx == 0)
    d = generate("dominant", 3)
    r = regrets(d, [0, 0, 0])
    np.testing.assert_allclose(r.approx, 1.0)
    np.testing.assert_allclose(r.support, 1.0)
    c = regrets(generate("coordination", 2), [0.5, 0.5])
    assert c.eps_approx == 0 and c.eps_nash == 0


@given(st.integers(1, 5), st.integers(0, 999), st.data())
def test_monotone_in_eps(n, seed, data):
    g = random_game(n, seed)
    p = data.draw(st.lists(st.floats(0, 1), min_size=n, max_size=n))
    e1 = data.draw(st.floats(0, 1))
    e2 = data.draw(st.floats(e1, 1))
    if is_eps_nash(g, p, e1)[0]:
        assert is_eps_nash(g, p, e2)[0]


@given(st.integers(1, 5), st.integers(0, 999), st.data())
def test_nash_gap_dominates_approx_gap(n, seed, data):
    g = random_game(n, seed)
    p = data.draw(st.lists(st.floats(0, 1), min_size=n, max_size=n))
    r = regrets(g, p)
    assert r.eps_nash >= r.eps_approx - 1e-15
    # the minimal passing eps is exactly the support gap
    assert is_eps_nash(g, p, r.eps_nash)[0]


@given(st.integers(2, 5), st.integers(0, 999), st.data())
def test_anonymity(n, seed, data):
    g = random_game(n, seed)
    i, j = data.draw(st.permutations(range(n)))[:2]
    table = g.payoff.copy()
    table[j] = table[i]
    twin = AnonymousGame(table)
    p = data.draw(st.lists(st.floats(0, 1), min_size=n, max_size=n))
    swapped = list(p)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    a, b = regrets(twin, p), regrets(twin, swapped)
    np.testing.assert_allclose(np.sort(a.approx), np.sort(b.approx), atol=1e-12)
    np.testing.assert_allclose(np.sort(a.support), np.sort(b.support), atol=1e-12)


def test_brute_force_dominant():
    found = brute_force_nash(generate("dominant", 3), 1, 0.0)
    assert [c.profile.tolist() for c in found] == [[1.0, 1.0, 1.0]]


def test_brute_force_coordination():
    found = {tuple(c.profile) for c in brute_force_nash(generate("coordination", 2), 2, 0.0)}
    assert found == {(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)}


def test_brute_force_eps_one_accepts_all():
    g = random_game(3, 5)
    assert len(brute_force_nash(g, 3, 1.0)) == 4**3


def test_brute_force_round_trip():
    g = random_game(3, 11)
    found = brute_force_nash(g, 6, 0.15)
    assert found
    for cert in found:
        assert is_eps_nash(g, cert.profile, 0.15)[0]
    accepted = {tuple(c.profile) for c in found}
    for idx in itertools.product(range(7), repeat=3):
        prof = tuple(np.array(idx) / 6)
        assert (prof in accepted) == is_eps_nash(g, prof, 0.15)[0]


def test_brute_force_guard():
    with pytest.raises(ValueError):
        brute_force_nash(random_game(8, 0), 20, 0.1)
