import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anoneq.equilibrium import is_eps_nash
from anoneq.flow import (
    FlowNetwork,
    build_network_sparse,
    build_network_uniform,
    extract_assignment,
    max_flow,
    others_mass,
    sparse_theta,
)
from anoneq.game import generate
from oracles import assignment_exists, enumerate_pb, min_cut_value


def test_single_path():
    net = FlowNetwork(n_nodes=2)
    a = net.add_node()
    net.add_arc(0, a, 1)
    net.add_arc(a, 1, 1)
    assert max_flow(net)[0] == 1


def test_bottleneck():
    net = FlowNetwork(n_nodes=2)
    a, b, c = net.add_node(), net.add_node(), net.add_node()
    net.add_arc(0, a, 1)
    net.add_arc(0, b, 1)
    net.add_arc(a, c, 1)
    net.add_arc(b, c, 1)
    net.add_arc(c, 1, 1)
    assert max_flow(net)[0] == 1


def test_bipartite_three_by_two():
    net = FlowNetwork(n_nodes=2)
    players = [net.add_node() for _ in range(3)]
    values = [net.add_node() for _ in range(2)]
    for p in players:
        net.add_arc(0, p, 1)
        for v in values:
            net.add_arc(p, v, 1)
    net.add_arc(values[0], 1, 2)
    net.add_arc(values[1], 1, 1)
    net.players, net.value_nodes, net.theta, net.values = players, values, [2, 1], [0.0, 1.0]
    value, flow = max_flow(net)
    assert value == 3 and assignment_exists(net)
    prof = extract_assignment(net, flow)
    assert sorted(prof.tolist()) == [0.0, 0.0, 1.0]


def test_arc_rules():
    net = FlowNetwork(n_nodes=3)
    with pytest.raises(ValueError):
        net.add_arc(2, 0, 1)
    with pytest.raises(ValueError):
        net.add_arc(1, 2, 1)
    with pytest.raises(ValueError):
        net.add_arc(0, 2, 1.5)
    with pytest.raises(ValueError):
        net.add_arc(0, 2, -1)


@st.composite
def random_networks(draw):
    n_internal = draw(st.integers(0, 8))
    nodes = list(range(2 + n_internal))
    net = FlowNetwork(n_nodes=len(nodes))
    n_arcs = draw(st.integers(0, 20))
    for _ in range(n_arcs):
        u = draw(st.sampled_from([0] + nodes[2:]))
        v = draw(st.sampled_from(nodes[1:]))
        if u != v:
            net.add_arc(u, v, draw(st.integers(0, 4)))
    return net


@given(random_networks())
def test_flow_equals_min_cut(net):
    value, flow = max_flow(net)
    assert value == min_cut_value(net)
    # capacity and conservation
    assert all(0 <= f <= c for f, c in zip(flow, net.caps))
    balance = np.zeros(net.n_nodes, dtype=int)
    for u, v, f in zip(net.tails, net.heads, flow):
        balance[u] -= f
        balance[v] += f
    assert np.all(balance[2:] == 0)
    assert balance[1] == value == -balance[0]


def test_others_mass():
    np.testing.assert_allclose(others_mass([0.0, 0.5, 1.0], [1, 2, 1], 1), [0, 0.5, 0.5, 0])
    np.testing.assert_allclose(others_mass([0.0, 0.5, 1.0], [1, 2, 1], 2), enumerate_pb([0, 0.5, 0.5]))


def test_uniform_dominant_all_ones():
    g = generate("dominant", 4)
    net = build_network_uniform(g, 0, 0.3, 4, 0.1)
    value, flow = max_flow(net)
    assert value == 4
    assert extract_assignment(net, flow).tolist() == [1.0] * 4


def test_uniform_dominant_all_zeros_blocked():
    g = generate("dominant", 4)
    net = build_network_uniform(g, 0, 0.3, 0, 0.5)
    value, flow = max_flow(net)
    assert value == 0
    assert extract_assignment(net, flow) is None


def test_uniform_coordination_indifference():
    g = generate("coordination", 2)
    net = build_network_uniform(g, 2, 0.5, 0, 0.0)
    value, flow = max_flow(net)
    assert value == 2
    assert extract_assignment(net, flow).tolist() == [0.5, 0.5]


def test_uniform_merges_equal_values():
    g = generate("dominant", 3)
    net = build_network_uniform(g, 1, 1.0, 2, 0.1)
    assert net.values == [0.0, 1.0] and net.theta == [0, 3]
    assert max_flow(net)[0] == 3


def test_uniform_parameter_errors():
    g = generate("dominant", 3)
    with pytest.raises(ValueError):
        build_network_uniform(g, 2, 0.5, 2, 0.1)
    with pytest.raises(ValueError):
        build_network_uniform(g, 1, 1.5, 0, 0.1)


def test_sparse_dominant():
    g = generate("dominant", 3)
    net = build_network_sparse(g, 0, 3, [0] * 5, 0.1, k=2)
    value, flow = max_flow(net)
    assert value == 3
    assert extract_assignment(net, flow).tolist() == [1.0] * 3


def test_sparse_coordination_half():
    g = generate("coordination", 2)
    net = build_network_sparse(g, 2, 0, {2: 2}, 0.0, k=2)
    value, flow = max_flow(net)
    assert value == 2
    assert extract_assignment(net, flow).tolist() == [0.5, 0.5]


def test_sparse_zero_quota_has_no_arcs():
    g = generate("coordination", 2)
    net = build_network_sparse(g, 2, 0, {2: 2}, 0.0, k=2)
    idle = {node for v, node in enumerate(net.value_nodes) if net.theta[v] == 0}
    assert not any(h in idle for h in net.heads)


def test_sparse_theta():
    assert sparse_theta(5, 2, 1, {1: 1, 3: 1}, 2) == [2, 1, 0, 1, 1]
    with pytest.raises(ValueError):
        sparse_theta(5, 2, 1, [1, 1], 2)
    with pytest.raises(ValueError):
        sparse_theta(5, 2, 4, {1: 2}, 2)
    with pytest.raises(ValueError):
        sparse_theta(5, 2, 1, {9: 2}, 2)


@given(st.integers(1, 6), st.integers(0, 10_000), st.data())
def test_random_candidates_against_oracles(n, seed, data):
    g = generate("random", n, seed)
    eps = data.draw(st.sampled_from([0.05, 0.1, 0.2, 0.3]))
    k = data.draw(st.integers(2, 3))
    if data.draw(st.booleans()):
        m = data.draw(st.integers(0, n))
        m_prime = data.draw(st.integers(0, n - m))
        q = data.draw(st.integers(0, k * n)) / (k * n)
        net = build_network_uniform(g, m, q, m_prime, eps)
    else:
        m = data.draw(st.integers(0, n))
        m_prime = data.draw(st.integers(0, n - m))
        cuts = sorted(data.draw(st.lists(st.integers(0, m), min_size=k * k, max_size=k * k)))
        phi = np.diff([0] + cuts + [m]).tolist()
        net = build_network_sparse(g, m, m_prime, phi, eps, k=k)
    value, flow = max_flow(net)
    if net.n_nodes <= 14:
        assert value == min_cut_value(net)
    assert (value == n) == assignment_exists(net)
    prof = extract_assignment(net, flow)
    if value == n:
        assert is_eps_nash(g, prof, eps)[0]
        counts = {v: int(np.sum(prof == v)) for v in net.values}
        assert [counts[v] for v in net.values] == list(net.theta)
    else:
        assert prof is None
