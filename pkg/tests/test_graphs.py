import numpy as np
import pytest

from ringbench import (
    DegreeBound,
    LatencyMatrix,
    Ring,
    Topology,
    apply_ring,
    check_degree,
    gen_uniform,
    random_ring,
)


def test_latency_matrix_validation():
    good = np.array([[0, 1.0], [1.0, 0]])
    assert LatencyMatrix(good).n == 2
    with pytest.raises(ValueError):
        LatencyMatrix(np.array([[0, 1.0], [2.0, 0]]))  # asymmetric
    with pytest.raises(ValueError):
        LatencyMatrix(np.array([[1.0, 1.0], [1.0, 0]]))  # nonzero diagonal
    with pytest.raises(ValueError):
        LatencyMatrix(np.array([[0, -1.0], [-1.0, 0]]))  # non-positive
    with pytest.raises(ValueError):
        LatencyMatrix(np.zeros((1, 1)))


def test_topology_edges_and_degrees():
    t = Topology(4)
    assert t.add_edge(0, 1)
    assert not t.add_edge(1, 0)  # duplicate, undirected
    assert t.add_edge(1, 2)
    assert t.edge_count == 2
    assert list(t.degree) == [1, 2, 1, 0]
    assert t.has_edge(2, 1)
    with pytest.raises(ValueError):
        t.add_edge(2, 2)
    with pytest.raises(ValueError):
        t.add_edge(0, 9)


def test_ring_validation_and_edges():
    r = Ring(np.array([0, 2, 1, 3]))
    pairs = {tuple(sorted(e)) for e in r.edge_pairs()}
    assert pairs == {(0, 2), (1, 2), (1, 3), (0, 3)}
    with pytest.raises(ValueError):
        Ring(np.array([0, 1, 1, 2]))
    with pytest.raises(ValueError):
        Ring(np.array([0, 1]))


def test_apply_ring_empty_topology():
    ring = Ring(np.array([0, 1, 2, 3]))
    topo = apply_ring(Topology(4), ring)
    assert topo.edge_count == 4
    assert (topo.degree == 2).all()


def test_apply_ring_idempotent():
    ring = Ring(np.array([3, 0, 2, 1]))
    once = apply_ring(Topology(4), ring)
    twice = apply_ring(once, ring)
    assert np.array_equal(once.adj, twice.adj)
    assert np.array_equal(once.degree, twice.degree)


def test_apply_ring_matches_set_union_oracle():
    # two rings over n=6, compared edge-for-edge with a plain set union
    for seed in range(10):
        r1 = random_ring(6, seed)
        r2 = random_ring(6, seed + 100)
        topo = apply_ring(apply_ring(Topology(6), r1), r2)
        union = {tuple(sorted(e)) for e in r1.edge_pairs()} | {
            tuple(sorted(e)) for e in r2.edge_pairs()
        }
        got = {tuple(e) for e in topo.edge_array()}
        assert got == union
        for v in range(6):
            deg = sum(1 for e in union if v in e)
            assert deg == topo.degree[v]
            assert 2 <= deg <= 4


def test_apply_ring_never_disconnects():
    for seed in range(20):
        w = gen_uniform(10, seed)
        topo = Topology(10)
        topo.add_edge(0, 1)
        topo.add_edge(2, 3)
        before = topo.component_count()
        after = apply_ring(topo, random_ring(10, seed)).component_count()
        assert after <= before


def test_check_degree():
    ring = random_ring(8, 0)
    assert check_degree(ring.to_topology(), DegreeBound(1))
    k3 = Topology(16)
    for i in range(3):
        k3.add_ring(random_ring(16, i))
    assert check_degree(k3, DegreeBound(3))
    star = Topology(10)
    for v in range(1, 10):
        star.add_edge(0, v)
    assert not check_degree(star, DegreeBound(4))


def test_degree_bound_log2ceil():
    assert DegreeBound.log2ceil(1000).k == 10
    assert DegreeBound.log2ceil(64).k == 6
    assert DegreeBound.log2ceil(3).k == 2
    with pytest.raises(ValueError):
        DegreeBound(0)


def test_component_labels():
    t = Topology(5)
    t.add_edge(0, 1)
    t.add_edge(3, 4)
    labels = t.component_labels()
    assert labels[0] == labels[1] == 0
    assert labels[2] == 2
    assert labels[3] == labels[4] == 3
    assert t.component_count() == 3
