import numpy as np
import pytest
from hypothesis import given, strategies as st

from aelq.checks import lambda_crosscheck
from aelq.errors import InvariantViolation, RetriesExceeded, SpecError
from aelq.graph import BipartiteGraph, eml_check, graph_complete, graph_explicit, graph_from_spec, graph_random_regular, sigma2

GRAPHS = [graph_complete(1), graph_complete(4), graph_random_regular(8, 3, 1), graph_random_regular(8, 4, 2), graph_random_regular(6, 2, 5), graph_random_regular(7, 3, 0)]


def test_complete():
    G = graph_complete(1)
    assert G.n_edges == 1 and G.lam == 0
    assert sigma2(graph_complete(4)) == (0.0, 0.0)


def test_matching_and_cycle():
    M = graph_explicit([[i, i] for i in range(5)])
    assert M.d == 1 and abs(M.lam - 1) < 1e-9
    C = graph_explicit([[0, 0], [0, 1], [1, 1], [1, 2], [2, 2], [2, 0]])
    s2, lam = sigma2(C)
    assert abs(s2 - 1) < 1e-9 and abs(lam - 0.5) < 1e-9


def test_random_regular_examples():
    G = graph_random_regular(8, 3, seed=1)
    A = G.biadjacency
    assert np.all(A.sum(0) == 3) and np.all(A.sum(1) == 3) and A.max() == 1
    H = graph_random_regular(8, 3, seed=1)
    assert np.array_equal(G.edge_right, H.edge_right) and np.array_equal(G.edge_rport, H.edge_rport)
    K = graph_random_regular(5, 5, seed=3)
    assert np.all(K.biadjacency == 1)
    with pytest.raises(SpecError):
        graph_random_regular(3, 4)
    with pytest.raises(RetriesExceeded):
        graph_random_regular(8, 7, seed=0, max_retries=3)


@pytest.mark.parametrize("G", GRAPHS, ids=repr)
def test_port_consistency_and_lambda(G):
    assert sorted(G.left_ports.reshape(-1).tolist()) == list(range(G.n_edges))
    assert sorted(G.right_ports.reshape(-1).tolist()) == list(range(G.n_edges))
    for r in range(G.n):
        assert np.all(G.edge_right[G.right_ports[r]] == r)
        assert np.all(G.edge_rport[G.right_ports[r]] == np.arange(G.d))
    assert 0 <= G.lam <= 1 + 1e-12
    assert (G.lam < 1e-9) == (np.linalg.matrix_rank(G.biadjacency) == 1)
    assert lambda_crosscheck(G) <= 1e-9


@pytest.mark.parametrize("G", GRAPHS, ids=repr)
def test_eml_random_pairs(G):
    rng = np.random.default_rng(0)
    for _ in range(1000):
        f, g = rng.normal(size=G.n), rng.normal(size=G.n)
        assert eml_check(G, f, g).ok
    assert eml_check(G, np.ones(G.n), 3 * np.ones(G.n)).residual < 1e-12


def test_eml_complete_exact():
    G = graph_complete(5)
    rng = np.random.default_rng(1)
    assert eml_check(G, rng.normal(size=5), rng.normal(size=5)).residual < 1e-12


def test_eml_pm_one_on_random_8_3():
    G = graph_random_regular(8, 3, 1)
    rng = np.random.default_rng(2)
    for _ in range(200):
        f, g = rng.choice([-1.0, 1.0], size=8), rng.choice([-1.0, 1.0], size=8)
        assert eml_check(G, f, g).residual <= G.lam + 1e-9


def test_eml_tight_on_matching():
    M = graph_explicit([[0, 0], [1, 1]])
    f = np.array([1.0, -1.0])
    r = eml_check(M, f, f)
    assert abs(r.residual - 1) < 1e-12 and abs(r.bound - 1) < 1e-12


def test_eml_strict_raises(monkeypatch):
    G = graph_explicit([[0, 0], [1, 1]])
    monkeypatch.setattr(BipartiteGraph, "lam", property(lambda self: 0.5))
    f = np.array([1.0, -1.0])
    with pytest.raises(InvariantViolation):
        eml_check(G, f, f)
    assert not eml_check(G, f, f, strict=False).ok


def test_bad_graph_specs():
    with pytest.raises(SpecError):
        BipartiteGraph(2, 2, [0, 0, 0, 1])
    with pytest.raises(SpecError):
        graph_from_spec({"type": "nope"})
    assert graph_from_spec({"type": "complete", "n": 3}).d == 3


@given(st.integers(2, 8), st.integers(1, 4), st.integers(0, 1000))
def test_random_graph_properties(n, d, seed):
    d = min(d, n)
    G = graph_random_regular(n, d, seed)
    assert np.all(G.biadjacency.sum(0) == d)
    assert lambda_crosscheck(G) <= 1e-9
