from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aelq.checks import random_pseudocodeword
from aelq.errors import EmptyPromise, IterationCapExceeded, NotInCode, ZeroProbabilityEvent
from aelq.pseudo import (
    Pseudocodeword,
    ael_list,
    avg_cov,
    condition,
    correlation_round,
    covering_optimize,
    distinct_count_distribution,
    eml_psd_check,
    eta_good_product_bound,
    johnson_list_bound_check,
    johnson_radius,
    local_function,
    pexp_eval,
    pseudo_cov,
    pseudo_var,
    random_local_functions,
    theta_star,
)

from instances import instance


def neighbourhood_values(P, edges):
    return [tuple(row) for row in P.edge_values[:, edges]]


def cov_oracle(P, l, r):
    """sum |J(a,b) - p(a) q(b)| from dictionaries over the support."""
    G = P.code.graph
    A = neighbourhood_values(P, G.left_ports[l])
    B = neighbourhood_values(P, G.right_ports[r])
    J, pa, pb = defaultdict(float), defaultdict(float), defaultdict(float)
    for a, b, w in zip(A, B, P.weights):
        J[a, b] += w
        pa[a] += w
        pb[b] += w
    return sum(abs(J.get((a, b), 0.0) - pa[a] * pb[b]) for a in pa for b in pb)


def avg_cov_oracle(P):
    n = P.code.n
    return sum(cov_oracle(P, l, r) for l in range(n) for r in range(n)) / n**2


def cond_avg_cov_oracle(P, rs):
    """E_sigma avg_cov(P | Z_{N(rs)} = sigma) by explicit conditioning."""
    if not rs:
        return avg_cov_oracle(P)
    edges = P.right_edges(sorted(set(rs)))
    groups = defaultdict(list)
    for i, key in enumerate(neighbourhood_values(P, edges)):
        groups[key].append(i)
    total = 0.0
    for idx in groups.values():
        w = P.weights[idx]
        Q = Pseudocodeword(P.code, P.support[idx], w / w.sum(), check=False)
        total += w.sum() * avg_cov_oracle(Q)
    return total


def test_pexp_eval_examples():
    code = instance("main")
    rng = np.random.default_rng(0)
    h = code.random_codeword(rng)
    P = Pseudocodeword.point(code, h)
    assert pexp_eval(P, lambda v: np.ones(len(v)), [0]) == 1
    edges = P.right_edges(2)
    hr = code.edge_symbols(h)[edges]
    assert pexp_eval(P, lambda v: np.any(v != hr, axis=1), edges) == 0
    Q = random_pseudocodeword(code, rng)
    for _ in range(20):
        e = rng.choice(code.n * code.d, size=3, replace=False)
        t1 = {k: rng.uniform(-1, 1) for k in range(8)}
        t2 = {k: v + rng.uniform(0, 1) for k, v in t1.items()}
        m1, m2 = local_function(t1, 2), local_function(t2, 2)
        assert pexp_eval(Q, m1, e) <= pexp_eval(Q, m2, e) + 1e-12


def test_condition_examples():
    code = instance("main")
    rng = np.random.default_rng(1)
    P = random_pseudocodeword(code, rng, size=4)
    full = np.arange(code.n * code.d)
    C = condition(P, full, P.edge_values[0])
    assert len(C) == 1 and np.array_equal(C.support[0], P.support[0])
    same = [e for e in full if len(set(P.edge_values[:, e])) == 1]
    if same:
        C = condition(P, same, P.edge_values[0, same])
        assert np.allclose(C.weights, P.weights)
    bad = (P.edge_values[0, :1] + 1) % 2
    if not np.any(P.edge_values[:, 0] == bad[0]):
        with pytest.raises(ZeroProbabilityEvent):
            condition(P, [0], bad)
    # law of total expectation
    edges = P.right_edges([0, 1])
    mu = lambda v: v[:, 0] * 2.0 - v[:, -1]  # noqa: E731
    total = 0.0
    for key in set(neighbourhood_values(P, edges)):
        mass = sum(w for k, w in zip(neighbourhood_values(P, edges), P.weights) if k == key)
        total += mass * pexp_eval(condition(P, edges, key), mu, [3, 7])
    assert abs(total - pexp_eval(P, mu, [3, 7])) < 1e-12


def test_pseudocodeword_validation():
    code = instance("main")
    with pytest.raises(NotInCode):
        Pseudocodeword.point(code, np.eye(1, code.length, dtype=np.int64)[0])
    with pytest.raises(ValueError):
        Pseudocodeword(code, code.codewords_x()[:2], [0.5, 0.6])
    P = Pseudocodeword(code, code.codewords_x()[[3, 3, 5]], [0.25, 0.25, 0.5])
    assert len(P) == 2 and np.allclose(sorted(P.weights), [0.5, 0.5])
    Q = Pseudocodeword.from_json(code, P.to_json())
    assert np.array_equal(Q.support, P.support) and np.allclose(Q.weights, P.weights)


@pytest.mark.parametrize("name", ["main", "r64_422", "r83_parity"])
def test_cov_matches_oracle(name):
    code = instance(name)
    rng = np.random.default_rng(2)
    for _ in range(3):
        P = random_pseudocodeword(code, rng, size=5)
        for l in range(code.n):
            for r in range(code.n):
                assert abs(pseudo_cov(P, l, r) - cov_oracle(P, l, r)) < 1e-12
        assert abs(avg_cov(P) - avg_cov_oracle(P)) < 1e-12


def test_cov_examples():
    code = instance("r64_422")
    rng = np.random.default_rng(3)
    h = code.random_codeword(rng)
    assert avg_cov(Pseudocodeword.point(code, h)) == 0
    # two-point closed form 4 p (1 - p) when both neighbourhoods differ
    h2 = code.random_codeword(rng)
    p = 0.3
    P = Pseudocodeword(code, [h, h2], [p, 1 - p])
    G = code.graph
    for l in range(code.n):
        for r in range(code.n):
            dl = np.any(code.edge_symbols(h)[G.left_ports[l]] != code.edge_symbols(h2)[G.left_ports[l]])
            dr = np.any(code.edge_symbols(h)[G.right_ports[r]] != code.edge_symbols(h2)[G.right_ports[r]])
            expect = 4 * p * (1 - p) if dl and dr else 0.0
            assert abs(pseudo_cov(P, l, r) - expect) < 1e-12
    # product across a bipartition: Z_l driven by x, Z_r by y independently
    A = G.biadjacency
    l, r = next((a, b) for a in range(code.n) for b in range(code.n) if A[a, b] == 0)
    l2 = next(c for c in range(code.n) if c != l and A[c, r])
    stab = code.inner.cz_perp.basis[0]
    a = np.zeros(code.length, dtype=np.int64)
    a[l * code.block : (l + 1) * code.block] = stab
    b = np.zeros(code.length, dtype=np.int64)
    b[l2 * code.block : (l2 + 1) * code.block] = stab
    words = [code.field.add(h, code.field.add(x * a, y * b)) for x in (0, 1) for y in (0, 1)]
    Q = Pseudocodeword(code, words, [0.1 * 0.7, 0.1 * 0.3, 0.9 * 0.7, 0.9 * 0.3])
    assert pseudo_cov(Q, l, r) < 1e-12
    assert pseudo_cov(Q, l2, r) > 0  # sanity: the y-coordinate does move Z_r


def test_variance_bound():
    code = instance("r83_parity")
    P = random_pseudocodeword(code, np.random.default_rng(4), size=6)
    for side in "LR":
        for v in range(code.n):
            var = pseudo_var(P, side, v)
            ids = P.left_keys[:, v] if side == "L" else P.right_keys[:, v]
            probs = defaultdict(float)
            for k, w in zip(ids, P.weights):
                probs[int(k)] += w
            assert abs(var - sum(p * (1 - p) for p in probs.values())) < 1e-12
            assert 0 <= var <= 1


@given(st.integers(0, 10_000))
def test_pseudoexpectation_axioms(seed):
    code = instance("main")
    rng = np.random.default_rng(seed)
    P = random_pseudocodeword(code, rng)
    edges = rng.choice(code.n * code.d, size=4, replace=False)
    c1, c2 = rng.normal(size=16), rng.normal(size=16)

    def poly(c):
        # degree <= 4 multilinear polynomial in the four binary edge variables
        def f(v):
            out = np.zeros(len(v))
            for mask in range(16):
                term = np.ones(len(v))
                for i in range(4):
                    if mask >> i & 1:
                        term = term * v[:, i]
                out += c[mask] * term
            return out

        return f

    p1, p2 = poly(c1), poly(c2)
    assert abs(pexp_eval(P, lambda v: np.ones(len(v)), edges) - 1) < 1e-12
    lin = pexp_eval(P, lambda v: 2 * p1(v) - 3 * p2(v), edges)
    assert abs(lin - (2 * pexp_eval(P, p1, edges) - 3 * pexp_eval(P, p2, edges))) < 1e-9
    assert pexp_eval(P, lambda v: p1(v) ** 2, edges) >= -1e-12
    # block constraint: indicator of a left block outside the inner code has zero mass
    l = int(rng.integers(code.n))
    le = P.left_edges(l)
    outside = lambda v: (~code.inner.cx.contains(v)).astype(float) * p1(v[:, :4])  # noqa: E731
    assert pexp_eval(P, outside, le) == 0


def test_product_bound_examples():
    code = instance("r64_422")
    rng = np.random.default_rng(5)
    P = Pseudocodeword.point(code, code.random_codeword(rng))
    X, Y = random_local_functions(P, rng, "L"), random_local_functions(P, rng, "R")
    rep = eta_good_product_bound(P, X, Y)
    assert abs(rep.lhs - rep.rhs) < 1e-12
    Q = random_pseudocodeword(code, rng)
    const = [lambda b: np.full(len(b), 0.5)] * code.n
    rep = eta_good_product_bound(Q, const, const)
    assert abs(rep.lhs - (rep.rhs - rep.eta * 0.25)) < 1e-12
    for _ in range(30):
        Q = random_pseudocodeword(code, rng)
        assert eta_good_product_bound(Q, random_local_functions(Q, rng, "L"), random_local_functions(Q, rng, "R")).ok


def test_eml_psd_examples():
    code = instance("r83_parity")
    rng = np.random.default_rng(6)
    P = Pseudocodeword.point(code, code.random_codeword(rng))
    X, Y = random_local_functions(P, rng, "L"), random_local_functions(P, rng, "R")
    rep = eml_psd_check(P, X, Y)
    # a point mass is an ordinary pair of functions: scalar EML
    from aelq.graph import eml_check

    f = np.array([X[l](code.left_blocks(P.support)[:, l, :])[0] for l in range(code.n)])
    g = np.array([Y[r](code.right_blocks(P.support)[:, r, :])[0] for r in range(code.n)])
    scalar = eml_check(code.graph, f, g)
    assert abs(rep.discrepancy - scalar.residual) < 1e-12
    const = [lambda b: np.ones(len(b))] * code.n
    assert eml_psd_check(random_pseudocodeword(code, rng), const, const).discrepancy < 1e-12
    for _ in range(100):
        words = code.codewords_x()
        i, j = rng.choice(len(words), 2, replace=False)
        p = rng.uniform(0.05, 0.95)
        Q = Pseudocodeword(code, words[[i, j]], [p, 1 - p], check=False)
        r = eml_psd_check(Q, random_local_functions(Q, rng, "L"), random_local_functions(Q, rng, "R"))
        assert r.psd_ok and r.eml_ok


def test_distinct_count_distribution():
    n, u = 4, 3
    p = distinct_count_distribution(n, u)
    counts = np.zeros(n + 1)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                counts[len({a, b, c})] += 1
    assert np.allclose(p, counts / n**u)


def test_correlation_round_point_mass():
    code = instance("main")
    P = Pseudocodeword.point(code, code.codewords_x()[7])
    rep = correlation_round(P, 0.1)
    assert rep.u_star == 0 and rep.ok


@pytest.mark.parametrize("name", ["tiny", "main", "k3_parity", "r52_trivial"])
def test_correlation_round_matches_oracle(name):
    code = instance(name)
    rng = np.random.default_rng(7)
    P = random_pseudocodeword(code, rng, size=3)
    rep = correlation_round(P, 1e-4)
    assert rep.mode == "exact" and rep.ok
    n = code.n
    for u in range(min(3, len(rep.cov_by_u))):
        tuples = np.array(np.meshgrid(*[range(n)] * u, indexing="ij")).reshape(u, -1).T if u else [()]
        ref = np.mean([cond_avg_cov_oracle(P, list(t)) for t in tuples])
        assert abs(rep.cov_by_u[u] - ref) < 1e-10
    # average variance never increases along the chain
    assert all(b <= a + 1e-12 for a, b in zip(rep.var_by_u, rep.var_by_u[1:]))


def test_correlation_round_two_codewords_tiny():
    code = instance("tiny")
    words = code.codewords_x()
    P = Pseudocodeword(code, words[[1, 2]], [0.5, 0.5])
    for eta in (0.1, 0.05):
        rep = correlation_round(P, eta)
        assert rep.u_star <= code.s ** (3 * code.d) / eta**2
        assert rep.cov_by_u[rep.u_star] <= eta + 1e-9


def test_theta_star_and_johnson_radius():
    assert theta_star(1.0, 0.0) == 0.5
    assert johnson_radius(0) == 0
    assert abs(johnson_radius(0.5) - 0.2928932188134524) < 1e-12


def test_covering_examples():
    code = instance("main")
    words = code.codewords_x()
    g = words[11]
    res = covering_optimize(code, g, 0.5, 0.1)
    assert len(res.steps) == 0 or all(s.psi_after < s.psi_before for s in res.steps)
    with pytest.raises(EmptyPromise):
        covering_optimize(code, g, 0.95, 0.1)


def _planted_multi(code, rng, tau, trials=400):
    """A received word whose open-ball list has at least two cosets."""
    words = code.codewords_x()
    for _ in range(trials):
        i, j = rng.choice(len(words), 2, replace=False)
        R1, R2 = code.right_blocks(words[i]), code.right_blocks(words[j])
        mask = rng.random(code.n) < 0.5
        g = code.from_right_blocks(np.where(mask[:, None], R1, R2))
        if len(ael_list(code, g, tau)) >= 2:
            return g
    return None


@pytest.mark.parametrize("name", ["tiny", "main", "k3_parity", "k4_outer32", "k2_trivial_rand", "k3_trivial"])
def test_covering_planted_lists(name):
    code = instance(name)
    rng = np.random.default_rng(8)
    alpha, eps = 0.3, 0.02
    tau = 1 - alpha - eps
    g = _planted_multi(code, rng, tau)
    assert g is not None
    res = covering_optimize(code, g, alpha, eps)
    c = alpha**2 + 2 * alpha * eps
    for h in res.covered:
        assert res.pseudocodeword.delta_R(h) < 1 - c
    assert all(b < a + 1e-9 for a, b in zip(res.psi_history, res.psi_history[1:]))
    for s in res.steps:
        assert abs(s.psi_predicted - s.psi_after) < 1e-9


def test_covering_iteration_cap():
    code = instance("main")
    # at alpha = 0.69 two list members 2 blocks apart agree on 1/2 <= alpha^2 + 2 alpha eps
    g = _planted_multi(code, np.random.default_rng(9), 1 - 0.69 - 0.02)
    assert g is not None
    with pytest.raises(IterationCapExceeded) as info:
        covering_optimize(code, g, 0.69, 0.02, max_iters=0)
    assert info.value.residual
    res = covering_optimize(code, g, 0.69, 0.02)
    assert len(res.steps) >= 1


@pytest.mark.parametrize("name", ["main", "tiny", "k3_parity", "r64_422", "r42_qgrs4"])
def test_johnson_sweep(name):
    code = instance(name)
    rng = np.random.default_rng(10)
    for _ in range(25):
        g = rng.integers(0, code.field.q, size=code.length)
        rep = johnson_list_bound_check(code, g)
        assert rep.list_size <= rep.bound
    assert johnson_list_bound_check(code, g, 0).radius == 0
