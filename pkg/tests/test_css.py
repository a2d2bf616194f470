from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aelq.css import (
    CssCode,
    SyndromeTransformer,
    code_422,
    css_from_classical,
    error_list,
    folded_distance,
    is_ldpc,
    list_codewords,
    parity_code,
    qgrs_code,
    random_css,
    steane_code,
    syndrome,
    syndrome_to_rep,
    trivial_code,
)
from aelq.duality import field_downgrade
from aelq.errors import BadBlockSize, CapExceeded, CssConditionViolated, InconsistentSyndrome
from aelq.fqlinalg import Subspace
from aelq.gf import field_make

from oracles import block_weight, span_bruteforce

F2, F3, F4 = field_make(2), field_make(3), field_make(2, 2)


def brute_distance(code):
    """Minimum folded weight over both set differences, by plain enumeration."""
    f, n, b = code.field, code.n_phys, code.b
    best = None
    for space, stab in ((code.cx, code.cz_perp), (code.cz, code.cx_perp)):
        S = span_bruteforce(f, space.basis, n)
        T = span_bruteforce(f, stab.basis, n)
        for v in S - T:
            w = block_weight(v, b)
            best = w if best is None else min(best, w)
    return best


def brute_list(code, side, g, tau):
    """Cosets meeting the open ball, each given as a frozenset of its vectors."""
    f, n, b = code.field, code.n_phys, code.b
    space, stab = code.side(side)
    T = [np.array(t) for t in span_bruteforce(f, stab.basis, n)]
    out = set()
    for v in span_bruteforce(f, space.basis, n):
        v = np.array(v)
        if Fraction(block_weight(f.sub(v, g), b), n // b) < tau:
            out.add(frozenset(tuple(f.add(v, t)) for t in T))
    return out


def test_construction_examples():
    t = trivial_code(5)
    assert t.k_phys == 5 and t.cz_perp.dim == 0
    s = steane_code()
    assert (s.n_blocks, s.k) == (7, 1)
    c = code_422()
    assert (c.n_blocks, c.k) == (4, 2)


def test_construction_errors():
    V = Subspace(F2, 4, [[1, 1, 0, 0]])
    with pytest.raises(CssConditionViolated):
        CssCode(V, V, 1)
    with pytest.raises(BadBlockSize):
        trivial_code(5, F2, 2)


def test_css_symmetry_both_directions():
    for seed in range(20):
        code = random_css(F3, 5, 1 + seed % 2, 3 + seed % 2, seed=seed)
        assert code.cz_perp <= code.cx
        assert code.cx_perp <= code.cz
        assert code.k_phys == code.cx.dim - code.cz_perp.dim
        assert code.k * code.b == code.k_phys


@pytest.mark.parametrize(
    "code,expected",
    [(trivial_code(4), 1), (steane_code(), 3), (code_422(), 2), (parity_code(4), 1)],
)
def test_distance_examples(code, expected):
    rep = folded_distance(code)
    assert rep.weight == expected == brute_distance(code)


def test_distance_matches_bruteforce_random():
    for seed in range(12):
        f = [F2, F3][seed % 2]
        code = random_css(f, 5, 1, 3, seed=seed)
        assert folded_distance(code).weight == brute_distance(code)


def test_degenerate_distance():
    V = Subspace(F2, 4, [[1, 1, 1, 1]])
    code = CssCode(V, V.perp(), 1)
    rep = folded_distance(code)
    assert rep.degenerate and rep.weight is None and rep.delta is None


def test_distance_cap():
    with pytest.raises(CapExceeded):
        folded_distance(trivial_code(12), cap=100)


def test_list_examples():
    s = steane_code()
    g = s.cx.vectors()[5]
    lst = list_codewords(s, "X", g, 0)
    assert len(lst) == 0  # open ball of radius 0 is empty
    lst = list_codewords(s, "X", g, Fraction(1, 7))
    assert len(lst) == 1 and g in lst
    assert len(list_codewords(s, "X", g, 1.01)) == 2 ** (s.cx.dim - s.cz_perp.dim)
    assert len(list_codewords(s, "X", np.zeros(7, dtype=np.int64), Fraction(3, 7))) == 1


@pytest.mark.parametrize("seed", range(6))
def test_list_matches_bruteforce(seed):
    rng = np.random.default_rng(seed)
    code = [steane_code(), code_422(), random_css(F3, 4, 1, 3, seed=seed), field_downgrade(qgrs_code(F4, 4, 3, 2))][seed % 4]
    for side in "XZ":
        for tau in (Fraction(1, 4), Fraction(2, 5), Fraction(1, 2), Fraction(3, 4)):
            g = rng.integers(0, code.field.q, size=code.n_phys)
            lst = list_codewords(code, side, g, tau)
            ref = brute_list(code, side, g, tau)
            assert len(lst) == len(ref)
            for r in lst.reps:
                assert any(tuple(r) in c for c in ref)


def test_error_list_invariance():
    s = steane_code()
    z = np.zeros(7, dtype=np.int64)
    ex, ez = error_list(s, z, z, 0)
    assert len(ex) == 0 and len(ez) == 0
    ex, ez = error_list(s, z, z, Fraction(1, 7))
    assert ex.reps.tolist() == [[0] * 7] and ez.reps.tolist() == [[0] * 7]
    e = np.zeros(7, dtype=np.int64)
    e[3] = 1
    ex, _ = error_list(s, e, e, Fraction(2, 7))
    assert len(ex) == 1 and s.cz_perp.reduce(F2.neg(e)).tolist() == ex.reps[0].tolist()
    c = s.cx.vectors()[3]
    ex2, _ = error_list(s, F2.add(e, c), e, Fraction(2, 7))
    assert ex == ex2


def test_syndromes():
    s = steane_code()
    assert not syndrome(s, "X", s.cx.vectors()).any()
    assert not syndrome_to_rep(s, "X", np.zeros(3, dtype=np.int64)).any()
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.integers(0, 2, size=7)
        g = syndrome_to_rep(s, "X", syndrome(s, "X", v))
        assert s.cx.contains(F2.sub(v, g))
    with pytest.raises(InconsistentSyndrome):
        syndrome_to_rep(s, "X", [1, 0])


def test_syndrome_transformer_roundtrip():
    code = random_css(F3, 6, 2, 4, seed=3)
    tr = SyndromeTransformer(code, "Z").fit()
    X = np.random.default_rng(1).integers(0, 3, size=(10, 6))
    S = tr.transform(X)
    back = tr.inverse_transform(S)
    assert np.array_equal(tr.transform(back), S)
    assert np.all(code.cz.contains(F3.sub(X, back)))


def test_ldpc_examples():
    rep = is_ldpc(trivial_code(4))
    assert rep["sparse"] and rep["X"]["rows"] == 0
    rep = is_ldpc(steane_code(), row_weight_cap=4)
    assert rep["X"]["max_row_weight"] == 4 and rep["sparse"]
    assert not is_ldpc(steane_code(), row_weight_cap=3)["sparse"]


def test_qgrs_and_downgrade_distance():
    code = qgrs_code(F4, 4, 3, 3)
    down = field_downgrade(code)
    assert down.b == 2 and down.k_phys == 2 * code.k_phys
    assert folded_distance(down).weight == folded_distance(code).weight == brute_distance(code)
    assert down.cz_perp <= down.cx


def test_css_from_classical():
    H = steane_code().cx
    code = css_from_classical(H, H.perp())
    assert code.k_phys == 1 and code.cz_perp == H.perp()


@given(st.integers(0, 10_000), st.integers(3, 6))
def test_folded_dimension_identity(seed, n):
    code = random_css(F2, n, 1, n - 1, seed=seed)
    assert code.k_phys == code.cx.dim - code.cz.perp().dim
    assert code.cx.perp() <= code.cz
