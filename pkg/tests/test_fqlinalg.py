import numpy as np
import pytest
from hypothesis import given, strategies as st

from aelq.errors import AmbientMismatch, CapExceeded, NotSubspace
from aelq.fqlinalg import (
    Subspace,
    complement_in,
    coset_enumerate,
    coset_reduce,
    intersect,
    inverse,
    matmul,
    perp,
    rank,
    rref,
    solve_left,
    subspace_sum,
)
from aelq.gf import field_make

from oracles import all_vectors, span_bruteforce

F2 = field_make(2, 1)
F3 = field_make(3, 1)
F4 = field_make(2, 2)
HAMMING = [[1, 0, 0, 0, 0, 1, 1], [0, 1, 0, 0, 1, 0, 1], [0, 0, 1, 0, 1, 1, 0], [0, 0, 0, 1, 1, 1, 1]]


def rand_space(field, n, dim, seed):
    rng = np.random.default_rng(seed)
    return Subspace(field, n, rng.integers(0, field.q, size=(dim, n)))


def test_rref_examples():
    assert np.array_equal(rref(F2, np.eye(3, dtype=np.int64)), np.eye(3, dtype=np.int64))
    assert rref(F2, np.zeros((2, 3), dtype=np.int64)).shape == (0, 3)
    assert rref(F2, [[1, 1], [0, 1]]).tolist() == [[1, 0], [0, 1]]


def test_perp_examples():
    assert Subspace.zero(F3, 4).perp() == Subspace.full(F3, 4)
    assert Subspace.full(F3, 4).perp() == Subspace.zero(F3, 4)
    H = Subspace(F2, 7, HAMMING)
    S = H.perp()
    assert S.dim == 3
    assert S.perp() == H
    # brute-force dual
    vecs = all_vectors(2, 7)
    dual = {tuple(v) for v in vecs if not np.any(matmul(F2, np.array(HAMMING), v[:, None]))}
    assert dual == span_bruteforce(F2, S.basis, 7)


@pytest.mark.parametrize("field,n", [(F2, 8), (F3, 5), (F4, 4)])
def test_lattice_identities_random(field, n):
    for seed in range(20):
        U = rand_space(field, n, 1 + seed % n, seed)
        V = rand_space(field, n, 1 + (3 * seed) % n, 1000 + seed)
        assert perp(perp(U)) == U
        assert perp(subspace_sum(U, V)) == intersect(perp(U), perp(V))
        assert (U + V).dim == U.dim + V.dim - (U & V).dim
        assert U + Subspace.zero(field, n) == U
        assert U & U == U


def test_sum_intersect_against_enumeration():
    for seed in range(10):
        U = rand_space(F2, 6, 3, seed)
        V = rand_space(F2, 6, 3, 50 + seed)
        su = span_bruteforce(F2, U.basis, 6)
        sv = span_bruteforce(F2, V.basis, 6)
        assert span_bruteforce(F2, (U & V).basis, 6) == su & sv
        assert len(span_bruteforce(F2, (U + V).basis, 6)) == len(su) * len(sv) // len(su & sv)


def test_canonical_bases_identical():
    rng = np.random.default_rng(3)
    U = rand_space(F3, 6, 3, 9)
    T = rng.integers(0, 3, size=(3, 3))
    while rank(F3, T) < 3:
        T = rng.integers(0, 3, size=(3, 3))
    W = Subspace(F3, 6, matmul(F3, T, U.basis))
    assert W == U and W.basis.tobytes() == U.basis.tobytes() and hash(W) == hash(U)


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        Subspace.full(F2, 3) + Subspace.full(F2, 4)


def test_complement_examples():
    V = rand_space(F3, 5, 3, 1)
    assert complement_in(V, V).dim == 0
    W = complement_in(Subspace.full(F2, 2), Subspace(F2, 2, [[1, 0]]))
    assert W.basis.tolist() == [[0, 1]]
    with pytest.raises(NotSubspace):
        complement_in(Subspace(F2, 2, [[1, 0]]), Subspace(F2, 2, [[0, 1]]))
    for seed in range(10):
        V = rand_space(F4, 5, 4, seed)
        U = Subspace(F4, 5, V.basis[:2])
        W = complement_in(V, U)
        assert (W & U).dim == 0 and W + U == V


def test_coset_enumerate_examples():
    V = rand_space(F2, 5, 3, 2)
    assert coset_enumerate(V, V).tolist() == [[0] * 5]
    assert len(coset_enumerate(Subspace.full(F2, 2), Subspace.zero(F2, 2))) == 4
    H = Subspace(F2, 7, HAMMING)
    assert len(coset_enumerate(H, H.perp())) == 2
    with pytest.raises(CapExceeded):
        coset_enumerate(Subspace.full(F2, 10), Subspace.zero(F2, 10), cap=100)


@pytest.mark.parametrize("field,n,dv,du", [(F2, 8, 6, 2), (F3, 5, 4, 1), (F4, 4, 3, 1)])
def test_coset_enumerate_partitions(field, n, dv, du):
    V = rand_space(field, n, dv, 7)
    U = Subspace(field, n, V.basis[:du])
    reps = coset_enumerate(V, U)
    assert len(reps) == field.q ** (V.dim - U.dim)
    assert np.all(V.contains(reps))
    # pairwise distinct cosets and cover V
    keys = {r.tobytes() for r in U.reduce(reps)}
    assert len(keys) == len(reps)
    assert {r.tobytes() for r in U.reduce(V.vectors())} == keys


def test_coset_reduce_examples():
    U = rand_space(F2, 8, 3, 4)
    assert not coset_reduce(U.vectors(), U).any()
    v = np.arange(8) % 2
    assert np.array_equal(coset_reduce(v, Subspace.zero(F2, 8)), v)
    rng = np.random.default_rng(5)
    for _ in range(30):
        v = rng.integers(0, 2, size=8)
        assert U.contains(F2.sub(coset_reduce(v, U), v))


def test_inverse_and_solve():
    rng = np.random.default_rng(8)
    for _ in range(10):
        A = rng.integers(0, 4, size=(4, 4))
        if rank(F4, A) < 4:
            continue
        Ai = inverse(F4, A)
        assert np.array_equal(matmul(F4, A, Ai), np.eye(4, dtype=np.int64))
        x = rng.integers(0, 4, size=4)
        b = matmul(F4, x[None, :], A)[0]
        assert np.array_equal(solve_left(F4, A, b), x)


@given(st.integers(0, 2**31 - 1), st.integers(1, 6), st.integers(0, 6))
def test_perp_dimension_and_orthogonality(seed, n, d):
    d = min(d, n)
    V = rand_space(F3, n, d, seed)
    W = V.perp()
    assert V.dim + W.dim == n
    if V.dim and W.dim:
        assert not matmul(F3, V.basis, W.basis.T).any()


@given(st.integers(0, 2**31 - 1))
def test_reduce_is_canonical(seed):
    rng = np.random.default_rng(seed)
    U = rand_space(F4, 5, int(rng.integers(0, 4)), seed)
    v = rng.integers(0, 4, size=5)
    u = U.vectors()[rng.integers(U.size)] if U.dim else np.zeros(5, dtype=np.int64)
    assert np.array_equal(U.reduce(v), U.reduce(F4.add(v, u)))
