"""Dense linear algebra over F_q and canonical subspaces.

Matrices are 2-D numpy integer arrays of element codes; the field is passed
alongside. Every Subspace keeps its basis in reduced row-echelon form, so
equal subspaces have byte-identical bases.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from ._common import check_cap
from .errors import AmbientMismatch, NotSubspace, Singular
from .gf import FieldSpec


def _as_matrix(M) -> np.ndarray:
    A = np.array(M, dtype=np.int64)
    if A.ndim == 1:
        A = A[None, :]
    if A.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return A


def rref(field: FieldSpec, M, *, return_pivots: bool = False, return_transform: bool = False):
    """Reduced row-echelon form with zero rows removed.

    With ``return_transform`` also returns T such that T @ M equals the full
    (zero rows included) echelon form; the first rank rows of T give the
    returned rows.
    """
    A = _as_matrix(M).copy()
    rows, cols = A.shape
    if return_transform:
        A = np.concatenate([A, np.eye(rows, dtype=np.int64)], axis=1)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        if A[r, c] != 1:
            A[r] = field.mul(A[r], field.inv(A[r, c]))
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            A[hit] = field.sub(A[hit], field.mul(col[hit, None], A[r][None, :]))
        pivots.append(c)
        r += 1
    out = [A[:r, :cols]]
    if return_pivots:
        out.append(pivots)
    if return_transform:
        out.append(A[:, cols:])
    return out[0] if len(out) == 1 else tuple(out)


def rank(field: FieldSpec, M) -> int:
    return rref(field, M).shape[0]


def matmul(field: FieldSpec, A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if field.m == 1:
        return (A @ B) % field.p
    if A.shape[-1] == 0:
        return np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
    acc = None
    for k in range(A.shape[-1]):
        term = field.mul(A[..., k, None], B[k])
        acc = term if acc is None else field.add(acc, term)
    return acc


def inverse(field: FieldSpec, A) -> np.ndarray:
    A = _as_matrix(A)
    n, m = A.shape
    if n != m:
        raise Singular("matrix is not square")
    R, piv, T = rref(field, A, return_pivots=True, return_transform=True)
    if len(piv) != n:
        raise Singular("matrix is singular")
    return T


def null_space(field: FieldSpec, M, n: int | None = None) -> np.ndarray:
    """Rows spanning {v : M v^T = 0}."""
    A = _as_matrix(M) if np.size(M) else np.zeros((0, n or 0), dtype=np.int64)
    if n is None:
        n = A.shape[1]
    R, piv = rref(field, A, return_pivots=True) if A.shape[0] else (A, [])
    free = [c for c in range(n) if c not in set(piv)]
    K = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        K[t, f] = 1
        for i, pc in enumerate(piv):
            K[t, pc] = field.neg(R[i, f])
    return K


def solve_left(field: FieldSpec, A, b) -> np.ndarray:
    """Some x with x @ A = b; raises NotSubspace if b is outside the row space."""
    A = _as_matrix(A)
    b = np.asarray(b, dtype=np.int64)
    R, piv, T = rref(field, A, return_pivots=True, return_transform=True)
    coeff = b[..., piv] if piv else np.zeros(b.shape[:-1] + (0,), dtype=np.int64)
    recon = matmul(field, coeff, R) if piv else np.zeros_like(b)
    if not np.array_equal(recon, b):
        raise NotSubspace("vector not in row space")
    return matmul(field, coeff, T[: len(piv)]) if piv else np.zeros(b.shape[:-1] + (A.shape[0],), dtype=np.int64)


def span_vectors(field: FieldSpec, basis, cap: int | None = None) -> np.ndarray:
    """All vectors in the span of ``basis`` rows.

    For an RREF basis the output is in lexicographic order (first basis row's
    coefficient most significant).
    """
    B = np.asarray(basis, dtype=np.int64)
    k, n = B.shape
    check_cap(field.q**k, cap, "span enumeration")
    dtype = np.uint8 if field.q <= 256 else np.uint16
    out = np.zeros((1, n), dtype=dtype)
    for row in B[::-1]:
        blocks = [out]
        for c in range(1, field.q):
            blocks.append(field.add(out, field.mul(c, row)).astype(dtype))
        out = np.concatenate(blocks)
    return out


def _key(A: np.ndarray) -> bytes:
    return np.ascontiguousarray(A, dtype=np.int64).tobytes()


class Subspace:
    """An F_q-linear subspace of F_q^n held by its canonical RREF basis."""

    def __init__(self, field: FieldSpec, n: int, vectors=None, *, _canonical=False):
        self.field = field
        self.n = int(n)
        if vectors is None or np.size(vectors) == 0:
            B, piv = np.zeros((0, self.n), dtype=np.int64), []
        elif _canonical:
            B = np.asarray(vectors, dtype=np.int64)
            piv = [int(np.flatnonzero(r)[0]) for r in B]
        else:
            V = _as_matrix(vectors)
            if V.shape[1] != self.n:
                raise AmbientMismatch(f"vectors of length {V.shape[1]} in ambient {self.n}")
            if V.size and (V.min() < 0 or V.max() >= field.q):
                raise ValueError("entries must be field element codes")
            B, piv = rref(field, V, return_pivots=True)
        B = np.ascontiguousarray(B)
        B.setflags(write=False)
        self.basis = B
        self.pivots = tuple(piv)

    @classmethod
    def span(cls, field: FieldSpec, vectors, n: int | None = None) -> "Subspace":
        V = np.asarray(vectors, dtype=np.int64)
        if n is None:
            n = V.shape[-1]
        return cls(field, n, V)

    @classmethod
    def zero(cls, field: FieldSpec, n: int) -> "Subspace":
        return cls(field, n)

    @classmethod
    def full(cls, field: FieldSpec, n: int) -> "Subspace":
        return cls(field, n, np.eye(n, dtype=np.int64), _canonical=True)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def size(self) -> int:
        return self.field.q**self.dim

    def __repr__(self):
        return f"Subspace(dim={self.dim}, n={self.n}, {self.field})"

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.field == other.field
            and self.n == other.n
            and self.basis.shape == other.basis.shape
            and _key(self.basis) == _key(other.basis)
        )

    def __hash__(self):
        return hash((self.field, self.n, _key(self.basis)))

    def _same_ambient(self, other: "Subspace") -> None:
        if self.field != other.field or self.n != other.n:
            raise AmbientMismatch("subspaces live in different ambient spaces")

    @cached_property
    def _perp(self) -> "Subspace":
        return Subspace(self.field, self.n, null_space(self.field, self.basis, self.n))

    def perp(self) -> "Subspace":
        return self._perp

    def __add__(self, other: "Subspace") -> "Subspace":
        self._same_ambient(other)
        if other.dim == 0:
            return self
        if self.dim == 0:
            return other
        return Subspace(self.field, self.n, np.concatenate([self.basis, other.basis]))

    def __and__(self, other: "Subspace") -> "Subspace":
        self._same_ambient(other)
        return (self.perp() + other.perp()).perp()

    def reduce(self, v) -> np.ndarray:
        """Canonical coset representative of v + self (vectorised over leading axes)."""
        v = np.array(v, dtype=np.int64)
        if v.shape[-1] != self.n:
            raise AmbientMismatch("vector length does not match ambient")
        shape = v.shape
        v = v.reshape(-1, self.n)
        f = self.field
        binary = f.p == 2 and f.m == 1
        for row, c in zip(self.basis, self.pivots):
            mask = v[:, c] != 0
            if not np.any(mask):
                continue
            if binary:
                v[mask] ^= row
            else:
                v[mask] = f.sub(v[mask], f.mul(v[mask, c][:, None], row[None, :]))
        return v.reshape(shape)

    def contains(self, v) -> np.ndarray | bool:
        r = self.reduce(v)
        out = ~np.any(r != 0, axis=-1)
        return bool(out) if np.ndim(out) == 0 else out

    def __contains__(self, v) -> bool:
        return bool(self.contains(v))

    def __le__(self, other: "Subspace") -> bool:
        self._same_ambient(other)
        return self.dim == 0 or bool(np.all(other.contains(self.basis)))

    def __ge__(self, other: "Subspace") -> bool:
        return other <= self

    def coordinates(self, v) -> np.ndarray:
        """Coefficients of v in the RREF basis; raises NotSubspace if v is outside."""
        v = np.asarray(v, dtype=np.int64)
        if not np.all(self.contains(v)):
            raise NotSubspace("vector not in subspace")
        return v[..., list(self.pivots)]

    def complement_in(self, sub: "Subspace") -> "Subspace":
        """W with self = W (+) sub, chosen greedily along self's RREF basis."""
        return complement_in(self, sub)

    def vectors(self, cap: int | None = None) -> np.ndarray:
        return span_vectors(self.field, self.basis, cap)

    def to_json(self) -> list:
        return self.basis.tolist()


def perp(V: Subspace) -> Subspace:
    return V.perp()


def subspace_sum(U: Subspace, V: Subspace) -> Subspace:
    return U + V


def intersect(U: Subspace, V: Subspace) -> Subspace:
    return U & V


def complement_in(V: Subspace, U: Subspace) -> Subspace:
    """Deterministic complement of U inside V (greedy over V's RREF rows)."""
    V._same_ambient(U)
    if not U <= V:
        raise NotSubspace("U is not contained in V")
    chosen = []
    current = U
    for row in V.basis:
        if current.dim == V.dim:
            break
        if not current.contains(row):
            chosen.append(row)
            current = current + Subspace(V.field, V.n, row[None, :], _canonical=False)
    return Subspace(V.field, V.n, np.array(chosen) if chosen else None)


def coset_reduce(v, U: Subspace) -> np.ndarray:
    return U.reduce(v)


def coset_enumerate(V: Subspace, U: Subspace, cap: int | None = None) -> np.ndarray:
    """One canonical representative per coset of U in V, sorted lexicographically."""
    W = complement_in(V, U)
    check_cap(V.field.q**W.dim, cap, "coset enumeration")
    reps = U.reduce(W.vectors(cap).astype(np.int64))
    order = np.lexsort(reps.T[::-1])
    return reps[order]


def matrix_to_json(M) -> list:
    return np.asarray(M, dtype=np.int64).tolist()


def matrix_from_json(rows, n: int | None = None) -> np.ndarray:
    A = np.array(rows, dtype=np.int64)
    if A.size == 0:
        return np.zeros((0, n or 0), dtype=np.int64)
    return A
