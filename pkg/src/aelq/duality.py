"""Dual systems, dual bases, duality-preserving maps and the trace-form field downgrade."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .css import CssCode
from .errors import Degenerate, IncompatibleFields, Singular
from .fqlinalg import Subspace, complement_in, inverse, matmul, rank
from .gf import FieldSpec, coordinates, field_make, trace, trace_dual_basis


@dataclass(frozen=True)
class DualSystem:
    """Two equal-dimension spaces paired by a bilinear form.

    ``v_basis``/``w_basis`` hold elements in whatever representation ``pairing``
    understands; ``pairing(V, W)`` returns the Gram matrix over ``field`` and
    ``combine(C, W)`` forms the linear combinations sum_k C[j, k] W[k].
    """

    field: FieldSpec
    v_basis: np.ndarray
    w_basis: np.ndarray
    pairing: Callable
    combine: Callable

    def gram(self) -> np.ndarray:
        return self.pairing(self.v_basis, self.w_basis)

    def check_nondegenerate(self) -> None:
        k = len(self.v_basis)
        if len(self.w_basis) != k:
            raise Degenerate("spaces have different dimensions")
        if k and rank(self.field, self.gram()) != k:
            raise Degenerate("Gram matrix is singular")


def canonical_system(V: Subspace, W: Subspace) -> DualSystem:
    """(V, W) under the restriction of the standard dot product."""
    f = V.field
    return DualSystem(
        f,
        V.basis,
        W.basis,
        lambda A, B: matmul(f, A, B.T),
        lambda C, B: matmul(f, C, B),
    )


def trace_system(ext: FieldSpec, base: FieldSpec | None = None) -> DualSystem:
    """(F_{q^b}, F_{q^b}) under (x, y) -> Tr(xy), with the power basis on both sides."""
    base = base or ext.prime_field()
    v, _ = trace_dual_basis(ext, base)
    emb = ext.embedding(base)

    def pairing(A, B):
        return trace(ext.mul(np.asarray(A)[:, None], np.asarray(B)[None, :]), base, ext)

    def combine(C, B):
        C = np.asarray(C, dtype=np.int64)
        out = np.zeros(C.shape[0], dtype=np.int64)
        for j in range(C.shape[0]):
            for k in range(C.shape[1]):
                out[j] = ext.add(out[j], ext.mul(emb[C[j, k]], B[k]))
        return out

    return DualSystem(base, v, v.copy(), pairing, combine)


def dual_basis(sys: DualSystem):
    """Bases (v, w') of the two spaces with identity Gram matrix; v is kept as given."""
    sys.check_nondegenerate()
    G = sys.gram()
    try:
        Ginv = inverse(sys.field, G) if len(G) else G
    except Singular as exc:
        raise Degenerate("dual system is degenerate") from exc
    # w'_j = sum_k Ginv[k, j] w_k gives <v_i, w'_j> = (G Ginv)_ij
    w = sys.combine(np.asarray(Ginv).T, sys.w_basis) if len(G) else sys.w_basis
    return sys.v_basis, w


@dataclass(frozen=True)
class DualityMap:
    """phi_x, phi_z: F_q^k -> F_q^N given by k x N matrices with phi_x phi_z^T = I."""

    field: FieldSpec
    phi_x: np.ndarray
    phi_z: np.ndarray

    @property
    def k(self) -> int:
        return self.phi_x.shape[0]

    @property
    def width(self) -> int:
        return self.phi_x.shape[1]

    def apply_x(self, u) -> np.ndarray:
        return matmul(self.field, np.asarray(u, dtype=np.int64), self.phi_x)

    def apply_z(self, u) -> np.ndarray:
        return matmul(self.field, np.asarray(u, dtype=np.int64), self.phi_z)

    def invert_x(self, x) -> np.ndarray:
        """u with x - phi_x(u) orthogonal to im(phi_z) (exact inverse on im(phi_x) + ker)."""
        return matmul(self.field, np.asarray(x, dtype=np.int64), self.phi_z.T)

    def invert_z(self, x) -> np.ndarray:
        return matmul(self.field, np.asarray(x, dtype=np.int64), self.phi_x.T)

    def is_dual(self) -> bool:
        gram = matmul(self.field, self.phi_x, self.phi_z.T)
        return np.array_equal(gram, np.eye(self.k, dtype=np.int64))

    def to_json(self) -> dict:
        return {
            "field": self.field.to_spec(),
            "phi_x": self.phi_x.tolist(),
            "phi_z": self.phi_z.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DualityMap":
        f = field_make(data["field"]["p"], data["field"].get("m", 1))
        return cls(f, np.array(data["phi_x"], dtype=np.int64), np.array(data["phi_z"], dtype=np.int64))


def complement_dual_maps(inner: CssCode) -> DualityMap:
    """phi_x onto W_X (complement of C_Z^perp in C_X), phi_z onto W_Z, in dual bases."""
    if inner.k_phys < 1:
        raise Degenerate("inner code encodes nothing")
    WX = complement_in(inner.cx, inner.cz_perp)
    WZ = complement_in(inner.cz, inner.cx_perp)
    try:
        vx, wz = dual_basis(canonical_system(WX, WZ))
    except Degenerate as exc:  # pragma: no cover - impossible for a valid CSS code
        raise AssertionError("W_X x W_Z pairing is degenerate") from exc
    return DualityMap(inner.field, np.array(vx, dtype=np.int64), np.array(wz, dtype=np.int64))


@dataclass(frozen=True)
class BlockwiseMap:
    """A DualityMap applied independently to each of ``n`` blocks."""

    base: DualityMap
    n: int

    def _apply(self, mat, u) -> np.ndarray:
        u = np.asarray(u, dtype=np.int64)
        blocks = u.reshape(u.shape[:-1] + (self.n, self.base.k))
        out = matmul(self.base.field, blocks, mat)
        return out.reshape(u.shape[:-1] + (self.n * self.base.width,))

    def apply_x(self, u) -> np.ndarray:
        return self._apply(self.base.phi_x, u)

    def apply_z(self, u) -> np.ndarray:
        return self._apply(self.base.phi_z, u)

    def invert_x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        blocks = x.reshape(x.shape[:-1] + (self.n, self.base.width))
        return self.base.invert_x(blocks).reshape(x.shape[:-1] + (self.n * self.base.k,))

    def invert_z(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        blocks = x.reshape(x.shape[:-1] + (self.n, self.base.width))
        return self.base.invert_z(blocks).reshape(x.shape[:-1] + (self.n * self.base.k,))

    def image_x(self, space: Subspace) -> Subspace:
        f = self.base.field
        return Subspace(f, self.n * self.base.width, self.apply_x(space.basis) if space.dim else None)

    def image_z(self, space: Subspace) -> Subspace:
        f = self.base.field
        return Subspace(f, self.n * self.base.width, self.apply_z(space.basis) if space.dim else None)


def extend_blockwise(dmap: DualityMap, n: int) -> BlockwiseMap:
    return BlockwiseMap(dmap, int(n))


def trace_duality_map(ext: FieldSpec, base: FieldSpec | None = None):
    """Coordinate maps for the trace downgrade.

    Returns (to_x, to_z): functions sending arrays of ext codes to (..., b)
    arrays over base, with <to_x(x), to_z(y)> = Tr(xy).
    """
    base = base or ext.prime_field()
    v, w = trace_dual_basis(ext, base)

    def to_x(x):
        return coordinates(x, w, base, ext)  # coordinates in basis v

    def to_z(y):
        return coordinates(y, v, base, ext)  # coordinates in basis w

    return to_x, to_z


def field_downgrade(code: CssCode, base: FieldSpec | None = None) -> CssCode:
    """Vector-space CSS code over base with fold b times the original fold."""
    ext = code.field
    base = base or ext.prime_field()
    if base.p != ext.p or ext.m % base.m:
        raise IncompatibleFields(f"{base} is not a subfield of {ext}")
    b = ext.m // base.m
    if b == 1:
        restrict = lambda S: Subspace(base, S.n, ext.restrict(base, S.basis) if S.dim else None)  # noqa: E731
        return CssCode(restrict(code.cx), restrict(code.cz), code.b, name=code.name)
    to_x, to_z = trace_duality_map(ext, base)
    scalars, _ = trace_dual_basis(ext, base)

    def image(space: Subspace, to) -> Subspace:
        if space.dim == 0:
            return Subspace.zero(base, space.n * b)
        gens = ext.mul(space.basis[:, None, :], scalars[None, :, None]).reshape(-1, space.n)
        return Subspace(base, space.n * b, to(gens).reshape(len(gens), space.n * b))

    cx = image(code.cx, to_x)
    cz = image(code.cz, to_z)
    out = CssCode(cx, cz, code.b * b, name=f"downgrade({code.name})" if code.name else None)
    if out.k_phys != b * code.k_phys:  # pragma: no cover
        raise AssertionError("field downgrade changed the dimension")
    return out
