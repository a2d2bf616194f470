"""Concatenation with an inner code and distance amplification along a bipartite graph.

Words of the concatenated code live in F_q^(n*d*b_in) in *left layout*:
edge e = l*d + port occupies coordinates e*b_in .. e*b_in + b_in - 1, so the
block of left vertex l is a contiguous inner codeword. The amplified code F
is the same space read through right neighbourhoods (``right_index``).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property

import numpy as np

from ._common import resolve_cap
from .css import CssCode, block_weight, is_ldpc
from .duality import DualityMap, complement_dual_maps, extend_blockwise
from .errors import CapExceeded, InvariantViolation, NotInCode, ParameterMismatch, SameCoset
from .fqlinalg import Subspace, matmul
from .graph import BipartiteGraph

TOL = 1e-9


def pack_blocks(B, q: int) -> np.ndarray:
    """Integer key per block (last axis), base-q little-endian."""
    B = np.asarray(B, dtype=np.int64)
    w = B.shape[-1]
    if w and q**w >= 2**62:
        raise CapExceeded("block alphabet too large to index")
    weights = np.array([q**i for i in range(w)], dtype=np.int64)
    return B @ weights


def unpack_blocks(keys, q: int, w: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    weights = np.array([q**i for i in range(w)], dtype=np.int64)
    return (keys[..., None] // weights) % q


def tensor_subspace(inner: Subspace, n: int) -> Subspace:
    """F_q^n (x) inner: inner vectors placed independently in each of n blocks."""
    w = inner.n
    if inner.dim == 0:
        return Subspace.zero(inner.field, n * w)
    rows = np.zeros((n * inner.dim, n * w), dtype=np.int64)
    for l in range(n):
        rows[l * inner.dim : (l + 1) * inner.dim, l * w : (l + 1) * w] = inner.basis
    return Subspace(inner.field, n * w, rows, _canonical=True)


def _tensor_rows(gens: np.ndarray, n: int, w: int) -> np.ndarray:
    gens = np.asarray(gens, dtype=np.int64).reshape(-1, w)
    rows = np.zeros((n * len(gens), n * w), dtype=np.int64)
    for l in range(n):
        rows[l * len(gens) : (l + 1) * len(gens), l * w : (l + 1) * w] = gens
    return rows


def _permute(space: Subspace, perm: np.ndarray) -> Subspace:
    if space.dim == 0:
        return space
    return Subspace(space.field, space.n, space.basis[:, perm])


@dataclass(frozen=True)
class Metrics:
    delta_L: Fraction
    delta_L_perp: Fraction
    delta_R: Fraction


class AelCode:
    """Outer code D, inner code C, duality maps and a graph, glued together.

    Built once; every structural identity is checked at construction.
    """

    def __init__(self, outer: CssCode, inner: CssCode, graph: BipartiteGraph, maps: DualityMap | None = None):
        if outer.field != inner.field:
            raise ParameterMismatch("outer and inner codes use different fields")
        if graph.n != outer.n_blocks:
            raise ParameterMismatch(f"graph has {graph.n} left vertices, outer code has {outer.n_blocks} blocks")
        if graph.d != inner.n_blocks:
            raise ParameterMismatch(f"graph degree {graph.d} != inner blocklength {inner.n_blocks}")
        if inner.k_phys != outer.b:
            raise ParameterMismatch(f"b_in*k_in = {inner.k_phys} but outer fold is {outer.b}")
        self.outer = outer
        self.inner = inner
        self.graph = graph
        self.field = outer.field
        self.n = graph.n
        self.d = graph.d
        self.b_in = inner.b
        self.b_out = outer.b
        self.block = self.d * self.b_in
        self.length = self.n * self.block
        self.maps = maps if maps is not None else complement_dual_maps(inner)
        if not self.maps.is_dual():
            raise ParameterMismatch("supplied maps are not duality preserving")
        self.lift = extend_blockwise(self.maps, self.n)

        ex = self.lift.image_x(outer.cx) + tensor_subspace(inner.cz_perp, self.n)
        ez = self.lift.image_z(outer.cz) + tensor_subspace(inner.cx_perp, self.n)
        x_gens = self._check_generators("X")
        z_gens = self._check_generators("Z")
        self.concat = CssCode(ex, ez, self.block, x_checks=x_gens, z_checks=z_gens, name="concat")

        cols = (self.graph.right_ports[:, :, None] * self.b_in + np.arange(self.b_in)).reshape(self.n, self.block)
        self.right_index = cols
        self.perm = cols.reshape(-1)
        self.inverse_perm = np.argsort(self.perm)
        self.folded = CssCode(
            _permute(ex, self.perm),
            _permute(ez, self.perm),
            self.block,
            x_checks=x_gens[:, self.perm] if len(x_gens) else None,
            z_checks=z_gens[:, self.perm] if len(z_gens) else None,
            name="amplified",
        )
        self.check_dual_identity()

    # structure

    def _check_generators(self, side: str) -> np.ndarray:
        """Generators of E_X^perp (side X) or E_Z^perp from outer and inner checks."""
        outer, inner = self.outer, self.inner
        if side == "X":
            o = outer.x_checks if outer.x_checks is not None else outer.cx_perp.basis
            i = inner.x_checks if inner.x_checks is not None else inner.cx_perp.basis
            top = self.lift.apply_z(o) if len(o) else np.zeros((0, self.length), dtype=np.int64)
        else:
            o = outer.z_checks if outer.z_checks is not None else outer.cz_perp.basis
            i = inner.z_checks if inner.z_checks is not None else inner.cz_perp.basis
            top = self.lift.apply_x(o) if len(o) else np.zeros((0, self.length), dtype=np.int64)
        bottom = _tensor_rows(i, self.n, self.block) if len(i) else np.zeros((0, self.length), dtype=np.int64)
        return np.concatenate([top, bottom]).astype(np.int64)

    def dual_identity(self) -> dict:
        """Both sides of the dual-space identities as subspaces."""
        lhs_x = self.concat.cx_perp
        rhs_x = self.lift.image_z(self.outer.cx_perp) + tensor_subspace(self.inner.cx_perp, self.n)
        lhs_z = self.concat.cz_perp
        rhs_z = self.lift.image_x(self.outer.cz_perp) + tensor_subspace(self.inner.cz_perp, self.n)
        return {"X": (lhs_x, rhs_x), "Z": (lhs_z, rhs_z)}

    def check_dual_identity(self) -> bool:
        for side, (lhs, rhs) in self.dual_identity().items():
            if lhs != rhs:
                raise InvariantViolation(f"dual space identity fails on side {side}")
        return True

    @property
    def s(self) -> int:
        """Alphabet size of an edge symbol, q^b_in."""
        return self.field.q**self.b_in

    @property
    def lam(self) -> float:
        return self.graph.lam

    @cached_property
    def delta_in(self) -> Fraction:
        d = self.inner.distance
        if d.degenerate:
            raise ParameterMismatch("inner code has no distance")
        return d.delta

    @cached_property
    def delta_out(self) -> Fraction | None:
        return self.outer.distance.delta

    @property
    def k_folded(self) -> Fraction:
        return Fraction(self.concat.k_phys, self.block)

    def __repr__(self):
        return (
            f"AelCode(n={self.n}, d={self.d}, q={self.field.q}, b_in={self.b_in}, "
            f"b_out={self.b_out}, k={self.concat.k_phys}, lambda={self.lam:.4f})"
        )

    def ldpc_report(self) -> dict:
        rep = is_ldpc(self.folded)
        for side in ("X", "Z"):
            inner = self.inner.x_checks if side == "X" else self.inner.z_checks
            inner = inner if inner is not None else self.inner.side(side)[0].perp().basis
            rep[side]["inner_derived_max_weight"] = int((inner != 0).sum(axis=1).max()) if len(inner) else 0
        rep["inner_weight_bound"] = self.block
        return rep

    # views

    def left_blocks(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.int64)
        return z.reshape(z.shape[:-1] + (self.n, self.block))

    def right_blocks(self, z) -> np.ndarray:
        z = np.asarray(z)
        return z[..., self.right_index]

    def from_right_blocks(self, B) -> np.ndarray:
        B = np.asarray(B)
        flat = B.reshape(B.shape[:-2] + (self.length,))
        return flat[..., self.inverse_perm]

    def to_folded(self, z) -> np.ndarray:
        """Left-layout word as a vector of the amplified code F (right blocks concatenated)."""
        return np.asarray(z)[..., self.perm]

    def from_folded(self, f) -> np.ndarray:
        return np.asarray(f)[..., self.inverse_perm]

    def restrict_left(self, z, l: int) -> np.ndarray:
        return self.left_blocks(z)[..., l, :]

    def restrict_right(self, z, r: int) -> np.ndarray:
        return self.right_blocks(z)[..., r, :]

    def right_keys(self, z) -> np.ndarray:
        return pack_blocks(self.right_blocks(z), self.field.q)

    def left_keys(self, z) -> np.ndarray:
        return pack_blocks(self.left_blocks(z), self.field.q)

    def edge_symbols(self, z) -> np.ndarray:
        """Per-edge symbol of Sigma = F_q^b_in as an integer."""
        z = np.asarray(z, dtype=np.int64)
        return pack_blocks(z.reshape(z.shape[:-1] + (self.n * self.d, self.b_in)), self.field.q)

    # local inversion

    def local_invert(self, x, side: str = "X") -> np.ndarray:
        """u in F_q^b_out with x - phi(u) in the inner stabiliser space."""
        x = np.asarray(x, dtype=np.int64)
        space = self.inner.cx if side == "X" else self.inner.cz
        if not np.all(space.contains(x)):
            raise NotInCode(f"block not in inner C_{side}")
        return self.maps.invert_x(x) if side == "X" else self.maps.invert_z(x)

    def outer_symbols(self, z, side: str = "X", check: bool = True) -> np.ndarray:
        """Local inversion of every left block, as integer outer symbols (..., n)."""
        blocks = self.left_blocks(z)
        if check:
            u = self.local_invert(blocks, side)
        else:
            u = self.maps.invert_x(blocks) if side == "X" else self.maps.invert_z(blocks)
        return pack_blocks(u, self.field.q)

    def outer_word(self, z, side: str = "X") -> np.ndarray:
        """Local inversion of every left block, concatenated (..., n*b_out)."""
        u = self.local_invert(self.left_blocks(z), side)
        return u.reshape(u.shape[:-2] + (self.n * self.b_out,))

    # cosets and enumeration

    @property
    def ex(self) -> Subspace:
        return self.concat.cx

    @property
    def ez(self) -> Subspace:
        return self.concat.cz

    @property
    def ez_perp(self) -> Subspace:
        return self.concat.cz_perp

    @property
    def ex_perp(self) -> Subspace:
        return self.concat.cx_perp

    def coset_rep(self, z) -> np.ndarray:
        """Canonical representative of z + E_Z^perp."""
        return self.ez_perp.reduce(z)

    def codewords_x(self, cap: int | None = None) -> np.ndarray:
        """All of E_X, lexicographically sorted (cached per cap-compatible call)."""
        cache = self.__dict__.setdefault("_enum_cache", {})
        if "X" not in cache:
            cache["X"] = self.ex.vectors(resolve_cap(cap))
        return cache["X"]

    def random_codeword(self, rng) -> np.ndarray:
        coeffs = rng.integers(0, self.field.q, size=self.ex.dim)
        return matmul(self.field, coeffs, self.ex.basis) if self.ex.dim else np.zeros(self.length, dtype=np.int64)

    # metrics

    def inner_stab_mask(self, blocks) -> np.ndarray:
        """Which left blocks lie in the inner C_Z^perp (vectorised)."""
        return self.inner.cz_perp.contains(blocks)

    def metric_counts(self, z, h):
        """Counts (left differ, left differ mod C_Z^perp, right differ), vectorised."""
        f = self.field
        diff = f.sub(np.asarray(z, dtype=np.int64), np.asarray(h, dtype=np.int64))
        L = self.left_blocks(diff)
        left = np.any(L != 0, axis=-1)
        left_perp = ~self.inner_stab_mask(L)
        right = np.any(self.right_blocks(diff) != 0, axis=-1)
        return left.sum(-1), left_perp.sum(-1), right.sum(-1)

    def metrics(self, z, h) -> Metrics:
        a, b, c = self.metric_counts(z, h)
        return Metrics(Fraction(int(a), self.n), Fraction(int(b), self.n), Fraction(int(c), self.n))


def ael_build(outer: CssCode, inner: CssCode, graph: BipartiteGraph) -> AelCode:
    return AelCode(outer, inner, graph)


def restrict_left(code: AelCode, z, l: int) -> np.ndarray:
    return code.restrict_left(z, l)


def restrict_right(code: AelCode, z, r: int) -> np.ndarray:
    return code.restrict_right(z, r)


def metrics(code: AelCode, z, h) -> Metrics:
    return code.metrics(z, h)


def local_invert(code: AelCode, x, side: str = "X") -> np.ndarray:
    return code.local_invert(x, side)


def partial_minimizer(code: AelCode, z, h, *, check: bool = True) -> np.ndarray:
    """psi(z, h): left block l becomes h_l when z_l is in h_l + C_Z^perp, else stays z_l."""
    z = np.asarray(z, dtype=np.int64)
    h = np.asarray(h, dtype=np.int64)
    if check and not np.all(code.ex.contains(h)):
        raise NotInCode("h is not in E_X")
    Z = code.left_blocks(z)
    H = np.broadcast_to(code.left_blocks(h), Z.shape)
    same = code.inner_stab_mask(code.field.sub(Z, H))
    out = np.where(same[..., None], H, Z)
    return out.reshape(z.shape[:-1] + (code.length,)) if z.ndim else out


@dataclass(frozen=True)
class CertificateReport:
    delta_R: Fraction
    delta_L_perp: Fraction
    delta_in: Fraction
    lam: float
    bound: float

    @property
    def margin(self) -> float:
        return float(self.delta_R) - self.bound

    @property
    def ok(self) -> bool:
        return self.margin >= -TOL


def distance_certificate(code: AelCode, z, h, lam: float | None = None) -> CertificateReport:
    """Check Delta_R(z, h) >= delta_in - lambda / Delta_{L,perp}(z, h) for codewords z, h."""
    z = np.asarray(z, dtype=np.int64)
    h = np.asarray(h, dtype=np.int64)
    if not (code.ex.contains(z) and code.ex.contains(h)):
        raise NotInCode("both words must lie in E_X")
    m = code.metrics(z, h)
    if m.delta_L_perp == 0:
        raise SameCoset("z - h lies in F^n (x) C_Z^perp")
    lam = code.lam if lam is None else lam
    bound = float(code.delta_in) - lam / float(m.delta_L_perp)
    rep = CertificateReport(m.delta_R, m.delta_L_perp, code.delta_in, lam, bound)
    if not rep.ok:
        raise InvariantViolation(f"distance certificate fails: {m.delta_R} < {bound}")
    return rep


def certificate_sweep(code: AelCode, cap: int | None = None) -> dict:
    """Certificate for every pair of codewords at once.

    Both sides of the inequality depend only on z - h, so checking (v, 0) for
    every v in E_X with Delta_{L,perp}(v, 0) > 0 covers all pairs.
    """
    words = code.codewords_x(cap)
    _, lp, r = code.metric_counts(words, np.zeros(code.length, dtype=np.int64))
    mask = lp > 0
    bound = float(code.delta_in) - code.lam * code.n / lp[mask]
    margin = r[mask] / code.n - bound
    worst = float(margin.min()) if mask.any() else float("inf")
    return {"checked": int(mask.sum()), "min_margin": worst, "ok": worst >= -TOL}


@dataclass(frozen=True)
class AelDistanceReport:
    weight: int | None
    n: int
    side: str | None
    delta_in: Fraction
    delta_out: Fraction | None
    lam: float
    witness: np.ndarray | None = dc_field(default=None, compare=False, repr=False)

    @property
    def delta_R(self) -> Fraction | None:
        return None if self.weight is None else Fraction(self.weight, self.n)

    @property
    def bound(self) -> float | None:
        if self.delta_out is None:
            return None
        return float(self.delta_in) - self.lam / float(self.delta_out)

    @property
    def margin(self) -> float | None:
        if self.bound is None or self.delta_R is None:
            return None
        return float(self.delta_R) - self.bound

    @property
    def ok(self) -> bool:
        return self.margin is None or self.margin >= -TOL

    def to_dict(self) -> dict:
        return {
            "weight": self.weight,
            "n": self.n,
            "delta_R": None if self.delta_R is None else str(self.delta_R),
            "side": self.side,
            "delta_in": str(self.delta_in),
            "delta_out": None if self.delta_out is None else str(self.delta_out),
            "lambda": self.lam,
            "bound": self.bound,
            "margin": self.margin,
            "witness": None if self.witness is None else self.witness.tolist(),
        }


def ael_distance(code: AelCode, cap: int | None = None) -> AelDistanceReport:
    """Exact right-folded distance by enumeration, checked against the amplification bound."""
    best = (None, None, None)
    for side in ("X", "Z"):
        space, stab = code.concat.side(side)
        words = code.codewords_x(cap) if side == "X" else space.vectors(resolve_cap(cap))
        mask = ~stab.contains(words)
        if not mask.any():
            continue
        w = block_weight(code.to_folded(words), code.block)
        w = np.where(mask, w, np.iinfo(np.int64).max)
        i = int(np.argmin(w))
        if best[0] is None or w[i] < best[0]:
            best = (int(w[i]), side, words[i].astype(np.int64))
    try:
        d_out = code.delta_out
    except CapExceeded:
        d_out = None
    rep = AelDistanceReport(best[0], code.n, best[1], code.delta_in, d_out, code.lam, best[2])
    if not rep.ok:
        raise InvariantViolation(f"amplified distance {rep.delta_R} below bound {rep.bound}")
    return rep
