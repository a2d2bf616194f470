"""CSS codes over F_q, folded into blocks of b symbols."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._common import below, rng_from
from .errors import BadBlockSize, CssConditionViolated, InconsistentSyndrome
from .fqlinalg import Subspace, matmul
from .gf import FieldSpec, field_make

SIDES = ("X", "Z")


def block_weight(v, b: int) -> np.ndarray:
    """Number of nonzero length-b blocks (vectorised over leading axes)."""
    v = np.asarray(v)
    return np.any(v.reshape(v.shape[:-1] + (-1, b)) != 0, axis=-1).sum(axis=-1)


class CssCode:
    """Pair (C_X, C_Z) with C_Z^perp inside C_X, folded into blocks of size b.

    ``x_checks`` / ``z_checks`` optionally supply sparse generating sets of
    C_X^perp / C_Z^perp used by the LDPC report.
    """

    def __init__(self, cx: Subspace, cz: Subspace, b: int = 1, *, x_checks=None, z_checks=None, name=None):
        if cx.field != cz.field or cx.n != cz.n:
            raise CssConditionViolated("C_X and C_Z live in different ambient spaces")
        if b < 1 or cx.n % b:
            raise BadBlockSize(f"length {cx.n} is not divisible by block size {b}")
        if not cz.perp() <= cx:
            raise CssConditionViolated("C_Z^perp is not contained in C_X")
        self.cx = cx
        self.cz = cz
        self.b = int(b)
        self.name = name
        self.x_checks = None if x_checks is None else np.asarray(x_checks, dtype=np.int64)
        self.z_checks = None if z_checks is None else np.asarray(z_checks, dtype=np.int64)
        for checks, space in ((self.x_checks, self.cx_perp), (self.z_checks, self.cz_perp)):
            if checks is not None and Subspace(self.field, self.n_phys, checks) != space:
                raise CssConditionViolated("supplied checks do not span the dual code")

    @property
    def field(self) -> FieldSpec:
        return self.cx.field

    @property
    def n_phys(self) -> int:
        return self.cx.n

    @property
    def n_blocks(self) -> int:
        return self.n_phys // self.b

    @property
    def cx_perp(self) -> Subspace:
        return self.cx.perp()

    @property
    def cz_perp(self) -> Subspace:
        return self.cz.perp()

    @property
    def k_phys(self) -> int:
        return self.cx.dim - self.cz_perp.dim

    @property
    def k(self) -> Fraction:
        """Folded dimension k_phys / b."""
        return Fraction(self.k_phys, self.b)

    def side(self, side: str) -> tuple[Subspace, Subspace]:
        """(code space, stabiliser space) for the given side."""
        if side == "X":
            return self.cx, self.cz_perp
        if side == "Z":
            return self.cz, self.cx_perp
        raise ValueError("side must be 'X' or 'Z'")

    def __repr__(self):
        q = self.field.q
        tag = f" {self.name}" if self.name else ""
        return f"CssCode{tag}[[{self.n_blocks}, {self.k}]]_{q},b={self.b}"

    @cached_property
    def distance(self) -> "DistanceReport":
        return folded_distance(self)

    def to_spec(self) -> dict:
        return {
            "field": self.field.to_spec(),
            "b": self.b,
            "cx_basis": self.cx.to_json(),
            "cz_basis": self.cz.to_json(),
        }


def css_make(cx: Subspace, cz: Subspace, b: int = 1, **kw) -> CssCode:
    return CssCode(cx, cz, b, **kw)


@dataclass(frozen=True)
class DistanceReport:
    weight: int | None
    n_blocks: int
    side: str | None = None
    witness: np.ndarray | None = dc_field(default=None, compare=False, repr=False)

    @property
    def degenerate(self) -> bool:
        return self.weight is None

    @property
    def delta(self) -> Fraction | None:
        return None if self.weight is None else Fraction(self.weight, self.n_blocks)

    def to_dict(self) -> dict:
        return {
            "weight": self.weight,
            "n_blocks": self.n_blocks,
            "delta": None if self.delta is None else str(self.delta),
            "degenerate": self.degenerate,
            "side": self.side,
            "witness": None if self.witness is None else self.witness.tolist(),
        }


def _min_outside(space: Subspace, stab: Subspace, b: int, cap):
    words = space.vectors(cap)
    mask = ~stab.contains(words)
    if not np.any(mask):
        return None, None
    w = block_weight(words, b)
    w = np.where(mask, w, np.iinfo(np.int64).max)
    i = int(np.argmin(w))  # enumeration is lexicographic, so argmin is the smallest witness
    return int(w[i]), words[i].astype(np.int64)


def folded_distance(code: CssCode, cap: int | None = None) -> DistanceReport:
    """Minimum block weight over (C_X minus C_Z^perp) and (C_Z minus C_X^perp).

    Returns a report with weight None when both differences are empty.
    """
    best = (None, None, None)
    for side in SIDES:
        space, stab = code.side(side)
        w, wit = _min_outside(space, stab, code.b, cap)
        if w is not None and (best[0] is None or w < best[0]):
            best = (w, side, wit)
    return DistanceReport(best[0], code.n_blocks, best[1], best[2])


@dataclass(frozen=True)
class CosetList:
    """Canonical coset representatives (rows of ``reps``, lexicographically sorted)."""

    code: CssCode = dc_field(repr=False, compare=False)
    side: str
    reps: np.ndarray = dc_field(compare=False)
    shifted: bool = False

    def __post_init__(self):
        r = np.asarray(self.reps, dtype=np.int64).reshape(-1, self.code.n_phys)
        if len(r):
            r = np.unique(r, axis=0)
        object.__setattr__(self, "reps", r)

    def __len__(self):
        return len(self.reps)

    def keys(self) -> set[bytes]:
        return {row.tobytes() for row in self.reps}

    def __contains__(self, v) -> bool:
        stab = self.code.side(self.side)[1]
        return stab.reduce(v).astype(np.int64).tobytes() in self.keys()

    def __le__(self, other: "CosetList") -> bool:
        return self.keys() <= other.keys()

    def __eq__(self, other):
        return isinstance(other, CosetList) and self.side == other.side and self.keys() == other.keys()

    def to_json(self) -> list:
        return self.reps.tolist()


def list_codewords(code: CssCode, side: str, g, tau, cap: int | None = None) -> CosetList:
    """Cosets of the stabiliser space meeting the open folded ball B(g, tau).

    Brute force over the whole code space; tau is compared exactly when given
    as an int or Fraction.
    """
    space, stab = code.side(side)
    g = np.asarray(g, dtype=np.int64)
    if g.shape != (code.n_phys,):
        raise ValueError("received word has wrong length")
    words = space.vectors(cap).astype(np.int64)
    dist = block_weight(code.field.sub(words, g[None, :]), code.b)
    hits = words[below(dist, code.n_blocks, tau)]
    return CosetList(code, side, stab.reduce(hits) if len(hits) else hits)


def error_list(code: CssCode, g_x, g_z, tau, cap: int | None = None) -> tuple[CosetList, CosetList]:
    """The lists around g_x and g_z, shifted by the received words."""
    out = []
    for side, g in (("X", g_x), ("Z", g_z)):
        lst = list_codewords(code, side, g, tau, cap)
        stab = code.side(side)[1]
        shifted = code.field.sub(lst.reps, np.asarray(g, dtype=np.int64)[None, :]) if len(lst) else lst.reps
        out.append(CosetList(code, side, stab.reduce(shifted) if len(lst) else shifted, shifted=True))
    return out[0], out[1]


def parity_checks(code: CssCode, side: str) -> np.ndarray:
    """Canonical parity-check rows: the RREF basis of the dual of the side's code."""
    return code.side(side)[0].perp().basis


def syndrome(code: CssCode, side: str, v) -> np.ndarray:
    H = parity_checks(code, side)
    return matmul(code.field, np.asarray(v, dtype=np.int64), H.T)


def syndrome_to_rep(code: CssCode, side: str, s) -> np.ndarray:
    """A vector with syndrome s (zero outside the pivot columns of the checks)."""
    H = code.side(side)[0].perp()
    s = np.asarray(s, dtype=np.int64)
    if s.shape[-1] != H.dim:
        raise InconsistentSyndrome(f"syndrome length {s.shape[-1]} != {H.dim}")
    g = np.zeros(s.shape[:-1] + (code.n_phys,), dtype=np.int64)
    g[..., list(H.pivots)] = s
    if not np.array_equal(matmul(code.field, g, H.basis.T), s):
        raise InconsistentSyndrome("syndrome outside the image of the check map")
    return g


def _weights(M: np.ndarray) -> dict:
    if M is None or len(M) == 0:
        return {"rows": 0, "max_row_weight": 0, "max_col_weight": 0}
    nz = M != 0
    return {
        "rows": int(M.shape[0]),
        "max_row_weight": int(nz.sum(axis=1).max()),
        "max_col_weight": int(nz.sum(axis=0).max()),
    }


def is_ldpc(code: CssCode, row_weight_cap: int | None = None, col_weight_cap: int | None = None) -> dict:
    """Check weights from the RREF bases and any supplied generators.

    For each side the better (smaller max row weight) of the two generating
    sets is reported.
    """
    report = {}
    ok = True
    for side, supplied in (("X", code.x_checks), ("Z", code.z_checks)):
        candidates = {"rref": _weights(parity_checks(code, side))}
        if supplied is not None:
            candidates["supplied"] = _weights(supplied)
        src = min(candidates, key=lambda k: (candidates[k]["max_row_weight"], k != "supplied"))
        best = dict(candidates[src], source=src)
        if row_weight_cap is not None and best["max_row_weight"] > row_weight_cap:
            ok = False
        if col_weight_cap is not None and best["max_col_weight"] > col_weight_cap:
            ok = False
        report[side] = best
    report["sparse"] = ok
    return report


class SyndromeTransformer(TransformerMixin, BaseEstimator):
    """Maps vectors to syndromes for one side of a CSS code.

    ``inverse_transform`` returns canonical vectors with the given syndromes.
    """

    def __init__(self, code: CssCode | None = None, side: str = "X"):
        self.code = code
        self.side = side

    def fit(self, X=None, y=None):
        if not isinstance(self.code, CssCode):
            raise TypeError("code must be a CssCode")
        if self.side not in SIDES:
            raise ValueError("side must be 'X' or 'Z'")
        self.checks_ = parity_checks(self.code, self.side)
        self.n_features_in_ = self.code.n_phys
        return self

    def transform(self, X):
        check_is_fitted(self, "checks_")
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        return syndrome(self.code, self.side, X)

    def inverse_transform(self, S):
        check_is_fitted(self, "checks_")
        return syndrome_to_rep(self.code, self.side, np.atleast_2d(np.asarray(S, dtype=np.int64)))


# built-in constructions

HAMMING_CHECKS = np.array(
    [[1, 0, 1, 0, 1, 0, 1], [0, 1, 1, 0, 0, 1, 1], [0, 0, 0, 1, 1, 1, 1]], dtype=np.int64
)


def trivial_code(n: int, field: FieldSpec | None = None, b: int = 1) -> CssCode:
    """[[n, n]]: C_X = C_Z = everything."""
    field = field or field_make(2)
    full = Subspace.full(field, n)
    return CssCode(full, full, b, name="trivial")


def parity_code(n: int, field: FieldSpec | None = None) -> CssCode:
    """[[n, n-1]]: C_X = everything, C_Z = kernel of the all-ones functional."""
    field = field or field_make(2)
    ones = np.ones((1, n), dtype=np.int64)
    cz = Subspace(field, n, ones).perp()
    return CssCode(Subspace.full(field, n), cz, 1, z_checks=ones, name="parity")


def code_422() -> CssCode:
    f = field_make(2)
    c = Subspace(f, 4, np.ones((1, 4), dtype=np.int64)).perp()
    ones = np.ones((1, 4), dtype=np.int64)
    return CssCode(c, c, 1, x_checks=ones, z_checks=ones, name="[[4,2,2]]")


def steane_code() -> CssCode:
    f = field_make(2)
    ham = Subspace(f, 7, HAMMING_CHECKS).perp()
    return CssCode(ham, ham, 1, x_checks=HAMMING_CHECKS, z_checks=HAMMING_CHECKS, name="steane")


def css_from_classical(c1: Subspace, c2: Subspace, b: int = 1) -> CssCode:
    """Standard construction from nested classical codes c2 inside c1.

    C_X = c1 and C_Z = c2^perp, so that C_Z^perp = c2.
    """
    return CssCode(c1, c2.perp(), b, name="css")


def grs_generator(field: FieldSpec, alphas, multipliers, k: int) -> np.ndarray:
    """Rows v_i * alpha_i^j for j < k."""
    alphas = np.asarray(alphas, dtype=np.int64)
    v = np.asarray(multipliers, dtype=np.int64)
    rows = [field.mul(v, field.power(alphas, j)) for j in range(k)]
    return np.array(rows, dtype=np.int64).reshape(k, len(alphas))


def grs_dual_multipliers(field: FieldSpec, alphas, multipliers) -> np.ndarray:
    """u with GRS_k(alpha, v)^perp = GRS_{n-k}(alpha, u)."""
    alphas = np.asarray(alphas, dtype=np.int64)
    v = np.asarray(multipliers, dtype=np.int64)
    n = len(alphas)
    out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        prod = 1
        for j in range(n):
            if j != i:
                prod = int(field.mul(prod, field.sub(alphas[i], alphas[j])))
        out[i] = int(field.inv(field.mul(v[i], prod)))
    return out


def qgrs_code(field: FieldSpec, n: int, kx: int, kz: int, alphas=None, multipliers=None) -> CssCode:
    """Quantum GRS code: C_X = GRS_kx(alpha, v), C_Z = GRS_kz(alpha, u) with u the dual multipliers.

    Then C_Z^perp = GRS_{n-kz}(alpha, v), which sits inside C_X when kx + kz >= n.
    """
    if alphas is None:
        alphas = np.arange(n)
    alphas = np.asarray(alphas, dtype=np.int64)
    if len(alphas) != n or len(set(alphas.tolist())) != n or n > field.q:
        raise ValueError("need n distinct evaluation points")
    v = np.ones(n, dtype=np.int64) if multipliers is None else np.asarray(multipliers, dtype=np.int64)
    u = grs_dual_multipliers(field, alphas, v)
    cx = Subspace(field, n, grs_generator(field, alphas, v, kx))
    cz = Subspace(field, n, grs_generator(field, alphas, u, kz))
    return CssCode(cx, cz, 1, name=f"qgrs({n},{kx},{kz})")


def random_subspace(field: FieldSpec, n: int, dim: int, rng, within: Subspace | None = None) -> Subspace:
    """Uniform-ish random subspace of the given dimension (optionally inside ``within``)."""
    rng = rng_from(rng)
    amb = within if within is not None else Subspace.full(field, n)
    if dim > amb.dim:
        raise ValueError("dimension too large")
    while True:
        coeffs = rng.integers(0, field.q, size=(dim, amb.dim))
        V = Subspace(field, n, matmul(field, coeffs, amb.basis)) if dim else Subspace.zero(field, n)
        if V.dim == dim:
            return V


def random_css(field: FieldSpec, n: int, stab_dim: int, code_dim: int, b: int = 1, seed=0) -> CssCode:
    """C_Z^perp of dimension stab_dim inside C_X of dimension code_dim, at random.

    Picks the stabiliser space first, then a random superspace, so C_Z is its dual.
    """
    rng = rng_from(seed)
    stab = random_subspace(field, n, stab_dim, rng)
    extra = random_subspace(field, n, code_dim, rng)
    while (stab + extra).dim < code_dim:
        extra = random_subspace(field, n, code_dim, rng)
    # shrink stab + extra down to exactly code_dim while keeping stab
    cx = stab
    for row in extra.basis:
        if cx.dim == code_dim:
            break
        cand = cx + Subspace(field, n, row[None, :])
        cx = cand
    return CssCode(cx, stab.perp(), b, name=f"random(seed={seed})")
