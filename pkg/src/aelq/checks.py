"""Executable invariant suite over built codes, graphs and AEL compositions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._common import rng_from
from .ael import AelCode, ael_distance, certificate_sweep, partial_minimizer
from .duality import DualityMap, trace_duality_map
from .errors import AelqError
from .fqlinalg import matmul, span_vectors
from .gf import FieldSpec, trace
from .graph import BipartiteGraph, eml_check
from .pseudo import (
    Pseudocodeword,
    correlation_round,
    eml_psd_check,
    johnson_list_bound_check,
    random_local_functions,
)

TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    instance: str
    ok: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "instance": self.instance, "ok": self.ok, "detail": self.detail}


def duality_pairing_violations(dmap: DualityMap, limit: int = 1 << 12) -> int:
    """Count pairs (u, v) in F_q^k with <u, v> != <phi_x u, phi_z v>; exhaustive when q^k <= limit."""
    f = dmap.field
    k = dmap.k
    if f.q**k > limit:
        raise ValueError("message space too large for an exhaustive check")
    U = span_vectors(f, np.eye(k, dtype=np.int64)).astype(np.int64)
    X = dmap.apply_x(U)
    Z = dmap.apply_z(U)
    bad = 0
    for s in range(0, len(U), 256):
        lhs = matmul(f, U[s : s + 256], U.T)
        rhs = matmul(f, X[s : s + 256], Z.T)
        bad += int((lhs != rhs).sum())
    return bad


def trace_pairing_violations(ext: FieldSpec, base: FieldSpec | None = None) -> int:
    """Count (x, y) with <to_x(x), to_z(y)> != Tr(xy) over the whole field."""
    base = base or ext.prime_field()
    to_x, to_z = trace_duality_map(ext, base)
    xs = ext.elements()
    A = to_x(xs)
    B = to_z(xs)
    lhs = matmul(base, A, B.T)
    rhs = trace(ext.mul(xs[:, None], xs[None, :]), base, ext)
    return int((lhs != rhs).sum())


def partial_minimizer_violations(code: AelCode, Z: np.ndarray, H: np.ndarray) -> dict:
    """Coset-preserving and monotone failures, plus the two distance identities, over rows of (Z, H)."""
    f = code.field
    psi = partial_minimizer(code, Z, H, check=False)
    Lz = code.left_blocks(Z)
    Lp = code.left_blocks(psi)
    coset_bad = ~code.inner_stab_mask(f.sub(Lp, Lz))
    Rz = code.right_blocks(f.sub(Z, H))
    Rp = code.right_blocks(f.sub(psi, H))
    mono_bad = np.any(Rp != 0, axis=-1) & ~np.any(Rz != 0, axis=-1)
    _, lp_z, _ = code.metric_counts(Z, H)
    l_p, lp_p, _ = code.metric_counts(psi, H)
    return {
        "coset": int(coset_bad.sum()),
        "monotone": int(mono_bad.sum()),
        "perp_preserved": int((lp_z != lp_p).sum()),
        "left_equals_perp": int((l_p != lp_p).sum()),
    }


def random_pairs(code: AelCode, count: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Random z (half uniform, half codeword plus sparse noise) with random h in E_X."""
    rng = rng_from(rng)
    q = code.field.q
    H = np.array([code.random_codeword(rng) for _ in range(count)], dtype=np.int64)
    Z = rng.integers(0, q, size=(count, code.length))
    half = count // 2
    base = np.array([code.random_codeword(rng) for _ in range(half)], dtype=np.int64)
    noise = rng.integers(0, q, size=(half, code.length)) * (rng.random((half, code.length)) < 0.1)
    near = code.field.add(base, noise)
    # also words that share cosets with h on many blocks
    stab = code.inner.cz_perp
    if stab.dim:
        coeffs = rng.integers(0, q, size=(half, code.n, stab.dim))
        shift = matmul(code.field, coeffs, stab.basis).reshape(half, code.length)
        near = np.where(rng.random((half, 1)) < 0.5, near, code.field.add(H[:half], shift))
    Z[:half] = near
    return Z, H


def lambda_crosscheck(G: BipartiteGraph) -> float:
    """|lambda - second eigenvalue of the full 2n x 2n adjacency / d|."""
    n = G.n
    A = np.zeros((2 * n, 2 * n))
    A[:n, n:] = G.biadjacency
    A[n:, :n] = G.biadjacency.T
    ev = np.sort(np.abs(np.linalg.eigvalsh(A)))[::-1]
    # eigenvalues come in +/- pairs: the top two absolute values are +-d
    second = ev[2] if len(ev) > 2 else 0.0
    return abs(second / G.d - G.lam)


def coset_pair_certificates(code: AelCode, cap=None, limit: int = 4096) -> tuple[int, float]:
    """Certificate for every pair of distinct coset representatives (up to ``limit`` reps)."""
    words = code.codewords_x(cap).astype(np.int64)
    reps = np.unique(code.coset_rep(words), axis=0)[:limit]
    worst = math.inf
    pairs = 0
    zero = np.zeros(code.length, dtype=np.int64)
    for i in range(len(reps)):
        diff = code.field.sub(reps[i + 1 :], reps[i][None, :])
        if not len(diff):
            continue
        _, lp, r = code.metric_counts(diff, zero)
        m = lp > 0
        pairs += int(m.sum())
        if m.any():
            bound = float(code.delta_in) - code.lam * code.n / lp[m]
            worst = min(worst, float((r[m] / code.n - bound).min()))
    if pairs == 0:
        worst = 0.0
    return pairs, worst


def random_pseudocodeword(code: AelCode, rng, size: int | None = None, cap=None) -> Pseudocodeword:
    rng = rng_from(rng)
    words = code.codewords_x(cap)
    size = size or int(rng.integers(2, min(6, len(words)) + 1))
    idx = rng.choice(len(words), size=min(size, len(words)), replace=False)
    w = rng.random(len(idx)) + 0.05
    return Pseudocodeword(code, words[idx], w / w.sum(), check=False)


def run_suite(instances: dict, graphs: dict | None = None, *, seed: int = 0, samples: int = 200, cap=None) -> list[CheckResult]:
    """All property checks on every named AEL instance (and extra graphs)."""
    rng = np.random.default_rng(seed)
    out: list[CheckResult] = []

    def record(name, inst, fn):
        try:
            ok, detail = fn()
        except AelqError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, inst, bool(ok), str(detail)))

    all_graphs = dict(graphs or {})
    for name, code in instances.items():
        all_graphs.setdefault(f"{name}.graph", code.graph)
        record("dual_space_identity", name, lambda c=code: (c.check_dual_identity(), "exact RREF equality"))
        record(
            "duality_maps",
            name,
            lambda c=code: (lambda v: (v == 0, f"{v} violations"))(duality_pairing_violations(c.maps)),
        )

        def pm(c=code):
            Z, H = random_pairs(c, samples, rng)
            v = partial_minimizer_violations(c, Z, H)
            return sum(v.values()) == 0, v

        record("partial_minimizer", name, pm)

        def dist(c=code):
            rep = ael_distance(c, cap)
            sweep = certificate_sweep(c, cap)
            pairs, worst = coset_pair_certificates(c, cap)
            ok = rep.ok and sweep["ok"] and worst >= -TOL
            return ok, f"delta_R={rep.delta_R} bound={rep.bound} pairs={pairs} min_margin={worst:.4g}"

        record("distance", name, dist)

        def cover(c=code):
            words = c.codewords_x(cap)
            g = c.field.add(words[int(rng.integers(len(words)))], (rng.random(c.length) < 0.05).astype(np.int64) * rng.integers(1, c.field.q, size=c.length))
            rep = johnson_list_bound_check(c, g, cap=cap)
            return rep.ok, f"list={rep.list_size} bound={rep.bound} covering_max={rep.covering_max}"

        record("johnson_covering", name, cover)

        def corr(c=code):
            P = random_pseudocodeword(c, rng, cap=cap)
            reps = [correlation_round(P, eta, seed=seed) for eta in (0.1, 0.05)]
            return all(r.ok for r in reps), f"u*={[r.u_star for r in reps]}"

        record("correlation_rounding", name, corr)

        def psd(c=code):
            worst = math.inf
            for _ in range(10):
                P = random_pseudocodeword(c, rng, cap=cap)
                X = random_local_functions(P, rng, "L")
                Y = random_local_functions(P, rng, "R")
                r = eml_psd_check(P, X, Y)
                worst = min(worst, r.min_eigenvalue)
            return True, f"min eigenvalue {worst:.3g}"

        record("eml_pseudoexpectation", name, psd)

    for gname, G in all_graphs.items():
        record("lambda_matches_sigma2", gname, lambda G=G: (lambda e: (e <= 1e-9, f"diff {e:.2g}"))(lambda_crosscheck(G)))

        def eml(G=G):
            worst = 0.0
            for _ in range(samples):
                r = eml_check(G, rng.normal(size=G.n), rng.normal(size=G.n))
                worst = max(worst, r.residual - r.bound)
            return True, f"max residual-bound {worst:.3g}"

        record("scalar_eml", gname, eml)
    return out
