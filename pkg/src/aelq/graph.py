"""Regular bipartite graphs with port numbering, spectral expansion and mixing checks."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._common import rng_from
from .errors import InvariantViolation, RetriesExceeded, SpecError

EML_TOL = 1e-9


class BipartiteGraph:
    """d-regular bipartite graph on L = R = {0..n-1}.

    Edge e = l*d + port is the port-th edge of left vertex l; it lands on
    right vertex ``edge_right[e]`` at right port ``edge_rport[e]``.
    """

    def __init__(self, n: int, d: int, edge_right, edge_rport=None, name: str | None = None):
        self.n = int(n)
        self.d = int(d)
        self.name = name
        right = np.asarray(edge_right, dtype=np.int64).reshape(-1)
        if right.size != self.n * self.d:
            raise SpecError("edge list must have n*d entries")
        if right.size and (right.min() < 0 or right.max() >= self.n):
            raise SpecError("right endpoint out of range")
        if np.any(np.bincount(right, minlength=self.n) != self.d):
            raise SpecError("graph is not d-regular on the right")
        if edge_rport is None:
            edge_rport = np.zeros_like(right)
            seen = np.zeros(self.n, dtype=np.int64)
            for e, r in enumerate(right):
                edge_rport[e] = seen[r]
                seen[r] += 1
        rport = np.asarray(edge_rport, dtype=np.int64).reshape(-1)
        right_ports = np.full((self.n, self.d), -1, dtype=np.int64)
        right_ports[right, rport] = np.arange(right.size)
        if np.any(right_ports < 0):
            raise SpecError("right ports are not a permutation of incident edges")
        self.edge_right = right
        self.edge_rport = rport
        self.right_ports = right_ports
        self.left_ports = np.arange(self.n * self.d, dtype=np.int64).reshape(self.n, self.d)
        for a in (self.edge_right, self.edge_rport, self.right_ports, self.left_ports):
            a.setflags(write=False)

    @property
    def n_edges(self) -> int:
        return self.n * self.d

    @property
    def edge_left(self) -> np.ndarray:
        return np.repeat(np.arange(self.n), self.d)

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.edge_left.tolist(), self.edge_right.tolist()))

    @cached_property
    def biadjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=np.int64)
        np.add.at(A, (self.edge_left, self.edge_right), 1)
        return A

    @cached_property
    def _sigma(self) -> tuple[float, float]:
        s = np.linalg.svd(self.biadjacency.astype(float), compute_uv=False)
        s2 = float(s[1]) if len(s) > 1 else 0.0
        if s2 < EML_TOL:
            s2 = 0.0
        return s2, s2 / self.d

    @property
    def lam(self) -> float:
        return self._sigma[1]

    def __repr__(self):
        return f"BipartiteGraph(n={self.n}, d={self.d}, lambda={self.lam:.4f})"

    def to_spec(self) -> dict:
        return {"type": "explicit", "edges": [list(e) for e in self.edges()]}


def graph_complete(n: int) -> BipartiteGraph:
    """K_{n,n}: left port j of vertex l goes to right vertex j."""
    right = np.tile(np.arange(n), n)
    return BipartiteGraph(n, n, right, name=f"K{n},{n}")


def graph_explicit(edges, n: int | None = None) -> BipartiteGraph:
    """Graph from [l, r] pairs; ports follow the order in which edges are listed."""
    E = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(E.max()) + 1 if E.size else 0
    if n == 0 or len(E) % n:
        raise SpecError("edge count must be a multiple of n")
    d = len(E) // n
    order = np.argsort(E[:, 0], kind="stable")
    E = E[order]
    if np.any(np.bincount(E[:, 0], minlength=n) != d):
        raise SpecError("graph is not d-regular on the left")
    return BipartiteGraph(n, d, E[:, 1], name="explicit")


def graph_random_regular(n: int, d: int, seed=0, max_retries: int = 1000) -> BipartiteGraph:
    """Union of d random perfect matchings with no repeated edge.

    Matching k supplies left port k and right port k. A whole-graph restart is
    used when one matching keeps colliding; total permutation draws are capped.
    """
    if not 1 <= d <= n:
        raise SpecError("need 1 <= d <= n")
    rng = rng_from(seed)
    if d == n:
        # the only simple n-regular graph is K_{n,n}; randomise port order by a Latin square
        rows = rng.permutation(n)
        cols = rng.permutation(n)
        right = np.array([[cols[(rows[l] + k) % n] for k in range(d)] for l in range(n)])
        return BipartiteGraph(n, d, right.reshape(-1), np.tile(np.arange(d), n), name=f"random({n},{d})")
    draws = 0
    while True:
        used = np.zeros((n, n), dtype=bool)
        perms = []
        failed = False
        for _ in range(d):
            for _attempt in range(100):
                draws += 1
                if draws > max_retries:
                    raise RetriesExceeded(f"no simple ({n},{d}) graph after {max_retries} draws")
                pi = rng.permutation(n)
                if not used[np.arange(n), pi].any():
                    break
            else:
                failed = True
                break
            used[np.arange(n), pi] = True
            perms.append(pi)
        if not failed:
            break
    right = np.stack(perms, axis=1)  # (n, d): left l, port k -> perms[k][l]
    rport = np.tile(np.arange(d), n)
    return BipartiteGraph(n, d, right.reshape(-1), rport, name=f"random({n},{d})")


def graph_from_spec(spec: dict) -> BipartiteGraph:
    kind = spec.get("type")
    if kind == "complete":
        return graph_complete(int(spec["n"]))
    if kind == "random_regular":
        return graph_random_regular(int(spec["n"]), int(spec["d"]), int(spec.get("seed", 0)))
    if kind == "explicit":
        return graph_explicit(spec["edges"], spec.get("n"))
    raise SpecError(f"unknown graph type {kind!r}")


def sigma2(G: BipartiteGraph) -> tuple[float, float]:
    """(second singular value of the biadjacency matrix, normalised lambda = sigma2/d)."""
    return G._sigma


@dataclass(frozen=True)
class EmlResult:
    residual: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.residual <= self.bound + EML_TOL


def eml_check(G: BipartiteGraph, f, g, *, strict: bool = True) -> EmlResult:
    """|E_edge f(l) g(r) - E f E g| against lambda * ||f|| * ||g|| (expectation norms)."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    edge_avg = float(np.mean(f[G.edge_left] * g[G.edge_right]))
    residual = abs(edge_avg - float(f.mean() * g.mean()))
    bound = G.lam * float(np.sqrt(np.mean(f**2)) * np.sqrt(np.mean(g**2)))
    out = EmlResult(residual, bound)
    if strict and not out.ok:
        raise InvariantViolation(f"mixing lemma violated: {residual} > {bound}")
    return out
