"""Pseudocodewords backed by explicit distributions over E_X.

A genuine distribution over codewords is a pseudoexpectation of every
degree, so every operation here is an exact finite sum over the support.
Local variables are the left blocks Z_l (contiguous in left layout), the
right blocks Z_r (gathered through ``right_index``) and single edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import combinations

import numpy as np

from ._common import below, rng_from
from .ael import AelCode, ael_distance, pack_blocks
from .errors import (
    BudgetExceeded,
    EmptyPromise,
    InvariantViolation,
    IterationCapExceeded,
    NotInCode,
    ZeroProbabilityEvent,
)

TOL = 1e-9
PSD_TOL = 1e-8
EXACT_CONDITIONINGS = 10**6
MC_SAMPLES = 200


def _class_ids(keys: np.ndarray) -> tuple[np.ndarray, int]:
    """Per column, dense ids of the distinct keys; returns (ids, max class count)."""
    ids = np.empty(keys.shape, dtype=np.int64)
    width = 1
    for j in range(keys.shape[1]):
        _, inv = np.unique(keys[:, j], return_inverse=True)
        ids[:, j] = inv
        width = max(width, int(inv.max()) + 1 if len(inv) else 1)
    return ids, width


@dataclass(frozen=True)
class LocalMarginal:
    """Distribution of Z_M: distinct restrictions (rows) and their probabilities."""

    edges: tuple
    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        if np.any(self.probs < -TOL) or abs(float(self.probs.sum()) - 1) > 1e-12 * max(1, len(self.probs)):
            raise InvariantViolation("local marginal is not a distribution")


class Pseudocodeword:
    """Exact distribution over E_X: support words in left layout with weights."""

    degree = math.inf

    def __init__(self, code: AelCode, support, weights, *, check: bool = True):
        S = np.atleast_2d(np.asarray(support, dtype=np.int64))
        w = np.asarray(weights, dtype=float).reshape(-1)
        if S.shape != (len(w), code.length):
            raise ValueError("support and weights disagree in shape")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        total = float(w.sum())
        if abs(total - 1) > 1e-9:
            raise ValueError(f"weights sum to {total}, not 1")
        keep = w > 0
        S, w = S[keep], w[keep] / total
        if check and len(S) and not np.all(code.ex.contains(S)):
            raise NotInCode("support word outside E_X")
        # merge repeated words, canonical row order
        uniq, inv = np.unique(S, axis=0, return_inverse=True)
        merged = np.zeros(len(uniq))
        np.add.at(merged, inv.reshape(-1), w)
        self.code = code
        self.support = uniq
        self.weights = merged
        self.support.setflags(write=False)
        self.weights.setflags(write=False)

    @classmethod
    def point(cls, code: AelCode, h) -> "Pseudocodeword":
        return cls(code, np.asarray(h)[None, :], [1.0])

    @classmethod
    def uniform(cls, code: AelCode, words) -> "Pseudocodeword":
        words = np.atleast_2d(words)
        return cls(code, words, np.full(len(words), 1 / len(words)))

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        return f"Pseudocodeword(support={len(self)}, n={self.code.n})"

    # local structure

    @cached_property
    def left_keys(self) -> np.ndarray:
        return self.code.left_keys(self.support)

    @cached_property
    def right_keys(self) -> np.ndarray:
        return self.code.right_keys(self.support)

    @cached_property
    def _left_ids(self):
        return _class_ids(self.left_keys)

    @cached_property
    def _right_ids(self):
        return _class_ids(self.right_keys)

    @cached_property
    def edge_values(self) -> np.ndarray:
        return self.code.edge_symbols(self.support)

    def expect(self, values) -> float:
        return float(self.weights @ np.asarray(values, dtype=float))

    def marginal(self, edges) -> LocalMarginal:
        edges = tuple(int(e) for e in np.atleast_1d(edges))
        vals = self.edge_values[:, list(edges)]
        uniq, inv = np.unique(vals, axis=0, return_inverse=True)
        p = np.zeros(len(uniq))
        np.add.at(p, inv.reshape(-1), self.weights)
        return LocalMarginal(edges, uniq, p)

    def left_edges(self, l: int) -> np.ndarray:
        return self.code.graph.left_ports[l]

    def right_edges(self, r) -> np.ndarray:
        return self.code.graph.right_ports[np.atleast_1d(r)].reshape(-1)

    # distances to a codeword

    def _counts(self, h):
        a, b, c = self.code.metric_counts(self.support, np.asarray(h, dtype=np.int64))
        return a, b, c

    def delta_L(self, h) -> float:
        return self.expect(self._counts(h)[0]) / self.code.n

    def delta_L_perp(self, h) -> float:
        return self.expect(self._counts(h)[1]) / self.code.n

    def delta_R(self, h) -> float:
        return self.expect(self._counts(h)[2]) / self.code.n

    def psi(self) -> float:
        """||E chi(Z)||^2 = (1/n) sum_r sum_sigma P(Z_r = sigma)^2."""
        ids, width = self._right_ids
        n = self.code.n
        P = np.zeros((n, width))
        np.add.at(P, (np.broadcast_to(np.arange(n), ids.shape), ids), self.weights[:, None])
        return float((P**2).sum() / n)

    def to_json(self) -> dict:
        return {"support": self.support.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_json(cls, code: AelCode, data: dict) -> "Pseudocodeword":
        return cls(code, data["support"], data["weights"])


def pexp_eval(P: Pseudocodeword, mu, edges) -> float:
    """E~[mu(Z)] for mu depending only on the edges listed (mu gets an (N, |M|) array)."""
    edges = np.atleast_1d(np.asarray(edges, dtype=np.int64))
    vals = P.edge_values[:, edges]
    return P.expect(np.asarray(mu(vals), dtype=float))


def condition(P: Pseudocodeword, edges, sigma) -> Pseudocodeword:
    """P conditioned on Z_M = sigma (edge symbols)."""
    edges = np.atleast_1d(np.asarray(edges, dtype=np.int64))
    sigma = np.asarray(sigma, dtype=np.int64).reshape(-1)
    hit = np.all(P.edge_values[:, edges] == sigma, axis=1)
    mass = float(P.weights[hit].sum())
    if mass <= 0:
        raise ZeroProbabilityEvent("conditioning event has probability zero")
    return Pseudocodeword(P.code, P.support[hit], P.weights[hit] / mass, check=False)


def _pieces(P: Pseudocodeword, U) -> list[tuple[float, np.ndarray]]:
    """Conditionings on Z_{N(U)}: (probability, support row mask) per outcome sigma."""
    U = list(U)
    if not U:
        return [(1.0, np.ones(len(P), dtype=bool))]
    ids = P._right_ids[0][:, U]
    _, inv = np.unique(ids, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    out = []
    for g in range(int(inv.max()) + 1):
        m = inv == g
        out.append((float(P.weights[m].sum()), m))
    return out


@dataclass(frozen=True)
class PairStats:
    avg_cov: float
    mean_var: float
    mean_cond_var: float
    cov: np.ndarray = dc_field(repr=False, compare=False)


def _pair_stats(w: np.ndarray, left_ids: np.ndarray, right_ids: np.ndarray) -> PairStats:
    """Covariances, variances and conditional variances over all (l, r) pairs."""
    w = w / w.sum()
    n = left_ids.shape[1]
    A = int(left_ids.max()) + 1
    B = int(right_ids.max()) + 1
    cols = np.arange(n)
    pr = np.zeros((n, B))
    np.add.at(pr, (np.broadcast_to(cols, right_ids.shape), right_ids), w[:, None])
    cov = np.zeros((n, n))
    var = np.zeros(n)
    cvar = np.zeros((n, n))
    for l in range(n):
        J = np.zeros((n, A, B))
        rows = np.broadcast_to(left_ids[:, l : l + 1], right_ids.shape)
        np.add.at(J, (np.broadcast_to(cols, right_ids.shape), rows, right_ids), w[:, None])
        pl = J[0].sum(axis=1)
        cov[l] = np.abs(J - pl[None, :, None] * pr[:, None, :]).sum(axis=(1, 2))
        var[l] = 1 - float((pl**2).sum())
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(pr[:, None, :] > 0, J**2 / pr[:, None, :], 0.0)
        cvar[l] = 1 - ratio.sum(axis=(1, 2))
    return PairStats(float(cov.mean()), float(var.mean()), float(cvar.mean()), cov)


def pair_stats(P: Pseudocodeword) -> PairStats:
    return _pair_stats(np.asarray(P.weights), P._left_ids[0], P._right_ids[0])


def pseudo_cov(P: Pseudocodeword, l: int, r: int) -> float:
    """sum_{a,b} |P(Z_l=a, Z_r=b) - P(Z_l=a) P(Z_r=b)|."""
    return float(pair_stats(P).cov[l, r])


def avg_cov(P: Pseudocodeword) -> float:
    return pair_stats(P).avg_cov


def pseudo_var(P: Pseudocodeword, side: str, v: int) -> float:
    ids = (P._left_ids if side == "L" else P._right_ids)[0][:, v]
    p = np.bincount(ids, weights=P.weights)
    return 1 - float((p**2).sum())


# functions local to one neighbourhood

def local_function(table: dict, q: int, default: float = 0.0):
    """Callable on (N, width) block arrays looking values up by packed block key."""

    def f(blocks):
        keys = pack_blocks(blocks, q)
        return np.array([table.get(int(k), default) for k in keys], dtype=float)

    return f


def random_local_functions(P: Pseudocodeword, rng, side: str = "L", low: float = -1.0, high: float = 1.0):
    """Random bounded functions, one per vertex, on the values the support takes there."""
    rng = rng_from(rng)
    keys = P.left_keys if side == "L" else P.right_keys
    fs = []
    for v in range(P.code.n):
        uniq = np.unique(keys[:, v])
        table = dict(zip(uniq.tolist(), rng.uniform(low, high, size=len(uniq)).tolist()))
        fs.append(local_function(table, P.code.field.q))
    return fs


def _eval_local(P: Pseudocodeword, X, Y):
    code = P.code
    L = code.left_blocks(P.support)
    R = code.right_blocks(P.support)
    XV = np.stack([np.asarray(X[l](L[:, l, :]), dtype=float) for l in range(code.n)], axis=1)
    YV = np.stack([np.asarray(Y[r](R[:, r, :]), dtype=float) for r in range(code.n)], axis=1)
    return XV, YV


@dataclass(frozen=True)
class ProductBoundReport:
    lhs: float
    rhs: float
    eta: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def ok(self) -> bool:
        return self.margin >= -TOL


def eta_good_product_bound(P: Pseudocodeword, X, Y, *, strict: bool = True) -> ProductBoundReport:
    """E_{l,r} E~[X_l Y_r] <= E_{l,r} E~[X_l] E~[Y_r] + eta max|X| max|Y| with eta = avg_cov(P)."""
    XV, YV = _eval_local(P, X, Y)
    w = np.asarray(P.weights)
    lhs = float(w @ (XV.mean(axis=1) * YV.mean(axis=1)))
    rhs_prod = float((w @ XV).mean() * (w @ YV).mean())
    eta = avg_cov(P)
    rhs = rhs_prod + eta * float(np.abs(XV).max(initial=0)) * float(np.abs(YV).max(initial=0))
    rep = ProductBoundReport(lhs, rhs, eta)
    if strict and not rep.ok:
        raise InvariantViolation(f"eta-good product bound fails: {lhs} > {rhs}")
    return rep


@dataclass(frozen=True)
class EmlPsdReport:
    min_eigenvalue: float
    discrepancy: float
    bound: float
    lam: float

    @property
    def psd_ok(self) -> bool:
        return self.min_eigenvalue >= -PSD_TOL

    @property
    def eml_ok(self) -> bool:
        return self.discrepancy <= self.bound + TOL

    @property
    def ok(self) -> bool:
        return self.psd_ok and self.eml_ok


def eml_psd_check(P: Pseudocodeword, X, Y, lam: float | None = None, *, strict: bool = True) -> EmlPsdReport:
    """Moment matrix of (X_1..X_n, Y_1..Y_n) is PSD and the mixing bound holds under E~."""
    G = P.code.graph
    lam = G.lam if lam is None else lam
    XV, YV = _eval_local(P, X, Y)
    V = np.concatenate([XV, YV], axis=1)
    M = (V * P.weights[:, None]).T @ V
    n = G.n
    XY = M[:n, n:]
    edge_avg = float(XY[G.edge_left, G.edge_right].mean())
    disc = abs(edge_avg - float(XY.mean()))
    bound = lam * math.sqrt(max(float(np.diag(M)[:n].mean()), 0.0)) * math.sqrt(max(float(np.diag(M)[n:].mean()), 0.0))
    rep = EmlPsdReport(float(np.linalg.eigvalsh((M + M.T) / 2).min()), disc, bound, lam)
    if strict and not rep.ok:
        raise InvariantViolation(f"pseudoexpectation mixing check fails: {rep}")
    return rep


# correlation rounding

def distinct_count_distribution(n: int, u: int) -> np.ndarray:
    """P(|{r_1..r_u}| = j) for u independent uniform draws from n vertices."""
    p = np.zeros(n + 1)
    p[0] = 1.0
    for _ in range(u):
        p = step_distinct(p, n)
    return p


def step_distinct(p: np.ndarray, n: int) -> np.ndarray:
    j = np.arange(n + 1)
    out = p * (j / n)
    out[1:] += p[:-1] * ((n - j[:-1]) / n)
    return out


@dataclass
class CorrelationReport:
    u_star: int
    bound: int
    eta: float
    mode: str
    seed: int | None
    cov_by_u: list
    var_by_u: list
    lemma_checks: int
    lemma_min_margin: float
    chain_min_margin: float

    @property
    def ok(self) -> bool:
        return self.u_star <= self.bound and self.lemma_min_margin >= -TOL and self.chain_min_margin >= -TOL

    def to_dict(self) -> dict:
        return dict(self.__dict__)


class _SetStats:
    """f(S) = E_sigma avg_cov(P | Z_{N(S)} = sigma) and v(S) the matching mean variance."""

    def __init__(self, P: Pseudocodeword, s3d: float):
        self.P = P
        self.s3d = s3d
        self.cache: dict = {}
        self.lemma_checks = 0
        self.lemma_min = math.inf
        self.left_ids = P._left_ids[0]
        self.right_ids = P._right_ids[0]

    def get(self, S: frozenset):
        if S in self.cache:
            return self.cache[S]
        f = v = cv = 0.0
        for mass, m in _pieces(self.P, sorted(S)):
            st = _pair_stats(np.asarray(self.P.weights)[m], self.left_ids[m], self.right_ids[m])
            # the per-step variance-decrease lemma on this piece
            margin = st.mean_var - st.avg_cov**2 / self.s3d - st.mean_cond_var
            self.lemma_checks += 1
            self.lemma_min = min(self.lemma_min, margin)
            f += mass * st.avg_cov
            v += mass * st.mean_var
            cv += mass * st.mean_cond_var
        self.cache[S] = (f, v, cv)
        return self.cache[S]


def correlation_round(P: Pseudocodeword, eta: float, *, seed=0, max_u: int | None = None) -> CorrelationReport:
    """Smallest u with E_{r_1..r_u} E_sigma avg_cov(P | Z_{N(r_1..r_u)}) <= eta.

    r_1..r_u are independent uniform right vertices, so the conditioning set is
    their distinct values. With few enough conditionings every subset is
    evaluated exactly and averaged by the law of |set|; otherwise each u uses
    MC_SAMPLES sampled sets (seeded).
    """
    code = P.code
    n = code.n
    s3d = float(code.s) ** (3 * code.d)
    bound = math.ceil(s3d / eta**2)
    limit = bound if max_u is None else min(bound, max_u)
    stats = _SetStats(P, s3d)
    exact = (2**n) * max(len(P), 1) <= EXACT_CONDITIONINGS
    covs, vars_ = [], []
    chain_min = math.inf
    if exact:
        by_size_f = np.zeros(n + 1)
        by_size_v = np.zeros(n + 1)
        for j in range(n + 1):
            vals = [stats.get(frozenset(S)) for S in combinations(range(n), j)]
            by_size_f[j] = float(np.mean([x[0] for x in vals]))
            by_size_v[j] = float(np.mean([x[1] for x in vals]))
        p = np.zeros(n + 1)
        p[0] = 1.0
        u = 0
        while True:
            C = float(p @ by_size_f)
            V = float(p @ by_size_v)
            if vars_:
                chain_min = min(chain_min, vars_[-1] - covs[-1] ** 2 / s3d - V)
            covs.append(C)
            vars_.append(V)
            if C <= eta + TOL:
                break
            if u >= limit:
                raise BudgetExceeded(f"no u <= {limit} reaches average covariance {eta}")
            p = step_distinct(p, n)
            u += 1
        mode, rep_seed = "exact", None
    else:
        rng = rng_from(seed)
        u = 0
        while True:
            sets = [frozenset(rng.integers(0, n, size=u).tolist()) for _ in range(MC_SAMPLES)]
            vals = [stats.get(S) for S in sets]
            C = float(np.mean([x[0] for x in vals]))
            covs.append(C)
            vars_.append(float(np.mean([x[1] for x in vals])))
            # exact one-step chain on each sampled set: E_r v(S + r) <= v(S) - f(S)^2 / s^3d
            for S, (f, v, _) in zip(sets[:5], vals[:5]):
                nxt = float(np.mean([stats.get(S | {r})[1] for r in range(n)]))
                chain_min = min(chain_min, v - f**2 / s3d - nxt)
            if C <= eta + TOL:
                break
            if u >= limit:
                raise BudgetExceeded(f"no u <= {limit} reaches average covariance {eta}")
            u += 1
        mode, rep_seed = "monte_carlo", seed
    rep = CorrelationReport(
        u_star=u,
        bound=bound,
        eta=eta,
        mode=mode,
        seed=rep_seed,
        cov_by_u=covs,
        var_by_u=vars_,
        lemma_checks=stats.lemma_checks,
        lemma_min_margin=stats.lemma_min,
        chain_min_margin=chain_min if chain_min < math.inf else 0.0,
    )
    if not rep.ok:
        raise InvariantViolation(f"correlation rounding checks fail: {rep}")
    return rep


# covering

def theta_star(psi: float, c: float) -> float:
    """Mixing weight minimising the quadratic bound on the new Psi."""
    return (psi - c) / (psi - 2 * c + 1)


def johnson_radius(delta) -> float:
    return 1 - math.sqrt(1 - float(delta))


@dataclass(frozen=True)
class CoveringStep:
    index: int
    agreement: float
    theta: float
    psi_before: float
    psi_predicted: float
    psi_after: float


@dataclass
class CoveringResult:
    pseudocodeword: Pseudocodeword
    psi_history: list
    steps: list
    covered: np.ndarray
    alpha: float
    eps: float

    @property
    def c(self) -> float:
        return self.alpha**2 + 2 * self.alpha * self.eps

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "eps": self.eps,
            "iterations": len(self.steps),
            "psi_history": self.psi_history,
            "support_size": len(self.pseudocodeword),
        }


def _agreement_counts(keys: np.ndarray, row: np.ndarray) -> np.ndarray:
    return (keys == row[None, :]).sum(axis=1)


def covering_optimize(code: AelCode, g, alpha: float, eps: float, *, max_iters: int | None = None, cap=None) -> CoveringResult:
    """Mix codewords into a distribution that is close to every codeword near g.

    H = {h in E_X : Delta_R(g, h) < 1 - alpha - eps}. Starting from the point
    mass on the codeword nearest g, repeatedly take the h in H with the least
    agreement <E chi, chi(h)> <= alpha^2 + 2 alpha eps and mix it in with
    weight theta*; Psi strictly decreases at each step.
    """
    words = code.codewords_x(cap)
    keys = code.right_keys(words)
    n = code.n
    g = np.asarray(g, dtype=np.int64)
    gk = code.right_keys(g)
    agree_g = _agreement_counts(keys, gk)
    tau = 1 - alpha - eps
    in_H = (n - agree_g) < tau * n
    if not in_H.any():
        raise EmptyPromise(f"no codeword within {tau} of g")
    h0 = int(np.argmax(agree_g))
    c = alpha**2 + 2 * alpha * eps
    max_iters = 10 * len(words) if max_iters is None else max_iters

    w = np.zeros(len(words))
    w[h0] = 1.0
    A = _agreement_counts(keys, keys[h0]) / n  # <E chi, chi(h)> for every h
    psi = float(w @ A)
    history = [psi]
    steps = []
    for it in range(max_iters + 1):
        viol = np.flatnonzero(in_H & (A <= c + TOL))
        if not len(viol):
            break
        if it == max_iters:
            raise IterationCapExceeded(
                f"covering did not converge in {max_iters} steps", residual=words[viol].tolist()
            )
        h = int(viol[np.argmin(A[viol])])
        a_h = float(A[h])
        theta = theta_star(psi, c)
        predicted = (1 - theta) ** 2 * psi + 2 * theta * (1 - theta) * a_h + theta**2
        w *= 1 - theta
        w[h] += theta
        A = (1 - theta) * A + theta * _agreement_counts(keys, keys[h]) / n
        P = Pseudocodeword(code, words[w > 0], w[w > 0] / w.sum(), check=False)
        actual = P.psi()
        if abs(actual - predicted) > TOL or not actual < psi:
            raise InvariantViolation(f"covering step {it}: Psi {psi} -> {actual}, predicted {predicted}")
        steps.append(CoveringStep(h, a_h, theta, psi, predicted, actual))
        psi = actual
        history.append(psi)
    P = Pseudocodeword(code, words[w > 0], w[w > 0] / w.sum(), check=False)
    if not float(w @ agree_g) / n > alpha + eps - TOL:
        raise InvariantViolation("covering output lost agreement with g")
    return CoveringResult(P, history, steps, words[in_H], alpha, eps)


def ael_list(code: AelCode, g, tau, cap=None) -> np.ndarray:
    """Canonical representatives of the cosets of E_Z^perp meeting the open ball B_R(g, tau)."""
    words = code.codewords_x(cap)
    d = code.n - _agreement_counts(code.right_keys(words), code.right_keys(np.asarray(g, dtype=np.int64)))
    hits = words[below(d, code.n, tau)].astype(np.int64)
    if not len(hits):
        return np.zeros((0, code.length), dtype=np.int64)
    return np.unique(code.coset_rep(hits), axis=0)


@dataclass
class JohnsonReport:
    delta: float
    radius: float
    list_size: int
    bound: int
    covering_checked: int
    covering_max: float | None
    covering_limit: float | None

    @property
    def ok(self) -> bool:
        cov_ok = self.covering_max is None or self.covering_max < self.covering_limit
        return self.list_size <= self.bound and cov_ok

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def johnson_list_bound_check(code: AelCode, g, delta=None, *, cap=None, covering: bool = True, strict: bool = True) -> JohnsonReport:
    """List size at radius J(delta) against s^d n + 1, plus the covering distribution check."""
    if delta is None:
        delta = ael_distance(code, cap).delta_R
    radius = johnson_radius(delta)
    g = np.asarray(g, dtype=np.int64)
    lst = ael_list(code, g, radius, cap)
    bound = code.s**code.d * code.n + 1
    checked, worst, limit = 0, None, None
    if covering and len(lst):
        alpha = math.sqrt(1 - float(delta))
        # the largest achievable distance k/n strictly below the radius
        k = math.ceil(radius * code.n) - 1
        eps = (radius - k / code.n) / 2
        res = covering_optimize(code, g, alpha, eps, cap=cap)
        P = res.pseudocodeword
        limit = 1 - alpha**2
        dists = [P.delta_R(h) for h in res.covered]
        checked, worst = len(dists), max(dists)
    rep = JohnsonReport(float(delta), radius, len(lst), bound, checked, worst, limit)
    if strict and not rep.ok:
        raise InvariantViolation(f"Johnson-type bound fails: {rep}")
    return rep
