"""List decoding of AEL-amplified codes.

Pipeline per received word g: covering distribution over E_X, random (or
exhaustive) conditioning on right neighbourhoods, rounding every left block
to an outer symbol through the local inverse, outer unique decoding, and
lifting the outer coset back to a coset of E_Z^perp.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations, product

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._common import as_fraction, below, resolve_cap, rng_from
from .ael import AelCode, pack_blocks, partial_minimizer
from .css import CssCode
from .errors import CapExceeded, EmptyPromise, InvariantViolation, SameCoset, SpecError
from .pseudo import Pseudocodeword, _pieces, ael_list, avg_cov, covering_optimize, johnson_radius, step_distinct

TOL = 1e-9
TABLE_LIMIT = 1 << 22
PRODUCT_LIMIT = 1 << 16
LOOP_LIMIT = 10**5
MC_ROUNDINGS = 4096


# parameters

def repetition_count(p: float, gamma: float) -> int:
    """Smallest M with (1/p) exp(-p M) <= gamma."""
    if not (0 < p < 1 and 0 < gamma < 1):
        raise ValueError("need 0 < p < 1 and 0 < gamma < 1")
    return math.ceil((math.log(1 / gamma) + math.log(1 / p)) / p)


def eta_value(eps: float, delta_dec, delta_in) -> float:
    return eps**2 * float(delta_dec) / (16 * float(delta_in))


def success_probability(eps: float, delta_dec, delta_in, s: int, d: int) -> float:
    return float(delta_dec) ** 2 * eps**6 / (4096 * float(s) ** (3 * d) * float(delta_in) ** 4)


@dataclass(frozen=True)
class DecodeParams:
    eps: float
    gamma: float
    delta_in: Fraction
    delta_dec: Fraction
    lam: float
    s: int
    d: int
    n: int
    seed: int = 0
    repetitions: int | None = None

    @classmethod
    def for_code(cls, code: AelCode, eps: float, gamma: float = 0.1, delta_dec=None, seed: int = 0, repetitions=None):
        if delta_dec is None:
            if code.delta_out is None:
                raise SpecError("outer code has no distance; give delta_dec")
            delta_dec = code.delta_out / 2
        return cls(float(eps), float(gamma), code.delta_in, as_fraction(delta_dec), code.lam, code.s, code.d, code.n, seed, repetitions)

    @property
    def delta(self) -> float:
        """Distance the decoder can certify: delta_in - lambda / delta_dec."""
        return float(self.delta_in) - self.lam / float(self.delta_dec)

    @property
    def alpha(self) -> float:
        return math.sqrt(1 - self.delta)

    @property
    def tau(self) -> float:
        return johnson_radius(self.delta) - self.eps

    @property
    def eta(self) -> float:
        return eta_value(self.eps, self.delta_dec, self.delta_in)

    @property
    def p(self) -> float:
        return success_probability(self.eps, self.delta_dec, self.delta_in, self.s, self.d)

    @property
    def M(self) -> int:
        return self.repetitions if self.repetitions is not None else repetition_count(self.p, self.gamma)

    @property
    def M_original(self) -> float:
        """ln(1/gamma) / (p ln p), recorded for comparison; negative for p < 1."""
        return math.log(1 / self.gamma) / (self.p * math.log(self.p))

    @property
    def u_max(self) -> int:
        return max(1, math.floor(float(self.s) ** (3 * self.d) / self.eta**2))

    def validate(self) -> None:
        if not 0 < self.eps < 1 or not 0 < self.gamma < 1:
            raise SpecError("eps and gamma must lie in (0, 1)")
        if self.tau <= 0:
            raise SpecError(f"decoding radius {self.tau} is not positive")

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "gamma": self.gamma,
            "delta_in": str(self.delta_in),
            "delta_dec": str(self.delta_dec),
            "lambda": self.lam,
            "s": self.s,
            "d": self.d,
            "n": self.n,
            "delta": self.delta,
            "alpha": self.alpha,
            "tau": self.tau,
            "eta": self.eta,
            "p": self.p,
            "M": self.M,
            "M_original": self.M_original,
            "u_max": self.u_max,
            "seed": self.seed,
        }


# outer decoder

class OuterDecoder(BaseEstimator):
    """Exact nearest-coset decoder for the outer code, by enumerating D_X.

    Symbols are integers in [0, q^b): the base-q value of a length-b block.
    Decoding succeeds when some codeword is within floor(delta_dec * n)
    blocks; ties go to the lexicographically first codeword.
    """

    def __init__(self, delta_dec=None, cap=None):
        self.delta_dec = delta_dec
        self.cap = cap

    def fit(self, code: CssCode, y=None):
        self.code_ = code
        n, b, q = code.n_blocks, code.b, code.field.q
        delta_dec = self.delta_dec if self.delta_dec is not None else code.distance.delta / 2
        self.radius_ = math.floor(as_fraction(delta_dec) * n)
        words = code.cx.vectors(resolve_cap(self.cap)).astype(np.int64)
        self.words_ = words
        self.keys_ = pack_blocks(words.reshape(len(words), n, b), q)
        reps = code.cz_perp.reduce(words)
        uniq, inv = np.unique(reps, axis=0, return_inverse=True)
        self.cosets_ = uniq
        self.coset_of_ = inv.reshape(-1)
        self.t_ = q**b
        self.table_ = None
        if self.t_**n <= TABLE_LIMIT and self.t_**n * len(words) <= 1 << 26:
            self.table_ = self._brute(self._all_words())
        return self

    def _all_words(self) -> np.ndarray:
        n = self.code_.n_blocks
        idx = np.arange(self.t_**n, dtype=np.int64)
        return (idx[:, None] // (self.t_ ** np.arange(n, dtype=np.int64))) % self.t_

    def _brute(self, Y: np.ndarray) -> np.ndarray:
        out = np.empty(len(Y), dtype=np.int64)
        for start in range(0, len(Y), 4096):
            chunk = Y[start : start + 4096]
            dist = (chunk[:, None, :] != self.keys_[None, :, :]).sum(axis=2)
            best = np.argmin(dist, axis=1)
            ok = dist[np.arange(len(chunk)), best] <= self.radius_
            out[start : start + 4096] = np.where(ok, self.coset_of_[best], -1)
        return out

    def predict(self, Y) -> np.ndarray:
        """Coset index per row of symbols, -1 when nothing is within the radius."""
        check_is_fitted(self, "keys_")
        Y = np.atleast_2d(np.asarray(Y, dtype=np.int64))
        if self.table_ is not None:
            n = self.code_.n_blocks
            return self.table_[Y @ (self.t_ ** np.arange(n, dtype=np.int64))]
        return self._brute(Y)

    def symbols(self, y) -> np.ndarray:
        """Folded vector(s) over F_q to block symbols."""
        y = np.asarray(y, dtype=np.int64)
        c = self.code_
        return pack_blocks(y.reshape(y.shape[:-1] + (c.n_blocks, c.b)), c.field.q)


def outer_unique_decode(D: CssCode, y, delta_dec=None, *, decoder: OuterDecoder | None = None):
    """Representative of the coset of D_Z^perp within delta_dec of y, or None."""
    dec = decoder if decoder is not None else OuterDecoder(delta_dec).fit(D)
    idx = int(dec.predict(dec.symbols(y)[None, :])[0])
    return None if idx < 0 else dec.cosets_[idx]


# reports

@dataclass
class DecodeReport:
    method: str
    cosets: np.ndarray
    params: dict
    stats: dict = dc_field(default_factory=dict)
    trace: list = dc_field(default_factory=list)
    oracle: np.ndarray | None = None
    exhaustive: bool = True
    wall_time: float = 0.0

    def keys(self) -> set:
        return {row.astype(np.int64).tobytes() for row in self.cosets}

    def contains_list(self, reps) -> bool:
        return {np.asarray(r, dtype=np.int64).tobytes() for r in reps} <= self.keys()

    @property
    def success(self) -> bool | None:
        return None if self.oracle is None else self.contains_list(self.oracle)

    def to_dict(self, include_time: bool = False) -> dict:
        out = {
            "method": self.method,
            "list_size": len(self.cosets),
            "cosets": self.cosets.tolist(),
            "params": self.params,
            "stats": self.stats,
            "exhaustive": self.exhaustive,
            "trace": self.trace,
        }
        if self.oracle is not None:
            out["oracle_size"] = len(self.oracle)
            out["success"] = self.success
        if include_time:
            out["wall_time"] = self.wall_time
        return out


# shared machinery

class _Context:
    """Everything that depends on the code but not on the received word."""

    def __init__(self, code: AelCode, params: DecodeParams, cap=None, outer: OuterDecoder | None = None):
        self.code = code
        self.params = params
        self.cap = cap
        self.outer = outer if outer is not None else OuterDecoder(params.delta_dec, cap).fit(code.outer)
        self._lifted: dict[int, np.ndarray] = {}
        self.check_lifting()

    def check_lifting(self) -> None:
        """phi_X(D_Z^perp) and F^n (x) C_Z^perp both sit inside E_Z^perp."""
        code = self.code
        if not code.lift.image_x(code.outer.cz_perp) <= code.ez_perp:
            raise InvariantViolation("lifted outer stabilisers are not in E_Z^perp")
        inner = code.inner.cz_perp
        if inner.dim:
            from .ael import tensor_subspace

            if not tensor_subspace(inner, code.n) <= code.ez_perp:
                raise InvariantViolation("inner stabilisers are not in E_Z^perp")

    def lift(self, idx: int) -> np.ndarray:
        """Canonical E_Z^perp representative of phi_X(outer coset idx)."""
        if idx not in self._lifted:
            z = self.code.lift.apply_x(self.outer.cosets_[idx])
            if not self.code.ex.contains(z):
                raise InvariantViolation("lifted outer codeword is not in E_X")
            self._lifted[idx] = self.code.coset_rep(z)
        return self._lifted[idx]

    def covering(self, g):
        p = self.params
        return covering_optimize(self.code, g, p.alpha, p.eps, cap=self.cap)

    def finish(self, method, found: set, params, stats, trace, exhaustive, t0, oracle=None) -> DecodeReport:
        reps = [self.lift(i) for i in sorted(found)]
        reps = np.unique(np.array(reps), axis=0) if reps else np.zeros((0, self.code.length), dtype=np.int64)
        if len(reps) and not np.all(self.code.ex.contains(reps)):
            raise InvariantViolation("decoder output outside E_X")
        return DecodeReport(method, reps, params, stats, trace, oracle, exhaustive, time.perf_counter() - t0)


def _symbol_marginals(syms: np.ndarray, w: np.ndarray):
    """Per left vertex: (sorted symbols, probabilities) of the outer symbol."""
    out = []
    for l in range(syms.shape[1]):
        vals, inv = np.unique(syms[:, l], return_inverse=True)
        out.append((vals, np.bincount(inv.reshape(-1), weights=w, minlength=len(vals)) / w.sum()))
    return out


def size_mixture(n: int, u_max: int) -> np.ndarray:
    """P(|U| = j) when u is uniform on [1, u_max] and U holds u independent uniform draws."""
    acc = np.zeros(n + 1)
    p = np.zeros(n + 1)
    p[0] = 1.0
    u = 0
    while u < u_max:
        nxt = step_distinct(p, n)
        u += 1
        acc += nxt
        # once the mass below n is negligible every later draw count looks the same
        stable = nxt[:n].sum() < 1e-18 or np.array_equal(nxt, p)
        p = nxt
        if stable:
            acc += (u_max - u) * p
            break
    return acc / u_max


def _distinct_after(u: int, n: int, rng) -> int:
    """Number of distinct values among u independent uniform draws from n."""
    j, used = 0, 0
    while j < n:
        wait = int(rng.geometric((n - j) / n))
        if used + wait > u:
            break
        used += wait
        j += 1
    return j


def _oracle(code: AelCode, g, tau, cap) -> np.ndarray:
    return ael_list(code, g, tau, cap)


# randomized

def list_decode_randomized(code: AelCode, g, params: DecodeParams, *, cap=None, loop_limit: int = LOOP_LIMIT, context=None, oracle: bool = True) -> DecodeReport:
    """Randomised list decoding.

    When M is at most ``loop_limit`` every iteration is run and logged.
    Otherwise the iteration outcome distribution is computed exactly and
    the M outcomes are drawn as one multinomial sample, which yields the
    same output distribution.
    """
    t0 = time.perf_counter()
    params.validate()
    ctx = context if context is not None else _Context(code, params, cap)
    rng = rng_from(params.seed)
    g = np.asarray(g, dtype=np.int64)
    oracle_list = _oracle(code, g, params.tau, cap) if oracle else None
    pdict = params.to_dict()
    try:
        cov = ctx.covering(g)
    except EmptyPromise:
        return ctx.finish("randomized", set(), pdict, {"empty_promise": True}, [], True, t0, oracle_list)
    P = cov.pseudocodeword
    syms = code.outer_symbols(P.support)
    w = np.asarray(P.weights)
    right_ids = P._right_ids[0]
    n = code.n
    stats = {"covering_iterations": len(cov.steps), "support": len(P)}
    found: set[int] = set()
    trace = []
    exhaustive = True
    if params.M <= loop_limit:
        stats["mode"] = "loop"
        for it in range(params.M):
            u = int(rng.integers(1, params.u_max + 1))
            j = _distinct_after(u, n, rng)
            U = np.sort(rng.choice(n, size=j, replace=False))
            k = int(rng.choice(len(w), p=w))
            mask = np.all(right_ids[:, U] == right_ids[k, U], axis=1)
            cw = w[mask] / w[mask].sum()
            picks = rng.choice(int(mask.sum()), size=n, p=cw)
            y = syms[mask][picks, np.arange(n)]
            idx = int(ctx.outer.predict(y[None, :])[0])
            if idx >= 0:
                found.add(idx)
            trace.append({"u": u, "U": U.tolist(), "sigma": k, "y": y.tolist(), "outer": idx})
    else:
        stats["mode"] = "aggregate"
        pi, approx = _outcome_distribution(ctx, w, syms, right_ids, params, rng)
        exhaustive = not approx
        counts = _multinomial(rng, params.M, pi)
        found = {int(i) for i in np.flatnonzero(counts[:-1] > 0)}
        stats["outcome_probabilities"] = {str(i): float(pi[i]) for i in np.flatnonzero(pi[:-1] > 0)}
        stats["approximate"] = approx
    report = ctx.finish("randomized", found, pdict, stats, trace, exhaustive, t0, oracle_list)
    if len(report.cosets) > 1 / params.p + 1e-9:
        raise InvariantViolation("randomized list larger than 1/p")
    return report


def _outcome_distribution(ctx: _Context, w, syms, right_ids, params: DecodeParams, rng):
    """Exact distribution of one iteration's outer-decoder outcome (last slot: failure)."""
    n = ctx.code.n
    n_out = len(ctx.outer.cosets_)
    sizes = size_mixture(n, params.u_max)
    pi = np.zeros(n_out + 1)
    memo: dict[bytes, np.ndarray] = {}
    approx = False
    for j in range(1, n + 1):
        if sizes[j] == 0:
            continue
        subsets = list(combinations(range(n), j))
        for U in subsets:
            ids = right_ids[:, list(U)]
            _, inv = np.unique(ids, axis=0, return_inverse=True)
            inv = inv.reshape(-1)
            for grp in range(int(inv.max()) + 1):
                mask = inv == grp
                mass = float(w[mask].sum())
                key = np.packbits(mask).tobytes()
                if key not in memo:
                    memo[key], a = _piece_outcomes(ctx, w[mask], syms[mask], n_out, rng)
                    approx |= a
                pi += sizes[j] / len(subsets) * mass * memo[key]
    return pi / pi.sum(), approx


def _piece_outcomes(ctx: _Context, w, syms, n_out, rng):
    """Outcome distribution when each left symbol is drawn independently from its marginal."""
    marg = _symbol_marginals(syms, w)
    size = math.prod(len(v) for v, _ in marg)
    out = np.zeros(n_out + 1)
    if size <= PRODUCT_LIMIT:
        Y = np.array(list(product(*[v for v, _ in marg])), dtype=np.int64).reshape(-1, len(marg))
        pr = np.array(list(product(*[p for _, p in marg])), dtype=float).reshape(-1, len(marg)).prod(axis=1)
        res = ctx.outer.predict(Y)
        np.add.at(out, np.where(res < 0, n_out, res), pr)
        return out, False
    Y = np.stack([rng.choice(v, size=MC_ROUNDINGS, p=p) for v, p in marg], axis=1)
    res = ctx.outer.predict(Y)
    np.add.at(out, np.where(res < 0, n_out, res), 1.0 / MC_ROUNDINGS)
    return out, True


def _multinomial(rng, M: int, pi: np.ndarray) -> np.ndarray:
    """Counts of M draws from pi; exact in int64 chunks, Poisson beyond 64 chunks."""
    chunk = 1 << 62
    if M <= 64 * chunk:
        counts = np.zeros(len(pi), dtype=object)
        left = M
        while left > 0:
            take = min(left, chunk)
            counts += rng.multinomial(take, pi).astype(object)
            left -= take
        return counts
    lam = np.asarray(pi, dtype=float) * float(M)
    return np.where(lam > 1e15, lam, rng.poisson(np.minimum(lam, 1e15)))


# derandomized

def threshold_roundings(marg) -> list[tuple]:
    """All outputs of threshold rounding: h'_l = first symbol whose cumulative weight exceeds theta."""
    cums = [np.cumsum(p) for _, p in marg]
    thetas = sorted({0.0} | {float(x) for c in cums for x in c[:-1]})
    seen = []
    seen_set = set()
    for th in thetas:
        y = []
        for (v, _), c in zip(marg, cums):
            j = int(np.searchsorted(c, th, side="right"))
            y.append(int(v[min(j, len(v) - 1)]))
        t = tuple(y)
        if t not in seen_set:
            seen_set.add(t)
            seen.append(t)
    return seen


def list_decode_derandomized(code: AelCode, g, params: DecodeParams, *, cap=None, context=None, oracle: bool = True) -> DecodeReport:
    """Deterministic variant: every conditioning set, every outcome, every threshold."""
    t0 = time.perf_counter()
    params.validate()
    ctx = context if context is not None else _Context(code, params, cap)
    cap_v = resolve_cap(cap)
    g = np.asarray(g, dtype=np.int64)
    oracle_list = _oracle(code, g, params.tau, cap) if oracle else None
    pdict = params.to_dict()
    try:
        cov = ctx.covering(g)
    except EmptyPromise:
        return ctx.finish("derandomized", set(), pdict, {"empty_promise": True}, [], True, t0, oracle_list)
    P = cov.pseudocodeword
    syms = code.outer_symbols(P.support)
    w = np.asarray(P.weights)
    n = code.n
    t = code.field.q**code.b_out
    found: set[int] = set()
    decoded: dict[tuple, int] = {}
    memo: set[bytes] = set()
    pieces = 0
    max_roundings = 0
    for j in range(1, min(params.u_max, n) + 1):
        for U in combinations(range(n), j):
            for _, mask in _pieces(P, U):
                key = np.packbits(mask).tobytes()
                if key in memo:
                    continue
                memo.add(key)
                pieces += 1
                rounds = threshold_roundings(_symbol_marginals(syms[mask], w[mask]))
                max_roundings = max(max_roundings, len(rounds))
                if len(rounds) > t * n:
                    raise InvariantViolation(f"{len(rounds)} roundings exceed q^b_out * n = {t * n}")
                fresh = [y for y in rounds if y not in decoded]
                if len(decoded) + len(fresh) > cap_v:
                    partial = ctx.finish("derandomized", found, pdict, {"pieces": pieces}, [], False, t0, oracle_list)
                    raise CapExceeded("derandomized decoder hit the cap", partial=partial)
                if fresh:
                    res = ctx.outer.predict(np.array(fresh, dtype=np.int64))
                    for y, r in zip(fresh, res):
                        decoded[y] = int(r)
                        if r >= 0:
                            found.add(int(r))
    stats = {
        "covering_iterations": len(cov.steps),
        "support": len(P),
        "pieces": pieces,
        "roundings": len(decoded),
        "max_roundings_per_piece": max_roundings,
        "rounding_bound": t * n,
    }
    return ctx.finish("derandomized", found, pdict, stats, [], True, t0, oracle_list)


# distance proof under a pseudocodeword

@dataclass
class SosDistanceReport:
    delta_R: float
    delta_L_perp: float
    eta: float
    lam: float
    delta_in: float
    chain: dict

    @property
    def bound(self) -> float:
        return self.delta_in - (self.lam + self.eta) / self.delta_L_perp

    @property
    def ok(self) -> bool:
        return self.delta_R >= self.bound - TOL

    def to_dict(self) -> dict:
        return {**self.__dict__, "bound": self.bound, "ok": self.ok}


def sos_distance_check(code: AelCode, P: Pseudocodeword, h, *, strict: bool = True) -> SosDistanceReport:
    """Delta_R(P, h) >= delta_in - (lambda + eta) / Delta_{L,perp}(P, h), with every step of the chain."""
    h = np.asarray(h, dtype=np.int64)
    dlp = P.delta_L_perp(h)
    if dlp <= 0:
        raise SameCoset("every support word shares h's left cosets")
    dR = P.delta_R(h)
    eta = avg_cov(P)
    lam = code.lam
    din = float(code.delta_in)
    f = code.field
    psi = partial_minimizer(code, P.support, h)
    w = np.asarray(P.weights)
    diff = f.sub(psi, h[None, :])
    edge_diff = np.any(diff.reshape(len(w), code.n * code.d, code.b_in) != 0, axis=2)
    left_diff = np.any(code.left_blocks(diff) != 0, axis=2).astype(float)
    right_diff = np.any(code.right_blocks(diff) != 0, axis=2).astype(float)
    G = code.graph
    edge_term = float(w @ edge_diff.mean(axis=1))
    edge_pair = float(w @ (left_diff[:, G.edge_left] * right_diff[:, G.edge_right]).mean(axis=1))
    all_pair = float(w @ (left_diff.mean(axis=1) * right_diff.mean(axis=1)))
    prod = float((w @ left_diff).mean() * (w @ right_diff).mean())
    # psi preserves left cosets and never creates a right disagreement
    psi_left = float((w @ left_diff).mean())
    psi_right = float((w @ right_diff).mean())
    chain = {
        "lower": din * dlp,
        "edge": edge_term,
        "edge_pair": edge_pair,
        "all_pairs_plus_lambda": all_pair + lam,
        "product_plus_lambda_eta": prod + lam + eta,
        "final": dlp * dR + lam + eta,
        "psi_delta_L": psi_left,
        "psi_delta_R": psi_right,
    }
    ok = (
        chain["lower"] <= edge_term + TOL
        and edge_term <= edge_pair + TOL
        and edge_pair <= chain["all_pairs_plus_lambda"] + TOL
        and chain["all_pairs_plus_lambda"] <= chain["product_plus_lambda_eta"] + TOL
        and chain["product_plus_lambda_eta"] <= chain["final"] + TOL
        and abs(psi_left - dlp) <= TOL
        and psi_right <= dR + TOL
    )
    rep = SosDistanceReport(dR, dlp, eta, lam, din, chain)
    if strict and not (ok and rep.ok):
        raise InvariantViolation(f"pseudocodeword distance chain fails: {chain}")
    return rep


# experiments

def plant(code: AelCode, weight: int, rng):
    """Random codeword h and received word g = h + e with e nonzero on exactly ``weight`` right blocks."""
    h = code.random_codeword(rng).astype(np.int64)
    q = code.field.q
    E = np.zeros((code.n, code.block), dtype=np.int64)
    for r in rng.choice(code.n, size=weight, replace=False):
        while True:
            e = rng.integers(0, q, size=code.block)
            if e.any():
                break
        E[r] = e
    g = code.field.add(h, code.from_right_blocks(E))
    return h, g


def _run_trial(code: AelCode, spec: dict, t: int, contexts) -> dict:
    rng = np.random.default_rng([int(spec.get("seed", 0)), t])
    params = spec["_params"]
    weight = int(spec["error_weight"])
    h, g = plant(code, weight, rng)
    tau = params.tau
    oracle = _oracle(code, g, tau, spec.get("cap"))
    planted = code.coset_rep(h)
    planted_in_oracle = planted.astype(np.int64).tobytes() in {r.tobytes() for r in oracle}
    row = {
        "trial": t,
        "error_weight": weight,
        "oracle_size": len(oracle),
        "planted_in_oracle": bool(planted_in_oracle),
    }
    for method in spec.get("decoders", ["derandomized", "randomized"]):
        trial_seed = int(np.random.default_rng([int(spec.get("seed", 0)), t, 1]).integers(2**31))
        p = DecodeParams(**{**params.__dict__, "seed": trial_seed})
        if method == "derandomized":
            rep = list_decode_derandomized(code, g, p, cap=spec.get("cap"), context=contexts[0], oracle=False)
        elif method == "randomized":
            rep = list_decode_randomized(code, g, p, cap=spec.get("cap"), context=contexts[0], oracle=False, loop_limit=int(spec.get("loop_limit", LOOP_LIMIT)))
        else:
            raise SpecError(f"unknown decoder {method!r}")
        rep.oracle = oracle
        row[f"{method}_list_size"] = len(rep.cosets)
        row[f"{method}_success"] = bool(rep.success)
        row[f"{method}_planted"] = planted.astype(np.int64).tobytes() in rep.keys()
        found = rep.keys()
        row[f"{method}_missing"] = [r.tolist() for r in oracle if r.astype(np.int64).tobytes() not in found]
        row[f"{method}_mode"] = rep.stats.get("mode", "exhaustive" if rep.exhaustive else "partial")
        if spec.get("keep_trace"):
            row[f"{method}_trace"] = rep.trace
    return row


def experiment_run(code: AelCode, spec: dict, *, jobs: int = 1) -> dict:
    """Seeded batch of planted-error trials compared against the brute-force list."""
    try:
        trials = int(spec.get("trials", 10))
        eps = float(spec["eps"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"bad experiment spec: {exc}") from exc
    params = DecodeParams.for_code(code, eps, float(spec.get("gamma", 0.1)), spec.get("delta_dec"), repetitions=spec.get("repetitions"))
    params.validate()
    weight = spec.get("error_weight")
    if weight is None:
        weight = max(0, math.ceil(params.tau * code.n) - 1)  # largest weight strictly inside tau
    spec = {**spec, "error_weight": int(weight), "_params": params}
    contexts = (_Context(code, params, spec.get("cap")),)
    if jobs > 1:
        from joblib import Parallel, delayed

        rows = Parallel(n_jobs=jobs)(delayed(_run_trial)(code, spec, t, contexts) for t in range(trials))
    else:
        rows = [_run_trial(code, spec, t, contexts) for t in range(trials)]
    rows.sort(key=lambda r: r["trial"])
    summary = {"trials": trials, "error_weight": int(weight), "tau": params.tau, "weight_inside_tau": bool(below(int(weight), code.n, params.tau))}
    for method in spec.get("decoders", ["derandomized", "randomized"]):
        summary[f"{method}_successes"] = sum(r[f"{method}_success"] for r in rows)
        summary[f"{method}_planted"] = sum(r[f"{method}_planted"] for r in rows)
    summary["mean_oracle_size"] = float(np.mean([r["oracle_size"] for r in rows])) if rows else 0.0
    clean = {k: v for k, v in spec.items() if not k.startswith("_")}
    return {"spec": clean, "params": params.to_dict(), "summary": summary, "trials": rows}


def report_csv(report: dict) -> str:
    rows = report["trials"]
    if not rows:
        return ""
    cols = [k for k in rows[0] if not k.endswith(("_trace", "_missing"))]
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(str(r[c]) for c in cols))
    return "\n".join(lines) + "\n"


# estimator

class ListDecoder(BaseEstimator):
    """sklearn-style wrapper: fit on an AelCode, predict coset lists for received words."""

    def __init__(self, eps=0.05, gamma=0.1, delta_dec=None, method="derandomized", seed=0, cap=None, loop_limit=LOOP_LIMIT):
        self.eps = eps
        self.gamma = gamma
        self.delta_dec = delta_dec
        self.method = method
        self.seed = seed
        self.cap = cap
        self.loop_limit = loop_limit

    def fit(self, code: AelCode, y=None):
        self.code_ = code
        self.params_ = DecodeParams.for_code(code, self.eps, self.gamma, self.delta_dec, self.seed)
        self.params_.validate()
        self.context_ = _Context(code, self.params_, self.cap)
        return self

    def decode(self, g) -> DecodeReport:
        check_is_fitted(self, "context_")
        if self.method == "derandomized":
            return list_decode_derandomized(self.code_, g, self.params_, cap=self.cap, context=self.context_)
        if self.method == "randomized":
            return list_decode_randomized(self.code_, g, self.params_, cap=self.cap, context=self.context_, loop_limit=self.loop_limit)
        raise SpecError(f"unknown method {self.method!r}")

    def predict(self, G) -> list[np.ndarray]:
        G = np.atleast_2d(np.asarray(G, dtype=np.int64))
        return [self.decode(g).cosets for g in G]
