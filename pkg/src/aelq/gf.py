"""Arithmetic in finite fields F_q with q = p^m <= 2^16.

Elements are integer codes 0..q-1: the code of a0 + a1 x + ... is
sum(a_i p^i), i.e. the little-endian coefficient vector read in base p.
All array operations are vectorised over numpy integer arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DivisionByZero, FieldTooLarge, IncompatibleFields, NotPrime

MAX_ORDER = 1 << 16


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _digits(code: int, p: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        out.append(code % p)
        code //= p
    return out


def _poly_rem(a: list[int], mod: list[int], p: int) -> list[int]:
    """Remainder of a modulo a monic polynomial (little-endian lists)."""
    a = list(a)
    dm = len(mod) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * mod[j]) % p
    return [x % p for x in a[:dm]]


def _is_irreducible(poly: list[int], p: int) -> bool:
    m = len(poly) - 1
    for deg in range(1, m // 2 + 1):
        for low in range(p**deg):
            div = _digits(low, p, deg) + [1]
            if not any(_poly_rem(poly, div, p)):
                return False
    return True


def smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Monic irreducible of degree m whose lower coefficients, read as a
    base-p integer with the x^(m-1) coefficient most significant, are smallest."""
    for low in range(p**m):
        poly = _digits(low, p, m) + [1]
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FieldSpec:
    """The field F_p[x]/(modulus) with lookup tables for fast arithmetic."""

    def __init__(self, p: int, m: int, modulus=None):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if m < 1:
            raise ValueError("extension degree must be >= 1")
        if p**m > MAX_ORDER:
            raise FieldTooLarge(f"{p}^{m} exceeds 2^16")
        if modulus is None:
            modulus = smallest_irreducible(p, m)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree m")
        if not _is_irreducible(list(modulus), p):
            raise ValueError("modulus is reducible")
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = modulus
        self._pows = np.array([p**i for i in range(m)], dtype=np.int64)
        codes = np.arange(self.q, dtype=np.int64)
        self._digit_table = (codes[:, None] // self._pows[None, :]) % p
        self._embeddings: dict = {}
        self._build_log_tables()

    # construction helpers

    def _mul_poly_codes(self, a: int, b: int) -> int:
        da = _digits(a, self.p, self.m)
        db = _digits(b, self.p, self.m)
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        rem = _poly_rem(prod, list(self.modulus), self.p) if self.m > 1 else [prod[0] % self.p]
        return int(sum(c * self.p**i for i, c in enumerate(rem)))

    def _build_log_tables(self) -> None:
        q, p = self.q, self.p
        if q == 2:
            self._exp = np.array([1, 1], dtype=np.int64)
            self._log = np.zeros(2, dtype=np.int64)
            self.generator = 1
            return
        for gamma in range(2, q):
            # multiplication by gamma as an F_p-linear map on digit vectors
            cols = [self._mul_poly_codes(gamma, p**j) for j in range(self.m)]
            mat = np.array([_digits(c, p, self.m) for c in cols], dtype=np.int64)
            table = ((self._digit_table @ mat) % p) @ self._pows
            step = table.tolist()
            exp = [0] * (q - 1)
            e = 1
            ok = True
            for i in range(q - 1):
                exp[i] = e
                e = step[e]
                if e == 1 and i < q - 2:
                    ok = False
                    break
            if ok:
                break
        else:  # pragma: no cover
            raise AssertionError("no primitive element")
        self.generator = gamma
        exp_arr = np.array(exp, dtype=np.int64)
        self._exp = np.concatenate([exp_arr, exp_arr])
        self._log = np.zeros(q, dtype=np.int64)
        self._log[exp_arr] = np.arange(q - 1, dtype=np.int64)

    # identity

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.m, self.modulus) == (
            other.p,
            other.m,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.m})" if self.m > 1 else f"GF({self.p})"

    def to_spec(self) -> dict:
        return {"p": self.p, "m": self.m}

    @property
    def is_prime_field(self) -> bool:
        return self.m == 1

    # vectorised arithmetic on codes

    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        d = (self._digit_table[a] + self._digit_table[b]) % self.p
        return d @ self._pows

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        if self.m == 1:
            return (-a) % self.p
        return ((-self._digit_table[a]) % self.p) @ self._pows

    def sub(self, a, b):
        if self.p == 2:
            return np.asarray(a, dtype=np.int64) ^ np.asarray(b, dtype=np.int64)
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a * b) % self.p
        r = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, r)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, k: int):
        a = np.asarray(a, dtype=np.int64)
        if k == 0:
            return np.ones_like(a)
        if k < 0:
            return self.power(self.inv(a), -k)
        e = (self._log[a] * (k % (self.q - 1))) % (self.q - 1)
        return np.where(a == 0, 0, self._exp[e])

    def digits(self, a) -> np.ndarray:
        """Little-endian coefficient vectors over F_p."""
        return self._digit_table[np.asarray(a, dtype=np.int64)]

    def from_digits(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=np.int64) % self.p
        return d @ self._pows

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def __call__(self, code: int) -> "FqElement":
        return FqElement(self, int(code))

    # subfields

    def prime_field(self) -> "FieldSpec":
        return field_make(self.p, 1)

    def embedding(self, base: "FieldSpec") -> np.ndarray:
        """Codes in self of the images of base's elements under a fixed field embedding."""
        key = (base.p, base.m, base.modulus)
        if key in self._embeddings:
            return self._embeddings[key][0]
        if base.p != self.p or self.m % base.m:
            raise IncompatibleFields(f"{base} is not a subfield of {self}")
        xs = self.elements()
        val = np.zeros_like(xs)
        for c in reversed(base.modulus):
            val = self.add(self.mul(val, xs), c)
        beta = int(np.flatnonzero(val == 0)[0])
        powers = [1]
        for _ in range(base.m - 1):
            powers.append(int(self.mul(powers[-1], beta)))
        emb = np.zeros(base.q, dtype=np.int64)
        dig = base.digits(base.elements())
        for i, bp in enumerate(powers):
            emb = self.add(emb, self.mul(dig[:, i], bp))
        inverse = np.full(self.q, -1, dtype=np.int64)
        inverse[emb] = np.arange(base.q)
        self._embeddings[key] = (emb, inverse)
        return emb

    def restrict(self, base: "FieldSpec", a) -> np.ndarray:
        """Inverse of embedding; raises if some element lies outside the subfield."""
        self.embedding(base)
        inverse = self._embeddings[(base.p, base.m, base.modulus)][1]
        out = inverse[np.asarray(a, dtype=np.int64)]
        if np.any(out < 0):
            raise IncompatibleFields("element not in the subfield")
        return out


@lru_cache(maxsize=None)
def field_make(p: int, m: int = 1) -> FieldSpec:
    """F_{p^m} with the smallest irreducible modulus; cached."""
    return FieldSpec(int(p), int(m))


def field_from_spec(spec) -> FieldSpec:
    if isinstance(spec, FieldSpec):
        return spec
    return field_make(int(spec["p"]), int(spec.get("m", 1)))


@dataclass(frozen=True)
class FqElement:
    field: FieldSpec
    code: int

    def __post_init__(self):
        if not 0 <= self.code < self.field.q:
            raise ValueError("element code out of range")

    @classmethod
    def from_rep(cls, field: FieldSpec, rep) -> "FqElement":
        return cls(field, int(field.from_digits(list(rep))))

    @property
    def rep(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.field.digits(self.code))

    def _other(self, other) -> int:
        if isinstance(other, FqElement):
            if other.field != self.field:
                raise IncompatibleFields("operands live in different fields")
            return other.code
        return int(other)

    def __add__(self, other):
        return FqElement(self.field, int(self.field.add(self.code, self._other(other))))

    __radd__ = __add__

    def __sub__(self, other):
        return FqElement(self.field, int(self.field.sub(self.code, self._other(other))))

    def __neg__(self):
        return FqElement(self.field, int(self.field.neg(self.code)))

    def __mul__(self, other):
        return FqElement(self.field, int(self.field.mul(self.code, self._other(other))))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FqElement(self.field, int(self.field.div(self.code, self._other(other))))

    def __pow__(self, k: int):
        return FqElement(self.field, int(self.field.power(self.code, k)))

    def inverse(self) -> "FqElement":
        return FqElement(self.field, int(self.field.inv(self.code)))

    def __int__(self):
        return self.code

    def __repr__(self):
        return f"{self.field}({self.code})"


def add(a: FqElement, b: FqElement) -> FqElement:
    return a + b


def mul(a: FqElement, b: FqElement) -> FqElement:
    return a * b


def inv(a: FqElement) -> FqElement:
    return a.inverse()


def trace(x, base: FieldSpec, ext: FieldSpec | None = None):
    """Tr(x) = x + x^q + ... + x^(q^(b-1)) from ext = F_{q^b} down to base = F_q.

    Accepts an FqElement (returns an FqElement of base) or an array of ext codes
    together with ``ext`` (returns base codes).
    """
    scalar = isinstance(x, FqElement)
    if scalar:
        ext = x.field
        x = x.code
    if ext is None:
        raise IncompatibleFields("extension field required for array input")
    if base.p != ext.p or ext.m % base.m:
        raise IncompatibleFields(f"{base} is not a subfield of {ext}")
    b = ext.m // base.m
    y = np.asarray(x, dtype=np.int64)
    acc = y
    for _ in range(b - 1):
        y = ext.power(y, base.q)
        acc = ext.add(acc, y)
    out = ext.restrict(base, acc)
    if scalar:
        return FqElement(base, int(out))
    return out


def trace_dual_basis(ext: FieldSpec, base: FieldSpec | None = None):
    """F_q-bases (v, w) of ext with Tr(v_i w_j) = [i == j].

    v is the power basis of ext's multiplicative generator. Returns two arrays
    of ext codes.
    """
    from .fqlinalg import inverse

    if base is None:
        base = ext.prime_field()
    if base.p != ext.p or ext.m % base.m:
        raise IncompatibleFields(f"{base} is not a subfield of {ext}")
    b = ext.m // base.m
    v = [1]
    for _ in range(b - 1):
        v.append(int(ext.mul(v[-1], ext.generator)))
    v = np.array(v, dtype=np.int64)
    gram = trace(ext.mul(v[:, None], v[None, :]), base, ext)
    ginv = inverse(base, gram)
    emb = ext.embedding(base)
    w = np.zeros(b, dtype=np.int64)
    for j in range(b):
        for k in range(b):
            w[j] = ext.add(w[j], ext.mul(emb[ginv[k, j]], v[k]))
    return v, w


def coordinates(x, dual: np.ndarray, base: FieldSpec, ext: FieldSpec) -> np.ndarray:
    """Coordinates over base of ext elements x in the basis dual to ``dual``.

    With (v, w) = trace_dual_basis(ext), coordinates(x, w) gives a with x = sum a_i v_i.
    """
    x = np.asarray(x, dtype=np.int64)
    return trace(ext.mul(x[..., None], dual), base, ext)
