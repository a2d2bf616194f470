"""Small helpers: enumeration caps, exact radius comparisons, seeding."""

from __future__ import annotations

import math
import os
from fractions import Fraction

import numpy as np

from .errors import CapExceeded

DEFAULT_CAP = 1 << 22


def resolve_cap(cap: int | None = None) -> int:
    """Explicit cap, else $AELQ_CAP, else 2^22."""
    if cap is not None:
        cap = int(cap)
    else:
        cap = int(os.environ.get("AELQ_CAP", DEFAULT_CAP))
    if cap <= 0:
        raise ValueError("enumeration cap must be positive")
    return cap


def check_cap(count: int, cap: int | None, what: str = "enumeration") -> None:
    cap = resolve_cap(cap)
    if count > cap:
        raise CapExceeded(f"{what} needs {count} items, cap is {cap}")


def as_fraction(x) -> Fraction:
    """Exact value for ints and Fractions, nearest small-denominator value for floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x)).limit_denominator(10**9)


def below(count, n: int, radius) -> np.ndarray | bool:
    """count/n < radius, exactly when radius is rational."""
    if isinstance(radius, (Fraction, int, np.integer)):
        r = Fraction(radius)
        return np.asarray(count) * r.denominator < r.numerator * n
    return np.asarray(count) < float(radius) * n


def at_most(count, n: int, radius) -> np.ndarray | bool:
    """count/n <= radius, exactly when radius is rational."""
    if isinstance(radius, (Fraction, int, np.integer)):
        r = Fraction(radius)
        return np.asarray(count) * r.denominator <= r.numerator * n
    return np.asarray(count) <= float(radius) * n + 1e-12


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def binom(n: int, k: int) -> int:
    return math.comb(n, k)
