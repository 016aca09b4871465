"""Sub-linear summatory totient and Mertens functions.

Both use the floor-division recurrences

    Phi(N) = N(N+1)/2 - sum_{d=2}^{N} Phi(N // d)
    M(N)   = 1        - sum_{d=2}^{N} M(N // d)

with a sieved prefix for arguments up to about N^(2/3) and memoised
values for the large quotients N // i above it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numba
import numpy as np

from .config import get_config
from .errors import CapacityError, DomainError
from .sieve import sieve_mu, sieve_phi

SumKind = Literal["totient", "mertens"]

MAX_ARGUMENT = 10**13
_MASK64 = (1 << 64) - 1
# Bytes per sieve entry while building the prefix: table + prefix sums + primes.
_PREFIX_BYTES = 24


@dataclass
class SummatoryCache:
    """Exact prefix sums over the floor-division value set of ``root``.

    ``small[v]`` holds the value at ``v`` for ``0 <= v <= threshold``;
    ``large`` maps each quotient ``root // i`` above the threshold to its
    value.
    """

    root: int
    kind: SumKind
    threshold: int = 0
    small: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=np.int64), repr=False)
    large: dict[int, int] = field(default_factory=dict, repr=False)
    frozen: bool = False

    def has(self, v: int) -> bool:
        return 0 <= v <= self.threshold or v in self.large

    def value(self, v: int) -> int:
        if 0 <= v <= self.threshold:
            return int(self.small[v])
        try:
            return self.large[v]
        except KeyError:
            raise KeyError(f"{v} is not a cached quotient of {self.root}") from None

    def quotients(self) -> list[int]:
        """Distinct values of ``root // d`` for ``d >= 1``, increasing."""
        n = self.root
        out = set()
        d = 1
        while d <= n:
            q = n // d
            out.add(q)
            d = n // q + 1
        return sorted(out)


def default_threshold(n: int) -> int:
    t = max(math.isqrt(n), math.ceil(n ** (2.0 / 3.0)))
    t = min(t, n)
    cap = get_config().memory_cap_bytes // _PREFIX_BYTES - 64
    if t > cap:
        if cap < math.isqrt(n):
            raise CapacityError(f"memory cap too small for a sqrt({n}) prefix")
        t = cap
    return t


@numba.njit(cache=True)
def _isqrt(v):
    r = np.int64(np.sqrt(np.float64(v)))
    while r * r > v:
        r -= 1
    while (r + 1) * (r + 1) <= v:
        r += 1
    return r


@numba.njit(cache=True)
def _large_kernel(n, t, small, totient):
    # large[i] = value at n // i for 1 <= i <= n // (t + 1).  Totient
    # values are only correct modulo 2^64 (int64 wrap-around).
    count = n // (t + 1)
    large = np.zeros(count + 1, dtype=np.int64)
    for i in range(count, 0, -1):
        v = n // i
        if totient:
            if v % 2 == 0:
                s = (v // 2) * (v + 1)
            else:
                s = v * ((v + 1) // 2)
        else:
            s = 1
        r = _isqrt(v)
        for d in range(2, r + 1):
            q = v // d
            if q > t:
                s -= large[i * d]
            else:
                s -= small[q]
        top = v // (r + 1)
        for u in range(1, top + 1):
            s -= (v // u - v // (u + 1)) * small[u]
        large[i] = s
    return large


def _totient_estimate_bound(v: int) -> int:
    return int(v * (math.log(v) + 2.25) / 2) + 1 if v > 1 else 1


def _lift_totient(residue: int, v: int) -> int:
    """Recover Phi(v) from its residue mod 2^64.

    |Phi(v) - 3v^2/pi^2| <= v(ln v + 2.25)/2, far below 2^63 for the
    supported range, so the residue class has a unique representative
    within that window.
    """
    approx = round(3.0 * float(v) * float(v) / math.pi**2)
    diff = (residue - approx) & _MASK64
    if diff >= 1 << 63:
        diff -= 1 << 64
    value = approx + diff
    if abs(diff) > 4 * _totient_estimate_bound(v) + (1 << 40):
        raise ArithmeticError(f"totient lift for {v} left its certified window")
    return value


def build_cache(n: int, kind: SumKind, threshold: int | None = None) -> SummatoryCache:
    if n < 1:
        raise DomainError(f"summatory functions need N >= 1, got {n}")
    if n > MAX_ARGUMENT:
        raise DomainError(f"N above {MAX_ARGUMENT} is not supported")
    if kind not in ("totient", "mertens"):
        raise DomainError(f"unknown summatory kind {kind!r}")
    t = default_threshold(n) if threshold is None else int(threshold)
    if not math.isqrt(n) <= t <= n:
        raise DomainError("threshold must lie in [isqrt(N), N]")
    get_config().require_bytes(_PREFIX_BYTES * (t + 1), "summatory prefix")

    table = sieve_phi(t) if kind == "totient" else sieve_mu(t)
    small = np.zeros(t + 1, dtype=np.int64)
    np.cumsum(table.values, out=small[1:])
    raw = _large_kernel(n, t, small, kind == "totient")
    large: dict[int, int] = {}
    for i in range(1, len(raw)):
        v = n // i
        r = int(raw[i])
        large[v] = _lift_totient(r & _MASK64, v) if kind == "totient" else r
    small.setflags(write=False)
    return SummatoryCache(root=n, kind=kind, threshold=t, small=small, large=large, frozen=True)


def _lookup(n: int, kind: SumKind, cache: SummatoryCache | None) -> int:
    if cache is None:
        cache = build_cache(n, kind)
    if cache.kind != kind:
        raise DomainError(f"cache holds {cache.kind} values, not {kind}")
    if not cache.has(n):
        raise DomainError(f"{n} is not in the quotient set of the cache root {cache.root}")
    return cache.value(n)


def totient_summatory(n: int, cache: SummatoryCache | None = None) -> int:
    """Phi(n) = phi(1) + ... + phi(n), exactly."""
    return _lookup(n, "totient", cache)


def mertens(n: int, cache: SummatoryCache | None = None) -> int:
    """M(n) = mu(1) + ... + mu(n), exactly."""
    return _lookup(n, "mertens", cache)


def walfisz_ratio(n: int) -> float:
    """Phi(n) divided by its leading asymptotic 3 n^2 / pi^2."""
    if n < 2:
        raise DomainError(f"walfisz_ratio needs N >= 2, got {n}")
    phi_sum = totient_summatory(n)
    return float(phi_sum) * math.pi**2 / (3.0 * float(n) * float(n))
