"""Exact tables of Euler's totient and the Moebius function.

Tables come from numba-compiled sieves.  Isolated large arguments go
through :func:`phi_point`, which factors by trial division, a
deterministic Miller-Rabin test and Pollard-Brent rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numba
import numpy as np

from .config import get_config
from .errors import CapacityError, DomainError

Kind = Literal["totient", "moebius"]

MAX_POINT = 2**63 - 1
_ENTRY_BYTES = 8


@dataclass(frozen=True, eq=False)
class ArithTable:
    """Values ``f(lo), f(lo+1), ...`` of an arithmetic function.

    ``values`` is a read-only int64 array.
    """

    lo: int
    values: np.ndarray
    kind: Kind

    def __post_init__(self) -> None:
        if self.lo < 1 or len(self.values) == 0:
            raise ValueError("table must start at lo >= 1 and be non-empty")
        self.values.setflags(write=False)

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> int:
        """Value at the integer ``n`` (not at an offset)."""
        if not self.lo <= n <= self.hi:
            raise IndexError(f"{n} outside [{self.lo}, {self.hi}]")
        return int(self.values[n - self.lo])

    def tolist(self) -> list[int]:
        return self.values.tolist()


def _check_capacity(count: int, what: str) -> None:
    get_config().require_bytes(count * _ENTRY_BYTES, what)


def _prime_bound(n: int) -> int:
    # pi(n) < 1.26 n / ln n for n > 1
    return int(1.3 * n / math.log(max(n, 3))) + 16


@numba.njit(cache=True)
def _phi_kernel(n, prime_slots):
    # Linear sieve; phi[0] is a dummy slot so that phi[i] = phi(i).
    phi = np.zeros(n + 1, dtype=np.int64)
    phi[1] = 1
    primes = np.empty(prime_slots, dtype=np.int64)
    count = 0
    for i in range(2, n + 1):
        if phi[i] == 0:
            phi[i] = i - 1
            primes[count] = i
            count += 1
        pi = phi[i]
        for t in range(count):
            p = primes[t]
            ip = i * p
            if ip > n:
                break
            if i % p == 0:
                phi[ip] = pi * p
                break
            phi[ip] = pi * (p - 1)
    return phi


@numba.njit(cache=True)
def _mu_kernel(n, prime_slots):
    mu = np.ones(n + 1, dtype=np.int64)
    composite = np.zeros(n + 1, dtype=np.bool_)
    primes = np.empty(prime_slots, dtype=np.int64)
    count = 0
    for i in range(2, n + 1):
        if not composite[i]:
            primes[count] = i
            count += 1
            mu[i] = -1
        for t in range(count):
            p = primes[t]
            ip = i * p
            if ip > n:
                break
            composite[ip] = True
            if i % p == 0:
                mu[ip] = 0
                break
            mu[ip] = -mu[i]
    return mu


@numba.njit(cache=True)
def _prime_kernel(n):
    is_p = np.ones(n + 1, dtype=np.bool_)
    is_p[0] = False
    if n >= 1:
        is_p[1] = False
    i = 2
    while i * i <= n:
        if is_p[i]:
            for m in range(i * i, n + 1, i):
                is_p[m] = False
        i += 1
    return np.nonzero(is_p)[0].astype(np.int64)


@numba.njit(cache=True)
def _segment_kernel(lo, hi, primes):
    size = hi - lo + 1
    phi = np.arange(lo, hi + 1, dtype=np.int64)
    rest = phi.copy()
    for t in range(primes.shape[0]):
        p = primes[t]
        if p * p > hi:
            break
        start = ((lo + p - 1) // p) * p
        for m in range(start, hi + 1, p):
            i = m - lo
            phi[i] -= phi[i] // p
            while rest[i] % p == 0:
                rest[i] //= p
    for i in range(size):
        # At most one prime factor above sqrt(hi) survives.
        if rest[i] > 1:
            phi[i] -= phi[i] // rest[i]
    return phi


@lru_cache(maxsize=8)
def primes_up_to(n: int) -> np.ndarray:
    """Sorted primes ``<= n`` as an int64 array."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    _check_capacity(n + 1, "prime sieve")
    return _prime_kernel(n)


def sieve_phi(n: int) -> ArithTable:
    """phi(1..n)."""
    if n < 1:
        raise DomainError(f"sieve_phi needs n >= 1, got {n}")
    slots = _prime_bound(n)
    _check_capacity(n + 1 + slots, f"totient table up to {n}")
    return ArithTable(1, _phi_kernel(n, slots)[1:], "totient")


def sieve_mu(n: int) -> ArithTable:
    """mu(1..n)."""
    if n < 1:
        raise DomainError(f"sieve_mu needs n >= 1, got {n}")
    slots = _prime_bound(n)
    _check_capacity(n + 1 + slots + (n + 1) // 8, f"Moebius table up to {n}")
    return ArithTable(1, _mu_kernel(n, slots)[1:], "moebius")


def segment_phi(lo: int, hi: int, segment_size: int | None = None) -> ArithTable:
    """phi(lo..hi), sieved segment by segment with primes up to sqrt(hi)."""
    if not 1 <= lo <= hi:
        raise DomainError(f"segment_phi needs 1 <= lo <= hi, got ({lo}, {hi})")
    if hi > MAX_POINT:
        raise DomainError("segment_phi is limited to 63-bit arguments")
    _check_capacity(2 * (hi - lo + 1), f"totient segment [{lo}, {hi}]")
    step = segment_size or get_config().segment_size
    primes = primes_up_to(math.isqrt(hi))
    parts = []
    start = lo
    while start <= hi:
        stop = min(hi, start + step - 1)
        parts.append(_segment_kernel(start, stop, primes))
        start = stop + 1
    values = parts[0] if len(parts) == 1 else np.concatenate(parts)
    return ArithTable(lo, values, "totient")


# --- pointwise factorisation -------------------------------------------

_SMALL_PRIMES = [int(p) for p in _prime_kernel(1 << 12)]
# Sufficient for every n < 3.3e24, far beyond 2^63.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int) -> int:
    """A non-trivial factor of the odd composite ``n``.

    Deterministic: the polynomial constant walks 1, 2, 3, ... until a
    split is found.
    """
    if n % 2 == 0:
        return 2
    for c in range(1, n):
        y, r, q, m = 2, 1, 1, 128
        g = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed to split {n}")  # pragma: no cover


def _large_factors(n: int, out: dict[int, int]) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        d = _brent(m)
        stack.extend((d, m // d))


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of ``1 <= n <= 2^63 - 1`` as ``{p: exponent}``."""
    if not 1 <= n <= MAX_POINT:
        raise DomainError(f"factorize needs 1 <= n <= 2^63-1, got {n}")
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        if n < _SMALL_PRIMES[-1] ** 2:
            out[n] = out.get(n, 0) + 1
        else:
            _large_factors(n, out)
    return out


def phi_point(n: int) -> int:
    """phi(n) for a single ``1 <= n <= 2^63 - 1``."""
    n = int(n)
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def mu_point(n: int) -> int:
    f = factorize(int(n))
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


__all__ = [
    "ArithTable",
    "CapacityError",
    "factorize",
    "is_prime",
    "mu_point",
    "phi_point",
    "primes_up_to",
    "segment_phi",
    "sieve_mu",
    "sieve_phi",
]
