"""The floor-sum S_{j,k}(x) = sum_{n<=x} phi([x/n]^j) / [x/n]^k.

Since phi(m^j) = m^(j-1) phi(m) for integer j, every summand reduces to
phi(m) * m^(c-1) with m = x // n and c = j - k.  That reduced form is
also taken as the definition when j is not an integer, so the sum only
depends on c.

Three evaluators are provided and are meant to agree with each other:

* :func:`s_naive` walks n = 1..x one by one;
* :func:`s_block` groups n into runs with equal quotient x // n;
* :func:`s_hybrid` evaluates the quotients for n <= sqrt(x) pointwise and
  the remaining small quotients through block counts, so that no table
  larger than sqrt(x) is ever built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numba
import numpy as np

from .config import get_config
from .errors import CapacityError, DomainError
from .numerics import EPS, CERT_FACTOR, CertifiedValue, NeumaierSum
from .sieve import MAX_POINT, ArithTable, phi_point, sieve_phi


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    # Decimal reading, so that 2.3 - 0.3 is exactly 2.
    return Fraction(str(v))


@dataclass(frozen=True)
class SumParams:
    j: float
    k: float

    def __post_init__(self) -> None:
        for name in ("j", "k"):
            v = getattr(self, name)
            if not math.isfinite(float(v)):
                raise DomainError(f"{name} must be finite")
        if _as_fraction(self.j) < 1:
            raise DomainError(f"j must be >= 1, got {self.j}")
        if _as_fraction(self.k) < 0:
            raise DomainError(f"k must be >= 0, got {self.k}")

    @property
    def c_exact(self) -> Fraction:
        return _as_fraction(self.j) - _as_fraction(self.k)

    @property
    def c(self) -> float:
        return float(self.c_exact)

    @property
    def mode(self) -> str:
        c = self.c_exact
        return "exact" if c.denominator == 1 and c >= 1 else "float"

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    @property
    def exponent(self) -> float:
        """Power of m multiplying phi(m) in the reduced summand."""
        return self.c - 1.0


class FloorBlock(NamedTuple):
    m: int
    n_lo: int
    n_hi: int

    @property
    def length(self) -> int:
        return self.n_hi - self.n_lo + 1


@numba.njit(cache=True)
def _block_kernel(x):
    r = np.int64(np.sqrt(np.float64(x)))
    cap = 2 * r + 4
    ms = np.empty(cap, dtype=np.int64)
    los = np.empty(cap, dtype=np.int64)
    his = np.empty(cap, dtype=np.int64)
    n = np.int64(1)
    b = 0
    while n <= x:
        m = x // n
        hi = x // m
        ms[b] = m
        los[b] = n
        his[b] = hi
        b += 1
        n = hi + 1
    return ms[:b], los[:b], his[:b]


def block_arrays(x: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(m, n_lo, n_hi)`` arrays of the floor blocks of ``x``, decreasing in m."""
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if x > MAX_POINT:
        raise DomainError("x must fit in 63 bits")
    return _block_kernel(np.int64(x))


def floor_blocks(x: int) -> list[FloorBlock]:
    ms, los, his = block_arrays(x)
    return [FloorBlock(int(m), int(a), int(b)) for m, a, b in zip(ms, los, his)]


# --- accumulation helpers ----------------------------------------------


def fits_int64(x: int, c: int) -> bool:
    """True when sum_{n<=x} [x/n]^c (and hence every partial sum) fits in int64."""
    if c <= 0:
        return True
    return c * math.log2(x) + math.log2(1.0 + math.log(x)) < 62.0


@numba.njit(cache=True)
def _dot_int(phis, ms, counts, e):
    s = np.int64(0)
    for i in range(ms.shape[0]):
        s += phis[i] * ms[i] ** e * counts[i]
    return s


@numba.njit(cache=True)
def _dot_float(phis, ms, counts, e):
    s = 0.0
    c = 0.0
    a = 0.0
    for i in range(ms.shape[0]):
        x = np.float64(phis[i]) * np.float64(ms[i]) ** e * np.float64(counts[i])
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        a += abs(x)
    return s + c, a


def _certificate(terms: int, abs_sum: float, e: float) -> float:
    # |e| covers the amplification of a rounded base through pow.
    return CERT_FACTOR * (terms + 1 + abs(e)) * EPS * abs_sum


def _weighted_sum(phis, ms, counts, e: float, exact: bool, x: int, c: int | None) -> CertifiedValue:
    terms = int(ms.shape[0])
    if exact:
        ie = int(e)
        if fits_int64(x, c):
            return CertifiedValue(int(_dot_int(phis, ms, counts, ie)), 0.0, terms)
        total = 0
        for p, m, n in zip(phis.tolist(), ms.tolist(), counts.tolist()):
            total += p * m**ie * n
        return CertifiedValue(total, 0.0, terms)
    total, abs_sum = _dot_float(phis, ms, counts, float(e))
    return CertifiedValue(float(total), _certificate(terms, float(abs_sum), e), terms)


def _phi_table(x: int, table: ArithTable | None) -> np.ndarray:
    if table is not None:
        if table.kind != "totient" or table.lo != 1 or table.hi < x:
            raise DomainError(f"supplied table does not cover phi(1..{x})")
        return table.values
    return sieve_phi(x).values


def _check_x(x: int) -> int:
    if isinstance(x, bool) or int(x) != x:
        raise DomainError(f"x must be an integer, got {x!r}")
    x = int(x)
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if x > MAX_POINT:
        raise DomainError("x must fit in 63 bits")
    return x


# --- evaluators ----------------------------------------------------------


@numba.njit(cache=True)
def _naive_int(phi, x, e):
    s = np.int64(0)
    for n in range(1, x + 1):
        m = x // n
        s += phi[m - 1] * m**e
    return s


@numba.njit(cache=True)
def _naive_float(phi, x, e):
    s = 0.0
    c = 0.0
    a = 0.0
    for n in range(1, x + 1):
        m = x // n
        t_ = np.float64(phi[m - 1]) * np.float64(m) ** e
        t = s + t_
        if abs(s) >= abs(t_):
            c += (s - t) + t_
        else:
            c += (t_ - t) + s
        s = t
        a += abs(t_)
    return s + c, a


def s_naive(params: SumParams, x: int, table: ArithTable | None = None) -> CertifiedValue:
    """Term-by-term sum over n = 1..x.

    ``table`` may supply a precomputed phi(1..N) with N >= x.
    """
    x = _check_x(x)
    guard = get_config().naive_guard
    if x > guard:
        raise CapacityError(f"s_naive is guarded to x <= {guard}")
    phi = _phi_table(x, table)
    e = params.exponent
    if params.exact:
        c = int(params.c_exact)
        if fits_int64(x, c):
            return CertifiedValue(int(_naive_int(phi, np.int64(x), c - 1)), 0.0, x)
        total = 0
        ie = c - 1
        for n in range(1, x + 1):
            m = x // n
            total += int(phi[m - 1]) * m**ie
        return CertifiedValue(total, 0.0, x)
    total, abs_sum = _naive_float(phi, np.int64(x), e)
    return CertifiedValue(float(total), _certificate(x, float(abs_sum), e), x)


def s_block(params: SumParams, x: int, table: ArithTable | None = None) -> CertifiedValue:
    """Sum over floor blocks: (block length) * phi(m) * m^(c-1)."""
    x = _check_x(x)
    phi = _phi_table(x, table)
    ms, los, his = block_arrays(x)
    counts = his - los + 1
    c = int(params.c_exact) if params.exact else None
    return _weighted_sum(phi[ms - 1], ms, counts, params.exponent, params.exact, x, c)


def s_hybrid(params: SumParams, x: int, table: ArithTable | None = None) -> CertifiedValue:
    """Split evaluation with O(sqrt x) memory.

    For n <= K = isqrt(x) the quotient x // n is handled with
    :func:`phi_point`; every n > K has x // n <= x // (K+1) <= K and is
    counted block-wise from a sieve of length K.  The two ranges never
    overlap.  ``table`` may supply phi(1..N) with N >= K.
    """
    x = _check_x(x)
    k = math.isqrt(x)
    phi = _phi_table(k, table)
    exact = params.exact
    e = params.exponent

    top = x // (k + 1)
    ms = np.arange(top, 0, -1, dtype=np.int64)
    if top:
        counts = x // ms - x // (ms + 1)
    else:
        counts = ms
    c = int(params.c_exact) if exact else None
    tail = _weighted_sum(phi[ms - 1], ms, counts, e, exact, x, c) if top else CertifiedValue(
        0 if exact else 0.0, 0.0, 0
    )

    if exact:
        ie = int(e)
        head = 0
        for n in range(1, k + 1):
            v = x // n
            head += phi_point(v) * v**ie
        return CertifiedValue(head + tail.value, 0.0, k + tail.terms)

    acc = NeumaierSum()
    for n in range(1, k + 1):
        v = x // n
        acc.add(float(phi_point(v)) * float(v) ** e)
    head_value = acc.value
    head_err = _certificate(acc.terms, acc.abs_sum, e)
    total = NeumaierSum()
    total.add(head_value)
    total.add(tail.value)
    err = head_err + tail.abs_error + 2 * EPS * abs(total.value)
    return CertifiedValue(total.value, err, k + tail.terms)


def sum_of_floor_powers(x: int, c: float) -> CertifiedValue:
    """sum_{n<=x} [x/n]^c over floor blocks; exact for integer c >= 0."""
    x = _check_x(x)
    cf = _as_fraction(c)
    if cf < 0:
        raise DomainError(f"c must be >= 0, got {c}")
    ms, los, his = block_arrays(x)
    counts = his - los + 1
    ones = np.ones_like(ms)
    if cf.denominator == 1:
        return _weighted_sum(ones, ms, counts, int(cf), True, x, int(cf))
    return _weighted_sum(ones, ms, counts, float(cf), False, x, None)


EVALUATORS = {"naive": s_naive, "block": s_block, "hybrid": s_hybrid}


def evaluate(params: SumParams, x: int, method: str = "hybrid", table: ArithTable | None = None) -> CertifiedValue:
    try:
        fn = EVALUATORS[method]
    except KeyError:
        raise DomainError(f"unknown method {method!r}") from None
    return fn(params, x, table=table)
