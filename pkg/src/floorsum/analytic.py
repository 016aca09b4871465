"""Analytic ingredients: zeta, main-term constants, the sawtooth and its
trigonometric (Vaaler) approximation, and the exponential sums whose
size controls the error term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import mpmath
import numba
import numpy as np

from .errors import DomainError, PrecisionError
from .numerics import EPS, CertifiedValue
from .sieve import sieve_mu, sieve_phi
from .sums import SumParams, _certificate

# --- zeta ----------------------------------------------------------------

# B_2, B_4, ..., B_18
_BERNOULLI = [
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
]
_EM_TERMS = 8
_EM_CUTOFF = 32
_MP_PREC = 128


def _em_coefficients():
    out = []
    for i, b in enumerate(_BERNOULLI, start=1):
        fact = math.factorial(2 * i)
        out.append(mpmath.mpf(b.numerator) / (mpmath.mpf(b.denominator) * fact))
    return out


def _zeta_mp(s) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Euler-Maclaurin value of zeta(s) for real s > 1 and a bound on the
    truncation remainder (the first omitted correction term)."""
    with mpmath.workprec(_MP_PREC):
        s = mpmath.mpf(s)
        n = _EM_CUTOFF
        coef = _em_coefficients()
        total = mpmath.fsum(mpmath.mpf(i) ** (-s) for i in range(1, n))
        total += mpmath.mpf(n) ** (1 - s) / (s - 1) + mpmath.mpf(n) ** (-s) / 2
        rising = s  # s (s+1) ... (s+2i-2)
        for i in range(1, _EM_TERMS + 1):
            total += coef[i - 1] * rising * mpmath.mpf(n) ** (-s - 2 * i + 1)
            rising *= (s + 2 * i - 1) * (s + 2 * i)
        remainder = abs(coef[_EM_TERMS] * rising) * mpmath.mpf(n) ** (-s - 2 * _EM_TERMS - 1)
        # headroom for the working-precision arithmetic itself
        remainder += abs(total) * mpmath.mpf(2) ** (-_MP_PREC + 8)
        return total, remainder


def zeta(s: float) -> CertifiedValue:
    """zeta(s) for real s > 1, certified to about one ulp."""
    s = float(s)
    if not s > 1.0 or not math.isfinite(s):
        raise DomainError(f"zeta is evaluated only for real s > 1, got {s}")
    value, rem = _zeta_mp(s)
    v = float(value)
    err = float(rem) + abs(v) * EPS / 2 + float(abs(value - v))
    return CertifiedValue(v, err, _EM_CUTOFF + _EM_TERMS)


def _zeta_ratio_mp(s: float) -> tuple[mpmath.mpf, mpmath.mpf]:
    """zeta(s-1)/zeta(s) = sum_n phi(n) n^-s, for s > 2, with an error bound."""
    a, ea = _zeta_mp(s - 1)
    b, eb = _zeta_mp(s)
    with mpmath.workprec(_MP_PREC):
        q = a / b
        err = (ea + abs(q) * eb) / (b - eb)
        return q, err


# --- the linear-case constant -------------------------------------------

DEFAULT_SERIES_N = 10**6
DEFAULT_SERIES_R = 3


@lru_cache(maxsize=4)
def _phi_float(n: int) -> tuple[np.ndarray, np.ndarray]:
    phi = sieve_phi(n).values.astype(np.float64)
    idx = np.arange(1, n + 1, dtype=np.float64)
    return phi, idx


def series_constant(
    c_prime: float,
    eps: float = 1e-13,
    n: int = DEFAULT_SERIES_N,
    r: int = DEFAULT_SERIES_R,
) -> CertifiedValue:
    """C(c') = sum_{n>=1} phi(n) / (n^c' (n+1)) for c' >= 2.

    The first ``n`` terms are summed directly.  The tail uses
    1/(n+1) = sum_{i<r} (-1)^i n^-(i+1) + (-1)^r / (n^r (n+1)); each
    resulting tail sum_{m>n} phi(m) m^-s is zeta(s-1)/zeta(s) minus a
    partial sum, and what is left is at most n^(1-c'-r) / (c'+r-1).
    """
    c_prime = float(c_prime)
    if not c_prime >= 2.0:
        raise DomainError(f"series_constant needs c' >= 2, got {c_prime}")
    if eps < 1e-13:
        raise DomainError("eps below 1e-13 is not supported in double precision")
    if n < 1 or r < 0:
        raise DomainError("need n >= 1 and r >= 0")
    phi, idx = _phi_float(int(n))

    head_terms = phi * idx ** (-c_prime) / (idx + 1.0)
    head = math.fsum(head_terms)
    err = 4 * EPS * float(np.sum(np.abs(head_terms)))

    with mpmath.workprec(_MP_PREC):
        total = mpmath.mpf(head)
        for i in range(r):
            s = c_prime + i + 1
            part_terms = phi * idx ** (-s)
            partial = math.fsum(part_terms)
            err += 4 * EPS * float(np.sum(part_terms))
            ratio, ratio_err = _zeta_ratio_mp(s)
            err += float(ratio_err)
            tail = ratio - partial
            total += tail if i % 2 == 0 else -tail
        rem = float(n) ** (1.0 - c_prime - r) / (c_prime + r - 1.0)
        value = float(total)
        err += rem + float(abs(total - value)) + abs(value) * EPS
    if err > eps:
        raise PrecisionError(f"C({c_prime}) certified only to {err:.3g} > eps={eps:.3g}")
    return CertifiedValue(value, err, int(n) * (r + 1))


@lru_cache(maxsize=32)
def _cached_constant(c_prime: float) -> CertifiedValue:
    return series_constant(c_prime)


# --- main terms ----------------------------------------------------------


class MainTermSpec(NamedTuple):
    case: str  # "LOG", "LINEAR" or "NONE"
    constant: CertifiedValue | None
    theta: float | None


def main_term_case(params: SumParams) -> str:
    c = params.c_exact
    if c == 1:
        return "LOG"
    if c <= 0:
        return "LINEAR"
    if c >= 2:
        return "NONE"
    raise DomainError(f"j - k = {params.c} lies outside every asymptotic regime")


def main_term_spec(params: SumParams) -> MainTermSpec:
    case = main_term_case(params)
    if case == "LOG":
        z2 = zeta(2.0)
        inv = 1.0 / z2.value
        return MainTermSpec(case, CertifiedValue(inv, inv * inv * z2.abs_error * 1.01 + EPS), None)
    if case == "LINEAR":
        return MainTermSpec(case, _cached_constant(2.0 - params.c), theta_exponent(params))
    return MainTermSpec(case, None, None)


def main_term(params: SumParams, x: float) -> CertifiedValue:
    """Leading term: x log x / zeta(2) when j-k = 1, C(k-j+2) x when k >= j."""
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    case = main_term_case(params)
    if case == "NONE":
        raise DomainError(
            f"no asymptotic main term for j - k = {params.c}; use the sandwich bounds"
        )
    xf = float(x)
    if case == "LOG":
        z2 = zeta(2.0)
        lx = math.log(xf)
        value = xf * lx / z2.value
        err = abs(value) * (z2.abs_error / (z2.value - z2.abs_error) + 4 * EPS)
        return CertifiedValue(value, err, 1)
    const = _cached_constant(2.0 - params.c)
    value = const.value * xf
    return CertifiedValue(value, const.abs_error * xf + 2 * EPS * abs(value), 1)


def theta_exponent(params: SumParams) -> float:
    """Error-term exponent: 0 if k-j >= 1, (5-k+j)/(21-k+j) if 0 <= k-j < 1."""
    d = -params.c_exact
    if d < 0:
        raise DomainError(f"the error exponent needs k >= j, got k - j = {float(d)}")
    if d >= 1:
        return 0.0
    return float((5 - d) / (21 - d))


# --- sawtooth and Vaaler's polynomial -----------------------------------


def psi(t: float) -> float:
    """Centered fractional part {t} - 1/2."""
    return t - math.floor(t) - 0.5


def vaaler_phi(t: float) -> float:
    """Weight pi t (1-|t|) cot(pi t) + |t| on |t| < 1 (value 1 at t = 0)."""
    if not abs(t) < 1:
        raise DomainError(f"vaaler_phi needs |t| < 1, got {t}")
    if t == 0:
        return 1.0
    a = abs(t)
    return math.pi * a * (1.0 - a) / math.tan(math.pi * a) + a


def _weights(h: int) -> np.ndarray:
    return np.array([vaaler_phi(i / (h + 1)) for i in range(1, h + 1)])


def fejer_direct(t: float, h: int) -> float:
    """sum_{|i|<=h} (1 - |i|/(h+1)) e(i t), summed term by term (it is real)."""
    i = np.arange(1, h + 1, dtype=np.float64)
    return 1.0 + 2.0 * math.fsum((1.0 - i / (h + 1)) * np.cos(2 * np.pi * i * t))


def fejer_closed(t: float, h: int) -> float:
    """Closed form (sin(pi (h+1) t) / sin(pi t))^2 / (h+1) of the same kernel."""
    s = math.sin(math.pi * t)
    if abs(s) < 1e-8:
        return fejer_direct(t, h)
    m = h + 1
    return (math.sin(math.pi * m * t) / s) ** 2 / m


def vaaler_approx(t: float, h: int) -> tuple[float, float]:
    """Degree-h approximation of psi(t) and the majorant of its error.

    Pairing the +i and -i terms gives the real form
    -sum_{i=1}^{h} Phi(i/(h+1)) sin(2 pi i t) / (pi i).
    """
    if h < 1:
        raise DomainError(f"H must be >= 1, got {h}")
    i = np.arange(1, h + 1, dtype=np.float64)
    approx = -math.fsum(_weights(h) * np.sin(2 * np.pi * i * t) / (np.pi * i))
    return approx, fejer_closed(t, h) / (2 * h + 2)


def vaaler_grid(ts: np.ndarray, h: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`vaaler_approx` over an array of points."""
    if h < 1:
        raise DomainError(f"H must be >= 1, got {h}")
    ts = np.asarray(ts, dtype=np.float64)
    i = np.arange(1, h + 1, dtype=np.float64)[:, None]
    w = _weights(h)[:, None]
    approx = -np.sum(w * np.sin(2 * np.pi * i * ts) / (np.pi * i), axis=0)
    m = h + 1
    s = np.sin(np.pi * ts)
    small = np.abs(s) < 1e-8
    safe = np.where(small, 1.0, s)
    kernel = (np.sin(np.pi * m * ts) / safe) ** 2 / m
    if small.any():
        kernel[small] = [fejer_direct(t, h) for t in ts[small]]
    return approx, kernel / (2 * h + 2)


def psi_grid(ts: np.ndarray) -> np.ndarray:
    ts = np.asarray(ts, dtype=np.float64)
    return ts - np.floor(ts) - 0.5


# --- vartheta and the exponential sums ----------------------------------


@numba.njit(cache=True)
def _vartheta_kernel(x, top, mu):
    s = 0.0
    c = 0.0
    a = 0.0
    for m in range(1, top + 1):
        u = mu[m - 1]
        if u == 0:
            continue
        # mu(m)/m * psi(x/m) with psi(x/m) = (2 (x mod m) - m) / (2m)
        term = u * np.float64(2 * (x % m) - m) / (2.0 * np.float64(m) * np.float64(m))
        t = s + term
        if abs(s) >= abs(term):
            c += (s - t) + term
        else:
            c += (term - t) + s
        s = t
        a += abs(term)
    return s + c, a


def vartheta(x: int, z: float) -> CertifiedValue:
    """x * sum_{m <= x/z} mu(m)/m * psi(x/m)."""
    x = int(x)
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    zf = Fraction(z) if not isinstance(z, Fraction) else z
    if not 1 <= zf <= x:
        raise DomainError(f"vartheta needs 1 <= z <= x, got z={z}")
    top = math.floor(Fraction(x) / zf)
    mu = sieve_mu(top).values
    total, abs_sum = _vartheta_kernel(np.int64(x), np.int64(top), mu)
    value = x * float(total)
    err = x * _certificate(top, float(abs_sum), 0.0) + EPS * abs(value)
    return CertifiedValue(value, err, top)


@numba.njit(cache=True)
def _mho_kernel(x, w_lo, w_hi, delta, phi, e):
    s = 0.0
    c = 0.0
    a = 0.0
    for w in range(w_lo, w_hi + 1):
        q = w + delta
        ps = np.float64(2 * (x % q) - q) / (2.0 * np.float64(q))
        term = np.float64(phi[w - 1]) * np.float64(w) ** e * ps
        t = s + term
        if abs(s) >= abs(term):
            c += (s - t) + term
        else:
            c += (term - t) + s
        s = t
        a += abs(term)
    return s + c, a


def mho_sum(x: int, w: int, delta: int, params: SumParams) -> CertifiedValue:
    """sum_{W < v <= 2W} phi(v) / v^(k-j+1) * psi(x / (v + delta))."""
    x, w = int(x), int(w)
    if x < 1 or w < 1:
        raise DomainError("x and W must be positive")
    if delta not in (0, 1):
        raise DomainError(f"delta must be 0 or 1, got {delta}")
    phi = sieve_phi(2 * w).values
    e = params.exponent
    total, abs_sum = _mho_kernel(np.int64(x), np.int64(w + 1), np.int64(2 * w), np.int64(delta), phi, e)
    return CertifiedValue(float(total), _certificate(w + 1, float(abs_sum), e), w)


class Envelopes(NamedTuple):
    small_w: float
    large_w: float
    branch: str  # which one applies: "small_w" below x^(2/3), else "large_w"

    @property
    def selected(self) -> float:
        return self.small_w if self.branch == "small_w" else self.large_w


def prop_envelopes(x: int, w: int, params: SumParams, eps: float) -> Envelopes:
    d = float(-params.c_exact)
    if not 0 <= d < 1:
        raise DomainError(f"the envelopes need 0 <= k - j < 1, got {d}")
    if not 1 <= w <= x:
        raise DomainError(f"the envelopes need 1 <= W <= x, got W={w}, x={x}")
    xf, wf = float(x), float(w)
    scale = xf**eps
    small = scale * (xf**-0.5 * wf ** (1 - d) + xf ** (1 / 6) * wf ** (1 / 12 - d))
    large = scale * (xf**-0.5 * wf ** (7 / 8 - d) + wf ** (5 / 16 - d))
    # W >= x^(2/3) decided in integers
    branch = "large_w" if w**3 >= x**2 else "small_w"
    return Envelopes(small, large, branch)


def prop_bound_envelope(x: int, w: int, params: SumParams, eps: float) -> float:
    """Bound shape x^eps * (...) for |mho_sum| (implied constants unknown)."""
    return prop_envelopes(x, w, params, eps).selected
