"""Verification suites: cross-evaluator oracles, exact identities, corrected
sandwich bounds, asymptotic checks and error-exponent fits.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numba
import numpy as np

from .analytic import (
    main_term,
    main_term_case,
    mho_sum,
    prop_envelopes,
    psi_grid,
    theta_exponent,
    vaaler_grid,
    vartheta,
    zeta,
)
from .config import get_config
from .errors import CapacityError, DomainError, InsufficientDataError
from .numerics import CertifiedValue
from .sieve import sieve_mu, sieve_phi
from .summatory import totient_summatory, walfisz_ratio
from .sums import SumParams, evaluate, s_block, s_hybrid, s_naive, sum_of_floor_powers

ADMISSION_FACTOR = 10.0
MIN_FIT_SAMPLES = 5
DECOMPOSITION_GUARD = 10**7


def _report_dict(obj) -> dict[str, Any]:
    return asdict(obj)


# --- cross-evaluator oracle ---------------------------------------------


@dataclass
class OracleReport:
    j: float
    k: float
    x_max: int
    checked: int
    passed: bool
    first_discrepancy: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        return _report_dict(self)


def _agree(a: CertifiedValue, b: CertifiedValue, exact: bool) -> bool:
    if exact:
        return a.value == b.value
    return abs(a.value - b.value) <= a.abs_error + b.abs_error


def oracle_check(params: SumParams, x_max: int, x_min: int = 1) -> OracleReport:
    """Compare naive, block and hybrid evaluation for every x in [x_min, x_max]."""
    if x_max < 1:
        raise DomainError("x_max must be >= 1")
    table = sieve_phi(x_max)
    exact = params.exact
    checked = 0
    for x in range(max(1, x_min), x_max + 1):
        a = s_naive(params, x, table=table)
        b = s_block(params, x, table=table)
        c = s_hybrid(params, x, table=table)
        checked += 1
        if not (_agree(a, b, exact) and _agree(b, c, exact) and _agree(a, c, exact)):
            bad = {
                "x": x,
                "naive": _value_repr(a),
                "block": _value_repr(b),
                "hybrid": _value_repr(c),
            }
            return OracleReport(params.j, params.k, x_max, checked, False, bad)
    return OracleReport(params.j, params.k, x_max, checked, True)


def _value_repr(v: CertifiedValue) -> dict[str, Any]:
    return {"value": v.value, "abs_error": v.abs_error}


# --- hyperbola decomposition -------------------------------------------


@dataclass
class DecompositionReport:
    x: int
    z: float
    sigma1: int
    sigma2: int
    sigma3: int
    direct: int
    phi_sum: int
    passed: bool

    @property
    def combined(self) -> int:
        return self.sigma1 + self.sigma2 - self.sigma3

    def to_dict(self) -> dict[str, Any]:
        d = _report_dict(self)
        d["combined"] = self.combined
        return d


@numba.njit(cache=True)
def _double_sum(x, mu):
    # sum over all pairs m * d <= x of mu(m) * d, pair by pair
    s = np.int64(0)
    for m in range(1, x + 1):
        u = mu[m - 1]
        if u == 0:
            continue
        for d in range(1, x // m + 1):
            s += u * d
    return s


def _tri(n: int) -> int:
    return n * (n + 1) // 2


def hyperbola_decomposition_check(x: int, z: float) -> DecompositionReport:
    """Exact check of sum_{md<=x} mu(m) d = S1 + S2 - S3 = Phi(x).

    The split is at m <= x/z and d <= z; it is an identity for any real
    z >= 1.
    """
    x = int(x)
    if x < 1:
        raise DomainError("x must be >= 1")
    if x > DECOMPOSITION_GUARD:
        raise CapacityError(f"the direct double sum is guarded to x <= {DECOMPOSITION_GUARD}")
    zf = Fraction(z)
    if zf < 1:
        raise DomainError(f"z must be >= 1, got {z}")
    m_top = math.floor(Fraction(x) / zf)
    d_top = math.floor(zf)

    mu = sieve_mu(x).values
    mertens_prefix = np.concatenate(([0], np.cumsum(mu))).tolist()
    mu_list = mu.tolist()

    sigma1 = sum(mu_list[m - 1] * _tri(x // m) for m in range(1, m_top + 1))
    sigma2 = sum(d * mertens_prefix[x // d] for d in range(1, d_top + 1))
    sigma3 = mertens_prefix[min(m_top, x)] * _tri(d_top)
    direct = int(_double_sum(np.int64(x), mu))
    phi_sum = totient_summatory(x)
    ok = sigma1 + sigma2 - sigma3 == direct == phi_sum
    return DecompositionReport(x, float(z), sigma1, sigma2, sigma3, direct, phi_sum, ok)


def totient_residual(x: int, z: float, source: str = "summatory") -> float:
    """Phi(x) - x^2 / (2 zeta(2)) + vartheta(x, z)."""
    x = int(x)
    if x < 2:
        raise DomainError("x must be >= 2")
    if not (1 <= z and Fraction(z) ** 3 <= x):
        raise DomainError(f"z must lie in [1, x^(1/3)], got {z}")
    if source == "summatory":
        phi_sum = totient_summatory(x)
    elif source == "sieve":
        phi_sum = int(sieve_phi(x).values.sum())
    else:
        raise DomainError(f"unknown source {source!r}")
    z2 = zeta(2.0).value
    return float(phi_sum) - float(x) * float(x) / (2.0 * z2) + vartheta(x, z).value


# --- sandwich bounds -----------------------------------------------------


@dataclass
class SandwichReport:
    c: int
    x: int
    lower: int
    s: int
    upper: int
    passed: bool
    ratio_zeta: float
    ratio_lower: float

    def to_dict(self) -> dict[str, Any]:
        return _report_dict(self)


def sandwich_bounds(c: int, x: int) -> tuple[int, int]:
    """Exact bounds L <= S_{j,k}(x) <= U for integer c = j-k >= 2.

    Termwise: phi(m) >= 1 gives L = sum [x/n]^(c-1); phi(m) <= m - 1 for
    m >= 2 together with phi(1) = 1 on the x - x//2 indices with
    [x/n] = 1 gives U = sum [x/n]^c - sum [x/n]^(c-1) + (x - x//2).
    """
    lower = int(sum_of_floor_powers(x, c - 1).value)
    upper = int(sum_of_floor_powers(x, c).value) - lower + (x - x // 2)
    return lower, upper


def sandwich_check(params: SumParams, x: int, method: str = "hybrid") -> SandwichReport:
    c = params.c_exact
    if c.denominator != 1 or c < 2:
        raise DomainError(f"the sandwich needs integer j - k >= 2, got {float(c)}")
    c = int(c)
    x = int(x)
    s = int(evaluate(params, x, method).value)
    lower, upper = sandwich_bounds(c, x)
    zc = zeta(float(c)).value
    ratio_zeta = float(Fraction(s) / Fraction(x) ** c) / zc
    ratio_lower = s / (2.0 * lower)
    return SandwichReport(c, x, lower, s, upper, lower <= s <= upper, ratio_zeta, ratio_lower)


def floor_power_asymptotic_check(x: int, c: float) -> float:
    """|sum_{n<=x} [x/n]^c / (zeta(c) x^c) - 1|."""
    if not c > 1:
        raise DomainError(f"c must be > 1, got {c}")
    if x < 10:
        raise DomainError("x must be >= 10")
    total = sum_of_floor_powers(x, c).value
    zc = zeta(float(c)).value
    if isinstance(total, int) and float(c).is_integer():
        rel = float(Fraction(total) / Fraction(x) ** int(c))
    else:
        rel = float(total) / float(x) ** c
    return abs(rel / zc - 1.0)


# --- error-term fits -----------------------------------------------------


@dataclass
class ErrorSample:
    x: int
    s_value: CertifiedValue
    main: CertifiedValue
    delta: float
    seconds: float
    admitted: bool = True

    @property
    def certificate(self) -> float:
        return self.s_value.abs_error + self.main.abs_error


@dataclass
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    samples: list[ErrorSample]
    theta_reference: float

    @property
    def admitted(self) -> list[ErrorSample]:
        return [s for s in self.samples if s.admitted]

    def summary(self) -> dict[str, Any]:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "theta_reference": self.theta_reference,
            "admitted": len(self.admitted),
            "samples": len(self.samples),
        }


def geometric_grid(x_min: int, x_max: int, points: int) -> list[int]:
    if points < 2:
        raise DomainError("a grid needs at least two points")
    if not 1 <= x_min < x_max:
        raise DomainError("need 1 <= x_min < x_max")
    ratio = math.log(x_max / x_min)
    grid = [round(x_min * math.exp(ratio * i / (points - 1))) for i in range(points)]
    grid[0], grid[-1] = x_min, x_max
    out: list[int] = []
    for g in grid:
        if not out or g > out[-1]:
            out.append(g)
    return out


def error_sample(params: SumParams, x: int, method: str = "hybrid") -> ErrorSample:
    t0 = time.perf_counter()
    s = evaluate(params, x, method)
    m = main_term(params, x)
    delta = float(s.value) - m.value
    seconds = time.perf_counter() - t0
    cert = s.abs_error + m.abs_error
    return ErrorSample(x, s, m, delta, seconds, abs(delta) > ADMISSION_FACTOR * cert)


def fit_loglog(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    """OLS of log10|y| on log10 x; returns (slope, intercept, r^2)."""
    lx = np.log10(np.asarray(xs, dtype=np.float64))
    ly = np.log10(np.abs(np.asarray(ys, dtype=np.float64)))
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), min(1.0, max(0.0, r2))


def fit_error_exponent(
    params: SumParams,
    x_min: int,
    x_max: int,
    points: int = 9,
    method: str = "hybrid",
    threads: int | None = None,
    min_x: int = 1000,
) -> FitResult:
    """Slope of log|S - main| against log x over a geometric grid."""
    if main_term_case(params) != "LINEAR":
        raise DomainError("error-exponent fits are defined only for k >= j")
    if x_min < min_x:
        raise DomainError(f"x_min must be >= {min_x}")
    if points < MIN_FIT_SAMPLES:
        raise InsufficientDataError(f"need at least {MIN_FIT_SAMPLES} grid points")
    grid = geometric_grid(x_min, x_max, points)
    workers = threads or get_config().threads
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(lambda x: error_sample(params, x, method), grid))
    else:
        samples = [error_sample(params, x, method) for x in grid]
    good = [s for s in samples if s.admitted]
    theta = theta_exponent(params)
    if len(good) < MIN_FIT_SAMPLES:
        raise InsufficientDataError(
            f"only {len(good)} of {len(samples)} samples clear the certificate threshold"
        )
    slope, intercept, r2 = fit_loglog([s.x for s in good], [s.delta for s in good])
    return FitResult(slope, intercept, r2, samples, theta)


# --- the j - k = 1 regime -----------------------------------------------


def logcase_ratio(x: int, method: str = "hybrid") -> float:
    """S_{2,1}(x) * zeta(2) / (x log x)."""
    if x < 100:
        raise DomainError("logcase_ratio needs x >= 100")
    return _logcase_ratio(x, method)


def _logcase_ratio(x: int, method: str = "hybrid") -> float:
    s = evaluate(SumParams(2, 1), x, method).value
    return float(s) * zeta(2.0).value / (x * math.log(x))


@dataclass
class TrendReport:
    xs: list[int]
    ratios: list[float]
    closer: int
    doublings: int

    def to_dict(self) -> dict[str, Any]:
        return _report_dict(self)


def logcase_trend(x_start: int = 10**4, doublings: int = 10, method: str = "hybrid") -> TrendReport:
    """Count the doublings x -> 2x after which the ratio is nearer to 1."""
    xs = [x_start * 2**i for i in range(doublings + 1)]
    ratios = [_logcase_ratio(x, method) for x in xs]
    closer = sum(abs(ratios[i + 1] - 1) < abs(ratios[i] - 1) for i in range(doublings))
    return TrendReport(xs, ratios, closer, doublings)


# --- Vaaler, Walfisz, exponential sums -----------------------------------


@dataclass
class VaalerReport:
    h_values: list[int]
    grid: int
    max_excess: float
    worst: dict[str, float] | None
    passed: bool
    tolerance: float = 1e-10

    def to_dict(self) -> dict[str, Any]:
        return _report_dict(self)


def vaaler_check(h_values: Sequence[int] = (4, 16, 64), grid: int = 10**4, tolerance: float = 1e-10) -> VaalerReport:
    """|psi(t) - approx| <= bound + tolerance on t = i/grid, i = 0..grid-1."""
    ts = np.arange(grid, dtype=np.float64) / grid
    ps = psi_grid(ts)
    worst = None
    max_excess = -math.inf
    for h in h_values:
        approx, bound = vaaler_grid(ts, int(h))
        excess = np.abs(ps - approx) - bound
        i = int(np.argmax(excess))
        if excess[i] > max_excess:
            max_excess = float(excess[i])
            worst = {"H": int(h), "t": float(ts[i]), "error": float(abs(ps[i] - approx[i])), "bound": float(bound[i])}
    return VaalerReport(list(map(int, h_values)), grid, max_excess, worst, max_excess <= tolerance, tolerance)


@dataclass
class WalfiszReport:
    n: int
    phi_sum: int
    ratio: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return _report_dict(self)


def walfisz_check(n: int = 10**7, tolerance: float = 1e-4) -> WalfiszReport:
    r = walfisz_ratio(n)
    return WalfiszReport(n, totient_summatory(n), r, tolerance, abs(r - 1) <= tolerance)


@dataclass
class MhoRow:
    w: int
    delta: int
    value: float
    abs_error: float
    envelope: float
    branch: str
    ratio: float


@dataclass
class MhoSweep:
    x: int
    j: float
    k: float
    eps: float
    rows: list[MhoRow] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max((r.ratio for r in self.rows), default=0.0)

    def to_dict(self) -> dict[str, Any]:
        d = _report_dict(self)
        d["max_ratio"] = self.max_ratio
        return d


def mho_sweep(
    x: int,
    params: SumParams,
    w_min: int = 2**4,
    w_max: int = 2**18,
    deltas: Sequence[int] = (0, 1),
    eps: float = 0.01,
) -> MhoSweep:
    """|mho_sum| / envelope over dyadic W; a diagnostic, nothing is asserted."""
    out = MhoSweep(x, params.j, params.k, eps)
    w = w_min
    while w <= w_max:
        env = prop_envelopes(x, w, params, eps)
        for d in deltas:
            v = mho_sum(x, w, d, params)
            out.rows.append(MhoRow(w, d, v.value, v.abs_error, env.selected, env.branch, abs(v.value) / env.selected))
        w *= 2
    return out


SUITES: dict[str, Callable[..., Any]] = {
    "oracle": oracle_check,
    "decomposition": hyperbola_decomposition_check,
    "sandwich": sandwich_check,
    "vaaler": vaaler_check,
    "walfisz": walfisz_check,
    "floorpow": floor_power_asymptotic_check,
}
