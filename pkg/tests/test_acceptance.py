"""Acceptance criteria, each at its stated tolerance and time budget.

Every test prints one PASS/FAIL line, repeated in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from floorsum.analytic import prop_bound_envelope
from floorsum.sieve import sieve_mu, sieve_phi
from floorsum.summatory import mertens, totient_summatory
from floorsum.sums import SumParams, s_block, s_hybrid
from floorsum.verify import (
    fit_error_exponent,
    floor_power_asymptotic_check,
    hyperbola_decomposition_check,
    logcase_ratio,
    logcase_trend,
    mho_sweep,
    oracle_check,
    sandwich_check,
    vaaler_check,
    walfisz_ratio,
)


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_01_oracle_equivalence():
    t0 = time.perf_counter()
    failures = []
    for jk in [(1, 1), (2, 1), (3, 1), (1, 2), (1.5, 0.5)]:
        r = oracle_check(SumParams(*jk), 10**4)
        if not r.passed:
            failures.append(r.first_discrepancy)
    dt = time.perf_counter() - t0
    record(1, "oracle equivalence x<=1e4", not failures and dt < 120, f"{dt:.1f}s, discrepancies={failures}")


def test_criterion_02_exact_identities():
    t0 = time.perf_counter()
    bad = []
    for x in list(range(1, 101)) + [10**3, 10**4, 10**5]:
        for z in (1, 2, x ** (1 / 3)):
            if not hyperbola_decomposition_check(x, z).passed:
                bad.append((x, z))
    phi = np.cumsum(sieve_phi(10**5).values)
    mu = np.cumsum(sieve_mu(10**5).values)
    for n in range(1, 10**5 + 1):
        if totient_summatory(n) != phi[n - 1] or mertens(n) != mu[n - 1]:
            bad.append(("summatory", n))
            break
    dt = time.perf_counter() - t0
    record(2, "exact identity suite", not bad and dt < 60, f"{dt:.1f}s, failures={bad[:3]}")


def test_criterion_03_walfisz():
    t0 = time.perf_counter()
    r = walfisz_ratio(10**7)
    dt = time.perf_counter() - t0
    record(3, "Walfisz ratio at 1e7", abs(r - 1) <= 1e-4 and dt < 30, f"|ratio-1|={abs(r - 1):.3e}, {dt:.1f}s")


def test_criterion_04_vaaler():
    t0 = time.perf_counter()
    r = vaaler_check((4, 16, 64), 10**4, 1e-10)
    dt = time.perf_counter() - t0
    record(4, "Vaaler majorant", r.passed and dt < 10, f"max excess={r.max_excess:.3e}, {dt:.2f}s")


def test_criterion_05_sandwich():
    t0 = time.perf_counter()
    bad = []
    for c in (2, 3):
        p = SumParams(c, 0)
        for x in list(range(1, 2001)) + [10**4, 10**5, 10**6]:
            if not sandwich_check(p, x).passed:
                bad.append((c, x))
    dt = time.perf_counter() - t0
    record(5, "corrected sandwich L<=S<=U", not bad and dt < 120, f"{dt:.1f}s, violations={bad[:3]}")


def test_criterion_06_floor_power_asymptotic():
    vals = [floor_power_asymptotic_check(10**e, 2) for e in range(3, 7)]
    at_1e5 = floor_power_asymptotic_check(10**5, 2)
    drops = all(b * 2 <= a for a, b in zip(vals, vals[1:]))
    record(6, "floor-power asymptotic", at_1e5 <= 1e-3 and drops, "values " + ", ".join(f"{v:.2e}" for v in vals))


def test_criterion_07_error_exponent():
    t0 = time.perf_counter()
    fit = fit_error_exponent(SumParams(1, 1), 10**4, 10**8, 9)
    dt = time.perf_counter() - t0
    worst = max(abs(s.delta) / math.sqrt(s.x) for s in fit.samples)
    ok = 0.05 <= fit.slope <= 0.45 and fit.r_squared >= 0.5 and worst <= 1 and dt < 1200
    record(
        7,
        "error exponent fit (1,1)",
        ok,
        f"slope={fit.slope:.4f} (ref {fit.theta_reference:.4f}), r2={fit.r_squared:.3f}, "
        f"max|delta|/sqrt(x)={worst:.3f}, admitted={len(fit.admitted)}/9, {dt:.1f}s",
    )


def test_criterion_08_log_case():
    ratio = logcase_ratio(10**7)
    trend = logcase_trend(10**4, 10)
    ok = 0.85 <= ratio <= 1.15 and trend.closer >= 7
    record(
        8,
        "log case ratio and dyadic trend",
        ok,
        f"ratio(1e7)={ratio:.4f}, closer in {trend.closer}/{trend.doublings} doublings from 1e4",
    )


def test_criterion_09_performance():
    p = SumParams(2, 1)
    t0 = time.perf_counter()
    s_hybrid(p, 10**10)
    t_hybrid = time.perf_counter() - t0
    same = s_hybrid(p, 10**8).value == s_block(p, 10**8).value
    t0 = time.perf_counter()
    sieve_phi(10**8)
    t_sieve = time.perf_counter() - t0
    ok = t_hybrid < 120 and same and t_sieve < 10
    record(9, "performance", ok, f"hybrid 1e10 {t_hybrid:.1f}s, hybrid==block at 1e8: {same}, sieve 1e8 {t_sieve:.1f}s")


def test_criterion_10_mho_diagnostic():
    p = SumParams(1, 1)
    sweep = mho_sweep(10**6, p, 2**4, 2**18, (0, 1))
    ok = len(sweep.rows) == 30 and math.isfinite(sweep.max_ratio)
    assert sweep.rows[0].envelope == prop_bound_envelope(10**6, 2**4, p, sweep.eps)
    record(10, "mho sweep (report only)", ok, f"max |mho|/envelope={sweep.max_ratio:.3f} over {len(sweep.rows)} rows")
