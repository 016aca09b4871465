"""Command-line front end.

Every command prints one payload (json, csv or plain) that echoes the
parameters it was run with.  Exit codes: 0 success, 1 verification
failure, 2 domain error, 3 capacity or I/O error, 4 insufficient data.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import time
from fractions import Fraction
from typing import Any, Callable

import click

from . import analytic, summatory, verify
from .config import THREADS_ENV, configured, get_config
from .errors import CapacityError, DomainError, FloorsumError
from .numerics import CertifiedValue
from .sums import EVALUATORS, SumParams, evaluate

FIT_HEADER = ["x", "s_value", "main", "delta", "log10_x", "log10_abs_delta", "seconds"]


# --- parameter types -----------------------------------------------------


class LooseInt(click.ParamType):
    """Integer that also accepts exact scientific notation such as 1e4."""

    name = "integer"

    def convert(self, value, param, ctx):
        if isinstance(value, int):
            return value
        text = str(value).strip()
        try:
            return int(text)
        except ValueError:
            pass
        try:
            f = Fraction(text)
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not an integer", param, ctx)
        if f.denominator != 1:
            self.fail(f"{value!r} is not an integer", param, ctx)
        return int(f)


class IntList(click.ParamType):
    name = "integer list"

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return list(value)
        try:
            return [LooseInt().convert(v, param, ctx) for v in str(value).split(",") if v.strip()]
        except click.BadParameter:
            self.fail(f"{value!r} is not a comma-separated integer list", param, ctx)


INT = LooseInt()


# --- serialisation -------------------------------------------------------


def _fmt_float(v: float) -> str:
    if math.isnan(v) or math.isinf(v):
        return '"' + repr(v) + '"'
    return format(v, ".17g")


def _json(obj: Any) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_json(str(k))}: {_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _scalar(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def _flatten(payload: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for k, v in payload.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out[key] = ";".join(_scalar(x) for x in v) if not any(isinstance(x, dict) for x in v) else f"<{len(v)} rows>"
        else:
            out[key] = v
    return out


def render(payload: dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return _json(payload) + "\n"
    flat = _flatten(payload)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(flat.keys())
        w.writerow(_scalar(v) for v in flat.values())
        return buf.getvalue()
    return "".join(f"{k}: {_scalar(v)}\n" for k, v in flat.items())


def certified(v: CertifiedValue) -> dict[str, Any]:
    value: Any = str(v.value) if isinstance(v.value, int) else float(v.value)
    return {"value": value, "abs_error": float(v.abs_error), "terms": int(v.terms)}


# --- plumbing ------------------------------------------------------------


class State:
    def __init__(self, fmt: str, timing: bool) -> None:
        self.fmt = fmt
        self.timing = timing

    def seconds(self, t0: float) -> float:
        return time.perf_counter() - t0 if self.timing else 0.0

    def emit(self, payload: dict[str, Any]) -> None:
        click.echo(render(payload, self.fmt), nl=False)


def run(fn: Callable[[], int | None]) -> None:
    try:
        code = fn() or 0
    except FloorsumError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(e.exit_code)
    except (MemoryError, OSError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(3)
    except (ValueError, ArithmeticError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    sys.exit(code)


def _resolve_threads(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise click.BadParameter(f"{THREADS_ENV}={env!r} is not an integer") from None
    return os.cpu_count() or 1


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--threads", type=INT, default=None, help=f"Worker threads (flag > ${THREADS_ENV} > CPU count).")
@click.option("--memory-cap", type=INT, default=2**33, show_default=True, help="Memory cap in bytes.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "plain"]), default="json", show_default=True)
@click.option("--no-timing", is_flag=True, help="Report seconds as 0 so payloads are byte-reproducible.")
@click.pass_context
def cli(ctx: click.Context, threads: int | None, memory_cap: int, fmt: str, no_timing: bool) -> None:
    """Exact and certified totient floor-sums."""
    threads = _resolve_threads(threads)
    try:
        ctx.with_resource(configured(threads=threads, memory_cap_bytes=memory_cap, output_format=fmt))
    except DomainError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    ctx.obj = State(fmt, not no_timing)


def _params(j: float, k: float) -> SumParams:
    return SumParams(j, k)


def _jk(f):
    f = click.option("--k", "k", type=str, required=True, help="Exponent k >= 0.")(f)
    return click.option("--j", "j", type=str, required=True, help="Exponent j >= 1.")(f)


def _number(text: str) -> float | int:
    f = Fraction(text)
    return int(f) if f.denominator == 1 else float(text)


# --- commands ------------------------------------------------------------


@cli.command()
@_jk
@click.option("--x", "x", type=INT, required=True)
@click.option("--method", type=click.Choice(sorted(EVALUATORS)), default="hybrid", show_default=True)
@click.pass_obj
def compute(st: State, j: str, k: str, x: int, method: str) -> None:
    """Evaluate S_{j,k}(x)."""

    def go():
        p = _params(_number(j), _number(k))
        t0 = time.perf_counter()
        v = evaluate(p, x, method)
        st.emit({"j": p.j, "k": p.k, "x": x, "method": method, "mode": p.mode, **certified(v), "seconds": st.seconds(t0)})

    run(go)


def _fit_rows(result: verify.FitResult, timing: bool) -> list[list[str]]:
    rows = []
    for s in result.samples:
        sv = s.s_value.value
        ad = abs(s.delta)
        rows.append(
            [
                str(s.x),
                str(sv) if isinstance(sv, int) else format(float(sv), ".17g"),
                format(s.main.value, ".17g"),
                format(s.delta, ".17g"),
                format(math.log10(s.x), ".17g"),
                format(math.log10(ad), ".17g") if ad > 0 else "-inf",
                format(s.seconds if timing else 0.0, ".17g"),
            ]
        )
    return rows


@cli.command()
@_jk
@click.option("--xmin", type=INT, required=True)
@click.option("--xmax", type=INT, required=True)
@click.option("--points", type=INT, default=9, show_default=True)
@click.option("--method", type=click.Choice(sorted(EVALUATORS)), default="hybrid", show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="CSV destination.")
@click.pass_obj
def fit(st: State, j: str, k: str, xmin: int, xmax: int, points: int, method: str, out_path: str) -> None:
    """Fit the growth exponent of S - main over a geometric grid."""

    def go():
        parent = os.path.dirname(os.path.abspath(out_path))
        if not os.path.isdir(parent):
            raise CapacityError(f"output directory {parent} does not exist")
        p = _params(_number(j), _number(k))
        result = verify.fit_error_exponent(p, xmin, xmax, points, method=method, threads=get_config().threads)
        with open(out_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(FIT_HEADER)
            w.writerows(_fit_rows(result, st.timing))
        summary = result.summary()
        st.emit(
            {
                "j": p.j,
                "k": p.k,
                "xmin": xmin,
                "xmax": xmax,
                "points": points,
                "method": method,
                "out": out_path,
                **summary,
            }
        )

    run(go)


SUITE_NAMES = ["oracle", "decomposition", "sandwich", "vaaler", "walfisz", "floorpow"]


@cli.command("verify")
@click.option("--suite", type=click.Choice(SUITE_NAMES), required=True)
@click.option("--j", "j", type=str, default="1", show_default=True, help="oracle: exponent j.")
@click.option("--k", "k", type=str, default="1", show_default=True, help="oracle: exponent k.")
@click.option("--x", "x", type=INT, default=None, help="decomposition / floorpow: x.")
@click.option("--z", "z", type=str, default=None, help="decomposition: split point (default x^(1/3)).")
@click.option("--xmax", type=INT, default=None, help="oracle / sandwich: check every x up to this.")
@click.option("--c", "c", type=str, default="2", show_default=True, help="sandwich / floorpow: exponent c.")
@click.option("--H", "h_values", type=IntList(), default="4,16,64", show_default=True, help="vaaler: degrees.")
@click.option("--grid", type=INT, default=10**4, show_default=True, help="vaaler: grid size.")
@click.option("--n", "n", type=INT, default=10**7, show_default=True, help="walfisz: N.")
@click.option("--tol", type=float, default=None, help="vaaler / walfisz / floorpow: tolerance.")
@click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None, help="Also write the report as JSON.")
@click.pass_obj
def verify_cmd(st, suite, j, k, x, z, xmax, c, h_values, grid, n, tol, json_path) -> None:
    """Run a verification suite; exit 1 on the first failed assertion."""

    def go():
        if json_path is not None and not os.path.isdir(os.path.dirname(os.path.abspath(json_path))):
            raise CapacityError(f"directory of {json_path} does not exist")
        t0 = time.perf_counter()
        report, ok, counter = _run_suite(suite, j, k, x, z, xmax, c, h_values, grid, n, tol)
        payload = {"suite": suite, "passed": ok, "report": report, "seconds": st.seconds(t0)}
        if json_path is not None:
            with open(json_path, "w", newline="") as fh:
                fh.write(_json(payload) + "\n")
        st.emit(payload)
        if not ok:
            click.echo(f"FAILED: {_json(counter)}", err=True)
            return 1
        return 0

    run(go)


def _need(v, name: str, suite: str):
    if v is None:
        raise DomainError(f"--{name} is required for the {suite} suite")
    return v


def _run_suite(suite, j, k, x, z, xmax, c, h_values, grid, n, tol):
    if suite == "oracle":
        p = _params(_number(j), _number(k))
        r = verify.oracle_check(p, _need(xmax, "xmax", suite))
        return r.to_dict(), r.passed, r.first_discrepancy
    if suite == "decomposition":
        x = _need(x, "x", suite)
        zv = Fraction(z) if z is not None else Fraction(_icbrt(x))
        r = verify.hyperbola_decomposition_check(x, zv)
        return r.to_dict(), r.passed, r.to_dict()
    if suite == "sandwich":
        cc = Fraction(c)
        if cc.denominator != 1:
            raise DomainError("the sandwich needs an integer c")
        p = SumParams(int(cc), 0)
        top = _need(xmax, "xmax", suite) if x is None else x
        xs = range(1, top + 1) if x is None else [x]
        worst = None
        for xi in xs:
            r = verify.sandwich_check(p, xi)
            if not r.passed:
                return {"c": int(cc), "checked": xi, "last": r.to_dict()}, False, r.to_dict()
            worst = r
        return {"c": int(cc), "checked": len(xs), "last": worst.to_dict()}, True, None
    if suite == "vaaler":
        r = verify.vaaler_check(h_values, grid, 1e-10 if tol is None else tol)
        return r.to_dict(), r.passed, r.worst
    if suite == "walfisz":
        r = verify.walfisz_check(n, 1e-4 if tol is None else tol)
        return r.to_dict(), r.passed, r.to_dict()
    x = _need(x, "x", suite)
    cv = float(Fraction(c))
    value = verify.floor_power_asymptotic_check(x, cv)
    limit = 1e-3 if tol is None else tol
    rep = {"x": x, "c": cv, "value": value, "tolerance": limit}
    return rep, value <= limit, rep


def _icbrt(x: int) -> int:
    r = round(x ** (1 / 3))
    while r**3 > x:
        r -= 1
    while (r + 1) ** 3 <= x:
        r += 1
    return max(r, 1)


@cli.command()
@click.option("--c-prime", "c_prime", type=float, required=True, help="Exponent c' >= 2.")
@click.option("--eps", type=float, default=1e-13, show_default=True)
@click.pass_obj
def constant(st: State, c_prime: float, eps: float) -> None:
    """The series constant C(c') = sum phi(n) / (n^c' (n+1))."""

    def go():
        t0 = time.perf_counter()
        v = analytic.series_constant(c_prime, eps)
        st.emit({"c_prime": c_prime, "eps": eps, **certified(v), "seconds": st.seconds(t0)})

    run(go)


@cli.command()
@_jk
@click.option("--x", "x", type=float, required=True)
@click.pass_obj
def mainterm(st: State, j: str, k: str, x: float) -> None:
    """Leading asymptotic term of S_{j,k}(x)."""

    def go():
        p = _params(_number(j), _number(k))
        case = analytic.main_term_case(p)
        v = analytic.main_term(p, x)
        theta = analytic.theta_exponent(p) if case == "LINEAR" else None
        st.emit({"j": p.j, "k": p.k, "x": x, "case": case, **certified(v), "theta": theta})

    run(go)


@cli.command("summatory")
@click.option("--kind", type=click.Choice(["phi", "mertens"]), required=True)
@click.option("--n", "n", type=INT, required=True)
@click.pass_obj
def summatory_cmd(st: State, kind: str, n: int) -> None:
    """Summatory totient Phi(N) or Mertens M(N), exactly."""

    def go():
        t0 = time.perf_counter()
        v = summatory.totient_summatory(n) if kind == "phi" else summatory.mertens(n)
        st.emit({"kind": kind, "n": n, "value": str(v), "seconds": st.seconds(t0)})

    run(go)


@cli.command("psi-check")
@click.option("--t", "t", type=float, required=True)
@click.option("--H", "h", type=INT, required=True)
@click.pass_obj
def psi_check(st: State, t: float, h: int) -> None:
    """Compare psi(t) with its degree-H trigonometric approximation."""

    def go():
        approx, bound = analytic.vaaler_approx(t, h)
        p = analytic.psi(t)
        err = abs(p - approx)
        st.emit({"t": t, "H": h, "psi": p, "approx": approx, "error": err, "bound": bound, "within": err <= bound + 1e-10})

    run(go)


@cli.command()
@click.option("--x", "x", type=INT, required=True)
@_jk
@click.option("--W", "w", type=INT, default=None, help="Single dyadic scale; omit for a sweep 2^4..2^18.")
@click.option("--delta", type=click.Choice(["0", "1"]), default=None, help="Shift; omit for both.")
@click.option("--eps", type=float, default=0.01, show_default=True)
@click.pass_obj
def mho(st: State, x: int, j: str, k: str, w: int | None, delta: str | None, eps: float) -> None:
    """Exponential sum over (W, 2W] against its envelope (diagnostic only)."""

    def go():
        p = _params(_number(j), _number(k))
        deltas = (0, 1) if delta is None else (int(delta),)
        lo, hi = (2**4, 2**18) if w is None else (w, w)
        sweep = verify.mho_sweep(x, p, lo, hi, deltas, eps)
        st.emit(sweep.to_dict())

    run(go)


def main() -> None:
    cli(prog_name="floorsum")


if __name__ == "__main__":
    main()
