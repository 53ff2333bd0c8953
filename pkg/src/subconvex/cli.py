"""Command-line entry point.

Every subcommand produces a list of :class:`RunRecord` objects, printed as
text or emitted as JSON / CSV.  The exit status is 0 exactly when every
record that carries a pass flag passed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

__all__ = ["RunRecord", "dispatch", "emit", "parse_records", "main", "read_cache", "write_cache"]


@dataclass
class RunRecord:
    command: str
    params: dict
    result: complex | Fraction | int | None = None
    error: float | None = None
    ms: float | None = None
    passed: bool | None = None
    extra: dict = field(default_factory=dict)

    def as_dict(self, timing: bool = False) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "result": _encode(self.result),
            "err": self.error,
            "ms": round(self.ms, 3) if timing and self.ms is not None else None,
            "pass": self.passed,
        }


def _encode(v):
    if v is None:
        return None
    if isinstance(v, bool):
        raise TypeError("pass flags are not results")
    if isinstance(v, (int, Fraction)):
        v = Fraction(v)
        return {"num": v.numerator, "den": v.denominator}
    v = complex(v)
    return {"re": v.real, "im": v.imag}


def _decode(d):
    if d is None:
        return None
    if "num" in d:
        return Fraction(d["num"], d["den"])
    return complex(d["re"], d["im"])


def emit(records: list[RunRecord], fmt: str, timing: bool = False) -> bytes:
    """JSON array or CSV with columns command,params,re,im,err,ms,pass."""
    if fmt == "json":
        data = [r.as_dict(timing) for r in records]
        return (json.dumps(data, sort_keys=True, indent=1) + "\n").encode()
    if fmt != "csv":
        raise ValueError("format must be json or csv")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["command", "params", "re", "im", "err", "ms", "pass"])
    for r in records:
        d = r.as_dict(timing)
        res = d["result"]
        if res is None:
            re_, im_ = "", ""
        elif "num" in res:
            re_, im_ = f"{res['num']}/{res['den']}", "0"
        else:
            re_, im_ = repr(res["re"]), repr(res["im"])
        w.writerow([d["command"], json.dumps(d["params"], sort_keys=True, separators=(",", ":")),
                    re_, im_, "" if d["err"] is None else repr(d["err"]),
                    "" if d["ms"] is None else repr(d["ms"]),
                    "" if d["pass"] is None else str(d["pass"]).lower()])
    return buf.getvalue().encode()


def parse_records(blob: bytes | str) -> list[RunRecord]:
    data = json.loads(blob)
    return [RunRecord(d["command"], d["params"], _decode(d["result"]), d["err"], d["ms"], d["pass"])
            for d in data]


# -- coefficient cache ----------------------------------------------------------

def write_cache(path: str, form) -> None:
    """Rows n,r,re,im; ``re`` holds the exact integer coefficient a(n)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "r", "re", "im"])
        for n in range(1, form.nmax + 1):
            w.writerow([n, 1, form.integers[n], 0])


def read_cache(path: str, weight: int, nmax: int, seed: int = 0):
    """Load a cached GL(2) table if it covers ``nmax`` and survives validation,
    else return None.  Validation recomputes the first 1% of the table exactly
    and checks the Hecke relation on a random 1% of the remaining indices."""
    from .forms import HolomorphicForm, holomorphic_form
    from .modular import divisors

    if not os.path.exists(path):
        return None
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["n", "r", "re", "im"]:
        return None
    ints = [0]
    for i, row in enumerate(rows[1:], start=1):
        if int(row[0]) != i or int(row[1]) != 1 or int(row[3]) != 0:
            return None
        ints.append(int(row[2]))
    if len(ints) - 1 < nmax:
        return None
    ints = ints[:nmax + 1]
    try:
        form = HolomorphicForm(weight, tuple(ints))
    except ValueError:
        return None
    head = max(100, nmax // 100)
    ref = holomorphic_form(weight, min(head, nmax))
    if list(ref.integers) != ints[:len(ref.integers)]:
        return None
    rng = random.Random(seed)
    k1 = weight - 1
    for _ in range(max(1, nmax // 100)):
        n = rng.randint(2, nmax)
        m = min(d for d in divisors(n) if d > 1)
        rest = n // m
        rhs = sum(d ** k1 * ints[m * rest // (d * d)] for d in divisors(math.gcd(m, rest)))
        if ints[m] * ints[rest] != rhs:
            return None
    return form


def _form(weight: int, nmax: int, cache: str | None):
    from .forms import holomorphic_form

    if cache:
        form = read_cache(cache, weight, nmax)
        if form is not None:
            return form
    form = holomorphic_form(weight, nmax)
    if cache:
        write_cache(cache, form)
    return form


# -- subcommands ----------------------------------------------------------------

def _cmd_kloosterman(a):
    from .modular import KloostermanQuery, kloosterman, weil_envelope

    val = kloosterman(KloostermanQuery(a.a, a.b, a.q), a.precision)
    env = weil_envelope(a.a, a.b, a.q)
    iv = int(round(float(val)))
    res = iv if abs(float(val) - iv) < 1e-20 else float(val)
    return [RunRecord("kloosterman", {"a": a.a, "b": a.b, "q": a.q}, res, None, passed=abs(float(val)) <= env)]


def _cmd_charsum(a):
    from .modular import char_sum_direct, char_sum_factored

    d = complex(char_sum_direct(a.q, a.r, a.n1, a.m, a.n2, a.sign, a.precision))
    f = complex(char_sum_factored(a.q, a.r, a.n1, a.m, a.n2, a.sign, a.precision))
    tol = a.tolerance if a.tolerance is not None else 1e-10
    params = {"q": a.q, "r": a.r, "n1": a.n1, "m": a.m, "n2": a.n2, "sign": a.sign}
    return [RunRecord("charsum", params, d, abs(d - f), passed=abs(d - f) <= tol)]


def _cmd_coeffs(a):
    form = _form(a.weight, a.nmax, a.cache)
    bad = form.hecke_violations(min(a.nmax, 2000))
    out = []
    for n in range(1, min(a.show, a.nmax) + 1):
        out.append(RunRecord("coeffs", {"weight": a.weight, "n": n}, form.integers[n]))
    out.append(RunRecord("coeffs", {"weight": a.weight, "check": "hecke", "nmax": a.nmax},
                         len(bad), passed=not bad))
    return out


def _cmd_bessel(a):
    from .bessel import BesselQuery, besselJ_integral, besselJ_series

    q = BesselQuery(a.k, a.x, a.precision)
    s = float(besselJ_series(q))
    i = besselJ_integral(q)
    tol = a.tolerance if a.tolerance is not None else 1e-10
    return [RunRecord("bessel", {"k": a.k, "x": a.x}, s, abs(s - i), passed=abs(s - i) <= tol)]


def _cmd_delta(a):
    from .delta import build_expansion, delta_eval_all

    exp = build_expansion(a.L)
    vals = delta_eval_all(exp, a.n)
    tol = a.tolerance if a.tolerance is not None else 1e-6
    out = []
    for n, v in zip(a.n, vals):
        err = abs(float(v) - (n == 0))
        out.append(RunRecord("delta", {"L": a.L, "n": n}, float(v), err, passed=err <= tol))
    return out


def _cmd_voronoi(a):
    from .voronoi import GaussianWeight, gl2_voronoi_check

    g = GaussianWeight.balanced(a.center, a.q)
    form = _form(a.weight, int(g.support[1]) + 1, a.cache)
    lhs, rhs, rel = gl2_voronoi_check(form, a.a, a.q, g)
    tol = a.tolerance if a.tolerance is not None else 1e-6
    params = {"q": a.q, "a": a.a, "center": a.center, "weight": a.weight}
    return [RunRecord("voronoi-gl2", params, lhs, rel, passed=rel <= tol)]


def _cmd_gl3(a):
    from .oscillatory import SmoothBump
    from .voronoi import G_pm_contour, GammaFactorSpec

    g = SmoothBump(1.0, 2.0)
    tol = a.tolerance if a.tolerance is not None else 1e-10
    out = []
    for x in a.x:
        v1 = G_pm_contour(x, g, GammaFactorSpec(sigma=a.sigma), sign=a.sign)
        v2 = G_pm_contour(x, g, GammaFactorSpec(sigma=a.sigma + 0.25), sign=a.sign)
        gap = abs(v1 - v2) / max(abs(v1), 1.0)
        out.append(RunRecord("gl3-transform", {"x": x, "sign": a.sign, "sigma": a.sigma}, v1, gap,
                             passed=gap <= tol))
    return out


def _cmd_oscillatory(a):
    from .oscillatory import OscillatorySpec, SmoothBump, quad_osc, stat_phase_leading

    Y = a.Y
    spec = OscillatorySpec(SmoothBump(1.0, 2.0), lambda x: Y * (x - 1.5) ** 2, 1.0, 2.0, dphase=[
        lambda x: 2 * Y * (x - 1.5), lambda x: 2 * Y + 0 * x, lambda x: 0 * x, lambda x: 0 * x])
    lead, corr = stat_phase_leading(spec)
    ref = quad_osc(spec)
    err = abs(lead - ref)
    bound = a.tolerance if a.tolerance is not None else 2 * corr
    return [RunRecord("oscillatory", {"Y": Y}, ref, err, passed=err <= bound)]


def _cmd_cutoffs(a):
    from .oscillatory import ScaleParams, cutoffs

    c = cutoffs(ScaleParams(a.k, a.eta, a.N), a.q, a.x)
    params = {"k": a.k, "eta": a.eta, "N": a.N, "q": a.q, "x": a.x}
    return [RunRecord("cutoffs", dict(params, name=name), getattr(c, name)) for name in ("N0", "M", "M0", "N2")]


def _cmd_exponents(a):
    from .exponents import eisenstein_exponent, main_theorem_exponent, minimax, paper_terms

    res = minimax(paper_terms())
    return [
        RunRecord("exponents", {"name": "theta"}, res.theta),
        RunRecord("exponents", {"name": "eta"}, res.eta),
        RunRecord("exponents", {"name": "value"}, res.value),
        RunRecord("exponents", {"name": "main_theorem"}, main_theorem_exponent()),
        RunRecord("exponents", {"name": "eisenstein"}, eisenstein_exponent()),
    ]


def _cmd_verify(a):
    from .acceptance import CRITERIA, run_criterion

    which = sorted(CRITERIA) if not a.only else [int(s) for s in a.only.split(",")]
    out = []
    for n in which:
        if n not in CRITERIA:
            raise SystemExit(f"no criterion {n}")
        res = run_criterion(n)
        if not a.json:
            print(res.line(), file=sys.stderr)
        out.append(RunRecord("verify-all", {"criterion": n, "title": res.title}, None, None,
                             res.seconds * 1000, res.passed))
    return out


# -- parser ----------------------------------------------------------------------

def _globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--precision", type=int, default=d(128), help="working precision in bits")
    p.add_argument("--tolerance", type=float, default=d(None), help="override the pass threshold")
    p.add_argument("--json", action="store_true", default=d(False), help="emit JSON on stdout")
    p.add_argument("--csv", metavar="PATH", default=d(None), help="also write CSV to PATH")
    p.add_argument("--cache", metavar="PATH", default=d(None), help="GL(2) coefficient cache CSV")
    p.add_argument("--timing", action="store_true", default=d(False),
                   help="include elapsed ms in JSON/CSV (makes output run-dependent)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subconvex", description=__doc__.splitlines()[0])
    _globals(p, False)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        _globals(sp, True)
        sp.set_defaults(func=fn)
        return sp

    sp = add("kloosterman", _cmd_kloosterman, "S(a,b;q) by enumeration")
    for n in ("a", "b", "q"):
        sp.add_argument(n, type=int)
    sp = add("charsum", _cmd_charsum, "single-modulus character sum, direct vs factored")
    for n in ("q", "r", "n1", "m", "n2"):
        sp.add_argument(n, type=int)
    sp.add_argument("--sign", type=int, choices=(1, -1), default=1)
    sp = add("coeffs", _cmd_coeffs, "Hecke eigenform coefficients")
    sp.add_argument("weight", type=int)
    sp.add_argument("nmax", type=int)
    sp.add_argument("--show", type=int, default=10)
    sp = add("bessel", _cmd_bessel, "J_{k-1}(x) from both backends")
    sp.add_argument("k", type=int)
    sp.add_argument("x", type=float)
    sp = add("delta", _cmd_delta, "smoothed delta symbol")
    sp.add_argument("L", type=float)
    sp.add_argument("n", type=int, nargs="+")
    sp = add("voronoi-gl2", _cmd_voronoi, "GL(2) Voronoi identity check")
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--center", type=float, default=1e3)
    sp.add_argument("--weight", type=int, default=12)
    sp = add("gl3-transform", _cmd_gl3, "G_+- kernels on two contours")
    sp.add_argument("x", type=float, nargs="+")
    sp.add_argument("--sign", type=int, choices=(1, -1), default=1)
    sp.add_argument("--sigma", type=float, default=-0.75)
    sp = add("oscillatory", _cmd_oscillatory, "stationary phase against quadrature")
    sp.add_argument("Y", type=float)
    sp = add("cutoffs", _cmd_cutoffs, "dual-length thresholds")
    sp.add_argument("k", type=int)
    sp.add_argument("eta", type=float)
    sp.add_argument("N", type=float)
    sp.add_argument("q", type=float)
    sp.add_argument("x", type=float)
    add("exponents", _cmd_exponents, "exact exponent optimum")
    sp = add("verify-all", _cmd_verify, "run the acceptance suite")
    sp.add_argument("--only", default=None, help="comma-separated criterion numbers")
    return p


def dispatch(argv: list[str]) -> tuple[list[RunRecord], argparse.Namespace]:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    records = args.func(args)
    if args.command != "verify-all":
        ms = (time.perf_counter() - t0) * 1000 / max(len(records), 1)
        for r in records:
            r.ms = ms
        for r in records:
            r.params = dict(r.params, precision=args.precision)
    return records, args


def _text(r: RunRecord) -> str:
    res = r.result
    if isinstance(res, Fraction):
        shown = str(res)
    elif isinstance(res, complex):
        shown = f"{res.real:.15g}{res.imag:+.15g}i"
    else:
        shown = "" if res is None else repr(res)
    parts = [r.command, " ".join(f"{k}={v}" for k, v in r.params.items()), shown]
    if r.error is not None:
        parts.append(f"err={r.error:.3e}")
    if r.passed is not None:
        parts.append("PASS" if r.passed else "FAIL")
    return "  ".join(p for p in parts if p)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        records, args = dispatch(argv)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        sys.stdout.buffer.write(emit(records, "json", args.timing))
        sys.stdout.flush()
    else:
        for r in records:
            print(_text(r))
    if args.csv:
        with open(args.csv, "wb") as fh:
            fh.write(emit(records, "csv", args.timing))
    return 0 if all(r.passed is not False for r in records) else 1


if __name__ == "__main__":
    sys.exit(main())
