"""The ten acceptance checks, shared by ``verify-all`` and the test suite.

Each check returns a :class:`CriterionResult`; nothing here decides what is
acceptable beyond the stated thresholds.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all", "random_char_params"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        summary = ", ".join(f"{k}={_short(v)}" for k, v in self.details.items())
        return f"[{tag}] criterion {self.number:2d} {self.title} ({self.seconds:.1f}s): {summary}"


def _short(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(str(_short(x)) for x in v) + "]"
    return str(v)


def _timed(fn):
    def wrapper():
        t0 = time.perf_counter()
        res = fn()
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# -- 1 ------------------------------------------------------------------------

@_timed
def exponents_exact() -> CriterionResult:
    from .exponents import eisenstein_exponent, main_theorem_exponent, minimax, paper_terms

    t0 = time.perf_counter()
    res = minimax(paper_terms())
    main, eis = main_theorem_exponent(), eisenstein_exponent()
    dt = time.perf_counter() - t0
    ok = ((res.theta, res.eta, res.value) == (Fraction(2, 51), Fraction(10, 51), Fraction(-1, 51))
          and main == Fraction(3, 2) - Fraction(1, 51)
          and eis == Fraction(1, 2) - Fraction(1, 153)
          and dt < 1.0)
    return CriterionResult(1, "exponent reproduction", ok, {
        "theta": str(res.theta), "eta": str(res.eta), "value": str(res.value),
        "main": str(main), "eisenstein": str(eis)})


# -- 2 ------------------------------------------------------------------------

@_timed
def delta_exactness(L: float = 100.0) -> CriterionResult:
    from .delta import build_expansion, delta_eval_all

    t0 = time.perf_counter()
    exp = build_expansion(L)
    ns = np.arange(-int(2 * L), int(2 * L) + 1)
    vals = delta_eval_all(exp, ns)
    err = float(np.max(np.abs(vals - (ns == 0))))
    dt = time.perf_counter() - t0
    return CriterionResult(2, "delta symbol exactness", err <= 1e-6 and dt < 300,
                           {"L": L, "max_error": err})


# -- 3 ------------------------------------------------------------------------

@_timed
def gl2_voronoi() -> CriterionResult:
    from .forms import delta_coeffs
    from .voronoi import GaussianWeight, gl2_voronoi_check

    t0 = time.perf_counter()
    cases = [(q, a, X) for q, a in ((1, 1), (5, 2), (7, 3)) for X in (1e3, 1e4, 1e5)]
    weights = {(q, X): GaussianWeight.balanced(X, q) for q, _, X in cases}
    nmax = int(max(w.support[1] for w in weights.values())) + 1
    f = delta_coeffs(nmax)
    worst = 0.0
    for q, a, X in cases:
        worst = max(worst, gl2_voronoi_check(f, a, q, weights[(q, X)])[2])
    dt = time.perf_counter() - t0
    return CriterionResult(3, "GL(2) Voronoi identity", worst <= 1e-6 and dt < 600,
                           {"cases": len(cases), "max_rel_error": worst})


# -- 4 ------------------------------------------------------------------------

def random_char_params(rng: random.Random, qmax: int = 50, collapse: bool = False):
    """A random admissible CharSumParams with q1 q2, q1 q2' <= qmax."""
    from .modular import CharSumParams

    while True:
        r = rng.randint(1, 4)
        n1 = rng.randint(1, 6)
        q1 = rng.randint(1, 12)
        q2 = rng.randint(1, qmax // q1)
        q2p = rng.randint(1, qmax // q1)
        if collapse and q2 == q2p:
            continue
        try:
            return CharSumParams(q1, q2, q2p, r, n1, rng.randint(1, 40), rng.randint(1, 40),
                                 0 if collapse else rng.randint(-40, 40), rng.choice((1, -1)))
        except ValueError:
            continue


@_timed
def char_sums(seed: int = 20240601) -> CriterionResult:
    from .modular import char_sum_direct, char_sum_factored, frak_C, frak_C_envelope

    rng = random.Random(seed)
    worst = 0.0
    done = 0
    while done < 200:
        q = rng.randint(1, 50)
        r = rng.randint(1, 4)
        qr = q * r
        n1 = rng.choice([d for d in range(1, qr + 1) if qr % d == 0])
        m, n2, s = rng.randint(-60, 60), rng.randint(-60, 60), rng.choice((1, -1))
        a = char_sum_direct(q, r, n1, m, n2, s)
        b = char_sum_factored(q, r, n1, m, n2, s)
        worst = max(worst, float(abs(a - b)))
        done += 1
    collapse_bad = 0
    for _ in range(50):
        p = random_char_params(rng, collapse=True)
        collapse_bad += frak_C(p) != 0
    env_bad = 0
    for _ in range(200):
        p = random_char_params(rng)
        env_bad += abs(frak_C(p)) > frak_C_envelope(p)
    ok = worst <= 1e-10 and collapse_bad == 0 and env_bad == 0
    return CriterionResult(4, "character-sum equivalence", ok, {
        "max_direct_factored_gap": worst, "collapse_failures": collapse_bad,
        "envelope_violations": env_bad})


# -- 5 ------------------------------------------------------------------------

@_timed
def bessel_backends() -> CriterionResult:
    from .bessel import BesselQuery, besselJ_integral, besselJ_series, langer_error, small_arg_envelope

    ks = [2, 12, 24, 40, 60, 80, 100, 120, 140, 160, 180, 200, 220, 240, 260, 280, 290, 295, 299, 300]
    xs = [0.5, 3.0, 10.0, 40.0, 100.0, 200.0, 350.0, 500.0, 750.0, 1000.0]
    worst = 0.0
    for k in ks:
        for x in xs:
            q = BesselQuery(k, x)
            worst = max(worst, abs(float(besselJ_series(q)) - besselJ_integral(q)))
    monotone = {}
    for k in (21, 51, 101, 201):
        errs = [langer_error(BesselQuery(k, c * (k - 1))) for c in (1.5, 2.0, 4.0, 10.0)]
        monotone[k] = all(b < a for a, b in zip(errs, errs[1:]))
    env_bad = 0
    for k in (12, 21, 51, 101, 201, 300):
        top = (k - 1) ** 0.95
        for x in np.linspace(top / 20, top, 12):
            env_bad += not small_arg_envelope(BesselQuery(k, float(x))).passed
    ok = worst <= 1e-10 and all(monotone.values()) and env_bad == 0
    return CriterionResult(5, "Bessel backends", ok, {
        "grid_points": len(ks) * len(xs), "max_series_integral_gap": worst,
        "langer_monotone": all(monotone.values()), "envelope_violations": env_bad})


# -- 6 ------------------------------------------------------------------------

@_timed
def stationary_phase() -> CriterionResult:
    from .oscillatory import OscillatorySpec, SmoothBump, quad_osc, stat_phase_leading

    g = SmoothBump(1.0, 2.0)
    errs = []
    for Y in (1e2, 4e2, 1.6e3, 6.4e3):
        spec = OscillatorySpec(g, lambda x, Y=Y: Y * (x - 1.5) ** 2, 1.0, 2.0, dphase=[
            lambda x, Y=Y: 2 * Y * (x - 1.5), lambda x, Y=Y: 2 * Y + 0 * x,
            lambda x: 0 * x, lambda x: 0 * x])
        lead, _ = stat_phase_leading(spec)
        errs.append(abs(lead - quad_osc(spec)))
    gains = [a / b for a, b in zip(errs, errs[1:])]
    # Fresnel: leading term of int g e^{ix^2} is sqrt(pi) e^{i pi/4} g(0), and
    # the damped integral int e^{-a x^2 + i x^2} = sqrt(pi/(a - i)) is exact
    h = SmoothBump(-1.0, 1.0)
    fres = OscillatorySpec(h, lambda x: x * x, -1.0, 1.0, dphase=[lambda x: 2 * x, lambda x: 2 + 0 * x])
    lead = stat_phase_leading(fres)[0]
    closed = math.sqrt(math.pi) * complex(math.cos(math.pi / 4), math.sin(math.pi / 4)) * float(h(np.array([0.0]))[0])
    a = 0.05
    damped = quad_osc(OscillatorySpec(lambda x: np.exp(-a * x * x), lambda x: x * x, -40.0, 40.0))
    exact = complex(np.sqrt(math.pi / complex(a, -1.0)))
    fres_err = max(abs(lead - closed), abs(damped - exact))
    ok = all(gn >= 2 for gn in gains) and fres_err <= 1e-6
    return CriterionResult(6, "stationary phase", ok, {"gains": gains, "fresnel_error": fres_err})


# -- 7 ------------------------------------------------------------------------

def _w_geometry(k: int, q: float):
    from .oscillatory import PhaseGeometry, keps

    B = float(k - 1)
    A = 0.15 * B / 1.5 ** (1 / 3)
    N = float(k) ** 3
    g = PhaseGeometry.from_AB(A, B, N=N, q=q)
    N2 = keps(k) * q * N ** (1 / 3) / g.N0 ** (2 / 3)
    return g, N2


@_timed
def integral_bounds() -> CriterionResult:
    from .oscillatory import PhaseGeometry, w_integral, y_integral, y_integral_expansion

    k = 51
    y_ratio = max(abs(y_integral(PhaseGeometry.from_AB(B / 4, B), k)) * B for B in (50.0, 100.0, 200.0))
    w_ratio, refined = 0.0, 0.0
    for kk in (51, 101):
        for q in (300.0, 1000.0):
            g, N2 = _w_geometry(kk, q)
            B = g.B
            for n2 in (0, N2 / 10):
                w_ratio = max(w_ratio, abs(w_integral(g, g, kk, n2, 1, q, q, 1, 1)) * B * B)
            env = q * B ** (2 / 3) / (B * B * (g.N * g.N0) ** (1 / 3))
            refined = max(refined, abs(w_integral(g, g, kk, N2 / 10, 1, q, q, 1, 1)) / env)
    disc = []
    for kk in (51, 101):
        B = float(kk - 1)
        g = PhaseGeometry.from_AB(0.15 * B, B)
        I = y_integral(g, kk)
        disc.append(abs(I - y_integral_expansion(g, kk)) / abs(I))
    ok = y_ratio <= 10 and w_ratio <= 10 and refined <= 10 and disc[1] < disc[0]
    return CriterionResult(7, "y- and w-integral bounds", ok, {
        "max_B_I": y_ratio, "max_B2_J": w_ratio, "refined_ratio": refined,
        "expansion_discrepancy": disc})


# -- 8 ------------------------------------------------------------------------

@_timed
def cutoff_decades() -> CriterionResult:
    from .oscillatory import ScaleParams, cutoffs, m_transform, separation_cutoff_check, w_integral, z_integral

    sc = ScaleParams(101, 10 / 51, 101.0 ** 3)
    co = cutoffs(sc, 10.0, 0.0)
    n0 = (abs(z_integral(sc, 10.0, 1, 10 * co.N0, 0.0, sc.T, -1))
          / abs(z_integral(sc, 10.0, 1, co.N0 / 10, 0.0, sc.T, -1)))
    sc = ScaleParams(51, 10 / 51, 51.0 ** 3)
    co = cutoffs(sc, 100.0, 0.5)
    m0 = (abs(m_transform(sc, 100.0, 10 * co.M0, 0.5, sc.T))
          / abs(m_transform(sc, 100.0, co.M0 / 10, 0.5, sc.T)))
    g, N2 = _w_geometry(51, 1000.0)
    n2 = (abs(w_integral(g, g, 51, 10 * N2, 1, 1000.0, 1000.0, 1, 1))
          / abs(w_integral(g, g, 51, N2 / 10, 1, 1000.0, 1000.0, 1, 1)))
    sep = separation_cutoff_check(sc, 10.0)
    sep_ratio = max(sep["x_ratio"], sep["t_ratio"])
    ratios = {"N0": n0, "M0": m0, "N2": n2, "separation": sep_ratio}
    return CriterionResult(8, "cutoff decades", all(v <= 1e-4 for v in ratios.values()), ratios)


# -- 9 ------------------------------------------------------------------------

@_timed
def rankin_selberg() -> CriterionResult:
    from .forms import EisensteinGL3, delta_coeffs, deligne_check, rankin_selberg_average

    _, slope = rankin_selberg_average(EisensteinGL3((0, 0, 0)), 1e5)
    bad = deligne_check(delta_coeffs(10_000))
    ok = 0.85 <= slope <= 1.15 and not bad
    return CriterionResult(9, "Rankin-Selberg slope and Deligne", ok, {
        "slope": slope, "deligne_violations": len(bad)})


# -- 10 -----------------------------------------------------------------------

@_timed
def gl3_kernels() -> CriterionResult:
    from .oscillatory import SmoothBump
    from .voronoi import G_pm_asymptotic_check, G_pm_contour, GammaFactorSpec

    g = SmoothBump(1.0, 2.0)
    s1, s2 = GammaFactorSpec(sigma=-0.75), GammaFactorSpec(sigma=-0.5)
    shift = 0.0
    for sign in (1, -1):
        for x in (10.0, 100.0, 1000.0, 10000.0):
            a = G_pm_contour(x, g, s1, sign=sign)
            b = G_pm_contour(x, g, s2, sign=sign)
            shift = max(shift, abs(a - b) / max(abs(a), 1.0))
    ratios, drift = [], 0.0
    for sign in (1, -1):
        rep = G_pm_asymptotic_check([250, 500, 1000, 2000, 4000, 8000], g, s2, sign=sign)
        ratios += rep["residual_ratios"]
        drift = max(drift, rep["leading_drift"])
    ok = shift <= 1e-10 and max(ratios) <= 0.7 and drift <= 0.01
    return CriterionResult(10, "G+- contour shift and asymptotics", ok, {
        "max_shift_gap": shift, "worst_residual_ratio": max(ratios), "leading_drift": drift})


CRITERIA = {
    1: exponents_exact,
    2: delta_exactness,
    3: gl2_voronoi,
    4: char_sums,
    5: bessel_backends,
    6: stationary_phase,
    7: integral_bounds,
    8: cutoff_decades,
    9: rankin_selberg,
    10: gl3_kernels,
}


def run_criterion(n: int) -> CriterionResult:
    return CRITERIA[n]()


def run_all(which=None) -> list[CriterionResult]:
    return [run_criterion(n) for n in (sorted(CRITERIA) if which is None else which)]
