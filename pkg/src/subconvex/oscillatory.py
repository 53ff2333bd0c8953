"""Exponential integrals: a panel quadrature oracle, derivative and
integration-by-parts bounds, the leading stationary-phase term, and the
specific integrals that occur after the two Voronoi steps.

Conventions: an :class:`OscillatorySpec` integrates ``g(x) * exp(i f(x))`` (the
phase is in radians).  Where the analysis uses ``e(x) = exp(2 pi i x)`` the
callers multiply by ``2 pi`` themselves.  Every asymptotic or closed-form
value in this module is meant to be compared against :func:`quad_osc` on the
same integrand.

``k^eps`` is instantiated as ``log(k)^2`` throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy.special import jv

from .bessel import besselJ_array

__all__ = [
    "SmoothBump",
    "OscillatorySpec",
    "ScaleParams",
    "CutoffSet",
    "PhaseGeometry",
    "QuadratureError",
    "StationaryPointError",
    "keps",
    "quad_osc",
    "quad_osc_report",
    "derivative_bound",
    "ibp_decay_check",
    "stat_phase_leading",
    "tau0_series_coeffs",
    "solve_tau0",
    "tau0_residual",
    "z_integral",
    "m_transform",
    "y_integral",
    "y_integral_expansion",
    "w_integral",
    "separation_cutoff_check",
    "cutoffs",
]

TWO_PI = 2 * math.pi


def keps(k: float) -> float:
    """Concrete stand-in for k^eps."""
    return math.log(k) ** 2


# -- weights ------------------------------------------------------------------

def _psi(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def _step(u):
    """Smooth step: 0 for u <= 0, 1 for u >= 1."""
    a = _psi(u)
    b = _psi(1.0 - np.asarray(u, dtype=float))
    return a / (a + b)


@dataclass(frozen=True)
class SmoothBump:
    """Compactly supported C^infinity weight on [a, b].

    Without a plateau this is ``exp(1 - 1/(1 - t^2))`` on the rescaled
    interval, so the peak value is 1 at the midpoint.  With ``plateau=(c, d)``
    the weight is 1 on [c, d] and decays to 0 through smooth steps.
    """

    a: float
    b: float
    plateau: tuple[float, float] | None = None
    scale: float = 1.0

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("need a < b")
        if self.plateau is not None:
            c, d = self.plateau
            if not (self.a < c <= d < self.b):
                raise ValueError("plateau must sit strictly inside the support")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.plateau is None:
            t = (2 * x - self.a - self.b) / (self.b - self.a)
            out = np.zeros_like(t)
            inside = np.abs(t) < 1
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
        else:
            c, d = self.plateau
            out = _step((x - self.a) / (c - self.a)) * _step((self.b - x) / (self.b - d))
            out = np.where((x <= self.a) | (x >= self.b), 0.0, out)
        return self.scale * out

    def mp(self, x):
        """Scalar mpmath evaluation, used for derivative bounds."""
        x = mpmath.mpf(x)
        if x <= self.a or x >= self.b:
            return mpmath.mpf(0)
        if self.plateau is None:
            t = (2 * x - self.a - self.b) / (self.b - self.a)
            return self.scale * mpmath.exp(1 - 1 / (1 - t * t))

        def step(u):
            if u <= 0:
                return mpmath.mpf(0)
            if u >= 1:
                return mpmath.mpf(1)
            p, q = mpmath.exp(-1 / u), mpmath.exp(-1 / (1 - u))
            return p / (p + q)

        c, d = self.plateau
        return self.scale * step((x - self.a) / (c - self.a)) * step((self.b - x) / (self.b - d))

    def mass(self) -> float:
        return float(quad_osc(OscillatorySpec(self, None, self.a, self.b)).real)

    def variation(self, samples: int = 1 << 14) -> float:
        xs = np.linspace(self.a, self.b, samples + 1)
        return float(np.sum(np.abs(np.diff(self(xs)))))

    def derivative_bounds(self, max_order: int = 4, samples: int = 101) -> list[float]:
        """sup |g^(j)| on a sample grid for j = 0..max_order."""
        xs = np.linspace(self.a, self.b, samples + 2)[1:-1]
        out = []
        with mpmath.workdps(30):
            for j in range(max_order + 1):
                out.append(max(abs(float(mpmath.diff(self.mp, x, j))) for x in xs))
        return out


# -- specs and quadrature -----------------------------------------------------

Func = Callable[[np.ndarray], np.ndarray]


@dataclass
class OscillatorySpec:
    """``int_a^b g(x) exp(i f(x)) dx``.

    ``dphase`` holds f', f'', f''', f'''' as supplied by the caller (no
    automatic differentiation).  ``schedule`` optionally records the
    (X, Y, U, Q) scales of the amplitude and phase.
    """

    amp: Func
    phase: Func | None
    a: float
    b: float
    dphase: Sequence[Func] = ()
    schedule: tuple[float, float, float, float] | None = None

    def integrand(self, x):
        g = self.amp(x)
        if self.phase is None:
            return np.asarray(g, dtype=complex)
        return g * np.exp(1j * self.phase(x))


class QuadratureError(ArithmeticError):
    def __init__(self, best, gap):
        super().__init__(f"refinement budget exhausted; best={best!r}, gap={gap:.3e}")
        self.best = best
        self.gap = gap


class StationaryPointError(ValueError):
    pass


_ORDER = 20
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)


def _panels(fun, a, b, n):
    edges = np.linspace(a, b, n + 1)
    half = 0.5 * (edges[1] - edges[0])
    mids = 0.5 * (edges[1:] + edges[:-1])
    x = (mids[:, None] + half * _NODES[None, :]).ravel()
    w = np.tile(_WEIGHTS * half, n)
    vals = fun(x)
    return complex(np.dot(vals, w)), float(np.dot(np.abs(vals), w))


def _initial_panels(spec: OscillatorySpec) -> int:
    if spec.phase is None:
        return 8
    xs = np.linspace(spec.a, spec.b, 2049)
    var = float(np.sum(np.abs(np.diff(spec.phase(xs)))))
    return max(8, int(var / math.pi) + 1)


def quad_osc_report(spec: OscillatorySpec, precision: int = 53, rtol: float | None = None,
                    max_panels: int = 1 << 18):
    """Composite Gauss-Legendre with panel doubling.

    Stops when two successive levels agree to ``rtol`` times the L1 mass of
    the integrand.  The requested precision is honoured down to the float64
    floor of ~1e-15.
    """
    if rtol is None:
        rtol = max(2.0 ** (-precision), 1e-15)
    n = _initial_panels(spec)
    prev, mass = _panels(spec.integrand, spec.a, spec.b, n)
    while True:
        n *= 2
        cur, mass = _panels(spec.integrand, spec.a, spec.b, n)
        gap = abs(cur - prev)
        if gap <= rtol * max(mass, 1e-300) or mass == 0.0:
            return cur, gap, n
        if n >= max_panels:
            raise QuadratureError(cur, gap)
        prev = cur


def quad_osc(spec: OscillatorySpec, precision: int = 53, rtol: float | None = None) -> complex:
    return quad_osc_report(spec, precision, rtol)[0]


def _sample(spec: OscillatorySpec, count: int = 2049):
    return np.linspace(spec.a, spec.b, count)


def derivative_bound(spec: OscillatorySpec, order: int, samples: int = 4097) -> float:
    """Var(g) / min |f^(r)|^(1/r), after certifying that f^(r) keeps one sign."""
    if order < 1 or order > len(spec.dphase):
        raise ValueError(f"phase derivative of order {order} not supplied")
    xs = np.linspace(spec.a, spec.b, samples)
    d = np.asarray(spec.dphase[order - 1](xs), dtype=float) * np.ones_like(xs)
    if np.any(d > 0) and np.any(d < 0) or np.any(d == 0):
        raise ValueError("phase derivative changes sign or vanishes; bound inapplicable")
    g = np.abs(spec.amp(xs))
    var = float(np.sum(np.abs(np.diff(g))) + g[0] + g[-1])
    return var / float(np.min(np.abs(d))) ** (1.0 / order)


def ibp_decay_check(make_spec: Callable[[float], OscillatorySpec], B: float, j: int,
                    c: float = 10.0) -> dict:
    """Integration-by-parts decay for a family whose phase satisfies f' >= B.

    Reports |I(B)| against c B^-j and the drop |I(2B)| / |I(B)|.
    """
    spec = make_spec(B)
    xs = _sample(spec)
    g = np.abs(spec.amp(xs))
    if not spec.dphase:
        raise ValueError("first phase derivative required")
    fp = np.asarray(spec.dphase[0](xs), dtype=float) * np.ones_like(xs)
    supp = g > 0
    if np.any(supp) and np.min(fp[supp]) < B * (1 - 1e-12):
        raise ValueError("f' >= B fails on the support of the amplitude")
    if g[0] > 0 or g[-1] > 0:
        raise ValueError("amplitude must vanish at the endpoints")
    mag = abs(quad_osc(spec))
    mag2 = abs(quad_osc(make_spec(2 * B)))
    env = c * B ** (-j)
    ratio = mag2 / mag if mag > 0 else 0.0
    return {
        "magnitude": mag,
        "envelope": env,
        "doubled_ratio": ratio,
        "passed": mag <= env and (mag == 0 or ratio <= 2.0 ** (1 - j)),
    }


def _locate_stationary(spec: OscillatorySpec, grid: int = 64) -> float:
    if len(spec.dphase) < 2:
        raise ValueError("stationary phase needs f' and f''")
    fp, fpp = spec.dphase[0], spec.dphase[1]
    xs = np.linspace(spec.a, spec.b, grid + 1)
    v = np.asarray(fp(xs), dtype=float)
    roots = [i for i in range(grid) if v[i] == 0 or v[i] * v[i + 1] < 0]
    if v[-1] == 0:
        roots.append(grid)
    if not roots:
        raise StationaryPointError("no stationary point in [a, b]; use derivative_bound")
    if len(roots) > 1:
        raise StationaryPointError("more than one stationary point")
    lo, hi = xs[roots[0]], xs[min(roots[0] + 1, grid)]
    x = 0.5 * (lo + hi)
    for _ in range(100):
        fx = float(fp(np.array([x]))[0])
        step = fx / float(fpp(np.array([x]))[0])
        xn = x - step
        if not lo <= xn <= hi:
            # fall back to bisection to stay inside the bracket
            flo = float(fp(np.array([lo]))[0])
            if flo * fx <= 0:
                hi = x
            else:
                lo = x
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 1e-15 * max(1.0, abs(x)):
            x = xn
            break
        x = xn
    if abs(float(fp(np.array([x]))[0])) > 1e-12 * max(1.0, abs(float(fpp(np.array([x]))[0]))):
        raise StationaryPointError("Newton did not reach the residual target")
    return x


def _fd(fun, x, order, h):
    """Central finite differences of a real scalar function."""
    if order == 1:
        return (fun(x + h) - fun(x - h)) / (2 * h)
    if order == 2:
        return (fun(x + h) - 2 * fun(x) + fun(x - h)) / (h * h)
    raise ValueError(order)


def stat_phase_leading(spec: OscillatorySpec) -> tuple[complex, float]:
    """Leading term exp(i f(x0)) sqrt(2 pi) e^{i pi/4} g(x0) / sqrt(f''(x0)) and
    the size of the first correction, which serves as its error estimate."""
    x0 = _locate_stationary(spec)
    one = np.array([x0])
    f2 = float(spec.dphase[1](one)[0])
    if f2 <= 0:
        raise StationaryPointError("need f''(x0) > 0")
    g0 = complex(spec.amp(one)[0])
    lead = np.exp(1j * float(spec.phase(one)[0])) * math.sqrt(TWO_PI) * np.exp(1j * math.pi / 4) * g0 / math.sqrt(f2)

    h = 1e-3 * (spec.b - spec.a)
    gs = lambda t: complex(spec.amp(np.array([t]))[0])
    g1 = abs(_fd(gs, x0, 1, h))
    g2 = abs(_fd(gs, x0, 2, h))
    f3 = abs(float(spec.dphase[2](one)[0])) if len(spec.dphase) > 2 else 0.0
    f4 = abs(float(spec.dphase[3](one)[0])) if len(spec.dphase) > 3 else 0.0
    corr = math.sqrt(TWO_PI / f2) * (
        g2 / (2 * f2) + g1 * f3 / (2 * f2 ** 2) + abs(g0) * (f4 / (8 * f2 ** 2) + 5 * f3 ** 2 / (24 * f2 ** 3))
    )
    return complex(lead), corr


# -- the stationary point of the tau-phase ------------------------------------

def tau0_series_coeffs(terms: int = 4) -> list[float]:
    """Odd coefficients c1, c3, ... of tau0 as a series in
    h = A / (B^(2/3) (k-1)^(1/3)).

    tau0 solves tau^3 / sqrt(1 - tau^2) = (s)^3 with s = 4 pi h / 3, i.e.
    tau = s (1 - tau^2)^(1/6); the fixed point is iterated on truncated
    rational power series in s.
    """
    order = 2 * terms - 1
    tau = {1: Fraction(1)}

    def mul(p, q):
        out = {}
        for i, a in p.items():
            for j, b in q.items():
                if i + j <= order:
                    out[i + j] = out.get(i + j, 0) + a * b
        return out

    for _ in range(terms + 1):
        t2 = mul(tau, tau)
        acc = {0: Fraction(1)}
        power = {0: Fraction(1)}
        binom = Fraction(1)
        for j in range(1, terms + 1):
            binom = binom * (Fraction(1, 6) - (j - 1)) / j
            power = mul(power, {e: -c for e, c in t2.items()})
            for e, c in power.items():
                acc[e] = acc.get(e, 0) + binom * c
        tau = {e + 1: c for e, c in acc.items() if e + 1 <= order}
    s = 4 * math.pi / 3
    return [float(tau.get(2 * i + 1, 0)) * s ** (2 * i + 1) for i in range(terms)]


def _tau_rhs(A, B, k):
    return (4 * mpmath.pi / 3) ** 3 * mpmath.mpf(A) ** 3 / (mpmath.mpf(B) ** 2 * (k - 1))


def tau0_residual(tau, A, B, k) -> float:
    """f'(tau) for f(tau) = (k-1) asin(tau)/(2 pi) + 16 pi^2 A^3 / (27 B^2 tau^2)."""
    with mpmath.workprec(128):
        t = mpmath.mpf(tau)
        A, B = mpmath.mpf(A), mpmath.mpf(B)
        return float((k - 1) / (2 * mpmath.pi * mpmath.sqrt(1 - t * t))
                     - 32 * mpmath.pi ** 2 * A ** 3 / (27 * B ** 2 * t ** 3))


def solve_tau0(A: float, B: float, k: int, seed_terms: int = 3, return_seed: bool = False):
    """Root in (0,1) of tau^3/sqrt(1-tau^2) = (4 pi/3)^3 A^3 / (B^2 (k-1)).

    Seeded by the truncated odd series in h, then safeguarded Newton on
    3 log tau - log(1 - tau^2)/2 - log(rhs), which is increasing on (0,1).
    The root is returned as a 128-bit mpf: near tau = 1 the phase is so
    curved that rounding to a double alone leaves |f'| around 1e-8.
    """
    if A <= 0 or B <= 0:
        raise ValueError("A and B must be positive")
    if A > B:
        raise ValueError("solver is for the regime A <= B")
    h = A / (B ** (2 / 3) * (k - 1) ** (1 / 3))
    cs = tau0_series_coeffs(seed_terms)
    seed = sum(c * h ** (2 * i + 1) for i, c in enumerate(cs))
    with mpmath.workprec(128):
        rhs = _tau_rhs(A, B, k)
        if rhs <= 0:
            raise ValueError("no root in (0,1)")
        target = mpmath.log(rhs)
        lo, hi = mpmath.mpf(0), mpmath.mpf(1)
        t = mpmath.mpf(seed) if 0 < seed < 1 else mpmath.mpf("0.5")
        for _ in range(200):
            g = 3 * mpmath.log(t) - mpmath.log(1 - t * t) / 2 - target
            if g > 0:
                hi = t
            else:
                lo = t
            dg = 3 / t + t / (1 - t * t)
            tn = t - g / dg
            if not lo < tn < hi:
                tn = (lo + hi) / 2
            if abs(tn - t) < mpmath.mpf(2) ** -110:
                t = tn
                break
            t = tn
        tau = +t
    if not 0 < tau < 1:
        raise ValueError("no root in (0,1)")
    return (tau, seed) if return_seed else tau


# -- scales, cutoffs, geometry -----------------------------------------------

@dataclass(frozen=True)
class ScaleParams:
    """Desk-scale instance of the parameters of the conductor-lowering setup.

    ``T = k^(1-eta)``, ``L = k^eps N / T`` and ``Q = 2 sqrt(L)``.
    """

    k: int
    eta: float
    N: float
    r: int = 1
    C: float | None = None
    M1: float | None = None

    def __post_init__(self):
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0,1)")
        if self.N * self.r ** 2 > self.k ** 3 * self.keps:
            raise ValueError("N r^2 exceeds k^(3+eps)")
        if self.C is not None and self.C > self.Q:
            raise ValueError("modulus block C exceeds Q")

    @property
    def keps(self) -> float:
        return keps(self.k)

    @property
    def T(self) -> float:
        return self.k ** (1 - self.eta)

    @property
    def L(self) -> float:
        return self.keps * self.N / self.T

    @property
    def Q(self) -> float:
        return 2 * math.sqrt(self.L)


@dataclass(frozen=True)
class CutoffSet:
    N0: float
    M: float
    M0: float
    N2: float

    def __post_init__(self):
        if min(self.N0, self.M, self.M0, self.N2) <= 0:
            raise ValueError("thresholds must be positive")
        if self.M > self.M0:
            raise ValueError("M must not exceed M0")


def cutoffs(scale: ScaleParams, q: float, x: float, C: float | None = None,
            n1: int = 1, q1: int = 1) -> CutoffSet:
    """Dual lengths beyond which the transforms are negligible."""
    k, T, N, r, ke = scale.k, scale.T, scale.N, scale.r, scale.keps
    C = C if C is not None else (scale.C if scale.C is not None else q)
    N0 = ke * max((q * T) ** 3 * r / N, T ** 1.5 * N ** 0.5 * r * abs(x) ** 3)
    M = q * q * (k - 1) ** 2 / (N * ke)
    M0 = ke * max((k - 1) ** 2 * q * q / N, T * x * x)
    N2 = ke * C * N ** (1 / 3) * r ** (2 / 3) * n1 / (q1 * N0 ** (2 / 3))
    return CutoffSet(N0, M, M0, N2)


@dataclass(frozen=True)
class PhaseGeometry:
    """A = 3 (N N0 w)^(1/3) / (q r^(1/3)) and B = 4 pi sqrt(m N) / q."""

    N: float
    N0: float
    w: float
    q: float
    r: float
    m: float

    @classmethod
    def from_AB(cls, A: float, B: float, N: float = 1.0, r: float = 1.0, w: float = 1.0, q: float = 1.0):
        """Back out N0 and m from target values of A and B."""
        N0 = (A * q * r ** (1 / 3) / 3) ** 3 / (N * w)
        m = (B * q / (4 * math.pi)) ** 2 / N
        return cls(N, N0, w, q, r, m)

    @property
    def A(self) -> float:
        return 3 * (self.N * self.N0 * self.w) ** (1 / 3) / (self.q * self.r ** (1 / 3))

    @property
    def B(self) -> float:
        return 4 * math.pi * math.sqrt(self.m * self.N) / self.q

    def at_w(self, w: float) -> "PhaseGeometry":
        return PhaseGeometry(self.N, self.N0, w, self.q, self.r, self.m)

    def f(self, tau: float, k: int) -> float:
        """Phase in units of a full turn."""
        return (k - 1) * math.asin(tau) / TWO_PI + 16 * math.pi ** 2 * self.A ** 3 / (27 * self.B ** 2 * tau ** 2)

    def f2(self, tau: float, k: int) -> float:
        return ((k - 1) * tau / (TWO_PI * (1 - tau * tau) ** 1.5)
                + 32 * math.pi ** 2 * self.A ** 3 / (9 * self.B ** 2 * tau ** 4))

    def tau0(self, k: int) -> float:
        return float(solve_tau0(self.A, self.B, k))


# -- the integrals ------------------------------------------------------------

V_BUMP = SmoothBump(1.0, 2.0)
U_WEIGHT = SmoothBump(0.5, 2.5, plateau=(1.0, 2.0))


def z_integral(scale: ScaleParams, q: float, n1: int, n2: int, x: float, t: float,
               sign: int = 1, V: SmoothBump | None = None) -> complex:
    """int V(z) z^{it} e(N x z/(q Q) + sign 3 (N n1^2 n2 z)^(1/3) / (q r^(1/3))) dz."""
    V = V_BUMP if V is None else V
    N, Q, r = scale.N, scale.Q, scale.r
    c1 = TWO_PI * N * x / (q * Q)
    c2 = sign * TWO_PI * 3 * (N * n1 * n1 * n2) ** (1 / 3) / (q * r ** (1 / 3))
    phase = lambda z: t * np.log(z) + c1 * z + c2 * np.cbrt(z)
    return quad_osc(OscillatorySpec(V, phase, V.a, V.b))


def m_transform(scale: ScaleParams, q: float, m: float, x: float, t: float) -> complex:
    """int U(y) y^{-it} e(-N x y/(q Q)) J_{k-1}(4 pi sqrt(m N y)/q) dy, the
    integral left after GL(2) Voronoi; negligible once m passes M0."""
    N, Q, k = scale.N, scale.Q, scale.k
    B = 4 * math.pi * math.sqrt(m * N) / q
    c = TWO_PI * N * x / (q * Q)
    U = U_WEIGHT
    # scipy's jv: at m ~ 10 M0 the argument is in the thousands, where the
    # hand-written integral backend would need thousands of panels per node
    amp = lambda y: U(y) * jv(k - 1, B * np.sqrt(y))
    phase = lambda y: -t * np.log(y) - c * y
    spec = OscillatorySpec(amp, phase, U.a, U.b)
    # the Bessel factor oscillates at rate ~ B/(2 sqrt y) even though it sits in g
    spec.schedule = (1.0, B, 1.0, 1.0)
    n = max(8, int(B / 2) + 1)
    prev, _ = _panels(spec.integrand, U.a, U.b, n)
    for _ in range(12):
        n *= 2
        cur, mass = _panels(spec.integrand, U.a, U.b, n)
        if abs(cur - prev) <= 1e-14 * mass:
            return cur
        prev = cur
    raise QuadratureError(cur, abs(cur - prev))


def _y_weight(u: float, t: float):
    def amp(y):
        y = np.asarray(y, dtype=float)
        out = U_WEIGHT(y) * V_BUMP(y + u)
        if t != 0.0:
            out = out * np.exp(1j * t * np.log1p(u / y))
        return out

    return amp


def _y_grid(u: float, panels: int):
    lo = max(U_WEIGHT.a, V_BUMP.a - u)
    hi = min(U_WEIGHT.b, V_BUMP.b - u)
    if hi <= lo:
        return None, None
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    mids = 0.5 * (edges[1:] + edges[:-1])
    y = (mids[:, None] + half * _NODES[None, :]).ravel()
    wts = np.tile(_WEIGHTS * half, panels)
    return y, wts


def _y_setup(B: float, k: int, t: float, u: float, panels: int):
    """Nodes (y+u)^(1/3) and weighted non-oscillating amplitude of the y-rule."""
    y, wts = _y_grid(u, panels)
    if y is None:
        return np.zeros(0), np.zeros(0, dtype=complex), 0.0
    amp = _y_weight(u, t)(y) * besselJ_array(k - 1, B * np.sqrt(y))
    return np.cbrt(y + u), amp * wts, float(np.abs(amp) @ wts)


def _y_apply(As, setup, sign: int):
    cy, aw, _ = setup
    if cy.size == 0:
        return np.zeros(len(As), dtype=complex)
    out = np.empty(len(As), dtype=complex)
    for i in range(0, len(As), 256):
        out[i:i + 256] = np.exp(sign * 1j * TWO_PI * np.outer(As[i:i + 256], cy)) @ aw
    return out


def _y_values(As: np.ndarray, B: float, k: int, t: float, u: float, sign: int, panels: int,
              with_mass: bool = False):
    setup = _y_setup(B, k, t, u, panels)
    vals = _y_apply(np.asarray(As, dtype=float), setup, sign)
    return (vals, setup[2]) if with_mass else vals


def y_integral(geom: PhaseGeometry, k: int, t: float = 0.0, u: float = 0.0,
               sign: int = 1, rtol: float = 1e-13) -> complex:
    """int U(y) V(y+u) (1+u/y)^{it} e(sign A (y+u)^(1/3)) J_{k-1}(B sqrt(y)) dy.

    Refinement stops once two levels agree to ``rtol`` times the L1 mass of
    the non-oscillating part, so negligible values come back as they are.
    """
    A, B = geom.A, geom.B
    panels = max(16, int((A + B) / 8) + 1)
    prev = _y_values(np.array([A]), B, k, t, u, sign, panels)[0]
    for _ in range(10):
        panels *= 2
        cur, mass = _y_values(np.array([A]), B, k, t, u, sign, panels, with_mass=True)
        cur = cur[0]
        if abs(cur - prev) <= rtol * mass:
            return complex(cur)
        prev = cur
    raise QuadratureError(complex(cur), abs(cur - prev))


# constant of the iterated stationary-phase leading term; see y_integral_expansion
_Y_CONST = 3 * (4 * math.pi / 3) ** 4 * (4 * math.sqrt(2) * math.pi / 3) / TWO_PI


def y_integral_expansion(geom: PhaseGeometry, k: int, t: float = 0.0, u: float = 0.0,
                         sign: int = 1) -> complex:
    """Leading stationary-phase value of :func:`y_integral` for A < B.

    Writing J through its integral representation and substituting y = s^3,
    the double integral has one nondegenerate critical point (s0, tau1) with
    sin(tau1) = tau0 from :func:`solve_tau0` and s0 = (4 pi A / (3 B tau0))^2.
    Stationary phase in s and then in sin(tau) gives

        c A^(9/2) / (B^5 tau0^5 sqrt(1 - tau0^2)) * U(s0^3) e(f(tau0)) / sqrt(f''(tau0))

    with c = 3 (4 pi/3)^4 (4 sqrt(2) pi / 3) / (2 pi).  The minus sign is the
    complex conjugate when the weight is real.
    """
    if u != 0.0 or t != 0.0:
        raise ValueError("expansion is implemented for u = t = 0")
    A, B = geom.A, geom.B
    if A >= B:
        raise ValueError("expansion requires A < B")
    tau = float(solve_tau0(A, B, k))
    y0 = (4 * math.pi * A / (3 * B * tau)) ** 6
    weight = float(_y_weight(0.0, 0.0)(np.array([y0]))[0])
    if weight == 0.0:
        return 0j
    amp = _Y_CONST * A ** 4.5 / (B ** 5 * tau ** 5 * math.sqrt(1 - tau * tau))
    val = amp * weight / math.sqrt(geom.f2(tau, k)) * np.exp(1j * TWO_PI * geom.f(tau, k))
    return complex(val if sign == 1 else np.conj(val))


def w_integral(geom: PhaseGeometry, geom_p: PhaseGeometry, k: int, n2: int,
               q1: int, q2: int, q2p: int, r: int, n1: int, sign: int = 1,
               W: SmoothBump | None = None, rtol: float = 1e-9) -> complex:
    """int W(w) I(m, N0 w, q) conj(I(m', N0 w, q')) e(-N0 n2 w / (q1 q2 q2' r n1)) dw.

    ``geom`` and ``geom_p`` carry (N, N0, q, r, m) for the two y-integrals;
    their ``w`` field is ignored.
    """
    W = V_BUMP if W is None else W
    freq = TWO_PI * geom.N0 * n2 / (q1 * q2 * q2p * r * n1)
    B, Bp = geom.B, geom_p.B
    a1 = geom.at_w(1.0).A
    a1p = geom_p.at_w(1.0).A

    def y_panels(a_coef, b_val):
        # converge the inner rule at the ends of the w-range, then keep it fixed
        pan = max(16, int((a_coef * 1.3 + b_val) / 8) + 1)
        ends = a_coef * np.cbrt(np.array([W.a, W.b]))
        prev, mass = _y_values(ends, b_val, k, 0.0, 0.0, sign, pan, with_mass=True)
        for _ in range(10):
            pan *= 2
            cur, mass = _y_values(ends, b_val, k, 0.0, 0.0, sign, pan, with_mass=True)
            if np.max(np.abs(cur - prev)) <= 1e-13 * mass:
                return pan
            prev = cur
        raise QuadratureError(complex(cur[0]), float(np.max(np.abs(cur - prev))))

    ypan, ypan_p = y_panels(a1, B), y_panels(a1p, Bp)

    ys = _y_setup(B, k, 0.0, 0.0, ypan)
    ys_p = _y_setup(Bp, k, 0.0, 0.0, ypan_p)

    def evaluate(wpan):
        edges = np.linspace(W.a, W.b, wpan + 1)
        half = 0.5 * (edges[1] - edges[0])
        mids = 0.5 * (edges[1:] + edges[:-1])
        ws = (mids[:, None] + half * _NODES[None, :]).ravel()
        wts = np.tile(_WEIGHTS * half, wpan)
        cw = np.cbrt(ws)
        I1 = _y_apply(a1 * cw, ys, sign)
        I2 = _y_apply(a1p * cw, ys_p, sign)
        prod = W(ws) * I1 * np.conj(I2)
        vals = prod * np.exp(-1j * freq * ws)
        return complex(np.dot(vals, wts)), float(np.abs(prod) @ wts)

    wpan = max(8, int(abs(freq) / (4 * math.pi)) + int((a1 + a1p) / 8) + 1)
    prev, _ = evaluate(wpan)
    gap = math.inf
    for _ in range(8):
        wpan *= 2
        cur, mass = evaluate(wpan)
        gap = abs(cur - prev)
        if gap <= rtol * max(abs(cur), 1e-300) or gap <= 1e-14 * mass:
            return cur
        prev = cur
    raise QuadratureError(cur, gap)


def separation_cutoff_check(scale: ScaleParams, q: float, factor: float = 10.0) -> dict:
    """Ratio tests for the two separation cutoffs in z - y.

    x-integral: int W(x) e(N x (z-y) / (q Q)) dx, with W = 1 on [-k^eps, k^eps]
    and supported in [-2 k^eps, 2 k^eps], at |z-y| = factor and 1/factor times
    k^eps q / (Q T).
    t-integral: int V(t/T) (z/y)^{it} dt at log(z/y) = factor and 1/factor
    times k^eps / T.  The offset is measured on the log scale because at desk
    scale k^eps / T is not small and 1 + 10 k^eps / T would leave [1/2, 2].
    """
    ke, T, Q, N = scale.keps, scale.T, scale.Q, scale.N
    W = SmoothBump(-2 * ke, 2 * ke, plateau=(-ke, ke))

    def xint(d):
        c = TWO_PI * N * d / (q * Q)
        return quad_osc(OscillatorySpec(W, lambda x: c * x, W.a, W.b))

    def tint(d):
        c = T * d
        # substitute t = T s
        return T * quad_osc(OscillatorySpec(V_BUMP, lambda s: c * s, V_BUMP.a, V_BUMP.b))

    thr_x = ke * q / (Q * T)
    thr_t = ke / T
    x_far, x_near, x_zero = abs(xint(factor * thr_x)), abs(xint(thr_x / factor)), abs(xint(0.0))
    t_far, t_near = abs(tint(factor * thr_t)), abs(tint(thr_t / factor))
    return {
        "x_threshold": thr_x,
        "x_ratio": x_far / x_near,
        "x_at_zero": x_zero,
        "W_mass": W.mass(),
        "t_threshold": thr_t,
        "t_ratio": t_far / t_near,
        "passed": x_far / x_near <= 1e-4 and t_far / t_near <= 1e-4,
    }
