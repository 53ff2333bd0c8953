"""Voronoi summation on both sides of the convolution.

GL(2): the level-one identity for a holomorphic eigenform of weight k,

    sum lambda(n) e(an/q) g(n) = (2 pi i^k / q) sum lambda(n) e(-abar n/q) h(n),
    h(y) = int g(x) J_{k-1}(4 pi sqrt(xy)/q) dx,

checked by summing both sides independently.

GL(3): the Mellin-Barnes kernels G_+ and G_- built from the gamma ratio
gamma_l(s), evaluated on vertical lines, and the two-frequency asymptotic
model fitted against them.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import jv, loggamma

from .forms import HolomorphicForm
from .modular import inv
from .oscillatory import SmoothBump

__all__ = [
    "GaussianWeight",
    "GammaFactorSpec",
    "gl2_voronoi_check",
    "gamma_factor",
    "gamma_pm",
    "mellin_transform",
    "G_pm_contour",
    "ContourTailError",
    "AsymptoticFitError",
    "G_pm_asymptotic_check",
    "gl3_error_regime_bound",
]

TWO_PI = 2 * math.pi
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(20)


def _gl(a: float, b: float, panels: int):
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    mids = 0.5 * (edges[1:] + edges[:-1])
    return (mids[:, None] + half * _NODES[None, :]).ravel(), np.tile(_WEIGHTS * half, panels)


# -- GL(2) -------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianWeight:
    """exp(-(x - center)^2 / (2 width^2)), cut at ``reach`` widths.

    At the cut the weight is below 1e-19, far under the tolerance, so the
    cut is invisible to both sides of the identity.
    """

    center: float
    width: float
    reach: float = 9.5

    @property
    def support(self) -> tuple[float, float]:
        return (max(0.0, self.center - self.reach * self.width), self.center + self.reach * self.width)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        out = np.exp(-0.5 * ((x - self.center) / self.width) ** 2)
        return np.where((x >= lo) & (x <= hi), out, 0.0)

    @classmethod
    def balanced(cls, center: float, q: int) -> "GaussianWeight":
        """Width at which the dual transform decays over a few dozen terms,
        so both sides of the identity have comparable size."""
        return cls(center, 1.5 * q * math.sqrt(center) / TWO_PI)


def _hankel_transform(g, k: int, q: int, y: float, tol: float = 1e-13) -> float:
    lo, hi = g.support
    turns = 2 * math.sqrt(y) * (math.sqrt(hi) - math.sqrt(lo)) / q
    panels = max(16, int(4 * turns) + 16)
    c = 4 * math.pi * math.sqrt(y) / q
    prev = None
    for _ in range(8):
        x, w = _gl(lo, hi, panels)
        vals = g(x) * jv(k - 1, c * np.sqrt(x))
        cur = float(vals @ w)
        mass = float(np.abs(vals) @ w)
        if prev is not None and abs(cur - prev) <= tol * max(mass, 1e-300):
            return cur
        prev = cur
        panels *= 2
    raise ArithmeticError("Hankel transform did not settle")


def gl2_voronoi_check(f: HolomorphicForm, a: int, q: int, g, tol: float = 1e-13) -> tuple[complex, complex, float]:
    """(lhs, rhs, relative error).  The dual sum runs until ten consecutive
    values of h are below ``tol`` times the largest one seen, which is about
    where the quadrature noise sits."""
    if q < 1 or math.gcd(a, q) != 1:
        raise ValueError("need gcd(a, q) = 1")
    lo, hi = g.support
    nlo, nhi = max(1, int(math.ceil(lo))), int(math.floor(hi))
    if nhi > f.nmax:
        raise ValueError(f"coefficient table stops at {f.nmax}, need {nhi}")
    lam = f.coeffs
    ns = np.arange(nlo, nhi + 1)
    lhs = complex(np.sum(lam[ns] * g(ns.astype(float)) * np.exp(2j * math.pi * a * ns / q)))
    if lhs == 0 and not np.any(g(ns.astype(float))):
        return 0j, 0j, 0.0

    abar = inv(a, q) if q > 1 else 0
    pref = TWO_PI * (1j ** f.weight) / q
    rhs = 0j
    quiet = 0
    n = 0
    scale = 0.0
    term = 0j
    while quiet < 10:
        n += 1
        if n > f.nmax:
            raise ArithmeticError(f"dual sum not converged by n = {f.nmax}; last |term| {abs(term):.3e}")
        hn = _hankel_transform(g, f.weight, q, n)
        term = pref * lam[n] * cmath.exp(-2j * math.pi * abar * n / q) * hn
        rhs += term
        scale = max(scale, abs(hn))
        quiet = quiet + 1 if abs(hn) <= tol * scale else 0
    rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return lhs, rhs, rel


# -- GL(3) gamma factors -----------------------------------------------------

@dataclass(frozen=True)
class GammaFactorSpec:
    alpha: tuple[complex, complex, complex] = (0, 0, 0)
    ell: int = 0
    s: complex = 1
    sigma: float = -0.5

    def __post_init__(self):
        if self.ell not in (0, 1):
            raise ValueError("ell must be 0 or 1")
        a = tuple(complex(x) for x in self.alpha)
        object.__setattr__(self, "alpha", a)
        if not self.sigma > -1 + max(-x.real for x in a):
            raise ValueError("contour abscissa sigma is not admissible")


def gamma_factor(spec: GammaFactorSpec, precision: int = 53) -> complex:
    """gamma_l(s) = pi^(-3s-3/2)/2 prod Gamma((1+s+a_i+l)/2) / Gamma((-s-a_i+l)/2)."""
    s, ell = complex(spec.s), spec.ell
    with mpmath.workprec(max(precision, 53) + 20):
        total = (-3 * mpmath.mpc(s) - 1.5) * mpmath.log(mpmath.pi) - mpmath.log(2)
        for a in spec.alpha:
            top = (1 + mpmath.mpc(s) + a + ell) / 2
            # distance to the nearest pole of the numerator gamma
            m = round(-top.real)
            if m >= 0 and abs(top + m) < 1e-8:
                raise ValueError("s is within 1e-8 of a pole")
            total += mpmath.loggamma(top)
            bot = (-mpmath.mpc(s) - a + ell) / 2
            mb = round(-bot.real)
            if mb >= 0 and abs(bot + mb) < 1e-30:
                return 0j  # 1/Gamma vanishes
            total -= mpmath.loggamma(bot)
        return complex(mpmath.exp(total))


def _gamma_vec(alpha, ell: int, s: np.ndarray) -> np.ndarray:
    """Same ratio along a vector of s through scipy's complex log-gamma,
    which keeps a continuous branch along vertical lines."""
    total = (-3 * s - 1.5) * math.log(math.pi) - math.log(2)
    for a in alpha:
        total = total + loggamma((1 + s + a + ell) / 2) - loggamma((-s - a + ell) / 2)
    return np.exp(total)


def gamma_pm(alpha, s, sign: int) -> np.ndarray:
    """gamma_+ = gamma_0 - gamma_1 and gamma_- = gamma_0 + gamma_1."""
    s = np.asarray(s, dtype=complex)
    return _gamma_vec(alpha, 0, s) - sign * _gamma_vec(alpha, 1, s)


def mellin_transform(g: SmoothBump, s, panels: int | None = None) -> np.ndarray:
    """int g(x) x^(s-1) dx on a vector of s."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    span = math.log(g.b / g.a)
    if panels is None:
        panels = int(max(np.max(np.abs(s.imag)), 1.0) * span / 2) + 32
    x, w = _gl(g.a, g.b, panels)
    gw = g(x) * w / x
    lx = np.log(x)
    out = np.empty(s.size, dtype=complex)
    for i in range(0, s.size, 256):
        out[i:i + 256] = np.exp(np.outer(s[i:i + 256], lx)) @ gw
    return out


class ContourTailError(ArithmeticError):
    def __init__(self, value, tail):
        super().__init__(f"contour not settled: tail or gap {tail:.3e}")
        self.value = value
        self.tail = tail


class AsymptoticFitError(ArithmeticError):
    pass


def _mellin_on_line(g: SmoothBump, sigma: float, t: np.ndarray, nodes: int = 1536) -> np.ndarray:
    """gtilde(-sigma - i t) by the trapezoid rule in u = log x.  The bump
    vanishes to all orders at both ends, so the rule converges spectrally;
    the aliasing error sits at frequency 2 pi nodes / log(b/a) - |t|."""
    span = math.log(g.b / g.a)
    if 2 * math.pi * nodes / span < 2 * float(np.max(np.abs(t))):
        raise ValueError("too few nodes for this height")
    u = math.log(g.a) + span * np.arange(1, nodes) / nodes
    gu = g(np.exp(u)) * np.exp(-sigma * u) * (span / nodes)
    out = np.empty(t.size, dtype=complex)
    for i in range(0, t.size, 512):
        out[i:i + 512] = np.exp(-1j * np.outer(t[i:i + 512], u)) @ gu
    return out


@dataclass(frozen=True)
class _LineTable:
    t: np.ndarray        # 0 <= t < top when alpha is real, else symmetric
    kern: np.ndarray     # gamma_pm * gtilde * weight / (2 pi)
    tail: np.ndarray     # sum of |kern| beyond each node
    real: bool


_LINE_CACHE: dict = {}


def _line_table(g: SmoothBump, alpha, sign: int, sigma: float, top: float) -> _LineTable:
    key = (g, tuple(alpha), sign, sigma, top)
    hit = _LINE_CACHE.get(key)
    if hit is not None:
        return hit
    real = all(complex(a).imag == 0 for a in alpha)
    # the integrand is analytic in |Im t| < d, d the distance from the line to
    # the first pole of Gamma((1+s+alpha)/2), so the trapezoid rule in t
    # errs by about exp(-pi d / dt) times the size of the integrand at
    # distance d/2 from the line
    d = sigma + 1 + min(complex(a).real for a in alpha)
    dt_max = d / 24
    span = math.log(g.b / g.a)
    # trapezoid in u fine enough that aliasing starts well past the top
    M = int(span * (top + 6000) / (2 * math.pi)) + 64
    du = span / M
    n_fft = 1 << int(math.ceil(math.log2(2 * math.pi / (dt_max * du))))
    dt = 2 * math.pi / (n_fft * du)
    u0 = math.log(g.a)
    u = u0 + du * np.arange(M + 1)
    gu = g(np.exp(u)) * np.exp(-sigma * u) * du
    # sum_j gu_j exp(-i t_m u_j) at t_m = m dt is a DFT in j
    count = int(top / dt) + 1
    spec_pos = np.fft.fft(gu, n_fft)[:count] * np.exp(-1j * dt * np.arange(count) * u0)
    tpos = dt * np.arange(count)
    if real:
        t = tpos
        mel = spec_pos
        w = np.full(count, dt)
        w[0] = dt / 2
    else:
        spec_neg = np.conj(np.fft.fft(np.conj(gu), n_fft)[:count]) * np.exp(1j * dt * np.arange(count) * u0)
        t = np.concatenate([-tpos[:0:-1], tpos])
        mel = np.concatenate([spec_neg[:0:-1], spec_pos])
        w = np.full(t.size, dt)
    s = sigma + 1j * t
    kern = gamma_pm(alpha, s, sign) * mel * w / TWO_PI
    mag = np.abs(kern)
    order = np.argsort(-np.abs(t), kind="stable")
    tail = np.empty_like(mag)
    tail[order] = np.cumsum(mag[order])
    table = _LineTable(t, kern, tail, real)
    if len(_LINE_CACHE) > 16:
        _LINE_CACHE.clear()
    _LINE_CACHE[key] = table
    return table


def G_pm_contour(x: float, g: SmoothBump, spec: GammaFactorSpec, H: float = 60.0,
                 sign: int = 1, tol: float = 1e-12, top: float = 8000.0,
                 return_height: bool = False):
    """(1/2 pi i) int_(sigma) x^(-s) gamma_pm(s) gtilde(-s) ds.

    The line is cut at |Im s| = H, with H doubled from its starting value
    until the absolute mass of the integrand beyond H is below ``tol`` times
    max(|G|, 1).  For real alpha the integrand at -t is the conjugate of the
    one at t, so only t >= 0 is summed.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    tab = _line_table(g, spec.alpha, sign, spec.sigma, top)
    lx = math.log(x)
    scale = math.exp(-spec.sigma * lx)
    while True:
        if H > top:
            raise ContourTailError(None, float(tab.tail[np.argmin(np.abs(np.abs(tab.t) - top))]) * scale)
        keep = np.abs(tab.t) <= H
        v = complex(np.exp(-1j * tab.t[keep] * lx) @ tab.kern[keep]) * scale
        if tab.real:
            v = complex(2 * v.real, 0.0)
        beyond = np.abs(tab.t) > H
        rest = float(tab.tail[beyond].max()) * scale * (2 if tab.real else 1) if np.any(beyond) else 0.0
        if rest <= tol * max(abs(v), 1.0):
            return (v, H) if return_height else v
        H *= 2


def _model_basis(xs: np.ndarray, g: SmoothBump, jmax: int = 2) -> np.ndarray:
    """Columns x int g(y) e(+-3 (xy)^(1/3)) (xy)^(-j/3) dy, j = 1..jmax."""
    y, w = _gl(g.a, g.b, 64)
    gy = g(y) * w
    cols = []
    for j in range(1, jmax + 1):
        for sgn in (1, -1):
            xy = np.outer(xs, y)
            vals = np.exp(sgn * 2j * math.pi * 3 * np.cbrt(xy)) * xy ** (-j / 3)
            cols.append(xs * (vals @ gy))
    return np.stack(cols, axis=1)


def _fit(xs, vals, g):
    A = _model_basis(xs, g)
    if np.linalg.cond(A) > 1e10:
        raise AsymptoticFitError("model basis ill-conditioned on this window")
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    resid = vals - A @ coef
    return coef, float(np.sqrt(np.mean(np.abs(resid) ** 2) / np.mean(np.abs(vals) ** 2)))


def _window(x: float, spread: float, n: int) -> np.ndarray:
    return x * spread ** np.linspace(-1, 1, n)


def G_pm_asymptotic_check(xs, g: SmoothBump, spec: GammaFactorSpec, sign: int = 1,
                          anchor: float | None = None) -> dict:
    """Fit (c_1, d_1, c_2, d_2) once on a window far out, where later terms
    are negligible, then measure the relative residual of that fixed model on
    a small window around each x.  A second fit on a window at 4 * max(xs)
    gives the drift of the leading constants."""
    xs = sorted(float(x) for x in xs)
    anchor = 8 * xs[-1] if anchor is None else float(anchor)

    def values(pts):
        return np.array([G_pm_contour(float(p), g, spec, sign=sign) for p in pts])

    pts = _window(anchor, 1.25, 16)
    coef, anchor_res = _fit(pts, values(pts), g)
    rows = []
    for x in xs:
        pts = _window(x, 1.1, 9)
        v = values(pts)
        r = v - _model_basis(pts, g) @ coef
        rows.append({"x": x, "residual": float(np.sqrt(np.mean(np.abs(r) ** 2) / np.mean(np.abs(v) ** 2)))})
    ratios = [b["residual"] / a["residual"] for a, b in zip(rows, rows[1:])]
    far = _window(4 * xs[-1], 1.25, 12)
    coef_far, _ = _fit(far, values(far), g)
    drift = float(np.max(np.abs(coef_far[:2] - coef[:2]) / np.abs(coef[:2])))
    return {"coef": coef, "anchor_residual": anchor_res, "rows": rows,
            "residual_ratios": ratios, "leading_drift": drift}


def gl3_error_regime_bound(q: float, Q: float, r: float, N: float) -> float:
    """q^2 sqrt(Q r) / sqrt(N)."""
    return q * q * math.sqrt(Q * r) / math.sqrt(N)
