"""J-Bessel functions of integer order from two independent backends.

The ascending power series, evaluated in mpmath with enough guard bits to
absorb the cancellation, is the reference.  The second backend integrates
``cos(n*tau - x*sin(tau))`` over a period with composite Gauss-Legendre in
float64.  On top of these sit the leading term of Langer's transition-region
expansion and the explicit small-argument envelope.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import mpmath
import numpy as np

__all__ = [
    "BesselQuery",
    "besselJ_series",
    "besselJ_integral",
    "besselJ_array",
    "langer_leading",
    "langer_error",
    "small_arg_envelope",
    "SmallArgReport",
]

SERIES_XMAX = 1.0e4


@dataclass(frozen=True)
class BesselQuery:
    """Order is ``k - 1`` for a weight ``k`` form."""

    k: int
    x: float
    precision: int = 128

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("weight k must be >= 2")
        if self.x < 0:
            raise ValueError("argument must be nonnegative")

    @property
    def order(self) -> int:
        return self.k - 1


def _log2_max_term(n: int, x: float) -> float:
    if x == 0:
        return 0.0
    # terms (x/2)^(2m+n)/(m!(m+n)!) peak near m ~ x/2
    lx = math.log(x / 2)
    best = -math.inf
    m0 = max(0, int(x / 2) - 2)
    for m in range(max(0, m0 - 3), m0 + 6):
        v = (2 * m + n) * lx - math.lgamma(m + 1) - math.lgamma(m + n + 1)
        best = max(best, v)
    return best / math.log(2)


def besselJ_series(q: BesselQuery) -> mpmath.mpf:
    """Power series, summed until the remaining tail is below 2^-precision
    relative to the running sum."""
    if q.x > SERIES_XMAX:
        raise ValueError(f"series backend limited to x <= {SERIES_XMAX:g}")
    n = q.order
    if q.x == 0:
        return mpmath.mpf(0) if n > 0 else mpmath.mpf(1)
    guard = max(0, int(math.ceil(_log2_max_term(n, q.x)))) + 32
    with mpmath.workprec(q.precision + guard):
        x = mpmath.mpf(q.x)
        h2 = (x / 2) ** 2
        term = (x / 2) ** n / mpmath.factorial(n)
        total = term
        tol = mpmath.mpf(2) ** (-q.precision)
        m = 0
        while True:
            m += 1
            term = -term * h2 / (m * (m + n))
            total += term
            # once the ratio is below 1/2 the tail is dominated by a geometric series
            if h2 < (m + 1) * (m + 1 + n) / 2 and abs(term) <= tol * abs(total):
                break
        return +total


def _gl_nodes(order: int):
    return np.polynomial.legendre.leggauss(order)


_GL_ORDER = 24
_GL = _gl_nodes(_GL_ORDER)


def _panel_rule(n: int, x, panels: int):
    """(1/pi) * int_0^pi cos(n t - x sin t) dt on ``panels`` equal panels."""
    t0, w0 = _GL
    edges = np.linspace(0.0, math.pi, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    mids = 0.5 * (edges[1:] + edges[:-1])
    t = (mids[:, None] + half * t0[None, :]).ravel()
    w = np.tile(w0 * half, panels)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    vals = np.cos(n * t[None, :] - x[:, None] * np.sin(t)[None, :])
    return vals @ w / math.pi


def besselJ_integral(q: BesselQuery, tol: float = 1e-15, max_panels: int = 1 << 14) -> float:
    """Integral representation with panel doubling until two levels agree."""
    n = q.order
    panels = max(4, int((n + q.x) / 8) + 1)
    prev = float(_panel_rule(n, q.x, panels)[0])
    while panels < max_panels:
        panels *= 2
        cur = float(_panel_rule(n, q.x, panels)[0])
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    raise ArithmeticError(f"integral backend did not settle; last gap {abs(cur - prev):.3e}")


def besselJ_array(n: int, x) -> np.ndarray:
    """Vectorized float64 J_n on an array, using the integral representation
    with a panel count sized for the largest argument."""
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    if flat.size == 0:
        return x.copy()
    panels = max(4, int((n + float(flat.max())) / 4) + 4)
    out = np.empty_like(flat)
    step = max(1, 2_000_000 // (panels * _GL_ORDER))
    for i in range(0, flat.size, step):
        out[i:i + step] = _panel_rule(n, flat[i:i + step], panels)
    return out.reshape(x.shape)


def langer_leading(q: BesselQuery, delta: float = 0.1) -> tuple[float, float]:
    """Leading term beyond the turning point and the size of the first
    neglected correction, both in absolute terms."""
    nu = q.order
    if q.x < nu * (1 + delta):
        raise ValueError("too close to the turning point x = k-1")
    w = math.sqrt((q.x / nu) ** 2 - 1)
    amp = math.sqrt(2 / (math.pi * nu * w))
    phase = nu * (w - math.atan(w)) - math.pi / 4
    return amp * math.cos(phase), amp / (nu * (w - math.atan(w)))


def langer_error(q: BesselQuery, window: int = 9) -> float:
    """Error of the leading term against the series, relative to the
    amplitude sqrt(2/(pi nu w)) and maximized over one local oscillation.

    Taking the sup over a period removes the |sin| factor of the first
    correction, which otherwise makes pointwise errors jump around.
    """
    nu = q.order
    w = math.sqrt((q.x / nu) ** 2 - 1)
    period = 2 * math.pi * q.x / (nu * w)  # d(phase)/dx = nu*w/x
    worst = 0.0
    for j in range(window):
        xj = q.x + period * j / (window - 1)
        qj = BesselQuery(q.k, xj, 64)
        lead, _ = langer_leading(qj)
        wj = math.sqrt((xj / nu) ** 2 - 1)
        amp = math.sqrt(2 / (math.pi * nu * wj))
        worst = max(worst, abs(float(besselJ_series(qj)) - lead) / amp)
    return worst


class SmallArgReport(NamedTuple):
    value: float
    envelope: float
    passed: bool
    exp_form_holds: bool


def small_arg_envelope(q: BesselQuery, eps: float = 0.05) -> SmallArgReport:
    """|J_{k-1}(x)| against (x e / (2(k-1)))^(k-1), valid for all x >= 0 since
    |J_n(x)| <= (x/2)^n / n! and n! >= (n/e)^n."""
    nu = q.order
    if q.x > nu ** (1 - eps):
        raise ValueError("x outside the small-argument regime (k-1)^(1-eps)")
    with mpmath.workprec(q.precision):
        val = besselJ_series(q)
        env = (mpmath.mpf(q.x) * mpmath.e / (2 * nu)) ** nu
        ok = abs(val) <= env
        exp_ok = abs(val) <= mpmath.exp(-nu)
        return SmallArgReport(float(val), float(env), bool(ok), bool(exp_ok))
