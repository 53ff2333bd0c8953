"""Smoothed delta symbol: detect n = 0 for |n| <= 2L with moduli q <= Q = 2 sqrt(L).

Construction.  Fix an even smooth weight ``w`` supported on ``1/2 <= |t| <= 1``
with ``int_0^oo w = 1`` and put ``C_Q = Q^-1 sum_{d >= 1} w(d/Q)``.  Grouping
``sum_{d | n} [w(d/Q) - w(|n|/(dQ))]`` by the reduced denominator gives

    delta(n) = (Q^2 C_Q)^-1 sum_q sum*_{a mod q} e(an/q) h(q/Q, n/Q^2),
    h(x, y)  = sum_{j >= 1} (xj)^-1 [w(xj) - w(|y|/(xj))],

exactly, and only q <= Q contribute when |n| <= 2L.  Since n/Q^2 stays in
[-1/2, 1/2], h(q/Q, .) may be multiplied by a cutoff chi that is 1 there and
vanishes beyond 1 without changing any value that is ever used.  Then

    g(q, x) = C_Q^-1 int chi(y) h(q/Q, y) e(-x Q y / q) dy

is a smooth, rapidly decaying function of x and

    delta(n) = Q^-1 sum_{q <= Q} q^-1 sum*_a e(an/q) int g(q, x) e(nx/(qQ)) dx.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .modular import ramanujan_sum
from .oscillatory import SmoothBump

__all__ = [
    "DeltaExpansion",
    "build_expansion",
    "delta_eval",
    "delta_eval_all",
    "g_values",
    "g_property_report",
    "x_tail_fraction",
]

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(20)


def _gl(a: float, b: float, panels: int):
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    mids = 0.5 * (edges[1:] + edges[:-1])
    return (mids[:, None] + half * _NODES[None, :]).ravel(), np.tile(_WEIGHTS * half, panels)


# exp(-a/(1-s^2)) looks like a Gaussian in the middle; a = 1 would leave the
# x-transform decaying only like exp(-sqrt(x)), far too slowly for 1e-6
STEEP = 16.0


def _bump01(t):
    """Steep bump on [1/2, 1], peak 1."""
    t = np.abs(np.asarray(t, dtype=float))
    s = 4 * t - 3
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(STEEP * (1.0 - 1.0 / (1.0 - s[inside] ** 2)))
    return out


_GL40 = np.polynomial.legendre.leggauss(40)
_BUMP_MASS = float(np.dot(_bump01(_gl(0.5, 1.0, 64)[0]), _gl(0.5, 1.0, 64)[1]))


def weight(t):
    """Even bump on 1/2 <= |t| <= 1 with int_0^oo w = 1."""
    return _bump01(t) / _BUMP_MASS


def cutoff(y):
    """1 on |y| <= 1/2, 0 on |y| >= 1; the transition is the normalized tail
    integral of the same bump, so chi' has the same spectral decay as w."""
    u = np.abs(np.asarray(y, dtype=float))
    out = np.where(u <= 0.5, 1.0, 0.0)
    mid = (u > 0.5) & (u < 1.0)
    if np.any(mid):
        um = u[mid]
        tau, wt = _GL40
        pts = um[:, None] + (1.0 - um)[:, None] * (tau[None, :] + 1) / 2
        out[mid] = (_bump01(pts) @ wt) * (1.0 - um) / 2 / _BUMP_MASS
    return out


@dataclass
class DeltaExpansion:
    L: float
    Q: float = field(init=False)
    CQ: float = field(init=False)
    Leps: float = field(init=False)
    x_cut: float = field(init=False)
    W: SmoothBump = field(init=False, repr=False)

    def __post_init__(self):
        if self.L < 4:
            raise ValueError("need L >= 4")
        self.Q = 2 * math.sqrt(self.L)
        d = np.arange(1, int(self.Q) + 2)
        self.CQ = float(weight(d / self.Q).sum()) / self.Q
        # g(q, .) decays on a scale fixed by the support [1/2, 1] of w, not by L,
        # so small L still needs the plateau out to |x| = 24
        self.Leps = max(math.log(self.L) ** 2, 24.0)
        self.x_cut = 2 * self.Leps
        self.W = SmoothBump(-self.x_cut, self.x_cut, plateau=(-self.Leps, self.Leps))

    @property
    def moduli(self) -> range:
        return range(1, int(math.floor(self.Q)) + 1)

    def h(self, q: int, y) -> np.ndarray:
        """h(q/Q, y) as written, before the cutoff."""
        x = q / self.Q
        y = np.abs(np.asarray(y, dtype=float))
        js = np.arange(1, int(2 / x) + 3)
        first = float(np.sum(weight(x * js) / (x * js)))
        second = np.zeros_like(y)
        for j in js:
            second += weight(y / (x * j)) / (x * j)
        return first - second


def build_expansion(L: float) -> DeltaExpansion:
    return DeltaExpansion(L)


def _y_rule(exp: DeltaExpansion, q: int, xmax: float):
    # narrowest feature is the j=1 bump of width q/(4Q); the phase makes
    # x Q / q turns over [0, 1]
    panels = int(max(16 * exp.Q / q, 2 * xmax * exp.Q / q)) + 16
    y, wy = _gl(0.0, 1.0, panels)
    amp = cutoff(y) * exp.h(q, y) * wy
    return y, amp


def g_values(exp: DeltaExpansion, q: int, xs) -> np.ndarray:
    """g(q, x) on an array of x (g is real and even in x)."""
    xs = np.asarray(xs, dtype=float)
    y, amp = _y_rule(exp, q, float(np.max(np.abs(xs), initial=1.0)))
    out = np.empty(xs.size)
    flat = xs.ravel()
    scale = 2 * math.pi * exp.Q / q
    for i in range(0, flat.size, 512):
        chunk = flat[i:i + 512]
        out[i:i + 512] = 2 * np.cos(scale * np.outer(chunk, y)) @ amp
    return out.reshape(xs.shape) / exp.CQ


def _x_rule(exp: DeltaExpansion, q: int):
    # e(nx/(qQ)) with |n| <= 2L turns at most Q/(2q) times per unit of x
    panels = int(exp.x_cut * max(2.0, exp.Q / q)) + 8
    return _gl(0.0, exp.x_cut, panels)


def delta_eval_all(exp: DeltaExpansion, ns) -> np.ndarray:
    """delta_eval for a batch of integers n, sharing the g tables."""
    ns = np.asarray(ns, dtype=np.int64)
    if np.any(np.abs(ns) > 2 * exp.L):
        raise ValueError("|n| must be <= 2L")
    total = np.zeros(ns.size)
    for q in exp.moduli:
        xs, wx = _x_rule(exp, q)
        gx = g_values(exp, q, xs) * exp.W(xs) * wx
        # even integrand: int over R is twice the half line
        integ = 2 * np.cos(2 * math.pi * np.outer(ns, xs) / (q * exp.Q)) @ gx
        cq = np.array([ramanujan_sum(q, int(n)) for n in ns], dtype=float)
        total += cq * integ / q
    return total / exp.Q


def delta_eval(n: int, exp: DeltaExpansion, precision: int = 53) -> float:
    if abs(n) > 2 * exp.L:
        raise ValueError("|n| must be <= 2L")
    return float(delta_eval_all(exp, [n])[0])


def x_tail_fraction(exp: DeltaExpansion, n: int = 0) -> float:
    """Share of the n-th expansion coming from L^eps < |x| <= 2 L^eps."""
    tail = 0.0
    full = 0.0
    for q in exp.moduli:
        xs, wx = _x_rule(exp, q)
        gx = g_values(exp, q, xs) * exp.W(xs) * wx * np.cos(2 * math.pi * n * xs / (q * exp.Q))
        cq = ramanujan_sum(q, n)
        full += cq * gx.sum() / q
        tail += cq * gx[xs > exp.Leps].sum() / q
    return abs(tail) / max(abs(full), 1e-300)


def g_property_report(exp: DeltaExpansion, qs=None, xs=None, B: float = 2.0) -> dict:
    """Largest |h(q,x)| qQ / (q/Q + |x|)^B over the grid and largest
    |g(q,x)| |x|^B over the grid points with |x| >= 1."""
    qs = list(exp.moduli) if qs is None else list(qs)
    xs = np.linspace(-2, 2, 41) if xs is None else np.asarray(xs, dtype=float)
    worst_h, worst_g = 0.0, 0.0
    where_h = where_g = None
    for q in qs:
        g = g_values(exp, q, xs)
        hq = np.abs(g - 1) * q * exp.Q / (q / exp.Q + np.abs(xs)) ** B
        i = int(np.argmax(hq))
        if hq[i] > worst_h:
            worst_h, where_h = float(hq[i]), (q, float(xs[i]))
        big = np.abs(xs) >= 1
        if np.any(big):
            gq = np.abs(g[big]) * np.abs(xs[big]) ** B
            j = int(np.argmax(gq))
            if gq[j] > worst_g:
                worst_g, where_g = float(gq[j]), (q, float(xs[big][j]))
    return {"B": B, "h_ratio": worst_h, "h_at": where_h, "g_ratio": worst_g, "g_at": where_g}
