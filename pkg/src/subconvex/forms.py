"""Fourier coefficients of the two automorphic inputs.

GL(2): the level-one Hecke eigenforms of weights 12, 16, 18, 20, 22, 26.
Each of these spaces is one-dimensional, so the form is Delta times an
Eisenstein series, and every coefficient is an exact integer.

GL(3): the minimal parabolic Eisenstein series whose standard L-function is
zeta(s - a1) zeta(s - a2) zeta(s - a3).  At a prime power the coefficient is a
Schur polynomial in x_i = p^{a_i}.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .modular import divisors
from .oscillatory import SmoothBump

__all__ = [
    "HolomorphicForm",
    "EisensteinGL3",
    "DyadicWindow",
    "delta_coeffs",
    "delta_coeffs_oracle",
    "eisenstein_series",
    "holomorphic_form",
    "deligne_check",
    "gl3_coeff",
    "gl3_coeff_bialternant",
    "gl3_divisor_sum",
    "rankin_selberg_average",
    "sr_sum",
    "sr_bound",
    "SUPPORTED_WEIGHTS",
]

SUPPORTED_WEIGHTS = (12, 16, 18, 20, 22, 26)


# -- exact power series through Kronecker substitution -----------------------

def _bits(coeffs) -> int:
    return max((abs(c).bit_length() for c in coeffs), default=0)


def _series_mul(a: list[int], b: list[int], n: int) -> list[int]:
    """First n coefficients of a*b for integer series.

    Both series are packed into one big integer with slots wide enough that no
    slot overflows; the product is then a single big-integer multiplication.
    """
    a, b = a[:n], b[:n]
    if not a or not b:
        return [0] * n
    slot = _bits(a) + _bits(b) + max(len(a), len(b)).bit_length() + 2
    slot = (slot + 7) // 8 * 8
    step = slot // 8

    def pack(seq):
        # positive and negative parts packed separately as unsigned digits
        pos = b"".join(max(c, 0).to_bytes(step, "little") for c in seq)
        neg = b"".join(max(-c, 0).to_bytes(step, "little") for c in seq)
        return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")

    pa, pb = pack(a), pack(b)
    # shift every slot by half its range so the digits are nonnegative; the
    # reduction mod 2^(slot n) drops the coefficients beyond q^(n-1)
    half = 1 << (slot - 1)
    offset = int.from_bytes((bytes(slot // 8 - 1) + b"\x80") * n, "little")
    prod = (pa * pb + offset) & ((1 << (slot * n)) - 1)
    raw = prod.to_bytes(slot * n // 8, "little")
    step = slot // 8
    return [int.from_bytes(raw[i * step:(i + 1) * step], "little") - half for i in range(n)]


def _eta_cubed(n: int) -> list[int]:
    """prod (1 - q^m)^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2}."""
    out = [0] * n
    k = 0
    while k * (k + 1) // 2 < n:
        out[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    return out


def _delta_integers(nmax: int) -> list[int]:
    """tau(0..nmax) with tau(0) = 0, from Delta = q (eta^3)^8."""
    n = nmax  # coefficients of prod(1-q^m)^24 up to q^(nmax-1)
    e = _eta_cubed(n)
    e2 = _series_mul(e, e, n)
    e4 = _series_mul(e2, e2, n)
    e8 = _series_mul(e4, e4, n)
    return [0] + e8[:nmax]


def _sigma(k: int, nmax: int) -> list[int]:
    s = [0] * (nmax + 1)
    for d in range(1, nmax + 1):
        dk = d ** k
        for m in range(d, nmax + 1, d):
            s[m] += dk
    return s


def eisenstein_series(weight: int, nmax: int) -> list[int]:
    """Coefficients 0..nmax of E_4, E_6 (integer normalization, constant term 1)
    and of E_8 = E_4^2, E_10 = E_4 E_6, E_14 = E_4^2 E_6."""
    if weight == 0:
        return [1] + [0] * nmax
    if weight in (4, 6):
        c = 240 if weight == 4 else -504
        s = _sigma(weight - 1, nmax)
        return [1] + [c * s[m] for m in range(1, nmax + 1)]
    parts = {8: (4, 4), 10: (4, 6), 14: (4, 4, 6)}
    if weight not in parts:
        raise ValueError(f"unsupported Eisenstein weight {weight}")
    out = [1] + [0] * nmax
    for w in parts[weight]:
        out = _series_mul(out, eisenstein_series(w, nmax), nmax + 1)
    return out


def delta_coeffs_oracle(nmax: int) -> list[int]:
    """tau(0..nmax) from (E_4^3 - E_6^2)/1728, independent of the eta route."""
    e4 = eisenstein_series(4, nmax)
    e6 = eisenstein_series(6, nmax)
    e43 = _series_mul(_series_mul(e4, e4, nmax + 1), e4, nmax + 1)
    e62 = _series_mul(e6, e6, nmax + 1)
    out = []
    for a, b in zip(e43, e62):
        q, r = divmod(a - b, 1728)
        if r:
            raise ArithmeticError("E4^3 - E6^2 not divisible by 1728")
        out.append(q)
    return out


# -- GL(2) -------------------------------------------------------------------

@dataclass(frozen=True)
class HolomorphicForm:
    """Level-one Hecke eigenform; ``integers[n]`` is the unnormalized n-th
    coefficient (index 0 unused) and ``coeffs[n] = integers[n] / n^((k-1)/2)``."""

    weight: int
    integers: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if self.weight not in SUPPORTED_WEIGHTS:
            raise ValueError(f"weight must be one of {SUPPORTED_WEIGHTS}")
        if len(self.integers) < 2 or self.integers[1] != 1:
            raise ValueError("coefficient table must start with a(1) = 1")

    @property
    def nmax(self) -> int:
        return len(self.integers) - 1

    @property
    def coeffs(self) -> np.ndarray:
        n = np.arange(len(self.integers), dtype=float)
        n[0] = 1.0
        vals = np.array([float(a) for a in self.integers])
        out = vals / n ** ((self.weight - 1) / 2)
        out[0] = 0.0
        return out

    def __call__(self, n: int) -> float:
        if not 1 <= n <= self.nmax:
            raise IndexError(f"coefficient {n} outside table 1..{self.nmax}")
        return float(self.integers[n]) / n ** ((self.weight - 1) / 2)

    def hecke_violations(self, limit: int | None = None) -> list[tuple[int, int]]:
        """Pairs m <= n with mn <= limit where
        a(m) a(n) != sum_{d | (m,n)} d^(k-1) a(mn/d^2) in exact integers."""
        limit = self.nmax if limit is None else min(limit, self.nmax)
        a, k1 = self.integers, self.weight - 1
        bad = []
        for m in range(2, math.isqrt(limit) + 1):
            for n in range(m, limit // m + 1):
                rhs = sum(d ** k1 * a[m * n // (d * d)] for d in divisors(math.gcd(m, n)))
                if a[m] * a[n] != rhs:
                    bad.append((m, n))
        return bad


def delta_coeffs(nmax: int) -> HolomorphicForm:
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    return HolomorphicForm(12, tuple(_delta_integers(nmax)))


def holomorphic_form(weight: int, nmax: int) -> HolomorphicForm:
    """Delta * E_{weight-12}; the cusp space is one-dimensional so this is the
    normalized eigenform."""
    if weight not in SUPPORTED_WEIGHTS:
        raise ValueError(f"weight must be one of {SUPPORTED_WEIGHTS}")
    delta = _delta_integers(nmax)
    if weight == 12:
        return HolomorphicForm(12, tuple(delta))
    e = eisenstein_series(weight - 12, nmax)
    return HolomorphicForm(weight, tuple(_series_mul(delta, e, nmax + 1)))


def deligne_check(form: HolomorphicForm, nmax: int | None = None,
                  coeffs: np.ndarray | None = None) -> list[int]:
    """Indices n with |lambda(n)| > d(n).  ``coeffs`` overrides the table,
    which is how a deliberately corrupted table is fed in."""
    lam = form.coeffs if coeffs is None else np.asarray(coeffs)
    nmax = len(lam) - 1 if nmax is None else nmax
    d = np.zeros(nmax + 1, dtype=np.int64)
    for i in range(1, nmax + 1):
        d[i::i] += 1
    idx = np.nonzero(np.abs(lam[1:nmax + 1]) > d[1:] * (1 + 1e-12))[0] + 1
    return idx.tolist()


# -- GL(3) -------------------------------------------------------------------

@dataclass(frozen=True)
class EisensteinGL3:
    alpha: tuple[complex, complex, complex] = (0, 0, 0)

    def __post_init__(self):
        a = tuple(complex(x) for x in self.alpha)
        if len(a) != 3:
            raise ValueError("need three Langlands parameters")
        if abs(sum(a)) > 1e-12:
            raise ValueError("Langlands parameters must sum to 0")
        object.__setattr__(self, "alpha", a)

    @property
    def nu(self) -> tuple[complex, complex]:
        """Alternate (nu1, nu2) coordinates, for reference only."""
        a1, a2, a3 = self.alpha
        return ((a1 - a2 + 1) / 3, (a2 - a3 + 1) / 3)

    def roots(self, p: int) -> tuple[complex, complex, complex]:
        lp = math.log(p)
        return tuple(cmath.exp(a * lp) for a in self.alpha)


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _complete_homogeneous(x, top: int) -> list[complex]:
    """h_0..h_top of three variables via h_n = e1 h_{n-1} - e2 h_{n-2} + e3 h_{n-3}."""
    e1 = x[0] + x[1] + x[2]
    e2 = x[0] * x[1] + x[0] * x[2] + x[1] * x[2]
    e3 = x[0] * x[1] * x[2]
    h = [1 + 0j]
    for n in range(1, top + 1):
        v = e1 * h[n - 1]
        if n >= 2:
            v -= e2 * h[n - 2]
        if n >= 3:
            v += e3 * h[n - 3]
        h.append(v)
    return h


@lru_cache(maxsize=1 << 16)
def _prime_power(alpha: tuple, p: int, a: int, b: int) -> complex:
    x = EisensteinGL3(alpha).roots(p)
    h = _complete_homogeneous(x, a + b + 1)
    # Jacobi-Trudi for the partition (a+b, b)
    return h[a + b] * h[b] - (h[a + b + 1] * h[b - 1] if b >= 1 else 0)


def gl3_coeff(n: int, r: int, form: EisensteinGL3) -> complex:
    """lambda(n, r), multiplicative over primes with the Schur polynomial
    s_{(a+b, b, 0)}(p^{a1}, p^{a2}, p^{a3}) at (p^a, p^b)."""
    if n < 1 or r < 1:
        raise ValueError("n and r must be positive")
    fn, fr = _factor(n), _factor(r)
    out = 1 + 0j
    for p in set(fn) | set(fr):
        out *= _prime_power(form.alpha, p, fn.get(p, 0), fr.get(p, 0))
    return out


def gl3_coeff_bialternant(n: int, r: int, form: EisensteinGL3) -> complex:
    """Same coefficient from the ratio of alternants; needs p^{a_i} distinct."""
    fn, fr = _factor(n), _factor(r)
    out = 1 + 0j
    for p in set(fn) | set(fr):
        a, b = fn.get(p, 0), fr.get(p, 0)
        x = form.roots(p)
        lam = (a + b + 2, b + 1, 0)

        def alt(expo):
            m = [[xi ** e for xi in x] for e in expo]
            return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

        den = alt((2, 1, 0))
        if abs(den) < 1e-12:
            raise ZeroDivisionError("bialternant needs distinct p^{alpha_i}")
        out *= alt(lam) / den
    return out


def gl3_divisor_sum(n: int, form: EisensteinGL3) -> complex:
    """sum over ordered d1 d2 d3 = n of d1^a1 d2^a2 d3^a3, by enumeration."""
    a1, a2, a3 = form.alpha
    tot = 0j
    for d1 in divisors(n):
        for d2 in divisors(n // d1):
            d3 = n // (d1 * d2)
            tot += cmath.exp(a1 * math.log(d1) + a2 * math.log(d2) + a3 * math.log(d3))
    return tot


def _spf(limit: int) -> np.ndarray:
    s = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if s[p] == 0:
            s[p::p][s[p::p] == 0] = p
    return s


def _rs_partial_sums(form: EisensteinGL3, xs: list[float]) -> list[float]:
    top = int(max(xs))
    spf = _spf(top)

    def fac(m):
        out = {}
        while m > 1:
            p = int(spf[m])
            out[p] = out.get(p, 0) + 1
            m //= p
        return out

    # |lambda(n1,n2)|^2 tallied at n1^2 n2, then accumulated
    weight = np.zeros(top + 1)
    for n1 in range(1, math.isqrt(top) + 1):
        f1 = fac(n1)
        for n2 in range(1, top // (n1 * n1) + 1):
            f2 = fac(n2)
            v = 1 + 0j
            for p in set(f1) | set(f2):
                v *= _prime_power(form.alpha, p, f1.get(p, 0), f2.get(p, 0))
            weight[n1 * n1 * n2] += abs(v) ** 2
    cum = np.cumsum(weight)
    return [float(cum[int(x)]) for x in xs]


def rankin_selberg_average(form: EisensteinGL3, x: float, points: int = 7) -> tuple[float, float]:
    """Sum of |lambda(n1,n2)|^2 over n1^2 n2 <= x and the least-squares slope
    of log(sum) against log(x) over the dyadic points x, x/2, ..., kept >= 10."""
    if x < 1:
        raise ValueError("x must be >= 1")
    xs = [x / 2 ** j for j in range(points) if x / 2 ** j >= 10]
    if len(xs) < 2:
        return _rs_partial_sums(form, [x])[0], float("nan")
    sums = _rs_partial_sums(form, xs)
    slope = float(np.polyfit(np.log(xs), np.log(sums), 1)[0])
    return sums[0], slope


# -- the dyadic sum -----------------------------------------------------------

@dataclass(frozen=True)
class DyadicWindow:
    N: float
    r: int = 1
    V: SmoothBump = SmoothBump(1.0, 2.0)

    def __post_init__(self):
        if self.N <= 0 or self.r < 1:
            raise ValueError("need N > 0 and r >= 1")
        if self.V.a < 1.0 or self.V.b > 2.0:
            raise ValueError("V must be supported in [1, 2]")


def sr_sum(window: DyadicWindow, f: HolomorphicForm, pi: EisensteinGL3) -> complex:
    """sum_n lambda_pi(n, r) lambda_f(n) V(n/N)."""
    hi = int(math.floor(2 * window.N))
    if f.nmax < hi:
        raise ValueError(f"GL(2) table stops at {f.nmax}, need {hi}")
    lo = max(1, int(math.ceil(window.N)))
    tot = 0j
    for n in range(lo, hi + 1):
        v = float(window.V(np.array([n / window.N]))[0])
        if v:
            tot += gl3_coeff(n, window.r, pi) * f(n) * v
    return tot


def sr_bound(window: DyadicWindow) -> int:
    """sum over N <= n <= 2N of d_3(n) d(n)."""
    tot = 0
    for n in range(max(1, int(math.ceil(window.N))), int(math.floor(2 * window.N)) + 1):
        d3 = sum(len(divisors(n // d)) for d in divisors(n))
        tot += d3 * len(divisors(n))
    return tot
