"""Kloosterman sums and the two character sums that appear after Poisson summation.

Every sum here is a sum of roots of unity.  The enumeration loops only ever
produce integer exponents ``h`` of ``e(h/D)``; they are tallied in a histogram
and the roots are evaluated once, in mpmath at the requested precision.  This
keeps the brute-force loops honest (no analytic shortcuts) while the floating
point error stays at the level of a single pass over ``D`` roots.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import mpmath

__all__ = [
    "KloostermanQuery",
    "CharSumParams",
    "kloosterman",
    "kloosterman_crt",
    "char_sum_direct",
    "char_sum_factored",
    "frak_C",
    "frak_C_envelope",
    "weil_envelope",
    "ramanujan_sum",
    "divisors",
    "mobius",
    "num_divisors",
]


# -- small arithmetic helpers -------------------------------------------------

def divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def num_divisors(n: int) -> int:
    return len(divisors(n))


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius needs n >= 1")
    out = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def units(q: int) -> list[int]:
    # mod 1 the only residue is 0 and we let it count as a unit with inverse 0
    return [x for x in range(q) if math.gcd(x, q) == 1]


def inv(x: int, q: int) -> int:
    return pow(x % q, -1, q)


def _root_sum(hist: Counter, D: int, prec: int) -> mpmath.mpc:
    """Sum of ``count * e(h/D)`` over the histogram."""
    with mpmath.workprec(prec):
        tot = mpmath.mpc(0)
        for h, c in sorted(hist.items()):
            if c:
                tot += c * mpmath.expjpi(mpmath.mpf(2 * h) / D)
        return tot


# -- Kloosterman sums ---------------------------------------------------------

@dataclass(frozen=True)
class KloostermanQuery:
    a: int
    b: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("modulus must be >= 1")


def weil_envelope(a: int, b: int, q: int) -> float:
    return num_divisors(q) * math.sqrt(q) * math.sqrt(math.gcd(math.gcd(a, b), q))


def kloosterman(query: KloostermanQuery | tuple, precision: int = 128) -> mpmath.mpf:
    """S(a,b;q) by enumeration over the units mod q."""
    if not isinstance(query, KloostermanQuery):
        query = KloostermanQuery(*query)
    a, b, q = query.a, query.b, query.q
    hist = Counter((a * x + b * inv(x, q)) % q for x in units(q))
    val = _root_sum(hist, q, precision)
    with mpmath.workprec(precision):
        tol = mpmath.mpf(2) ** (-(precision // 2))
        if abs(val.imag) > tol:
            raise ArithmeticError(f"imaginary residue {val.imag} above {tol}")
        re = val.real
        if abs(re) > weil_envelope(a, b, q) * (1 + tol):
            raise ArithmeticError(f"Weil envelope violated at {(a, b, q)}")
    return re


def kloosterman_crt(a: int, b: int, q1: int, q2: int, precision: int = 128) -> mpmath.mpf:
    """S(a,b;q1 q2) through twisted multiplicativity."""
    if q1 < 1 or q2 < 1 or math.gcd(q1, q2) != 1:
        raise ValueError("moduli must be positive and coprime")
    i2 = inv(q2, q1) if q1 > 1 else 0
    i1 = inv(q1, q2) if q2 > 1 else 0
    s1 = kloosterman(KloostermanQuery(a * i2, b * i2, q1), precision)
    s2 = kloosterman(KloostermanQuery(a * i1, b * i1, q2), precision)
    with mpmath.workprec(precision):
        return s1 * s2


def ramanujan_sum(q: int, n: int) -> int:
    """c_q(n) by direct enumeration; exact since the sum is a rational integer."""
    val = _root_sum(Counter((n * a) % q for a in units(q)), q, 96)
    return int(mpmath.nint(val.real))


# -- the single-modulus character sum ----------------------------------------

def _check_single(q: int, r: int, n1: int, sign: int) -> int:
    if q < 1 or r < 1 or n1 < 1:
        raise ValueError("q, r, n1 must be positive")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if (q * r) % n1:
        raise ValueError("n1 must divide q*r")
    return q * r // n1


def char_sum_direct(q: int, r: int, n1: int, m: int, n2: int, sign: int = 1,
                    precision: int = 128) -> mpmath.mpc:
    """Sum over units a mod q of S(r*abar, sign*n2; qr/n1) e(abar*m/q), literally."""
    c = _check_single(q, r, n1, sign)
    D = q * c
    hist: Counter = Counter()
    for a in units(q):
        ab = inv(a, q)
        outer = ab * m * c  # e(abar m / q) = e(abar m c / D)
        for x in units(c):
            inner = (r * ab * x + sign * n2 * inv(x, c)) * q
            hist[(outer + inner) % D] += 1
    return _root_sum(hist, D, precision)


def char_sum_factored(q: int, r: int, n1: int, m: int, n2: int, sign: int = 1,
                      precision: int = 128) -> mpmath.mpc:
    """Same sum after opening the a-sum as a Ramanujan sum and using Moebius."""
    c = _check_single(q, r, n1, sign)
    hist: Counter = Counter()
    for d in divisors(q):
        w = d * mobius(q // d)
        if w == 0:
            continue
        for al in units(c):
            if (n1 * al + m) % d == 0:
                hist[(sign * inv(al, c) * n2) % c] += w
    return _root_sum(hist, c, precision)


# -- the double-Moebius solution count ---------------------------------------

@dataclass(frozen=True)
class CharSumParams:
    q1: int
    q2: int
    q2p: int
    r: int
    n1: int
    m: int
    mp: int
    n2: int
    sign: int = 1

    def __post_init__(self):
        for name in ("q1", "q2", "q2p", "r", "n1", "m", "mp"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        nr = self.n1 * self.r
        if self.q1 % (self.n1 // math.gcd(self.n1, self.r)):
            raise ValueError("n1/(n1,r) must divide q1")
        rad = self.q1
        for p in range(2, self.q1 + 1):
            if rad % p == 0:
                if nr % p:
                    raise ValueError(f"prime {p} of q1 does not divide n1*r")
                while rad % p == 0:
                    rad //= p
        if math.gcd(self.q2, nr) != 1 or math.gcd(self.q2p, nr) != 1:
            raise ValueError("q2 and q2p must be coprime to n1*r")
        if (self.q1 * self.q2 * self.r) % self.n1:
            raise ValueError("n1 must divide q1*q2*r")

    @property
    def q(self) -> int:
        return self.q1 * self.q2

    @property
    def qp(self) -> int:
        return self.q1 * self.q2p


def frak_C(p: CharSumParams) -> int:
    """Signed count of unit pairs (alpha, alpha') weighted by d d' mu(q/d) mu(q'/d').

    The pair must satisfy n1*alpha = -m mod d, n1*alpha' = -m' mod d' and
    sign*(abar q2' - abar' q2) = -n2 modulo q1 q2 q2' r / n1.
    """
    c = p.q * p.r // p.n1
    cp = p.qp * p.r // p.n1
    big = p.q1 * p.q2 * p.q2p * p.r // p.n1
    s = p.sign
    total = 0
    for d in divisors(p.q):
        mu = mobius(p.q // d)
        if mu == 0:
            continue
        alphas = [a for a in units(c) if (p.n1 * a + p.m) % d == 0]
        for dp in divisors(p.qp):
            mup = mobius(p.qp // dp)
            if mup == 0:
                continue
            # bucket alpha' by the residue it contributes
            right = Counter((s * inv(b, cp) * p.q2) % big
                            for b in units(cp) if (p.n1 * b + p.mp) % dp == 0)
            cnt = 0
            for a in alphas:
                need = (s * inv(a, c) * p.q2p + p.n2) % big
                cnt += right.get(need, 0)
            total += d * dp * mu * mup * cnt
    return total


def frak_C_envelope(p: CharSumParams) -> int:
    """q1^2 r (m,n1)/n1 times the sum of d2 d2' over the surviving divisor pairs."""
    s = p.sign
    head = p.q1 ** 2 * p.r * math.gcd(p.m, p.n1)
    inner = 0
    for d2 in divisors(p.q2):
        if (p.n1 * p.q2p - s * p.m * p.n2) % d2:
            continue
        for d2p in divisors(p.q2p):
            if (p.n1 * p.q2 + s * p.mp * p.n2) % d2p:
                continue
            inner += d2 * d2p
    return head * inner // p.n1 if (head * inner) % p.n1 == 0 else head * inner / p.n1
