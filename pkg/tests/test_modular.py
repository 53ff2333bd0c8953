import math
import random

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from subconvex.acceptance import random_char_params
from subconvex.modular import (
    CharSumParams,
    KloostermanQuery,
    char_sum_direct,
    char_sum_factored,
    frak_C,
    frak_C_envelope,
    inv,
    kloosterman,
    kloosterman_crt,
    mobius,
    ramanujan_sum,
    units,
    weil_envelope,
)


def brute_kloosterman(a, b, q):
    # complex floats, independent of the histogram path
    return sum(complex(math.cos(2 * math.pi * (a * x + b * pow(x, -1, q)) / q),
                       math.sin(2 * math.pi * (a * x + b * pow(x, -1, q)) / q))
               for x in range(1, q + 1) if math.gcd(x, q) == 1)


@pytest.mark.parametrize("a,b,q,expected", [
    (1, 1, 1, 1.0),
    (1, 1, 3, -1.0),
    (2, 3, 5, "(3 - sqrt(5))/2"),
])
def test_kloosterman_known_values(a, b, q, expected):
    with mpmath.workprec(128):
        ref = mpmath.mpf(expected) if not isinstance(expected, str) else (3 - mpmath.sqrt(5)) / 2
        assert abs(kloosterman(KloostermanQuery(a, b, q)) - ref) < mpmath.mpf(10) ** -30


def test_kloosterman_rejects_bad_modulus():
    with pytest.raises(ValueError):
        KloostermanQuery(1, 1, 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(1, 300))
def test_kloosterman_matches_float_enumeration(a, b, q):
    val = kloosterman(KloostermanQuery(a, b, q))
    ref = brute_kloosterman(a, b, q)
    assert abs(float(val) - ref.real) < 1e-9
    assert abs(ref.imag) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(1, 2000))
def test_weil_envelope_and_tiny_imaginary_part(a, b, q):
    # kloosterman() itself raises if either check fails
    val = kloosterman(KloostermanQuery(a, b, q), precision=96)
    assert abs(val) <= weil_envelope(a, b, q) * (1 + 1e-20)


def test_kloosterman_crt_examples():
    assert float(kloosterman_crt(1, 2, 3, 5)) == pytest.approx(float(kloosterman((1, 2, 15))), abs=1e-25)
    for a, b, q in ((3, 4, 7), (5, 11, 12)):
        assert float(kloosterman_crt(a, b, q, 1)) == pytest.approx(float(kloosterman((a, b, q))), abs=1e-25)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 100), st.integers(1, 100), st.integers(-40, 40), st.integers(-40, 40))
def test_twisted_multiplicativity(q1, q2, a, b):
    if math.gcd(q1, q2) != 1:
        q2 += 1
        if math.gcd(q1, q2) != 1:
            return
    direct = kloosterman((a, b, q1 * q2))
    assert abs(float(kloosterman_crt(a, b, q1, q2) - direct)) <= 1e-10 * max(1.0, abs(float(direct)))


def test_crt_rejects_common_factor():
    with pytest.raises(ValueError):
        kloosterman_crt(1, 1, 4, 6)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 60), st.integers(-100, 100))
def test_ramanujan_sum_closed_form(q, n):
    # c_q(n) = sum_{d | (q,n)} d mu(q/d)
    g = math.gcd(q, n)
    closed = sum(d * mobius(q // d) for d in range(1, g + 1) if g % d == 0 and q % d == 0)
    assert ramanujan_sum(q, n) == closed


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 500).flatmap(lambda q: st.tuples(st.just(q), st.sampled_from(units(q)))))
def test_inverse(qx):
    q, x = qx
    assert (x * inv(x, q)) % q == 1 % q


def test_char_sum_q1_reduces_to_a_ramanujan_sum():
    for r, n1, n2, s in ((6, 2, 5, 1), (4, 1, 3, -1), (9, 3, 6, 1)):
        direct = char_sum_direct(1, r, n1, 7, n2, s)
        assert abs(direct - ramanujan_sum(r // n1, n2)) < 1e-30
        assert abs(char_sum_factored(1, r, n1, 7, n2, s) - direct) < 1e-30


@pytest.mark.parametrize("q,r,n1,m,n2,s", [(2, 1, 1, 1, 1, 1), (6, 2, 2, 5, 3, 1), (4, 1, 1, 3, 2, 1)])
def test_char_sum_examples(q, r, n1, m, n2, s):
    assert abs(char_sum_direct(q, r, n1, m, n2, s) - char_sum_factored(q, r, n1, m, n2, s)) < 1e-10


def test_char_sum_direct_by_hand():
    # a = x = 1 only: e((1 + 1)/2) e(1/2) = -1
    assert abs(char_sum_direct(2, 1, 1, 1, 1, 1) - (-1)) < 1e-30


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 50), st.integers(1, 4), st.integers(-60, 60), st.integers(-60, 60),
       st.sampled_from((1, -1)), st.data())
def test_char_sum_factored_equals_direct(q, r, m, n2, s, data):
    qr = q * r
    n1 = data.draw(st.sampled_from([d for d in range(1, qr + 1) if qr % d == 0]))
    assert abs(char_sum_direct(q, r, n1, m, n2, s) - char_sum_factored(q, r, n1, m, n2, s)) <= 1e-10


def test_char_sum_rejects_bad_divisor():
    with pytest.raises(ValueError):
        char_sum_direct(5, 1, 2, 1, 1)


def test_params_invariants():
    with pytest.raises(ValueError):
        CharSumParams(3, 1, 1, 1, 1, 1, 1, 0)  # prime 3 of q1 does not divide n1 r
    with pytest.raises(ValueError):
        CharSumParams(1, 2, 1, 2, 1, 1, 1, 0)  # q2 shares a factor with n1 r
    with pytest.raises(ValueError):
        CharSumParams(1, 1, 1, 1, 1, 0, 1, 0)  # m must be positive


def test_frak_C_examples():
    assert frak_C(CharSumParams(1, 1, 1, 1, 1, 1, 1, 0)) == 1
    assert frak_C(CharSumParams(1, 2, 3, 1, 1, 1, 1, 0)) == 0
    p = CharSumParams(1, 3, 3, 1, 1, 1, 2, 3)
    assert abs(frak_C(p)) <= frak_C_envelope(p)


def test_frak_C_by_enumeration():
    # q = q' = 3, r = n1 = 1: the moduli are all 3 and the Moebius sums are short
    p = CharSumParams(1, 3, 3, 1, 1, 1, 2, 3)
    total = 0
    for d in (1, 3):
        for dp in (1, 3):
            w = d * dp * mobius(3 // d) * mobius(3 // dp)
            for a in (1, 2):
                for b in (1, 2):
                    if (a + 1) % d or (b + 2) % dp:
                        continue
                    if (pow(a, -1, 3) * 3 - pow(b, -1, 3) * 3 + 3) % 9 == 0:
                        total += w
    assert frak_C(p) == total


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_zero_frequency_collapse(seed):
    p = random_char_params(random.Random(seed), collapse=True)
    assert frak_C(p) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_frak_C_envelope(seed):
    p = random_char_params(random.Random(seed))
    assert abs(frak_C(p)) <= frak_C_envelope(p)
