import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subconvex.forms import delta_coeffs
from subconvex.oscillatory import OscillatorySpec, SmoothBump, quad_osc
from subconvex.voronoi import (
    GammaFactorSpec,
    GaussianWeight,
    G_pm_asymptotic_check,
    G_pm_contour,
    _hankel_transform,
    _mellin_on_line,
    gamma_factor,
    gamma_pm,
    gl2_voronoi_check,
    gl3_error_regime_bound,
    mellin_transform,
)

BUMP = SmoothBump(1.0, 2.0)


@pytest.fixture(scope="module")
def delta():
    return delta_coeffs(3000)


class _Zero:
    support = (100.0, 200.0)

    def __call__(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


def test_gl2_zero_weight(delta):
    assert gl2_voronoi_check(delta, 1, 1, _Zero()) == (0, 0, 0.0)


@pytest.mark.parametrize("a,q,center", [(1, 1, 1000.0), (2, 5, 1000.0), (3, 7, 600.0)])
def test_gl2_identity(delta, a, q, center):
    lhs, rhs, rel = gl2_voronoi_check(delta, a, q, GaussianWeight.balanced(center, q))
    assert rel <= 1e-6
    assert abs(lhs) > 1e-3


def test_gl2_input_checks(delta):
    with pytest.raises(ValueError):
        gl2_voronoi_check(delta, 5, 10, GaussianWeight.balanced(1000.0, 10))
    with pytest.raises(ValueError):
        gl2_voronoi_check(delta_coeffs(500), 1, 1, GaussianWeight.balanced(1000.0, 1))


def test_hankel_transform_against_mpmath():
    g = GaussianWeight.balanced(400.0, 3)
    lo, hi = g.support
    y = 5.0
    with mpmath.workdps(25):
        f = lambda x: mpmath.exp(-((x - 400) / g.width) ** 2 / 2) * mpmath.besselj(11, 4 * mpmath.pi * mpmath.sqrt(x * y) / 3)
        ref = mpmath.quad(f, np.linspace(lo, hi, 41).tolist())
    assert _hankel_transform(g, 12, 3, y) == pytest.approx(float(ref), abs=1e-12 * float(abs(ref)) + 1e-14)


def test_gamma_at_one():
    assert gamma_factor(GammaFactorSpec()) == pytest.approx(-1 / (16 * math.pi ** 6), rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.9, 2.0), st.floats(-50.0, 50.0), st.sampled_from([1, -1]))
def test_gamma_pm_recombination(sig, t, sign):
    s = complex(sig, t)
    alpha = (0.2, -0.05, -0.15)
    g0 = gamma_factor(GammaFactorSpec(alpha, 0, s))
    g1 = gamma_factor(GammaFactorSpec(alpha, 1, s))
    got = complex(gamma_pm(alpha, np.array([s]), sign)[0])
    assert abs(got - (g0 - sign * g1)) <= 1e-10 * max(abs(g0), abs(g1))


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.9, 2.0), st.floats(-50.0, 50.0), st.sampled_from([0, 1]))
def test_gamma_schwarz_reflection(sig, t, ell):
    alpha = (0.2, -0.05, -0.15)
    a = gamma_factor(GammaFactorSpec(alpha, ell, complex(sig, t)))
    b = gamma_factor(GammaFactorSpec(alpha, ell, complex(sig, -t)))
    assert abs(a.conjugate() - b) <= 1e-12 * abs(a)


def test_gamma_spec_checks():
    with pytest.raises(ValueError):
        GammaFactorSpec(ell=2)
    with pytest.raises(ValueError):
        GammaFactorSpec(sigma=-1.0)
    with pytest.raises(ValueError):
        gamma_factor(GammaFactorSpec(s=-1 + 1e-10))


def test_mellin_backends_agree():
    t = np.array([0.0, 3.0, 40.0, 300.0])
    sigma = -0.5
    fast = _mellin_on_line(BUMP, sigma, t)
    slow = mellin_transform(BUMP, -sigma - 1j * t)
    assert np.max(np.abs(fast - slow)) < 1e-13
    for tt, v in zip(t, fast):
        ref = quad_osc(OscillatorySpec(lambda x: BUMP(x) * x ** (-sigma - 1), lambda x: -tt * np.log(x), 1.0, 2.0))
        assert abs(ref - v) < 1e-13


def test_zero_test_function():
    zero = SmoothBump(1.0, 2.0, scale=0.0)
    assert G_pm_contour(100.0, zero, GammaFactorSpec()) == 0


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("x", [10.0, 1000.0])
def test_contour_shift(x, sign):
    a = G_pm_contour(x, BUMP, GammaFactorSpec(sigma=-0.75), sign=sign)
    b = G_pm_contour(x, BUMP, GammaFactorSpec(sigma=-0.5), sign=sign)
    assert abs(a - b) <= 1e-10 * max(abs(a), 1.0)


def test_height_refinement():
    spec = GammaFactorSpec(sigma=-0.5)
    v, H = G_pm_contour(1000.0, BUMP, spec, return_height=True)
    w = G_pm_contour(1000.0, BUMP, spec, H=2 * H)
    assert abs(v - w) <= 1e-10 * max(abs(v), 1.0)


def test_complex_alpha_contour_shift():
    alpha = (0.1j, -0.1j, 0)
    a = G_pm_contour(100.0, BUMP, GammaFactorSpec(alpha, sigma=-0.75))
    b = G_pm_contour(100.0, BUMP, GammaFactorSpec(alpha, sigma=-0.5))
    assert abs(a - b) <= 1e-10 * max(abs(a), 1.0)


def test_asymptotic_fit():
    rep = G_pm_asymptotic_check([500, 1000, 2000, 4000], BUMP, GammaFactorSpec(), sign=1)
    assert max(rep["residual_ratios"]) <= 0.7
    assert rep["leading_drift"] <= 0.01
    c1, d1, c2, d2 = rep["coef"]
    # g is real, so the e(-3(xy)^(1/3)) constants are the conjugates
    assert abs(d1 - c1.conjugate()) <= 1e-3 * abs(c1)
    assert abs(c1 - (1 + 1j) / (2 * math.sqrt(3))) <= 1e-3


def test_error_regime_bound():
    assert gl3_error_regime_bound(4, 4, 1, 16) == 8
    assert gl3_error_regime_bound(8, 4, 1, 16) == 32
