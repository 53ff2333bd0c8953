import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subconvex.oscillatory import (
    OscillatorySpec,
    PhaseGeometry,
    ScaleParams,
    SmoothBump,
    StationaryPointError,
    CutoffSet,
    cutoffs,
    derivative_bound,
    ibp_decay_check,
    keps,
    quad_osc,
    separation_cutoff_check,
    solve_tau0,
    stat_phase_leading,
    tau0_residual,
    w_integral,
    y_integral,
    y_integral_expansion,
    z_integral,
)

BUMP = SmoothBump(1.0, 2.0)


def quadratic(Y, c=1.5, g=BUMP, a=1.0, b=2.0):
    return OscillatorySpec(g, lambda x: Y * (x - c) ** 2, a, b, dphase=[
        lambda x: 2 * Y * (x - c), lambda x: 2 * Y + 0 * x, lambda x: 0 * x, lambda x: 0 * x])


def test_bump_shape_and_mass():
    assert BUMP(np.array([0.5, 1.0, 1.5, 2.0, 3.0])).tolist() == [0, 0, 1, 0, 0]
    with mpmath.workdps(30):
        ref = mpmath.quad(BUMP.mp, [1, 1.5, 2])
    assert BUMP.mass() == pytest.approx(float(ref), rel=1e-13)
    plateau = SmoothBump(0.5, 2.5, plateau=(1.0, 2.0))
    assert np.all(plateau(np.linspace(1, 2, 11)) == 1.0)
    with pytest.raises(ValueError):
        SmoothBump(1.0, 2.0, plateau=(0.5, 1.5))


def test_bump_derivative_bounds_are_finite():
    b = BUMP.derivative_bounds(3, samples=21)
    assert len(b) == 4 and b[0] == pytest.approx(1.0) and all(math.isfinite(v) for v in b)


def test_gaussian_closed_form():
    spec = OscillatorySpec(lambda x: np.exp(-x * x), lambda x: x, -10.0, 10.0)
    assert abs(quad_osc(spec) - math.sqrt(math.pi) * math.exp(-0.25)) < 1e-13


def test_derivative_bound_formulas():
    B = 40.0
    lin = OscillatorySpec(BUMP, lambda x: B * x, 1.0, 2.0, dphase=[lambda x: B + 0 * x])
    assert derivative_bound(lin, 1) == pytest.approx(2.0 / B, rel=1e-6)
    sq = OscillatorySpec(BUMP, lambda x: x * x, 1.0, 2.0, dphase=[lambda x: 2 * x, lambda x: 2 + 0 * x])
    assert derivative_bound(sq, 2) == pytest.approx(2.0 / math.sqrt(2), rel=1e-6)
    with pytest.raises(ValueError):
        derivative_bound(quadratic(10.0), 1)  # f' changes sign


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 200.0), st.floats(-3.0, 3.0), st.floats(0.1, 5.0), st.integers(1, 2))
def test_quadrature_below_derivative_bound(B, c, a2, r):
    # f = B x + a2 (x - 1)^2 + c has f' >= B and f'' = 2 a2 on [1, 2]
    spec = OscillatorySpec(BUMP, lambda x: B * x + a2 * (x - 1) ** 2 + c, 1.0, 2.0,
                           dphase=[lambda x: B + 2 * a2 * (x - 1), lambda x: 2 * a2 + 0 * x])
    assert abs(quad_osc(spec)) <= derivative_bound(spec, r) * (1 + 1e-9)


def _linear_family(B):
    return OscillatorySpec(BUMP, lambda x: B * x, 1.0, 2.0, dphase=[lambda x: B + 0 * x])


def test_ibp_decay():
    rep = ibp_decay_check(_linear_family, 1e3, 2)
    assert rep["passed"]
    assert rep["magnitude"] <= 1e-4
    assert rep["doubled_ratio"] <= 0.5
    zero = lambda B: OscillatorySpec(lambda x: 0 * x, lambda x: B * x, 1.0, 2.0, dphase=[lambda x: B + 0 * x])
    assert ibp_decay_check(zero, 1e3, 2)["magnitude"] == 0


def test_ibp_precondition_rejected():
    slow = lambda B: OscillatorySpec(BUMP, lambda x: x, 1.0, 2.0, dphase=[lambda x: 1 + 0 * x])
    with pytest.raises(ValueError):
        ibp_decay_check(slow, 10.0, 2)


def test_fresnel_leading_term():
    h = SmoothBump(-1.0, 1.0)
    spec = quadratic(1.0, c=0.0, g=h, a=-1.0, b=1.0)
    lead, _ = stat_phase_leading(spec)
    assert abs(lead - math.sqrt(math.pi) * cmath.exp(1j * math.pi / 4) * float(h(np.array([0.0]))[0])) < 1e-13


@settings(max_examples=20, deadline=None)
@given(st.floats(-5.0, 5.0))
def test_stationary_phase_translation_invariance(c):
    base = stat_phase_leading(quadratic(300.0))[0]
    g = SmoothBump(1.0 + c, 2.0 + c)
    moved = stat_phase_leading(quadratic(300.0, c=1.5 + c, g=g, a=1.0 + c, b=2.0 + c))[0]
    assert abs(abs(moved) - abs(base)) < 1e-12


def test_stationary_phase_large_Y():
    spec = quadratic(1e4)
    lead, est = stat_phase_leading(spec)
    ref = quad_osc(spec)
    assert abs(lead - ref) / abs(ref) <= 1e-2
    assert abs(lead - ref) <= 2 * est


def test_stationary_phase_gain():
    errs = []
    for Y in (1e2, 4e2, 1.6e3):
        spec = quadratic(Y)
        errs.append(abs(stat_phase_leading(spec)[0] - quad_osc(spec)))
    assert errs[0] / errs[1] >= 2 and errs[1] / errs[2] >= 2


def test_stationary_point_errors():
    with pytest.raises(StationaryPointError):
        stat_phase_leading(quadratic(10.0, c=5.0))
    two = OscillatorySpec(BUMP, lambda x: np.cos(40 * x), 1.0, 2.0,
                          dphase=[lambda x: -40 * np.sin(40 * x), lambda x: -1600 * np.cos(40 * x)])
    with pytest.raises(StationaryPointError):
        stat_phase_leading(two)


GRID = [(A, B, k) for k in (12, 51, 101, 201, 301) for B in (10.0, 50.0, 200.0, 1000.0)
        for A in (0.01, 0.1, 0.3, 0.6, 1.0)]


def test_tau0_residual_grid():
    assert len(GRID) == 100
    for fA, B, k in GRID:
        A = fA * B
        tau = solve_tau0(A, B, k)
        assert 0 < tau < 1
        scale = (k - 1) / (2 * math.pi) + 32 * math.pi ** 2 * A ** 3 / (27 * B ** 2)
        assert abs(tau0_residual(tau, A, B, k)) <= 1e-12 * max(1.0, scale / (1 - float(tau)) ** 1.5)


def test_tau0_monotone_as_A_shrinks():
    taus = [float(solve_tau0(A, 100.0, 51)) for A in (50.0, 10.0, 1.0, 0.1, 0.01)]
    assert all(b < a for a, b in zip(taus, taus[1:]))
    assert taus[-1] < 1e-3


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 0.1), st.floats(10.0, 1000.0), st.integers(12, 301))
def test_tau0_seed_gap(h, B, k):
    A = h * B ** (2 / 3) * (k - 1) ** (1 / 3)
    if A > B:
        return
    tau, seed = solve_tau0(A, B, k, return_seed=True)
    assert abs(seed - float(tau)) <= 1e-2 * float(tau)


def test_tau0_rejects_large_A():
    with pytest.raises(ValueError):
        solve_tau0(2.0, 1.0, 51)


def test_keps_is_log_squared():
    assert keps(51) == pytest.approx(math.log(51) ** 2)


def test_z_integral_zero_and_conjugate():
    sc = ScaleParams(51, 10 / 51, 51.0 ** 3)
    zero = SmoothBump(1.0, 2.0, scale=0.0)
    assert z_integral(sc, 10.0, 1, 7, 0.3, 2.0, V=zero) == 0
    plus = z_integral(sc, 10.0, 1, 7, 0.0, 0.0, 1)
    minus = z_integral(sc, 10.0, 1, 7, 0.0, 0.0, -1)
    assert abs(plus - minus.conjugate()) < 1e-14


def test_y_integral_examples():
    k = 51
    for B in (50.0, 100.0):
        assert abs(y_integral(PhaseGeometry.from_AB(B / 4, B), k)) <= 10 / B
    B = 50.0
    near = abs(y_integral(PhaseGeometry.from_AB(B / 4, B), k))
    far = abs(y_integral(PhaseGeometry.from_AB(4 * k ** 0.1 * B, B), k))
    assert far <= 1e-3 * near
    # shifting V off the support of U leaves nothing to integrate
    assert y_integral(PhaseGeometry.from_AB(10.0, 50.0), k, u=5.0) == 0


def test_y_expansion_phase_and_support():
    k = 51
    g = PhaseGeometry.from_AB(0.15 * 50, 50.0)
    val = y_integral_expansion(g, k)
    tau = g.tau0(k)
    assert val != 0
    assert abs(cmath.phase(val) - cmath.phase(cmath.exp(2j * math.pi * g.f(tau, k)))) < 1e-10
    # tiny A pushes the critical point y0 below the support of U
    assert y_integral_expansion(PhaseGeometry.from_AB(1e-3, 50.0), k) == 0
    with pytest.raises(ValueError):
        y_integral_expansion(PhaseGeometry.from_AB(60.0, 50.0), k)
    with pytest.raises(ValueError):
        y_integral_expansion(g, k, u=0.1)


def test_y_expansion_improves_with_k():
    disc = []
    for k in (51, 101):
        g = PhaseGeometry.from_AB(0.15 * (k - 1), k - 1.0)
        I = y_integral(g, k)
        disc.append(abs(I - y_integral_expansion(g, k)) / abs(I))
    assert disc[1] < disc[0]


def test_w_integral_zero_weight():
    g = PhaseGeometry.from_AB(5.0, 50.0, q=10.0)
    assert w_integral(g, g, 51, 3, 1, 10, 10, 1, 1, W=SmoothBump(1.0, 2.0, scale=0.0)) == 0


def test_cutoffs_at_x_zero():
    sc = ScaleParams(51, 10 / 51, 51.0 ** 3)
    q = 20.0
    co = cutoffs(sc, q, 0.0)
    assert co.N0 == pytest.approx(sc.keps * (q * sc.T) ** 3 / sc.N)
    assert co.M0 == pytest.approx(sc.keps * 50 ** 2 * q * q / sc.N)
    assert co.M <= co.M0


def test_generic_dual_length():
    for k in (51, 101, 201):
        sc = ScaleParams(k, 10 / 51, float(k) ** 3)
        co = cutoffs(sc, sc.Q, 1.0)
        ratio = co.N0 / (sc.T ** 1.5 * sc.N ** 0.5)
        assert 1 <= ratio <= 8 * sc.keps ** 2.5 * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(12, 301), st.floats(0.05, 0.95), st.floats(0.01, 1.0), st.floats(0.5, 50.0),
       st.floats(-2.0, 2.0))
def test_M_never_exceeds_M0(k, eta, nfrac, q, x):
    sc = ScaleParams(k, eta, nfrac * k ** 3)
    co = cutoffs(sc, q, x)
    assert 0 < co.M <= co.M0 and co.N0 > 0 and co.N2 > 0


def test_cutoff_set_validation():
    with pytest.raises(ValueError):
        CutoffSet(1.0, 2.0, 1.0, 1.0)


def test_separation_cutoff():
    rep = separation_cutoff_check(ScaleParams(51, 10 / 51, 51.0 ** 3), 10.0)
    assert rep["passed"]
    assert rep["x_at_zero"] == pytest.approx(rep["W_mass"], rel=1e-12)
