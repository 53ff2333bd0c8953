from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from subconvex.exponents import (
    Domain,
    ExponentTerm,
    UnboundedError,
    balancing_certificate,
    eisenstein_exponent,
    ledger_json,
    main_theorem_exponent,
    minimax,
    paper_terms,
)


def test_five_terms_with_expected_forms():
    terms = paper_terms()
    assert len(terms) == 5
    forms = {(t.c0, t.c_theta, t.c_eta) for t in terms}
    assert forms == {
        (F(-1, 2), F(0), F(3, 2)),
        (F(0), F(1, 2), F(-1, 2)),
        (F(0), F(2), F(-1, 2)),
        (F(-1, 6), F(0), F(3, 4)),
        (F(0), F(-1, 2), F(0)),
    }
    by_label = {t.label: t for t in terms}
    assert by_label["zero-frequency"](0, 0) == 0
    assert by_label["error-term"].c_eta == F(3, 2)


def test_optimum():
    res = minimax(paper_terms())
    assert (res.theta, res.eta, res.value) == (F(2, 51), F(10, 51), F(-1, 51))
    assert res.eta == 8 * F(2, 51) / 5 + F(2, 15)
    assert main_theorem_exponent() == F(3, 2) - F(1, 51)
    assert eisenstein_exponent() == F(1, 2) - F(1, 153)


def test_balancing_certificate():
    vals = balancing_certificate()
    assert vals["small-modulus"] == vals["generic"] == vals["afe-tail"] == F(-1, 51)
    assert vals["error-term"] < F(-1, 51) and vals["zero-frequency"] < F(-1, 51)


def test_symmetric_pair():
    res = minimax([ExponentTerm(-1, 0, 1, "up"), ExponentTerm(0, 0, -1, "down")])
    assert res.eta == F(1, 2) and res.value == F(-1, 2)


def test_unbounded_direction_is_reported():
    with pytest.raises(UnboundedError):
        minimax([ExponentTerm(0, 1, 0, "only-theta")], Domain(theta_lo=None))


def test_ledger_json_uses_integer_pairs():
    rows = ledger_json()
    assert len(rows) == 5
    assert all(set(r["c0"]) == {"num", "den"} for r in rows)


frac = st.fractions(min_value=-3, max_value=3, max_denominator=12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(frac, frac, frac), min_size=3, max_size=5))
def test_minimax_value_is_the_max_at_the_optimum_and_beats_a_grid(coefs):
    terms = [ExponentTerm(*c, label=f"t{i}") for i, c in enumerate(coefs)]
    try:
        res = minimax(terms)
    except UnboundedError:
        return
    assert res.value == max(t(res.theta, res.eta) for t in terms)
    for i in range(1, 12):
        for j in range(1, 12):
            th, et = F(3, 2) * F(i, 12), F(j, 12)
            assert max(t(th, et) for t in terms) >= res.value
