import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import Polynomial as NP

from secant_dyn.polycore import (Polynomial, PolynomialError, RootSpec, _validate_root,
                                 factored_divided_difference, lambda_m, n1_eval, n_d_eval, parse_polynomial,
                                 q_eval, q_m_eval, taylor_D_eval, taylor_shift)


def p_d(d):
    return Polynomial.from_factored([(-2, 1), (0, 1), (1, d)])


def test_factored_expands_to_known_coefficients():
    p = p_d(2)
    # (x+2) x (x-1)^2 = x^4 - 3x^2 + 2x
    assert p.coeffs == (0.0, 2.0, -3.0, 0.0, 1.0)
    assert [r.multiplicity for r in p.roots] == [1, 1, 2]


def test_lambdas_of_double_root():
    p = p_d(2)
    r = p.roots[2]
    # p(1 + u) = (u + 3)(u + 1) u^2 = 3u^2 + 4u^3 + u^4
    assert r.lambdas == (3.0, 4.0, 1.0)
    assert r.lam(1) == 0.0 and r.lam(7) == 0.0


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_lambdas_match_numpy_composition(d):
    p = p_d(d)
    shifted = NP(p.coeffs)(NP([1.0, 1.0])).coef
    for m in range(d, p.degree + 1):
        assert p.roots[2].lam(m) == pytest.approx(shifted[m], abs=1e-12)
        assert lambda_m(p, 1.0, m) == pytest.approx(shifted[m], abs=1e-12)


def test_taylor_shift_matches_numpy():
    c = [0.5, -1.0, 2.0, 0.25, 1.0]
    got = taylor_shift(c, -0.75)
    ref = NP(c)(NP([-0.75, 1.0])).coef
    np.testing.assert_allclose(got, ref, atol=1e-13)


def test_from_coeffs_finds_roots_and_multiplicities():
    p = Polynomial.from_coeffs([0, 2, -3, 0, 1])
    assert [(round(r.alpha, 12), r.multiplicity) for r in p.roots] == [(-2.0, 1), (0.0, 1), (1.0, 2)]
    q = Polynomial.from_coeffs([-1, 0, 1])
    assert [r.alpha for r in q.roots] == pytest.approx([-1.0, 1.0])
    cube = Polynomial.from_coeffs([0, 0, 0, 1])
    assert [(r.alpha, r.multiplicity) for r in cube.roots] == [(0.0, 3)]


def test_from_coeffs_keeps_complex_part_in_residual():
    p = Polynomial.from_coeffs(list(NP.fromroots([1, 1]) * NP([1, 0, 1])))
    assert [(r.alpha, r.multiplicity) for r in p.roots] == [(1.0, 2)]
    np.testing.assert_allclose(p.residual, [1.0, 0.0, 1.0], atol=1e-10)


@pytest.mark.parametrize("bad", [
    [1.0, 2.0],                # degree 1
    [0.0, 0.0, 2.0],           # not monic
    [0.0, float("nan"), 1.0],  # non-finite
])
def test_rejects_malformed_coefficients(bad):
    with pytest.raises(PolynomialError):
        Polynomial.from_coeffs(bad)


def test_rejects_wrong_multiplicity_claim():
    coeffs = p_d(2).coeffs
    _validate_root(coeffs, RootSpec(1.0, 2, ()))
    with pytest.raises(PolynomialError, match="larger than 1"):
        _validate_root(coeffs, RootSpec(1.0, 1, ()))
    with pytest.raises(PolynomialError, match="not a root of multiplicity 3"):
        _validate_root(coeffs, RootSpec(1.0, 3, ()))
    with pytest.raises(PolynomialError, match="not a root"):
        _validate_root(coeffs, RootSpec(0.5, 1, ()))


def test_rejects_unseparated_roots():
    with pytest.raises(PolynomialError, match="separated"):
        Polynomial.from_factored([(1.0, 1), (1.0 + 1e-9, 1)])


def test_q_is_derivative_on_diagonal_and_symmetric():
    p = p_d(3)
    x = np.linspace(-2, 2, 9)
    dp = NP(p.coeffs).deriv()
    np.testing.assert_allclose(q_eval(p, x, x), dp(x), rtol=1e-12, atol=1e-12)
    y = x[::-1]
    np.testing.assert_array_equal(q_eval(p, x, y), q_eval(p, y, x))


def test_q_m_small_cases():
    assert q_m_eval(1, 3.0, 5.0) == 1.0
    assert q_m_eval(2, 3.0, 5.0) == 8.0
    assert q_m_eval(3, 2.0, 3.0) == 4.0 + 6.0 + 9.0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=8), st.floats(-2, 2), st.floats(-2, 2))
def test_divided_difference_identity_property(lower, x, y):
    p = Polynomial.from_coeffs(list(lower) + [1.0], detect_roots=False)
    px, py = p(x), p(y)
    scale = max(1.0, abs(px), abs(py))
    assert abs(px - py - (x - y) * q_eval(p, x, y)) <= 1e-9 * scale


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_taylor_forms_agree_with_coefficient_forms(d):
    p = p_d(d)
    r = p.roots[2]
    rng = np.random.default_rng(d)
    x, y = rng.uniform(0, 2, (2, 200))
    N, D = n_d_eval(p, x, y)
    np.testing.assert_allclose(taylor_D_eval(p, r, x, y), D, atol=1e-11)
    np.testing.assert_allclose(r.alpha * D + n1_eval(p, r, x, y), N, atol=1e-11)


def test_taylor_forms_need_multiple_root():
    p = p_d(2)
    with pytest.raises(ValueError):
        n1_eval(p, p.roots[0], 0.5, 0.5)


def test_factored_divided_difference_matches_coefficient_form_away_from_roots():
    p = p_d(4)
    for x, y in [(2.5, -1.3), (0.3, 0.7), (-3.0, 1.9)]:
        px, py, q, qa = factored_divided_difference(p, x, y)
        assert px == pytest.approx(p(x), rel=1e-12)
        assert py == pytest.approx(p(y), rel=1e-12)
        assert q == pytest.approx(q_eval(p, x, y), rel=1e-10)
        assert qa >= abs(q)


def test_factored_divided_difference_keeps_accuracy_near_multiple_root():
    # q(1+u, 1+v) ~ 3 q_5(u, v) for d = 5; the coefficient form loses it entirely
    p = p_d(5)
    u, v = 1e-4, -2e-4
    _, _, q, _ = factored_divided_difference(p, 1 + u, 1 + v)
    x, y = 1 + u, 1 + v
    ref = sum(lam * q_m_eval(m, x - 1, y - 1) for m, lam in enumerate(p.roots[2].lambdas, start=5))
    assert q == pytest.approx(ref, rel=1e-9)


def test_parse_polynomial_forms():
    p = parse_polynomial("factored: (-2 1)(0 1)(1 2)")
    assert p.coeffs == p_d(2).coeffs
    q = parse_polynomial("coeffs: -1 0 1")
    assert q.degree == 2
    r = parse_polynomial("factored: (1 2) 1 0 1")
    assert r.residual == (1.0, 0.0, 1.0)
    for bad in ["-1 0 1", "factored: (1 2.5)", "factored: junk (1 2)", "coeffs: 1 x 1", "poly: 1 2"]:
        with pytest.raises(PolynomialError):
            parse_polynomial(bad)


def test_describe_round_trip():
    p = Polynomial.from_factored([(1, 2)], [1, 0, 1])
    assert parse_polynomial(p.describe()).coeffs == p.coeffs
    assert math.isclose(p(1.0), 0.0)
