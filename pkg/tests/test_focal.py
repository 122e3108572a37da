import math

import numpy as np
import pytest

from secant_dyn.focal import (CurveSpec, Divergent, FocalKind, LandingMap, Parity, Schedule, SingularCurvature,
                              curvature_to_landing, deriv_N_at_pair, deriv_q_at_pair, focal_points,
                              focal_residuals, g_d, landing_to_curvature, mixed_focal_landing,
                              numeric_curve_limit, pair_derivatives, richardson)
from secant_dyn.polycore import Polynomial
from secant_dyn.verify import bivariate_qn, fd_partial


def p_d(d):
    return Polynomial.from_factored([(-2, 1), (0, 1), (1, d)])


def kinds(p):
    return {tuple(fp.location): fp.kind for fp in focal_points(p)}


def test_simple_roots_give_simple_focal_points():
    k = kinds(Polynomial.from_coeffs([-1, 0, 1]))
    assert k == {(-1.0, 1.0): FocalKind.SIMPLE, (1.0, -1.0): FocalKind.SIMPLE}


def test_double_root_focal_points():
    k = kinds(p_d(2))
    assert k[(1.0, 1.0)] is FocalKind.NON_SIMPLE
    assert k[(-2.0, 0.0)] is FocalKind.SIMPLE and k[(0.0, -2.0)] is FocalKind.SIMPLE
    for pt in [(1.0, 0.0), (0.0, 1.0), (1.0, -2.0), (-2.0, 1.0)]:
        assert k[pt] is FocalKind.NON_SIMPLE
    assert len(k) == 7


def test_focal_points_are_common_zeros_with_prefocal_line():
    p = p_d(3)
    for fp in focal_points(p):
        n, d = focal_residuals(p, fp)
        assert abs(n) < 1e-12 and abs(d) < 1e-12
        assert fp.prefocal_x == fp.location.y


def test_triple_root_only():
    fps = focal_points(Polynomial.from_coeffs([0, 0, 0, 1]))
    assert [(tuple(f.location), f.kind) for f in fps] == [((0.0, 0.0), FocalKind.NON_SIMPLE)]


def test_g_d():
    assert g_d(1.0, 4) == 4.0
    assert g_d(-1.0, 4) == 0.0 and g_d(-1.0, 3) == 1.0
    assert g_d(2.0, 3) == 7.0
    assert g_d(1 + 1e-9, 3) == pytest.approx(3.0)


@pytest.mark.parametrize("d,y0", [(2, 5 / 11), (4, 4 / 7)])
def test_landing_anchor_at_zero_curvature(d, y0):
    lm = LandingMap(p_d(d).roots[2])
    assert lm.parity is Parity.EVEN
    assert curvature_to_landing(lm, 0.0) == pytest.approx(y0, abs=1e-15)


def test_landing_round_trip_and_monotone():
    lm = LandingMap(p_d(2).roots[2])
    ks = [-3.0, -0.5, 0.0, 1.0, 4.0]
    ys = [curvature_to_landing(lm, k) for k in ks]
    for k, y in zip(ks, ys):
        assert landing_to_curvature(lm, y) == pytest.approx(k, abs=1e-12)


def test_landing_singular_curvature():
    lm = LandingMap(p_d(2).roots[2])
    # C(kappa) = 6 (kappa + 1)/4 + 4 vanishes at kappa = -11/3
    with pytest.raises(SingularCurvature):
        curvature_to_landing(lm, -11 / 3)


def test_landing_map_rejects_odd_and_simple():
    with pytest.raises(ValueError):
        curvature_to_landing(LandingMap(p_d(3).roots[2]), 0.0)
    with pytest.raises(ValueError):
        LandingMap(p_d(3).roots[0])


def test_mixed_landing_anchors():
    p = Polynomial.from_factored([(0, 1), (1, 2)])
    assert mixed_focal_landing(p, 1.0, 0.0, 1.0) == (0.0, -1.0)
    assert mixed_focal_landing(p, 1.0, 0.0, 0.5).y == pytest.approx(-1 / 3)
    with pytest.raises(SingularCurvature):
        mixed_focal_landing(p, 1.0, 0.0, 2.0)
    with pytest.raises(ValueError):
        mixed_focal_landing(p_d(3), 1.0, 0.0, 1.0)


def test_richardson_is_exact_on_low_degree_polynomials():
    ts = [0.1 * 0.5 ** j for j in range(8)]
    vals = [3.0 - 2 * t + 5 * t ** 2 - t ** 3 + 0.5 * t ** 4 for t in ts]
    v, err = richardson(vals, 0.5, 4)
    assert v == pytest.approx(3.0, abs=1e-12)
    assert err < 1e-10


def test_numeric_limit_of_smooth_map():
    # away from focal points the limit is just the image of the base point
    p = Polynomial.from_coeffs([-1, 0, 1])
    c = CurveSpec(0.7, 0.0, 0.0, 0.0, (2.0, 3.0))
    lim = numeric_curve_limit(p, c)
    assert lim.point.y == pytest.approx(3.0 - 8.0 / 5.0, abs=1e-10)


def test_numeric_limit_divergent_at_singular_curvature():
    p = Polynomial.from_factored([(0, 1), (1, 2)])
    with pytest.raises(Divergent):
        numeric_curve_limit(p, CurveSpec(0.0, 2.0, 0.0, 0.0, (1.0, 0.0)))


def test_schedule_validation():
    with pytest.raises(ValueError):
        Schedule(ratio=1.5)
    with pytest.raises(ValueError):
        Schedule(n_steps=1)


TWO_ROOT = [
    Polynomial.from_factored([(-1, 1), (1, 1)]),
    p_d(2),
    Polynomial.from_factored([(0, 1), (2, 3)]),
    Polynomial.from_factored([(-1, 2), (1.5, 1)], [1, 0, 1]),
    Polynomial.from_factored([(-1.5, 1), (0.5, 1), (3, 1)]),
]


@pytest.mark.parametrize("p", TWO_ROOT, ids=lambda p: p.describe())
def test_pair_recursions_against_finite_differences(p):
    from numpy.polynomial import polynomial as P

    qc, nc = bivariate_qn(p.coeffs)
    a = p.root_values
    for a1, a2 in [(a[0], a[-1]), (a[-1], a[0])]:
        tbl = pair_derivatives(p, a1, a2)
        for m in range(5):
            for l in range(m + 1):
                rq = fd_partial(lambda X, Y: P.polyval2d(X, Y, qc), a1, a2, m - l, l)
                rn = fd_partial(lambda X, Y: P.polyval2d(X, Y, nc), a1, a2, m - l, l)
                assert deriv_q_at_pair(p, a1, a2, m, l, tbl) == pytest.approx(rq, rel=1e-6, abs=1e-6)
                assert deriv_N_at_pair(p, a1, a2, m, l, tbl) == pytest.approx(rn, rel=1e-6, abs=1e-6)


def test_recursion_y_sign_matters():
    # with a plus sign on the lower-order term the pure y-derivative of x^2 - 1 would be wrong
    p = TWO_ROOT[0]
    tbl = pair_derivatives(p, 1.0, -1.0)
    right = tbl.q(1, 1)
    wrong = (1 * tbl.q(0, 0) + tbl.dp(1, -1.0)) / 2.0
    assert right == pytest.approx(1.0)  # q = x + y
    assert not math.isclose(wrong, 1.0)


def test_pair_recursions_reject_bad_input():
    p = p_d(2)
    with pytest.raises(ValueError):
        pair_derivatives(p, 1.0, 1.0)
    with pytest.raises(ValueError):
        pair_derivatives(p, 1.0, 0.5)
    with pytest.raises(ValueError):
        deriv_q_at_pair(p, 1.0, 0.0, 2, 3)


def test_stencil_is_exact_on_monomials():
    from secant_dyn.verify import stencil_weights

    offs = np.arange(-4, 5, dtype=float)
    for k in range(5):
        w = stencil_weights(k)
        for j in range(9):
            assert w @ offs ** j == pytest.approx(math.factorial(k) if j == k else 0.0, abs=1e-9)
