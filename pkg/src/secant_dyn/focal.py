"""Focal points of the secant map and the limits of the map along curves through them."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .polycore import Polynomial, RootSpec, derivative, eval_poly, q_m_eval
from .secmap import PlanePoint

FOCAL_ABS_TOL = 1e-10
SIMPLE_TOL = 1e-8


class SingularCurvature(ArithmeticError):
    """The requested landing point is at infinity."""


class Divergent(ArithmeticError):
    """The limit along the curve does not exist as a finite number."""


class FocalKind(enum.Enum):
    SIMPLE = "simple"
    NON_SIMPLE = "non-simple"


@dataclass(frozen=True)
class FocalPoint:
    location: PlanePoint
    kind: FocalKind
    prefocal_x: float
    grad_n: tuple[float, float]
    grad_d: tuple[float, float]
    roots: tuple[int, int]

    @property
    def determinant(self) -> float:
        (nx, ny), (dx, dy) = self.grad_n, self.grad_d
        return nx * dy - ny * dx


@dataclass(frozen=True)
class CurveSpec:
    """Probe curve ``base + (xi(t), mu(t))`` truncated after the quartic term.

    ``xi(t) = t + t^2/2 + t^3/6 + t^4/24`` and
    ``mu(t) = m t + kappa t^2/2 + tau t^3/6 + sigma t^4/24``.
    """

    m: float
    kappa: float = 0.0
    tau: float = 0.0
    sigma: float = 0.0
    base: PlanePoint = PlanePoint(0.0, 0.0)

    def xi(self, t):
        return t + t * t / 2 + t ** 3 / 6 + t ** 4 / 24

    def mu(self, t):
        return self.m * t + self.kappa * t * t / 2 + self.tau * t ** 3 / 6 + self.sigma * t ** 4 / 24


def curve_point(c: CurveSpec, t: float) -> PlanePoint:
    return PlanePoint(c.base[0] + c.xi(t), c.base[1] + c.mu(t))


class Parity(enum.Enum):
    ODD = "odd"
    EVEN = "even"


@dataclass(frozen=True)
class LandingMap:
    """Landing data of the non-simple focal point ``(alpha, alpha)``."""

    root: RootSpec

    def __post_init__(self):
        if self.root.multiplicity < 2:
            raise ValueError("landing maps need a multiple root")
        if self.root.lam(self.root.multiplicity) == 0.0:
            raise ValueError("lambda_d must be non-zero")

    @property
    def d(self) -> int:
        return self.root.multiplicity

    @property
    def parity(self) -> Parity:
        return Parity.EVEN if self.d % 2 == 0 else Parity.ODD

    @property
    def lambda_d(self) -> float:
        return self.root.lam(self.d)

    @property
    def lambda_d1(self) -> float:
        return self.root.lam(self.d + 1)

    def c_of_kappa(self, kappa: float) -> float:
        return self.d * self.lambda_d / 4 * (kappa + 1) + self.lambda_d1


def g_d(m: float, d: int) -> float:
    """``1 + m + ... + m^(d-1)``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if m == 1.0:
        return float(d)
    if abs(1.0 - m) < 1e-6:
        return float(sum(m ** j for j in range(d)))
    return (1.0 - m ** d) / (1.0 - m)


def curvature_to_landing(lm: LandingMap, kappa: float) -> float:
    """Height ``alpha - lambda_d / C(kappa)`` where slope ``-1`` curves of curvature ``kappa`` land."""
    if lm.parity is not Parity.EVEN:
        raise ValueError("curvature selects the landing point only for even multiplicity")
    c = lm.c_of_kappa(kappa)
    if abs(c) <= 1e-12 * abs(lm.lambda_d):
        raise SingularCurvature(f"C({kappa}) vanishes; the curve lands at infinity")
    return lm.root.alpha - lm.lambda_d / c


def landing_to_curvature(lm: LandingMap, y: float) -> float:
    """Inverse of :func:`curvature_to_landing`."""
    if lm.parity is not Parity.EVEN:
        raise ValueError("curvature selects the landing point only for even multiplicity")
    alpha = lm.root.alpha
    if y == alpha:
        raise ValueError("no finite curvature lands exactly at alpha")
    return -1.0 + 4.0 / (lm.d * lm.lambda_d) * (lm.lambda_d / (alpha - y) - lm.lambda_d1)


def _root_index(p: Polynomial, alpha: float) -> int:
    for i, r in enumerate(p.roots):
        if r.alpha == alpha:
            return i
    raise ValueError(f"{alpha} is not a validated root of p")


def mixed_focal_landing(p: Polynomial, alpha: float, beta: float, kappa: float) -> PlanePoint:
    """Landing point of the slope-0, curvature-``kappa`` curve through ``(alpha, beta)``.

    ``alpha`` must be a double root and ``beta`` a simple root.
    """
    ra = p.roots[_root_index(p, alpha)]
    rb = p.roots[_root_index(p, beta)]
    if ra.multiplicity != 2:
        raise ValueError("the closed form needs a root of multiplicity exactly 2 at alpha")
    if rb.multiplicity != 1:
        raise ValueError("beta must be a simple root")
    p2 = eval_poly_coeffs(derivative(p, 2), alpha)
    p1 = eval_poly_coeffs(derivative(p, 1), beta)
    den = p2 - p1 * kappa
    if abs(den) <= 1e-12 * (abs(p2) + abs(p1 * kappa)):
        raise SingularCurvature(f"denominator vanishes at kappa={kappa}")
    return PlanePoint(beta, (beta * p2 - alpha * p1 * kappa) / den)


def eval_poly_coeffs(coeffs, x):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class _PairDerivatives:
    """Memoised partials of ``q`` and ``N`` at a pair of distinct roots."""

    def __init__(self, p: Polynomial, a1: float, a2: float):
        if a1 == a2:
            raise ValueError("the recursions need two different roots")
        for a in (a1, a2):
            if abs(eval_poly(p, a)) > 1e-8 * max(1.0, sum(abs(c) * abs(a) ** i for i, c in enumerate(p.coeffs))):
                raise ValueError(f"{a} is not a root of p")
        self.p = p
        self.a1 = a1
        self.a2 = a2
        self.h = a1 - a2
        self._dp = {}
        self._q = {}

    def dp(self, m: int, x: float) -> float:
        key = (m, x)
        if key not in self._dp:
            self._dp[key] = eval_poly_coeffs(derivative(self.p, m), x)
        return self._dp[key]

    def q(self, m: int, l: int) -> float:
        # partial of order m with (m - l) x-derivatives and l y-derivatives
        key = (m, l)
        if key in self._q:
            return self._q[key]
        if m == 0:
            val = 0.0
        elif l == 0:
            val = (self.dp(m, self.a1) - m * self.q(m - 1, 0)) / self.h
        elif l == m:
            val = (m * self.q(m - 1, m - 1) - self.dp(m, self.a2)) / self.h
        else:
            val = (l * self.q(m - 1, l - 1) - (m - l) * self.q(m - 1, l)) / self.h
        self._q[key] = val
        return val

    def n(self, m: int, l: int) -> float:
        if m == 0:
            return 0.0
        if l == 0:
            return self.a2 * self.q(m, 0)
        if l == m:
            return m * self.q(m - 1, m - 1) + self.a2 * self.q(m, m) - self.dp(m, self.a2)
        return l * self.q(m - 1, l - 1) + self.a2 * self.q(m, l)


def _check_order(m: int, l: int) -> None:
    if m < 0 or not 0 <= l <= m:
        raise ValueError("need 0 <= l <= m")


def deriv_q_at_pair(p: Polynomial, alpha1: float, alpha2: float, m: int, l: int, _cache=None) -> float:
    """``d^m q / dx^(m-l) dy^l`` at ``(alpha1, alpha2)`` by the recursion in ``m``."""
    _check_order(m, l)
    tbl = _cache if _cache is not None else _PairDerivatives(p, alpha1, alpha2)
    return tbl.q(m, l)


def deriv_N_at_pair(p: Polynomial, alpha1: float, alpha2: float, m: int, l: int, _cache=None) -> float:
    """``d^m N / dx^(m-l) dy^l`` at ``(alpha1, alpha2)``, expressed through the partials of ``q``."""
    _check_order(m, l)
    tbl = _cache if _cache is not None else _PairDerivatives(p, alpha1, alpha2)
    return tbl.n(m, l)


def pair_derivatives(p: Polynomial, alpha1: float, alpha2: float) -> _PairDerivatives:
    """A memo table to share across many ``deriv_*_at_pair`` calls."""
    return _PairDerivatives(p, alpha1, alpha2)


def _bivariate(p: Polynomial):
    # q(x, y) = sum_{i,j} a_{i+j+1} x^i y^j ; N = y q - p(y)
    k = p.degree
    qc = np.zeros((k, k))
    for i in range(k):
        for j in range(k - i):
            qc[i, j] = p.coeffs[i + j + 1]
    nc = np.zeros((k + 1, k + 1))
    nc[:k, 1:] += qc
    nc[0, :] -= np.asarray(p.coeffs)
    return qc, nc


def _grad(c, x, y):
    from numpy.polynomial import polynomial as P

    gx = P.polyval2d(x, y, P.polyder(c, axis=0))
    gy = P.polyval2d(x, y, P.polyder(c, axis=1))
    return float(gx), float(gy)


def focal_points(p: Polynomial) -> list[FocalPoint]:
    """All focal points built from validated real roots.

    Ordered pairs ``(alpha_i, alpha_j)`` with ``i != j``, then ``(alpha, alpha)``
    for each multiple root.  The kind comes from the gradient determinant test.
    """
    from numpy.polynomial import polynomial as P

    qc, nc = _bivariate(p)
    pts = [(i, j) for i in range(len(p.roots)) for j in range(len(p.roots)) if i != j]
    pts += [(i, i) for i, r in enumerate(p.roots) if r.multiplicity >= 2]
    out = []
    for i, j in pts:
        x, y = p.roots[i].alpha, p.roots[j].alpha
        gn = _grad(nc, x, y)
        gd = _grad(qc, x, y)
        det = gn[0] * gd[1] - gn[1] * gd[0]
        scale = math.hypot(*gn) * math.hypot(*gd)
        kind = FocalKind.SIMPLE if scale > 0 and abs(det) > SIMPLE_TOL * scale else FocalKind.NON_SIMPLE
        out.append(FocalPoint(PlanePoint(x, y), kind, y, gn, gd, (i, j)))
    return out


def focal_residuals(p: Polynomial, fp: FocalPoint) -> tuple[float, float]:
    """``(N(Q), D(Q))`` from the bivariate coefficient form; both vanish at a focal point."""
    from numpy.polynomial import polynomial as P

    qc, nc = _bivariate(p)
    x, y = fp.location
    return float(P.polyval2d(x, y, nc)), float(P.polyval2d(x, y, qc))


class CurveLimit(NamedTuple):
    point: PlanePoint
    error: float


@dataclass(frozen=True)
class Schedule:
    t0: float = 1e-2
    ratio: float = 0.5
    n_steps: int = 10
    order: int = 4

    def __post_init__(self):
        if not (self.t0 > 0 and 0 < self.ratio < 1):
            raise ValueError("need t0 > 0 and 0 < ratio < 1")
        if self.n_steps < 2 or self.order < 1:
            raise ValueError("need n_steps >= 2 and order >= 1")


def _second_coordinate_along(p: Polynomial, c: CurveSpec):
    """``t -> second coordinate of S(curve_point(c, t))`` evaluated in shifted coordinates.

    Around the base ``(x0, y0)`` both ``p(x0 + u)`` and ``p(y0 + v)`` are
    expanded exactly, so values near a multiple root keep full relative accuracy.
    """
    x0, y0 = float(c.base[0]), float(c.base[1])
    px = p.shifted(x0)
    py = px if y0 == x0 else p.shifted(y0)

    def horner(cs, u):
        acc = 0.0
        for a in reversed(cs):
            acc = acc * u + a
        return acc

    def f(t):
        u = c.xi(t)
        v = c.mu(t)
        pyv = horner(py, v)
        if x0 == y0:
            q = 0.0
            for m in range(1, len(px)):
                q += px[m] * q_m_eval(m, u, v)
        else:
            q = (horner(px, u) - pyv) / ((x0 - y0) + (u - v))
        return y0 + v - pyv / q

    return f


def richardson(values, ratio: float, order: int) -> tuple[float, float]:
    """Eliminate error terms ``t, t^2, ..., t^order`` from values at ``t_j = t0 ratio^j``.

    Returns the most refined entry and the gap to the one before it.
    """
    n = len(values)
    table = [list(map(float, values))]
    for k in range(1, min(order, n - 1) + 1):
        prev = table[-1]
        f = ratio ** -k
        table.append([prev[j] + (prev[j] - prev[j - 1]) / (f - 1.0) for j in range(1, len(prev))])
    last = table[-1]
    err = abs(last[-1] - last[-2]) if len(last) > 1 else abs(last[-1] - table[-2][-1])
    return last[-1], err


def numeric_curve_limit(p: Polynomial, c: CurveSpec, schedule: Schedule = Schedule()) -> CurveLimit:
    """Limit of ``S(curve_point(c, t))`` as ``t -> 0`` by Richardson extrapolation.

    Independent of the closed-form landing maps: it only samples the map along
    the curve.  Raises :class:`Divergent` when the samples blow up.
    """
    f = _second_coordinate_along(p, c)
    ts = [schedule.t0 * schedule.ratio ** j for j in range(schedule.n_steps)]
    vals = [f(t) for t in ts]
    if not all(math.isfinite(v) for v in vals):
        raise Divergent("non-finite samples along the curve")
    mags = [abs(v) for v in vals]
    growth = [b / a for a, b in zip(mags, mags[1:]) if a > 0]
    if len(growth) >= 3 and all(g > 1.5 for g in growth[-3:]):
        raise Divergent(f"samples grow like a pole: {vals[-3:]}")
    value, err = richardson(vals, schedule.ratio, schedule.order)
    return CurveLimit(PlanePoint(float(c.base[1]), value), err)
