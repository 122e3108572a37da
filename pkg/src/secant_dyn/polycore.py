"""Real monic polynomials and the divided-difference polynomials of the secant map.

A :class:`Polynomial` keeps two views of the same object: the coefficient list
``a_0 .. a_k`` and, when real roots are known, the factorization
``prod (x - alpha_i)^{d_i} * r(x)`` with a monic residual ``r``.  The coefficient
view drives the textbook formulas (``q``, ``N``, ``D``); the factored view drives
:func:`factored_divided_difference`, which stays accurate next to multiple roots.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

ROOT_TOL = 1e-8
EXPANSION_RTOL = 1e-10
MIN_ROOT_SEPARATION = 1e-6


class PolynomialError(ValueError):
    """Raised for malformed polynomials or root data that fails validation."""


@dataclass(frozen=True)
class RootSpec:
    """A real root ``alpha`` of multiplicity ``d`` with cached ``lambda_d .. lambda_k``."""

    alpha: float
    multiplicity: int
    lambdas: tuple[float, ...] = ()

    def lam(self, m: int) -> float:
        """``p^(m)(alpha) / m!``; zero below the multiplicity and above the degree."""
        j = m - self.multiplicity
        if j < 0 or j >= len(self.lambdas):
            return 0.0
        return self.lambdas[j]

    @property
    def is_simple(self) -> bool:
        return self.multiplicity == 1


def _poly_mul(a: Sequence[float], b: Sequence[float]) -> list[float]:
    out = [0.0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _abs_horner(coeffs: Sequence[float], x: float) -> float:
    ax = abs(x)
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * ax + abs(c)
    return acc


def _horner(coeffs: Sequence[float], x):
    acc = 0.0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def derivative_coeffs(coeffs: Sequence[float], order: int) -> list[float]:
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    out = [float(c) for c in coeffs]
    for _ in range(order):
        if len(out) <= 1:
            return [0.0]
        out = [i * out[i] for i in range(1, len(out))]
    return out


@dataclass(frozen=True)
class Polynomial:
    """Real monic polynomial of degree ``k >= 2``.

    Build it with :meth:`from_coeffs` or :meth:`from_factored`; the default
    constructor expects already consistent data and re-validates it.
    """

    coeffs: tuple[float, ...]
    roots: tuple[RootSpec, ...] = ()
    residual: tuple[float, ...] = field(default=(1.0,))

    def __post_init__(self):
        if len(self.coeffs) < 3:
            raise PolynomialError("degree must be at least 2")
        if not all(math.isfinite(c) for c in self.coeffs):
            raise PolynomialError("coefficients must be finite")
        if self.coeffs[-1] != 1.0:
            raise PolynomialError(f"polynomial must be monic, leading coefficient is {self.coeffs[-1]}")
        if sum(r.multiplicity for r in self.roots) > self.degree:
            raise PolynomialError("root multiplicities exceed the degree")
        if self.residual[-1] != 1.0:
            raise PolynomialError("residual factor must be monic")
        expanded = self._expand()
        if len(expanded) != len(self.coeffs):
            raise PolynomialError("factors and residual do not have the polynomial's degree")
        scale = max(1.0, max(abs(c) for c in self.coeffs))
        if max(abs(a - b) for a, b in zip(expanded, self.coeffs)) > EXPANSION_RTOL * scale:
            raise PolynomialError("factored form does not reproduce the coefficients")
        alphas = sorted(r.alpha for r in self.roots)
        for a, b in zip(alphas, alphas[1:]):
            if b - a <= MIN_ROOT_SEPARATION:
                raise PolynomialError(f"roots {a} and {b} are not separated")
        for r in self.roots:
            _validate_root(self.coeffs, r)

    def _expand(self) -> list[float]:
        out = list(self.residual)
        for r in self.roots:
            for _ in range(r.multiplicity):
                out = _poly_mul(out, (-r.alpha, 1.0))
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def root_values(self) -> tuple[float, ...]:
        return tuple(r.alpha for r in self.roots)

    def __call__(self, x):
        return eval_poly(self, x)

    @classmethod
    def from_factored(cls, roots: Iterable[tuple[float, int]], residual: Sequence[float] = (1.0,)) -> "Polynomial":
        """``prod (x - alpha)^d * residual(x)`` with exact integer multiplicities."""
        pairs = [(float(a), int(d)) for a, d in roots]
        if any(d < 1 for _, d in pairs):
            raise PolynomialError("multiplicities must be >= 1")
        residual = tuple(float(c) for c in residual)
        coeffs = list(residual)
        for a, d in pairs:
            for _ in range(d):
                coeffs = _poly_mul(coeffs, (-a, 1.0))
        specs = tuple(
            RootSpec(a, d, tuple(_shift_factored(pairs, residual, a)[d:])) for a, d in pairs
        )
        return cls(tuple(coeffs), specs, residual)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[float], detect_roots: bool = True) -> "Polynomial":
        """Coefficients ``a_0 .. a_k``; real roots are located numerically when asked."""
        coeffs = tuple(float(c) for c in coeffs)
        if len(coeffs) < 3:
            raise PolynomialError("degree must be at least 2")
        if not all(math.isfinite(c) for c in coeffs):
            raise PolynomialError("coefficients must be finite")
        if coeffs[-1] != 1.0:
            raise PolynomialError(f"polynomial must be monic, leading coefficient is {coeffs[-1]}")
        if not detect_roots:
            return cls(coeffs, (), coeffs)
        pairs = find_real_roots(coeffs)
        residual, _ = _deflate(coeffs, pairs)
        specs = tuple(
            RootSpec(a, d, tuple(_shift_factored(pairs, residual, a)[d:])) for a, d in pairs
        )
        return cls(coeffs, specs, tuple(residual))

    def shifted(self, c: float) -> list[float]:
        """Coefficients in ``u`` of ``p(c + u)``, built from the factored form."""
        return _shift_factored([(r.alpha, r.multiplicity) for r in self.roots], self.residual, c)

    def describe(self) -> str:
        if not self.roots:
            return "coeffs: " + " ".join(repr(c) for c in self.coeffs)
        parts = "".join(f"({r.alpha!r} {r.multiplicity})" for r in self.roots)
        if len(self.residual) > 1:
            parts += " " + " ".join(repr(c) for c in self.residual)
        return "factored: " + parts


def _shift_factored(pairs, residual, c: float) -> list[float]:
    # (c - alpha) is exact when c is one of the roots, so the low coefficients vanish exactly
    out = taylor_shift(residual, c)
    for a, d in pairs:
        lin = (c - a, 1.0)
        for _ in range(d):
            out = _poly_mul(out, lin)
    return out


def taylor_shift(coeffs: Sequence[float], c: float) -> list[float]:
    """Coefficients of ``p(c + u)`` by repeated synthetic division."""
    a = [float(v) for v in coeffs]
    n = len(a)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += c * a[j + 1]
    return a


def _validate_root(coeffs: Sequence[float], r: RootSpec) -> None:
    d = r.multiplicity
    for j in range(d + 1):
        dc = derivative_coeffs(coeffs, j)
        val = abs(_horner(dc, r.alpha))
        scale = max(1.0, _abs_horner(dc, r.alpha))
        if j < d and val > ROOT_TOL * scale:
            raise PolynomialError(
                f"alpha={r.alpha} is not a root of multiplicity {d}: |p^({j})(alpha)| = {val:.3g}"
            )
        if j == d and val <= ROOT_TOL * scale:
            raise PolynomialError(f"alpha={r.alpha} has multiplicity larger than {d}")


def find_real_roots(coeffs: Sequence[float], imag_tol: float = 1e-6, cluster_tol: float = 1e-3) -> list[tuple[float, int]]:
    """Real roots with multiplicities guessed by clustering ``numpy.roots`` output.

    Each cluster centre is polished by Newton on ``p^(d-1)``, where the root is simple.
    """
    zs = np.roots(list(reversed(coeffs)))
    reals = sorted(z.real for z in zs if abs(z.imag) <= imag_tol * (1.0 + abs(z)))
    clusters: list[list[float]] = []
    for x in reals:
        if clusters and x - clusters[-1][-1] <= cluster_tol:
            clusters[-1].append(x)
        else:
            clusters.append([x])
    pairs = []
    for cl in clusters:
        d = len(cl)
        x = float(np.mean(cl))
        f = derivative_coeffs(coeffs, d - 1)
        fp = derivative_coeffs(coeffs, d)
        for _ in range(50):
            den = _horner(fp, x)
            if den == 0.0:
                break
            step = _horner(f, x) / den
            x -= step
            if abs(step) <= 4e-16 * max(1.0, abs(x)):
                break
        pairs.append((x, d))
    return pairs


def _deflate(coeffs: Sequence[float], pairs: Sequence[tuple[float, int]]) -> tuple[list[float], float]:
    rem_max = 0.0
    cur = [float(c) for c in coeffs]
    for a, d in pairs:
        for _ in range(d):
            # synthetic division by (x - a)
            n = len(cur) - 1
            out = [0.0] * n
            acc = 0.0
            for i in range(n, 0, -1):
                acc = acc * a + cur[i]
                out[i - 1] = acc
            rem_max = max(rem_max, abs(acc * a + cur[0]))
            cur = out
    cur[-1] = 1.0
    return cur, rem_max


def eval_poly(p: Polynomial, x):
    """``p(x)`` by Horner's scheme; works elementwise on arrays."""
    return _horner(p.coeffs, x)


def derivative(p: Polynomial, order: int) -> list[float]:
    """Coefficients of ``p^(order)``; ``[0.0]`` once the order exceeds the degree."""
    return derivative_coeffs(p.coeffs, order)


def _lambda(coeffs: Sequence[float], alpha: float, m: int) -> float:
    return _horner(derivative_coeffs(coeffs, m), alpha) / math.factorial(m)


def lambda_m(p: Polynomial, alpha: float, m: int) -> float:
    """Normalized Taylor coefficient ``p^(m)(alpha) / m!``."""
    if not 0 <= m <= p.degree:
        raise ValueError(f"m must lie in [0, {p.degree}]")
    return _lambda(p.coeffs, alpha, m)


def q_m_eval(m: int, x, y):
    """``sum_{l=0}^{m-1} x^(m-1-l) y^l``, i.e. ``(x^m - y^m)/(x - y)`` without the division."""
    if m < 1:
        raise ValueError("m must be >= 1")
    acc = 0.0 * x
    yp = 1.0 + 0.0 * y
    for _ in range(m):
        acc = acc * x + yp
        yp = yp * y
    return acc


def q_eval(p: Polynomial, x, y):
    """Divided difference ``q(x, y) = sum_m a_m q_m(x, y)``, equal to ``p'(x)`` on the diagonal."""
    return _q_coeffs(p.coeffs, x, y)


def _q_coeffs(coeffs: Sequence[float], x, y):
    qm = 0.0 * x
    yp = 1.0 + 0.0 * y
    acc = 0.0 * (x + y)
    for a in coeffs[1:]:
        qm = qm * x + yp
        yp = yp * y
        acc = acc + a * qm
    return acc


def n_d_eval(p: Polynomial, x, y):
    """Numerator and denominator of the secant map's second coordinate."""
    d = q_eval(p, x, y)
    return y * d - eval_poly(p, y), d


def _require_multiple(root: RootSpec) -> None:
    if root.multiplicity < 2:
        raise ValueError("the Taylor forms at (alpha, alpha) need a root of multiplicity >= 2")


def taylor_D_eval(p: Polynomial, root: RootSpec, x, y):
    """``D`` expanded at ``(alpha, alpha)``: ``sum_{m>=d} lambda_m q_m(x - alpha, y - alpha)``."""
    _require_multiple(root)
    u = x - root.alpha
    v = y - root.alpha
    acc = 0.0 * (u + v)
    for m in range(root.multiplicity, p.degree + 1):
        acc = acc + root.lam(m) * q_m_eval(m, u, v)
    return acc


def n1_eval(p: Polynomial, root: RootSpec, x, y):
    """Remainder ``N_1 = N - alpha * D`` in the shifted coordinates.

    ``N_1 = u v sum_{m>=d} lambda_m q_{m-1}(u, v)`` with ``u = x - alpha``, ``v = y - alpha``.
    """
    _require_multiple(root)
    u = x - root.alpha
    v = y - root.alpha
    acc = 0.0 * (u + v)
    for m in range(root.multiplicity, p.degree + 1):
        acc = acc + root.lam(m) * q_m_eval(m - 1, u, v)
    return u * v * acc


def factored_divided_difference(p: Polynomial, x: float, y: float) -> tuple[float, float, float, float]:
    """``(p(x), p(y), q(x, y), |q|-scale)`` through the product rule over the factors.

    For ``p = f g``: ``q_p = f(x) q_g + q_f g(y)``.  Each factor ``(x - alpha)^d``
    contributes ``q_d(x - alpha, y - alpha)``, so nothing cancels near a multiple
    root.  The last entry sums the same terms in absolute value and is the
    rounding scale used by the pole test.
    """
    r = p.residual
    ax, ay = abs(x), abs(y)
    px = py = 0.0
    for c in reversed(r):
        px = px * x + c
        py = py * y + c
    qm = qma = 0.0
    yp = ypa = 1.0
    q = qa = 0.0
    for c in r[1:]:
        qm = qm * x + yp
        qma = qma * ax + ypa
        yp *= y
        ypa *= ay
        q += c * qm
        qa += abs(c) * qma
    for root in p.roots:
        u = x - root.alpha
        v = y - root.alpha
        au, av = abs(u), abs(v)
        qf = qfa = 0.0
        up = vp = vpa = 1.0
        for _ in range(root.multiplicity):
            qf = qf * u + vp
            qfa = qfa * au + vpa
            up *= u
            vp *= v
            vpa *= av
        q = up * q + qf * py
        qa = abs(up) * qa + qfa * abs(py)
        px *= up
        py *= vp
    return px, py, q, qa


_FACTOR_RE = re.compile(r"\(\s*([^\s()]+)\s+([^\s()]+)\s*\)")


def parse_polynomial(text: str) -> Polynomial:
    """Parse ``coeffs: a0 a1 ... ak`` or ``factored: (alpha d)... [residual coeffs]``."""
    text = text.strip()
    kind, sep, body = text.partition(":")
    if not sep:
        raise PolynomialError(f"expected 'coeffs:' or 'factored:' prefix in {text!r}")
    kind = kind.strip().lower()
    try:
        if kind == "coeffs":
            return Polynomial.from_coeffs([float(t) for t in body.split()])
        if kind == "factored":
            return parse_factored(body)
    except ValueError as exc:
        if isinstance(exc, PolynomialError):
            raise
        raise PolynomialError(f"bad number in {text!r}: {exc}") from None
    raise PolynomialError(f"unknown polynomial kind {kind!r}")


def parse_factored(body: str) -> Polynomial:
    pairs = []
    pos = 0
    body = body.strip()
    for mt in _FACTOR_RE.finditer(body):
        if body[pos:mt.start()].strip():
            raise PolynomialError(f"unexpected text {body[pos:mt.start()]!r} in factored form")
        d = float(mt.group(2))
        if d != int(d):
            raise PolynomialError(f"multiplicity must be an integer, got {mt.group(2)}")
        pairs.append((float(mt.group(1)), int(d)))
        pos = mt.end()
    if not pairs:
        raise PolynomialError("factored form needs at least one (alpha multiplicity) pair")
    rest = body[pos:].split()
    residual = [float(t) for t in rest] if rest else [1.0]
    return Polynomial.from_factored(pairs, residual)
