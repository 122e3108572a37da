"""Identity suites, each checked against an independent oracle.

The recursions for partial derivatives at root pairs are compared with a
tensor finite-difference stencil whose weights come from a Vandermonde
solve.  Divided differences and the Taylor forms are compared with direct
evaluation.  Every check reports the name of the invariant it guards.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .focal import pair_derivatives
from .polycore import (Polynomial, PolynomialError, RootSpec, _q_coeffs, _validate_root, n1_eval,
                       n_d_eval, taylor_D_eval)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{tag}  {self.name:<32} worst={self.worst:.3e} tol={self.tol:.1e} ({self.seconds:.2f}s){extra}"


def stencil_weights(order: int, half: int = 4) -> np.ndarray:
    """Weights ``w`` on offsets ``-half..half`` with ``sum w_i f(i) ~ f^(order)(0)``.

    Exact for polynomials of degree ``<= 2 * half``.
    """
    offs = np.arange(-half, half + 1, dtype=np.float64)
    V = np.vander(offs, increasing=True).T
    rhs = np.zeros(len(offs))
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


def fd_partial(f, x: float, y: float, nx: int, ny: int, h: float = 0.25, half: int = 4) -> float:
    """``d^(nx+ny) f / dx^nx dy^ny`` at ``(x, y)`` from a ``(2 half + 1)^2`` tensor stencil."""
    wx = stencil_weights(nx, half)
    wy = stencil_weights(ny, half)
    offs = np.arange(-half, half + 1) * h
    X, Y = np.meshgrid(x + offs, y + offs, indexing="ij")
    return float(wx @ f(X, Y) @ wy) / h ** (nx + ny)


def bivariate_qn(coeffs) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient matrices of ``q`` and ``N = y q - p(y)`` in ``x^i y^j``."""
    a = np.asarray(coeffs, dtype=np.float64)
    k = len(a) - 1
    qc = np.zeros((k, k))
    for m in range(1, k + 1):
        for i in range(m):
            qc[i, m - 1 - i] += a[m]
    nc = np.zeros((k + 1, k + 1))
    nc[:k, 1:] += qc
    nc[0, :] -= a
    return qc, nc


# two or more distinct real roots each; the second entry lists the root pairs to test
RECURSION_POLYS = [
    ("x^2-1", [(-1.0, 1), (1.0, 1)], [1.0]),
    ("(x+2)x(x-1)^2", [(-2.0, 1), (0.0, 1), (1.0, 2)], [1.0]),
    ("x(x-2)^3", [(0.0, 1), (2.0, 3)], [1.0]),
    ("(x+1)^2(x-1.5)(x^2+1)", [(-1.0, 2), (1.5, 1)], [1.0, 0.0, 1.0]),
    ("(x-0.5)(x+1.5)(x-3)", [(-1.5, 1), (0.5, 1), (3.0, 1)], [1.0]),
]


def check_divided_difference(rng_seed: int = 0, n_polys: int = 200, n_pairs: int = 50,
                             tol: float = 1e-9) -> CheckResult:
    """``p(x) - p(y) = (x - y) q(x, y)`` and ``q(x, x) = p'(x)`` on random polynomials."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for _ in range(n_polys):
        deg = int(rng.integers(1, 9))
        a = rng.uniform(-5, 5, deg + 1)
        x = rng.uniform(-2, 2, n_pairs)
        y = rng.uniform(-2, 2, n_pairs)
        px, py = P.polyval(x, a), P.polyval(y, a)
        q = _q_coeffs(list(a), x, y)
        scale = np.maximum(1.0, np.maximum(abs(px), abs(py)))
        worst = max(worst, float(np.max(abs(px - py - (x - y) * q) / scale)))
        dq = _q_coeffs(list(a), x, x) - P.polyval(x, P.polyder(a))
        worst = max(worst, float(np.max(abs(dq) / np.maximum(1.0, abs(P.polyval(x, P.polyder(a)))))))
    return CheckResult("divided-difference", worst <= tol, worst, tol, time.perf_counter() - t0)


def p_d_family(d: int) -> Polynomial:
    return Polynomial.from_factored([(-2.0, 1), (0.0, 1), (1.0, d)])


def check_taylor(rng_seed: int = 0, n_points: int = 1000, tol: float = 1e-9, ds=(2, 3, 4, 5)) -> CheckResult:
    """``N = alpha D + N_1`` and ``D`` equals its expansion at ``(1, 1)`` for the ``p_d`` family."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for d in ds:
        p = p_d_family(d)
        root = p.roots[-1]
        x = rng.uniform(0, 2, n_points)
        y = rng.uniform(0, 2, n_points)
        N, D = n_d_eval(p, x, y)
        N1 = n1_eval(p, root, x, y)
        Dt = taylor_D_eval(p, root, x, y)
        scale = np.maximum(1.0, np.maximum(abs(N), abs(D)))
        worst = max(worst, float(np.max(abs(N - (root.alpha * D + N1)) / scale)))
        worst = max(worst, float(np.max(abs(D - Dt) / scale)))
    return CheckResult("taylor-decomposition", worst <= tol, worst, tol, time.perf_counter() - t0)


def check_lambdas(tol: float = 1e-10) -> CheckResult:
    """Stored expansion coefficients against composition with ``alpha + u``."""
    t0 = time.perf_counter()
    worst = 0.0
    for _, pairs, res in RECURSION_POLYS:
        p = Polynomial.from_factored(pairs, res)
        for r in p.roots:
            shifted = P.polyval(np.polynomial.Polynomial([r.alpha, 1.0]), p.coeffs).coef
            for m in range(r.multiplicity, p.degree + 1):
                ref = shifted[m] if m < len(shifted) else 0.0
                worst = max(worst, abs(r.lam(m) - ref) / max(1.0, abs(ref)))
            worst = max(worst, float(np.max(abs(shifted[: r.multiplicity]), initial=0.0)) / max(1.0, max(abs(shifted))))
    return CheckResult("expansion-coefficients", worst <= tol, worst, tol, time.perf_counter() - t0)


def check_recursions(m_max: int = 4, tol: float = 1e-6, polys=None) -> CheckResult:
    """Partials of ``q`` and ``N`` at root pairs: recursion against finite differences."""
    t0 = time.perf_counter()
    worst = 0.0
    where = ""
    for name, pairs, res in polys or RECURSION_POLYS:
        p = Polynomial.from_factored(pairs, res)
        qc, nc = bivariate_qn(p.coeffs)
        fq = lambda X, Y: P.polyval2d(X, Y, qc)  # noqa: E731
        fn = lambda X, Y: P.polyval2d(X, Y, nc)  # noqa: E731
        alphas = [r.alpha for r in p.roots]
        for a1 in alphas:
            for a2 in alphas:
                if a1 == a2:
                    continue
                tbl = pair_derivatives(p, a1, a2)
                for m in range(m_max + 1):
                    for l in range(m + 1):
                        for label, got, f in (("q", tbl.q(m, l), fq), ("N", tbl.n(m, l), fn)):
                            ref = fd_partial(f, a1, a2, m - l, l)
                            err = abs(got - ref) / max(1.0, abs(ref))
                            if err > worst:
                                worst = err
                                where = f"{name} at ({a1:g},{a2:g}) d{label} m={m} l={l}"
    return CheckResult("pair-derivative-recursions", worst <= tol, worst, tol, time.perf_counter() - t0,
                       where if worst > tol else "")


def check_root_claims(coeffs, claims) -> CheckResult:
    """Each claimed ``(alpha, d)`` must be a root of exact multiplicity ``d`` of the given coefficients."""
    t0 = time.perf_counter()
    bad = []
    for alpha, d in claims:
        try:
            _validate_root(list(coeffs), RootSpec(float(alpha), int(d), ()))
        except PolynomialError as exc:
            bad.append(str(exc))
    return CheckResult("root-multiplicity", not bad, float(len(bad)), 0.0, time.perf_counter() - t0, "; ".join(bad))


def default_suite(rng_seed: int = 0) -> list[CheckResult]:
    return [
        check_divided_difference(rng_seed),
        check_taylor(rng_seed),
        check_lambdas(),
        check_recursions(),
    ]
