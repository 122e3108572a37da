"""The secant map as a planar dynamical system: single steps, orbits, fixed points."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .polycore import Polynomial, factored_divided_difference

# Integer cell codes shared with the batch kernels.  Non-negative codes are root indices.
NEAR_POLE = -1
ESCAPED = -2
NON_CONVERGENT = -3


class PlanePoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Limits:
    """Finite-horizon stand-ins for the asymptotic statements about orbits."""

    max_iter: int = 200
    conv_tol: float = 1e-8
    conv_streak: int = 3
    escape_radius: float = 1e8
    pole_guard: float = 1e-12

    def __post_init__(self):
        if self.max_iter < 0:
            raise ValueError("max_iter must be >= 0")
        if self.conv_streak < 1:
            raise ValueError("conv_streak must be >= 1")
        if not (self.conv_tol > 0 and self.escape_radius > 0 and self.pole_guard >= 0):
            raise ValueError("conv_tol and escape_radius must be positive, pole_guard non-negative")

    def with_(self, **kw) -> "Limits":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


BASIN_LIMITS = Limits(max_iter=200)


class Status(enum.Enum):
    CONVERGED = "converged"
    NEAR_POLE = "near_pole"
    ESCAPED = "escaped"
    NON_CONVERGENT = "non_convergent"


_STATUS_OF_CODE = {NEAR_POLE: Status.NEAR_POLE, ESCAPED: Status.ESCAPED, NON_CONVERGENT: Status.NON_CONVERGENT}


def code_label(code: int) -> str:
    if code >= 0:
        return f"converged({code})"
    return _STATUS_OF_CODE[code].value


@dataclass(frozen=True)
class OrbitResult:
    status: Status
    root: int | None
    iterations: int
    trace: tuple[PlanePoint, ...] | None = None

    @property
    def code(self) -> int:
        if self.status is Status.CONVERGED:
            return self.root
        return {Status.NEAR_POLE: NEAR_POLE, Status.ESCAPED: ESCAPED, Status.NON_CONVERGENT: NON_CONVERGENT}[self.status]

    @property
    def label(self) -> str:
        return code_label(self.code)

    @classmethod
    def from_code(cls, code: int, iterations: int, trace=None) -> "OrbitResult":
        if code >= 0:
            return cls(Status.CONVERGED, int(code), int(iterations), trace)
        return cls(_STATUS_OF_CODE[int(code)], None, int(iterations), trace)


class OrbitTermination(ArithmeticError):
    """A step that cannot produce a usable finite point."""


class NearPole(OrbitTermination):
    """The point lies on the pole curve ``D = 0`` to working precision."""


class Escaped(OrbitTermination):
    """The image left the disc of radius ``escape_radius``."""


def secant_step(p: Polynomial, pt, limits: Limits = Limits()) -> PlanePoint:
    """One step ``(x, y) -> (y, y - p(y) / q(x, y))``.

    ``q`` comes from the factored product rule, so no quotient of nearly equal
    numbers is ever formed.  If ``y`` is an exact root the image is ``(y, y)``,
    the continuous extension along the line through the root.

    Raises :class:`NearPole` when ``|D|`` is within ``pole_guard`` of its own
    rounding scale and :class:`Escaped` when the image is not finite or exceeds
    ``escape_radius``.
    """
    x, y = pt
    _, py, q, qa = factored_divided_difference(p, x, y)
    if py == 0.0:
        return PlanePoint(y, y)
    if abs(q) <= limits.pole_guard * qa:
        raise NearPole(f"|D| = {abs(q):.3g} at ({x!r}, {y!r})")
    ynew = y - py / q
    if not abs(ynew) <= limits.escape_radius:
        raise Escaped(f"image {ynew!r} of ({x!r}, {y!r})")
    return PlanePoint(y, ynew)


def match_root(alphas, x: float, y: float, tol: float) -> int:
    """Index of the root ``alpha`` with ``(x, y)`` inside the ``tol``-box of ``(alpha, alpha)``, else -1."""
    for i, a in enumerate(alphas):
        if abs(x - a) <= tol and abs(y - a) <= tol:
            return i
    return -1


def iterate_orbit(p: Polynomial, seed, limits: Limits = Limits(), keep_trace: bool = False) -> OrbitResult:
    """Follow the orbit of ``seed`` and classify it.

    The seed itself counts toward the convergence streak.  A seed sitting
    exactly on a fixed point converges after zero steps.
    """
    x, y = float(seed[0]), float(seed[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError("seed must be finite")
    alphas = p.root_values
    trace = [PlanePoint(x, y)] if keep_trace else None

    def done(code, it):
        return OrbitResult.from_code(code, it, tuple(trace) if keep_trace else None)

    for i, a in enumerate(alphas):
        if x == a and y == a:
            return done(i, 0)
    last = match_root(alphas, x, y, limits.conv_tol)
    streak = 1 if last >= 0 else 0
    if streak >= limits.conv_streak:
        return done(last, 0)
    for it in range(1, limits.max_iter + 1):
        try:
            x, y = secant_step(p, (x, y), limits)
        except NearPole:
            return done(NEAR_POLE, it)
        except Escaped:
            return done(ESCAPED, it)
        if keep_trace:
            trace.append(PlanePoint(x, y))
        idx = match_root(alphas, x, y, limits.conv_tol)
        if idx >= 0 and idx == last:
            streak += 1
        elif idx >= 0:
            streak = 1
        else:
            streak = 0
        last = idx
        if streak >= limits.conv_streak:
            return done(idx, it)
    return done(NON_CONVERGENT, limits.max_iter)


def fixed_points(p: Polynomial) -> list[tuple[PlanePoint, int]]:
    """The diagonal fixed points ``(alpha, alpha)``, one per validated real root."""
    return [(PlanePoint(r.alpha, r.alpha), i) for i, r in enumerate(p.roots)]


def pole_membership(p: Polynomial, pt, pole_guard: float = Limits.pole_guard) -> bool:
    """Whether ``pt`` lies on ``D = 0`` relative to the local rounding scale of ``D``."""
    _, _, q, qa = factored_divided_difference(p, float(pt[0]), float(pt[1]))
    return abs(q) <= pole_guard * qa


def write_trace_csv(result: OrbitResult, fh) -> None:
    """Orbit trace as CSV with columns ``iter,x,y,classification``."""
    if result.trace is None:
        raise ValueError("orbit was computed without a trace")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["iter", "x", "y", "classification"])
    last = len(result.trace) - 1
    for i, pt in enumerate(result.trace):
        w.writerow([i, repr(pt.x), repr(pt.y), result.label if i == last else ""])
