"""Basins of attraction on a pixel grid, image output, and the parity experiment."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .focal import CurveSpec, LandingMap, curve_point, landing_to_curvature
from .polycore import Polynomial, RootSpec, factored_divided_difference
from .secmap import (BASIN_LIMITS, ESCAPED, NEAR_POLE, NON_CONVERGENT, Limits, OrbitTermination,
                     code_label, iterate_orbit, secant_step)

RED = (255, 0, 0)
GREEN = (0, 255, 0)
BLUE = (0, 0, 255)
WHITE = (255, 255, 255)
_SIMPLE_COLORS = [GREEN, BLUE, (255, 200, 0), (200, 0, 200), (0, 200, 200), (120, 60, 0), (90, 90, 90)]
_MULTIPLE_COLORS = [RED, (150, 0, 0), (255, 110, 110), (255, 60, 160)]


@dataclass(frozen=True)
class Window:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("window needs x_min < x_max and y_min < y_max")
        if self.width < 1 or self.height < 1:
            raise ValueError("window size must be positive")

    @classmethod
    def around(cls, cx: float, cy: float, half_width: float, size: int) -> "Window":
        return cls(cx - half_width, cx + half_width, cy - half_width, cy + half_width, size, size)

    def xs(self) -> np.ndarray:
        # written so that symmetric windows give exactly symmetric centres
        i = np.arange(self.width, dtype=np.float64)
        n = 2 * self.width
        return (self.x_min * (n - 2 * i - 1) + self.x_max * (2 * i + 1)) / n

    def ys(self) -> np.ndarray:
        # row 0 is the top of the picture
        j = np.arange(self.height, dtype=np.float64)
        n = 2 * self.height
        return (self.y_max * (n - 2 * j - 1) + self.y_min * (2 * j + 1)) / n


def figure_palette(p: Polynomial) -> list[tuple[int, int, int]]:
    """Colour per root index: reds for multiple roots, then green, blue, ... for simple roots left to right."""
    colors: list = [None] * len(p.roots)
    order = sorted(range(len(p.roots)), key=lambda i: p.roots[i].alpha)
    multi = [i for i in order if p.roots[i].multiplicity > 1]
    simple = [i for i in order if p.roots[i].multiplicity == 1]
    for n, i in enumerate(multi):
        colors[i] = _MULTIPLE_COLORS[n % len(_MULTIPLE_COLORS)]
    for n, i in enumerate(simple):
        colors[i] = _SIMPLE_COLORS[n % len(_SIMPLE_COLORS)]
    return colors


@dataclass
class BasinGrid:
    window: Window
    cells: np.ndarray
    iterations: np.ndarray
    palette: list
    limits: Limits
    n_roots: int

    def rgb(self) -> np.ndarray:
        lut = np.array(list(self.palette) + [WHITE], dtype=np.uint8)
        idx = np.where(self.cells >= 0, self.cells, len(self.palette))
        return lut[idx]

    def histogram(self) -> dict[str, int]:
        codes, counts = np.unique(self.cells, return_counts=True)
        return {code_label(int(c)): int(n) for c, n in zip(codes, counts)}

    def converged_in_disc(self, cx: float, cy: float, radius: float) -> set[int]:
        """Root indices that occur among cell centres inside the disc."""
        X, Y = np.meshgrid(self.window.xs(), self.window.ys())
        inside = (X - cx) ** 2 + (Y - cy) ** 2 <= radius * radius
        vals = np.unique(self.cells[inside])
        return {int(v) for v in vals if v >= 0}


def default_workers() -> int:
    cap = os.environ.get("SECANT_DYN_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ValueError(f"SECANT_DYN_THREADS must be an integer, got {cap!r}") from None
    return n


def render_basin(p: Polynomial, w: Window, limits: Limits = BASIN_LIMITS, workers: int | None = None,
                 backend: str | None = None, palette=None) -> BasinGrid:
    """Classify the orbit of every cell centre.

    Rows are split into chunks handled by a thread pool; every chunk writes its
    own slice, so the result does not depend on ``workers``.
    """
    workers = default_workers() if workers is None else max(1, int(workers))
    xs = w.xs()
    ys = w.ys()
    cells = np.empty((w.height, w.width), dtype=np.int16)
    iters = np.empty((w.height, w.width), dtype=np.int32)
    # the compiled kernel drops the GIL, so small chunks balance well; the numpy
    # fallback pays per-call overhead and wants one large chunk per worker
    compiled = (backend or kernels.BACKEND) == "cython"
    rows_per_chunk = max(1, math.ceil(w.height / (4 * workers if compiled else workers)))
    chunks = [(r, min(w.height, r + rows_per_chunk)) for r in range(0, w.height, rows_per_chunk)]

    def run(chunk):
        r0, r1 = chunk
        X, Y = np.meshgrid(xs, ys[r0:r1])
        c, it = kernels.classify_seeds(p, X, Y, limits, backend)
        cells[r0:r1] = c.reshape(r1 - r0, w.width)
        iters[r0:r1] = it.reshape(r1 - r0, w.width)

    if workers == 1:
        for ch in chunks:
            run(ch)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(run, chunks))
    return BasinGrid(w, cells, iters, palette or figure_palette(p), limits, len(p.roots))


def ppm_bytes(g: BasinGrid) -> bytes:
    """Binary P6 image, rows top to bottom."""
    header = f"P6\n{g.window.width} {g.window.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(g.rgb(), dtype=np.uint8).tobytes()


def write_image(g: BasinGrid, path: str) -> None:
    """Write the grid as PPM, or as PNG when the path ends in ``.png``."""
    try:
        if str(path).lower().endswith(".png"):
            from PIL import Image

            Image.fromarray(g.rgb(), "RGB").save(path)
        else:
            with open(path, "wb") as fh:
                fh.write(ppm_bytes(g))
    except OSError as exc:
        raise OSError(f"cannot write image to {path}: {exc.strerror or exc}") from exc


@dataclass(frozen=True)
class Witness:
    root: int
    x: float
    y: float
    iterations: int


@dataclass
class ParityReport:
    root: RootSpec
    epsilon: float
    samples: int
    counts: dict[str, int]
    witness_seeds: list[Witness] = field(default_factory=list)
    rng_seed: int = 0
    quadrant: bool = False

    def fraction(self, label: str) -> float:
        return self.counts.get(label, 0) / self.samples if self.samples else 0.0

    def write_counts_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["classification", "count"])
        for k in sorted(self.counts):
            w.writerow([k, self.counts[k]])

    def write_witness_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["root", "x", "y", "iterations"])
        for s in self.witness_seeds:
            w.writerow([s.root, repr(s.x), repr(s.y), s.iterations])


def sample_disc(rng: np.random.Generator, alpha: float, epsilon: float, n: int, quadrant: bool = False,
                accept=None) -> tuple[np.ndarray, np.ndarray]:
    """``n`` uniform points in the disc of radius ``epsilon`` about ``(alpha, alpha)``.

    Rejection from the bounding square (or its upper-right quarter when
    ``quadrant``), drawn with the caller's generator.
    """
    xs: list[float] = []
    ys: list[float] = []
    lo = 0.0 if quadrant else -epsilon
    while len(xs) < n:
        pts = rng.uniform(lo, epsilon, size=(2 * (n - len(xs)) + 16, 2))
        for u, v in pts:
            if u * u + v * v > epsilon * epsilon:
                continue
            x, y = alpha + u, alpha + v
            if accept is not None and not accept(x, y):
                continue
            xs.append(x)
            ys.append(y)
            if len(xs) == n:
                break
    return np.array(xs), np.array(ys)


def _ulp_refine(f, x0: float, y0: float, span: int = 20000):
    """Search the float lattice around ``(x0, y0)`` for a smaller ``|f|``.

    ``f`` is close to affine on this scale, so for each x offset only the best
    y offset is tried.
    """
    ux, uy = math.ulp(x0), math.ulp(y0)
    g0 = f(x0, y0)
    gx = (f(x0 + 64 * ux, y0) - f(x0 - 64 * ux, y0)) / 128
    gy = (f(x0, y0 + 64 * uy) - f(x0, y0 - 64 * uy)) / 128
    best = (abs(g0), x0, y0)
    if not (math.isfinite(gx) and math.isfinite(gy)) or gy == 0.0:
        return best
    for i in range(-span, span + 1):
        j = round(-(g0 + i * gx) / gy)
        x, y = x0 + i * ux, y0 + j * uy
        v = abs(f(x, y))
        if v < best[0]:
            best = (v, x, y)
            if v == 0.0:
                break
    return best


def find_witness(p: Polynomial, root_index: int, target_index: int, epsilon: float,
                 limits: Limits = Limits(), tries: int = 25, span: int = 20000) -> Witness | None:
    """A seed within ``epsilon`` of ``(alpha, alpha)`` whose orbit converges to another root.

    The seed sits on a slope ``-1`` curve whose curvature is aimed, through the
    landing map, at the target root ``beta``.  The cubic coefficient of the
    curve and then the last bits of the seed are tuned so that the first image
    lies on the line ``y = beta``, which the next step sends to ``(beta, beta)``.
    """
    root = p.roots[root_index]
    beta = p.roots[target_index].alpha
    lm = LandingMap(root)
    kappa = landing_to_curvature(lm, beta)
    base = (root.alpha, root.alpha)

    def s2(x, y):
        try:
            return secant_step(p, (x, y), limits).y - beta
        except OrbitTermination:
            return math.inf

    # large t keeps p(x) well above rounding, so the final jump onto (beta, beta) survives
    t = 0.99 * epsilon / math.sqrt(2.0) / 0.95
    for _ in range(tries):
        t *= 0.95
        probe = curve_point(CurveSpec(-1.0, kappa, 0.0, 0.0, base), t)
        if math.hypot(probe.x - base[0], probe.y - base[1]) >= epsilon:
            continue

        def g(tau):
            pt = curve_point(CurveSpec(-1.0, kappa, tau, 0.0, base), t)
            return s2(pt.x, pt.y)

        lo, hi = -1.0, 1.0
        glo, ghi = g(lo), g(hi)
        while math.isfinite(glo) and math.isfinite(ghi) and glo * ghi > 0 and hi < 1e6:
            lo, hi = 2 * lo, 2 * hi
            glo, ghi = g(lo), g(hi)
        if not (math.isfinite(glo) and math.isfinite(ghi)) or glo * ghi > 0:
            continue
        tau = brentq(g, lo, hi, xtol=1e-300, maxiter=200)
        seed = curve_point(CurveSpec(-1.0, kappa, tau, 0.0, base), t)
        _, x, y = _ulp_refine(s2, seed.x, seed.y, span)
        if math.hypot(x - base[0], y - base[1]) >= epsilon:
            continue
        res = iterate_orbit(p, (x, y), limits)
        if res.root == target_index:
            return Witness(target_index, x, y, res.iterations)
    return None


def parity_experiment(p: Polynomial, root: RootSpec | int, epsilon: float = 1e-3, n: int = 10_000,
                      rng_seed: int = 0, quadrant: bool = False, limits: Limits = Limits(),
                      backend: str | None = None) -> ParityReport:
    """Classify ``n`` random seeds near ``(alpha, alpha)`` and, for even ``d``, look for witnesses.

    Seeds come from numpy's PCG64 generator seeded with ``rng_seed``.  Seeds
    on the pole curve to working precision are rejected.  For even
    multiplicity one witness per simple root is searched with
    :func:`find_witness`.
    """
    idx = root if isinstance(root, int) else p.roots.index(root)
    spec = p.roots[idx]
    if spec.multiplicity < 2:
        raise ValueError("the parity experiment needs a multiple root")
    if not epsilon > 0 or n < 1:
        raise ValueError("need epsilon > 0 and n >= 1")
    rng = np.random.default_rng(rng_seed)

    def off_pole(x, y):
        _, _, q, qa = factored_divided_difference(p, x, y)
        return abs(q) > limits.pole_guard * qa

    xs, ys = sample_disc(rng, spec.alpha, epsilon, n, quadrant, off_pole)
    codes, _ = kernels.classify_seeds(p, xs, ys, limits, backend)
    counts: dict[str, int] = {}
    for c in codes:
        lab = code_label(int(c))
        counts[lab] = counts.get(lab, 0) + 1
    witnesses = []
    if spec.multiplicity % 2 == 0:
        for j, r in enumerate(p.roots):
            if r.multiplicity == 1:
                wit = find_witness(p, idx, j, epsilon, limits)
                if wit is not None:
                    witnesses.append(wit)
    return ParityReport(spec, epsilon, n, counts, witnesses, rng_seed, quadrant)


__all__ = [
    "Window", "BasinGrid", "render_basin", "write_image", "ppm_bytes", "figure_palette", "ParityReport",
    "Witness", "parity_experiment", "find_witness", "sample_disc", "NEAR_POLE", "ESCAPED", "NON_CONVERGENT",
]
