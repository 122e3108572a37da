"""Command-line front end: render, orbit, focal, parity, verify.

Settings come from flags and from an optional ``--config`` file of
``key = value`` lines; a flag always beats the file.  Exit status is 0 on
success, 1 for usage or config errors, 2 for runtime failures and 3 when a
verify suite fails.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys

from . import basin, focal, kernels, verify
from .polycore import PolynomialError, parse_polynomial
from .secmap import BASIN_LIMITS, Limits, iterate_orbit, write_trace_csv

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment, keys are case-insensitive."""
    out = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    with fh:
        for n, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep or not key.strip():
                raise UsageError(f"{path}:{n}: expected 'key = value', got {raw.strip()!r}")
            out[key.strip().lower().replace("-", "_")] = val.strip().strip('"').strip("'")
    return out


# key -> (converter, arity or None for a single value)
_FIELDS = {
    "coeffs": (str, None), "factored": (str, None),
    "window": (float, 4), "size": (int, 2), "out": (str, None), "workers": (int, None), "backend": (str, None),
    "max_iter": (int, None), "conv_tol": (float, None), "conv_streak": (int, None),
    "escape_radius": (float, None), "pole_guard": (float, None),
    "seed": (float, 2),
    "sweep_root": (float, None), "beta": (float, None), "kappas": (float, -1), "sweep_out": (str, None),
    "t0": (float, None), "ratio": (float, None), "n_steps": (int, None), "order": (int, None),
    "root": (float, None), "epsilon": (float, None), "n": (int, None), "rng_seed": (int, None),
    "quadrant": (bool, None), "witness_out": (str, None), "claim": (str, None),
}

_COMMAND_KEYS = {
    "render": {"coeffs", "factored", "window", "size", "out", "workers", "backend", "max_iter", "conv_tol",
               "conv_streak", "escape_radius", "pole_guard"},
    "orbit": {"coeffs", "factored", "seed", "out", "max_iter", "conv_tol", "conv_streak", "escape_radius",
              "pole_guard"},
    "focal": {"coeffs", "factored", "sweep_root", "beta", "kappas", "sweep_out", "t0", "ratio", "n_steps", "order"},
    "parity": {"coeffs", "factored", "root", "epsilon", "n", "rng_seed", "quadrant", "out", "witness_out",
               "backend", "max_iter", "conv_tol", "conv_streak", "escape_radius", "pole_guard"},
    "verify": {"coeffs", "factored", "claim", "rng_seed"},
}


def _convert(key: str, raw):
    conv, arity = _FIELDS[key]
    try:
        if conv is bool:
            if isinstance(raw, bool):
                return raw
            low = str(raw).lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if arity is None:
            return conv(raw)
        items = raw.split() if isinstance(raw, str) else list(raw)
        vals = [conv(v) for v in items]
    except ValueError:
        raise UsageError(f"bad value for {key}: {raw!r}") from None
    if arity > 0 and len(vals) != arity:
        raise UsageError(f"{key} needs {arity} values, got {len(vals)}")
    return vals


def merge(cmd: str, args: argparse.Namespace) -> dict:
    """Config values overlaid by the flags the user actually gave."""
    cfg = read_config(args.config) if args.config else {}
    allowed = _COMMAND_KEYS[cmd]
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise UsageError(f"unknown config key(s) for {cmd}: {', '.join(unknown)}")
    merged = {k: _convert(k, v) for k, v in cfg.items()}
    for k in allowed:
        v = getattr(args, k, None)
        if v is not None and v is not False:
            merged[k] = _convert(k, v)
    return merged


def _polynomial(cfg):
    if "coeffs" in cfg and "factored" in cfg:
        raise UsageError("give either coeffs or factored, not both")
    try:
        if "coeffs" in cfg:
            return parse_polynomial("coeffs: " + cfg["coeffs"])
        if "factored" in cfg:
            return parse_polynomial("factored: " + cfg["factored"])
    except PolynomialError as exc:
        raise UsageError(f"invalid polynomial: {exc}") from None
    raise UsageError("a polynomial is required (--coeffs or --factored)")


def _limits(cfg, base: Limits) -> Limits:
    kw = {k: cfg[k] for k in ("max_iter", "conv_tol", "conv_streak", "escape_radius", "pole_guard") if k in cfg}
    try:
        lim = base.with_(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if lim.max_iter < 1 or lim.conv_streak < 1:
        raise UsageError("max_iter and conv_streak must be positive")
    if not (lim.conv_tol > 0 and lim.escape_radius > 0 and lim.pole_guard >= 0):
        raise UsageError("conv_tol and escape_radius must be positive, pole_guard non-negative")
    return lim


def _backend(cfg):
    b = cfg.get("backend")
    if b in (None, "auto"):
        return None
    if b not in ("cython", "numpy"):
        raise UsageError(f"backend must be auto, cython or numpy, got {b!r}")
    if b == "cython" and kernels.compiled is None:
        raise UsageError("the compiled kernel is not available in this build")
    return b


def _find_root(p, alpha, what):
    for i, r in enumerate(p.roots):
        if abs(r.alpha - alpha) <= 1e-9 * max(1.0, abs(alpha)):
            return i
    raise UsageError(f"{what} {alpha} is not a known real root of the polynomial")


@contextlib.contextmanager
def _output(path, mode="w"):
    if path in (None, "-"):
        yield sys.stdout
        return
    try:
        fh = open(path, mode, newline="" if "b" not in mode else None)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None
    with fh:
        yield fh


def prepare_render(cfg):
    p = _polynomial(cfg)
    win = cfg.get("window", [-3.0, 3.0, -3.0, 3.0])
    size = cfg.get("size", [300, 300])
    try:
        w = basin.Window(win[0], win[1], win[2], win[3], size[0], size[1])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    workers = cfg.get("workers")
    if workers is not None and workers < 1:
        raise UsageError("workers must be >= 1")
    if workers is None:
        try:
            workers = basin.default_workers()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return p, w, _limits(cfg, BASIN_LIMITS), workers, _backend(cfg), cfg.get("out", "basin.ppm")


def cmd_render(cfg) -> int:
    p, w, lim, workers, backend, out = prepare_render(cfg)
    g = basin.render_basin(p, w, lim, workers, backend)
    basin.write_image(g, out)
    hist = ", ".join(f"{k}={v}" for k, v in sorted(g.histogram().items()))
    print(f"wrote {out} ({w.width}x{w.height}): {hist}")
    return EXIT_OK


def cmd_orbit(cfg) -> int:
    p = _polynomial(cfg)
    if "seed" not in cfg:
        raise UsageError("orbit needs --seed X Y")
    x, y = cfg["seed"]
    if not (math.isfinite(x) and math.isfinite(y)):
        raise UsageError("seed must be finite")
    lim = _limits(cfg, Limits())
    res = iterate_orbit(p, (x, y), lim, keep_trace=True)
    out = cfg.get("out")
    with _output(out) as fh:
        write_trace_csv(res, fh)
    msg = f"{res.label} after {res.iterations} iterations"
    print(msg, file=sys.stderr if out in (None, "-") else sys.stdout)
    return EXIT_OK


def focal_table(p) -> str:
    rows = [("point", "kind", "prefocal line", "det")]
    for fp in focal.focal_points(p):
        x, y = fp.location
        rows.append((f"({x:g}, {y:g})", fp.kind.value, f"x = {fp.prefocal_x:g}", f"{fp.determinant:.3e}"))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    return "\n".join("  ".join(c.ljust(wd) for c, wd in zip(r, widths)).rstrip() for r in rows)


def kappa_sweep(p, alpha_index, kappas, schedule, beta_index=None):
    """Rows ``(kappa, closed form, numeric, abs err)``.

    Without ``beta`` the probe is the slope ``-1`` curve through ``(alpha, alpha)``;
    with it, the slope ``0`` curve through ``(alpha, beta)``.  Singular
    curvatures give ``inf`` entries.
    """
    root = p.roots[alpha_index]
    rows = []
    for k in kappas:
        if beta_index is None:
            base = (root.alpha, root.alpha)
            spec = focal.CurveSpec(-1.0, k, 0.0, 0.0, base)
            try:
                if root.multiplicity % 2:
                    closed = root.alpha
                else:
                    closed = focal.curvature_to_landing(focal.LandingMap(root), k)
            except focal.SingularCurvature:
                closed = math.inf
        else:
            beta = p.roots[beta_index].alpha
            spec = focal.CurveSpec(0.0, k, 0.0, 0.0, (root.alpha, beta))
            try:
                closed = focal.mixed_focal_landing(p, root.alpha, beta, k).y
            except focal.SingularCurvature:
                closed = math.inf
        try:
            num = focal.numeric_curve_limit(p, spec, schedule).point.y
        except focal.Divergent:
            num = math.inf
        err = 0.0 if math.isinf(closed) and math.isinf(num) else abs(closed - num)
        rows.append((k, closed, num, err))
    return rows


def cmd_focal(cfg) -> int:
    p = _polynomial(cfg)
    try:
        schedule = focal.Schedule(cfg.get("t0", 1e-2), cfg.get("ratio", 0.5), cfg.get("n_steps", 10),
                                  cfg.get("order", 4))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sweep = None
    if "sweep_root" in cfg:
        ai = _find_root(p, cfg["sweep_root"], "sweep root")
        if p.roots[ai].multiplicity < 2:
            raise UsageError("the sweep root must be a multiple root")
        bi = None
        if "beta" in cfg:
            bi = _find_root(p, cfg["beta"], "beta")
            if p.roots[ai].multiplicity != 2 or p.roots[bi].multiplicity != 1:
                raise UsageError("a mixed sweep needs a double root and a simple beta")
        sweep = (ai, bi, cfg.get("kappas", [-3.0, -0.5, 0.0, 1.0, 4.0]))
    print(focal_table(p))
    if sweep is not None:
        rows = kappa_sweep(p, sweep[0], sweep[2], schedule, sweep[1])
        out = cfg.get("sweep_out")
        if out in (None, "-"):
            print()
        with _output(out) as fh:
            fh.write("kappa,closed_form,numeric,abs_err\n")
            for r in rows:
                fh.write(",".join(repr(float(v)) for v in r) + "\n")
    return EXIT_OK


def cmd_parity(cfg) -> int:
    p = _polynomial(cfg)
    if "root" in cfg:
        idx = _find_root(p, cfg["root"], "root")
    else:
        multi = [i for i, r in enumerate(p.roots) if r.multiplicity > 1]
        if not multi:
            raise UsageError("the polynomial has no multiple root; give --root")
        idx = multi[0]
    if p.roots[idx].multiplicity < 2:
        raise UsageError("parity runs need a multiple root")
    eps = cfg.get("epsilon", 1e-3)
    n = cfg.get("n", 10_000)
    if not (eps > 0 and math.isfinite(eps)) or n < 1:
        raise UsageError("need epsilon > 0 and n >= 1")
    lim = _limits(cfg, Limits())
    backend = _backend(cfg)
    rep = basin.parity_experiment(p, idx, eps, n, cfg.get("rng_seed", 0), cfg.get("quadrant", False), lim, backend)
    out = cfg.get("out")
    with _output(out) as fh:
        rep.write_counts_csv(fh)
    wout = cfg.get("witness_out")
    if wout is None and out in (None, "-"):
        print()
    if wout is not None or out in (None, "-"):
        with _output(wout) as fh:
            rep.write_witness_csv(fh)
    summary = (f"root {rep.root.alpha:g} (d={rep.root.multiplicity}): {rep.samples} seeds, "
               f"{100 * rep.fraction(f'converged({idx})'):.2f}% to the root, {len(rep.witness_seeds)} witnesses")
    print(summary, file=sys.stderr if out in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_verify(cfg) -> int:
    results = verify.default_suite(cfg.get("rng_seed", 0))
    if "claim" in cfg:
        if "coeffs" not in cfg:
            raise UsageError("claims are checked against --coeffs")
        try:
            coeffs = [float(t) for t in cfg["coeffs"].split()]
            claims = [(a, int(d)) for a, d in verify_claims(cfg["claim"])]
        except ValueError as exc:
            raise UsageError(f"bad claim or coefficients: {exc}") from None
        results.append(verify.check_root_claims(coeffs, claims))
    elif "coeffs" in cfg or "factored" in cfg:
        p = _polynomial(cfg)
        results.append(verify.check_root_claims(p.coeffs, [(r.alpha, r.multiplicity) for r in p.roots]))
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return EXIT_VERIFY if failed else EXIT_OK


def verify_claims(text: str):
    from .polycore import _FACTOR_RE

    pairs = [(float(a), float(d)) for a, d in _FACTOR_RE.findall(text)]
    if not pairs or any(d != int(d) or d < 1 for _, d in pairs):
        raise ValueError(f"expected '(alpha d)...' with positive integer d, got {text!r}")
    return pairs


_COMMANDS = {"render": cmd_render, "orbit": cmd_orbit, "focal": cmd_focal, "parity": cmd_parity,
             "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="secant-dyn", description="Dynamics of the secant map on the real plane.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, limits=True):
        sp.add_argument("--config", help="key = value file; flags override it")
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--coeffs", help='coefficients a0 .. ak, e.g. "-1 0 1"')
        g.add_argument("--factored", help='factored form, e.g. "(-2 1)(0 1)(1 2)" plus optional residual coeffs')
        if limits:
            sp.add_argument("--max-iter", dest="max_iter")
            sp.add_argument("--conv-tol", dest="conv_tol")
            sp.add_argument("--conv-streak", dest="conv_streak")
            sp.add_argument("--escape-radius", dest="escape_radius")
            sp.add_argument("--pole-guard", dest="pole_guard")

    sp = sub.add_parser("render", help="basin image (PPM, or PNG by extension)")
    common(sp)
    sp.add_argument("--window", nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    sp.add_argument("--size", nargs=2, metavar=("W", "H"))
    sp.add_argument("--out", "-o")
    sp.add_argument("--workers")
    sp.add_argument("--backend", help="auto, cython or numpy")

    sp = sub.add_parser("orbit", help="CSV trace of one orbit")
    common(sp)
    sp.add_argument("--seed", nargs=2, metavar=("X", "Y"))
    sp.add_argument("--out", "-o")

    sp = sub.add_parser("focal", help="focal point table and curvature sweep")
    common(sp, limits=False)
    sp.add_argument("--sweep-root", dest="sweep_root")
    sp.add_argument("--beta", help="simple root for the slope 0 sweep through (alpha, beta)")
    sp.add_argument("--kappas", nargs="+")
    sp.add_argument("--sweep-out", dest="sweep_out")
    sp.add_argument("--t0")
    sp.add_argument("--ratio")
    sp.add_argument("--n-steps", dest="n_steps")
    sp.add_argument("--order")

    sp = sub.add_parser("parity", help="random seeds near (alpha, alpha) and witness seeds")
    common(sp)
    sp.add_argument("--root")
    sp.add_argument("--epsilon")
    sp.add_argument("-n", dest="n")
    sp.add_argument("--rng-seed", dest="rng_seed")
    sp.add_argument("--quadrant", action="store_true", default=None)
    sp.add_argument("--out", "-o")
    sp.add_argument("--witness-out", dest="witness_out")
    sp.add_argument("--backend")

    sp = sub.add_parser("verify", help="run the identity suites")
    common(sp, limits=False)
    sp.add_argument("--claim", help='root claims "(alpha d)..." checked against --coeffs')
    sp.add_argument("--rng-seed", dest="rng_seed")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if not args.command:
            raise UsageError(ap.format_usage().strip())
        cfg = merge(args.command, args)
        return _COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
