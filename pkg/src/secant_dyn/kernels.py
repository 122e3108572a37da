"""Back-end selection for the batch orbit kernel.

The compiled extension is used when it imports; set ``SECANT_DYN_PURE=1`` to
force the numpy fallback.
"""

import os

from . import _fallback

fallback = _fallback
compiled = None
if os.environ.get("SECANT_DYN_PURE") != "1":
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None

active = compiled if compiled is not None else fallback
BACKEND = active.NAME


def kernel_args(p, limits):
    """Flatten a polynomial and limits into the kernel's positional arguments."""
    return (
        [r.alpha for r in p.roots],
        [r.multiplicity for r in p.roots],
        list(p.residual),
        int(limits.max_iter),
        float(limits.conv_tol),
        int(limits.conv_streak),
        float(limits.escape_radius),
        float(limits.pole_guard),
    )


def classify_seeds(p, xs, ys, limits, backend=None):
    """Batch classification of seeds ``(xs[i], ys[i])``; returns ``(codes, iterations)``."""
    mod = {None: active, "cython": compiled, "numpy": fallback}[backend]
    if mod is None:
        raise RuntimeError("compiled kernel is not available")
    return mod.classify_seeds(xs, ys, *kernel_args(p, limits))
