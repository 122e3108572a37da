"""Vectorised numpy implementation of the batch orbit kernel.

Used when the compiled extension is unavailable.  The floating-point operations
are issued in the same order as in ``_kernels.pyx`` so both back ends classify
every seed identically.
"""

import numpy as np

NAME = "numpy"


def classify_seeds(xs, ys, alphas, mults, residual, max_iter, conv_tol, conv_streak, escape_radius, pole_guard):
    """Classify each seed; returns ``(codes int16, iterations int32)``.

    Codes follow :mod:`secant_dyn.secmap`: a root index, or -1 near pole,
    -2 escaped, -3 non-convergent.
    """
    x = np.array(xs, dtype=np.float64, copy=True).ravel()
    y = np.array(ys, dtype=np.float64, copy=True).ravel()
    n = x.size
    alphas = np.asarray(alphas, dtype=np.float64)
    mults = np.asarray(mults, dtype=np.int64)
    residual = np.asarray(residual, dtype=np.float64)
    nroots = alphas.size

    codes = np.full(n, -3, dtype=np.int16)
    iters = np.full(n, max_iter, dtype=np.int32)
    active = np.ones(n, dtype=bool)

    for i in range(nroots):
        hit = active & (x == alphas[i]) & (y == alphas[i])
        codes[hit] = i
        iters[hit] = 0
        active &= ~hit

    last = _match(x, y, alphas, conv_tol)
    streak = (last >= 0).astype(np.int64)
    hit = active & (streak >= conv_streak)
    codes[hit] = last[hit]
    iters[hit] = 0
    active &= ~hit

    idx = np.nonzero(active)[0]
    x, y, last, streak = x[idx], y[idx], last[idx], streak[idx]
    with np.errstate(all="ignore"):
        for it in range(1, max_iter + 1):
            if idx.size == 0:
                break
            py, q, qa = _eval(x, y, alphas, mults, residual)
            root_hit = py == 0.0
            pole = ~root_hit & (np.abs(q) <= pole_guard * qa)
            ynew = np.where(root_hit, y, y - py / np.where(pole, 1.0, q))
            esc = ~root_hit & ~pole & ~(np.abs(ynew) <= escape_radius)
            x, y = y, ynew
            cur = _match(x, y, alphas, conv_tol)
            streak = np.where(cur >= 0, np.where(cur == last, streak + 1, 1), 0)
            last = cur
            conv = ~pole & ~esc & (streak >= conv_streak)

            codes[idx[pole]] = -1
            codes[idx[esc]] = -2
            codes[idx[conv]] = last[conv]
            stop = pole | esc | conv
            iters[idx[stop]] = it
            keep = ~stop
            idx, x, y, last, streak = idx[keep], x[keep], y[keep], last[keep], streak[keep]
    return codes, iters


def _match(x, y, alphas, tol):
    out = np.full(x.shape, -1, dtype=np.int64)
    for i in range(alphas.size - 1, -1, -1):
        ok = (np.abs(x - alphas[i]) <= tol) & (np.abs(y - alphas[i]) <= tol)
        out[ok] = i
    return out


def _eval(x, y, alphas, mults, residual):
    ax = np.abs(x)
    ay = np.abs(y)
    py = np.zeros_like(y)
    for c in residual[::-1]:
        py = py * y + c
    qm = np.zeros_like(x)
    qma = np.zeros_like(x)
    yp = np.ones_like(y)
    ypa = np.ones_like(y)
    q = np.zeros_like(x)
    qa = np.zeros_like(x)
    for c in residual[1:]:
        qm = qm * x + yp
        qma = qma * ax + ypa
        yp = yp * y
        ypa = ypa * ay
        q = q + c * qm
        qa = qa + abs(c) * qma
    for a, d in zip(alphas, mults):
        u = x - a
        v = y - a
        au = np.abs(u)
        av = np.abs(v)
        qf = np.zeros_like(x)
        qfa = np.zeros_like(x)
        up = np.ones_like(x)
        vp = np.ones_like(x)
        vpa = np.ones_like(x)
        for _ in range(d):
            qf = qf * u + vp
            qfa = qfa * au + vpa
            up = up * u
            vp = vp * v
            vpa = vpa * av
        q = up * q + qf * py
        qa = np.abs(up) * qa + qfa * np.abs(py)
        py = py * vp
    return py, q, qa
