"""Small optimization helpers shared by several modules."""

import numpy as np

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def project_simplex(v):
    """Euclidean projection onto the probability simplex (sort and threshold)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def golden_max(f, a, b, tol=1e-10, max_iter=200):
    """Maximize a unimodal function on ``[a, b]`` by golden-section search.

    Returns:
        ``(x, f(x))`` at the best point evaluated.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc >= fd else (d, fd)
    for _ in range(max_iter):
        if abs(b - a) <= tol * (1.0 + abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            if fc > best[1]:
                best = (c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            if fd > best[1]:
                best = (d, fd)
    return best


def simplex_grid(k, steps):
    """All points of the simplex in ``k`` dimensions with denominator ``steps``."""
    if k == 1:
        return np.ones((1, 1))
    pts = []

    def rec(prefix, remaining, left):
        if left == 1:
            pts.append(prefix + [remaining])
            return
        for i in range(remaining + 1):
            rec(prefix + [i], remaining - i, left - 1)

    rec([], steps, k)
    return np.array(pts, dtype=float) / steps
