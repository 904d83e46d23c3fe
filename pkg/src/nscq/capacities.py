"""Renyi capacities of classical-quantum channels and critical rates.

The order-``alpha`` Renyi capacity is ``C_alpha = sup_p C_alpha(p, W)`` with
the closed form

    C_alpha(p, W) = -(alpha / (1 - alpha)) log tr (sum_x p(x) W_x^alpha)^(1/alpha).

For ``alpha`` in ``(0, 1)`` the trace is a convex function of ``p``, so the
capacity is a convex minimization over the simplex; the Frank-Wolfe gap
gives a certificate of accuracy.
"""

import functools
from dataclasses import dataclass

import numpy as np

from . import herm
from ._optim import golden_max, project_simplex, simplex_grid
from .errors import MalformedInputError, NumericalFailure


@dataclass
class CapacityResult:
    """Renyi capacity ``value`` at order ``alpha`` with maximizer ``argmax_p``
    and the optimal output state ``inner_sigma``."""

    alpha: float
    value: float
    argmax_p: np.ndarray
    inner_sigma: np.ndarray
    certificate: float = 0.0


@dataclass
class C0Result:
    """Zero-order capacity with an error estimate."""

    value: float
    error: float
    method: str
    argmax_p: np.ndarray = None


@dataclass
class CriticalRate:
    """Critical rate with its one-sided difference quotients."""

    value: float
    left: float
    right: float
    halving_error: float


@functools.lru_cache(maxsize=4096)
def _powers(channel, alpha):
    return np.stack([herm.frac_power(w, alpha) for w in channel.outputs])


def _log_trace_power(w, q):
    """``log sum_i w_i^q`` over the positive eigenvalues ``w``."""
    w = w[w > herm.support_threshold(w)]
    z = q * np.log(w)
    zm = z.max()
    return float(zm + np.log(np.sum(np.exp(z - zm))))


def _sibson_parts(p, channel, alpha, grad=False):
    wa = _powers(channel, alpha)
    s = np.einsum("x,xij->ij", p, wa)
    lam, u = herm.eigh(s)
    logg = _log_trace_power(lam, 1.0 / alpha)
    if not grad:
        return logg, None, lam, u
    on = lam > herm.support_threshold(lam)
    c = np.zeros_like(lam)
    c[on] = np.exp((1.0 / alpha - 1.0) * np.log(lam[on]) - logg)
    diag = np.einsum("ia,xij,ja->xa", u.conj(), wa, u).real
    return logg, (diag @ c) / alpha, lam, u


def _check_order(alpha):
    if not np.isfinite(alpha) or alpha <= 0 or alpha > 1:
        raise MalformedInputError(f"alpha={alpha} outside (0, 1]")


def holevo_quantity(p, channel):
    """``I(p, W) = sum_x p(x) D(W_x || pW)``."""
    p = np.asarray(p, dtype=float)
    return float(p @ _holevo_terms(p, channel))


def _entropies(channel):
    out = []
    for w in channel.outputs:
        lam = np.linalg.eigvalsh(w)
        lam = lam[lam > herm.support_threshold(lam)]
        out.append(-float(np.sum(lam * np.log(lam))))
    return np.array(out)


def _holevo_terms(p, channel, ent=None):
    """``D(W_x || pW)`` for every input ``x``."""
    ent = _entropies(channel) if ent is None else ent
    logavg = herm.log_on_support(channel.average_output(p))
    cross = np.einsum("xij,ji->x", channel.outputs, logavg).real
    return -ent - cross


def sibson_objective(p, channel, alpha):
    """``C_alpha(p, W)`` in closed form; ``alpha = 1`` gives the Holevo quantity."""
    _check_order(alpha)
    p = np.asarray(p, dtype=float)
    if alpha == 1:
        return holevo_quantity(p, channel)
    logg, _, _, _ = _sibson_parts(p, channel, alpha)
    return float(-alpha / (1.0 - alpha) * logg)


def sibson_sigma(p, channel, alpha):
    """Optimal output state ``(sum_x p W_x^alpha)^(1/alpha)``, normalized."""
    _check_order(alpha)
    if alpha == 1:
        return channel.average_output(p)
    s = np.einsum("x,xij->ij", np.asarray(p, dtype=float), _powers(channel, alpha))
    lam, u = herm.eigh(s)
    on = lam > herm.support_threshold(lam)
    f = np.zeros_like(lam)
    f[on] = np.exp((np.log(lam[on]) - np.log(lam[on]).max()) / alpha)
    sig = (u * f) @ u.conj().T
    return herm.hermitian(sig / np.trace(sig).real)


def _minimize_log_trace(channel, alpha, p0, tol, max_iter, memory=10):
    """Spectral projected gradient on ``log tr S(p)^(1/alpha)``.

    Barzilai-Borwein step lengths with a non-monotone Armijo line search.
    Returns ``(p, f, certificate)``.
    """
    p = project_simplex(p0)
    f, g, _, _ = _sibson_parts(p, channel, alpha, grad=True)
    scale = alpha / (1.0 - alpha)
    lam = 1.0 / max(np.abs(g).max(), 1e-12)
    history = [f]
    cert = np.inf
    for _ in range(max_iter):
        relgap = 1.0 / alpha - g.min()
        cert = scale * -np.log1p(-min(relgap, 1 - 1e-16)) if relgap > 0 else 0.0
        if cert <= tol:
            break
        d = project_simplex(p - lam * g) - p
        slope = g @ d
        if slope >= 0 or np.abs(d).max() < 1e-16:
            break
        fref = max(history[-memory:])
        t = 1.0
        for _ in range(60):
            q = p + t * d
            fq, gq, _, _ = _sibson_parts(q, channel, alpha, grad=True)
            if fq <= fref + 1e-4 * t * slope:
                break
            t *= 0.5
        else:
            break
        s_, y_ = q - p, gq - g
        sy = s_ @ y_
        lam = min(1e12, max(1e-12, (s_ @ s_) / sy)) if sy > 0 else 1e12
        if fq > f - 1e-16 * (1 + abs(f)) and np.abs(s_).max() < 1e-15:
            p, f, g = q, fq, gq
            break
        p, f, g = q, fq, gq
        history.append(f)
    return p, f, cert


def renyi_capacity(channel, alpha, starts=5, seed=0, tol=1e-11, max_iter=20000,
                   grid_check=True):
    """Renyi capacity ``C_alpha(W)`` for ``alpha`` in ``(0, 1]``.

    Spectral projected gradient on the convex function ``log tr S(p)^(1/alpha)``
    from ``starts`` points (uniform and Dirichlet samples). For at most three inputs a simplex grid search is
    run as a cross-check. ``alpha = 1`` delegates to :func:`holevo_capacity`.

    Returns:
        :class:`CapacityResult`; ``certificate`` bounds the optimality gap.
    """
    _check_order(alpha)
    if alpha == 1:
        return holevo_capacity(channel)
    k = channel.num_inputs
    rng = np.random.default_rng(seed)
    inits = [np.full(k, 1.0 / k)] + [rng.dirichlet(np.ones(k)) for _ in range(starts - 1)]
    if grid_check and k <= 3:
        grid = simplex_grid(k, 20)
        vals = [_sibson_parts(q, channel, alpha)[0] for q in grid]
        inits.append(grid[int(np.argmin(vals))])
    best = None
    for p0 in inits:
        p, f, cert = _minimize_log_trace(channel, alpha, p0, tol, max_iter)
        if best is None or f < best[1]:
            best = (p, f, cert)
    p, f, cert = best
    value = float(-alpha / (1.0 - alpha) * f)
    return CapacityResult(alpha, value, p, sibson_sigma(p, channel, alpha), cert)


@functools.lru_cache(maxsize=65536)
def _capacity_cached(channel, alpha):
    return renyi_capacity(channel, alpha)


def capacity_value(channel, alpha):
    """Cached ``C_alpha(W)`` value (``alpha`` in ``(0, 1]``)."""
    return _capacity_cached(channel, float(alpha)).value


def holevo_capacity(channel, tol=1e-11, max_iter=200000):
    """Holevo capacity by Blahut-Arimoto iteration.

    Stops when ``max_x D(W_x || pW) - I(p)``, an upper bound on the gap to
    the capacity, falls below ``tol``.
    """
    k = channel.num_inputs
    ent = _entropies(channel)
    p = np.full(k, 1.0 / k)
    for _ in range(max_iter):
        d = _holevo_terms(p, channel, ent)
        low = float(p @ d)
        gap = float(d.max()) - low
        if gap <= tol:
            break
        w = p * np.exp(d - d.max())
        p = w / w.sum()
    else:
        raise NumericalFailure(f"Blahut-Arimoto did not converge (gap {gap:.2e})")
    return CapacityResult(1.0, low, p, channel.average_output(p), gap)


def _support_projectors(channel):
    return np.stack([herm.support_projector(w) for w in channel.outputs])


def c0_support(channel, **solver_opts):
    """``C_0 = -log min_p lambda_max(sum_x p(x) Pi_x)`` with support projectors ``Pi_x``.

    This is the ``alpha -> 0`` limit of the closed form, computed as an SDP.
    """
    from .sdp import SdpBuilder, solve

    proj = _support_projectors(channel)
    k, d = channel.num_inputs, channel.dim
    bld = SdpBuilder()
    t = bld.add_block(1)
    ps = bld.add_blocks(1, k)
    s = bld.add_block(d)
    bld.add_objective(t, 1.0)
    terms = [(t, np.eye(d)), (s, -1.0)] + [(px, -proj[x]) for x, px in enumerate(ps)]
    bld.add_equality(terms, np.zeros((d, d)))
    bld.add_equality([(px, np.ones((1, 1))) for px in ps], 1.0)
    sol = solve(bld.build(), **solver_opts)
    if sol.status != "optimal":
        raise NumericalFailure(f"C0 program: solver status {sol.status}")
    p = np.array([sol.primal_point[px][0, 0].real for px in ps])
    p = project_simplex(p)
    lam = np.linalg.eigvalsh(np.einsum("x,xij->ij", p, proj))[-1]
    # lam <= 1 for a mixture of projectors; clip rounding and the -0.0 sign
    return max(0.0, float(-np.log(min(lam, 1.0)))) + 0.0, p


def c0_capacity(channel, method="support", alphas=(0.05, 0.02, 0.01, 0.005)):
    """Zero-order capacity ``C_0 = lim_{alpha -> 0} C_alpha``.

    Args:
        method: ``"support"`` solves the support-projector SDP;
            ``"extrapolate"`` fits a cubic in ``alpha`` through ``C_alpha`` at
            ``alphas`` and evaluates it at zero (Richardson extrapolation).

    Returns:
        :class:`C0Result`. For ``"extrapolate"`` the error estimate is the
        change between the cubic and the quadratic fit on the smallest
        three orders.
    """
    if method == "support":
        value, p = c0_support(channel)
        return C0Result(value, 1e-8, method, p)
    if method != "extrapolate":
        raise MalformedInputError(f"unknown method {method!r}")
    a = np.asarray(alphas, dtype=float)
    c = np.array([capacity_value(channel, x) for x in a])
    cubic = np.polyval(np.polyfit(a, c, len(a) - 1), 0.0)
    order = np.argsort(a)[:3]
    quad = np.polyval(np.polyfit(a[order], c[order], 2), 0.0)
    return C0Result(float(cubic), float(abs(cubic - quad)), method)


def _s_curve(channel, s):
    """``s C_{1/(1+s)}``."""
    return s * capacity_value(channel, 1.0 / (1.0 + s))


def critical_rate_old(channel, h=1e-3):
    """Derivative of ``s -> s C_{1/(1+s)}`` at ``s = 1`` by central differences.

    Returns:
        :class:`CriticalRate` with the one-sided quotients and the change of
        the central estimate when ``h`` is halved.
    """
    f0 = _s_curve(channel, 1.0)
    fp, fm = _s_curve(channel, 1.0 + h), _s_curve(channel, 1.0 - h)
    central = (fp - fm) / (2 * h)
    h2 = h / 2
    central2 = (_s_curve(channel, 1.0 + h2) - _s_curve(channel, 1.0 - h2)) / (2 * h2)
    return CriticalRate(float(central2), float((f0 - fm) / h), float((fp - f0) / h),
                        float(abs(central2 - central)))


def critical_rate_new(channel, grid=49):
    """``sup_{alpha in (0,1)} (1 - alpha)^2 C_alpha`` by grid plus golden-section search.

    The ``alpha -> 0`` limit ``C_0`` is included as a candidate.

    Returns:
        ``(value, alpha_star)``; ``alpha_star = 0`` when the limit wins.
    """
    f = lambda a: (1 - a) ** 2 * capacity_value(channel, a)  # noqa: E731
    alphas = np.linspace(0.0, 1.0, grid + 2)[1:-1]
    vals = np.array([f(a) for a in alphas])
    i = int(np.argmax(vals))
    lo = alphas[max(i - 1, 0)] if i > 0 else alphas[0] / 2
    hi = alphas[min(i + 1, len(alphas) - 1)]
    a_star, v_star = golden_max(f, lo, hi, tol=1e-8)
    if vals[i] > v_star:
        a_star, v_star = alphas[i], vals[i]
    c0 = c0_capacity(channel).value
    if c0 >= v_star:
        return float(c0), 0.0
    return float(v_star), float(a_star)
