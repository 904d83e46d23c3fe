"""Quantum Renyi divergences, relative entropy and hypothesis testing.

All logarithms are natural. Supports are taken with the relative
eigenvalue cut-off ``herm.SUPPORT_TOL``; divergences that are infinite
by support mismatch return ``numpy.inf``.
"""

import numpy as np

from . import herm
from .errors import MalformedInputError, NumericalFailure


def _check_alpha(alpha, lo, hi, name):
    if not np.isfinite(alpha) or alpha <= lo or alpha > hi:
        raise MalformedInputError(f"{name}: alpha={alpha} outside ({lo}, {hi}]")


def _support_contained(rho, sigma, tol=1e-8):
    """True when ``supp rho`` lies inside ``supp sigma``."""
    p_rho = herm.support_projector(rho)
    p_sig = herm.support_projector(sigma)
    leak = np.trace(p_rho @ (np.eye(len(p_sig)) - p_sig)).real
    return leak <= tol


def _orthogonal(rho, sigma, tol=1e-8):
    """True when the supports of ``rho`` and ``sigma`` are orthogonal."""
    return np.trace(herm.support_projector(rho) @ herm.support_projector(sigma)).real <= tol


def umegaki(rho, sigma):
    """Relative entropy ``tr rho (log rho - log sigma)``, ``inf`` off support."""
    rho, sigma = herm.hermitian(rho), herm.hermitian(sigma)
    if not _support_contained(rho, sigma):
        return np.inf
    w = np.linalg.eigvalsh(rho)
    w = w[w > herm.support_threshold(w)]
    ent = float(np.sum(w * np.log(w)))
    cross = float(np.trace(rho @ herm.log_on_support(sigma)).real)
    return ent - cross


def petz_quasi(rho, sigma, alpha):
    """``Q_alpha = tr rho^alpha sigma^(1 - alpha)`` on supports."""
    return float(np.trace(herm.frac_power(rho, alpha) @ herm.frac_power(sigma, 1 - alpha)).real)


def petz(rho, sigma, alpha):
    """Petz Renyi divergence ``log(tr rho^a sigma^(1-a)) / (a - 1)``.

    Args:
        rho: density operator.
        sigma: positive semidefinite operator.
        alpha: order in ``(0, 2]``; ``alpha = 1`` gives :func:`umegaki`.

    Returns:
        The divergence in nats, ``inf`` when it diverges by support.
    """
    _check_alpha(alpha, 0.0, 2.0, "petz")
    if alpha == 1:
        return umegaki(rho, sigma)
    rho, sigma = herm.hermitian(rho), herm.hermitian(sigma)
    if alpha > 1 and not _support_contained(rho, sigma):
        return np.inf
    if alpha < 1 and _orthogonal(rho, sigma):
        return np.inf
    q = petz_quasi(rho, sigma, alpha)
    if q <= 0:
        return np.inf
    return float(np.log(q) / (alpha - 1))


def sandwiched(rho, sigma, alpha):
    """Sandwiched Renyi divergence, ``alpha >= 1/2``.

    ``log tr (sigma^s rho sigma^s)^alpha / (alpha - 1)`` with
    ``s = (1 - alpha) / (2 alpha)``; ``alpha = 1`` gives :func:`umegaki`.
    """
    if not np.isfinite(alpha) or alpha < 0.5:
        raise MalformedInputError(f"sandwiched: alpha={alpha} below 1/2")
    if alpha == 1:
        return umegaki(rho, sigma)
    rho, sigma = herm.hermitian(rho), herm.hermitian(sigma)
    if alpha > 1 and not _support_contained(rho, sigma):
        return np.inf
    if alpha < 1 and _orthogonal(rho, sigma):
        return np.inf
    s = (1 - alpha) / (2 * alpha)
    ss = herm.frac_power(sigma, s)
    mid = herm.hermitian(ss @ rho @ ss)
    w = np.clip(np.linalg.eigvalsh(mid), 0.0, None)
    q = float(np.sum(w ** alpha))
    if q <= 0:
        return np.inf
    return float(np.log(q) / (alpha - 1))


def hypothesis_testing(rho, sigma, eps, zero_tol=1e-8, **solver_opts):
    """Hypothesis-testing divergence ``-log min{tr sigma O : tr rho O >= 1 - eps}``.

    The minimum over tests ``0 <= O <= I`` is computed by SDP. Minimal
    type-II errors below ``zero_tol`` (the solver's resolution) are reported
    as an infinite divergence.
    """
    from .sdp import SdpBuilder, solve

    if not 0 <= eps < 1:
        raise MalformedInputError("eps must lie in [0, 1)")
    rho, sigma = herm.hermitian(rho), herm.hermitian(sigma)
    d = rho.shape[0]
    bld = SdpBuilder()
    o = bld.add_block(d)
    s = bld.add_block(d)
    t = bld.add_block(1)
    bld.add_objective(o, sigma)
    bld.add_equality([(o, "id"), (s, "id")], np.eye(d))
    bld.add_equality([(o, rho), (t, -np.ones((1, 1)))], 1.0 - eps)
    sol = solve(bld.build(), **solver_opts)
    if sol.status != "optimal":
        raise NumericalFailure(f"hypothesis_testing: solver status {sol.status}")
    val = sol.primal_value
    return np.inf if val <= zero_tol else float(-np.log(val))


def _power_derivative(w, v, beta, y):
    """Gradient of ``sigma -> tr(Y sigma^beta)`` at ``sigma = v diag(w) v^H``."""
    w = np.clip(w, 1e-300, None)
    wb = w ** beta
    dw = w[:, None] - w[None, :]
    close = np.abs(dw) <= 1e-12 * np.maximum(w[:, None], w[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        gam = np.where(close, beta * w[:, None] ** (beta - 1), (wb[:, None] - wb[None, :]) / dw)
    yt = v.conj().T @ y @ v
    return herm.hermitian(v @ (gam * yt) @ v.conj().T)


def _mirror_ascent(fun, sigma0, tol, max_iter, relative=True):
    """Maximize a concave function of a density matrix by entropic mirror ascent.

    ``fun(w, v)`` returns ``(value, gradient)`` at ``sigma = v diag(w) v^H``.
    Stops when the Frank-Wolfe gap ``lambda_max(grad) - tr(sigma grad)``,
    an upper bound on the suboptimality, is below ``tol`` (times the value
    when ``relative``), or when 20 consecutive steps make no progress.
    """
    w, v = herm.eigh(sigma0)
    w = np.clip(w, 1e-14, None)
    w /= w.sum()
    g, grad = fun(w, v)
    eta = 1.0 / max(np.abs(np.linalg.eigvalsh(grad)).max(), 1e-300)
    gap = np.inf
    stall = 0
    for _ in range(max_iter):
        gw = np.linalg.eigvalsh(grad)
        gap = gw[-1] - float(np.sum(w * np.einsum("ia,ij,ja->a", v.conj(), grad, v).real))
        if gap <= tol * (abs(g) if relative else 1.0):
            break
        logs = (v * np.log(w)) @ v.conj().T
        while True:
            wn, vn = herm.eigh(logs + eta * grad)
            wn = np.exp(wn - wn.max())
            wn /= wn.sum()
            wn = np.clip(wn, 1e-300, None)
            gn, gradn = fun(wn, vn)
            if gn >= g:
                break
            eta *= 0.5
            if eta < 1e-30:
                return w, v, g, gap
        # no measurable progress at the floating-point floor
        stall = stall + 1 if gn - g <= 1e-15 * max(1.0, abs(g)) else 0
        w, v, g, grad = wn, vn, gn, gradn
        if stall >= 20:
            break
        eta *= 1.5
    return w, v, g, gap


def renyi_mutual_info(rho_ab, tau_a, dims, alpha, starts=3, seed=0, tol=1e-10,
                      max_iter=20000, method="iterative"):
    """``I_alpha(rho_AB || tau_A) = inf_sigma D_alpha(rho_AB || tau_A (x) sigma_B)``.

    Petz divergence, ``alpha`` in ``(0, 1]``. Uses
    ``tr rho^a (tau (x) sigma)^(1-a) = tr Y sigma^(1-a)`` with
    ``Y = tr_A[rho^a (tau^(1-a) (x) I)]`` and maximizes the right-hand side,
    a concave function of ``sigma``, by mirror ascent from several starts.
    With ``method="sibson"`` the maximizer ``sigma ~ Y^(1/a)`` (Hoelder
    equality) is used instead, giving ``(a/(a-1)) log tr Y^(1/a)``.
    ``tau_A`` is used as given (not renormalized). At ``alpha = 1`` the
    minimizer is ``rho_B``.

    Args:
        rho_ab: state on ``A (x) B``.
        tau_a: positive operator on ``A``.
        dims: ``(dA, dB)``.
        alpha: Renyi order.
        starts: number of starting points (maximally mixed, ``rho_B``, random).
        method: ``"iterative"`` or ``"sibson"``.

    Returns:
        ``(value, sigma_B)``.
    """
    _check_alpha(alpha, 0.0, 1.0, "renyi_mutual_info")
    da, db = dims
    rho_ab = herm.hermitian(rho_ab)
    tau_a = herm.hermitian(tau_a)
    rho_b = herm.partial_trace(rho_ab, [da, db], [1])
    if alpha == 1:
        return umegaki(rho_ab, np.kron(tau_a, rho_b)), rho_b
    beta = 1 - alpha
    y = herm.partial_trace(herm.frac_power(rho_ab, alpha) @ np.kron(herm.frac_power(tau_a, beta),
                                                                    np.eye(db)),
                           [da, db], [1])
    y = herm.hermitian(y)
    if method == "sibson":
        w, v = herm.eigh(y)
        w = np.clip(w, 0.0, None)
        norm = float(np.sum(w ** (1 / alpha)))
        if norm <= 0:
            return np.inf, rho_b
        sigma = herm.hermitian((v * (w ** (1 / alpha) / norm)) @ v.conj().T)
        return float(alpha / (alpha - 1) * np.log(norm)), sigma
    if method != "iterative":
        raise MalformedInputError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    inits = [np.eye(db) / db, 0.5 * rho_b + 0.5 * np.eye(db) / db]
    while len(inits) < starts:
        inits.append(herm.random_density(db, rng))
    best = None
    def fun(w, v):
        val = float(np.trace(y @ ((v * w ** beta) @ v.conj().T)).real)
        return val, _power_derivative(w, v, beta, y)

    for s0 in inits[:starts]:
        w, v, g, _ = _mirror_ascent(fun, s0, tol * beta, max_iter)
        if best is None or g > best[0]:
            best = (g, (v * w) @ v.conj().T)
    g, sigma = best
    if g <= 0:
        return np.inf, herm.hermitian(sigma)
    return float(np.log(g) / (alpha - 1)), herm.hermitian(sigma)


def augustin_information(outputs, t, alpha, tol=1e-11, max_iter=20000, sigma0=None):
    """``inf_sigma sum_x t(x) D_alpha(W_x || sigma)`` for Petz divergences, ``alpha`` in ``(0, 1)``.

    The objective is convex in ``sigma``; it is minimized by mirror descent
    on ``sum_x t(x) log tr(W_x^alpha sigma^(1 - alpha))``, started from
    ``sigma0`` when given.

    Returns:
        ``(value, sigma)``.
    """
    _check_alpha(alpha, 0.0, 1.0 - 1e-15, "augustin_information")
    t = np.asarray(t, dtype=float)
    keep = [x for x in range(len(t)) if t[x] > 0]
    wa = [herm.frac_power(outputs[x], alpha) for x in keep]
    tw = t[keep]
    beta = 1 - alpha
    d = outputs[0].shape[0]

    def fun(w, v):
        sb = (v * w ** beta) @ v.conj().T
        qs = np.array([np.trace(a @ sb).real for a in wa])
        grad = sum(c / q * _power_derivative(w, v, beta, a) for c, q, a in zip(tw, qs, wa))
        return float(tw @ np.log(qs)), grad

    if sigma0 is None:
        avg = sum(c * outputs[x] for c, x in zip(tw, keep))
        sigma0 = 0.5 * avg + 0.5 * np.eye(d) / d
    w, v, g, _ = _mirror_ascent(fun, sigma0, tol * beta, max_iter,
                                relative=False)
    return float(g / (alpha - 1)), herm.hermitian((v * w) @ v.conj().T)
