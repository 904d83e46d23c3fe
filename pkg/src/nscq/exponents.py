"""Error exponents of activated non-signaling coding and finite-n bounds.

The exponent at rate ``r`` (nats per use) is

    E(r) = sup_{alpha in (0, 1]} ((1 - alpha) / alpha) (C_alpha - r),

infinite below ``C_0`` and zero above the Holevo capacity. This module
also provides the finite-blocklength achievability bound, a
constant-composition lower bound on the NS error, and the classical
reduction tools (Nussbaum-Szkola pairs, tilted distributions, Chebyshev
good sets) behind it.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import herm
from .capacities import (c0_capacity, capacity_value, critical_rate_new, holevo_capacity,
                         renyi_capacity, sibson_objective, sibson_sigma)
from .channels import (DEFAULT_MAX_DIM, enumerate_types, tensor_power, tensor_with_ideal_bit,
                       type_product_state)
from .divergences import augustin_information, renyi_mutual_info
from ._optim import golden_max
from .errors import InvariantViolation, MalformedInputError, ResourceLimitError
from .oneshot import eps_ns

LOG_ALPHA_MIN = np.log(1e-4)
# SDP error values at or below this level are reported as zero error
ZERO_ERROR_TOL = 1e-8


@dataclass
class ExponentPoint:
    """Exponent ``E`` at ``rate`` with the optimal order and input distribution."""

    rate: float
    E: float
    alpha_star: float
    p_star: np.ndarray


@dataclass
class ExponentCurve:
    """Exponent evaluated on a list of rates."""

    points: list

    @property
    def rates(self):
        return np.array([pt.rate for pt in self.points])

    @property
    def values(self):
        return np.array([pt.E for pt in self.points])


@dataclass
class ClassicalPair:
    """Pair of distributions on a common finite set (``q`` may be sub-normalized)."""

    p: np.ndarray
    q: np.ndarray


@dataclass
class TiltedFamily:
    """Tilted distributions ``v^x ~ (p^x)^alpha (q^x)^(1-alpha)`` for each input."""

    alpha: float
    v: list
    pairs: list


def eans_exponent(channel, r):
    """Error exponent of activated NS coding at rate ``r``.

    Returns:
        :class:`ExponentPoint`. ``E = inf`` (``alpha_star = 0``) when
        ``r < C_0`` and ``E = 0`` (``alpha_star = 1``) when ``r >= C``.
    """
    hol = holevo_capacity(channel)
    if r >= hol.value:
        return ExponentPoint(r, 0.0, 1.0, hol.argmax_p)
    c0 = c0_capacity(channel)
    if r < c0.value:
        return ExponentPoint(r, np.inf, 0.0, c0.argmax_p)

    def phi(u):
        a = np.exp(u)
        if a >= 1.0:
            return 0.0
        return (1 - a) / a * (capacity_value(channel, a) - r)

    u, val = golden_max(phi, LOG_ALPHA_MIN, 0.0, tol=1e-9)
    if val <= 0:
        return ExponentPoint(r, 0.0, 1.0, hol.argmax_p)
    a = float(np.exp(u))
    return ExponentPoint(r, float(val), a, renyi_capacity(channel, a).argmax_p)


def exponent_curve(channel, rates):
    """:func:`eans_exponent` on each rate."""
    return ExponentCurve([eans_exponent(channel, float(r)) for r in rates])


def achievability_bound(channel, n, r, alpha):
    """``min(1, exp(-n (1 - alpha)/alpha (C_alpha - r)))``.

    Upper bound on ``eps_NS(exp(n r), W^n (x) I_2)`` for any ``alpha`` in ``(0, 1]``.
    """
    if not 0 < alpha <= 1:
        raise MalformedInputError("alpha must lie in (0, 1]")
    if alpha == 1:
        return 1.0
    e = n * (1 - alpha) / alpha * (capacity_value(channel, alpha) - r)
    return float(min(1.0, np.exp(-e)))


def young_constant(alpha):
    """``kappa_alpha = alpha (1 - alpha)^((1 - alpha)/alpha)``."""
    return alpha * (1 - alpha) ** ((1 - alpha) / alpha)


def young_sup(c, alpha):
    """``sup_{s >= 0} s^(1 - alpha) c - s = kappa_alpha c^(1/alpha)`` in closed form,
    with maximizer ``s* = (1 - alpha)^(1/alpha) c^(1/alpha)``."""
    s_star = (1 - alpha) ** (1 / alpha) * c ** (1 / alpha)
    return young_constant(alpha) * c ** (1 / alpha), s_star


def nussbaum_szkola(rho, sigma, rho_eig=None, sigma_eig=None):
    """Nussbaum-Szkola pair ``p_ij = l_i |<a_i|b_j>|^2``, ``q_ij = m_j |<a_i|b_j>|^2``.

    Optional precomputed eigendecompositions ``(values, vectors)`` fix the
    index order. Entries are flattened with index ``i * d_sigma + j``.
    """
    lam, a = rho_eig if rho_eig is not None else herm.eigh(rho)
    mu, b = sigma_eig if sigma_eig is not None else herm.eigh(sigma)
    lam = np.clip(lam, 0.0, None)
    mu = np.clip(mu, 0.0, None)
    ov = np.abs(a.conj().T @ b) ** 2
    return ClassicalPair((lam[:, None] * ov).ravel(), (mu[None, :] * ov).ravel())


def product_pair(pairs):
    """Pair of product distributions, index order matching ``numpy.kron``."""
    p = np.ones(1)
    q = np.ones(1)
    for pr in pairs:
        p = np.kron(p, pr.p)
        q = np.kron(q, pr.q)
    return ClassicalPair(p, q)


def tilted(pair, alpha):
    """``v ~ p^alpha q^(1 - alpha)``, normalized."""
    with np.errstate(divide="ignore"):
        lw = alpha * np.log(pair.p) + (1 - alpha) * np.log(pair.q)
    lw = np.where(np.isfinite(lw), lw, -np.inf)
    m = lw.max()
    v = np.exp(lw - m)
    return v / v.sum()


def tilted_family(pairs, alpha):
    """:class:`TiltedFamily` for a list of Nussbaum-Szkola pairs."""
    return TiltedFamily(alpha, [tilted(pr, alpha) for pr in pairs], list(pairs))


def kl(v, p):
    """``D(v || p) = sum v log(v / p)``; ``inf`` if ``v`` is not dominated by ``p``."""
    v, p = np.asarray(v, float), np.asarray(p, float)
    on = v > 0
    if np.any(p[on] <= 0):
        return np.inf
    return float(np.sum(v[on] * np.log(v[on] / p[on])))


def var_div(v, p):
    """Variance of ``log(p / v)`` under ``v``: ``sum v (log(p/v) + D(v||p))^2``."""
    v, p = np.asarray(v, float), np.asarray(p, float)
    on = v > 0
    d = kl(v, p)
    if not np.isfinite(d):
        return np.inf
    return float(np.sum(v[on] * (np.log(p[on] / v[on]) + d) ** 2))


def good_set_mass(v, p, counts, max_outcomes=1_000_000):
    """Exact ``v``-mass of the Chebyshev good set for a product of ``n`` symbols.

    The good set is ``{log(p^n / v^n) >= -sum_x n_x D(v^x||p^x) - sqrt(4 sum_x n_x Var_x)}``,
    which has mass at least ``3/4`` by Chebyshev's inequality.

    Args:
        v, p: one distribution pair (arrays), or lists of per-input pairs.
        counts: ``n`` for a single pair, or the composition ``(n_x)``.

    Raises:
        InvariantViolation: if the mass is below ``3/4``.
    """
    if np.ndim(v[0]) == 0:
        v, p, counts = [v], [p], [int(counts)]
    counts = list(getattr(counts, "counts", counts))
    factors = []
    for vx, px, c in zip(v, p, counts):
        vx, px = np.asarray(vx, float), np.asarray(px, float)
        on = vx > 0
        factors += [(vx[on], px[on])] * int(c)
    size = int(np.prod([len(f[0]) for f in factors])) if factors else 1
    if size > max_outcomes:
        raise ResourceLimitError(f"{size} outcomes exceed enumeration cap")
    mean = sum(c * kl(vx, px) for vx, px, c in zip(v, p, counts))
    var = sum(c * var_div(vx, px) for vx, px, c in zip(v, p, counts))
    thr = -mean - np.sqrt(4 * var)
    logv = np.zeros(1)
    logr = np.zeros(1)
    for vx, px in factors:
        logv = (logv[:, None] + np.log(vx)[None, :]).ravel()
        logr = (logr[:, None] + np.log(px / vx)[None, :]).ravel()
    good = logr >= thr - 1e-12 * (1 + abs(thr))
    mass = float(np.exp(logv[good]).sum())
    if mass < 0.75 - 1e-9:
        raise InvariantViolation(f"good-set mass {mass} below 3/4")
    return mass


def spb_saddle(channel, t, r):
    """Saddle point of ``sup_sigma inf_alpha ((1-alpha)/alpha)(r - E_t D_alpha(W_x || sigma))``.

    For each order the inner problem is the Augustin mean
    ``inf_sigma sum_x t(x) D_alpha(W_x || sigma)``; the order is optimized by
    golden-section search.

    Returns:
        ``(alpha, sigma, E)`` with
        ``E = sup_alpha ((1-alpha)/alpha)(inf_sigma E_t D_alpha(W_x || sigma) - r)``.
    """
    t = np.asarray(t, dtype=float)
    if r >= sibson_objective(t, channel, 1.0):
        return 1.0, channel.average_output(t), 0.0

    warm = {}

    def phi(u):
        a = np.exp(u)
        val, warm[u] = augustin_information(channel.outputs, t, a,
                                            sigma0=warm.get("last"))
        warm["last"] = warm[u]
        return (1 - a) / a * (val - r)

    u, val = golden_max(phi, LOG_ALPHA_MIN, np.log(1 - 1e-9), tol=1e-9)
    return float(np.exp(u)), warm[u], float(val)


def _sup_over_s(f):
    """``max(0, sup_{s > 0} f(s))`` for ``f`` concave with ``f(0) = 0``."""
    u, val = golden_max(lambda u_: f(np.exp(u_)), -50.0, 50.0, tol=1e-10)
    return max(0.0, val), (float(np.exp(u)) if val > 0 else 0.0)


@dataclass
class SpbBound:
    """Finite-n lower bound with per-type details."""

    value: float
    quantum_route: float
    classical_route: float
    per_type: list = field(default_factory=list)


def spb_finite_n_lower(channel, n, r, sigma=None, alpha=None, eta=0.05):
    """Constant-composition lower bound on ``eps_NS(exp(n r), W^n (x) I_2)``.

    For every type ``T`` the bound ``gamma_n tr(W_T^n ^ M s sigma^n) - s`` with
    ``gamma_n = (n + 1)^(-|X|) / 2`` is maximized over ``s >= 0``; the result is
    the minimum over types. Two routes are evaluated per type: the operator
    trace directly, and its classical Nussbaum-Szkola lower estimate
    ``sum min(p, M s q) / 2``; each is a valid bound and the larger is kept.

    Args:
        sigma: output state used for every type; by default the saddle-point
            state at rate ``r + eta`` for that type.
        alpha: if given (and ``sigma`` is not), use the optimal state at this order.
        eta: rate offset used to pick the saddle-point state.

    Returns:
        :class:`SpbBound`.
    """
    k = channel.num_inputs
    m = np.exp(n * r)
    gamma = 0.5 * (n + 1.0) ** (-k)
    per_type = []
    for t in enumerate_types(n, k):
        dist = t.distribution
        if sigma is not None:
            sig = herm.density(sigma)
        elif alpha is not None:
            sig = sibson_sigma(dist, channel, alpha)
        else:
            sig = spb_saddle(channel, dist, r + eta)[1]
        a = type_product_state(channel, t)
        b = herm.kron_all([sig] * n)
        quantum, _ = _sup_over_s(lambda s: gamma * herm.trace_ncmin(a, m * s * b) - s)
        sig_eig = herm.eigh(sig)
        pairs = [nussbaum_szkola(channel.outputs[x], sig, sigma_eig=sig_eig)
                 for x in t.sequence()]
        prod = product_pair(pairs)
        classical, _ = _sup_over_s(
            lambda s: gamma * 0.5 * np.minimum(prod.p, m * s * prod.q).sum() - s)
        per_type.append((t.counts, quantum, classical))
    qv = min(x[1] for x in per_type)
    cv = min(x[2] for x in per_type)
    value = min(max(x[1], x[2]) for x in per_type)
    return SpbBound(value, qv, cv, per_type)


def ns_no_activation_bound(channel, m, alpha):
    """Upper bound on ``eps_NS(m, W)`` without activation, for ``alpha`` in ``(0, 1)``.

    ``(2m)^((1-a)/a) exp(-((1-a)/a) C_a) + (2/m) exp(-(1-a) C_a)``; the
    infimum over input distributions is attained at the capacity-achieving one.
    """
    if not 0 < alpha < 1:
        raise MalformedInputError("alpha must lie in (0, 1)")
    c = capacity_value(channel, alpha)
    s = (1 - alpha) / alpha
    return float((2 * m) ** s * np.exp(-s * c) + (2.0 / m) * np.exp(-(1 - alpha) * c))


def no_activation_exponent(channel, r, grid=200):
    """Exponent of :func:`ns_no_activation_bound` with ``m = exp(n r)``.

    ``sup_alpha min(((1-a)/a)(C_a - r), r + (1 - a) C_a)``; it coincides with
    the activated exponent for rates above ``sup_a (1 - a)^2 C_a``.
    """
    def f(u):
        a = np.exp(u)
        c = capacity_value(channel, a)
        return min((1 - a) / a * (c - r), r + (1 - a) * c)

    us = np.linspace(LOG_ALPHA_MIN, np.log(0.999), grid)
    vals = np.array([f(u) for u in us])
    i = int(np.argmax(vals))
    lo, hi = us[max(i - 1, 0)], us[min(i + 1, grid - 1)]
    u, v = golden_max(f, lo, hi, tol=1e-10)
    return float(max(v, vals[i], 0.0))


@dataclass
class PureStateReport:
    """Outcome of :func:`pure_state_check`."""

    critical_rate_new: float
    alpha_star: float
    c0: float
    schatten_max_error: float
    holds: bool


def pure_state_check(channel, alphas=(0.1, 0.3, 0.5, 0.7, 0.9), tol=1e-4, seed=0):
    """Check ``sup_a (1-a)^2 C_a <= C_0`` and the Schatten-norm identity for pure outputs.

    The identity is ``(1 - a) C_a(p, W) = -log || sum_x p(x) W_x ||_{1/a}``.
    """
    for w in channel.outputs:
        ev = np.linalg.eigvalsh(w)
        if len(ev) > 1 and ev[-2] > 1e-8:
            raise MalformedInputError("channel outputs are not pure")
    rc, a_star = critical_rate_new(channel)
    c0 = c0_capacity(channel).value
    rng = np.random.default_rng(seed)
    err = 0.0
    for p in [np.full(channel.num_inputs, 1.0 / channel.num_inputs),
              rng.dirichlet(np.ones(channel.num_inputs))]:
        avg = channel.average_output(p)
        for a in alphas:
            lhs = (1 - a) * sibson_objective(p, channel, a)
            rhs = -np.log(herm.schatten_norm(avg, 1.0 / a))
            err = max(err, abs(lhs - rhs))
    return PureStateReport(rc, a_star, c0, err, rc <= c0 + tol)


def quantum_achievability(choi, r, alpha, starts=3, seed=0):
    """``sup_rho ((1-a)/a) (I_a(sqrt(rho) J sqrt(rho) || rho) - r)`` for a Choi channel.

    The inner minimization over the output state uses
    :func:`~nscq.divergences.renyi_mutual_info` in closed form; the outer maximization over
    ``rho = exp(H) / tr exp(H)`` is an L-BFGS search (finite-difference gradients) from the maximally
    mixed state and random starts. It is a lower bound on the supremum.

    Returns:
        ``(value, rho_R)``.
    """
    if not 0 < alpha < 1:
        raise MalformedInputError("alpha must lie in (0, 1)")
    da, db = choi.dim_in, choi.dim_out

    def to_rho(h):
        hm = np.zeros((da, da), dtype=complex)
        iu = np.triu_indices(da, 1)
        hm[np.diag_indices(da)] = h[:da]
        nu = len(iu[0])
        hm[iu] = h[da:da + nu] + 1j * h[da + nu:]
        hm = hm + np.triu(hm, 1).conj().T
        w, v = np.linalg.eigh(hm)
        e = np.exp(w - w.max())
        return herm.hermitian((v * (e / e.sum())) @ v.conj().T)

    def mutual(rho):
        sq = np.kron(herm.frac_power(rho, 0.5), np.eye(db))
        state = sq @ choi.choi @ sq
        return renyi_mutual_info(state, rho, (da, db), alpha, method="sibson")[0]

    rng = np.random.default_rng(seed)
    x0s = [np.zeros(da * da)] + [rng.standard_normal(da * da) for _ in range(starts - 1)]
    best = None
    for x0 in x0s:
        res = minimize(lambda h: -mutual(to_rho(h)), x0, method="L-BFGS-B",
                       options=dict(ftol=1e-13, gtol=1e-8, maxiter=500))
        if best is None or res.fun < best.fun:
            best = res
    rho = to_rho(best.x)
    val = mutual(rho)
    return float((1 - alpha) / alpha * (val - r)), rho


@dataclass
class SandwichRow:
    """One row of the exponent sandwich table."""

    n: int
    rate_nats: float
    sdp_value: float
    sdp_exponent: float
    achievability_bound: float
    ach_exponent_alpha_opt: float
    spb_lower: float
    eans_formula: float
    eta: float
    notes: str = ""


def exponent_sandwich(channel, r, n_max, eta=0.05, alpha_grid=None, max_dim=None):
    """Finite-n table: exact activated NS error versus the exponent bounds.

    For ``n = 1..n_max`` computes ``eps_NS(exp(n r), W^n (x) I_2)`` by SDP, the
    achievability bound minimized over ``alpha_grid``, and the
    constant-composition lower bound. Rows whose activated tensor power has
    ``|X|^n d^n`` above ``max_dim`` are marked ``skipped``.
    """
    max_dim = DEFAULT_MAX_DIM if max_dim is None else max_dim
    alpha_grid = np.linspace(0.01, 0.99, 99) if alpha_grid is None else np.asarray(alpha_grid)
    e_formula = eans_exponent(channel, r).E
    rows = []
    for n in range(1, n_max + 1):
        try:
            wn = tensor_with_ideal_bit(tensor_power(channel, n, max_dim=max_dim // 4))
        except ResourceLimitError:
            rows.append(SandwichRow(n, r, np.nan, np.nan, np.nan, np.nan, np.nan, e_formula,
                                    eta, "skipped"))
            continue
        m = float(np.exp(n * r))
        if m < 1:
            rows.append(SandwichRow(n, r, np.nan, np.nan, np.nan, np.nan, np.nan, e_formula,
                                    eta, "M<1"))
            continue
        val = eps_ns(m, wn)
        exps = [(1 - a) / a * (capacity_value(channel, a) - r) for a in alpha_grid]
        ach_exp = max(0.0, max(exps))
        ach = min(1.0, float(np.exp(-n * ach_exp)))
        spb = spb_finite_n_lower(channel, n, r, eta=eta).value
        notes = []
        if val <= ZERO_ERROR_TOL:
            sdp_exp = np.inf
            notes.append("zero-error")
        else:
            sdp_exp = -np.log(val) / n
        if spb > val + 1e-7:
            notes.append("lower-bound-violated")
        if val > ach + 1e-7:
            notes.append("upper-bound-violated")
        rows.append(SandwichRow(n, r, val, sdp_exp, ach, ach_exp, spb, e_formula, eta,
                                ";".join(notes)))
    return rows


def zero_error_activation_check(channel, n, r, n0, tol=1e-7):
    """Numerical check of removing activation with a zero-error prefix.

    With ``m = exp(n r)``, if ``eps_NS(2, W^n0) = 0`` then
    ``eps_NS(m, W^n (x) I_2) <= eps_NS(m, W^n) <= eps_NS(m, W^(n-n0) (x) I_2)``.

    Returns:
        Dict with the three errors, the zero-error value and a ``holds`` flag.
    """
    m = float(np.exp(n * r))
    zero = eps_ns(2, tensor_power(channel, n0))
    act = eps_ns(m, tensor_with_ideal_bit(tensor_power(channel, n)))
    plain = eps_ns(m, tensor_power(channel, n))
    shorter = eps_ns(m, tensor_with_ideal_bit(tensor_power(channel, n - n0))) if n > n0 else 1.0
    holds = act <= plain + tol and (zero > tol or plain <= shorter + tol)
    return dict(zero_error=zero, activated=act, plain=plain, shorter_activated=shorter,
                holds=holds)
