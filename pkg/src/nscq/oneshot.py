"""One-shot coding error under non-signaling (NS) and meta-converse (MC) assistance.

For ``M`` messages over a CQ channel ``W``::

    1 - eps_NS(M, W) = max (1/M) sum_x tr(L_x W_x)
                       s.t. sum_x L_x = I,  0 <= L_x <= p(x) I,  sum_x p(x) = M,

and the MC program relaxes ``sum_x L_x = I`` to ``sum_x L_x <= I``. Both
are SDPs. Their Lagrange duals are saddle problems in ``(p, B)``::

    eps(M, W) = min_p max_B  sum_x p(x) tr(W_x ^ M B) - tr B,

with ``B >= 0`` for MC and ``B`` Hermitian for NS.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.sparse.csgraph import connected_components

from . import herm
from .channels import QuantumChannelChoi, tensor_with_ideal_bit
from .errors import MalformedInputError, NumericalFailure
from .sdp import SdpBuilder, linear_map, solve


@dataclass
class CodingSolution:
    """Optimal NS/MC code.

    Attributes:
        eps: optimal average error probability.
        p: normalized input weights ``p(x) / M``.
        povm: decoding operators ``L_x`` on the full output space.
        dual_b: optimal ``B`` of the dual saddle problem.
        kind: ``"ns"`` or ``"mc"``.
    """

    eps: float
    p: np.ndarray
    povm: list
    dual_b: np.ndarray
    kind: str
    solver_status: str = "optimal"


@dataclass
class SaddlePoint:
    """Point ``(p, B)`` of a saddle problem with its value.

    For quantum channels ``p`` holds the reference state ``rho_R`` and
    ``B`` the operator ``Z_B``. ``lower`` is a certified lower bound when the
    value comes from a cutting-plane method.
    """

    p: np.ndarray
    B: np.ndarray
    value: float
    lower: float = -np.inf
    iterations: int = 0


def output_blocks(channel, tol=1e-13):
    """Common block-diagonal structure of all outputs.

    Returns the index sets of the connected components of the union of the
    outputs' sparsity patterns. Restricting decoders to these blocks does
    not change the NS or MC value (pinching argument).
    """
    pattern = np.any(np.abs(channel.outputs) > tol, axis=0)
    _, labels = connected_components(pattern, directed=False)
    return [np.nonzero(labels == c)[0] for c in range(labels.max() + 1)]


def _check_m(m):
    if not np.isfinite(m) or m < 1:
        raise MalformedInputError(f"message count M={m} must be >= 1")


def solve_coding_program(m, channel, kind="ns", p=None, **solver_opts):
    """Solve the NS or MC coding SDP.

    Args:
        m: number of messages (real, ``>= 1``).
        channel: :class:`CQChannel`.
        kind: ``"ns"`` or ``"mc"``.
        p: optional fixed normalized input distribution; the SDP then
            optimizes only the decoder.

    Returns:
        :class:`CodingSolution`.
    """
    _check_m(m)
    if kind not in ("ns", "mc"):
        raise MalformedInputError(f"unknown program kind {kind!r}")
    k, d = channel.num_inputs, channel.dim
    if p is not None:
        p = np.asarray(p, dtype=float)
        if p.shape != (k,) or np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
            raise MalformedInputError("fixed p must be a distribution over the inputs")
    blocks = output_blocks(channel)
    active = range(k) if p is None else [x for x in range(k) if p[x] > 0]
    bld = SdpBuilder()
    lam = {}
    pvar = {}
    if p is None:
        for x in range(k):
            pvar[x] = bld.add_block(1)
    eq_rows = []
    for bi, idx in enumerate(blocks):
        n = len(idx)
        terms = []
        for x in active:
            lam[x, bi] = bld.add_block(n)
            bld.add_objective(lam[x, bi], channel.outputs[x][np.ix_(idx, idx)] / m)
            terms.append((lam[x, bi], "id"))
        if kind == "mc":
            terms.append((bld.add_block(n), "id"))
        eq_rows.append(bld.add_equality(terms, np.eye(n)))
        for x in active:
            s = bld.add_block(n)
            if p is None:
                bld.add_equality([(lam[x, bi], "id"), (s, "id"), (pvar[x], -np.eye(n))],
                                 np.zeros((n, n)))
            else:
                bld.add_equality([(lam[x, bi], "id"), (s, "id")], m * p[x] * np.eye(n))
    if p is None:
        bld.add_equality([(pvar[x], np.ones((1, 1))) for x in range(k)], float(m))
    sol = solve(bld.build(sense="max"), **solver_opts)
    if sol.status != "optimal":
        raise NumericalFailure(f"{kind} coding program: solver status {sol.status}")
    povm = [np.zeros((d, d), dtype=complex) for _ in range(k)]
    for (x, bi), blk in lam.items():
        idx = blocks[bi]
        povm[x][np.ix_(idx, idx)] = sol.primal_point[blk]
    bmat = np.zeros((d, d), dtype=complex)
    for rows, idx in zip(eq_rows, blocks):
        n = len(idx)
        bmat[np.ix_(idx, idx)] = -_multiplier(sol.dual_point[rows], n)
    if p is None:
        pw = np.array([sol.primal_point[pvar[x]][0, 0].real for x in range(k)]) / m
        pw = np.clip(pw, 0.0, None)
        pw /= pw.sum()
    else:
        pw = p.copy()
    return CodingSolution(1.0 - sol.primal_value, pw, povm, herm.hermitian(bmat), kind,
                          sol.status)


def _multiplier(y, n):
    """Hermitian matrix ``sum_l y_l E_l`` in the basis used by the builder."""
    from .sdp import hermitian_basis

    return herm.hermitian((hermitian_basis(n).T @ y).reshape(n, n))


def eps_ns(m, channel, **kw):
    """Minimal NS-assisted average error for ``m`` messages."""
    return solve_coding_program(m, channel, "ns", **kw).eps


def eps_mc(m, channel, **kw):
    """Meta-converse value ``eps_MC(m, W)``."""
    return solve_coding_program(m, channel, "mc", **kw).eps


def dual_value_mc(p, b, m, channel):
    """Saddle objective ``sum_x p(x) tr(W_x ^ m B) - tr B``."""
    p = np.asarray(p, dtype=float)
    vals = np.array([herm.trace_ncmin(w, m * b) for w in channel.outputs])
    return float(p @ vals - np.trace(b).real)


def _cutting_plane(m, channel, kind, tol, max_iter, solver_opts):
    """Kelley cutting planes on ``g(p) = max_B f(p, B)`` over the simplex.

    Every cut ``p -> f(p, B_j)`` is an exact affine minorant of ``g``, so the
    linear-program value is a certified lower bound on ``min_p g``.
    """
    k = channel.num_inputs
    p = np.full(k, 1.0 / k)
    cuts_a, cuts_c = [], []
    best = None
    lower = -np.inf
    it = 0
    for it in range(1, max_iter + 1):
        sol = solve_coding_program(m, channel, kind, p=p, **solver_opts)
        g = sol.eps
        if best is None or g < best[0]:
            best = (g, p.copy(), sol.dual_b)
        a = np.array([herm.trace_ncmin(w, m * sol.dual_b) for w in channel.outputs])
        cuts_a.append(a)
        cuts_c.append(-np.trace(sol.dual_b).real)
        # variables (p, t): minimize t subject to a_j.p + c_j <= t
        a_ub = np.hstack([np.array(cuts_a), -np.ones((len(cuts_a), 1))])
        res = linprog(np.r_[np.zeros(k), 1.0], A_ub=a_ub, b_ub=-np.array(cuts_c),
                      A_eq=np.r_[np.ones(k), 0.0][None, :], b_eq=[1.0],
                      bounds=[(0, None)] * k + [(None, None)], method="highs")
        if res.status != 0:
            raise NumericalFailure(f"cutting-plane LP failed: {res.message}")
        lower = max(lower, float(res.fun))
        if best[0] - lower <= tol:
            break
        p = np.clip(res.x[:k], 0.0, None)
        p /= p.sum()
    return SaddlePoint(best[1], best[2], best[0], lower, it)


def eps_mc_dual(m, channel, tol=1e-7, max_iter=300, **solver_opts):
    """``min_p max_{B >= 0} sum_x p(x) tr(W_x ^ m B) - tr B``.

    The inner maximization is an SDP for fixed ``p``; the outer convex
    minimization over the simplex uses Kelley cutting planes until the
    certified gap is below ``tol``.
    """
    _check_m(m)
    return _cutting_plane(m, channel, "mc", tol, max_iter, solver_opts)


def eps_ns_dual_hermitian(m, channel, tol=1e-7, max_iter=300, **solver_opts):
    """NS dual: as :func:`eps_mc_dual` with ``B`` ranging over Hermitian matrices."""
    _check_m(m)
    return _cutting_plane(m, channel, "ns", tol, max_iter, solver_opts)


def activation_identity_check(m, channel, **kw):
    """Compare ``eps_MC(m, W)`` with ``eps_NS(2m, W (x) I_2)``.

    Returns:
        ``(lhs, rhs, |lhs - rhs|)``.
    """
    lhs = eps_mc(m, channel, **kw)
    rhs = eps_ns(2 * m, tensor_with_ideal_bit(channel), **kw)
    return lhs, rhs, abs(lhs - rhs)


def eps_mc_quantum(m, channel, **solver_opts):
    """Meta-converse value for a quantum channel given by its Choi operator.

    Solves ``max (1/m) tr(L J)`` over ``0 <= L <= m rho_R (x) I_B``,
    ``tr_R L <= I_B`` jointly with the state ``rho_R``; the constraint is
    linear in ``(L, rho_R)`` so this is one SDP.

    Returns:
        :class:`SaddlePoint` with ``p = rho_R``, ``B = Z_B`` and the error.
    """
    _check_m(m)
    if not isinstance(channel, QuantumChannelChoi):
        raise MalformedInputError("expected a QuantumChannelChoi")
    da, db = channel.dim_in, channel.dim_out
    n = da * db
    bld = SdpBuilder()
    lam = bld.add_block(n)
    s = bld.add_block(n)
    t = bld.add_block(db)
    rho = bld.add_block(da)
    bld.add_objective(lam, channel.choi / m)
    ptr = linear_map(lambda x: herm.partial_trace(x, [da, db], [1]), n, db)
    rows = bld.add_equality([(lam, ptr), (t, "id")], np.eye(db))
    ext = linear_map(lambda x: np.kron(x, np.eye(db)), da, n)
    bld.add_equality([(lam, "id"), (s, "id"), (rho, ext, -float(m))], np.zeros((n, n)))
    bld.add_equality([(rho, np.eye(da))], 1.0)
    sol = solve(bld.build(sense="max"), **solver_opts)
    if sol.status != "optimal":
        raise NumericalFailure(f"quantum MC program: solver status {sol.status}")
    rho_r = herm.hermitian(sol.primal_point[rho])
    z = -_multiplier(sol.dual_point[rows], db)
    return SaddlePoint(rho_r, z, 1.0 - sol.primal_value)


def saddle_value_quantum(rho_r, z, m, channel):
    """``tr((sqrt(rho) J sqrt(rho)) ^ (m rho (x) Z)) - tr Z`` for a Choi channel."""
    db = channel.dim_out
    sq = np.kron(herm.frac_power(rho_r, 0.5), np.eye(db))
    a = sq @ channel.choi @ sq
    return herm.trace_ncmin(a, m * np.kron(rho_r, z)) - float(np.trace(z).real)


def coding_record(channel_id, m, quantity, value, witness):
    """Flat record ``(channel-id, M, quantity, value, witness-hash)``."""
    import hashlib

    digest = hashlib.sha256(np.ascontiguousarray(np.round(witness, 9)).tobytes()).hexdigest()[:16]
    return {"channel": channel_id, "M": m, "quantity": quantity, "value": value,
            "witness": digest}

