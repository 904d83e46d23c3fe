"""Hermitian-operator primitives.

Operators are plain complex ``numpy`` arrays. The helpers here symmetrize,
diagonalize and apply spectral functions, and implement the
non-commutative minimum ``A ^ B = (A + B - |A - B|) / 2``.
"""

import numpy as np

from .errors import MalformedInputError, NumericalFailure

SUPPORT_TOL = 1e-10
DENSITY_TOL = 1e-10


def hermitian(a):
    """Return ``(a + a^H) / 2`` as a complex array.

    Args:
        a: square array-like.

    Returns:
        The Hermitian part of ``a``.

    Raises:
        MalformedInputError: if ``a`` is not a finite square matrix.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MalformedInputError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise MalformedInputError("matrix has non-finite entries")
    return 0.5 * (a + a.conj().T)


def density(a, tol=DENSITY_TOL):
    """Validate a density operator.

    Small negative eigenvalues (above ``-tol``) are clamped to zero.

    Raises:
        MalformedInputError: if the operator has an eigenvalue below
            ``-tol`` or its trace differs from one by more than ``tol``.
    """
    a = hermitian(a)
    w, v = eigh(a)
    if w[0] < -tol:
        raise MalformedInputError(f"negative eigenvalue {w[0]:.3e}")
    if abs(w.sum() - 1.0) > tol:
        raise MalformedInputError(f"trace {w.sum():.12f} is not one")
    if w[0] < 0:
        a = (v * np.clip(w, 0.0, None)) @ v.conj().T
    return a


def eigh(a):
    """Eigendecomposition of a Hermitian matrix, ascending eigenvalues."""
    try:
        return np.linalg.eigh(hermitian(a))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc


def spectral_apply(a, f):
    """Apply a scalar function to the spectrum of a Hermitian matrix."""
    w, v = eigh(a)
    return (v * f(w)) @ v.conj().T


def positive_part(a):
    """Positive part ``A_+`` of a Hermitian matrix."""
    return spectral_apply(a, lambda w: np.clip(w, 0.0, None))


def negative_part(a):
    """Negative part ``A_-``, so that ``A = A_+ - A_-``."""
    return spectral_apply(a, lambda w: np.clip(-w, 0.0, None))


def abs_op(a):
    """Operator absolute value ``|A| = A_+ + A_-``."""
    return spectral_apply(a, np.abs)


def ncmin(a, b):
    """Non-commutative minimum ``A ^ B = A - (A - B)_+``.

    For commuting arguments this is the entrywise minimum of the spectra.
    """
    a = hermitian(a)
    return a - positive_part(a - hermitian(b))


def trace_ncmin(a, b):
    """``tr(A ^ B)`` computed from the spectrum of ``A - B``."""
    a = hermitian(a)
    w = np.linalg.eigvalsh(a - hermitian(b))
    return float(np.trace(a).real - np.clip(w, 0.0, None).sum())


def support_threshold(w, tol=SUPPORT_TOL):
    """Eigenvalue cut-off ``tol * max(|w|)`` used to define supports."""
    scale = np.max(np.abs(w)) if w.size else 0.0
    return tol * scale


def frac_power(a, s, tol=SUPPORT_TOL):
    """Power ``A^s`` of a positive semidefinite matrix taken on its support.

    Eigenvalues at or below ``tol * lambda_max`` are treated as zero, so
    negative exponents give the generalized (pseudo-)inverse power.
    """
    w, v = eigh(a)
    cut = support_threshold(w, tol)
    on = w > cut
    f = np.zeros_like(w)
    f[on] = w[on] ** s
    return (v * f) @ v.conj().T


def log_on_support(a, tol=SUPPORT_TOL):
    """Matrix logarithm on the support, zero on the kernel."""
    w, v = eigh(a)
    on = w > support_threshold(w, tol)
    f = np.zeros_like(w)
    f[on] = np.log(w[on])
    return (v * f) @ v.conj().T


def support_projector(a, tol=SUPPORT_TOL):
    """Orthogonal projector onto the support of a PSD matrix."""
    w, v = eigh(a)
    vs = v[:, w > support_threshold(w, tol)]
    return vs @ vs.conj().T


def schatten_norm(a, p):
    """Schatten ``p``-norm of a Hermitian matrix (``p = inf`` allowed)."""
    w = np.abs(np.linalg.eigvalsh(hermitian(a)))
    if np.isinf(p):
        return float(w.max())
    return float(np.sum(w ** p) ** (1.0 / p))


def partial_trace(x, dims, keep):
    """Partial trace over all tensor factors not listed in ``keep``.

    Args:
        x: operator on the tensor product of spaces with dimensions ``dims``.
        dims: list of subsystem dimensions.
        keep: indices of the subsystems that remain.

    Returns:
        The reduced operator on the kept subsystems (in their original order).
    """
    dims = list(dims)
    n = len(dims)
    keep = sorted(keep)
    t = np.asarray(x).reshape(dims + dims)
    for k in reversed(range(n)):
        if k not in keep:
            t = np.trace(t, axis1=k, axis2=k + t.ndim // 2)
    dk = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(dk, dk)


def kron_all(ops):
    """Kronecker product of a sequence of matrices."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def ket(i, d):
    """Computational basis vector ``|i>`` in dimension ``d``."""
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def projector(i, d):
    """Rank-one projector ``|i><i|``."""
    p = np.zeros((d, d), dtype=complex)
    p[i, i] = 1.0
    return p


def random_unitary(d, rng):
    """Haar-random unitary via QR of a Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(d, rng, rank=None):
    """Random density matrix from the induced (Ginibre) measure.

    Args:
        d: dimension.
        rng: ``numpy.random.Generator``.
        rank: rank of the state, full rank by default.
    """
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return hermitian(rho / np.trace(rho).real)


def random_pure(d, rng):
    """Random pure state ``|psi><psi|``."""
    return random_density(d, rng, rank=1)


def random_hermitian(d, rng, scale=1.0):
    """Random Hermitian matrix with Gaussian entries."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return hermitian(scale * g)


def trace_min_povm(a, b, **solver_opts):
    """Semidefinite value ``min_{0 <= O <= I} tr(A O) + tr(B (I - O))``.

    Equals ``tr(A ^ B)``; provided as an independent route through the
    SDP solver.
    """
    from .sdp import SdpBuilder, solve

    a, b = hermitian(a), hermitian(b)
    d = a.shape[0]
    bld = SdpBuilder()
    o = bld.add_block(d)
    s = bld.add_block(d)
    bld.set_objective(o, a - b)
    bld.add_equality([(o, "id"), (s, "id")], np.eye(d))
    sol = solve(bld.build(), **solver_opts)
    if sol.status != "optimal":
        raise NumericalFailure(f"trace_min_povm: solver status {sol.status}")
    return sol.primal_value + float(np.trace(b).real)
