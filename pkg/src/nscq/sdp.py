"""Block semidefinite programs and a primal-dual interior-point solver.

Problems are in standard form::

    minimize    sum_b <C_b, X_b>
    subject to  sum_b <A_ib, X_b> = b_i,   X_b >= 0 (PSD),

with complex Hermitian blocks and ``<A, X> = Re tr(A^H X)``. The dual is
``maximize b.y  s.t.  C - sum_i y_i A_i = Z >= 0``. Blocks of dimension one
are scalar (LP) variables.

The solver is an infeasible path-following method with Nesterov-Todd
scaling and Mehrotra's predictor-corrector. Blocks of equal dimension are
processed together as stacked arrays.
"""

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import MalformedInputError

STATUSES = ("optimal", "infeasible", "unbounded", "numerical-failure")


@dataclass
class SdpProblem:
    """A block SDP in standard form.

    Attributes:
        block_dims: dimension of each PSD block.
        objective: Hermitian cost matrix per block.
        constraints: per block, a sparse ``(m, n_b**2)`` matrix whose row
            ``i`` is the row-major vectorization of ``A_ib``.
        rhs: right-hand sides ``b_i``.
        sense: ``"min"`` or ``"max"``; a ``"max"`` problem is solved as the
            minimization of the negated objective.
        offset: constant added to the objective value.
    """

    block_dims: list
    objective: list
    constraints: list
    rhs: np.ndarray
    sense: str = "min"
    offset: float = 0.0

    @property
    def num_constraints(self):
        return len(self.rhs)


@dataclass
class SdpSolution:
    """Result of :func:`solve`.

    ``primal_value`` and ``dual_value`` are reported in the problem's own
    sense (including ``offset``). ``dual_point`` is the multiplier vector
    ``y`` and ``dual_slack`` the blocks of ``Z``.
    """

    status: str
    primal_value: float
    dual_value: float
    primal_point: list
    dual_point: np.ndarray
    dual_slack: list
    iterations: int
    info: dict = field(default_factory=dict)


class LinearMap:
    """Matrix of a linear map on row-major vectorized matrices."""

    def __init__(self, matrix):
        self.matrix = sp.csr_matrix(matrix, dtype=complex)


def linear_map(f, n_in, n_out):
    """Tabulate ``X -> f(X)`` on ``n_in x n_in`` matrix units."""
    cols = []
    for j in range(n_in * n_in):
        e = np.zeros(n_in * n_in, dtype=complex)
        e[j] = 1.0
        out = np.asarray(f(e.reshape(n_in, n_in)), dtype=complex)
        if out.shape != (n_out, n_out):
            raise MalformedInputError("linear map output has the wrong shape")
        cols.append(out.reshape(-1))
    return LinearMap(np.array(cols).T)


def hermitian_basis(k):
    """Orthonormal basis of ``k x k`` Hermitian matrices as sparse rows."""
    rows, cols, vals = [], [], []
    r = 0
    for j in range(k):
        rows.append(r)
        cols.append(j * k + j)
        vals.append(1.0)
        r += 1
    s = 1.0 / np.sqrt(2.0)
    for j in range(k):
        for l in range(j + 1, k):
            rows += [r, r]
            cols += [j * k + l, l * k + j]
            vals += [s, s]
            r += 1
            rows += [r, r]
            cols += [j * k + l, l * k + j]
            vals += [1j * s, -1j * s]
            r += 1
    return sp.csr_matrix((vals, (rows, cols)), shape=(k * k, k * k), dtype=complex)


class SdpBuilder:
    """Incremental construction of an :class:`SdpProblem`.

    Matrix-valued equalities ``sum_t L_t(X_t) = R`` are expanded into
    ``k**2`` real scalar constraints using an orthonormal Hermitian basis.
    Each term is ``(block, L)`` where ``L`` is

    * ``"id"`` or a number ``c``: the block itself, times ``c``;
    * a matrix ``F`` with a scalar block: the term ``x * F``;
    * a matrix ``F`` with a scalar right-hand side: the functional ``<F, X>``;
    * a :class:`LinearMap`.
    """

    def __init__(self):
        self.dims = []
        self._obj = []
        self._rows = []
        self._rhs = []
        self._offset = 0.0

    def add_block(self, dim):
        """Add a PSD block and return its index."""
        self.dims.append(int(dim))
        self._obj.append(np.zeros((dim, dim), dtype=complex))
        self._rows.append([])
        return len(self.dims) - 1

    def add_blocks(self, dim, count):
        return [self.add_block(dim) for _ in range(count)]

    def add_objective(self, block, c):
        """Add ``<c, X_block>`` to the objective."""
        n = self.dims[block]
        self._obj[block] += np.asarray(c, dtype=complex).reshape(n, n)

    set_objective = add_objective

    def add_offset(self, value):
        self._offset += float(value)

    def _map_matrix(self, block, spec, k):
        n = self.dims[block]
        if isinstance(spec, LinearMap):
            mat = spec.matrix
        elif isinstance(spec, str):
            if spec != "id":
                raise MalformedInputError(f"unknown term {spec!r}")
            if n != k:
                raise MalformedInputError("identity term dimension mismatch")
            mat = sp.identity(k * k, dtype=complex, format="csr")
        elif np.isscalar(spec):
            if n != k:
                raise MalformedInputError("scaled identity term dimension mismatch")
            mat = spec * sp.identity(k * k, dtype=complex, format="csr")
        else:
            f = np.asarray(spec, dtype=complex)
            if n == 1 and f.shape == (k, k):
                mat = sp.csr_matrix(f.reshape(-1, 1))
            elif k == 1 and f.shape == (n, n):
                mat = sp.csr_matrix(f.conj().reshape(1, -1))
            else:
                raise MalformedInputError("cannot interpret constraint term")
        if mat.shape != (k * k, n * n):
            raise MalformedInputError("linear map has the wrong shape")
        return mat

    def add_equality(self, terms, rhs):
        """Add the Hermitian equality ``sum_t L_t(X_t) = rhs``.

        Returns:
            Indices of the generated scalar constraints, ordered like
            :func:`hermitian_basis`.
        """
        r = np.atleast_2d(np.asarray(rhs, dtype=complex))
        k = r.shape[0]
        basis = hermitian_basis(k)
        start = len(self._rhs)
        self._rhs.extend((basis.conj() @ r.reshape(-1)).real.tolist())
        for term in terms:
            block, spec = term[0], term[1]
            coef = term[2] if len(term) > 2 else 1.0
            rows = coef * (basis @ self._map_matrix(block, spec, k).conj())
            self._rows[block].append((start, sp.coo_matrix(rows)))
        return np.arange(start, start + k * k)

    def build(self, sense="min"):
        m = len(self._rhs)
        cons = []
        for b, n in enumerate(self.dims):
            rr, cc, vv = [], [], []
            for start, coo in self._rows[b]:
                rr.append(coo.row + start)
                cc.append(coo.col)
                vv.append(coo.data)
            if rr:
                a = sp.csr_matrix(
                    (np.concatenate(vv), (np.concatenate(rr), np.concatenate(cc))),
                    shape=(m, n * n),
                )
            else:
                a = sp.csr_matrix((m, n * n), dtype=complex)
            a.sum_duplicates()
            a.eliminate_zeros()
            cons.append(a)
        obj = [0.5 * (c + c.conj().T) for c in self._obj]
        return SdpProblem(list(self.dims), obj, cons, np.array(self._rhs, dtype=float),
                          sense=sense, offset=self._offset)


def max_form(problem):
    """Flip the optimization sense by negating objective and offset.

    Solving the result gives the negated optimal value; applying the
    transform twice returns an equivalent problem.
    """
    sense = "max" if problem.sense == "min" else "min"
    return replace(problem, objective=[-c for c in problem.objective],
                   offset=-problem.offset, sense=sense)


def _ct(a):
    return np.conj(np.swapaxes(a, -1, -2))


def _herm(a):
    return 0.5 * (a + _ct(a))


class _Group:
    """Blocks sharing one dimension, stored as a ``(k, n, n)`` stack."""

    def __init__(self, n, idx, problem):
        self.n = n
        self.idx = idx
        self.k = len(idx)
        self.C = np.stack([problem.objective[i] for i in idx]).astype(complex)
        self.A = sp.hstack([problem.constraints[i] for i in idx], format="csr").astype(complex)
        self.Aconj = self.A.conj()
        self.AT = self.A.T.tocsr()

    def apply(self, X):
        return (self.Aconj @ X.reshape(-1)).real

    def adjoint(self, y):
        return _herm((self.AT @ y).reshape(self.k, self.n, self.n))

    def schur(self, W):
        n, k = self.n, self.k
        data = np.einsum("bij,blk->bikjl", W, W).reshape(k, n * n, n * n)
        kmat = sp.bsr_matrix((data, np.arange(k), np.arange(k + 1)),
                             shape=(k * n * n, k * n * n)).tocsr()
        return (self.Aconj @ (kmat @ self.AT)).real


def _inner(X, Z):
    return float(sum(np.sum(x.conj() * z).real for x, z in zip(X, Z)))


def _norm(X):
    return float(np.sqrt(sum(np.sum(np.abs(x) ** 2) for x in X)))


def _nt_scaling(X, Z):
    lx = np.linalg.cholesky(X)
    lz = np.linalg.cholesky(Z)
    _, s, vh = np.linalg.svd(_ct(lz) @ lx)
    v = _ct(vh)
    g = (lx @ v) * (s ** -0.5)[:, None, :]
    ginv = (s ** 0.5)[:, :, None] * (vh @ np.linalg.inv(lx))
    return g, ginv, g @ _ct(g), s


def _max_step(lam, d):
    """Largest ``a`` with ``diag(lam) + a d >= 0`` (scaled coordinates)."""
    r = 1.0 / np.sqrt(lam)
    e = np.linalg.eigvalsh(_herm(r[:, :, None] * d * r[:, None, :]))
    emin = e[:, 0].min()
    return np.inf if emin >= 0 else -1.0 / emin


def solve(problem, gap_tol=1e-8, feas_tol=1e-8, max_iter=200, verbose=False):
    """Solve a block SDP with a primal-dual interior-point method.

    Args:
        problem: :class:`SdpProblem`.
        gap_tol: relative duality-gap tolerance.
        feas_tol: relative primal and dual residual tolerance.
        max_iter: iteration limit.
        verbose: print one line per iteration.

    Returns:
        :class:`SdpSolution`. Infeasible problems report
        ``primal_value = dual_value = +inf`` (``-inf`` for unbounded ones)
        in minimization sense.
    """
    sign = 1.0 if problem.sense == "min" else -1.0
    dims = problem.block_dims
    b = np.asarray(problem.rhs, dtype=float)
    m = len(b)
    groups = [_Group(n, [i for i, d in enumerate(dims) if d == n], problem)
              for n in sorted(set(dims))]
    C = [sign * g.C for g in groups]
    N = float(sum(dims))

    def aop(X):
        return sum(g.apply(x) for g, x in zip(groups, X))

    def atop(y):
        return [g.adjoint(y) for g in groups]

    normb = np.linalg.norm(b)
    normc = _norm(C)

    # scaled identity starting point
    X, Z = [], []
    for g, c in zip(groups, C):
        anorm = np.sqrt(np.asarray(abs(g.A).power(2).sum(axis=1)).ravel())
        xi = max(10.0, np.sqrt(g.n), g.n * np.max((1 + np.abs(b)) / (1 + anorm)) if m else 1.0)
        eta = max(10.0, np.sqrt(g.n), anorm.max() if m else 0.0, np.linalg.norm(c))
        eye = np.broadcast_to(np.eye(g.n, dtype=complex), (g.k, g.n, g.n))
        X.append(xi * eye.copy())
        Z.append(eta * eye.copy())
    y = np.zeros(m)

    status = "numerical-failure"
    info = {}
    it = 0
    best = None
    for it in range(1, max_iter + 1):
        rp = b - aop(X)
        aty = atop(y)
        Rd = [c - a - z for c, a, z in zip(C, aty, Z)]
        pobj = _inner(C, X)
        dobj = float(b @ y)
        gap = _inner(X, Z)
        pinf = np.linalg.norm(rp) / (1 + normb)
        dinf = _norm(Rd) / (1 + normc)
        relgap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        info = dict(pinf=pinf, dinf=dinf, relgap=relgap, gap=gap)
        if verbose:
            print(f"{it:3d} p={pobj:+.10e} d={dobj:+.10e} gap={relgap:.2e} "
                  f"pinf={pinf:.2e} dinf={dinf:.2e}")
        score = max(relgap, pinf, dinf)
        if best is None or score < best[0]:
            best = (score, [x.copy() for x in X], y.copy(), [z.copy() for z in Z])
        if relgap <= gap_tol and pinf <= feas_tol and dinf <= feas_tol:
            status = "optimal"
            break
        # infeasibility certificates from diverging iterates
        if dobj > 0:
            ray = _norm([a + z for a, z in zip(aty, Z)])
            if ray / dobj < 1e-8 and dobj > 1e6:
                status = "infeasible"
                break
        if pobj < 0:
            if np.linalg.norm(aop(X)) / -pobj < 1e-8 and -pobj > 1e6:
                status = "unbounded"
                break

        mu = gap / N
        try:
            scal = [_nt_scaling(x, z) for x, z in zip(X, Z)]
        except np.linalg.LinAlgError:
            break
        G = [s[0] for s in scal]
        Ginv = [s[1] for s in scal]
        W = [s[2] for s in scal]
        lam = [s[3] for s in scal]

        M = sum(g.schur(w) for g, w in zip(groups, W))
        M = M.toarray() if sp.issparse(M) else np.asarray(M)
        try:
            fac = sla.cho_factor(M, check_finite=False)
            msolve = lambda r: sla.cho_solve(fac, r, check_finite=False)  # noqa: E731
        except (sla.LinAlgError, ValueError):
            msolve = lambda r: np.linalg.lstsq(M, r, rcond=None)[0]  # noqa: E731

        wrdw = [w @ r @ w for w, r in zip(W, Rd)]

        def direction(Rs):
            Rc = []
            for g_, l_, rs in zip(G, lam, Rs):
                rt = 2.0 * rs / (l_[:, :, None] + l_[:, None, :])
                Rc.append(_herm(g_ @ rt @ _ct(g_)))
            rhs = rp - aop([rc - v for rc, v in zip(Rc, wrdw)])
            dy = msolve(rhs)
            at = atop(dy)
            dZ = [_herm(r - a) for r, a in zip(Rd, at)]
            dX = [_herm(rc - w @ dz @ w) for rc, w, dz in zip(Rc, W, dZ)]
            return dX, dy, dZ

        def steps(dX, dZ):
            dXt = [gi @ dx @ _ct(gi) for gi, dx in zip(Ginv, dX)]
            dZt = [_ct(g_) @ dz @ g_ for g_, dz in zip(G, dZ)]
            ap = min(_max_step(l_, d) for l_, d in zip(lam, dXt))
            ad = min(_max_step(l_, d) for l_, d in zip(lam, dZt))
            return ap, ad, dXt, dZt

        lam2 = [np.einsum("bi,ij->bij", l_ ** 2, np.eye(l_.shape[1])) for l_ in lam]
        dX, dy, dZ = direction([-q for q in lam2])
        ap, ad, dXt, dZt = steps(dX, dZ)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = _inner([x + ap * d for x, d in zip(X, dX)],
                        [z + ad * d for z, d in zip(Z, dZ)]) / N
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3

        Rs = []
        for l_, q, a, c in zip(lam, lam2, dXt, dZt):
            eye = np.eye(l_.shape[1])
            Rs.append(sigma * mu * eye - q - 0.5 * (a @ c + c @ a))
        dX, dy, dZ = direction(Rs)
        ap, ad, _, _ = steps(dX, dZ)
        gamma = 0.9 + 0.09 * min(1.0, ap, ad)
        ap, ad = min(1.0, gamma * ap), min(1.0, gamma * ad)
        if max(ap, ad) < 1e-12:
            break
        X = [_herm(x + ap * d) for x, d in zip(X, dX)]
        y = y + ad * dy
        Z = [_herm(z + ad * d) for z, d in zip(Z, dZ)]

    if status == "numerical-failure" and best is not None:
        _, X, y, Z = best

    blocks_x = [None] * len(dims)
    blocks_z = [None] * len(dims)
    for g, x, z in zip(groups, X, Z):
        for j, i in enumerate(g.idx):
            blocks_x[i] = x[j]
            blocks_z[i] = z[j]

    if status == "infeasible":
        pval, dval = np.inf, np.inf
    elif status == "unbounded":
        pval, dval = -np.inf, -np.inf
    else:
        pval, dval = _inner(C, X), float(b @ y)
    pval = sign * pval + problem.offset
    dval = sign * dval + problem.offset
    info["sense_sign"] = sign
    return SdpSolution(status, pval, dval, blocks_x, y, blocks_z, it, info)


def dump_problem(problem):
    """Plain-text dump with ``blocks``, ``objective`` and ``constraint k`` sections.

    Intended for debugging; entries are written as ``block row col re im``.
    """
    lines = [f"sense {problem.sense}", f"offset {float(problem.offset)!r}", "blocks",
             " ".join(str(d) for d in problem.block_dims), "objective"]
    for bidx, c in enumerate(problem.objective):
        for (r, col), v in np.ndenumerate(c):
            if v != 0:
                lines.append(f"{bidx} {r} {col} {float(v.real)!r} {float(v.imag)!r}")
    for i in range(problem.num_constraints):
        lines.append(f"constraint {i} {float(problem.rhs[i])!r}")
        for bidx, a in enumerate(problem.constraints):
            row = a.getrow(i).tocoo()
            n = problem.block_dims[bidx]
            for j, v in zip(row.col, row.data):
                if v != 0:
                    lines.append(f"{bidx} {j // n} {j % n} {float(v.real)!r} {float(v.imag)!r}")
    return "\n".join(lines) + "\n"


def load_problem(text):
    """Inverse of :func:`dump_problem`."""
    lines = [ln.strip() for ln in text.strip().splitlines()]
    sense = lines[0].split()[1]
    offset = float(lines[1].split()[1])
    dims = [int(t) for t in lines[3].split()]
    obj = [np.zeros((n, n), dtype=complex) for n in dims]
    entries = []
    rhs = []
    pos = 5
    while pos < len(lines) and not lines[pos].startswith("constraint"):
        bi, r, c, re, im = lines[pos].split()
        obj[int(bi)][int(r), int(c)] = float(re) + 1j * float(im)
        pos += 1
    for ln in lines[pos:]:
        if ln.startswith("constraint"):
            rhs.append(float(ln.split()[2]))
            continue
        bi, r, c, re, im = ln.split()
        bi, r, c = int(bi), int(r), int(c)
        entries.append((bi, len(rhs) - 1, r * dims[bi] + c, float(re) + 1j * float(im)))
    m = len(rhs)
    cons = []
    for bi, n in enumerate(dims):
        sel = [e for e in entries if e[0] == bi]
        rows = [e[1] for e in sel]
        cols = [e[2] for e in sel]
        vals = [e[3] for e in sel]
        cons.append(sp.csr_matrix((vals, (rows, cols)), shape=(m, n * n), dtype=complex))
    return SdpProblem(dims, obj, cons, np.array(rhs), sense=sense, offset=offset)
