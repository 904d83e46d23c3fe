import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from nscq import herm
from nscq.sdp import (SdpBuilder, dump_problem, hermitian_basis, linear_map, load_problem,
                      max_form, solve)

from conftest import seeds


def _random_feasible(rng, dims, m):
    """Random block SDP with a strictly feasible primal and dual point."""
    x0 = [herm.random_density(n, rng) + np.eye(n) for n in dims]
    bld = SdpBuilder()
    blocks = [bld.add_block(n) for n in dims]
    y0 = rng.standard_normal(m)
    amats = [[herm.random_hermitian(n, rng) for n in dims] for _ in range(m)]
    for i in range(m):
        rhs = sum(np.trace(a @ x).real for a, x in zip(amats[i], x0))
        bld.add_equality([(b, a) for b, a in zip(blocks, amats[i])], rhs)
    for j, n in enumerate(dims):
        c = sum(y0[i] * amats[i][j] for i in range(m)) + herm.random_density(n, rng) + np.eye(n)
        bld.add_objective(blocks[j], c)
    return bld.build(), amats, blocks


def test_hermitian_basis_orthonormal():
    for k in (1, 2, 3, 4):
        b = hermitian_basis(k).toarray()
        assert np.allclose(b.conj() @ b.T, np.eye(k * k))
        mats = b.reshape(-1, k, k)
        assert all(np.allclose(m, m.conj().T) for m in mats)


@given(seeds, st.integers(1, 4))
def test_max_eigenvalue_program(seed, d):
    # max <C, X> s.t. tr X = 1 equals lambda_max(C)
    rng = np.random.default_rng(seed)
    c = herm.random_hermitian(d, rng)
    bld = SdpBuilder()
    x = bld.add_block(d)
    bld.add_objective(x, c)
    bld.add_equality([(x, np.eye(d))], 1.0)
    sol = solve(bld.build(sense="max"))
    assert sol.status == "optimal"
    assert sol.primal_value == pytest.approx(np.linalg.eigvalsh(c)[-1], abs=1e-7)


@settings(max_examples=15)
@given(seeds)
def test_weak_duality_and_gap(seed):
    rng = np.random.default_rng(seed)
    prob, _, _ = _random_feasible(rng, [2, 3], 4)
    sol = solve(prob)
    assert sol.status == "optimal"
    assert sol.primal_value >= sol.dual_value - 1e-9
    assert sol.primal_value - sol.dual_value <= 1e-6 * (1 + abs(sol.primal_value))
    for z in sol.dual_slack:
        assert np.linalg.eigvalsh(herm.hermitian(z))[0] >= -1e-8
    for x in sol.primal_point:
        assert np.linalg.eigvalsh(herm.hermitian(x))[0] >= -1e-8


@settings(max_examples=8)
@given(seeds)
def test_random_sdp_matches_cvxpy(seed):
    cp = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(seed)
    dims = [2, 2, 3]
    prob, amats, _ = _random_feasible(rng, dims, 5)
    ours = solve(prob).primal_value
    xs = [cp.Variable((n, n), hermitian=True) for n in dims]
    cons = [x >> 0 for x in xs]
    for i, row in enumerate(amats):
        cons.append(cp.real(sum(cp.trace(a @ x) for a, x in zip(row, xs))) == prob.rhs[i])
    obj = cp.real(sum(cp.trace(c @ x) for c, x in zip(prob.objective, xs)))
    ref = cp.Problem(cp.Minimize(obj), cons).solve(solver="CLARABEL")
    assert ours == pytest.approx(ref, abs=1e-5 * (1 + abs(ref)))


@given(seeds)
def test_block_matches_monolithic(seed):
    rng = np.random.default_rng(seed)
    c1, c2 = herm.random_hermitian(2, rng), herm.random_hermitian(3, rng)
    bld = SdpBuilder()
    a, b = bld.add_block(2), bld.add_block(3)
    bld.add_objective(a, c1)
    bld.add_objective(b, c2)
    bld.add_equality([(a, np.eye(2))], 1.0)
    bld.add_equality([(b, np.eye(3))], 1.0)
    split = solve(bld.build(sense="max")).primal_value
    big = np.zeros((5, 5), dtype=complex)
    big[:2, :2], big[2:, 2:] = c1, c2
    p1 = np.diag([1, 1, 0, 0, 0]).astype(complex)
    bld = SdpBuilder()
    x = bld.add_block(5)
    bld.add_objective(x, big)
    bld.add_equality([(x, p1)], 1.0)
    bld.add_equality([(x, np.eye(5) - p1)], 1.0)
    mono = solve(bld.build(sense="max")).primal_value
    expected = np.linalg.eigvalsh(c1)[-1] + np.linalg.eigvalsh(c2)[-1]
    assert split == pytest.approx(expected, abs=1e-7)
    assert mono == pytest.approx(expected, abs=1e-7)


def test_matrix_equality_with_linear_map():
    # max tr(J L) over 0 <= L, tr_A L = I_B is d_A * lambda_max-type; check feasibility only
    da, db = 2, 2
    bld = SdpBuilder()
    lam = bld.add_block(da * db)
    ptr = linear_map(lambda x: herm.partial_trace(x, [da, db], [1]), da * db, db)
    bld.add_equality([(lam, ptr)], np.eye(db))
    bld.add_objective(lam, np.eye(da * db))
    sol = solve(bld.build(sense="max"))
    assert sol.primal_value == pytest.approx(db, abs=1e-7)
    got = herm.partial_trace(sol.primal_point[lam], [da, db], [1])
    assert np.allclose(got, np.eye(db), atol=1e-7)


def test_infeasible_and_unbounded():
    bld = SdpBuilder()
    x = bld.add_block(2)
    bld.add_equality([(x, np.eye(2))], -1.0)
    assert solve(bld.build()).status == "infeasible"
    bld = SdpBuilder()
    x = bld.add_block(2)
    bld.add_objective(x, np.diag([0.0, -1.0]))
    bld.add_equality([(x, np.diag([1.0, 0.0]))], 1.0)
    assert solve(bld.build()).status == "unbounded"


@given(seeds)
def test_dump_round_trip(seed):
    rng = np.random.default_rng(seed)
    prob, _, _ = _random_feasible(rng, [1, 2], 3)
    back = load_problem(dump_problem(prob))
    assert back.block_dims == prob.block_dims
    assert np.allclose(back.rhs, prob.rhs)
    for a, b in zip(back.constraints, prob.constraints):
        assert sp.linalg.norm(a - b) < 1e-14
    assert solve(back).primal_value == pytest.approx(solve(prob).primal_value, abs=1e-10)


def test_max_form_involution():
    rng = np.random.default_rng(3)
    prob, _, _ = _random_feasible(rng, [2], 2)
    flipped = solve(max_form(prob)).primal_value
    assert flipped == pytest.approx(-solve(prob).primal_value, abs=1e-7)
    twice = max_form(max_form(prob))
    assert all(np.allclose(a, b) for a, b in zip(twice.objective, prob.objective))
