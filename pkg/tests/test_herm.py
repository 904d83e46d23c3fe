import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nscq import herm
from nscq.errors import MalformedInputError

from conftest import seeds


def test_hermitian_rejects_non_square():
    with pytest.raises(MalformedInputError):
        herm.hermitian(np.ones((2, 3)))


def test_density_validation():
    with pytest.raises(MalformedInputError):
        herm.density(np.diag([0.7, 0.7]))
    with pytest.raises(MalformedInputError):
        herm.density(np.diag([1.5, -0.5]))
    rho = herm.density(np.diag([1.0, -1e-12]))
    assert np.all(np.linalg.eigvalsh(rho) >= 0)


def test_ncmin_commuting_is_entrywise_min():
    a = np.diag([0.3, 0.5, 0.2])
    b = np.diag([0.1, 0.6, 0.2])
    assert np.allclose(herm.ncmin(a, b), np.diag([0.1, 0.5, 0.2]))
    assert herm.trace_ncmin(a, b) == pytest.approx(0.8)


@given(seeds, st.integers(1, 4))
def test_trace_ncmin_helstrom(seed, d):
    # tr(rho ^ sigma) = 1 - ||rho - sigma||_1 / 2 for states
    rng = np.random.default_rng(seed)
    rho, sigma = herm.random_density(d, rng), herm.random_density(d, rng)
    tn = np.abs(np.linalg.eigvalsh(rho - sigma)).sum()
    assert herm.trace_ncmin(rho, sigma) == pytest.approx(1 - tn / 2, abs=1e-12)


@given(seeds, st.integers(1, 4))
def test_ncmin_operator_bounds(seed, d):
    rng = np.random.default_rng(seed)
    a, b = herm.random_hermitian(d, rng), herm.random_hermitian(d, rng)
    m = herm.ncmin(a, b)
    assert np.linalg.eigvalsh(a - m)[0] >= -1e-10
    assert np.linalg.eigvalsh(b - m)[0] >= -1e-10
    assert np.allclose(m, herm.ncmin(b, a), atol=1e-10)


@settings(max_examples=10)
@given(seeds, st.integers(1, 3))
def test_trace_ncmin_matches_sdp(seed, d):
    rng = np.random.default_rng(seed)
    a = herm.random_density(d, rng)
    b = 2.0 * herm.random_density(d, rng)
    assert herm.trace_min_povm(a, b) == pytest.approx(herm.trace_ncmin(a, b), abs=1e-7)


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_partial_trace_of_product(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = herm.random_density(da, rng), herm.random_hermitian(db, rng)
    x = np.kron(a, b)
    assert np.allclose(herm.partial_trace(x, [da, db], [0]), a * np.trace(b))
    assert np.allclose(herm.partial_trace(x, [da, db], [1]), b * np.trace(a))


@given(seeds)
def test_partial_trace_matches_einsum(seed):
    rng = np.random.default_rng(seed)
    x = herm.random_density(12, rng)
    t = x.reshape(2, 3, 2, 2, 3, 2)
    assert np.allclose(herm.partial_trace(x, [2, 3, 2], [0, 2]),
                       np.einsum("ajbcjd->abcd", t).reshape(4, 4))


@given(seeds, st.integers(1, 4), st.floats(0.05, 2.0))
def test_frac_power_composition(seed, d, s):
    rng = np.random.default_rng(seed)
    a = herm.random_density(d, rng)
    assert np.allclose(herm.frac_power(herm.frac_power(a, s), 1 / s), a, atol=1e-9)


def test_frac_power_on_support():
    p = herm.projector(0, 3)
    assert np.allclose(herm.frac_power(p, -0.5), p)
    assert np.allclose(herm.frac_power(p, 0.0), p)
    assert np.allclose(herm.log_on_support(p), 0)


@given(seeds, st.integers(1, 4))
def test_schatten_norms(seed, d):
    rng = np.random.default_rng(seed)
    a = herm.random_hermitian(d, rng)
    assert herm.schatten_norm(a, 2) == pytest.approx(np.linalg.norm(a, "fro"))
    assert herm.schatten_norm(a, np.inf) == pytest.approx(np.abs(np.linalg.eigvalsh(a)).max())
    assert herm.schatten_norm(a, 1) == pytest.approx(np.trace(herm.abs_op(a)).real)


@given(seeds, st.integers(1, 5))
def test_random_generators(seed, d):
    rng = np.random.default_rng(seed)
    u = herm.random_unitary(d, rng)
    assert np.allclose(u @ u.conj().T, np.eye(d))
    rho = herm.random_density(d, rng)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.linalg.eigvalsh(rho)[0] >= -1e-12
    psi = herm.random_pure(d, rng)
    assert np.allclose(psi @ psi, psi)


def test_positive_negative_parts():
    a = np.diag([2.0, -1.0])
    assert np.allclose(herm.positive_part(a), np.diag([2.0, 0.0]))
    assert np.allclose(herm.negative_part(a), np.diag([0.0, 1.0]))
    assert np.allclose(herm.abs_op(a), np.diag([2.0, 1.0]))
