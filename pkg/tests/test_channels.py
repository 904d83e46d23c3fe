import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nscq import channels as ch
from nscq import herm
from nscq.errors import MalformedInputError, ResourceLimitError

from conftest import seeds


def test_cq_channel_validation():
    with pytest.raises(MalformedInputError):
        ch.CQChannel(np.ones((2, 2, 3)))
    with pytest.raises(MalformedInputError):
        ch.CQChannel(np.stack([np.diag([0.5, 0.6])]))
    w = ch.bsc(0.1)
    assert w.num_inputs == 2 and w.dim == 2 and w.is_classical()
    assert not w.outputs.flags.writeable


def test_classical_embed_rejects_non_stochastic():
    with pytest.raises(MalformedInputError):
        ch.classical_embed([[0.5, 0.2], [0.4, 0.8]])


def test_tensor_power_layout():
    w = ch.bsc(0.2)
    w2 = ch.tensor_power(w, 2)
    assert w2.num_inputs == 4 and w2.dim == 4
    # input (1, 0) is index 2
    assert np.allclose(w2[2], np.kron(w[1], w[0]))
    with pytest.raises(ResourceLimitError):
        ch.tensor_power(w, 6, max_dim=1000)


def test_ideal_bit_layout():
    w = ch.bsc(0.2)
    wi = ch.tensor_with_ideal_bit(w)
    assert np.allclose(wi[3], np.kron(w[1], herm.projector(1, 2)))


@given(st.integers(1, 6), st.integers(1, 4))
def test_type_count(n, k):
    types = ch.enumerate_types(n, k)
    assert len(types) == ch.num_types(n, k) == math.comb(n + k - 1, k - 1)
    assert len(set(types)) == len(types)
    assert all(t.n == n and len(t.counts) == k for t in types)
    # polynomial bound used by the method of types
    assert len(types) <= (n + 1) ** k


@given(st.integers(1, 5), st.integers(1, 3))
def test_type_classes_partition_sequences(n, k):
    total = sum(math.factorial(n) // math.prod(math.factorial(c) for c in t.counts)
                for t in ch.enumerate_types(n, k))
    assert total == k ** n


def test_type_of_and_sequence():
    t = ch.type_of([2, 0, 2, 1], 3)
    assert t.counts == (1, 1, 2)
    assert t.sequence() == [0, 1, 2, 2]
    assert np.allclose(t.distribution, [0.25, 0.25, 0.5])


@given(seeds, st.integers(1, 4), st.integers(2, 3))
def test_symmetrize_is_permutation_invariant(seed, n, k):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(k ** n))
    ps = ch.symmetrize(p, n, k)
    assert ps.sum() == pytest.approx(1.0)
    seqs = list(itertools.product(range(k), repeat=n))
    index = {s: i for i, s in enumerate(seqs)}
    for perm in itertools.permutations(range(n)):
        permuted = np.array([ps[index[tuple(s[j] for j in perm)]] for s in seqs])
        assert np.allclose(permuted, ps)
    assert np.allclose(ch.symmetrize(ps, n, k), ps)


@given(seeds, st.integers(1, 4), st.integers(2, 3))
def test_decompose_by_type(seed, n, k):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(k ** n))
    parts = ch.decompose_by_type(p, n, k)
    assert sum(a for a, _ in parts.values()) == pytest.approx(1.0)
    mix = sum(a * u for a, u in parts.values())
    assert np.allclose(mix, ch.symmetrize(p, n, k))
    for u in (u for _, u in parts.values()):
        on = u[u > 0]
        assert np.allclose(on, on[0])


@given(seed=seeds, k=st.integers(1, 3), d=st.integers(1, 3))
def test_json_round_trip(tmp_path_factory, seed, k, d):
    rng = np.random.default_rng(seed)
    w = ch.random_cq_channel(k, d, rng, name="rand")
    path = tmp_path_factory.mktemp("ch") / "w.json"
    ch.save_channel(w, path)
    back = ch.load_channel(path)
    assert np.allclose(back.outputs, w.outputs)
    choi = ch.depolarizing_choi(2, 0.3)
    back = ch.channel_from_dict(json.loads(json.dumps(ch.channel_to_dict(choi))))
    assert np.allclose(back.choi, choi.choi)


def test_classical_file_kind():
    obj = {"kind": "classical", "alphabet": 2, "dim": 3,
           "matrices": [[0.5, 0.1, 0.25, 0.4, 0.25, 0.5]]}
    w = ch.channel_from_dict(obj)
    assert np.allclose(np.diag(w[0]).real, [0.5, 0.25, 0.25])
    assert np.allclose(np.diag(w[1]).real, [0.1, 0.4, 0.5])


@pytest.mark.parametrize("obj", [
    {"kind": "cq", "alphabet": 2, "dim": 2, "matrices": [[1, 0, 0, 0]]},
    {"kind": "bogus", "alphabet": 1, "dim": 1, "matrices": [[1]]},
    {"alphabet": 1, "dim": 1, "matrices": [[1]]},
    {"kind": "cq", "alphabet": 1, "dim": 2, "matrices": [[[1, 0], [0, 0], [0, 0]]]},
    {"kind": "choi", "alphabet": 2, "dim": 2, "matrices": [[1] * 16]},
])
def test_malformed_channel_files(obj):
    with pytest.raises(MalformedInputError):
        ch.channel_from_dict(obj)


def test_choi_constructors():
    j = ch.identity_choi(2)
    rho = herm.random_density(2, np.random.default_rng(0))
    assert np.allclose(ch.apply_choi(j, rho), rho)
    dep = ch.depolarizing_choi(2, 1.0)
    assert np.allclose(ch.apply_choi(dep, rho), np.eye(2) / 2)
    w = ch.bsc(0.3)
    jc = ch.choi_of_cq(w)
    assert np.allclose(ch.apply_choi(jc, herm.projector(1, 2)), w[1])


@given(seeds)
def test_joint_state(seed):
    rng = np.random.default_rng(seed)
    w = ch.random_cq_channel(3, 2, rng)
    p = rng.dirichlet(np.ones(3))
    js = ch.joint_state(p, w)
    assert np.trace(js).real == pytest.approx(1.0)
    assert np.allclose(herm.partial_trace(js, [3, 2], [1]), w.average_output(p))
    with pytest.raises(MalformedInputError):
        ch.joint_state([0.5, 0.6, -0.1], w)
