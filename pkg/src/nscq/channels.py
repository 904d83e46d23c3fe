"""Classical-quantum channels, quantum channels in Choi form, and types.

A classical-quantum (CQ) channel is a finite list of density operators
``W_x`` on one output space. Classical channels embed as diagonal outputs.
"""

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import herm
from .errors import MalformedInputError, ResourceLimitError

DEFAULT_MAX_DIM = 4096
MAX_TYPES = 10_000_000


@dataclass(frozen=True, eq=False)
class CQChannel:
    """Finite-input channel ``x -> W_x``.

    Attributes:
        outputs: array of shape ``(|X|, d, d)`` of density operators.
        name: optional label used in reports.
    """

    outputs: np.ndarray
    name: str = ""

    def __post_init__(self):
        w = np.asarray(self.outputs, dtype=complex)
        if w.ndim != 3 or w.shape[1] != w.shape[2] or w.shape[0] < 1:
            raise MalformedInputError(f"outputs must have shape (|X|, d, d), got {w.shape}")
        w = np.stack([herm.density(wx) for wx in w])
        w.setflags(write=False)
        object.__setattr__(self, "outputs", w)

    @property
    def num_inputs(self):
        return self.outputs.shape[0]

    @property
    def dim(self):
        return self.outputs.shape[1]

    def __getitem__(self, x):
        return self.outputs[x]

    def is_classical(self, tol=1e-12):
        """True when every output is diagonal in the computational basis."""
        off = self.outputs - np.einsum("xii,ij->xij", self.outputs, np.eye(self.dim))
        return bool(np.max(np.abs(off)) <= tol)

    def average_output(self, p):
        """``pW = sum_x p(x) W_x``."""
        return np.einsum("x,xij->ij", np.asarray(p, dtype=float), self.outputs)


@dataclass(frozen=True, eq=False)
class QuantumChannelChoi:
    """Quantum channel given by its Choi operator ``J = sum |i><j| (x) N(|i><j|)``.

    Attributes:
        choi: PSD matrix on ``A (x) B`` with ``tr_B J = I_A``.
        dim_in: input dimension ``|A|``.
        dim_out: output dimension ``|B|``.
    """

    choi: np.ndarray
    dim_in: int
    dim_out: int
    name: str = ""

    def __post_init__(self):
        j = herm.hermitian(self.choi)
        da, db = self.dim_in, self.dim_out
        if j.shape != (da * db, da * db):
            raise MalformedInputError("Choi matrix has the wrong dimension")
        if np.linalg.eigvalsh(j)[0] < -1e-9:
            raise MalformedInputError("Choi matrix is not positive semidefinite")
        tp = herm.partial_trace(j, [da, db], [0])
        if np.max(np.abs(tp - np.eye(da))) > 1e-9:
            raise MalformedInputError("channel is not trace preserving")
        j.setflags(write=False)
        object.__setattr__(self, "choi", j)


def input_distribution(p, size=None, tol=1e-10):
    """Validate a probability vector (non-negative, sums to one)."""
    p = np.asarray(p, dtype=float).ravel()
    if size is not None and p.size != size:
        raise MalformedInputError(f"distribution has {p.size} entries, expected {size}")
    if np.any(p < -tol) or abs(p.sum() - 1.0) > tol:
        raise MalformedInputError("not a probability distribution")
    return np.clip(p, 0.0, None)


def joint_state(p, channel):
    """CQ state ``p o W = sum_x p(x) |x><x| (x) W_x``."""
    p = input_distribution(p, channel.num_inputs)
    k, d = channel.num_inputs, channel.dim
    out = np.zeros((k * d, k * d), dtype=complex)
    for x in range(k):
        out[x * d:(x + 1) * d, x * d:(x + 1) * d] = p[x] * channel.outputs[x]
    return out


def classical_embed(stochastic, name=""):
    """Embed a column-stochastic matrix ``P[y, x] = P(y|x)`` as a CQ channel."""
    s = np.asarray(stochastic, dtype=float)
    if s.ndim != 2 or np.any(s < -1e-12) or np.max(np.abs(s.sum(axis=0) - 1)) > 1e-10:
        raise MalformedInputError("expected a column-stochastic matrix")
    return CQChannel(np.stack([np.diag(col) for col in s.T]).astype(complex), name=name)


def bsc(delta):
    """Binary symmetric channel with crossover probability ``delta``."""
    return classical_embed([[1 - delta, delta], [delta, 1 - delta]], name=f"bsc({delta})")


def noiseless(k=2):
    """Noiseless classical channel on ``k`` symbols."""
    return classical_embed(np.eye(k), name=f"noiseless({k})")


def tensor_power(channel, n, max_dim=DEFAULT_MAX_DIM):
    """``W^{(x) n}``: inputs are sequences ``x^n`` in lexicographic order.

    Raises:
        ResourceLimitError: if ``|X|^n * d^n`` exceeds ``max_dim``.
    """
    if n < 1:
        raise MalformedInputError("n must be positive")
    k, d = channel.num_inputs, channel.dim
    if k ** n * d ** n > max_dim:
        raise ResourceLimitError(f"|X|^n d^n = {k ** n * d ** n} exceeds cap {max_dim}")
    outs = [herm.kron_all([channel.outputs[x] for x in seq])
            for seq in itertools.product(range(k), repeat=n)]
    return CQChannel(np.stack(outs), name=f"{channel.name}^{n}")


def tensor_product(w1, w2):
    """Product channel on ``X1 x X2`` with outputs ``W1_x (x) W2_x'``."""
    outs = [np.kron(a, b) for a in w1.outputs for b in w2.outputs]
    return CQChannel(np.stack(outs), name=f"{w1.name}*{w2.name}")


def tensor_with_ideal_bit(channel):
    """``W (x) I_2``: input ``(x, i)`` at index ``2x + i`` gives ``W_x (x) |i><i|``."""
    return tensor_product(channel, noiseless(2))


def choi_of_cq(channel):
    """Choi operator of the measure-and-prepare channel ``rho -> sum <x|rho|x> W_x``."""
    k, d = channel.num_inputs, channel.dim
    j = np.zeros((k * d, k * d), dtype=complex)
    for x in range(k):
        j[x * d:(x + 1) * d, x * d:(x + 1) * d] = channel.outputs[x]
    return QuantumChannelChoi(j, k, d, name=f"choi[{channel.name}]")


def choi_from_kraus(kraus, name=""):
    """Choi operator ``sum_{ij} |i><j| (x) N(|i><j|)`` from Kraus operators."""
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    db, da = kraus[0].shape
    vec = np.zeros((da * db, len(kraus)), dtype=complex)
    for c, k in enumerate(kraus):
        # sum_i |i> (x) K|i>
        vec[:, c] = k.T.reshape(-1)
    return QuantumChannelChoi(vec @ vec.conj().T, da, db, name=name)


def unitary_choi(u):
    """Choi operator of ``rho -> U rho U^H``."""
    return choi_from_kraus([u], name="unitary")


def identity_choi(d):
    """Choi operator of the identity channel on dimension ``d``."""
    return choi_from_kraus([np.eye(d)], name=f"id({d})")


def depolarizing_choi(d, prob):
    """Choi operator of ``rho -> (1 - prob) rho + prob tr(rho) I / d``."""
    ident = identity_choi(d).choi
    j = (1 - prob) * ident + prob * np.eye(d * d) / d
    return QuantumChannelChoi(j, d, d, name=f"depol({d},{prob})")


def apply_choi(channel, rho):
    """Output ``N(rho) = tr_A[(rho^T (x) I) J]``."""
    da, db = channel.dim_in, channel.dim_out
    op = np.kron(np.asarray(rho).T, np.eye(db)) @ channel.choi
    return herm.partial_trace(op, [da, db], [1])


@dataclass(frozen=True)
class TypeComposition:
    """Counts ``(n_1, ..., n_|X|)`` of a type class of length ``n``."""

    counts: tuple

    @property
    def n(self):
        return int(sum(self.counts))

    @property
    def distribution(self):
        c = np.asarray(self.counts, dtype=float)
        return c / c.sum()

    def sequence(self):
        """Canonical representative: symbols in ascending order."""
        return [x for x, c in enumerate(self.counts) for _ in range(c)]


def num_types(n, k):
    """Number of types ``C(n + k - 1, k - 1)``."""
    return math.comb(n + k - 1, k - 1)


def enumerate_types(n, k):
    """All compositions of ``n`` into ``k`` non-negative parts.

    Raises:
        ResourceLimitError: if the count overflows the enumeration cap.
    """
    if num_types(n, k) > MAX_TYPES:
        raise ResourceLimitError("too many types to enumerate")
    out = []
    for bars in itertools.combinations(range(n + k - 1), k - 1):
        prev = -1
        counts = []
        for b in bars:
            counts.append(b - prev - 1)
            prev = b
        counts.append(n + k - 2 - prev)
        out.append(TypeComposition(tuple(counts)))
    return out


def type_of(seq, k):
    """Type composition of a sequence over ``range(k)``."""
    return TypeComposition(tuple(int(c) for c in np.bincount(np.asarray(seq, dtype=int), minlength=k)))


def type_product_state(channel, t):
    """``W_T^{(x) n}`` for the canonical sequence of type ``t``."""
    return herm.kron_all([channel.outputs[x] for x in t.sequence()])


def _sequence_types(n, k):
    seqs = np.array(list(itertools.product(range(k), repeat=n)), dtype=int).reshape(-1, n)
    counts = np.stack([(seqs == x).sum(axis=1) for x in range(k)], axis=1)
    return seqs, counts


def symmetrize(p, n, k):
    """Average a distribution on ``X^n`` over all permutations of positions.

    Args:
        p: probabilities on sequences in lexicographic order (length ``k**n``).

    Returns:
        The permutation-invariant distribution, constant on type classes.
    """
    p = np.asarray(p, dtype=float).reshape(-1)
    _, counts = _sequence_types(n, k)
    _, inv = np.unique(counts, axis=0, return_inverse=True)
    inv = inv.ravel()
    mass = np.bincount(inv, weights=p)
    size = np.bincount(inv)
    return mass[inv] / size[inv]


def decompose_by_type(p, n, k):
    """Write the symmetrized ``p`` as ``sum_T alpha_T U_T``.

    Returns:
        Dict mapping :class:`TypeComposition` to ``(alpha_T, U_T)`` where
        ``U_T`` is the uniform distribution on the type class.
    """
    ps = symmetrize(p, n, k)
    _, counts = _sequence_types(n, k)
    out = {}
    for t in enumerate_types(n, k):
        mask = np.all(counts == np.asarray(t.counts), axis=1)
        u = mask / mask.sum()
        out[t] = (float(ps[mask].sum()), u)
    return out


def _encode_matrix(m):
    return [[float(v.real), float(v.imag)] for v in np.asarray(m, dtype=complex).reshape(-1)]


def _decode_matrix(entries, rows, cols):
    arr = []
    for e in entries:
        if isinstance(e, (list, tuple)):
            if len(e) != 2:
                raise MalformedInputError("matrix entries must be [re, im] pairs")
            arr.append(complex(e[0], e[1]))
        else:
            arr.append(complex(e))
    if len(arr) != rows * cols:
        raise MalformedInputError(f"expected {rows * cols} entries, got {len(arr)}")
    return np.array(arr).reshape(rows, cols)


def channel_to_dict(channel):
    """Serialize a channel to the JSON channel-file layout."""
    if isinstance(channel, QuantumChannelChoi):
        return {"kind": "choi", "alphabet": channel.dim_in, "dim": channel.dim_out,
                "name": channel.name, "matrices": [_encode_matrix(channel.choi)]}
    d = channel.dim
    return {"kind": "cq", "alphabet": channel.num_inputs, "dim": d,
            "name": channel.name, "matrices": [_encode_matrix(w) for w in channel.outputs]}


def channel_from_dict(obj):
    """Parse the JSON channel-file layout.

    ``kind`` is ``"cq"`` (one ``dim x dim`` matrix per input), ``"classical"``
    (one ``dim x alphabet`` column-stochastic matrix) or ``"choi"`` (one
    ``(alphabet*dim)``-square Choi matrix, ``alphabet`` being the input
    dimension). Entries are row-major, each a number or a ``[re, im]`` pair.
    """
    try:
        kind = obj["kind"]
        k = int(obj["alphabet"])
        d = int(obj["dim"])
        mats = obj["matrices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(f"channel file missing field: {exc}") from exc
    name = str(obj.get("name", ""))
    if kind == "cq":
        if len(mats) != k:
            raise MalformedInputError("need one matrix per input symbol")
        return CQChannel(np.stack([_decode_matrix(m, d, d) for m in mats]), name=name)
    if kind == "classical":
        if len(mats) != 1:
            raise MalformedInputError("classical channel needs one stochastic matrix")
        s = _decode_matrix(mats[0], d, k)
        if np.max(np.abs(s.imag)) > 0:
            raise MalformedInputError("stochastic matrix must be real")
        return classical_embed(s.real, name=name)
    if kind == "choi":
        if len(mats) != 1:
            raise MalformedInputError("choi channel needs one matrix")
        return QuantumChannelChoi(_decode_matrix(mats[0], k * d, k * d), k, d, name=name)
    raise MalformedInputError(f"unknown channel kind {kind!r}")


def load_channel(path):
    """Read a channel file."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInputError(f"cannot read channel file {path}: {exc}") from exc
    return channel_from_dict(obj)


def save_channel(channel, path):
    with open(path, "w") as fh:
        json.dump(channel_to_dict(channel), fh, indent=1)


def random_cq_channel(num_inputs, dim, rng, rank=None, name=""):
    """CQ channel with independent random density-matrix outputs."""
    outs = np.stack([herm.random_density(dim, rng, rank=rank) for _ in range(num_inputs)])
    return CQChannel(outs, name=name)


def random_stochastic(num_outputs, num_inputs, rng):
    """Random column-stochastic matrix with Dirichlet(1) columns."""
    return rng.dirichlet(np.ones(num_outputs), size=num_inputs).T
