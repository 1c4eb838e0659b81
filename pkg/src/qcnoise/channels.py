"""Kraus channels: construction, application and classification.

A qubit channel can turn a classically correlated state into a quantum
correlated one exactly when it is neither unital nor semi-classical; the
predicates behind that statement live here.  For ``dim > 2`` the same flag is
still computed but only as advice, since unital qudit channels can create
quantum correlations too.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadParameter, DimensionMismatch, EmptyKrausList, NotTracePreserving
from .numerics import (
    DEFAULT_TOL,
    DensityMatrix,
    _check_index,
    as_rng,
    bloch_of,
    haar_unitary,
    hermitian_basis,
    kron_all,
    random_simplex,
    simultaneous_eigenbasis,
)

CLASSIFY_TOL = 1e-8


@dataclass(frozen=True)
class KrausChannel:
    """Trace-preserving map ``rho -> sum_k E_k rho E_k^†``.

    ``kraus`` is a read-only array of shape ``(n, dim, dim)``.  Use
    :func:`validate_channel` to build one from untrusted input.
    """

    kraus: np.ndarray

    def __post_init__(self):
        k = np.array(self.kraus, dtype=complex)
        k.setflags(write=False)
        object.__setattr__(self, "kraus", k)

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]

    def __len__(self):
        return self.kraus.shape[0]

    def __call__(self, a: np.ndarray) -> np.ndarray:
        return np.einsum("kij,jl,kml->im", self.kraus, a, self.kraus.conj())


@dataclass(frozen=True)
class ChannelClass:
    unital: bool
    semi_classical: bool
    can_create_qc: bool
    sc_basis: np.ndarray | None = None
    unital_defect: float = 0.0
    # Bloch vector of the image of I/2, qubit channels only
    s: np.ndarray | None = None
    # can_create_qc is only a theorem for qubits
    advisory: bool = False

    def to_dict(self) -> dict:
        out = {
            "unital": self.unital,
            "semi_classical": self.semi_classical,
            "can_create_qc": self.can_create_qc,
            "advisory": self.advisory,
            "unital_defect": self.unital_defect,
        }
        if self.s is not None:
            out["s"] = [float(x) for x in self.s]
        return out


def tp_defect(kraus: np.ndarray) -> float:
    d = kraus.shape[1]
    return float(np.linalg.norm(np.einsum("kji,kjl->il", kraus.conj(), kraus) - np.eye(d), 2))


def validate_channel(kraus_list: Sequence, tol: float = DEFAULT_TOL.trace) -> KrausChannel:
    if len(kraus_list) == 0:
        raise EmptyKrausList("a channel needs at least one Kraus operator")
    mats = [np.asarray(k, dtype=complex) for k in kraus_list]
    shape = mats[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionMismatch(f"Kraus operators must be square, got {shape}")
    if any(m.shape != shape for m in mats):
        raise DimensionMismatch("Kraus operators have different shapes")
    k = np.stack(mats)
    defect = tp_defect(k)
    if defect > tol:
        raise NotTracePreserving("sum of E^† E differs from identity", defect)
    return KrausChannel(k)


def choi(ch: KrausChannel) -> np.ndarray:
    """Unnormalized Choi matrix, built from column-stacked Kraus operators."""
    vecs = ch.kraus.transpose(0, 2, 1).reshape(len(ch), -1)
    return np.einsum("ka,kb->ab", vecs, vecs.conj())


def same_action(a: KrausChannel, b: KrausChannel, tol: float = CLASSIFY_TOL) -> bool:
    if a.dim != b.dim:
        return False
    return float(np.linalg.norm(choi(a) - choi(b))) <= tol


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """Channel applying ``first`` then ``second``."""
    if second.dim != first.dim:
        raise DimensionMismatch(f"cannot compose dims {second.dim} and {first.dim}")
    k = np.einsum("aij,bjl->abil", second.kraus, first.kraus)
    return KrausChannel(k.reshape(-1, first.dim, first.dim))


# --------------------------------------------------------------------------
# standard channels


def _check_prob(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise BadParameter(f"{name} must lie in [0, 1], got {x}")


def identity(d: int) -> KrausChannel:
    return KrausChannel(np.eye(d)[None])


def phase_damping(d: int, p: float) -> KrausChannel:
    """Keeps populations, scales coherences by ``1 - p``."""
    _check_prob("p", p)
    if d < 1:
        raise BadParameter(f"dimension must be positive, got {d}")
    ks = [np.sqrt(1 - p) * np.eye(d)]
    for i in range(d):
        e = np.zeros((d, d))
        e[i, i] = np.sqrt(p)
        ks.append(e)
    return KrausChannel(np.stack(ks))


def amplitude_damping(gamma: float) -> KrausChannel:
    _check_prob("gamma", gamma)
    e0 = np.diag([1.0, np.sqrt(1 - gamma)])
    e1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    return KrausChannel(np.stack([e0, e1]))


def depolarizing(d: int, q: float) -> KrausChannel:
    """``rho -> (1 - q) rho + q I/d`` via the Weyl operators."""
    _check_prob("q", q)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    ks = []
    for a in range(d):
        for b in range(d):
            w = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            c = np.sqrt(1 - q + q / d**2) if a == b == 0 else np.sqrt(q) / d
            ks.append(c * w)
    return KrausChannel(np.stack(ks))


def unitary(u) -> KrausChannel:
    u = np.asarray(u, dtype=complex)
    defect = float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2))
    if defect > DEFAULT_TOL.trace:
        raise BadParameter(f"matrix is not unitary (defect {defect:.3g})")
    return KrausChannel(u[None])


def dephasing(basis) -> KrausChannel:
    """Complete decoherence in the basis given by the columns of ``basis``
    (an integer means the computational basis of that dimension)."""
    u = np.eye(basis) if np.isscalar(basis) else np.asarray(basis, dtype=complex)
    return KrausChannel(np.stack([np.outer(u[:, k], u[:, k].conj()) for k in range(u.shape[1])]))


def measure_prepare_example() -> KrausChannel:
    """Measure in the computational basis, re-prepare |0> or |+>."""
    plus = np.array([1, 1]) / np.sqrt(2)
    e1 = np.array([[1, 0], [0, 0]], dtype=complex)
    e2 = np.outer(plus, [0, 1]).astype(complex)
    return KrausChannel(np.stack([e1, e2]))


STANDARD = {
    "identity": identity,
    "phase_damping": phase_damping,
    "amplitude_damping": amplitude_damping,
    "depolarizing": depolarizing,
    "unitary": unitary,
    "dephasing": dephasing,
    "measure_prepare_example": measure_prepare_example,
}


def standard(kind: str, *args) -> KrausChannel:
    try:
        return STANDARD[kind](*args)
    except KeyError:
        raise BadParameter(f"unknown channel {kind!r}; choose from {sorted(STANDARD)}")


# --------------------------------------------------------------------------
# application


def apply(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    if ch.dim != rho.dim:
        raise DimensionMismatch(f"channel dim {ch.dim} vs state dim {rho.dim}")
    return DensityMatrix(ch(rho.matrix), rho.dims)


def lift(ch: KrausChannel, dims: Sequence[int], target: int) -> KrausChannel:
    """Explicit Kraus operators ``I ⊗ ... ⊗ E_k ⊗ ... ⊗ I``."""
    _check_index(dims, target)
    if ch.dim != dims[target]:
        raise DimensionMismatch(f"channel dim {ch.dim} vs subsystem dim {dims[target]}")
    eyes = [np.eye(d) for d in dims]
    return KrausChannel(np.stack([
        kron_all([e if k == target else eyes[k] for k in range(len(dims))]) for e in ch.kraus
    ]))


def apply_local_array(ch: KrausChannel, a: np.ndarray, dims: Sequence[int], target: int) -> np.ndarray:
    d = dims[target]
    pre = int(np.prod(dims[:target]))
    post = int(np.prod(dims[target + 1:]))
    t = a.reshape(pre, d, post, pre, d, post)
    out = np.einsum("kab,xbyucv,kdc->xayudv", ch.kraus, t, ch.kraus.conj())
    return out.reshape(a.shape)


def apply_local(ch: KrausChannel, rho: DensityMatrix, target: int) -> DensityMatrix:
    _check_index(rho.dims, target)
    if ch.dim != rho.dims[target]:
        raise DimensionMismatch(f"channel dim {ch.dim} vs subsystem dim {rho.dims[target]}")
    return DensityMatrix(apply_local_array(ch, rho.matrix, rho.dims, target), rho.dims)


# --------------------------------------------------------------------------
# classification


def is_unital(ch: KrausChannel, tol: float = CLASSIFY_TOL) -> tuple[bool, np.ndarray | None]:
    """Return ``(unital, s)`` where ``s`` is the Bloch vector of the image of
    the maximally mixed qubit (``None`` for ``dim != 2``)."""
    s = bloch_of(ch(np.eye(2) / 2)) if ch.dim == 2 else None
    return unital_defect(ch) <= tol, s


def unital_defect(ch: KrausChannel) -> float:
    d = ch.dim
    return float(np.linalg.norm(np.einsum("kij,klj->il", ch.kraus, ch.kraus.conj()) - np.eye(d), 2))


def semi_classical_basis(ch: KrausChannel, tol: float = CLASSIFY_TOL) -> np.ndarray | None:
    """The fixed basis in which every output is diagonal, or ``None``.

    The images of a Hermitian operator basis span every possible output, so
    the channel is semi-classical iff those images commute.
    """
    images = [ch(h) for h in hermitian_basis(ch.dim)]
    return simultaneous_eigenbasis(images, tol=tol)


def classify(ch: KrausChannel, tol: float = CLASSIFY_TOL) -> ChannelClass:
    unital, s = is_unital(ch, tol)
    basis = semi_classical_basis(ch, tol)
    sc = basis is not None
    return ChannelClass(
        unital=unital,
        semi_classical=sc,
        can_create_qc=not unital and not sc,
        sc_basis=basis,
        unital_defect=unital_defect(ch),
        s=s,
        advisory=ch.dim != 2,
    )


# --------------------------------------------------------------------------
# random channels


def random_unital_qubit(seed=None, n_unitaries: int = 3) -> KrausChannel:
    """Random mixture of Haar unitaries."""
    if n_unitaries < 1:
        raise BadParameter(f"n_unitaries must be >= 1, got {n_unitaries}")
    rng = as_rng(seed)
    q = random_simplex(n_unitaries, rng)
    return KrausChannel(np.stack([np.sqrt(qk) * haar_unitary(2, rng) for qk in q]))


def random_channel(d: int, n_kraus: int = 2, seed=None) -> KrausChannel:
    """Kraus operators cut from a Haar isometry ``C^d -> C^d ⊗ C^n``."""
    if n_kraus < 1:
        raise BadParameter(f"n_kraus must be >= 1, got {n_kraus}")
    u = haar_unitary(d * n_kraus, seed)
    v = u[:, :d]
    return KrausChannel(v.reshape(n_kraus, d, d))


def random_semi_classical(d: int, seed=None, n_kraus: int = 2) -> KrausChannel:
    """Random channel followed by complete dephasing in a Haar-random basis."""
    rng = as_rng(seed)
    inner = random_channel(d, n_kraus, rng)
    return compose(dephasing(haar_unitary(d, rng)), inner)
