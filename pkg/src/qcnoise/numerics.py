"""Dense linear algebra, state validation and sampling.

Every other module works on plain ``numpy`` arrays internally and wraps
results in the small immutable containers defined here at the API
boundary.  Logarithms are base 2 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import lapack

from .errors import (
    BadParameter,
    BlochNormExceeded,
    DimensionMismatch,
    IndexOutOfRange,
    NotHermitian,
    NotNormalized,
    NotPositive,
    NotQubit,
    TraceNotOne,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-9
    psd: float = 1e-9
    trace: float = 1e-9
    spec: float = 1e-10
    supp: float = 1e-10
    norm: float = 1e-9


DEFAULT_TOL = Tolerances()


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DensityMatrix:
    """A validated state together with its subsystem dimensions.

    Build instances through :func:`validate_density`; the constructor itself
    does not check anything.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class ProductBasis:
    """One orthonormal basis per subsystem, stored as unitaries whose columns
    are the basis vectors."""

    unitaries: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "unitaries", tuple(_frozen(u) for u in self.unitaries))

    @classmethod
    def computational(cls, dims: Sequence[int]) -> "ProductBasis":
        return cls(tuple(np.eye(d, dtype=complex) for d in dims))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.unitaries)

    def matrix(self) -> np.ndarray:
        return kron_all(self.unitaries)

    def replace(self, index: int, unitary: np.ndarray) -> "ProductBasis":
        us = list(self.unitaries)
        us[index] = unitary
        return ProductBasis(tuple(us))


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def kron2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``np.kron`` for two square matrices, without its generic overhead."""
    m, n = a.shape[0], b.shape[0]
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(m * n, m * n)


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(kron2, mats)


def eigh_small(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian eigendecomposition (ascending) straight from LAPACK; the
    ``numpy`` wrapper costs more than the decomposition at these sizes."""
    w, v, info = lapack.zheev(a)
    if info != 0:
        return np.linalg.eigh(a)
    return w, v


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermiticity_defect(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of ``[a, b]``."""
    return float(np.linalg.norm(a @ b - b @ a))


# --------------------------------------------------------------------------
# validation and construction


def validate_density(matrix, dims: Sequence[int] | None = None,
                     tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """Check that ``matrix`` is a state and wrap it.

    Raises
    ------
    DimensionMismatch
        Non-square input or ``prod(dims)`` different from the matrix size.
    NotHermitian, TraceNotOne, NotPositive
        With the size of the violation as ``defect``.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got shape {a.shape}")
    n = a.shape[0]
    dims = (n,) if dims is None else tuple(int(d) for d in dims)
    if any(d < 1 for d in dims) or int(np.prod(dims)) != n:
        raise DimensionMismatch(f"dims {list(dims)} do not multiply to {n}")
    herm = hermiticity_defect(a)
    if herm > tol.herm:
        raise NotHermitian("matrix is not Hermitian", herm)
    a = 0.5 * (a + a.conj().T)
    tr = float(np.real(np.trace(a)))
    if abs(tr - 1.0) > tol.trace:
        raise TraceNotOne("trace differs from 1", abs(tr - 1.0))
    lo = float(np.linalg.eigvalsh(a)[0])
    if lo < -tol.psd:
        raise NotPositive("matrix has a negative eigenvalue", -lo)
    return DensityMatrix(a, dims)


def validate_pure(amplitudes, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    err = abs(float(np.vdot(psi, psi).real) - 1.0)
    if err > tol.norm:
        raise NotNormalized("state vector is not normalized", err)
    return psi


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def pure_density(psi, dims: Sequence[int] | None = None,
                 tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    psi = validate_pure(psi, tol)
    return DensityMatrix(projector(psi), dims or (psi.size,))


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    n = int(np.prod(dims))
    return DensityMatrix(np.eye(n) / n, dims)


# --------------------------------------------------------------------------
# composition


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(np.kron(a.matrix, b.matrix), a.dims + b.dims)


def _check_index(dims: Sequence[int], index: int) -> None:
    if not 0 <= index < len(dims):
        raise IndexOutOfRange(f"subsystem {index} out of range for dims {list(dims)}")


def partial_trace_array(a: np.ndarray, dims: Sequence[int], keep: int) -> np.ndarray:
    n = len(dims)
    t = a.reshape(tuple(dims) * 2)
    rows = list(range(n))
    cols = [n + k for k in range(n)]
    for k in range(n):
        if k != keep:
            cols[k] = rows[k]
    return np.einsum(t, rows + cols, [keep, n + keep])


def partial_trace(rho: DensityMatrix, keep: int) -> DensityMatrix:
    _check_index(rho.dims, keep)
    return DensityMatrix(partial_trace_array(rho.matrix, rho.dims, keep), (rho.dims[keep],))


def lift_operator(op: np.ndarray, dims: Sequence[int], target: int) -> np.ndarray:
    """``I ⊗ ... ⊗ op ⊗ ... ⊗ I`` with ``op`` on subsystem ``target``."""
    _check_index(dims, target)
    return kron_all([op if k == target else np.eye(d) for k, d in enumerate(dims)])


# --------------------------------------------------------------------------
# Bloch representation (sigma_z |0> = +|0>)


def bloch_of(rho) -> np.ndarray:
    a = np.asarray(rho.matrix if isinstance(rho, DensityMatrix) else rho, dtype=complex)
    if a.shape != (2, 2):
        raise NotQubit(f"expected a 2x2 state, got shape {a.shape}")
    return np.array([2 * a[0, 1].real, -2 * a[0, 1].imag, (a[0, 0] - a[1, 1]).real]) + 0.0


def bloch_operator(v) -> np.ndarray:
    """``v · sigma`` without the identity part."""
    x, y, z = np.asarray(v, dtype=float)
    return x * PAULI_X + y * PAULI_Y + z * PAULI_Z


def qubit_of(v, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    v = np.asarray(v, dtype=float)
    r = float(np.linalg.norm(v))
    if r > 1 + tol.norm:
        raise BlochNormExceeded("Bloch vector longer than 1", r - 1)
    return DensityMatrix(0.5 * (np.eye(2) + bloch_operator(v)), (2,))


# --------------------------------------------------------------------------
# spectra and matrix functions


def spectral(h, tol: Tolerances = DEFAULT_TOL) -> SpectralDecomposition:
    a = np.asarray(h.matrix if isinstance(h, DensityMatrix) else h, dtype=complex)
    herm = hermiticity_defect(a)
    if herm > tol.herm:
        raise NotHermitian("matrix is not Hermitian", herm)
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return SpectralDecomposition(w[::-1].copy(), v[:, ::-1].copy())


def sqrtm_psd(a: np.ndarray, tol: float = DEFAULT_TOL.psd) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    if w[0] < -tol:
        raise NotPositive("square root of a non-PSD matrix", -w[0])
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def _root_fidelity(sqrt_rho: np.ndarray, sigma: np.ndarray) -> float:
    m = sqrt_rho @ sigma @ sqrt_rho
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    return float(np.sum(np.sqrt(np.clip(w, 0, None))))


RANK_CUTOFF = 1e-14


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

    Eigenvalues of ``rho`` below ``RANK_CUTOFF`` (relative) are treated as
    zero: at rounding level they would otherwise shift ``F`` by their square
    root, about 1e-8.
    """
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"dimensions {rho.dim} and {sigma.dim} differ")
    w, v = np.linalg.eigh(rho.matrix)
    w[w < RANK_CUTOFF * max(w[-1], 1.0)] = 0.0
    f = _root_fidelity((v * np.sqrt(w)) @ v.conj().T, sigma.matrix) ** 2
    return float(min(max(f, 0.0), 1.0))


def _xlog2x(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0, None)
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def shannon_entropy(p) -> float:
    return float(-np.sum(_xlog2x(np.asarray(p, dtype=float))))


def von_neumann_entropy(rho) -> float:
    a = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return shannon_entropy(np.linalg.eigvalsh(a))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix,
                     tol: Tolerances = DEFAULT_TOL) -> float:
    """``S(rho || sigma)`` in bits; ``inf`` when the support of ``rho`` is not
    contained in that of ``sigma``."""
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"dimensions {rho.dim} and {sigma.dim} differ")
    lam = np.linalg.eigvalsh(rho.matrix)
    mu, v = np.linalg.eigh(sigma.matrix)
    weights = np.real(np.einsum("ik,ij,jk->k", v.conj(), rho.matrix, v))
    null = mu <= tol.supp
    if np.any(weights[null] > tol.supp):
        return float("inf")
    cross = float(np.sum(weights[~null] * np.log2(mu[~null])))
    return max(float(np.sum(_xlog2x(lam))) - cross, 0.0)


def dephase_array(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    d = diagonal_in(a, w)
    return (w * d) @ w.conj().T


def dephase(rho: DensityMatrix, basis: ProductBasis) -> DensityMatrix:
    """Pinch ``rho`` onto the rank-one product projectors of ``basis``."""
    if basis.dims != rho.dims:
        raise DimensionMismatch(f"basis dims {list(basis.dims)} vs state dims {list(rho.dims)}")
    return DensityMatrix(dephase_array(rho.matrix, basis.matrix()), rho.dims)


def diagonal_in(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Real diagonal of ``w^† a w``."""
    return np.real(np.sum(w.conj() * (a @ w), axis=0))


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal (Hilbert-Schmidt) basis of ``d x d`` Hermitian matrices."""
    out = []
    for k in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[k, k] = 1
        out.append(e)
    s = 1 / np.sqrt(2)
    for k in range(d):
        for l in range(k + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[k, l] = e[l, k] = s
            out.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[k, l], e[l, k] = -1j * s, 1j * s
            out.append(e)
    return out


def offdiag_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def simultaneous_eigenbasis(mats: Sequence[np.ndarray], tol: float = 1e-8,
                            seed=0, retries: int = 5) -> np.ndarray | None:
    """Unitary diagonalizing every Hermitian matrix in ``mats``, or ``None``.

    A random real combination splits degeneracies with probability one; the
    result is verified against every input and the draw is repeated on
    failure.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    d = mats[0].shape[0]
    scale = max(1.0, max(float(np.linalg.norm(m)) for m in mats))
    for i, a in enumerate(mats):
        for b in mats[i + 1:]:
            if commutator_norm(a, b) > tol * scale:
                return None
    rng = as_rng(seed)
    for _ in range(retries + 1):
        c = rng.standard_normal(len(mats))
        combo = sum(ci * m for ci, m in zip(c, mats)) if mats else np.zeros((d, d))
        _, v = np.linalg.eigh(0.5 * (combo + combo.conj().T))
        if all(offdiag_norm(v.conj().T @ m @ v) <= tol * scale for m in mats):
            return canonical_basis(v)
    return None


def canonical_basis(u: np.ndarray) -> np.ndarray:
    """Reorder and rephase columns so that each column's largest entry is real
    positive and columns are sorted by the row of that entry."""
    u = np.array(u, dtype=complex)
    peaks = np.argmax(np.abs(u) - 1e-9 * np.arange(u.shape[0])[:, None], axis=0)
    u = u * np.exp(-1j * np.angle(u[peaks, np.arange(u.shape[1])]))
    return u[:, np.argsort(peaks, kind="stable")]


def expi_hermitian(params: np.ndarray, d: int) -> np.ndarray:
    """``exp(iH)`` for the Hermitian ``H`` with zero diagonal whose upper
    triangle holds ``params`` as (real, imag) pairs; ``d*d - d`` numbers."""
    if d == 1:
        return np.ones((1, 1), dtype=complex)
    if d == 2:
        a, b = params
        r = np.hypot(a, b)
        if r == 0.0:
            return np.eye(2, dtype=complex)
        c, s = np.cos(r), np.sin(r) / r
        # H = a X - b Y  (H01 = a + ib)
        return np.array([[c, 1j * s * (a + 1j * b)], [1j * s * (a - 1j * b), c]])
    h = np.zeros((d, d), dtype=complex)
    iu = np.triu_indices(d, 1)
    h[iu] = params[0::2] + 1j * params[1::2]
    h = h + h.conj().T
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


# --------------------------------------------------------------------------
# sampling


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def substream(seed: int, *index: int) -> np.random.Generator:
    """Independent generator for one restart or trial, fixed by ``(seed, index)``
    alone so results do not depend on execution order."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, *index])


def haar_unitary(d: int, seed=None) -> np.ndarray:
    if d < 1:
        raise BadParameter(f"dimension must be positive, got {d}")
    rng = as_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_simplex(n: int, seed=None) -> np.ndarray:
    if n < 1:
        raise BadParameter(f"simplex size must be positive, got {n}")
    return as_rng(seed).dirichlet(np.ones(n))


def random_pure_state(d: int, seed=None) -> np.ndarray:
    if d < 1:
        raise BadParameter(f"dimension must be positive, got {d}")
    rng = as_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density(d: int, rank: int | None = None, seed=None,
                   dims: Sequence[int] | None = None) -> DensityMatrix:
    rank = d if rank is None else rank
    if d < 1 or not 1 <= rank <= d:
        raise BadParameter(f"need 1 <= rank <= d, got rank={rank}, d={d}")
    rng = as_rng(seed)
    u = haar_unitary(d, rng)
    p = np.zeros(d)
    p[:rank] = random_simplex(rank, rng)
    a = (u * p) @ u.conj().T
    return DensityMatrix(0.5 * (a + a.conj().T), dims or (d,))


_SAMPLERS = {
    "haar_unitary": haar_unitary,
    "pure_state": random_pure_state,
    "density": random_density,
    "simplex": random_simplex,
}


def sample(kind: str, *args, seed=None, **kwargs):
    """Dispatch to one of the samplers by name, e.g.
    ``sample("density", 4, 2, seed=7)``."""
    try:
        fn = _SAMPLERS[kind]
    except KeyError:
        raise BadParameter(f"unknown sample kind {kind!r}; choose from {sorted(_SAMPLERS)}")
    return fn(*args, seed=seed, **kwargs)
