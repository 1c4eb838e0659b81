"""Detection of classically correlated bipartite states.

A state is classically correlated (CC) when it is diagonal in some product
basis.  The exact route first checks whether the state is classical on B:
writing ``rho = sum_a X_a ⊗ B_a`` over a Hermitian operator basis ``X_a`` of
A, that holds iff the ``B_a`` commute, and their common eigenbasis is then
the B-basis (up to rotations inside joint eigenspaces, which do not change
the conditional states).  The state is CC iff the conditional states of A in
that basis also commute.  When this test fails the Hilbert-Schmidt distance
to the nearest dephased state is minimized numerically as a backstop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .numerics import (
    DensityMatrix,
    ProductBasis,
    commutator_norm,
    dephase_array,
    hermitian_basis,
    kron2,
    offdiag_norm,
    simultaneous_eigenbasis,
)
from .optimize import OptimizerConfig, minimize_over_product_bases

TOL_CC = 1e-7
PROB_TOL = 1e-12


@dataclass(frozen=True)
class ConditionalEnsemble:
    """Weights ``q_j`` and normalized conditional states of A given ``|j>`` on B."""

    basis_B: np.ndarray
    probs: np.ndarray
    states: tuple
    indices: tuple  # B-basis index of each surviving member
    dropped: tuple = ()

    def reconstruct(self) -> np.ndarray:
        dA = self.states[0].shape[0] if self.states else 1
        dB = self.basis_B.shape[0]
        out = np.zeros((dA * dB, dA * dB), dtype=complex)
        for q, s, j in zip(self.probs, self.states, self.indices):
            b = self.basis_B[:, j]
            out += q * np.kron(s, np.outer(b, b.conj()))
        return out


@dataclass
class ClassicalityVerdict:
    is_cc: bool
    residual: float
    witness_basis: ProductBasis | None = None
    method: str = "exact"
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"is_cc": self.is_cc, "residual": self.residual, "method": self.method}
        if self.witness_basis is not None:
            out["witness_basis"] = list(self.witness_basis.unitaries)
        out["diagnostics"] = self.diagnostics
        return out


def _bipartite(rho: DensityMatrix) -> tuple[int, int]:
    if len(rho.dims) != 2:
        raise DimensionMismatch(f"expected a bipartite state, got dims {list(rho.dims)}")
    return rho.dims


def _blocks(a: np.ndarray, dA: int, dB: int, basis_B: np.ndarray) -> np.ndarray:
    """``<j|rho|j>_B`` for every basis vector ``j``; shape ``(dB, dA, dA)``."""
    t = a.reshape(dA, dB, dA, dB)
    return np.einsum("bj,abcd,dj->jac", basis_B.conj(), t, basis_B)


def conditional_ensemble(rho: DensityMatrix, basis_B: np.ndarray | None = None,
                         tol: float = PROB_TOL) -> ConditionalEnsemble:
    dA, dB = _bipartite(rho)
    basis_B = np.eye(dB, dtype=complex) if basis_B is None else np.asarray(basis_B, dtype=complex)
    if basis_B.shape != (dB, dB):
        raise DimensionMismatch(f"B-basis shape {basis_B.shape} vs dim {dB}")
    blocks = _blocks(rho.matrix, dA, dB, basis_B)
    probs, states, keep, dropped = [], [], [], []
    for j, blk in enumerate(blocks):
        q = float(np.real(np.trace(blk)))
        if q <= tol:
            dropped.append(j)
            continue
        s = blk / q
        probs.append(q)
        states.append(0.5 * (s + s.conj().T))
        keep.append(j)
    return ConditionalEnsemble(basis_B, np.array(probs), tuple(states), tuple(keep), tuple(dropped))


def max_commutator(ens: ConditionalEnsemble) -> float:
    worst = 0.0
    for i, a in enumerate(ens.states):
        for b in ens.states[i + 1:]:
            worst = max(worst, commutator_norm(a, b))
    return worst


def is_cq_classical(ens: ConditionalEnsemble, tol: float = TOL_CC) -> bool:
    return max_commutator(ens) <= tol


def classical_basis_B(rho: DensityMatrix, tol: float = TOL_CC) -> np.ndarray | None:
    """Basis of B in which ``rho`` is block diagonal, if one exists."""
    dA, dB = _bipartite(rho)
    t = rho.matrix.reshape(dA, dB, dA, dB)
    ops = [np.einsum("ca,abcd->bd", x, t) for x in hermitian_basis(dA)]
    return simultaneous_eigenbasis(ops, tol=tol)


def cc_decomposition(rho: DensityMatrix, tol: float = TOL_CC):
    """Exact CC decomposition ``(probs, basis)`` with ``probs[i, j]`` the
    weight of ``|i^A j^B>``, or ``None`` when the commutator tests fail."""
    dA, dB = _bipartite(rho)
    basis_B = classical_basis_B(rho, tol)
    if basis_B is None:
        return None
    ens = conditional_ensemble(rho, basis_B)
    if not ens.states:
        return None
    basis_A = simultaneous_eigenbasis(list(ens.states), tol=tol)
    if basis_A is None:
        return None
    basis = ProductBasis((basis_A, basis_B))
    w = basis.matrix()
    diag = np.real(np.einsum("ik,ij,jk->k", w.conj(), rho.matrix, w))
    return np.clip(diag, 0, None).reshape(dA, dB), basis


def hs_residual(a: np.ndarray, w: np.ndarray) -> float:
    """Hilbert-Schmidt distance between ``a`` and its pinching in basis ``w``."""
    return offdiag_norm(w.conj().T @ a @ w)


def is_classically_correlated(rho: DensityMatrix, opt: OptimizerConfig | None = None,
                              tol_cc: float = TOL_CC) -> ClassicalityVerdict:
    """Decide whether ``rho`` is classically correlated.

    The exact commutator route is tried first; if it does not certify the
    state, the residual ``||rho - dephase(rho, B)||`` is minimized over
    product bases and the verdict is CC iff the best residual found is at most
    ``tol_cc``.
    """
    _bipartite(rho)
    dec = cc_decomposition(rho, tol_cc)
    if dec is not None:
        basis = dec[1]
        res = hs_residual(rho.matrix, basis.matrix())
        if res <= tol_cc:
            return ClassicalityVerdict(True, res, basis, "exact")

    opt = opt or OptimizerConfig(restarts=8)
    a = rho.matrix

    def objective(us):
        return hs_residual(a, kron2(us[0], us[1]))

    seeds = []
    if dec is not None:
        seeds.append(list(dec[1].unitaries))
    found = minimize_over_product_bases(objective, rho.dims, opt, seeds=seeds, coarse_tol=1e-9)
    is_cc = found.value <= tol_cc
    return ClassicalityVerdict(
        is_cc,
        found.value,
        found.basis if is_cc else None,
        "optimization",
        {
            "restarts": found.restarts,
            "best_restart": found.best_start,
            "converged": found.converged,
            "grad_norm": found.grad_norm,
        },
    )


def dephased_residual(rho: DensityMatrix, basis: ProductBasis) -> float:
    return float(np.linalg.norm(rho.matrix - dephase_array(rho.matrix, basis.matrix())))
