"""Slow, independent reference implementations used only by the tests.

Nothing here imports the package's numerics: matrix functions come from
scipy.linalg, partial traces are explicit loops, and optimizations use
generic scipy solvers or plain sampling.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy import linalg, optimize


def partial_trace(a: np.ndarray, dims, keep: int) -> np.ndarray:
    dA, dB = dims
    if keep == 0:
        out = np.zeros((dA, dA), dtype=complex)
        for i, j, k in itertools.product(range(dA), range(dA), range(dB)):
            out[i, j] += a[i * dB + k, j * dB + k]
    else:
        out = np.zeros((dB, dB), dtype=complex)
        for i, j, k in itertools.product(range(dB), range(dB), range(dA)):
            out[i, j] += a[k * dB + i, k * dB + j]
    return out


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = linalg.eigh(a)
    # rounding-level eigenvalues (1e-16) would add 1e-8 through the square root
    w[w < 1e-14 * max(w[-1], 1.0)] = 0.0
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``||sqrt(rho) sqrt(sigma)||_1 ** 2``; accurate for singular arguments,
    where ``sqrtm`` of a product loses half the digits."""
    sv = linalg.svdvals(_psd_sqrt(rho) @ _psd_sqrt(sigma))
    return float(np.sum(sv) ** 2)


def entropy_bits(rho: np.ndarray) -> float:
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def relative_entropy_bits(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``-S(rho) - Tr rho log2 sigma`` with scipy's ``logm``; full-rank ``sigma`` only."""
    cross = np.real(np.trace(rho @ linalg.logm(sigma))) / np.log(2)
    return float(-entropy_bits(rho) - cross)


def kraus_apply_local(kraus, a: np.ndarray, dims, target: int) -> np.ndarray:
    """``sum_k (E_k ⊗ I) a (E_k ⊗ I)^dagger`` with explicit Kronecker products."""
    eye = [np.eye(d) for d in dims]
    out = np.zeros_like(a, dtype=complex)
    for e in kraus:
        ops = list(eye)
        ops[target] = e
        big = np.kron(ops[0], ops[1])
        out += big @ a @ big.conj().T
    return out


def best_diagonal_fidelity(rho_rotated: np.ndarray) -> float:
    """``max_p F(rho', diag p)`` with SLSQP on a softmax-free simplex."""
    d = rho_rotated.shape[0]

    def neg(p):
        p = np.clip(p, 0, None)
        return -fidelity(rho_rotated, np.diag(p / p.sum()))

    best = -np.inf
    starts = [np.real(np.diag(rho_rotated)), np.full(d, 1.0 / d)]
    starts += [np.random.default_rng(k).dirichlet(np.ones(d)) for k in range(4)]
    for x0 in starts:
        res = optimize.minimize(
            neg, np.clip(x0, 1e-6, None), method="SLSQP",
            bounds=[(0.0, 1.0)] * d,
            constraints=[{"type": "eq", "fun": lambda p: p.sum() - 1.0}],
            options={"ftol": 1e-14, "maxiter": 500},
        )
        best = max(best, -res.fun)
    return best


def dirichlet_diagonal_fidelity(rho_rotated: np.ndarray, n: int = 4000, seed: int = 0) -> float:
    """Lower bound on the same maximum from random simplex points."""
    rng = np.random.default_rng(seed)
    d = rho_rotated.shape[0]
    s = linalg.sqrtm(rho_rotated)
    best = 0.0
    for p in rng.dirichlet(np.ones(d) * 0.7, size=n):
        m = s @ np.diag(p) @ s
        best = max(best, float(np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(m), 0, None)))) ** 2)
    return best


def min_relative_entropy_fixed_basis(rho: np.ndarray, w: np.ndarray) -> float:
    """``min_p S(rho || W diag(p) W^dagger)`` by direct optimization over ``p``."""
    d = rho.shape[0]
    r = w.conj().T @ rho @ w

    def f(z):
        p = np.exp(z - z.max())
        p /= p.sum()
        p = np.maximum(p, 1e-300)
        return -entropy_bits(r) - float(np.real(np.sum(np.diag(r) * np.log2(p))))

    best = np.inf
    for seed in range(3):
        z0 = np.random.default_rng(seed).normal(size=d)
        res = optimize.minimize(f, z0, method="BFGS", options={"gtol": 1e-12})
        best = min(best, res.fun)
    return best


def schmidt_max_sq(psi: np.ndarray, dims) -> float:
    """Largest Schmidt coefficient squared, from the reduced state spectrum."""
    rho = np.outer(psi, psi.conj())
    return float(np.linalg.eigvalsh(partial_trace(rho, dims, 0))[-1])


def grid_hs_residual(rho: np.ndarray, steps: int = 13) -> float:
    """Smallest off-diagonal norm of ``rho`` over a coarse grid of real-and-phase
    qubit bases on both sides."""
    def qubit_basis(theta, phi):
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        return np.array([[c, -np.exp(-1j * phi) * s], [np.exp(1j * phi) * s, c]])

    thetas = np.linspace(0, np.pi, steps)
    phis = np.linspace(0, 2 * np.pi, steps, endpoint=False)
    bases = [qubit_basis(t, p) for t in thetas for p in phis]
    best = np.inf
    for ua in bases:
        for ub in bases:
            w = np.kron(ua, ub)
            r = w.conj().T @ rho @ w
            best = min(best, float(np.linalg.norm(r - np.diag(np.diag(r)))))
    return best
