"""Multistart derivative-free search over product bases.

Each local basis is written as ``U0 @ exp(iH)`` with ``U0`` a fixed starting
unitary and ``H`` a zero-diagonal Hermitian generator.  Diagonal generator
components only rephase basis vectors, which leaves every objective used in
this package unchanged, so they are left out of the search space.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import BadParameter
from .numerics import ProductBasis, expi_hermitian, haar_unitary, substream

log = logging.getLogger(__name__)

Objective = Callable[[list], float]


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for the outer basis search.

    ``max_iters`` bounds objective evaluations per start, ``grad_tol`` is the
    Nelder-Mead threshold on the spread of values (the simplex size threshold
    is its square root, matching a quadratic minimum), ``step_init`` is the initial
    simplex edge in generator units.  The ``polish`` best starts are refined
    with a fresh, smaller simplex.
    """

    restarts: int = 20
    max_iters: int = 3000
    grad_tol: float = 1e-10
    step_init: float = 0.4
    seed: int = 0
    polish: int = 2

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise BadParameter("restarts and max_iters must be positive")
        if self.grad_tol <= 0 or self.step_init <= 0:
            raise BadParameter("grad_tol and step_init must be positive")
        if self.polish < 0:
            raise BadParameter("polish must be non-negative")


@dataclass
class SearchResult:
    value: float
    unitaries: list
    best_start: int
    n_seeds: int
    restarts: int
    converged: bool
    grad_norm: float
    evaluations: int
    start_values: list = field(default_factory=list)

    @property
    def basis(self) -> ProductBasis:
        return ProductBasis(tuple(self.unitaries))


def _n_params(dims: Sequence[int]) -> list[int]:
    return [d * d - d for d in dims]


def _unpack(x: np.ndarray, base: list, dims: Sequence[int], sizes: list[int]) -> list:
    out, i = [], 0
    for u0, d, n in zip(base, dims, sizes):
        out.append(u0 @ expi_hermitian(x[i:i + n], d) if n else u0)
        i += n
    return out


def _fd_grad_norm(f, x: np.ndarray, h: float = 1e-6) -> float:
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return float(np.linalg.norm(g))


def _nelder_mead(f, x0: np.ndarray, step: float, opt: OptimizerConfig, tol: float):
    n = x0.size
    simplex = np.vstack([x0, x0 + step * np.eye(n)])
    res = minimize(
        f, x0, method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": np.sqrt(tol),
            "fatol": tol,
            "maxfev": opt.max_iters,
            "adaptive": n > 4,
        },
    )
    return res


def minimize_over_product_bases(
    objective: Objective,
    dims: Sequence[int],
    opt: OptimizerConfig,
    seeds: Sequence[Sequence[np.ndarray]] = (),
    screen: Objective | None = None,
    coarse_tol: float = 1e-4,
) -> SearchResult:
    """Minimize ``objective(unitaries)`` over product bases.

    Starts are the given ``seeds`` (in order) followed by ``opt.restarts``
    Haar-random bases, each drawn from its own stream so the outcome depends
    only on ``(opt.seed, start index)``.  Every start runs a Nelder-Mead search
    to ``coarse_tol`` on ``screen`` (a cheaper stand-in for ``objective``,
    defaulting to it); the ``opt.polish`` best starts are then refined on
    ``objective`` to ``opt.grad_tol``.  Ties go to the lowest start index.
    """
    dims = list(dims)
    sizes = _n_params(dims)
    n = sum(sizes)
    screen = screen or objective
    starts = [list(np.asarray(u, dtype=complex) for u in s) for s in seeds]
    n_seeds = len(starts)
    for r in range(opt.restarts):
        rng = substream(opt.seed, r)
        starts.append([haar_unitary(d, rng) for d in dims])

    def bind(fn, base):
        return lambda x: fn(_unpack(x, base, dims, sizes))

    evals = 0
    screened = []
    for base in starts:
        f = bind(screen, base)
        x0 = np.zeros(n)
        v0 = f(x0)
        evals += 1
        if n == 0:
            screened.append((v0, x0))
            continue
        res = _nelder_mead(f, x0, opt.step_init, opt, max(coarse_tol, opt.grad_tol))
        evals += res.nfev
        screened.append((float(res.fun), res.x) if res.fun <= v0 else (v0, x0))

    order = sorted(range(len(starts)), key=lambda i: (screened[i][0], i))
    chosen = order[: max(opt.polish, 1)]
    runs = {}
    for idx in chosen:
        f = bind(objective, starts[idx])
        x = screened[idx][1]
        v = f(x)
        evals += 1
        converged = n == 0
        step = opt.step_init
        for _ in range(3 if n else 0):
            step = max(step * 0.1, 10 * opt.grad_tol)
            res = _nelder_mead(f, x, step, opt, opt.grad_tol)
            evals += res.nfev
            gain = v - float(res.fun)
            if res.fun <= v:
                x, v = res.x, float(res.fun)
            converged = bool(res.success)
            if gain <= opt.grad_tol:
                break
        runs[idx] = (v, x, converged)

    best = min(runs, key=lambda i: (runs[i][0], i))
    v, x, converged = runs[best]
    base = starts[best]
    grad = _fd_grad_norm(bind(objective, base), x) if n else 0.0
    log.debug("basis search: best start %d of %d, value %.3e, %d evaluations",
              best, len(starts), v, evals)
    return SearchResult(
        value=v,
        unitaries=_unpack(x, base, dims, sizes),
        best_start=best,
        n_seeds=n_seeds,
        restarts=len(starts),
        converged=converged,
        grad_norm=grad,
        evaluations=evals,
        start_values=[s[0] for s in screened],
    )
