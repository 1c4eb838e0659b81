"""Distance-based quantumness measures.

``Q_D(rho) = min over CC states sigma of D(rho, sigma)`` for two choices of
``D``: one minus the fidelity (geometric measure) and the quantum relative
entropy.  Both are computed by searching over product bases; every reported
value is the distance to an explicit CC witness and is therefore an upper
bound on the true minimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import KrausChannel, apply_local_array
from .classicality import cc_decomposition
from .errors import DimensionMismatch, NotNormalized
from .numerics import (
    DEFAULT_TOL,
    RANK_CUTOFF,
    DensityMatrix,
    ProductBasis,
    diagonal_in,
    eigh_small,
    kron2,
    fidelity,
    partial_trace_array,
    relative_entropy,
    shannon_entropy,
    simultaneous_eigenbasis,
    von_neumann_entropy,
)
from .optimize import OptimizerConfig, minimize_over_product_bases

TOL_MONO = 1e-6
MEASURES = ("geometric", "relative_entropy")


@dataclass(frozen=True)
class CCState:
    """``sum_ij probs[i, j] |i^A><i^A| ⊗ |j^B><j^B|`` in ``basis``."""

    probs: np.ndarray
    basis: ProductBasis

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        if p.shape != self.basis.dims:
            raise DimensionMismatch(f"probability table {p.shape} vs basis dims {self.basis.dims}")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.basis.dims

    def render(self) -> DensityMatrix:
        w = self.basis.matrix()
        a = (w * self.probs.ravel()) @ w.conj().T
        return DensityMatrix(0.5 * (a + a.conj().T), self.dims)

    def to_dict(self) -> dict:
        return {"probs": self.probs.tolist(), "basis": list(self.basis.unitaries)}


@dataclass
class MeasureResult:
    kind: str
    value: float
    witness: CCState
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "witness": self.witness.to_dict(),
            "diagnostics": self.diagnostics,
        }


def _bipartite(rho: DensityMatrix) -> None:
    if len(rho.dims) != 2:
        raise DimensionMismatch(f"expected a bipartite state, got dims {list(rho.dims)}")


def distance(kind: str, rho: DensityMatrix, sigma: DensityMatrix) -> float:
    if kind == "geometric":
        return 1.0 - fidelity(rho, sigma)
    if kind == "relative_entropy":
        return relative_entropy(rho, sigma)
    raise ValueError(f"unknown measure {kind!r}; choose from {MEASURES}")


# --------------------------------------------------------------------------
# inner problem of the geometric measure
#
# For a fixed product basis the best CC state is diagonal, so what remains is
# maximizing F(rho', diag(p)) over the simplex, where rho' is rho written in
# that basis.  With rho' = L L^dagger (L of shape d x rank) the root fidelity
# is Tr sqrt(M) with M = L^dagger P L, a concave function of p.


def low_rank_factor(a: np.ndarray, tol: float = RANK_CUTOFF) -> np.ndarray:
    """``L`` with ``a = L L^dagger`` and as many columns as the numerical rank."""
    w, v = np.linalg.eigh(a)
    keep = w > tol * max(w[-1], 1.0)
    return v[:, keep] * np.sqrt(w[keep])


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


def fidelity_parts(L: np.ndarray, p: np.ndarray, eps: float = 1e-13):
    """``sqrt F``, its gradient in ``p``, and the eigen-data of ``M``.

    ``d sqrt F / d p_k = (L M^{-1/2} L^dagger)_kk / 2`` on the support of ``M``.
    """
    w, v = eigh_small((L.conj().T * p) @ L)
    w = np.maximum(w, 0.0)
    s = np.sqrt(w)
    inv = np.zeros_like(s)
    ok = w > eps
    inv[ok] = 1.0 / s[ok]
    b = L @ v
    grad = 0.5 * ((b.real ** 2 + b.imag ** 2) @ inv)
    return float(s.sum()), grad, w, b


def fidelity_hessian(w: np.ndarray, b: np.ndarray, eps: float = 1e-13) -> np.ndarray:
    """Hessian of ``sqrt F`` in ``p`` from the eigen-data of ``M``.

    Uses the divided differences of ``x -> x^{-1/2}`` (Daleckii-Krein).
    """
    w = np.maximum(w, eps)
    isq = 1.0 / np.sqrt(w)
    dw = w[:, None] - w[None, :]
    close = np.abs(dw) <= 1e-10 * w.max()
    mid = 0.5 * (w[:, None] + w[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        gam = np.where(close, -0.5 * mid ** -1.5, (isq[:, None] - isq[None, :]) / dw)
    e = (b[:, :, None] * b.conj()[:, None, :]).reshape(b.shape[0], -1)
    return 0.5 * np.real((e * gam.ravel()) @ e.conj().T)


def reweight_fidelity(L: np.ndarray, p: np.ndarray, iters: int,
                      tol: float = 0.0) -> tuple[float, np.ndarray, bool]:
    """Monotone alternating ascent ``p_k <- p_k g_k^2 / sum_j p_j g_j^2``.

    Each step maximizes ``|Tr(sqrt(P) L U)|`` first over the isometry ``U``
    and then over ``p``, so ``F`` never decreases.  Cheap and robust, but only
    sublinear near the boundary of the simplex.  Returns ``(F, p, converged)``.
    """
    prev = -1.0
    f = 0.0
    for _ in range(iters + 1):
        f, g, _, _ = fidelity_parts(L, p)
        if f - prev <= tol:
            return min(f * f, 1.0), p, True
        prev = f
        q = p * g * g
        p = q / q.sum()
    return min(f * f, 1.0), p, False


def max_fidelity_diagonal(L: np.ndarray, p0: np.ndarray, max_iter: int = 300,
                          tol: float = 1e-12) -> tuple[float, np.ndarray]:
    """Projected gradient ascent with Barzilai-Borwein steps and backtracking.

    Slow but simple; kept as a fallback and as a reference solver.
    """
    p = project_simplex(np.asarray(p0, dtype=float))
    f, g, _, _ = fidelity_parts(L, p)
    step = 1.0
    for _ in range(max_iter):
        while True:
            q = project_simplex(p + step * g)
            fq, gq, _, _ = fidelity_parts(L, q)
            if fq >= f + 1e-4 * float(g @ (q - p)) or step < 1e-12:
                break
            step *= 0.5
        if fq < f:
            break
        s, y = q - p, gq - g
        gain = fq - f
        p, f, g = q, fq, gq
        if gain <= tol:
            break
        sy = float(s @ y)
        step = float(np.clip(-(s @ s) / sy, 1e-8, 1e8)) if sy < 0 else step * 2.0
    return min(f * f, 1.0), p


def newton_fidelity(L: np.ndarray, p0: np.ndarray, max_iter: int = 60,
                    tol: float = 1e-9, stall_tol: float = 1e-7) -> tuple[float, np.ndarray, bool]:
    """Active-set Newton ascent on the simplex.

    The free set holds the positive coordinates plus any zero coordinate whose
    gradient exceeds the multiplier ``sum_k p_k g_k``.  Converged means the
    KKT residual is at most ``tol``, or at most ``stall_tol`` when no step
    improves ``F`` any more (the residual then sits at rounding level; the
    objective error is of its square).  Returns ``(F, p, converged)``.
    """
    p = np.maximum(np.asarray(p0, dtype=float), 0.0)
    p /= p.sum()
    f, g, w, b = fidelity_parts(L, p)
    kkt = np.inf
    for _ in range(max_iter):
        lam = float(p @ g)
        pos = p > 0
        kkt = max(float(np.max(np.abs(g[pos] - lam))), float(np.max(g[~pos] - lam, initial=0.0)))
        if kkt <= tol:
            return min(f * f, 1.0), p, True
        free = pos | (g > lam)
        idx = np.flatnonzero(free)
        h = fidelity_hessian(w, b)[np.ix_(idx, idx)]
        n = idx.size
        kkt_mat = np.zeros((n + 1, n + 1))
        kkt_mat[:n, :n] = h - 1e-12 * max(1.0, float(np.abs(h).max())) * np.eye(n)
        kkt_mat[:n, n] = kkt_mat[n, :n] = 1.0
        rhs = np.concatenate([-g[idx], [0.0]])
        try:
            sol = np.linalg.solve(kkt_mat, rhs)
        except np.linalg.LinAlgError:
            break
        step = np.zeros_like(p)
        step[idx] = sol[:n]
        slope = float(g @ step)
        if not slope > 0:
            step = np.zeros_like(p)
            step[idx] = g[idx] - g[idx].mean()
            slope = float(g @ step)
            if not slope > 0:
                break
        neg = step < 0
        t_max = float(np.min(p[neg] / -step[neg])) if neg.any() else np.inf
        t = min(1.0, t_max)
        for _ in range(30):
            q = p + t * step
            q[q < 1e-15] = 0.0
            q /= q.sum()
            fq, gq, wq, bq = fidelity_parts(L, q)
            if fq >= f + 1e-4 * t * slope:
                break
            t *= 0.5
        else:
            break
        if fq < f:
            break
        p, f, g, w, b = q, fq, gq, wq, bq
    return min(f * f, 1.0), p, bool(kkt <= stall_tol)


def maximize_diagonal_fidelity(L: np.ndarray, p0: np.ndarray) -> tuple[float, np.ndarray]:
    """Best ``F(L L^dagger, diag(p))`` over the simplex.

    From an interior ``p0``, alternating ascent runs first: when it settles
    with every ``p_k > 0`` the optimality conditions hold and the point is
    returned.  Otherwise (or when ``p0`` already sits on the boundary) Newton
    finishes, and projected gradient takes over if Newton stalls.
    """
    p = np.maximum(p0, 0.0)
    p /= p.sum()
    if p.min() > 0:
        f, p, done = reweight_fidelity(L, p, 40, 1e-14)
        if done and p.min() > 1e-9:
            return f, p
    f, p, ok = newton_fidelity(L, p)
    if ok:
        return f, p
    f2, p2 = max_fidelity_diagonal(L, p)
    return (f2, p2) if f2 >= f else (f, p)


# --------------------------------------------------------------------------
# the measures


def _local_eigenbases(a: np.ndarray, dims) -> list:
    return [np.linalg.eigh(partial_trace_array(a, dims, k))[1] for k in range(len(dims))]


def _seed_bases(rho: DensityMatrix, seeds: Sequence[CCState]) -> list:
    out = [list(s.basis.unitaries) for s in seeds]
    dec = cc_decomposition(rho)
    if dec is not None:
        out.append(list(dec[1].unitaries))
    out.append(_local_eigenbases(rho.matrix, rho.dims))
    return out


EXACT_ZERO = 1e-12


def _exact_cc(kind: str, rho: DensityMatrix) -> MeasureResult | None:
    """Both distances are nonnegative, so an exact CC decomposition at
    distance ~0 is already optimal and the basis search can be skipped."""
    dec = cc_decomposition(rho)
    if dec is None:
        return None
    probs, basis = dec
    witness = CCState(np.clip(probs, 0, None) / np.clip(probs, 0, None).sum(), basis)
    value = distance(kind, rho, witness.render())
    if value > EXACT_ZERO:
        return None
    return MeasureResult(kind, float(max(value, 0.0)), witness, {
        "restarts": 0,
        "seeded_starts": 0,
        "best_restart": -1,
        "converged": True,
        "grad_norm": 0.0,
        "evaluations": 0,
        "search_value": float(max(value, 0.0)),
        "witness_source": "exact",
    })


def _finish(kind: str, rho: DensityMatrix, candidate: CCState, found, seeds: Sequence[CCState]) -> MeasureResult:
    value = distance(kind, rho, candidate.render())
    best, source = candidate, "search"
    for i, s in enumerate(seeds):
        v = distance(kind, rho, s.render())
        if v < value:
            value, best, source = v, s, f"seed {i}"
    return MeasureResult(
        kind,
        float(max(value, 0.0)),
        best,
        {
            "restarts": found.restarts,
            "seeded_starts": found.n_seeds,
            "best_restart": found.best_start,
            "converged": found.converged,
            "grad_norm": found.grad_norm,
            "evaluations": found.evaluations,
            "search_value": found.value,
            "witness_source": source,
        },
    )


def q_geometric(rho: DensityMatrix, opt: OptimizerConfig | None = None,
                seeds: Sequence[CCState] = ()) -> MeasureResult:
    """Geometric measure ``min (1 - F(rho, sigma))`` over CC states.

    ``seeds`` are CC states that are always among the candidates; their bases
    also start local searches.
    """
    _bipartite(rho)
    exact = _exact_cc("geometric", rho)
    if exact is not None:
        return exact
    opt = opt or OptimizerConfig()
    a = rho.matrix
    factor = low_rank_factor(a)
    pure = factor.shape[1] == 1

    last = [None]

    def inner(w):
        L = w.conj().T @ factor
        d = np.real(np.einsum("ij,ij->i", L, L.conj()))
        if pure:
            k = int(np.argmax(d))
            p = np.zeros_like(d)
            p[k] = 1.0
            return float(d[k]), p
        p0 = d
        # warm start from the previous optimum when it is the better point
        if last[0] is not None and fidelity_parts(L, last[0])[0] > fidelity_parts(L, d)[0]:
            p0 = last[0]
        f, p = maximize_diagonal_fidelity(L, p0)
        last[0] = p
        return f, p

    def objective(us):
        return 1.0 - inner(kron2(us[0], us[1]))[0]

    def screen(us):
        L = kron2(us[0], us[1]).conj().T @ factor
        d = np.real(np.einsum("ij,ij->i", L, L.conj()))
        if pure:
            return 1.0 - float(d.max())
        return 1.0 - reweight_fidelity(L, np.maximum(d, 0.0), 1)[0]

    found = minimize_over_product_bases(objective, rho.dims, opt, _seed_bases(rho, seeds),
                                        screen=screen)
    basis = found.basis
    last[0] = None
    _, p = inner(basis.matrix())
    candidate = CCState(p.reshape(rho.dims), basis)
    return _finish("geometric", rho, candidate, found, seeds)


def q_relative_entropy(rho: DensityMatrix, opt: OptimizerConfig | None = None,
                       seeds: Sequence[CCState] = ()) -> MeasureResult:
    """Relative entropy of quantumness in bits.

    For a fixed product basis the closest diagonal state is the dephased one,
    so the search runs over ``S(dephase(rho, B)) - S(rho)`` alone.
    """
    _bipartite(rho)
    exact = _exact_cc("relative_entropy", rho)
    if exact is not None:
        return exact
    opt = opt or OptimizerConfig()
    a = rho.matrix
    s_rho = von_neumann_entropy(a)

    def objective(us):
        return shannon_entropy(diagonal_in(a, kron2(us[0], us[1]))) - s_rho

    found = minimize_over_product_bases(objective, rho.dims, opt, _seed_bases(rho, seeds))
    basis = found.basis
    p = np.clip(diagonal_in(a, basis.matrix()), 0, None)
    candidate = CCState((p / p.sum()).reshape(rho.dims), basis)
    return _finish("relative_entropy", rho, candidate, found, seeds)


def measure(kind: str, rho: DensityMatrix, opt: OptimizerConfig | None = None,
            seeds: Sequence[CCState] = ()) -> MeasureResult:
    if kind == "geometric":
        return q_geometric(rho, opt, seeds)
    if kind == "relative_entropy":
        return q_relative_entropy(rho, opt, seeds)
    raise ValueError(f"unknown measure {kind!r}; choose from {MEASURES}")


# --------------------------------------------------------------------------
# pure states


def schmidt(psi, dims: Sequence[int]):
    """Singular value decomposition of the amplitude matrix."""
    dA, dB = dims
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size != dA * dB:
        raise DimensionMismatch(f"state of size {psi.size} vs dims {list(dims)}")
    return np.linalg.svd(psi.reshape(dA, dB))


def q_geometric_pure(psi, dims: Sequence[int], tol: float = DEFAULT_TOL.norm) -> float:
    """``1 - (largest Schmidt coefficient)**2``; exact for pure states."""
    psi = np.asarray(psi, dtype=complex).ravel()
    err = abs(float(np.vdot(psi, psi).real) - 1.0)
    if err > tol:
        raise NotNormalized("state vector is not normalized", err)
    s = schmidt(psi, dims)[1]
    return float(max(1.0 - s[0] ** 2, 0.0))


def pure_product_witness(psi, dims: Sequence[int]) -> CCState:
    """The closest product state ``|a>|b>`` (top Schmidt pair) as a CC state."""
    u, _, vh = schmidt(psi, dims)
    probs = np.zeros(tuple(dims))
    probs[0, 0] = 1.0
    return CCState(probs, ProductBasis((u, vh.T)))


# --------------------------------------------------------------------------
# monotonicity under local channels


def push_forward(witness: CCState, ch: KrausChannel, target: int,
                 tol: float = 1e-8) -> CCState | None:
    """``Λ(witness)`` for ``Λ`` acting on ``target``, as a CC state if the
    images of the target-side basis projectors commute, else ``None``."""
    us = witness.basis.unitaries
    if ch.dim != witness.dims[target]:
        raise DimensionMismatch(f"channel dim {ch.dim} vs subsystem dim {witness.dims[target]}")
    u = us[target]
    probs = witness.probs if target == 0 else witness.probs.T
    # unpopulated basis vectors do not contribute and need not commute
    active = [i for i in range(u.shape[1]) if probs[i].sum() > 0]
    images = [ch(np.outer(u[:, i], u[:, i].conj())) for i in active]
    v = simultaneous_eigenbasis(images, tol=tol)
    if v is None:
        return None
    lam = np.array([np.clip(diagonal_in(img, v), 0, None) for img in images])  # [i, k]
    new = lam.T @ probs[active]
    if target == 1:
        new = new.T
    new = new / new.sum()
    return CCState(new, witness.basis.replace(target, v))


@dataclass
class MonotonicityReport:
    measure: str
    q_before: float
    q_after: float
    witness_pushforward_bound: float
    pushforward_is_cc: bool
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "q_before": self.q_before,
            "q_after": self.q_after,
            "witness_pushforward_bound": self.witness_pushforward_bound,
            "pushforward_is_cc": self.pushforward_is_cc,
            "tol": self.tol,
            "pass": self.passed,
        }


def monotonicity_report(rho: DensityMatrix, ch: KrausChannel, target: int,
                        kind: str = "geometric", opt: OptimizerConfig | None = None,
                        tol_mono: float = TOL_MONO) -> MonotonicityReport:
    """Compare a measure before and after a local channel.

    The search after the channel is seeded with the image of the optimal
    witness found before it.  For unital or semi-classical qubit channels that
    image is CC, and contractivity of the distance then bounds ``q_after`` by
    ``q_before``.  For other channels the image may not be CC and the check is
    exploratory.
    """
    if ch.dim != rho.dims[target]:
        raise DimensionMismatch(f"channel dim {ch.dim} vs subsystem dim {rho.dims[target]}")
    before = measure(kind, rho, opt)
    out = DensityMatrix(apply_local_array(ch, rho.matrix, rho.dims, target), rho.dims)
    xi = before.witness.render()
    image = DensityMatrix(apply_local_array(ch, xi.matrix, xi.dims, target), xi.dims)
    bound = distance(kind, out, image)
    pushed = push_forward(before.witness, ch, target)
    after = measure(kind, out, opt, seeds=[pushed] if pushed is not None else ())
    return MonotonicityReport(
        kind,
        before.value,
        after.value,
        bound,
        pushed is not None,
        tol_mono,
        after.value <= before.value + tol_mono,
    )


def theorem3_check(psi, dims: Sequence[int], ch: KrausChannel, target: int,
                   opt: OptimizerConfig | None = None, tol: float = TOL_MONO) -> dict:
    """Geometric measure of a pure state before and after a local channel,
    with the search after the channel seeded by the image of the closest
    product state."""
    q_pure = q_geometric_pure(psi, dims)
    wit = pure_product_witness(psi, dims)
    rho = DensityMatrix(np.outer(psi, np.conj(psi)), tuple(dims))
    out = DensityMatrix(apply_local_array(ch, rho.matrix, rho.dims, target), rho.dims)
    pushed = push_forward(wit, ch, target)
    after = q_geometric(out, opt, seeds=[pushed] if pushed is not None else ())
    return {
        "q_before": q_pure,
        "q_after": after.value,
        "pass": after.value <= q_pure + tol,
    }
