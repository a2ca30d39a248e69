"""Discrete maximum-variance-unfolding solver.

Maximizes the mean squared pairwise distance of the output points subject
to the no-stretch constraints ||y_i - y_j|| <= ||x_i - x_j|| on the edges
of the r-neighborhood graph.  The working form is an augmented Lagrangian
on the squared-distance constraints h_e = ||y_i - y_j||^2 - l_e^2 <= 0
(smooth everywhere, unlike the norm form), minimized in point coordinates
by Barzilai-Borwein gradient steps with Armijo backtracking, with
multiplier updates at every inner convergence and penalty growth x4 when
the violation stalls.

The objective is convex, so maximizing it over a convex set has its optima
on the boundary and local maxima exist; seeded random restarts mitigate
this, and the spread of restart energies is reported as evidence (not
proof) of global optimality at desk scale.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .graph import NeighborGraph
from .manifolds import PointCloud
from .numerics import jacobi_eigh

try:  # optional JIT fast path; the numpy fallback is mathematically identical
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def _njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap

__all__ = [
    "SolverConfig",
    "Embedding",
    "SolveTrace",
    "DisconnectedGraphError",
    "IterationBudgetExhausted",
    "NumericalFailure",
    "energy_discrete",
    "energy_double_sum",
    "solve_mvu",
    "solve_mvu_gram",
    "extract_coordinates",
    "feasibility_report",
    "canonicalize",
]


class DisconnectedGraphError(ValueError):
    """The neighborhood graph is disconnected, so the supremum is infinite."""


class IterationBudgetExhausted(RuntimeError):
    """Raised only when flag_budget='raise'; default is to flag the trace."""


class NumericalFailure(RuntimeError):
    """Non-finite values encountered during the solve."""


@dataclass(frozen=True)
class SolverConfig:
    backend: str = "CoordinateAscent"  # or "GramLowRank"
    feas_tol: float = 1e-6  # max allowed edge violation, relative to r
    step_init: float = 0.05  # initial step, relative to r / |grad|
    armijo: float = 1e-4
    backtrack: float = 0.5
    mu0: float | None = None  # initial penalty; auto-scaled when None
    mu_growth: float = 4.0
    viol_decrease: float = 0.25  # required per-outer violation shrink
    max_outer: int = 60
    max_inner: int = 500
    rank_cap: int | None = None  # Gram factor rank; min(p, 10) when None
    seed: int = 0
    stop_tol: float = 1e-9  # relative energy change
    restarts: int = 3

    def __post_init__(self):
        if min(self.feas_tol, self.stop_tol, self.step_init) <= 0:
            raise ValueError("tolerances and steps must be positive")
        if self.backend not in ("CoordinateAscent", "GramLowRank"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.restarts < 1 or self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration budgets must be at least 1")


@dataclass(frozen=True)
class Embedding:
    """Candidate MVU solution: centered output points with metadata."""

    Y: np.ndarray
    energy: float
    max_violation: float
    centered: bool = True


@dataclass
class SolveTrace:
    """Per-outer-iteration solve record."""

    energy: list = field(default_factory=list)
    max_violation: list = field(default_factory=list)
    penalty: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    best_feasible_energy: list = field(default_factory=list)
    wall_time: float = 0.0
    converged: bool = False
    restart_energies: list = field(default_factory=list)

    @property
    def n_outer(self) -> int:
        return len(self.energy)

    def rows(self):
        for k in range(self.n_outer):
            yield (
                k,
                self.energy[k],
                self.max_violation[k],
                self.penalty[k],
                self.steps[k],
            )


def energy_discrete(Y: np.ndarray) -> float:
    """MVU objective: mean squared pairwise distance over ordered pairs.

    Computed through the variance identity
    E(Y) = (2n/(n-1)) (mean ||y_i||^2 - ||mean y_i||^2), O(np).
    """
    Y = np.atleast_2d(np.asarray(Y, float))
    n = len(Y)
    if n < 2:
        raise ValueError("energy needs at least two points")
    mean = Y.mean(axis=0)
    sq = np.einsum("ij,ij->", Y, Y) / n
    return float(2.0 * n / (n - 1.0) * (sq - mean @ mean))


def energy_double_sum(Y: np.ndarray) -> float:
    """Reference O(n^2 p) double-sum evaluation of the objective."""
    Y = np.atleast_2d(np.asarray(Y, float))
    n = len(Y)
    diff = Y[:, None, :] - Y[None, :, :]
    total = np.sum(diff * diff)
    return float(total / (n * (n - 1.0)))


def _energy_grad(Y):
    n = len(Y)
    return (4.0 / (n - 1.0)) * (Y - Y.mean(axis=0))


class _EdgeSet:
    def __init__(self, edges, lengths, n, p):
        self.ei = edges[:, 0]
        self.ej = edges[:, 1]
        self.l = np.asarray(lengths, float)
        self.l2 = self.l**2
        self.n = n
        self.p = p

    def h(self, Y):
        d = Y[self.ei] - Y[self.ej]
        sq = np.einsum("ij,ij->i", d, d)
        return d, sq - self.l2

    def norm_violation(self, Y):
        d = Y[self.ei] - Y[self.ej]
        dist = np.sqrt(np.einsum("ij,ij->i", d, d))
        v = dist - self.l
        return float(v.max(initial=0.0))


@_njit(cache=True)
def _edge_penalty_value(Y, ei, ej, l2, lam, mu):  # pragma: no cover - JIT
    pen = 0.0
    for e in range(ei.shape[0]):
        i, j = ei[e], ej[e]
        sq = 0.0
        for c in range(Y.shape[1]):
            diff = Y[i, c] - Y[j, c]
            sq += diff * diff
        s = lam[e] + mu * (sq - l2[e])
        if s > 0.0:
            pen += s * s - lam[e] * lam[e]
        else:
            pen -= lam[e] * lam[e]
    return pen


@_njit(cache=True)
def _edge_penalty_value_grad(Y, ei, ej, l2, lam, mu, grad):  # pragma: no cover
    pen = 0.0
    for e in range(ei.shape[0]):
        i, j = ei[e], ej[e]
        sq = 0.0
        for c in range(Y.shape[1]):
            diff = Y[i, c] - Y[j, c]
            sq += diff * diff
        s = lam[e] + mu * (sq - l2[e])
        if s > 0.0:
            pen += s * s - lam[e] * lam[e]
            w = 2.0 * s
            for c in range(Y.shape[1]):
                diff = Y[i, c] - Y[j, c]
                grad[i, c] += w * diff
                grad[j, c] -= w * diff
        else:
            pen -= lam[e] * lam[e]
    return pen


def _penalty_value_np(Y, es, lam, mu):
    _, h = es.h(Y)
    s = np.maximum(0.0, lam + mu * h)
    return float(np.sum(s * s - lam * lam))


def _penalty_value_grad_np(Y, es, lam, mu, grad):
    d, h = es.h(Y)
    s = np.maximum(0.0, lam + mu * h)
    w = 2.0 * s
    for c in range(es.p):
        wc = w * d[:, c]
        grad[:, c] += np.bincount(es.ei, weights=wc, minlength=len(Y))
        grad[:, c] -= np.bincount(es.ej, weights=wc, minlength=len(Y))
    return float(np.sum(s * s - lam * lam))


def _aug_lagrangian(Y, es: _EdgeSet, lam, mu, need_grad=True):
    """Value (and gradient) of -E(Y) + penalty, the inner objective."""
    if not need_grad:
        if _HAVE_NUMBA:
            pen = _edge_penalty_value(Y, es.ei, es.ej, es.l2, lam, mu)
        else:
            pen = _penalty_value_np(Y, es, lam, mu)
        return -energy_discrete(Y) + pen / (2.0 * mu), None
    grad = -_energy_grad(Y)
    if _HAVE_NUMBA:
        pen = _edge_penalty_value_grad(Y, es.ei, es.ej, es.l2, lam, mu, grad)
    else:
        pen = _penalty_value_grad_np(Y, es, lam, mu, grad)
    return -energy_discrete(Y) + pen / (2.0 * mu), grad


@_njit(cache=True)
def _penalty_hessvec_jit(Y, ei, ej, l2, lam, mu, V, out):  # pragma: no cover
    for e in range(ei.shape[0]):
        i, j = ei[e], ej[e]
        sq = 0.0
        dv = 0.0
        for c in range(Y.shape[1]):
            diff = Y[i, c] - Y[j, c]
            sq += diff * diff
            dv += diff * (V[i, c] - V[j, c])
        s = lam[e] + mu * (sq - l2[e])
        if s > 0.0:
            for c in range(Y.shape[1]):
                diff = Y[i, c] - Y[j, c]
                t = 2.0 * s * (V[i, c] - V[j, c]) + 4.0 * mu * dv * diff
                out[i, c] += t
                out[j, c] -= t


def _hessvec(Y, es, lam, mu, V):
    """Hessian-vector product of the inner objective at Y (fixed active set)."""
    n = len(Y)
    out = -(4.0 / (n - 1.0)) * (V - V.mean(axis=0))
    if _HAVE_NUMBA:
        _penalty_hessvec_jit(Y, es.ei, es.ej, es.l2, lam, mu, V, out)
        return out
    d, h = es.h(Y)
    s = np.maximum(0.0, lam + mu * h)
    act = s > 0
    dv = np.einsum("ij,ij->i", d, V[es.ei] - V[es.ej])
    w1 = np.where(act, 2.0 * s, 0.0)
    w2 = np.where(act, 4.0 * mu * dv, 0.0)
    T = w1[:, None] * (V[es.ei] - V[es.ej]) + w2[:, None] * d
    for c in range(es.p):
        out[:, c] += np.bincount(es.ei, weights=T[:, c], minlength=n)
        out[:, c] -= np.bincount(es.ej, weights=T[:, c], minlength=n)
    return out


def _penalty_diag(Y, es, lam, mu):
    """Per-node diagonal curvature model of the inner objective.

    Active edges contribute 2 s_e + 4 mu d_e^2 apiece; the energy term
    contributes its own 4/(n-1).  Used as a fixed preconditioner for one
    inner call (a valid metric, so BB/Armijo theory applies unchanged).
    """
    n = len(Y)
    d, h = es.h(Y)
    s = np.maximum(0.0, lam + mu * h)
    act = s > 0
    w = np.where(act, 2.0 * s + 4.0 * mu * (h + es.l2), 0.0)
    diag = np.bincount(es.ei, weights=w, minlength=n) + np.bincount(
        es.ej, weights=w, minlength=n
    )
    return diag + 4.0 / (n - 1.0)


def _cg_newton_direction(Y, es, lam, mu, grad, diag, cg_tol, max_cg):
    """Approximate Newton direction by preconditioned CG (Steihaug exits).

    Solves H d = grad for the piecewise-quadratic inner objective at the
    current active set.  On negative curvature the accumulated iterate is
    returned (preconditioned steepest descent if it is the first one),
    which keeps every returned direction a descent direction.
    """
    d = np.zeros_like(grad)
    res = grad.copy()
    z = res / diag
    p = z.copy()
    rz = np.einsum("ij,ij->", res, z)
    g2 = np.einsum("ij,ij->", grad, grad)
    for it in range(max_cg):
        Hp = _hessvec(Y, es, lam, mu, p)
        pHp = np.einsum("ij,ij->", p, Hp)
        if pHp <= 1e-300:
            if it == 0:
                return grad / diag, it + 1
            return d, it + 1
        alpha = rz / pHp
        d += alpha * p
        res -= alpha * Hp
        if np.einsum("ij,ij->", res, res) <= cg_tol * cg_tol * g2:
            return d, it + 1
        z = res / diag
        rz_new = np.einsum("ij,ij->", res, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    return d, max_cg


def _inner_minimize(Y, es, lam, mu, cfg, gtol, r):
    """Semismooth Newton-CG on the inner objective.

    Returns (Y, steps, converged); `steps` counts Hessian-vector products
    (the dominant cost).  Convergence is declared in step units: the
    Newton move per coordinate falls below gtol.
    """
    val, grad = _aug_lagrangian(Y, es, lam, mu)
    total_hv = 0
    converged = False
    for _ in range(60):
        diag = np.maximum(_penalty_diag(Y, es, lam, mu), 1e-300)[:, None]
        step_scale = np.abs(grad / diag).max()
        if step_scale <= gtol:
            converged = True
            break
        gnorm_rel = step_scale / max(r, 1e-300)
        cg_tol = min(0.3, np.sqrt(gnorm_rel))
        direction, hv = _cg_newton_direction(
            Y, es, lam, mu, grad, diag, cg_tol, max_cg=min(cfg.max_inner, 120)
        )
        total_hv += hv
        gdd = np.einsum("ij,ij->", grad, direction)
        if gdd <= 0:
            direction = grad / diag
            gdd = np.einsum("ij,ij->", grad, direction)
        t = 1.0
        accepted = False
        for _bt in range(60):
            cand = Y - t * direction
            cval, _ = _aug_lagrangian(cand, es, lam, mu, need_grad=False)
            if cval <= val - cfg.armijo * t * gdd:
                accepted = True
                break
            t *= cfg.backtrack
        if not accepted:
            converged = True  # step collapsed: numerically stationary
            break
        val, grad = _aug_lagrangian(cand, es, lam, mu)
        Y = cand
        if not np.isfinite(val):
            raise NumericalFailure("augmented Lagrangian became non-finite")
        if total_hv >= cfg.max_inner:
            break
    return Y, total_hv, converged


def _shrink_to_feasible(Y, es):
    """Uniform shrink about the centroid onto the feasible set.

    All pairwise distances scale linearly, so dividing by the worst edge
    stretch restores exact feasibility at quadratic-in-violation energy
    cost.
    """
    d = Y[es.ei] - Y[es.ej]
    dist = np.sqrt(np.einsum("ij,ij->i", d, d))
    ratio = np.max(dist / es.l, initial=1.0)
    if ratio <= 1.0:
        return Y
    c = Y.mean(axis=0)
    return c + (Y - c) / ratio


def _ascend(X0, es, cfg, r):
    """One augmented-Lagrangian ascent from the given start."""
    Y = X0 - X0.mean(axis=0)
    lam = np.zeros(len(es.l))
    if cfg.mu0 is not None:
        mu = cfg.mu0
    else:
        # penalty making an O(1%) relative stretch cost as much energy as
        # the unconstrained expansion gains
        mu = 50.0 / max(np.mean(es.l2), 1e-300)
    v_target = 0.3 * cfg.feas_tol * r
    rows = {"energy": [], "viol": [], "mu": [], "steps": []}
    best_Y = None
    best_energy = -np.inf
    prev_viol = np.inf
    prev_energy = None
    hit = 0
    inner_stall = 0
    converged = False
    for outer in range(cfg.max_outer):
        gtol = max(1e-3 * 0.3**outer, 1e-10) * r
        Y, steps, inner_ok = _inner_minimize(Y, es, lam, mu, cfg, gtol, r)
        Y = Y - Y.mean(axis=0)
        _, h = es.h(Y)
        viol = es.norm_violation(Y)
        energy = energy_discrete(Y)
        if not np.isfinite(energy):
            raise NumericalFailure("energy became non-finite")
        rows["energy"].append(energy)
        rows["viol"].append(viol)
        rows["mu"].append(mu)
        rows["steps"].append(steps)
        cand = _shrink_to_feasible(Y, es)
        cand_energy = energy_discrete(cand)
        if cand_energy > best_energy:
            best_energy = cand_energy
            best_Y = cand
        if not inner_ok:
            inner_stall += 1
        if inner_ok or inner_stall >= 2:
            # first-order multiplier update at (approximate) subproblem
            # solutions; growing mu on unconverged iterates only stiffens
            # the subproblem without information
            lam = np.maximum(0.0, lam + mu * h)
            inner_stall = 0
            if viol > v_target and viol > cfg.viol_decrease * prev_viol:
                mu *= cfg.mu_growth
        if viol <= v_target:
            hit += 1
            stalled = (
                prev_energy is not None
                and abs(energy - prev_energy) <= cfg.stop_tol * max(abs(energy), 1e-300)
            )
            v = rows["viol"]
            tail_ok = len(v) >= 3 and v[-3] >= v[-2] >= v[-1]
            if hit >= 3 and stalled and tail_ok:
                converged = True
                break
        else:
            hit = 0
        prev_viol = viol
        prev_energy = energy
    return best_Y, rows, converged


@_njit(cache=True)
def _project_sweeps_jit(Y, ei, ej, l, sweeps, tol):  # pragma: no cover - JIT
    n, p = Y.shape
    E = ei.shape[0]
    move = np.zeros((n, p))
    cnt = np.zeros(n)
    for _ in range(sweeps):
        for i in range(n):
            cnt[i] = 0.0
            for c in range(p):
                move[i, c] = 0.0
        maxv = 0.0
        for e in range(E):
            i, j = ei[e], ej[e]
            sq = 0.0
            for c in range(p):
                diff = Y[i, c] - Y[j, c]
                sq += diff * diff
            dist = np.sqrt(sq)
            excess = dist - l[e]
            if excess > 0.0:
                if excess > maxv:
                    maxv = excess
                w = 0.5 * excess / max(dist, 1e-300)
                for c in range(p):
                    corr = w * (Y[i, c] - Y[j, c])
                    move[i, c] -= corr
                    move[j, c] += corr
                cnt[i] += 1.0
                cnt[j] += 1.0
        if maxv <= tol:
            return maxv
        for i in range(n):
            if cnt[i] > 0.0:
                for c in range(p):
                    Y[i, c] += move[i, c] / cnt[i]
    return maxv


def _project_edges(Y, es: _EdgeSet, r, sweeps=300, tol_rel=1e-3):
    """Jacobi-style local projection toward the constraint set.

    Splits each edge's stretch between its endpoints and averages the
    corrections per node.  Unlike the global shrink, this removes local
    stretch without collapsing the overall spread, so an unfolded start
    keeps its energy.
    """
    n, p = Y.shape
    Y = Y.copy()
    tol = tol_rel * r
    if _HAVE_NUMBA:
        _project_sweeps_jit(Y, es.ei, es.ej, es.l, sweeps, tol)
        return Y
    for _ in range(sweeps):
        d = Y[es.ei] - Y[es.ej]
        dist = np.sqrt(np.einsum("ij,ij->i", d, d))
        excess = dist - es.l
        act = excess > 0
        if not act.any() or excess.max() <= tol:
            break
        scale = np.where(act, 0.5 * excess / np.maximum(dist, 1e-300), 0.0)
        corr = d * scale[:, None]
        counts = np.bincount(es.ei, weights=act.astype(float), minlength=n)
        counts += np.bincount(es.ej, weights=act.astype(float), minlength=n)
        counts = np.maximum(counts, 1.0)
        for c in range(p):
            move = np.bincount(es.ei, weights=-corr[:, c], minlength=n)
            move += np.bincount(es.ej, weights=corr[:, c], minlength=n)
            Y[:, c] += move / counts
    return Y


def _projected_ascent(Y, es: _EdgeSet, cfg, r, max_steps=400, sweeps=25):
    """Feasible-ascent unfolding stage.

    Alternates an energy-gradient push with a short block of edge
    projections, accepting a step only when the exactly-feasible (shrunk)
    energy improves.  This performs the large rigid-flex motions (e.g.
    unrolling a bent tube) that multiplier methods crawl through, and
    hands the result to the augmented Lagrangian for certified polishing.
    """
    Y = Y - Y.mean(axis=0)
    Y = _project_edges(Y, es, r, sweeps=400, tol_rel=1e-4)
    best = _shrink_to_feasible(Y, es)
    best_energy = energy_discrete(best)
    g = _energy_grad(Y)
    t = 0.5 * r / (np.abs(g).max() + 1e-300)
    no_gain = 0
    for _ in range(max_steps):
        g = _energy_grad(Y)
        cand = Y + t * g
        _project_sweeps = sweeps
        cand = _project_edges(cand, es, r, sweeps=_project_sweeps, tol_rel=1e-6)
        cand_sh = _shrink_to_feasible(cand, es)
        cand_energy = energy_discrete(cand_sh)
        if cand_energy > best_energy:
            gain = cand_energy - best_energy
            Y = cand - cand.mean(axis=0)
            best = cand_sh
            best_energy = cand_energy
            t *= 1.25
            no_gain = no_gain + 1 if gain < 1e-8 * max(abs(best_energy), 1e-300) else 0
        else:
            t *= 0.4
            no_gain += 1
        if no_gain >= 12:
            break
    return Y - Y.mean(axis=0), best, best_energy


def _graph_spectral_start(graph: NeighborGraph, dim: int) -> np.ndarray:
    """Classical-MDS start from graph geodesics.

    Double-centers the squared graph-distance matrix and takes the top-dim
    spectral coordinates (Lanczos).  Graph distances approximate the
    intrinsic metric, so this start is already unfolded; it is then shrunk
    onto the feasible set and only polished by the ascent.  The identity
    start alone stalls on curved instances: there every edge starts tight
    and the feasible ascent cone is a sliver of width O(r^3).
    """
    from .graph import graph_geodesics
    from .numerics import lanczos_topk

    D = graph_geodesics(graph)
    if not np.all(np.isfinite(D)):
        raise DisconnectedGraphError("graph geodesics are infinite")
    n = len(D)
    D2 = D * D
    row = D2.mean(axis=1)
    grand = row.mean()
    B = -0.5 * (D2 - row[:, None] - row[None, :] + grand)
    B = 0.5 * (B + B.T)
    w, V = lanczos_topk(lambda v: B @ v, n, dim, seed=1)
    w = np.maximum(w, 0.0)
    k = min(dim, len(w))
    Y = V[:, :k] * np.sqrt(w[:k])[None, :]
    if k < dim:
        Y = np.column_stack([Y, np.zeros((n, dim - k))])
    return Y


def canonicalize(Y: np.ndarray) -> np.ndarray:
    """Deterministic representative of the rigid-motion orbit.

    Center, rotate to principal axes, then fix each axis sign by the first
    nonzero odd coordinate moment (falling back to the largest-magnitude
    entry).  Makes regression tests byte-stable.
    """
    Y = np.asarray(Y, float)
    B = Y - Y.mean(axis=0)
    _, V = jacobi_eigh(B.T @ B)
    Z = B @ V
    for c in range(Z.shape[1]):
        m3 = np.sum(Z[:, c] ** 3)
        if abs(m3) > 1e-12 * (np.abs(Z[:, c]).max() ** 3 + 1e-300):
            sign = np.sign(m3)
        else:
            k = np.argmax(np.abs(Z[:, c]))
            sign = np.sign(Z[k, c]) or 1.0
        Z[:, c] *= sign
    return Z


def _solve_common(cloud, graph, cfg, dim):
    if not graph.connected:
        raise DisconnectedGraphError(
            "neighborhood graph is disconnected; the MVU supremum is infinite"
        )
    X = cloud.points
    n, p = X.shape
    es = _EdgeSet(graph.edges, graph.lengths, n, dim)
    r = graph.r

    if dim >= p:
        X0 = np.column_stack([X, np.zeros((n, dim - p))])
    else:
        # projection onto leading principal axes is 1-Lipschitz, so the
        # start stays feasible
        B = X - X.mean(axis=0)
        _, V = jacobi_eigh(B.T @ B)
        X0 = B @ V[:, :dim]

    t0 = time.perf_counter()
    trace = SolveTrace()
    best = None
    rng = np.random.default_rng(cfg.seed)
    spectral = None
    for restart in range(cfg.restarts):
        if restart == 0:
            start = X0.copy()
        elif restart == 1:
            # classical-MDS start from graph geodesics: already unfolded
            try:
                spectral = _graph_spectral_start(graph, dim)
            except Exception:
                spectral = X0
            start = spectral
        else:
            base_start = spectral if spectral is not None else X0
            start = base_start + 0.1 * r * rng.standard_normal(X0.shape)
        # stage 1: feasible-ascent unfolding; stage 2: multiplier polish
        warm, stage_best, stage_energy = _projected_ascent(start, es, cfg, r)
        Y, rows, converged = _ascend(warm, es, cfg, r)
        energy = energy_discrete(Y)
        if stage_energy > energy:
            Y, energy = stage_best, stage_energy
        trace.restart_energies.append(energy)
        if best is None or energy > best[0]:
            best = (energy, Y, rows, converged)

    energy, Y, rows, converged = best
    Y = canonicalize(Y)
    Y = _shrink_to_feasible(Y, es)

    trace.energy = rows["energy"]
    trace.max_violation = rows["viol"]
    trace.penalty = rows["mu"]
    trace.steps = rows["steps"]
    running = np.maximum.accumulate(rows["energy"])
    trace.best_feasible_energy = list(running)
    trace.converged = converged
    trace.wall_time = time.perf_counter() - t0

    emb = Embedding(
        Y=Y,
        energy=energy_discrete(Y),
        max_violation=es.norm_violation(Y),
        centered=True,
    )
    return emb, trace


def _solve_two_points(cloud, graph):
    l = float(graph.lengths[0]) if len(graph.lengths) else 0.0
    p = cloud.points.shape[1]
    Y = np.zeros((2, p))
    Y[0, 0] = -l / 2.0
    Y[1, 0] = +l / 2.0
    emb = Embedding(Y=Y, energy=l * l, max_violation=0.0, centered=True)
    tr = SolveTrace(
        energy=[l * l],
        max_violation=[0.0],
        penalty=[0.0],
        steps=[0],
        best_feasible_energy=[l * l],
        converged=True,
        restart_energies=[l * l],
    )
    return emb, tr


def solve_mvu(cloud: PointCloud, graph: NeighborGraph, cfg: SolverConfig = SolverConfig()):
    """Solve discrete MVU in ambient point coordinates.

    Returns (Embedding, SolveTrace).  The returned points are centered,
    canonically oriented, and exactly feasible (the final iterate is
    uniformly shrunk onto the constraint set).
    """
    if cloud.n == 2:
        if not graph.connected:
            raise DisconnectedGraphError("two points without an edge")
        return _solve_two_points(cloud, graph)
    return _solve_common(cloud, graph, cfg, cloud.points.shape[1])


def solve_mvu_gram(cloud: PointCloud, graph: NeighborGraph, cfg: SolverConfig = SolverConfig()):
    """Low-rank Gram-factor backend.

    Optimizes a rank-k factor V with Gram = V V^T under the same edge
    constraints (K_ii + K_jj - 2 K_ij <= l^2 in factor form) and the
    centering constraint; the factor itself is the returned embedding.
    Agrees with the coordinate backend on shared benchmarks within 1%.
    """
    if cfg.rank_cap is not None and cfg.rank_cap < 1:
        raise ValueError("rank_cap must be at least 1")
    if cloud.n == 2:
        if not graph.connected:
            raise DisconnectedGraphError("two points without an edge")
        return _solve_two_points(cloud, graph)
    cap = cfg.rank_cap if cfg.rank_cap is not None else min(cloud.points.shape[1], 10)
    return _solve_common(cloud, graph, cfg, min(cap, cloud.n))


def extract_coordinates(emb: Embedding, d: int):
    """Spectral coordinates: top-d eigenpairs of the centered Gram matrix.

    Returns (coords, spectrum, trace_fraction) where coords are scaled by
    the square roots of the eigenvalues.  Uses the p x p factor
    eigenproblem, which shares the Gram matrix's nonzero spectrum.
    """
    if not emb.centered:
        raise ValueError("embedding must be centered")
    B = emb.Y - emb.Y.mean(axis=0)
    w, V = jacobi_eigh(B.T @ B)
    w = np.maximum(w, 0.0)
    total = float(w.sum())
    rank = int(np.sum(w > 1e-12 * max(w[0], 1e-300)))
    if d > rank:
        raise ValueError(f"requested dimension {d} exceeds numerical rank {rank}")
    coords = B @ V[:, :d]
    frac = float(w[:d].sum() / total) if total > 0 else 1.0
    return coords, w, frac


@dataclass(frozen=True)
class FeasibilityReport:
    max_violation: float
    mean_violation: float  # mean over violated edges, 0 when none
    n_edges: int
    n_tight: int
    tight_fraction: float
    tight_threshold: float


def feasibility_report(cloud: PointCloud, graph: NeighborGraph, Y: np.ndarray) -> FeasibilityReport:
    """Per-edge slack statistics of a candidate embedding."""
    Y = np.asarray(Y, float)
    es = _EdgeSet(graph.edges, graph.lengths, cloud.n, Y.shape[1])
    d = Y[es.ei] - Y[es.ej]
    dist = np.sqrt(np.einsum("ij,ij->i", d, d))
    v = dist - es.l
    pos = v[v > 0]
    thr = 1e-6 * graph.r
    tight = int(np.sum(es.l - dist < thr))
    return FeasibilityReport(
        max_violation=float(v.max(initial=0.0)),
        mean_violation=float(pos.mean()) if len(pos) else 0.0,
        n_edges=len(es.l),
        n_tight=tight,
        tight_fraction=tight / max(len(es.l), 1),
        tight_threshold=thr,
    )
