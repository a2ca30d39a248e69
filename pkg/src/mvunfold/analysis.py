"""Judging solver output against the theory.

Recovery is only defined up to rigid motion (reflections included), so
embeddings are compared to the flat reference chart by orthogonal
Procrustes alignment.  The remaining oracles measure how taut the output
map is (empirical Lipschitz constants against the intrinsic metric or its
graph surrogate), the interpolation inequality linking the two, and the
tail behaviour of the sample energy around its continuum value.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import NeighborGraph, graph_geodesics
from .manifolds import ManifoldModel, PointCloud, reference_isometry
from .numerics import jacobi_eigh, svd_small
from .solver import Embedding, energy_discrete, extract_coordinates

__all__ = [
    "RecoveryReport",
    "ProcrustesResult",
    "procrustes_align",
    "solution_distance",
    "empirical_lipschitz",
    "interpolation_margin",
    "ustat_tail_experiment",
    "flatness_report",
]


@dataclass(frozen=True)
class ProcrustesResult:
    rotation: np.ndarray  # orthogonal d x d matrix applied to A
    reflection: bool
    translation: np.ndarray
    max_residual: float
    rms_residual: float
    degenerate: bool = False

    def apply(self, A: np.ndarray) -> np.ndarray:
        return A @ self.rotation.T + self.translation


@dataclass(frozen=True)
class RecoveryReport:
    procrustes_error: float
    energy_gap: float
    lipschitz_hat: float
    interpolation_margin: float


def procrustes_align(A: np.ndarray, B: np.ndarray) -> ProcrustesResult:
    """Optimal orthogonal superposition of A onto B (least squares).

    Rotation comes from the singular decomposition of the cross-covariance
    (computed by one-sided Jacobi, self-contained); reflections are
    allowed, matching the full isometry group.  Residuals are reported in
    both max and RMS.
    """
    A = np.atleast_2d(np.asarray(A, float))
    B = np.atleast_2d(np.asarray(B, float))
    if A.shape != B.shape:
        raise ValueError("point sets must have matching shapes")
    ca, cb = A.mean(axis=0), B.mean(axis=0)
    Am, Bm = A - ca, B - cb
    C = Am.T @ Bm
    degenerate = False
    norm_c = np.linalg.norm(C)
    if norm_c < 1e-300:
        R = np.eye(A.shape[1])
        degenerate = True
    else:
        U, s, Vt = svd_small(C)
        R = (U @ Vt).T
    res = Bm - Am @ R.T
    rn = np.linalg.norm(res, axis=1)
    return ProcrustesResult(
        rotation=R,
        reflection=bool(np.linalg.det(R) < 0),
        translation=cb - R @ ca,
        max_residual=float(rn.max()),
        rms_residual=float(np.sqrt(np.mean(rn * rn))),
        degenerate=degenerate,
    )


def solution_distance(emb: Embedding, cloud: PointCloud) -> float:
    """Max-residual Procrustes distance to the reference chart.

    Computable surrogate for solution convergence when the continuum
    solution set is the rigid orbit of the chart psi (the convex case);
    for non-convex models the same number is the identity-recovery error,
    whose failure to vanish is exactly the inconsistency phenomenon.
    """
    model = cloud.model
    ref = reference_isometry(model, cloud.points)
    d = ref.shape[1]
    coords, _, _ = extract_coordinates(emb, d)
    return procrustes_align(coords, ref).max_residual


def _oracle_pair_distances(model: ManifoldModel, pts: np.ndarray, ii, jj):
    return model.pairwise(pts[ii], pts[jj])


def empirical_lipschitz(
    emb: Embedding,
    cloud: PointCloud,
    graph: Optional[NeighborGraph] = None,
    source: str = "oracle",
    min_distance: float = 1e-9,
) -> float:
    """Max over pairs of ||y_i - y_j|| / delta-hat(x_i, x_j).

    `source` selects the intrinsic-distance surrogate: the model's exact
    oracle, or graph geodesics on the neighborhood graph.
    """
    n = cloud.n
    ii, jj = np.triu_indices(n, 1)
    Y = emb.Y
    dy = np.linalg.norm(Y[ii] - Y[jj], axis=1)
    if source == "oracle":
        dx = _oracle_pair_distances(cloud.model, cloud.points, ii, jj)
    elif source == "graph":
        if graph is None:
            raise ValueError("graph source requires a NeighborGraph")
        if not graph.connected:
            raise ValueError("graph geodesics need a connected graph")
        D = graph_geodesics(graph)
        dx = D[ii, jj]
    else:
        raise ValueError("source must be 'oracle' or 'graph'")
    keep = dx > min_distance
    return float(np.max(dy[keep] / dx[keep]))


def interpolation_margin(
    emb: Embedding,
    cloud: PointCloud,
    graph: NeighborGraph,
    eta: float,
    source: str = "oracle",
) -> float:
    """Max over pairs of ||y_i - y_j|| - (1 + 6 eta / r) delta-hat(x_i, x_j).

    Negative margins mean the no-stretch interpolation bound holds with
    room to spare.
    """
    n = cloud.n
    ii, jj = np.triu_indices(n, 1)
    dy = np.linalg.norm(emb.Y[ii] - emb.Y[jj], axis=1)
    if source == "oracle":
        dx = _oracle_pair_distances(cloud.model, cloud.points, ii, jj)
    else:
        D = graph_geodesics(graph)
        dx = D[ii, jj]
    L = 1.0 + 6.0 * eta / graph.r
    return float(np.max(dy - L * dx))


def ustat_tail_experiment(
    model: ManifoldModel,
    f,
    n: int,
    t_grid: np.ndarray,
    trials: int,
    seed: int,
    reference_energy: Optional[float] = None,
    reference_m: int = 200_000,
) -> dict:
    """Empirical tail of |E(Y_n(f)) - E(f)| against the U-statistic bound.

    For each t the empirical exceedance frequency over `trials` fresh
    samples is paired with the two-sided bound
    2 exp(-n t^2 / (5 diam^4 + 3 diam^2 t)) and the binomial standard
    error of the frequency.
    """
    if trials < 1000:
        raise ValueError("need at least 1000 trials")
    t_grid = np.asarray(t_grid, float)
    if reference_energy is None:
        from .energy import continuum_energy_mc

        reference_energy = continuum_energy_mc(
            model, f, max(reference_m, 50 * n), seed + 999_331
        ).value
    rng = np.random.default_rng(seed)
    gaps = np.empty(trials)
    for trial in range(trials):
        pts = model._sample(rng, n)
        F = np.atleast_2d(np.asarray(f(pts), float))
        gaps[trial] = abs(energy_discrete(F) - reference_energy)
    diam = model.diameter
    rows = []
    for t in t_grid:
        freq = float(np.mean(gaps > t))
        bound = 2.0 * np.exp(-n * t * t / (5.0 * diam**4 + 3.0 * diam**2 * t))
        se = float(np.sqrt(max(freq * (1.0 - freq), 1.0 / trials) / trials))
        rows.append({"t": float(t), "empirical": freq, "bound": float(bound), "se": se})
    return {
        "n": n,
        "trials": trials,
        "reference_energy": float(reference_energy),
        "diameter": float(diam),
        "rows": rows,
    }


def flatness_report(emb: Embedding, d: int) -> float:
    """Fraction of the Gram trace carried by the top d eigenvalues.

    Values >= 0.99 count as 'flattened to dimension d' in experiment
    reports; this probes the flattening conjecture, with no pass/fail
    attached.
    """
    B = emb.Y - emb.Y.mean(axis=0)
    w, _ = jacobi_eigh(B.T @ B)
    w = np.maximum(w, 0.0)
    total = w.sum()
    if total <= 0:
        return 1.0
    return float(w[:d].sum() / total)
