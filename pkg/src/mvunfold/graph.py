"""r-neighborhood graphs, covering/packing estimators and graph geodesics.

The r-neighborhood graph joins samples at Euclidean distance <= r (boundary
case included).  Graph shortest-path distances, with Euclidean edge
lengths, serve as the computable surrogate for the intrinsic metric; the
covering radius of the sample is estimated against a dense deterministic
probe of the model.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components, dijkstra

from .manifolds import ManifoldModel, PointCloud

__all__ = [
    "NeighborGraph",
    "build_graph",
    "covering_radius",
    "graph_geodesics",
    "packing_number",
    "radius_schedule",
]


@dataclass(frozen=True)
class NeighborGraph:
    """Edge list of the r-neighborhood graph plus coverage diagnostics."""

    cloud: PointCloud
    r: float
    edges: np.ndarray  # (m, 2) int array, i < j
    lengths: np.ndarray  # (m,) Euclidean lengths
    connected: bool
    covering_radius: float

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def covering_ratio(self) -> float:
        """Diagnostic lambda-hat = covering_radius / r."""
        return self.covering_radius / self.r

    def diagnostics(self) -> dict:
        return {
            "n": self.cloud.n,
            "r": self.r,
            "n_edges": int(self.n_edges),
            "connected": bool(self.connected),
            "covering_radius": float(self.covering_radius),
            "covering_ratio": float(self.covering_ratio),
        }


def _pairwise_edges(points: np.ndarray, r: float):
    """Exact edge set {(i, j): ||x_i - x_j|| <= r} by blocked pair scan."""
    n = len(points)
    ii, jj, ll = [], [], []
    block = max(1, int(2_000_000 // max(n, 1)))
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        diff = points[lo:hi, None, :] - points[None, :, :]
        d = np.sqrt(np.sum(diff * diff, axis=2))
        a, b = np.nonzero(d <= r)
        keep = lo + a < b
        ii.append(lo + a[keep])
        jj.append(b[keep])
        ll.append(d[a[keep], b[keep]])
    return np.concatenate(ii), np.concatenate(jj), np.concatenate(ll)


def _bucketed_edges(points: np.ndarray, r: float):
    """Uniform-grid bucket accelerator for large n; same edge set."""
    from collections import defaultdict
    from itertools import product

    n, p = points.shape
    keys = np.floor(points / r).astype(np.int64)
    buckets: dict = defaultdict(list)
    for idx in range(n):
        buckets[tuple(keys[idx])].append(idx)
    offsets = list(product([-1, 0, 1], repeat=p))
    ii, jj, ll = [], [], []
    for key, members in buckets.items():
        members = np.asarray(members)
        neigh: list[int] = []
        for off in offsets:
            other = buckets.get(tuple(k + o for k, o in zip(key, off)))
            if other:
                neigh.extend(other)
        neigh = np.asarray(sorted(neigh))
        d = np.linalg.norm(points[members][:, None, :] - points[neigh][None, :, :], axis=2)
        a, b = np.nonzero(d <= r)
        gi, gj = members[a], neigh[b]
        keep = gi < gj
        ii.append(gi[keep])
        jj.append(gj[keep])
        ll.append(d[a[keep], b[keep]])
    return np.concatenate(ii), np.concatenate(jj), np.concatenate(ll)


def build_graph(
    cloud: PointCloud,
    r: float,
    probe_factor: int = 50,
    compute_covering: bool = True,
) -> NeighborGraph:
    """Build the r-neighborhood graph of a point cloud.

    The pair scan is exact.  The covering radius is estimated against a
    deterministic dense probe of the model with `probe_factor * n` points
    (skipped when compute_covering is false; the field is then nan).
    """
    if r <= 0:
        raise ValueError("neighborhood radius must be positive")
    pts = cloud.points
    if cloud.n <= 5000:
        ii, jj, ll = _pairwise_edges(pts, r)
    else:
        ii, jj, ll = _bucketed_edges(pts, r)
    edges = np.column_stack([ii, jj]).astype(np.int64)
    m = sparse.coo_matrix(
        (np.concatenate([ll, ll]), (np.concatenate([ii, jj]), np.concatenate([jj, ii]))),
        shape=(cloud.n, cloud.n),
    ).tocsr()
    ncomp, _ = connected_components(m, directed=False)
    eta = np.nan
    if compute_covering:
        eta = covering_radius(cloud, cloud.model.probe(probe_factor * cloud.n))
    return NeighborGraph(
        cloud=cloud,
        r=float(r),
        edges=edges,
        lengths=ll,
        connected=bool(ncomp == 1),
        covering_radius=float(eta),
    )


def covering_radius(cloud: PointCloud, probe: np.ndarray) -> float:
    """Smallest eta (estimated) such that the sample is an eta-cover.

    Computed as the max over probe points of the distance to the nearest
    sample point; the probe must be a dense reference sample of the same
    model (>= 50 n points).
    """
    probe = np.atleast_2d(probe)
    if len(probe) < 50 * cloud.n:
        raise ValueError("probe must have at least 50 * n points")
    if probe.shape[1] != cloud.points.shape[1]:
        raise ValueError("probe ambient dimension does not match the cloud")
    if cloud.model.set_distance(probe).max() > 1e-6:
        raise ValueError("probe points do not lie on the cloud's model")
    best = np.full(len(probe), np.inf)
    pts = cloud.points
    chunk = max(1, int(4_000_000 // max(cloud.n, 1)))
    for lo in range(0, len(probe), chunk):
        hi = min(lo + chunk, len(probe))
        diff = probe[lo:hi, None, :] - pts[None, :, :]
        d = np.sqrt(np.sum(diff * diff, axis=2))
        best[lo:hi] = d.min(axis=1)
    return float(best.max())


def _csr(graph: NeighborGraph):
    ii, jj = graph.edges[:, 0], graph.edges[:, 1]
    ll = graph.lengths
    return sparse.coo_matrix(
        (np.concatenate([ll, ll]), (np.concatenate([ii, jj]), np.concatenate([jj, ii]))),
        shape=(graph.cloud.n, graph.cloud.n),
    ).tocsr()


def graph_geodesics(graph: NeighborGraph, sources: Optional[np.ndarray] = None) -> np.ndarray:
    """Shortest-path distances with Euclidean edge weights (Dijkstra).

    Returns the full matrix for `sources=None`, else the rows for the given
    source indices.  Unreachable entries are +inf; callers on disconnected
    graphs decide how to treat them.
    """
    m = _csr(graph)
    if sources is None:
        return dijkstra(m, directed=False)
    return dijkstra(m, directed=False, indices=np.asarray(sources, dtype=int))


def packing_number(points, eta: float, seed: int = 0) -> int:
    """Greedy maximal eta-packing size over the given points.

    First-fit over a seeded shuffled order; the greedy result is sandwiched
    between the eta-covering and (eta/2)-covering numbers, which suffices
    for the scaling checks.
    """
    if eta <= 0:
        raise ValueError("packing scale eta must be positive")
    pts = points.points if isinstance(points, PointCloud) else np.atleast_2d(points)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(pts))
    chosen = np.empty((0, pts.shape[1]))
    for idx in order:
        x = pts[idx]
        if len(chosen) == 0 or np.min(np.linalg.norm(chosen - x, axis=1)) > eta:
            chosen = np.vstack([chosen, x])
    return len(chosen)


def radius_schedule(n, d: int, C: float = 2.0) -> float:
    """Neighborhood radius r_n = C * (log n / n)^(1/d) * loglog(max(n, 3)).

    The loglog factor is the divergence slack making r_n large relative to
    the critical covering scale (log n / n)^(1/d).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if C <= 0:
        raise ValueError("need C > 0")
    n = float(n)
    r_dag = (np.log(n) / n) ** (1.0 / d)
    return float(C * r_dag * np.log(np.log(max(n, 3.0))))
