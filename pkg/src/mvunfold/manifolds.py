"""Benchmark geometric domains: samplers, exact intrinsic-distance oracles
and reference isometries.

The catalog covers the thin sets (interval, rectangle boundary-free flat
sets, circle, arc, ellipse) and thick sets (disk, rectangle, sigma-tubes of
curves) used by the experiments.  Every model knows how to

  * draw uniform samples with respect to its d-dimensional Hausdorff
    measure,
  * test membership of a point to absolute tolerance,
  * evaluate the intrinsic (shortest-path) metric exactly or to a
    documented resolution,
  * map points to a flat reference domain when one exists.

Planar tube geodesics are taut paths: straight segments that bend only
around the concave part of the boundary (the inner offset of the base
curve).  This is exact for the annulus and the arc tube, and accurate to
the polyline resolution (relative error well under 1e-3) for the ellipse
tube; the test suite cross-checks all three against a dense-graph oracle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _ellipse

__all__ = [
    "ManifoldModel",
    "PointCloud",
    "EllipseSpec",
    "MembershipError",
    "NoIsometryError",
    "make_model",
    "sample",
    "intrinsic_distance",
    "pairwise_intrinsic",
    "reference_isometry",
    "regularity_constant_check",
]

MEMBERSHIP_TOL = 1e-12


class MembershipError(ValueError):
    """A point does not lie on the model's point set."""


class NoIsometryError(ValueError):
    """The model has no isometry to a flat Euclidean domain."""


@dataclass(frozen=True)
class EllipseSpec:
    """Perimeter-2*pi ellipse determined by its semi-major axis."""

    a: float
    b: float
    perimeter: float = 2.0 * np.pi

    def __post_init__(self):
        if not (0.0 <= self.b <= 1.0 <= self.a < np.pi / 2.0 + 1e-12):
            raise ValueError("ellipse axes must satisfy 0 <= b <= 1 <= a < pi/2")


class ManifoldModel:
    """A named geometric domain with sampler, metric oracle and constants.

    Attributes
    ----------
    name : str
    intrinsic_dim, ambient_dim : int
    kind : "thin" or "thick"
    reach : float
        The local-metric regularity radius r_M (inf for convex models,
        whose intrinsic metric is exactly Euclidean).
    diameter : float
        Intrinsic diameter.
    has_isometry : bool
        Whether a flat reference chart exists.
    """

    name: str = "abstract"
    intrinsic_dim: int = 1
    ambient_dim: int = 2
    kind: str = "thin"
    has_isometry: bool = False

    def __init__(self, params: dict):
        self.params = dict(params)
        self._diameter = None

    # -- interface -------------------------------------------------------
    def _sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def set_distance(self, X: np.ndarray) -> np.ndarray:
        """Euclidean distance from each row of X to the model's point set."""
        raise NotImplementedError

    def _distance(self, x: np.ndarray, y: np.ndarray) -> float:
        raise NotImplementedError

    def isometry(self, X: np.ndarray) -> np.ndarray:
        raise NoIsometryError(f"model '{self.name}' has no flat reference chart")

    def probe(self, m: int) -> np.ndarray:
        """Deterministic dense reference sample used for covering estimates."""
        raise NotImplementedError

    def measure_coordinate(self, X: np.ndarray) -> Optional[np.ndarray]:
        """A statistic that is U[0,1] under the model's sampling law, if known."""
        return None

    def _compute_diameter(self) -> float:
        raise NotImplementedError

    # -- shared behaviour --------------------------------------------------
    @property
    def diameter(self) -> float:
        if self._diameter is None:
            self._diameter = float(self._compute_diameter())
        return self._diameter

    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        return bool(self.set_distance(np.atleast_2d(np.asarray(x, float)))[0] <= tol)

    def require_member(self, x: np.ndarray):
        if not self.contains(x):
            raise MembershipError(f"point {x} is not on model '{self.name}'")

    def pairwise(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Vectorized intrinsic distances between rows of A and rows of B."""
        A = np.atleast_2d(A)
        B = np.atleast_2d(B)
        return np.array([self._distance(a, b) for a, b in zip(A, B)])

    def __repr__(self):
        return f"ManifoldModel({self.name}, d={self.intrinsic_dim}, p={self.ambient_dim}, {self.kind})"


@dataclass(frozen=True)
class PointCloud:
    """n sample points in ambient dimension p, with provenance."""

    points: np.ndarray
    model: ManifoldModel
    seed: int
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a point cloud needs at least two points")
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (self.n, self.model.ambient_dim):
            raise ValueError("point array shape does not match (n, ambient_dim)")
        object.__setattr__(self, "points", pts)
        pts.setflags(write=False)


# ---------------------------------------------------------------------------
# flat convex models: intrinsic metric is Euclidean
# ---------------------------------------------------------------------------


class _ConvexModel(ManifoldModel):
    reach = np.inf
    has_isometry = True

    def _distance(self, x, y):
        return float(np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)))

    def pairwise(self, A, B):
        A, B = np.atleast_2d(A), np.atleast_2d(B)
        return np.linalg.norm(A - B, axis=1)

    def isometry(self, X):
        return np.atleast_2d(np.asarray(X, float))


class Interval(_ConvexModel):
    name = "interval"
    intrinsic_dim = 1
    ambient_dim = 2
    kind = "thin"

    def __init__(self, params):
        super().__init__(params)
        self.length = float(params.get("length", 1.0))
        if self.length <= 0:
            raise ValueError("interval length must be positive")

    def _sample(self, rng, n):
        u = rng.uniform(0.0, self.length, n)
        return np.column_stack([u, np.zeros(n)])

    def set_distance(self, X):
        u = np.clip(X[:, 0], 0.0, self.length)
        return np.hypot(X[:, 0] - u, X[:, 1])

    def isometry(self, X):
        return np.atleast_2d(np.asarray(X, float))[:, :1]

    def curve_distance(self, X):
        return self.set_distance(np.atleast_2d(X))

    def probe(self, m):
        u = np.linspace(0.0, self.length, m)
        return np.column_stack([u, np.zeros(m)])

    def measure_coordinate(self, X):
        return X[:, 0] / self.length

    def _compute_diameter(self):
        return self.length


class Rectangle(_ConvexModel):
    name = "rectangle"
    intrinsic_dim = 2
    ambient_dim = 2
    kind = "thick"

    def __init__(self, params):
        super().__init__(params)
        self.width = float(params.get("width", 2.0))
        self.height = float(params.get("height", 1.0))
        if min(self.width, self.height) <= 0:
            raise ValueError("rectangle sides must be positive")

    def _sample(self, rng, n):
        return np.column_stack(
            [rng.uniform(0.0, self.width, n), rng.uniform(0.0, self.height, n)]
        )

    def set_distance(self, X):
        dx = np.maximum(np.maximum(-X[:, 0], X[:, 0] - self.width), 0.0)
        dy = np.maximum(np.maximum(-X[:, 1], X[:, 1] - self.height), 0.0)
        return np.hypot(dx, dy)

    def probe(self, m):
        kx = max(2, int(np.ceil(np.sqrt(m * self.width / self.height))))
        ky = max(2, int(np.ceil(m / kx)))
        gx, gy = np.meshgrid(
            np.linspace(0.0, self.width, kx), np.linspace(0.0, self.height, ky)
        )
        return np.column_stack([gx.ravel(), gy.ravel()])

    def measure_coordinate(self, X):
        return X[:, 0] / self.width

    def _compute_diameter(self):
        return float(np.hypot(self.width, self.height))


class Disk(_ConvexModel):
    name = "disk"
    intrinsic_dim = 2
    ambient_dim = 2
    kind = "thick"

    def __init__(self, params):
        super().__init__(params)
        self.radius = float(params.get("radius", 1.0))
        if self.radius <= 0:
            raise ValueError("disk radius must be positive")

    def _sample(self, rng, n):
        r = self.radius * np.sqrt(rng.uniform(0.0, 1.0, n))
        t = rng.uniform(0.0, 2.0 * np.pi, n)
        return np.column_stack([r * np.cos(t), r * np.sin(t)])

    def set_distance(self, X):
        return np.maximum(np.linalg.norm(X, axis=1) - self.radius, 0.0)

    def probe(self, m):
        # sunflower layout: deterministic and close to uniform in area
        i = np.arange(m) + 0.5
        r = self.radius * np.sqrt(i / m)
        t = i * np.pi * (3.0 - np.sqrt(5.0))
        return np.column_stack([r * np.cos(t), r * np.sin(t)])

    def measure_coordinate(self, X):
        return (np.linalg.norm(X, axis=1) / self.radius) ** 2

    def _compute_diameter(self):
        return 2.0 * self.radius


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


class Circle(ManifoldModel):
    name = "circle"
    intrinsic_dim = 1
    ambient_dim = 2
    kind = "thin"
    has_isometry = False

    def __init__(self, params):
        super().__init__(params)
        self.radius = float(params.get("radius", 1.0))
        if self.radius <= 0:
            raise ValueError("circle radius must be positive")
        self.reach = self.radius

    def _sample(self, rng, n):
        t = rng.uniform(0.0, 2.0 * np.pi, n)
        return self.radius * np.column_stack([np.cos(t), np.sin(t)])

    def set_distance(self, X):
        return np.abs(np.linalg.norm(X, axis=1) - self.radius)

    def _distance(self, x, y):
        return self.pairwise(x, y)[0]

    def pairwise(self, A, B):
        A, B = np.atleast_2d(A), np.atleast_2d(B)
        ta = np.arctan2(A[:, 1], A[:, 0])
        tb = np.arctan2(B[:, 1], B[:, 0])
        d = np.abs(ta - tb) % (2.0 * np.pi)
        return self.radius * np.minimum(d, 2.0 * np.pi - d)

    def probe(self, m):
        t = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
        return self.radius * np.column_stack([np.cos(t), np.sin(t)])

    def measure_coordinate(self, X):
        return (np.arctan2(X[:, 1], X[:, 0]) % (2.0 * np.pi)) / (2.0 * np.pi)

    def _compute_diameter(self):
        return np.pi * self.radius

    def curve_point(self, t):
        t = np.asarray(t, float)
        return self.radius * np.column_stack([np.cos(t), np.sin(t)])

    def curve_distance(self, X):
        return self.set_distance(X)


class Arc(ManifoldModel):
    """Arc of a circle spanning angles [0, angle], angle < pi."""

    name = "arc"
    intrinsic_dim = 1
    ambient_dim = 2
    kind = "thin"
    has_isometry = True

    def __init__(self, params):
        super().__init__(params)
        self.radius = float(params.get("radius", 1.0))
        self.angle = float(params.get("angle", 2.0))
        if self.radius <= 0:
            raise ValueError("arc radius must be positive")
        if not (0.0 < self.angle < np.pi):
            raise ValueError("arc angle must lie in (0, pi)")
        # r_M = min over the geodesically convex extension (the full circle)
        # and the endpoint pair of the boundary
        self.reach = self.radius * min(1.0, np.sin(self.angle / 2.0))

    def _angles(self, X):
        t = np.arctan2(X[:, 1], X[:, 0])
        # center the branch cut opposite the arc midpoint
        mid = self.angle / 2.0
        return (t - mid + np.pi) % (2.0 * np.pi) - np.pi + mid

    def _sample(self, rng, n):
        t = rng.uniform(0.0, self.angle, n)
        return self.radius * np.column_stack([np.cos(t), np.sin(t)])

    def set_distance(self, X):
        t = self._angles(X)
        q = np.linalg.norm(X, axis=1)
        on = np.abs(q - self.radius)
        tc = np.clip(t, 0.0, self.angle)
        ends = np.linalg.norm(X - self.curve_point(tc), axis=1)
        return np.where((t >= 0.0) & (t <= self.angle), on, ends)

    def _distance(self, x, y):
        return self.pairwise(x, y)[0]

    def pairwise(self, A, B):
        A, B = np.atleast_2d(A), np.atleast_2d(B)
        return self.radius * np.abs(self._angles(A) - self._angles(B))

    def isometry(self, X):
        return (self.radius * self._angles(np.atleast_2d(np.asarray(X, float))))[:, None]

    def probe(self, m):
        t = np.linspace(0.0, self.angle, m)
        return self.radius * np.column_stack([np.cos(t), np.sin(t)])

    def measure_coordinate(self, X):
        return self._angles(X) / self.angle

    def _compute_diameter(self):
        return self.radius * self.angle

    def curve_point(self, t):
        t = np.asarray(t, float)
        return self.radius * np.column_stack([np.cos(t), np.sin(t)])

    def curve_distance(self, X):
        return self.set_distance(X)


class Ellipse(ManifoldModel):
    """Perimeter-2*pi ellipse curve with semi-major axis a in [1, pi/2)."""

    name = "ellipse"
    intrinsic_dim = 1
    ambient_dim = 2
    kind = "thin"
    has_isometry = False

    def __init__(self, params):
        super().__init__(params)
        a = float(params.get("a", 1.2))
        if not (1.0 <= a < np.pi / 2.0):
            raise ValueError("ellipse semi-major axis must lie in [1, pi/2)")
        b = _ellipse.solve_semi_minor(a)
        self.spec = EllipseSpec(a=a, b=b)
        self.a, self.b = a, b
        self.reach = b * b / a if a > 1.0 else 1.0
        self._tgrid, self._sgrid = _ellipse.arclength_table(a, b)
        self.perimeter = float(self._sgrid[-1])

    def curve_point(self, t):
        t = np.asarray(t, float)
        return np.column_stack([self.a * np.cos(t), self.b * np.sin(t)])

    def _tangent(self, t):
        return np.column_stack([-self.a * np.sin(t), self.b * np.cos(t)])

    def nearest_parameter(self, X, newton_steps=6, coarse=1024):
        """Parameter of the nearest curve point for each row of X."""
        X = np.atleast_2d(np.asarray(X, float))
        seeds = np.linspace(0.0, 2.0 * np.pi, coarse, endpoint=False)
        P = self.curve_point(seeds)
        # coarse argmin over a parameter grid, then Newton on the
        # stationarity condition (x - e(t)) . e'(t) = 0
        t = np.empty(len(X))
        for lo in range(0, len(X), 16384):
            hi = min(lo + 16384, len(X))
            d2 = (X[lo:hi, None, 0] - P[None, :, 0]) ** 2 + (
                X[lo:hi, None, 1] - P[None, :, 1]
            ) ** 2
            t[lo:hi] = seeds[np.argmin(d2, axis=1)]
        for _ in range(newton_steps):
            e = self.curve_point(t)
            dx = X - e
            st, ct = np.sin(t), np.cos(t)
            ep = np.column_stack([-self.a * st, self.b * ct])
            epp = np.column_stack([-self.a * ct, -self.b * st])
            g = dx[:, 0] * ep[:, 0] + dx[:, 1] * ep[:, 1]
            h = (
                dx[:, 0] * epp[:, 0]
                + dx[:, 1] * epp[:, 1]
                - (ep[:, 0] ** 2 + ep[:, 1] ** 2)
            )
            t = t - g / np.where(np.abs(h) > 1e-30, h, 1e-30)
        return t % (2.0 * np.pi)

    def arclength(self, t):
        t = np.asarray(t, float) % (2.0 * np.pi)
        idx = np.clip(np.searchsorted(self._tgrid, t) - 1, 0, len(self._tgrid) - 2)
        t0 = self._tgrid[idx]
        # one Simpson cell from the table node to t
        mid = 0.5 * (t0 + t)
        extra = ((t - t0) / 6.0) * (
            _ellipse.speed(t0, self.a, self.b)
            + 4.0 * _ellipse.speed(mid, self.a, self.b)
            + _ellipse.speed(t, self.a, self.b)
        )
        return self._sgrid[idx] + extra

    def parameter_at_arclength(self, s):
        s = np.asarray(s, float) % self.perimeter
        idx = np.clip(np.searchsorted(self._sgrid, s) - 1, 0, len(self._sgrid) - 2)
        t0, t1 = self._tgrid[idx], self._tgrid[idx + 1]
        s0, s1 = self._sgrid[idx], self._sgrid[idx + 1]
        t = t0 + (t1 - t0) * (s - s0) / np.maximum(s1 - s0, 1e-300)
        for _ in range(3):
            t = t - (self.arclength(t) - s) / _ellipse.speed(t, self.a, self.b)
        return t

    def _sample(self, rng, n):
        s = rng.uniform(0.0, self.perimeter, n)
        return self.curve_point(self.parameter_at_arclength(s))

    def set_distance(self, X):
        X = np.atleast_2d(X)
        t = self.nearest_parameter(X)
        return np.linalg.norm(X - self.curve_point(t), axis=1)

    def curve_distance(self, X):
        return self.set_distance(X)

    def coarse_curve_distance(self, X, k=1024):
        """Distance to a dense vertex sample of the curve.

        Overestimates the true set distance by at most the polyline sagitta
        (a few 1e-6 here); used inside tube segment tests where the
        membership band is orders of magnitude wider.
        """
        if not hasattr(self, "_coarse_pts") or len(self._coarse_pts) != k:
            self._coarse_pts = self.curve_point(
                np.linspace(0.0, 2.0 * np.pi, k, endpoint=False)
            )
        P = self._coarse_pts
        X = np.atleast_2d(X)
        out = np.empty(len(X))
        for lo in range(0, len(X), 16384):
            hi = min(lo + 16384, len(X))
            d2 = (X[lo:hi, None, 0] - P[None, :, 0]) ** 2 + (
                X[lo:hi, None, 1] - P[None, :, 1]
            ) ** 2
            out[lo:hi] = np.sqrt(d2.min(axis=1))
        return out

    def _distance(self, x, y):
        return self.pairwise(x, y)[0]

    def pairwise(self, A, B):
        A, B = np.atleast_2d(A), np.atleast_2d(B)
        sa = self.arclength(self.nearest_parameter(A))
        sb = self.arclength(self.nearest_parameter(B))
        d = np.abs(sa - sb)
        return np.minimum(d, self.perimeter - d)

    def probe(self, m):
        s = np.linspace(0.0, self.perimeter, m, endpoint=False)
        return self.curve_point(self.parameter_at_arclength(s))

    def measure_coordinate(self, X):
        return self.arclength(self.nearest_parameter(X)) / self.perimeter

    def _compute_diameter(self):
        return self.perimeter / 2.0


# ---------------------------------------------------------------------------
# sigma-tubes of curves (thick sets)
# ---------------------------------------------------------------------------


def _segment_max_curve_distance(tube, P, Q, samples=512):
    """Max of dist(., base curve) along each segment P[i] -> Q[i].

    The distance-to-set function is 1-Lipschitz, so uniform sampling of the
    segment bounds the true maximum to within half the step size; that
    uncertainty only shifts the straight-vs-wrap decision at tangency,
    where both candidate lengths agree to first order.
    """
    P, Q = np.atleast_2d(P), np.atleast_2d(Q)
    u = np.linspace(0.0, 1.0, samples)
    dist_fn = tube._fast_curve_distance
    out = np.empty(len(P))
    chunk = max(1, 2_000_000 // samples)
    for lo in range(0, len(P), chunk):
        hi = min(lo + chunk, len(P))
        pts = (
            P[lo:hi, None, :] * (1.0 - u[None, :, None])
            + Q[lo:hi, None, :] * u[None, :, None]
        )
        d = dist_fn(pts.reshape(-1, 2)).reshape(hi - lo, samples)
        out[lo:hi] = d.max(axis=1)
    return out


class Tube(ManifoldModel):
    """Closed sigma-neighborhood of a base curve in the plane."""

    name = "tube"
    intrinsic_dim = 2
    ambient_dim = 2
    kind = "thick"
    has_isometry = False

    def __init__(self, params):
        super().__init__(params)
        base = params.get("base")
        if isinstance(base, str):
            base = make_model(base, **params.get("base_params", {}))
        if not isinstance(base, (Interval, Circle, Arc, Ellipse)):
            raise ValueError("tube base must be an interval, circle, arc or ellipse")
        self.base = base
        self.sigma = float(params.get("sigma", 0.1))
        base_reach = getattr(base, "reach", np.inf)
        if isinstance(base, Arc):
            # curvature limit of the supporting circle, not the endpoint pair
            base_reach = base.radius
        if not (0.0 < self.sigma < base_reach):
            raise ValueError(
                f"tube level must satisfy 0 < sigma < reach of the base "
                f"({base_reach}), got {self.sigma}"
            )
        self._base_curvature_reach = base_reach
        if isinstance(base, Interval):
            self.reach = np.inf  # stadium: convex, Euclidean metric
            self.has_isometry = True
        else:
            self.reach = min(self.sigma, base_reach - self.sigma)
        self._bbox = self._compute_bbox()
        if isinstance(base, Ellipse):
            self._hole = self._inner_offset_polyline(4096)

    # -- construction helpers -------------------------------------------
    def _compute_bbox(self):
        b = self.base
        s = self.sigma
        if isinstance(b, Interval):
            return np.array([[-s, -s], [b.length + s, s]])
        if isinstance(b, Circle):
            r = b.radius + s
            return np.array([[-r, -r], [r, r]])
        if isinstance(b, Arc):
            t = np.linspace(0.0, b.angle, 512)
            P = b.curve_point(t)
            lo = P.min(axis=0) - s
            hi = P.max(axis=0) + s
            return np.array([lo, hi])
        t = np.linspace(0.0, 2.0 * np.pi, 1024)
        P = b.curve_point(t)
        return np.array([P.min(axis=0) - s, P.max(axis=0) + s])

    def _inner_offset_polyline(self, k):
        """Inner offset of the ellipse at depth sigma, as a convex polyline."""
        e = self.base
        t = np.linspace(0.0, 2.0 * np.pi, k, endpoint=False)
        pts = e.curve_point(t)
        tang = np.column_stack([-e.a * np.sin(t), e.b * np.cos(t)])
        tang /= np.linalg.norm(tang, axis=1, keepdims=True)
        outward = np.column_stack([tang[:, 1], -tang[:, 0]])
        # parametrization runs counterclockwise, so (ty, -tx) points outward
        inner = pts - self.sigma * outward
        seg = np.linalg.norm(np.diff(np.vstack([inner, inner[:1]]), axis=0), axis=1)
        prefix = np.concatenate([[0.0], np.cumsum(seg)])
        return {"pts": inner, "prefix": prefix, "total": prefix[-1]}

    # -- membership and sampling -----------------------------------------
    def curve_distance(self, X):
        return self.base.curve_distance(np.atleast_2d(X))

    def _fast_curve_distance(self, X):
        if isinstance(self.base, Ellipse):
            return self.base.coarse_curve_distance(X)
        return self.base.curve_distance(np.atleast_2d(X))

    def set_distance(self, X):
        return np.maximum(self.curve_distance(X) - self.sigma, 0.0)

    def _sample(self, rng, n):
        lo, hi = self._bbox
        out = np.empty((0, 2))
        while len(out) < n:
            m = max(4 * (n - len(out)), 64)
            cand = rng.uniform(lo, hi, size=(m, 2))
            keep = cand[self._fast_curve_distance(cand) <= self.sigma]
            out = np.vstack([out, keep])
        return out[:n]

    def probe(self, m):
        rng = np.random.default_rng(0xC0FFEE)
        return self._sample(rng, m)

    def isometry(self, X):
        if isinstance(self.base, Interval):
            return np.atleast_2d(np.asarray(X, float))
        raise NoIsometryError(f"tube of '{self.base.name}' has no flat chart")

    # -- intrinsic metric ------------------------------------------------
    def _distance(self, x, y):
        return float(self.pairwise(np.asarray(x, float)[None], np.asarray(y, float)[None])[0])

    def pairwise(self, A, B):
        A, B = np.atleast_2d(np.asarray(A, float)), np.atleast_2d(np.asarray(B, float))
        out = np.linalg.norm(A - B, axis=1)
        if isinstance(self.base, Interval):
            return out  # stadium is convex
        crossing = np.nonzero(
            _segment_max_curve_distance(self, A, B) > self.sigma + 1e-9
        )[0]
        if isinstance(self.base, Circle):
            rho = self.base.radius - self.sigma
            for i in crossing:
                out[i] = self._wrap_around_disk(A[i], B[i], rho)
        elif isinstance(self.base, Arc):
            for i in crossing:
                out[i] = self._arc_tube_wrap(A[i], B[i])
        else:
            for i in crossing:
                out[i] = self._ellipse_tube_wrap(A[i], B[i])
        return out

    def _segment_inside(self, x, y):
        return bool(
            _segment_max_curve_distance(self, x[None], y[None])[0]
            <= self.sigma + 1e-9
        )

    @staticmethod
    def _wrap_around_disk(x, y, rho):
        """Shortest path length around the open disk of radius rho."""
        qx, qy = np.linalg.norm(x), np.linalg.norm(y)
        ax = np.arctan2(x[1], x[0])
        ay = np.arctan2(y[1], y[0])
        dtheta = np.abs(ax - ay) % (2.0 * np.pi)
        dtheta = min(dtheta, 2.0 * np.pi - dtheta)
        a1 = np.arccos(np.clip(rho / qx, -1.0, 1.0))
        a2 = np.arccos(np.clip(rho / qy, -1.0, 1.0))
        phi = dtheta - a1 - a2
        if phi <= 0.0:
            return float(np.linalg.norm(x - y))
        return float(
            np.sqrt(max(qx * qx - rho * rho, 0.0))
            + np.sqrt(max(qy * qy - rho * rho, 0.0))
            + rho * phi
        )

    def _arc_tube_wrap(self, x, y):
        base = self.base
        R, A = base.radius, base.angle
        rho = R - self.sigma
        tx = float(base._angles(x[None])[0])
        ty = float(base._angles(y[None])[0])
        if tx > ty:
            x, y, tx, ty = y, x, ty, tx
        qx, qy = np.linalg.norm(x), np.linalg.norm(y)
        j0 = rho * np.array([1.0, 0.0])
        jL = rho * np.array([np.cos(A), np.sin(A)])
        candidates = []
        # taut path wrapping the inner arc, bending at the sector corners
        # when the tangent contact would fall outside [0, A]
        a_in = tx + np.arccos(np.clip(rho / max(qx, rho), -1.0, 1.0))
        a_out = ty - np.arccos(np.clip(rho / max(qy, rho), -1.0, 1.0))
        piece_x = (
            np.sqrt(max(qx * qx - rho * rho, 0.0)) if a_in >= 0.0 else np.linalg.norm(x - j0)
        )
        piece_y = (
            np.sqrt(max(qy * qy - rho * rho, 0.0)) if a_out <= A else np.linalg.norm(y - jL)
        )
        lo = max(a_in, 0.0)
        hi = min(a_out, A)
        if hi >= lo:
            candidates.append(piece_x + rho * (hi - lo) + piece_y)
        # corner-only routes cover pairs near the pocket mouth
        for corner in (j0, jL):
            if self._segment_inside(x, corner) and self._segment_inside(corner, y):
                candidates.append(
                    float(np.linalg.norm(x - corner) + np.linalg.norm(corner - y))
                )
        if not candidates:
            candidates.append(piece_x + rho * max(hi - lo, 0.0) + piece_y)
        return float(min(candidates))

    def _polygon_tangent_indices(self, P):
        """Indices of the two tangent vertices of the convex hole seen from P."""
        V = self._hole["pts"]
        E = np.roll(V, -1, axis=0) - V
        W = V - P[None, :]
        cr = E[:, 0] * W[:, 1] - E[:, 1] * W[:, 0]
        side = cr > 0.0
        flips = np.nonzero(side != np.roll(side, 1))[0]
        return flips

    def _ellipse_tube_wrap(self, x, y):
        V = self._hole["pts"]
        prefix = self._hole["prefix"]
        total = self._hole["total"]
        k = len(V)

        fx = self._polygon_tangent_indices(x)
        fy = self._polygon_tangent_indices(y)
        if len(fx) < 2 or len(fy) < 2:
            # point numerically on the hole boundary; nearest vertex route
            fx = np.array([np.argmin(np.linalg.norm(V - x, axis=1))] * 2)
        best = np.inf
        for ix in fx[:2]:
            for iy in fy[:2]:
                # walk the hole boundary both ways between the contacts
                arc_fwd = (prefix[iy] - prefix[ix]) % total
                for arc in (arc_fwd, total - arc_fwd):
                    cand = (
                        np.linalg.norm(x - V[ix]) + arc + np.linalg.norm(V[iy] - y)
                    )
                    best = min(best, float(cand))
        return best

    def measure_coordinate(self, X):
        return None

    def _compute_diameter(self):
        # numeric intrinsic diameter over a deterministic net; the small
        # inflation covers the finite-net underestimate
        pts = self.probe(120)
        m = len(pts)
        best = 0.0
        for i in range(m - 1):
            d = self.pairwise(np.repeat(pts[i][None], m - i - 1, axis=0), pts[i + 1 :])
            best = max(best, float(d.max()))
        return 1.02 * best

    def _compute_diameter_exact_annulus(self):
        R, s = self.base.radius, self.sigma
        rho, out = R - s, R + s
        return 2.0 * np.sqrt(out * out - rho * rho) + rho * (
            np.pi - 2.0 * np.arccos(rho / out)
        )


_CATALOG = {
    "interval": Interval,
    "rectangle": Rectangle,
    "disk": Disk,
    "circle": Circle,
    "arc": Arc,
    "ellipse": Ellipse,
    "tube": Tube,
}


def make_model(name: str, **params) -> ManifoldModel:
    """Build a catalog model by name with model-specific parameters."""
    if name not in _CATALOG:
        raise ValueError(f"unknown model '{name}'; choose from {sorted(_CATALOG)}")
    model = _CATALOG[name](params)
    if isinstance(model, Tube) and isinstance(model.base, Circle):
        model._diameter = float(model._compute_diameter_exact_annulus())
    return model


def sample(model: ManifoldModel, n: int, seed: int) -> PointCloud:
    """Draw n i.i.d. points, uniform for the d-dim Hausdorff measure."""
    if n < 2:
        raise ValueError("need n >= 2")
    rng = np.random.default_rng(seed)
    pts = model._sample(rng, int(n))
    return PointCloud(points=pts, model=model, seed=int(seed), n=int(n))


def intrinsic_distance(model: ManifoldModel, x, y) -> float:
    """Exact shortest-path distance within the model between two members."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    model.require_member(x)
    model.require_member(y)
    return float(model._distance(x, y))


def pairwise_intrinsic(model: ManifoldModel, A, B) -> np.ndarray:
    """Vectorized intrinsic distances between paired rows of A and B."""
    return model.pairwise(A, B)


def reference_isometry(model: ManifoldModel, x) -> np.ndarray:
    """Flat chart psi with delta_D(psi(x), psi(x')) = delta_M(x, x')."""
    if not model.has_isometry:
        raise NoIsometryError(f"model '{model.name}' has no flat reference chart")
    x = np.asarray(x, float)
    if x.ndim == 1:
        return model.isometry(x[None])[0]
    return model.isometry(x)


def regularity_constant_check(model: ManifoldModel, pairs) -> float:
    """Max over pairs of delta_M(x, x') / ||x - x'|| - 1.

    Pairs must satisfy ||x - x'|| < reach / 2; each observed excess is
    bounded by 4 ||x - x'|| / reach for the catalog models.
    """
    A = np.asarray(pairs[0], float)
    B = np.asarray(pairs[1], float)
    gaps = np.linalg.norm(A - B, axis=1)
    if np.isfinite(model.reach) and np.any(gaps >= model.reach / 2.0):
        raise ValueError("regularity check requires pairs closer than reach/2")
    if np.any(gaps <= 0.0):
        raise ValueError("regularity check requires distinct points")
    delta = model.pairwise(A, B)
    return float(np.max(delta / gaps - 1.0))
