"""Finite metric measure spaces: quotient fields, doubling and lens-overlap
diagnostics, and the pairwise inequality verifier on (X, d, mu).

Distance matrices are validated at construction (symmetry, positivity off
the diagonal, triangle inequality up to float rounding).  Balls follow the
source conventions: quotient averages run over punctured open balls whose
radius ladder is the set of distinct distances from the center; the doubling
diagnostic uses closed center-inclusive balls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .meanquotient import InequalityReport

__all__ = [
    "FiniteMetricMeasureSpace",
    "build_space",
    "space_from_graph",
    "space_from_point_cloud",
    "mq_field_mms",
    "doubling_constant",
    "overlap_constant",
    "OverlapReport",
    "verify_pointwise_mms",
    "MMSVerifyResult",
]

_TRIANGLE_RTOL = 1e-12


@dataclass(frozen=True)
class FiniteMetricMeasureSpace:
    """Point set with a distance matrix and positive weights (atoms of mu)."""

    dist: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.dist, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError(f"distance matrix must be square, got shape {d.shape}")
        n = d.shape[0]
        if w.shape != (n,):
            raise ValueError(f"need one weight per point: {n} points, {w.shape} weights")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be positive and finite")
        if not np.all(np.isfinite(d)):
            raise ValueError("distances must be finite (is the space connected?)")
        if np.any(np.diag(d) != 0):
            raise ValueError("distance matrix must have a zero diagonal")
        if not np.array_equal(d, d.T):
            raise ValueError("distance matrix must be symmetric")
        off = d + np.eye(n)
        if np.any(off <= 0):
            raise ValueError("off-diagonal distances must be positive (duplicate points?)")
        scale = float(np.max(d)) if n > 1 else 1.0
        slack = _TRIANGLE_RTOL * max(1.0, scale)
        for k in range(n):
            if np.any(d > d[:, k, None] + d[None, k, :] + slack):
                raise ValueError(f"triangle inequality violated through point {k}")
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "weights", w)

    @property
    def n_points(self) -> int:
        return self.dist.shape[0]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))


def space_from_graph(adjacency, weights=None) -> FiniteMetricMeasureSpace:
    """Shortest-path metric of a weighted undirected graph (0 = no edge)."""
    a = np.asarray(adjacency, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("adjacency matrix must be square")
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency matrix must be symmetric")
    if np.any(a < 0):
        raise ValueError("edge weights must be nonnegative")
    d = np.where(a > 0, a, np.inf)
    np.fill_diagonal(d, 0.0)
    for k in range(n):
        d = np.minimum(d, d[:, k, None] + d[None, k, :])
    if np.any(np.isinf(d)):
        raise ValueError("graph is not connected")
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    return FiniteMetricMeasureSpace(d, w)


def space_from_point_cloud(
    coords, weights=None, snowflake: float | None = None
) -> FiniteMetricMeasureSpace:
    """Euclidean (optionally snowflaked d^theta, 0 < theta <= 1) point cloud."""
    pts = np.atleast_2d(np.asarray(coords, dtype=float))
    if pts.ndim != 2:
        raise ValueError("coords must be an (n, dim) array")
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    if snowflake is not None:
        if not (0 < snowflake <= 1):
            raise ValueError(f"snowflake exponent must lie in (0, 1], got {snowflake}")
        d = d**snowflake
    n = pts.shape[0]
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    return FiniteMetricMeasureSpace(d, w)


def build_space(kind: str, params, weights=None) -> FiniteMetricMeasureSpace:
    """Dispatching constructor matching the JSON input format {kind, params, weights}."""
    if kind == "graph_shortest_path":
        return space_from_graph(params, weights)
    if kind == "point_cloud":
        return space_from_point_cloud(params, weights)
    if kind == "snowflake":
        coords, exponent = params
        return space_from_point_cloud(coords, weights, snowflake=float(exponent))
    if kind == "distance_matrix":
        return FiniteMetricMeasureSpace(
            np.asarray(params, dtype=float),
            np.ones(len(params)) if weights is None else np.asarray(weights, float),
        )
    raise ValueError(f"unknown space kind {kind!r}")


def mq_field_mms(f, X: FiniteMetricMeasureSpace, cap: float | None = None) -> np.ndarray:
    """Per point, sup over the distance ladder of mu-weighted quotient averages.

    The ladder runs over the distinct distances from the center (open balls
    change exactly there); a cap keeps rungs strictly below it.
    """
    fv = np.asarray(f, dtype=float)
    n = X.n_points
    if fv.shape != (n,):
        raise ValueError(f"need one value per point: {n} points, {fv.shape} values")
    out = np.zeros(n)
    for i in range(n):
        d = X.dist[i]
        mask = d > 0
        if cap is not None:
            mask &= d < cap
        if not np.any(mask):
            continue
        di = d[mask]
        wi = X.weights[mask]
        qi = wi * np.abs(fv[mask] - fv[i]) / di
        order = np.argsort(di, kind="stable")
        ds = di[order]
        num = np.cumsum(qi[order])
        den = np.cumsum(wi[order])
        # ladder rungs end at the last index of each distinct-distance group
        last = np.nonzero(np.diff(ds, append=np.inf) > 0)[0]
        out[i] = float(np.max(num[last] / den[last]))
    return out


def doubling_constant(X: FiniteMetricMeasureSpace) -> float:
    """max over centers and ladder radii of mu(B(x, 2r)) / mu(B(x, r)).

    Balls are closed and center-inclusive.  Both ball masses are piecewise
    constant in r with jumps at the distances and half-distances from the
    center, so the ladder takes the union of both sets: that is where the
    supremum over all r > 0 is attained.
    """
    n = X.n_points
    best = 1.0
    for i in range(n):
        d = X.dist[i]
        order = np.argsort(d, kind="stable")
        ds = d[order]
        cum = np.cumsum(X.weights[order])
        pos = ds[ds > 0]
        if pos.size == 0:
            continue
        radii = np.unique(np.concatenate([pos, pos / 2]))
        mu_r = cum[np.searchsorted(ds, radii, side="right") - 1]
        mu_2r = cum[np.searchsorted(ds, 2 * radii, side="right") - 1]
        best = max(best, float(np.max(mu_2r / mu_r)))
    return best


@dataclass
class OverlapReport:
    """Lens-overlap diagnostic: sup of mu(ball)/mu(lens) over pairs."""

    constant: float | None
    pairs_with_lens: int
    pairs_empty_lens: int
    table: np.ndarray  # per-pair ratios, nan where the lens is empty


def overlap_constant(X: FiniteMetricMeasureSpace) -> OverlapReport:
    """Measure-theoretic analog of the lens constant on a finite space."""
    n = X.n_points
    if n < 2:
        raise ValueError("overlap diagnostic needs at least two points")
    table = np.full((n, n), np.nan)
    best = None
    n_with = 0
    n_empty = 0
    for i in range(n):
        for j in range(i + 1, n):
            r = X.dist[i, j]
            lens = (X.dist[i] < r) & (X.dist[j] < r)
            lens[i] = lens[j] = False
            mu_lens = float(np.sum(X.weights[lens]))
            if mu_lens == 0.0:
                n_empty += 1
                continue
            mu_ball = float(np.sum(X.weights[X.dist[i] < r]))
            ratio = mu_ball / mu_lens
            table[i, j] = table[j, i] = ratio
            n_with += 1
            if best is None or ratio > best:
                best = ratio
    return OverlapReport(best, n_with, n_empty, table)


@dataclass
class MMSVerifyResult:
    """Pairwise inequality sweep plus the empty-lens pairs reported apart."""

    report: InequalityReport
    empty_lens_pairs: int
    worst_ratio_empty_lens: float


def verify_pointwise_mms(
    f, X: FiniteMetricMeasureSpace, g, C: float | None = None
) -> MMSVerifyResult:
    """Check |f(x)-f(y)| <= C * d(x,y) * (g(x)+g(y)) over all pairs.

    ``C`` defaults to the measured overlap constant.  Pairs whose lens is
    empty carry no bound from the averaging argument; they are verified all
    the same but reported separately and do not fail the sweep.
    """
    fv = np.asarray(f, dtype=float)
    gv = np.asarray(g, dtype=float)
    n = X.n_points
    if fv.shape != (n,) or gv.shape != (n,):
        raise ValueError("f and g must each have one value per point")
    if C is None:
        rep = overlap_constant(X)
        if rep.constant is None:
            raise ValueError("all lenses are empty; supply an explicit constant")
        C = rep.constant
    worst = (-1.0, (0, 0))
    worst_empty = 0.0
    checked = 0
    empty = 0
    hard = 0
    for i in range(n):
        for j in range(i + 1, n):
            r = X.dist[i, j]
            num = abs(fv[i] - fv[j])
            den = r * (gv[i] + gv[j])
            lens = (X.dist[i] < r) & (X.dist[j] < r)
            lens[i] = lens[j] = False
            has_lens = bool(np.any(lens))
            if den == 0:
                ratio = math.inf if num > 0 else 0.0
            else:
                ratio = num / den
            if has_lens:
                checked += 1
                if den == 0 and num > 0:
                    hard += 1
                if ratio > worst[0]:
                    worst = (ratio, (i, j))
            else:
                empty += 1
                worst_empty = max(worst_empty, ratio)
    ratio, (wi, wj) = worst
    report = InequalityReport(
        name="mms_pointwise",
        pairs_checked=checked,
        worst_ratio=max(ratio, 0.0),
        worst_pair=((float(wi),), (float(wj),)),  # indices: MMS points carry no coords
        constant_used=C,
        tolerance=0.0,
        passed=hard == 0 and (checked == 0 or ratio <= C),
        hard_failures=hard,
    )
    return MMSVerifyResult(report, empty, worst_empty)
