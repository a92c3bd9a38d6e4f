"""Uniform grids, sampled functions, discrete balls/lenses, and the test-function corpus.

Coordinates are always reconstructed as ``origin + index * h`` so that every
consumer sees bit-identical point locations.  Balls and lenses are open sets
of grid points with the center (and, for lenses, both endpoints) excluded;
membership tests are carried out on integer squared step distances so that
boundary shells are never included or dropped by floating-point accident.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "GridFunction",
    "TestFunction",
    "make_grid",
    "sample",
    "ball_indices",
    "lens_indices",
    "gradient",
    "polynomial",
    "holder_cusp",
    "weierstrass",
    "sin_composite",
    "exponential",
    "indicator",
    "custom_table",
    "standard_corpus",
    "smooth_corpus",
    "gridfunction_to_csv",
]

_REL_SNAP = 1e-9  # radii this close to a grid multiple are treated as exact


@dataclass(frozen=True)
class Grid:
    """Uniform grid over a box: same spacing ``h`` along every axis."""

    dim: int
    origin: tuple[float, ...]
    extent: tuple[float, ...]
    h: float
    counts: tuple[int, ...]

    @property
    def n_points(self) -> int:
        n = 1
        for c in self.counts:
            n *= c
        return n

    @property
    def diameter(self) -> float:
        return float(math.sqrt(sum(e * e for e in self.extent)))

    def axis_coords(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.h * np.arange(self.counts[axis])

    def points(self) -> np.ndarray:
        """All grid coordinates, shape (n_points, dim), C (row-major) order."""
        axes = [self.axis_coords(a) for a in range(self.dim)]
        if self.dim == 1:
            return axes[0][:, None]
        g0, g1 = np.meshgrid(axes[0], axes[1], indexing="ij")
        return np.column_stack([g0.ravel(), g1.ravel()])

    def multi_index(self, flat: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(flat, self.counts))

    def flat_index(self, multi) -> int:
        return int(np.ravel_multi_index(tuple(int(i) for i in multi), self.counts))

    def coord(self, flat: int) -> np.ndarray:
        multi = self.multi_index(flat)
        return np.array([self.origin[a] + multi[a] * self.h for a in range(self.dim)])

    def clearance_steps(self, flat: int) -> int:
        """Steps from the point to the nearest domain face (interior margin)."""
        multi = self.multi_index(flat)
        return min(min(multi[a], self.counts[a] - 1 - multi[a]) for a in range(self.dim))


@dataclass(frozen=True)
class GridFunction:
    """Real values, one per grid point, in the grid's flat (C) order."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(
                f"values must have shape ({self.grid.n_points},), got {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must all be finite")
        object.__setattr__(self, "values", vals)


def _as_dim_tuple(v, dim: int, name: str) -> tuple[float, ...]:
    if np.isscalar(v):
        t = (float(v),) * dim
    else:
        t = tuple(float(x) for x in v)
    if len(t) != dim:
        raise ValueError(f"{name} must have {dim} components, got {len(t)}")
    return t


def make_grid(dim: int, origin, extent, h: float) -> Grid:
    """Build the uniform grid with ``counts[i] = round(extent[i]/h) + 1``."""
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    if not (h > 0):
        raise ValueError(f"h must be positive, got {h}")
    origin_t = _as_dim_tuple(origin, dim, "origin")
    extent_t = _as_dim_tuple(extent, dim, "extent")
    counts = []
    for e in extent_t:
        if e < h:
            raise ValueError(f"extent {e} smaller than spacing h={h}")
        counts.append(int(round(e / h)) + 1)
    return Grid(dim=dim, origin=origin_t, extent=extent_t, h=h, counts=tuple(counts))


def _axis_windows(grid: Grid, center_multi, smax: int):
    """Index offsets per axis within ``smax`` steps of the center, clipped."""
    offs = []
    for a in range(grid.dim):
        c = center_multi[a]
        lo = max(0, c - smax)
        hi = min(grid.counts[a] - 1, c + smax)
        offs.append(np.arange(lo, hi + 1))
    return offs


def _sq_steps_threshold(grid: Grid, r: float):
    """Open-ball threshold for integer squared step distances.

    Returns ``(smax, thr)`` such that a point at integer squared step
    distance ``s2`` lies in the open ball iff ``s2 < thr``.  Radii within
    relative 1e-9 of an exact grid multiple ``j*h`` snap to the integer
    threshold ``j*j`` so that ladder radii behave exactly.
    """
    rh = r / grid.h
    j = round(rh)
    if abs(rh - j) <= _REL_SNAP * max(1.0, rh):
        thr = float(j * j)
    else:
        thr = rh * rh
    smax = int(math.isqrt(max(0, math.ceil(thr) - 1)))
    return smax, thr


def ball_indices(grid: Grid, center: int, r: float) -> np.ndarray:
    """Flat indices z with 0 < |z - x| < r (center excluded); may be empty."""
    if not (r > 0):
        raise ValueError(f"radius must be positive, got {r}")
    if not (0 <= center < grid.n_points):
        raise ValueError(f"center index {center} out of range")
    cm = grid.multi_index(center)
    smax, thr = _sq_steps_threshold(grid, r)
    offs = _axis_windows(grid, cm, smax)
    if grid.dim == 1:
        d = offs[0] - cm[0]
        sq = d * d
        mask = (sq > 0) & (sq < thr)
        return offs[0][mask].astype(np.int64)
    d0 = offs[0] - cm[0]
    d1 = offs[1] - cm[1]
    sq = d0[:, None] * d0[:, None] + d1[None, :] * d1[None, :]
    mask = (sq > 0) & (sq < thr)
    i0, i1 = np.nonzero(mask)
    return (offs[0][i0] * grid.counts[1] + offs[1][i1]).astype(np.int64)


def lens_indices(grid: Grid, x: int, y: int) -> np.ndarray:
    """Grid points z with |z-x| < r and |z-y| < r for r = |x-y|, z not in {x, y}.

    Both distance tests reduce to exact integer comparisons because r is
    realized by a lattice displacement.
    """
    if x == y:
        raise ValueError("lens endpoints must differ")
    xm = grid.multi_index(x)
    ym = grid.multi_index(y)
    r2 = sum((ym[a] - xm[a]) ** 2 for a in range(grid.dim))
    smax = int(math.isqrt(max(0, r2 - 1)))
    offs = _axis_windows(grid, xm, smax)
    if grid.dim == 1:
        dx = offs[0] - xm[0]
        dy = offs[0] - ym[0]
        mask = (dx * dx < r2) & (dy * dy < r2) & (dx != 0) & (dy != 0)
        return offs[0][mask].astype(np.int64)
    dx0 = offs[0] - xm[0]
    dx1 = offs[1] - xm[1]
    dy0 = offs[0] - ym[0]
    dy1 = offs[1] - ym[1]
    sqx = dx0[:, None] ** 2 + dx1[None, :] ** 2
    sqy = dy0[:, None] ** 2 + dy1[None, :] ** 2
    mask = (sqx < r2) & (sqy < r2) & (sqx > 0) & (sqy > 0)
    i0, i1 = np.nonzero(mask)
    return (offs[0][i0] * grid.counts[1] + offs[1][i1]).astype(np.int64)


def gradient(f: GridFunction) -> np.ndarray:
    """Discrete gradient, shape (n_points, dim).

    Central differences at interior points, first-order one-sided differences
    at the boundary, so the output covers the full grid.
    """
    g = f.grid
    if any(c < 3 for c in g.counts):
        raise ValueError("gradient requires at least 3 points per axis")
    v = f.values.reshape(g.counts)
    h = g.h
    out = np.empty(g.counts + (g.dim,))
    for a in range(g.dim):
        d = np.empty_like(v)
        sl = [slice(None)] * g.dim

        def ax(i):
            s = list(sl)
            s[a] = i
            return tuple(s)

        d[ax(slice(1, -1))] = (v[ax(slice(2, None))] - v[ax(slice(None, -2))]) / (2 * h)
        d[ax(0)] = (v[ax(1)] - v[ax(0)]) / h
        d[ax(-1)] = (v[ax(-1)] - v[ax(-2)]) / h
        out[..., a] = d
    return out.reshape(g.n_points, g.dim)


# --- test-function corpus ---------------------------------------------------

_KINDS = (
    "polynomial",
    "holder_cusp",
    "weierstrass",
    "sin_composite",
    "exponential",
    "indicator",
    "custom_table",
)


@dataclass(frozen=True)
class TestFunction:
    """Analytic test function; 2D evaluation lifts the 1D profile.

    Polynomials, sine waves and the truncated Weierstrass sum lift to 2D as
    separable sums ``p(x0) + p(x1)``; the Hoelder cusp lifts radially as
    ``|x|^alpha``; indicators become boxes.  ``custom_table`` carries raw
    values and can only be sampled, not evaluated.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        k, p = self.kind, self.params
        if k not in _KINDS:
            raise ValueError(f"unknown test function kind {k!r}")
        if k == "polynomial":
            if len(p) == 0:
                raise ValueError("polynomial needs at least one coefficient")
        elif k == "holder_cusp":
            (alpha,) = p
            if not (0 < alpha <= 1):
                raise ValueError(f"holder_cusp requires 0 < alpha <= 1, got {alpha}")
        elif k == "weierstrass":
            a, b, kterms = p
            if not (0 < a < 1):
                raise ValueError(f"weierstrass requires 0 < a < 1, got a={a}")
            if int(b) != b or b < 3 or int(b) % 2 == 0:
                raise ValueError(f"weierstrass requires odd integer b >= 3, got b={b}")
            if a * b < 1:
                raise ValueError(f"weierstrass requires a*b >= 1, got {a * b}")
            if int(kterms) != kterms or kterms < 1:
                raise ValueError(f"weierstrass requires K >= 1 truncation terms, got {kterms}")
        elif k == "sin_composite":
            (freq,) = p
            if freq <= 0:
                raise ValueError(f"sin_composite requires positive frequency, got {freq}")
        elif k == "exponential":
            amp, rate = p
            if amp == 0:
                raise ValueError("exponential requires a nonzero amplitude")
        elif k == "indicator":
            if len(p) not in (2, 4):
                raise ValueError("indicator takes (lo, hi) or (lo0, hi0, lo1, hi1)")
            for lo, hi in zip(p[::2], p[1::2]):
                if not lo < hi:
                    raise ValueError(f"indicator requires lo < hi, got ({lo}, {hi})")
        elif k == "custom_table":
            if len(p) == 0:
                raise ValueError("custom_table needs at least one value")

    @property
    def label(self) -> str:
        if self.kind == "custom_table":
            return f"custom_table[{len(self.params)}]"
        return f"{self.kind}({','.join(repr(v) for v in self.params)})"

    @property
    def differentiable(self) -> bool:
        return self.kind in ("polynomial", "sin_composite", "exponential")

    # 1D profile and its derivatives -----------------------------------

    def profile(self, x, order: int = 0):
        """Evaluate the 1D profile (or its ``order``-th derivative) at x."""
        x = np.asarray(x, dtype=float)
        k = self.kind
        if k == "polynomial":
            coeffs = self.params
            out = np.zeros_like(x)
            for i in range(len(coeffs) - 1, order - 1, -1):
                c = coeffs[i] * math.factorial(i) / math.factorial(i - order)
                out = out * x + c
            return out
        if order > 0 and not self.differentiable:
            raise ValueError(f"{self.kind} provides no analytic derivatives")
        if k == "sin_composite":
            (freq,) = self.params
            w = 2 * math.pi * freq
            return w**order * np.sin(w * x + order * math.pi / 2)
        if k == "exponential":
            amp, rate = self.params
            return amp * rate**order * np.exp(rate * x)
        if k == "holder_cusp":
            (alpha,) = self.params
            return np.abs(x) ** alpha
        if k == "weierstrass":
            a, b, kterms = self.params
            out = np.zeros_like(x)
            for j in range(int(kterms)):
                out += a**j * np.cos(b**j * math.pi * x)
            return out
        if k == "indicator":
            lo, hi = self.params[0], self.params[1]
            return ((x >= lo) & (x <= hi)).astype(float)
        raise ValueError(f"{self.kind} cannot be evaluated pointwise")

    def __call__(self, x):
        return self.profile(x, 0)

    def derivative(self, x, order: int):
        """1D analytic derivative; raises for the non-differentiable kinds."""
        if not self.differentiable:
            raise ValueError(f"{self.kind} provides no analytic derivatives")
        return self.profile(x, order)

    # 2D evaluation -----------------------------------------------------

    def value_nd(self, pts: np.ndarray, dim: int):
        pts = np.asarray(pts, dtype=float)
        if dim == 1:
            return self.profile(pts.reshape(-1), 0)
        k = self.kind
        if k == "holder_cusp":
            (alpha,) = self.params
            return np.linalg.norm(pts, axis=-1) ** alpha
        if k == "indicator":
            p = self.params if len(self.params) == 4 else self.params * 2
            m0 = (pts[:, 0] >= p[0]) & (pts[:, 0] <= p[1])
            m1 = (pts[:, 1] >= p[2]) & (pts[:, 1] <= p[3])
            return (m0 & m1).astype(float)
        if k in ("polynomial", "sin_composite", "weierstrass", "exponential"):
            return self.profile(pts[:, 0], 0) + self.profile(pts[:, 1], 0)
        raise ValueError(f"{self.kind} cannot be evaluated pointwise")

    def partial(self, pts: np.ndarray, alpha: tuple[int, int]):
        """2D partial derivative of multi-index ``alpha`` (separable-sum lift)."""
        if not self.differentiable:
            raise ValueError(f"{self.kind} provides no analytic derivatives")
        pts = np.asarray(pts, dtype=float)
        a, b = alpha
        if a == 0 and b == 0:
            return self.value_nd(pts, 2)
        if a > 0 and b > 0:
            return np.zeros(pts.shape[0])
        if a > 0:
            return self.profile(pts[:, 0], a)
        return self.profile(pts[:, 1], b)

    def gradient_at(self, pts: np.ndarray, dim: int):
        pts = np.asarray(pts, dtype=float)
        if dim == 1:
            return self.derivative(pts.reshape(-1), 1)[:, None]
        return np.column_stack([self.partial(pts, (1, 0)), self.partial(pts, (0, 1))])


def polynomial(coeffs) -> TestFunction:
    return TestFunction("polynomial", tuple(float(c) for c in coeffs))


def holder_cusp(alpha: float) -> TestFunction:
    return TestFunction("holder_cusp", (float(alpha),))


def weierstrass(a: float = 0.5, b: int = 3, terms: int = 30) -> TestFunction:
    return TestFunction("weierstrass", (float(a), int(b), int(terms)))


def sin_composite(freq: float = 1.0) -> TestFunction:
    return TestFunction("sin_composite", (float(freq),))


def exponential(amplitude: float = 1.0, rate: float = 1.0) -> TestFunction:
    return TestFunction("exponential", (float(amplitude), float(rate)))


def indicator(*bounds) -> TestFunction:
    if len(bounds) == 1:
        bounds = tuple(bounds[0])
    return TestFunction("indicator", tuple(float(b) for b in bounds))


def custom_table(values) -> TestFunction:
    return TestFunction("custom_table", tuple(float(v) for v in values))


def standard_corpus() -> tuple[TestFunction, ...]:
    """The default mixed corpus: smooth, cuspy, fractal, and discontinuous."""
    return (
        polynomial((0.25, 0.5)),
        polynomial((0.0, 0.0, 1.0)),
        sin_composite(1.0),
        holder_cusp(0.5),
        weierstrass(0.5, 3, 30),
        indicator(0.25, 0.75),
    )


def smooth_corpus() -> tuple[TestFunction, ...]:
    return tuple(tf for tf in standard_corpus() if tf.differentiable)


def sample(tf: TestFunction, grid: Grid) -> GridFunction:
    """Evaluate a test function at every grid point."""
    if tf.kind == "custom_table":
        if len(tf.params) != grid.n_points:
            raise ValueError(
                f"custom_table has {len(tf.params)} values, grid has {grid.n_points} points"
            )
        return GridFunction(grid, np.array(tf.params, dtype=float))
    return GridFunction(grid, tf.value_nd(grid.points(), grid.dim))


def gridfunction_to_csv(f: GridFunction) -> str:
    """CSV serialization: header ``index,coord...,value``, 17 significant digits."""
    g = f.grid
    cols = ",".join(f"coord{a}" for a in range(g.dim))
    lines = [f"index,{cols},value"]
    pts = g.points()
    for i in range(g.n_points):
        coords = ",".join(f"{c:.17g}" for c in pts[i])
        lines.append(f"{i},{coords},{f.values[i]:.17g}")
    return "\n".join(lines) + "\n"
