"""Discrete Hardy-Littlewood maximal operators and the comparison sandwich.

All 1D operators (centered, uncentered, one-sided) are computed from a single
prefix-sum array of |f|, so identical windows produce bit-identical averages
and the sandwich inequality checks hold with zero tolerance.  Every
operator's candidate family includes the degenerate single-point window: it
is the discrete analog of the vanishing-radius limit and is what makes the
centered-vs-uncentered comparison and the majorization ``field >= |f|`` exact
on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, GridFunction

__all__ = [
    "ScalarField",
    "scalarfield_to_csv",
    "centered_maximal",
    "uncentered_maximal",
    "one_sided_maximal",
    "sandwich_check",
    "SandwichReport",
]

_DENSE_LIMIT = 4100  # n^2 matrices beyond this would not fit comfortably


@dataclass(frozen=True)
class ScalarField:
    """Nonnegative values per grid point plus a label naming the operator."""

    grid: Grid
    values: np.ndarray
    label: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(
                f"values must have shape ({self.grid.n_points},), got {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        if np.any(vals < 0):
            raise ValueError("field values must be nonnegative")
        object.__setattr__(self, "values", vals)


def scalarfield_to_csv(field: ScalarField) -> str:
    """GridFunction CSV layout preceded by a ``# label:`` comment line."""
    from .grid import GridFunction, gridfunction_to_csv

    body = gridfunction_to_csv(GridFunction(field.grid, field.values))
    return f"# label: {field.label}\n{body}"


def ladder_max_rung(grid: Grid, rmax: float | None) -> int:
    """Largest rung j of the radius ladder r_j = j*h.

    Uncapped, the ladder stops at the first rung whose open ball covers the
    whole domain.  A cap keeps rungs with r_j <= rmax (radii within relative
    1e-9 of a grid multiple snap to it).
    """
    full = math.isqrt(sum((c - 1) ** 2 for c in grid.counts)) + 1
    if rmax is None:
        return full
    rh = rmax / grid.h
    j = round(rh)
    jmax = j if abs(rh - j) <= 1e-9 * max(1.0, rh) else math.floor(rh)
    return max(0, min(full, jmax))


def centered_maximal(f: GridFunction, rmax: float | None = None) -> ScalarField:
    """sup over the radius ladder of ball averages of |f|, center included."""
    g = f.grid
    a = np.abs(f.values)
    jmax = ladder_max_rung(g, rmax)
    if jmax == 0:
        raise ValueError(f"radius cap {rmax} admits no ladder rung")
    if g.dim == 1:
        n = g.counts[0]
        pref = np.concatenate([[0.0], np.cumsum(a)])
        idx = np.arange(n)
        best = a.copy()  # the j=1 rung: the ball is empty, the set is {x}
        for m in range(1, jmax):  # window half-width m = j-1
            lo = np.maximum(idx - m, 0)
            hi = np.minimum(idx + m, n - 1)
            avg = (pref[hi + 1] - pref[lo]) / (hi - lo + 1)
            np.maximum(best, avg, out=best)
        return ScalarField(g, best, "centered_maximal")
    return ScalarField(g, _centered_maximal_2d(g, a, jmax), "centered_maximal")


def _centered_maximal_2d(g: Grid, a: np.ndarray, jmax: int) -> np.ndarray:
    n0, n1 = g.counts
    out = np.empty(g.n_points)
    i0s = np.arange(n0)
    i1s = np.arange(n1)
    ladder_sq = (np.arange(1, jmax + 1, dtype=np.int64)) ** 2
    flat = a.ravel()
    for p in range(g.n_points):
        c0, c1 = divmod(p, n1)
        sq = (((i0s - c0) ** 2)[:, None] + ((i1s - c1) ** 2)[None, :]).ravel()
        order = np.argsort(sq, kind="stable")
        csum = np.cumsum(flat[order])
        # the open ball at r = j*h holds squared step distances < j^2
        pos = np.searchsorted(sq[order], ladder_sq, side="left")
        pos = np.unique(pos[pos > 0])
        out[p] = np.max(csum[pos - 1] / pos)
    return out


def uncentered_maximal(f: GridFunction) -> ScalarField:
    """sup over all grid subintervals containing x of the average of |f| (1D)."""
    g = f.grid
    if g.dim != 1:
        raise ValueError("uncentered maximal is implemented for 1D grids only")
    n = g.counts[0]
    if n > _DENSE_LIMIT:
        raise ValueError(f"uncentered maximal supports up to {_DENSE_LIMIT} points, got {n}")
    a = np.abs(f.values)
    pref = np.concatenate([[0.0], np.cumsum(a)])
    starts = np.arange(n)[:, None]
    ends = np.arange(n)[None, :]
    with np.errstate(invalid="ignore"):
        avg = (pref[ends + 1] - pref[starts]) / (ends - starts + 1)
    avg[ends < starts] = -np.inf
    # best window [a, b] with a <= x <= b: suffix max over b, prefix max over a
    m1 = np.maximum.accumulate(avg[:, ::-1], axis=1)[:, ::-1]
    m2 = np.maximum.accumulate(m1, axis=0)
    # the degenerate window is taken directly so it matches the other
    # operators bit for bit (the prefix-difference reconstruction of a
    # single value can be off by an ulp)
    return ScalarField(g, np.maximum(np.diagonal(m2), a), "uncentered_maximal")


def one_sided_maximal(f: GridFunction, side: str) -> ScalarField:
    """sup over [x, x+r] (right) or [x-r, x] (left) averages of |f| (1D)."""
    g = f.grid
    if g.dim != 1:
        raise ValueError("one-sided maximal is implemented for 1D grids only")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    n = g.counts[0]
    a = np.abs(f.values)
    pref = np.concatenate([[0.0], np.cumsum(a)])
    idx = np.arange(n)
    best = a.copy()
    for m in range(1, n):
        if side == "right":
            hi = np.minimum(idx + m, n - 1)
            avg = (pref[hi + 1] - pref[idx]) / (hi - idx + 1)
        else:
            lo = np.maximum(idx - m, 0)
            avg = (pref[idx + 1] - pref[lo]) / (idx - lo + 1)
        np.maximum(best, avg, out=best)
    return ScalarField(g, best, f"one_sided_maximal_{side}")


@dataclass(frozen=True)
class SandwichReport:
    """Outcome of the centered-vs-uncentered comparison."""

    n_points: int
    worst_centered_over_uncentered: float
    worst_uncentered_over_bound: float
    passed: bool


def sandwich_check(f: GridFunction) -> SandwichReport:
    """Check centered <= uncentered <= 2^n * centered pointwise, tolerance 0."""
    g = f.grid
    if g.dim != 1:
        raise ValueError("sandwich check runs where the uncentered operator exists (1D)")
    mc = centered_maximal(f).values
    mu = uncentered_maximal(f).values
    bound = 2.0**g.dim * mc
    with np.errstate(invalid="ignore", divide="ignore"):
        r1 = np.where(mu > 0, mc / mu, 1.0)
        r2 = np.where(bound > 0, mu / bound, np.where(mu > 0, np.inf, 1.0))
    lower_ok = bool(np.all(mc <= mu))
    upper_ok = bool(np.all(mu <= bound))
    return SandwichReport(
        n_points=g.n_points,
        worst_centered_over_uncentered=float(np.max(r1)),
        worst_uncentered_over_bound=float(np.max(r2)),
        passed=lower_ok and upper_ok,
    )
