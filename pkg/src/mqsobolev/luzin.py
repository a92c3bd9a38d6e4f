"""Lipschitz truncation pipeline: sublevel sets of a metric gradient,
the Chebyshev measure bound, and the McShane inf-extension.

The extension formula  min over kept points of f(y) + lam*|x-y|  is globally
lam-Lipschitz as a statement about exact values.  Float64 outputs can drift
off by an ulp across binades, so the 1D verifier recomputes the minima in
exact dyadic-rational arithmetic (every float is one) and compares with zero
tolerance; the float output is the correctly rounded view of those values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .grid import Grid, GridFunction
from .maximal import ScalarField
from .meanquotient import lens_constant, mq_field

__all__ = [
    "LevelSet",
    "sublevel_set",
    "tschebyscheff_check",
    "TschebyscheffReport",
    "mcshane_extend",
    "mcshane_lipschitz_check",
    "McShaneCheck",
    "luzin_pipeline",
    "LuzinResult",
]

_SHIFT = 2400  # binary scaling exponent making all double values integers


@dataclass(frozen=True)
class LevelSet:
    """Points where a nonnegative field stays below a threshold."""

    grid: Grid
    member_flags: np.ndarray
    level: float
    complement_measure: float

    @property
    def n_members(self) -> int:
        return int(np.count_nonzero(self.member_flags))


def sublevel_set(g: ScalarField, level: float) -> LevelSet:
    """Points with g <= level; the complement carries measure h^dim per point."""
    if level < 0:
        raise ValueError(f"threshold must be nonnegative, got {level}")
    flags = g.values <= level
    cell = g.grid.h**g.grid.dim
    return LevelSet(
        grid=g.grid,
        member_flags=flags,
        level=float(level),
        complement_measure=float(cell * np.count_nonzero(~flags)),
    )


@dataclass
class TschebyscheffReport:
    """Per-rung complement measures against the L1/L bound."""

    levels: list[float]
    complement_measures: list[float]
    bounds: list[float]
    monotone: bool
    passed: bool


def tschebyscheff_check(g: ScalarField, levels) -> TschebyscheffReport:
    """Check  measure{g > L} <= ||g||_1 / L  along an increasing ladder."""
    levels = [float(v) for v in levels]
    if any(b <= a for a, b in zip(levels, levels[1:])) or any(v <= 0 for v in levels):
        raise ValueError("levels must be positive and strictly increasing")
    cell = g.grid.h**g.grid.dim
    norm1 = float(cell * np.sum(g.values))
    measures = []
    bounds = []
    for lv in levels:
        measures.append(float(cell * np.count_nonzero(g.values > lv)))
        bounds.append(norm1 / lv)
    monotone = all(b <= a for a, b in zip(measures, measures[1:]))
    passed = monotone and all(m <= b for m, b in zip(measures, bounds))
    return TschebyscheffReport(levels, measures, bounds, monotone, passed)


def mcshane_extend(
    f: GridFunction, kept: LevelSet, lam: float
) -> tuple[GridFunction, float]:
    """Inf-extension  min over kept y of f(y) + lam*|x-y|.

    Returns the extension and the agreement defect max over kept points of
    |extension - f| (zero exactly when f is lam-Lipschitz on the kept set).
    """
    if kept.grid != f.grid:
        raise ValueError("level set and function live on different grids")
    if not (lam > 0):
        raise ValueError(f"Lipschitz parameter must be positive, got {lam}")
    if kept.n_members == 0:
        raise ValueError("cannot extend from an empty kept set")
    g = f.grid
    pts = g.points()
    keep_idx = np.nonzero(kept.member_flags)[0]
    fe = f.values[keep_idx]
    out = np.empty(g.n_points)
    chunk = max(1, 4_000_000 // max(1, keep_idx.size))
    for lo in range(0, g.n_points, chunk):
        hi = min(lo + chunk, g.n_points)
        d = np.linalg.norm(pts[lo:hi, None, :] - pts[None, keep_idx, :], axis=2)
        out[lo:hi] = np.min(fe[None, :] + lam * d, axis=1)
    defect = float(np.max(np.abs(out[keep_idx] - f.values[keep_idx])))
    return GridFunction(g, out), defect


def _scaled_int(v: float) -> int:
    fr = Fraction(v) * (1 << _SHIFT)
    if fr.denominator != 1:
        raise ValueError(f"value {v!r} is not exactly representable at the working scale")
    return fr.numerator


@dataclass
class McShaneCheck:
    """Exact-arithmetic verification of the inf-extension (1D)."""

    n_points: int
    n_kept: int
    lipschitz_exact: bool
    agreement_exact: bool
    float_max_ulp_error: float


def mcshane_lipschitz_check(f: GridFunction, kept: LevelSet, lam: float) -> McShaneCheck:
    """Recompute the 1D extension in exact rational arithmetic and verify.

    Checks, with zero tolerance on exact values: the pairwise Lipschitz bound
    |ext(x) - ext(x')| <= lam*|x - x'|; that agreement on the kept set holds
    exactly iff f is lam-Lipschitz there; and that the float output of
    ``mcshane_extend`` stays within one ulp of the exact minima.
    """
    g = f.grid
    if g.dim != 1:
        raise ValueError("the exact verifier is 1D (2D distances are irrational)")
    if kept.n_members == 0:
        raise ValueError("cannot verify an empty kept set")
    n = g.counts[0]
    xs = g.axis_coords(0)
    keep_idx = [int(j) for j in np.nonzero(kept.member_flags)[0]]
    lam_fr = Fraction(lam)
    coord_fr = [Fraction(float(x)) for x in xs]
    fi = [_scaled_int(v) for v in f.values]

    cache: dict[tuple[int, int], int] = {}

    def lam_dist(i: int, j: int) -> int:
        """lam * |c_j - c_i| at the working scale, from the actual coordinates."""
        key = (i, j) if i <= j else (j, i)
        hit = cache.get(key)
        if hit is not None:
            return hit
        fr = lam_fr * abs(coord_fr[j] - coord_fr[i]) * (1 << _SHIFT)
        if fr.denominator != 1:
            raise ValueError("inputs are not exactly representable at the working scale")
        cache[key] = fr.numerator
        return fr.numerator

    mins = []
    for i in range(n):
        best = min(fi[j] + lam_dist(i, j) for j in keep_idx)
        mins.append(best)

    lipschitz = all(
        abs(mins[j] - mins[i]) <= lam_dist(i, j)
        for i in range(n)
        for j in range(i + 1, n)
    )

    # f lam-Lipschitz on the kept set <=> the extension agrees there exactly
    f_lip_on_kept = all(
        abs(fi[a] - fi[b]) <= lam_dist(a, b)
        for ai, a in enumerate(keep_idx)
        for b in keep_idx[ai + 1 :]
    )
    agree = all(mins[j] == fi[j] for j in keep_idx)

    ext, _ = mcshane_extend(f, kept, lam)
    max_ulp = 0.0
    for i in range(n):
        exact = float(Fraction(mins[i], 1 << _SHIFT))
        err = abs(ext.values[i] - exact)
        ulp = math.ulp(max(abs(ext.values[i]), abs(exact), 1e-300))
        max_ulp = max(max_ulp, err / ulp)
    return McShaneCheck(
        n_points=n,
        n_kept=len(keep_idx),
        lipschitz_exact=lipschitz,
        agreement_exact=agree == f_lip_on_kept,
        float_max_ulp_error=max_ulp,
    )


@dataclass
class LuzinResult:
    """One pipeline run: truncate the metric gradient, extend, measure."""

    level: float
    lam: float
    approximant: GridFunction
    exceptional_measure: float
    lipschitz_witness: float

    def to_dict(self) -> dict:
        return {
            "L": self.level,
            "exceptional_measure": self.exceptional_measure,
            "lipschitz_witness": self.lipschitz_witness,
            "lambda": self.lam,
        }


def luzin_pipeline(f: GridFunction, level: float) -> LuzinResult:
    """mq_field -> sublevel_set -> mcshane_extend with lam = 2*c(dim)*level.

    The pointwise bound makes f restricted to the sublevel set Lipschitz with
    that constant; the result carries the exceptional measure and the
    measured discrete Lipschitz constant of the approximant.
    """
    g = f.grid
    mq = mq_field(f)
    kept = sublevel_set(mq.base, level)
    if kept.n_members == 0:
        raise ValueError(f"threshold {level} lies below the minimum of the field")
    lam = 2.0 * lens_constant(g.dim) * level
    ext, _ = mcshane_extend(f, kept, lam)
    witness = _discrete_lipschitz_constant(ext)
    return LuzinResult(
        level=float(level),
        lam=lam,
        approximant=ext,
        exceptional_measure=kept.complement_measure,
        lipschitz_witness=witness,
    )


def _discrete_lipschitz_constant(f: GridFunction) -> float:
    g = f.grid
    pts = g.points()
    best = 0.0
    chunk = max(1, 4_000_000 // max(1, g.n_points))
    for lo in range(0, g.n_points, chunk):
        hi = min(lo + chunk, g.n_points)
        d = np.linalg.norm(pts[lo:hi, None, :] - pts[None, :, :], axis=2)
        num = np.abs(f.values[lo:hi, None] - f.values[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(d > 0, num / np.where(d > 0, d, 1.0), 0.0)
        best = max(best, float(np.max(r)))
    return best
