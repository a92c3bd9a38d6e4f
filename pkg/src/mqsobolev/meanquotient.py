"""Maximal mean difference quotient fields and the pointwise inequality verifiers.

The mean quotient at a point averages |f(z)-f(x)| / |z-x| over punctured open
balls; its supremum over the radius ladder is the canonical metric-gradient
candidate.  Two layers of verification are provided:

* an exact discrete chain: averaging the three-point triangle inequality over
  the lens B(x,r) & B(y,r), r = |x-y|, bounds the difference quotient of any
  pair by actual point-count ratios times the mean quotients at the
  endpoints -- an identity-level statement checked with zero tolerance;
* continuum-constant checks (lens constant c(n), gradient domination,
  Poincare and Hoelder bounds) that carry an O(h) discretization allowance
  ``1 + kappa*h/|x-y|`` per pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import grid as _grid
from ._util import map_chunked
from .grid import Grid, GridFunction, ball_indices
from .maximal import ScalarField, centered_maximal, ladder_max_rung

__all__ = [
    "MQField",
    "InequalityReport",
    "ChainReport",
    "PreconditionError",
    "lens_constant",
    "lens_area_oracle_2d",
    "mean_quotient_at",
    "mq_field",
    "mq_value_at",
    "verify_pointwise",
    "lens_chain_check",
    "smg_lattice_check",
    "verify_minimality",
    "verify_grad_domination",
    "poincare_pointwise",
    "poincare_integral",
    "holder_check",
]

_DENSE_LIMIT = 4100


class PreconditionError(ValueError):
    """A verifier was invoked before its stated precondition was established."""


@dataclass(frozen=True)
class MQField:
    """A maximal mean quotient field together with its radius cap."""

    base: ScalarField
    radius_cap: float | None
    empty_flags: np.ndarray  # True where no ladder radius produced a ball

    @property
    def values(self) -> np.ndarray:
        return self.base.values

    @property
    def grid(self) -> Grid:
        return self.base.grid


@dataclass
class InequalityReport:
    """Result of a pairwise (or pointwise) inequality sweep.

    ``passed`` holds iff worst_ratio <= constant_used * (1 + tolerance) at
    the recorded worst pair and no hard failures (zero denominator against a
    nonzero difference) occurred.
    """

    name: str
    pairs_checked: int
    worst_ratio: float
    worst_pair: tuple
    constant_used: float
    tolerance: float
    passed: bool
    hard_failures: int = 0
    flagged_pairs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pairs_checked": self.pairs_checked,
            "worst_ratio": self.worst_ratio,
            "worst_pair": [list(map(float, p)) for p in self.worst_pair],
            "constant_used": self.constant_used,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class ChainReport:
    """Result of the exact lens-average chain sweep (tolerance 0)."""

    name: str
    pairs_checked: int
    skipped_empty_lens: int
    worst_margin: float
    worst_pair: tuple
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pairs_checked": self.pairs_checked,
            "skipped_empty_lens": self.skipped_empty_lens,
            "worst_margin": self.worst_margin,
            "worst_pair": [list(map(float, p)) for p in self.worst_pair],
            "pass": self.passed,
        }


def lens_constant(dim: int) -> float:
    """Volume ratio |B(x,r)| / |B(x,r) & B(y,r)| at |x-y| = r.

    In 1D the lens is an interval of length r inside a ball of length 2r.
    In 2D the lens of two unit-distance unit disks has area
    2*acos(1/2) - (1/2)*sqrt(3) = 2*pi/3 - sqrt(3)/2 per unit r^2.
    """
    if dim == 1:
        return 2.0
    if dim == 2:
        return math.pi / (2 * math.pi / 3 - math.sqrt(3) / 2)
    raise ValueError(f"lens constant defined for dim in {{1, 2}}, got {dim}")


def lens_area_oracle_2d(step: float = 2e-4) -> float:
    """Deterministic lattice-count estimate of the 2D ball/lens area ratio.

    Counts midpoints of a step x step lattice lying in both unit disks with
    centers (0,0) and (1,0); independent of the closed form above.
    """
    xs = np.arange(0.0 + step / 2, 1.0, step)
    area = 0.0
    for lo in range(0, xs.size, 1024):
        x = xs[lo : lo + 1024][:, None]
        ymax = np.sqrt(np.maximum(0.0, 1.0 - np.maximum(x, 1.0 - x) ** 2))
        # the lens is symmetric in y; count a half-column per x
        area += 2.0 * np.sum(np.floor(ymax / step + 0.5)) * step * step
    return math.pi / area


def mean_quotient_at(f: GridFunction, x: int, r: float) -> float:
    """Counting average of |f(z)-f(x)| / |z-x| over the punctured ball."""
    g = f.grid
    ball = ball_indices(g, x, r)
    if ball.size == 0:
        raise ValueError(f"ball of radius {r} around index {x} contains no grid points")
    pts = g.points()
    d = np.linalg.norm(pts[ball] - pts[x], axis=1)
    return float(np.mean(np.abs(f.values[ball] - f.values[x]) / d))


def _ladder_sup_1d(values: np.ndarray, comps: list[np.ndarray], m: int, h: float, jmax: int):
    """sup over ladder rungs of punctured-ball averages of |f(z)-T(z)| / |z-x|^m.

    ``comps`` holds the Taylor coefficient fields [c_0 ... c_{m-1}] at every
    center; for m = 1 this is just [f] and the numerator is |f(z)-f(x)|.
    """
    n = values.size
    S = np.zeros(n)
    C = np.zeros(n, dtype=np.int64)
    best = np.zeros(n)
    dmax = min(n - 1, jmax - 1)
    for d in range(1, dmax + 1):
        dh = d * h
        denom = dh**m
        t_r = np.zeros(n - d)
        t_l = np.zeros(n - d)
        for l in range(len(comps)):
            fl = math.factorial(l)
            t_r += comps[l][: n - d] * (dh**l / fl)
            t_l += comps[l][d:] * ((-dh) ** l / fl)
        S[: n - d] += np.abs(values[d:] - t_r) / denom
        S[d:] += np.abs(values[: n - d] - t_l) / denom
        C[: n - d] += 1
        C[d:] += 1
        nz = C > 0
        avg = np.zeros(n)
        avg[nz] = S[nz] / C[nz]
        np.maximum(best, avg, out=best)
    return best, C > 0


def _ladder_sup_2d(g: Grid, values: np.ndarray, comps: dict, m: int, jmax: int):
    """2D analog of `_ladder_sup_1d`; ``comps`` maps multi-indices to fields."""
    n0, n1 = g.counts
    h = g.h
    N = g.n_points
    out = np.zeros(N)
    seen = np.zeros(N, dtype=bool)
    i0s = np.arange(n0)
    i1s = np.arange(n1)
    ladder_sq = (np.arange(1, jmax + 1, dtype=np.int64)) ** 2
    alphas = sorted(comps.keys())
    facts = {a: math.factorial(a[0]) * math.factorial(a[1]) for a in alphas}

    def run(start, stop):
        for p in range(start, stop):
            c0, c1 = divmod(p, n1)
            o0 = i0s - c0
            o1 = i1s - c1
            sq = (o0**2)[:, None] + (o1**2)[None, :]
            dx0 = (o0 * h)[:, None]
            dx1 = (o1 * h)[None, :]
            t = np.zeros((n0, n1))
            for a in alphas:
                t += comps[a][p] * dx0 ** a[0] * dx1 ** a[1] / facts[a]
            num = np.abs(values.reshape(n0, n1) - t).ravel()
            sqf = sq.ravel()
            keep = sqf > 0
            sqk = sqf[keep]
            dist = h * np.sqrt(sqk)
            q = num[keep] / dist**m
            order = np.argsort(sqk, kind="stable")
            sq_sorted = sqk[order]
            csum = np.cumsum(q[order])
            pos = np.searchsorted(sq_sorted, ladder_sq, side="left")
            pos = np.unique(pos[pos > 0])
            if pos.size:
                out[p] = np.max(csum[pos - 1] / pos)
                seen[p] = True

    map_chunked(run, N)
    return out, seen


def mq_field(f: GridFunction, cap: float | None = None) -> MQField:
    """Maximal mean quotient field: per-point sup over the radius ladder."""
    g = f.grid
    jmax = ladder_max_rung(g, cap)
    if g.dim == 1:
        best, seen = _ladder_sup_1d(f.values, [f.values], 1, g.h, jmax)
    else:
        best, seen = _ladder_sup_2d(g, f.values, {(0, 0): f.values}, 1, jmax)
    label = "mq" if cap is None else f"mq[cap={cap:g}]"
    return MQField(ScalarField(g, best, label), cap, ~seen)


def mq_value_at(f: GridFunction, x: int, cap: float | None = None) -> float:
    """The maximal mean quotient at a single point (same ladder as mq_field).

    Ball membership is decided on integer squared step distances, exactly as
    in the field kernels.
    """
    g = f.grid
    jmax = ladder_max_rung(g, cap)
    multi = g.multi_index(x)
    if g.dim == 1:
        sq = (np.arange(g.counts[0]) - multi[0]) ** 2
    else:
        o0 = np.arange(g.counts[0]) - multi[0]
        o1 = np.arange(g.counts[1]) - multi[1]
        sq = ((o0**2)[:, None] + (o1**2)[None, :]).ravel()
    keep = sq > 0
    sqk = sq[keep]
    dist = g.h * np.sqrt(sqk)
    q = np.abs(f.values[keep] - f.values[x]) / dist
    order = np.argsort(sqk, kind="stable")
    csum = np.cumsum(q[order])
    ladder_sq = (np.arange(1, jmax + 1, dtype=np.int64)) ** 2
    pos = np.searchsorted(sqk[order], ladder_sq, side="left")
    pos = np.unique(pos[pos > 0])
    if pos.size == 0:
        return 0.0
    return float(np.max(csum[pos - 1] / pos))


def _clearance_steps_all(g: Grid) -> np.ndarray:
    """Steps from every point to the nearest domain face."""
    idx = np.arange(g.n_points)
    if g.dim == 1:
        n = g.counts[0]
        return np.minimum(idx, n - 1 - idx)
    n0, n1 = g.counts
    i0, i1 = np.divmod(idx, n1)
    return np.minimum(np.minimum(i0, n0 - 1 - i0), np.minimum(i1, n1 - 1 - i1))


def verify_pointwise(
    f: GridFunction,
    g: ScalarField,
    c: float,
    pair_budget: int = 10_000_000,
    kappa: float = 4.0,
    interior_only: bool = False,
    seed: int = 0,
    name: str = "pointwise",
) -> InequalityReport:
    """Check |f(x)-f(y)| <= c * |x-y| * (g(x)+g(y)) over pairs.

    Pairs with zero denominator and equal values pass vacuously; zero
    denominator against differing values is a hard failure.  Each pair gets
    the multiplicative allowance 1 + kappa*h/|x-y|.  When the full pair set
    exceeds ``pair_budget`` a deterministic stratified sample over ten
    distance bands is used.
    """
    gr = f.grid
    if g.grid != gr:
        raise ValueError("function and candidate gradient live on different grids")
    if not (c > 0):
        raise ValueError(f"constant must be positive, got {c}")
    N = gr.n_points
    pts = gr.points()
    fv = f.values
    gv = g.values
    n_pairs = N * (N - 1) // 2
    state = {
        "checked": 0,
        "worst_margin": -1.0,
        "worst": (0.0, 0.0, ((0.0,) * gr.dim, (0.0,) * gr.dim)),
        "hard": 0,
        "flagged": [],
    }
    clear = _clearance_steps_all(gr) if interior_only else None

    def consume(i_idx, j_idx):
        d = np.linalg.norm(pts[i_idx] - pts[j_idx], axis=1)
        keep = d > 0
        if interior_only:
            sq = np.rint((d / gr.h) ** 2).astype(np.int64)
            smax = np.floor(np.sqrt(np.maximum(sq - 1, 0))).astype(np.int64)
            keep &= (clear[i_idx] >= smax) & (clear[j_idx] >= smax)
        i_idx, j_idx, d = i_idx[keep], j_idx[keep], d[keep]
        num = np.abs(fv[i_idx] - fv[j_idx])
        den = d * (gv[i_idx] + gv[j_idx])
        zero_den = den == 0
        hard = zero_den & (num > 0)
        nh = int(np.count_nonzero(hard))
        if nh:
            state["hard"] += nh
            for k in np.nonzero(hard)[0][:5]:
                state["flagged"].append(
                    (tuple(pts[i_idx[k]]), tuple(pts[j_idx[k]]))
                )
        ok = ~zero_den
        ratio = np.zeros(num.size)
        ratio[ok] = num[ok] / den[ok]
        tol = kappa * gr.h / np.where(d > 0, d, 1.0)
        margin = np.where(ok, ratio / (c * (1.0 + tol)), 0.0)
        state["checked"] += int(num.size)
        if margin.size:
            k = int(np.argmax(margin))
            if margin[k] > state["worst_margin"]:
                state["worst_margin"] = float(margin[k])
                state["worst"] = (
                    float(ratio[k]),
                    float(tol[k]),
                    (tuple(pts[i_idx[k]]), tuple(pts[j_idx[k]])),
                )

    if n_pairs <= pair_budget and N <= _DENSE_LIMIT:
        chunk = max(1, min(N, 8_000_000 // max(N, 1)))
        for lo in range(0, N, chunk):
            hi = min(lo + chunk, N)
            ii, jj = np.meshgrid(np.arange(lo, hi), np.arange(N), indexing="ij")
            mask = jj > ii
            consume(ii[mask], jj[mask])
    else:
        rng = np.random.default_rng(seed)
        bands = np.linspace(gr.h, gr.diameter, 11)
        quota = max(1, pair_budget // 10)
        for b in range(10):
            got = 0
            attempts = 0
            while got < quota and attempts < 20 * quota:
                take = min(quota - got, 65536)
                ii = rng.integers(0, N, take)
                jj = rng.integers(0, N, take)
                d = np.linalg.norm(pts[ii] - pts[jj], axis=1)
                sel = (d >= bands[b]) & (d < bands[b + 1]) & (ii != jj)
                consume(ii[sel], jj[sel])
                got += int(np.count_nonzero(sel))
                attempts += take

    worst_ratio, worst_tol, worst_pair = state["worst"]
    passed = state["hard"] == 0 and state["worst_margin"] <= 1.0
    return InequalityReport(
        name=name,
        pairs_checked=state["checked"],
        worst_ratio=worst_ratio,
        worst_pair=worst_pair,
        constant_used=c,
        tolerance=worst_tol,
        passed=passed,
        hard_failures=state["hard"],
        flagged_pairs=state["flagged"],
    )


def _lens_chain_1d(f: GridFunction) -> ChainReport:
    g = f.grid
    n = g.counts[0]
    h = g.h
    fv = f.values
    x0 = g.origin[0]
    S = np.zeros(n)
    C = np.zeros(n, dtype=np.int64)
    checked = 0
    skipped = n - 1  # adjacent pairs have empty lenses
    worst = -1.0
    worst_pair = ((x0,), (x0,))
    passed = True
    for d in range(1, n):
        v = np.abs(fv[d:] - fv[: n - d]) / (d * h)
        S[: n - d] += v
        S[d:] += v
        C[: n - d] += 1
        C[d:] += 1
        D = d + 1
        if D > n - 1:
            break
        lens = D - 1
        lhs = np.abs(fv[D:] - fv[: n - D]) / (D * h)
        Sx, Cx = S[: n - D], C[: n - D]
        Sy, Cy = S[D:], C[D:]
        rhs = (Cx / lens) * (Sx / Cx) + (Cy / lens) * (Sy / Cy)
        checked += lhs.size
        if np.any(lhs > rhs):
            passed = False
        with np.errstate(divide="ignore", invalid="ignore"):
            marg = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
        k = int(np.argmax(marg))
        if marg[k] > worst:
            worst = float(marg[k])
            worst_pair = ((x0 + k * h,), (x0 + (k + D) * h,))
    return ChainReport(
        name="lens_chain",
        pairs_checked=checked,
        skipped_empty_lens=skipped,
        worst_margin=worst,
        worst_pair=worst_pair,
        passed=passed,
    )


def _lens_chain_2d_interior(f: GridFunction) -> ChainReport:
    """Full sweep over interior pairs via displacement classes.

    For a fixed displacement, lens and ball point counts are translation
    invariant once both balls fit inside the domain, so one lattice
    enumeration serves every pair of the class.  The per-point prefix table
    costs 8*N^2 bytes (about 2 GB at 129x129); grids beyond that need the
    sampled per-pair route.
    """
    g = f.grid
    n0, n1 = g.counts
    h = g.h
    fv2 = f.values.reshape(n0, n1)
    checked = 0
    skipped = 0
    worst = -1.0
    worst_pair = ((g.origin[0], g.origin[1]),) * 2
    passed = True

    # per-point prefix tables in squared-distance order
    N = g.n_points
    i0s = np.arange(n0)
    i1s = np.arange(n1)
    csum_tab = np.empty((N, N - 1))
    fvflat = f.values
    pts = g.points()

    def build(start, stop):
        for p in range(start, stop):
            c0, c1 = divmod(p, n1)
            sq = (((i0s - c0) ** 2)[:, None] + ((i1s - c1) ** 2)[None, :]).ravel()
            keep = sq > 0
            sqk = sq[keep]
            q = np.abs(fvflat[keep] - fvflat[p]) / (h * np.sqrt(sqk))
            order = np.argsort(sqk, kind="stable")
            csum_tab[p] = np.cumsum(q[order])

    map_chunked(build, N)

    # ball size as a function of squared radius (full lattice, center excluded)
    def ball_count(r2: int) -> int:
        s = math.isqrt(r2 - 1)
        a = np.arange(-s, s + 1)
        sq = a[:, None] ** 2 + a[None, :] ** 2
        return int(np.count_nonzero((sq > 0) & (sq < r2)))

    def lens_count(d0: int, d1: int, r2: int) -> int:
        s = math.isqrt(r2 - 1)
        a = np.arange(min(0, d0) - s, max(0, d0) + s + 1)
        b = np.arange(min(0, d1) - s, max(0, d1) + s + 1)
        sqx = a[:, None] ** 2 + b[None, :] ** 2
        sqy = (a[:, None] - d0) ** 2 + (b[None, :] - d1) ** 2
        return int(np.count_nonzero((sqx > 0) & (sqx < r2) & (sqy > 0) & (sqy < r2)))

    ball_cache: dict[int, int] = {}
    for d0 in range(0, n0):
        for d1 in range(-(n1 - 1), n1):
            if d0 == 0 and d1 <= 0:
                continue
            r2 = d0 * d0 + d1 * d1
            s = math.isqrt(r2 - 1)
            lo0, hi0 = s, n0 - 1 - s - d0
            if d1 >= 0:
                lo1, hi1 = s, n1 - 1 - s - d1
            else:
                lo1, hi1 = s - d1, n1 - 1 - s
            if lo0 > hi0 or lo1 > hi1:
                continue
            n_class = (hi0 - lo0 + 1) * (hi1 - lo1 + 1)
            lens = lens_count(d0, d1, r2)
            if lens == 0:
                skipped += n_class
                continue
            if r2 not in ball_cache:
                ball_cache[r2] = ball_count(r2)
            A = ball_cache[r2]
            x0g, x1g = np.meshgrid(
                np.arange(lo0, hi0 + 1), np.arange(lo1, hi1 + 1), indexing="ij"
            )
            xf = (x0g * n1 + x1g).ravel()
            yf = ((x0g + d0) * n1 + (x1g + d1)).ravel()
            r = h * math.sqrt(r2)
            lhs = np.abs(fvflat[yf] - fvflat[xf]) / r
            mx = csum_tab[xf, A - 1] / A
            my = csum_tab[yf, A - 1] / A
            rhs = (A / lens) * mx + (A / lens) * my
            checked += lhs.size
            if np.any(lhs > rhs):
                passed = False
            with np.errstate(divide="ignore", invalid="ignore"):
                marg = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
            k = int(np.argmax(marg))
            if marg[k] > worst:
                worst = float(marg[k])
                worst_pair = (tuple(pts[xf[k]]), tuple(pts[yf[k]]))
    return ChainReport(
        name="lens_chain",
        pairs_checked=checked,
        skipped_empty_lens=skipped,
        worst_margin=worst,
        worst_pair=worst_pair,
        passed=passed,
    )


def chain_check_pair(f: GridFunction, x: int, y: int):
    """Direct single-pair chain check; returns (lhs, rhs) or None if lens empty.

    Valid for boundary pairs as well: clipped ball counts enter per side.
    """
    g = f.grid
    lens = _grid.lens_indices(g, x, y)
    if lens.size == 0:
        return None
    pts = g.points()
    r = float(np.linalg.norm(pts[y] - pts[x]))
    bx = ball_indices(g, x, r)
    by = ball_indices(g, y, r)
    lhs = abs(f.values[y] - f.values[x]) / r
    rhs = (bx.size / lens.size) * mean_quotient_at(f, x, r) + (
        by.size / lens.size
    ) * mean_quotient_at(f, y, r)
    return lhs, rhs


def lens_chain_check(
    f: GridFunction, pair_budget: int = 10_000_000, seed: int = 0
) -> ChainReport:
    """Exact discrete chain |f(x)-f(y)|/|x-y| <= (#ball/#lens)(MrQ(x)+MrQ(y)).

    1D sweeps every pair (boundary included; ball counts are clipped per
    side).  2D sweeps every interior pair by displacement class and adds a
    deterministic sample of arbitrary pairs to cover the boundary.
    """
    g = f.grid
    if g.dim == 1:
        return _lens_chain_1d(f)
    rep = _lens_chain_2d_interior(f)
    rng = np.random.default_rng(seed)
    N = g.n_points
    n_extra = int(min(400, pair_budget, N * (N - 1) // 2))
    pts = g.points()
    extra_checked = 0
    for _ in range(n_extra):
        x = int(rng.integers(0, N))
        y = int(rng.integers(0, N))
        if x == y:
            continue
        out = chain_check_pair(f, x, y)
        if out is None:
            rep.skipped_empty_lens += 1
            continue
        lhs, rhs = out
        extra_checked += 1
        marg = lhs / rhs if rhs > 0 else (np.inf if lhs > 0 else 0.0)
        if lhs > rhs:
            rep.passed = False
        if marg > rep.worst_margin:
            rep.worst_margin = float(marg)
            rep.worst_pair = (tuple(pts[x]), tuple(pts[y]))
    rep.pairs_checked += extra_checked
    return rep


@dataclass
class LatticeReport:
    """SMG lattice structure: both candidates, their min, and upward closure."""

    g1: InequalityReport
    g2: InequalityReport
    minimum: InequalityReport
    upward: InequalityReport

    @property
    def passed(self) -> bool:
        return self.minimum.passed and self.upward.passed


def smg_lattice_check(
    f: GridFunction,
    g1: ScalarField,
    g2: ScalarField,
    c: float,
    pair_budget: int = 10_000_000,
    kappa: float = 4.0,
) -> LatticeReport:
    """Verify min(g1, g2) and g1 + (nonnegative field) stay admissible."""
    r1 = verify_pointwise(f, g1, c, pair_budget, kappa, name="lattice_g1")
    r2 = verify_pointwise(f, g2, c, pair_budget, kappa, name="lattice_g2")
    if not (r1.passed and r2.passed):
        raise PreconditionError(
            "lattice check requires both candidates to pass the pointwise bound"
        )
    gmin = ScalarField(f.grid, np.minimum(g1.values, g2.values), "min(g1,g2)")
    gup = ScalarField(f.grid, g1.values + g2.values, "g1+g2")
    rmin = verify_pointwise(f, gmin, c, pair_budget, kappa, name="lattice_min")
    rup = verify_pointwise(f, gup, c, pair_budget, kappa, name="lattice_upward")
    return LatticeReport(r1, r2, rmin, rup)


def verify_minimality(
    f: GridFunction,
    g: ScalarField,
    tol: float = 0.25,
    pair_budget: int = 10_000_000,
    kappa: float = 4.0,
) -> tuple[InequalityReport, InequalityReport]:
    """Check MQf <= g + Mg (with tolerance) and g <= Mg (exact).

    Requires g to satisfy the pointwise bound with constant 1 first.
    """
    pre = verify_pointwise(f, g, 1.0, pair_budget, kappa, name="minimality_pre")
    if not pre.passed:
        raise PreconditionError(
            "candidate does not satisfy the pointwise bound with constant 1"
        )
    gr = f.grid
    pts = gr.points()
    mq = mq_field(f).values
    mg = centered_maximal(GridFunction(gr, g.values)).values
    upper = (g.values + mg) * (1.0 + tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio1 = np.where(g.values + mg > 0, mq / (g.values + mg), np.where(mq > 0, np.inf, 0.0))
    k1 = int(np.argmax(ratio1))
    rep1 = InequalityReport(
        name="minimality_upper",
        pairs_checked=gr.n_points,
        worst_ratio=float(ratio1[k1]),
        worst_pair=(tuple(pts[k1]), tuple(pts[k1])),
        constant_used=1.0,
        tolerance=tol,
        passed=bool(np.all(mq <= upper)),
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio2 = np.where(mg > 0, g.values / mg, np.where(g.values > 0, np.inf, 0.0))
    k2 = int(np.argmax(ratio2))
    rep2 = InequalityReport(
        name="minimality_majorize",
        pairs_checked=gr.n_points,
        worst_ratio=float(ratio2[k2]),
        worst_pair=(tuple(pts[k2]), tuple(pts[k2])),
        constant_used=1.0,
        tolerance=0.0,
        passed=bool(np.all(g.values <= mg)),
    )
    return rep1, rep2


def verify_grad_domination(
    f: GridFunction, tol: float | None = None, margin_steps: int = 1
) -> InequalityReport:
    """Check MQf <= centered_maximal(|grad f|) * (1 + tol) at interior points.

    Meaningful for samples of differentiable corpus functions; ``tol``
    defaults to 4h.
    """
    gr = f.grid
    if tol is None:
        tol = 4.0 * gr.h
    speed = np.linalg.norm(_grid.gradient(f), axis=1)
    mgrad = centered_maximal(GridFunction(gr, speed)).values
    mq = mq_field(f).values
    interior = _clearance_steps_all(gr) >= margin_steps
    pts = gr.points()
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(mgrad > 0, mq / mgrad, np.where(mq > 0, np.inf, 0.0))
    ratio = np.where(interior, ratio, 0.0)
    k = int(np.argmax(ratio))
    passed = bool(np.all(ratio[interior] <= 1.0 + tol))
    return InequalityReport(
        name="grad_domination",
        pairs_checked=int(np.count_nonzero(interior)),
        worst_ratio=float(ratio[k]),
        worst_pair=(tuple(pts[k]), tuple(pts[k])),
        constant_used=1.0,
        tolerance=tol,
        passed=passed,
    )


def poincare_pointwise(f: GridFunction, x: int, r: float) -> tuple[float, float]:
    """(|f(x) - ball average of f|, r * MQf(x)) for the ball B(x, r)."""
    g = f.grid
    ball = ball_indices(g, x, r)
    if ball.size == 0:
        raise ValueError(f"ball of radius {r} around index {x} contains no grid points")
    members = np.concatenate([[x], ball])
    lhs = abs(f.values[x] - float(np.mean(f.values[members])))
    rhs = r * mq_value_at(f, x)
    return lhs, rhs


def poincare_integral(f: GridFunction, p: float) -> float:
    """Empirical Poincare ratio  [avg|f-mean|^p]^(1/p) / (diam * [avg|grad f|^p]^(1/p))."""
    if p < 1:
        raise ValueError(f"exponent must satisfy p >= 1, got {p}")
    gr = f.grid
    fv = f.values
    num = float(np.mean(np.abs(fv - fv.mean()) ** p) ** (1.0 / p))
    if num == 0.0:
        return 0.0
    speed = np.linalg.norm(_grid.gradient(f), axis=1)
    den = gr.diameter * float(np.mean(speed**p) ** (1.0 / p))
    return num / den if den > 0 else math.inf


def holder_check(f: GridFunction, p: float, kappa: float = 4.0) -> InequalityReport:
    """Check |f(y)-f(x)| <= |y-x|^(1-1/p) * ||f'||_p over all pairs (1D)."""
    gr = f.grid
    if gr.dim != 1:
        raise ValueError("Hoelder check is 1D")
    if p <= 1:
        raise ValueError(f"exponent must satisfy p > 1, got {p}")
    speed = np.abs(_grid.gradient(f)[:, 0])
    vol = gr.extent[0]
    norm = float((vol * np.mean(speed**p)) ** (1.0 / p))
    alpha = 1.0 - 1.0 / p
    n = gr.counts[0]
    xs = gr.axis_coords(0)
    fv = f.values
    worst_margin = -1.0
    worst = (0.0, 0.0, ((xs[0],), (xs[0],)))
    checked = 0
    hard = 0
    for d in range(1, n):
        dist = d * gr.h
        num = np.abs(fv[d:] - fv[: n - d])
        bound = dist**alpha * norm
        tol = kappa * gr.h / dist
        checked += num.size
        if bound == 0:
            hard += int(np.count_nonzero(num > 0))
            continue
        ratio = num / bound
        k = int(np.argmax(ratio))
        margin = ratio[k] / (1.0 + tol)
        if margin > worst_margin:
            worst_margin = margin
            worst = (float(ratio[k]), tol, ((xs[k],), (xs[k + d],)))
    worst_ratio, worst_tol, worst_pair = worst
    return InequalityReport(
        name="holder",
        pairs_checked=checked,
        worst_ratio=worst_ratio,
        worst_pair=worst_pair,
        constant_used=1.0,
        tolerance=worst_tol,
        passed=hard == 0 and worst_margin <= 1.0,
        hard_failures=hard,
    )
