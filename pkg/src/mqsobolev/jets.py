"""Whitney jets, Taylor fields and remainders, jet algebra, and higher-order quotients.

A jet of order k carries candidate derivative fields indexed by multi-indices
(1D keys are ``(l,)``, 2D keys ``(a, b)`` with a+b <= k).  Taylor fields are
polynomials in the space variable, so derivative identities can be checked
exactly with finite-difference stencils whose truncation error vanishes on
polynomials of the jet's degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, GridFunction, TestFunction, ball_indices, lens_indices
from .meanquotient import MQField, _ladder_sup_1d, _ladder_sup_2d
from .maximal import ScalarField, ladder_max_rung

__all__ = [
    "Jet",
    "jet_from_function",
    "taylor_field",
    "tw_remainder",
    "jet_derivative",
    "jet_commutation_check",
    "component_identity_check",
    "taylor_algebra_check",
    "mq_m_field",
    "second_order_check",
    "jet_to_csv",
]

_MAX_2D_ORDER = 2


def _multi_indices(dim: int, k: int) -> list[tuple[int, ...]]:
    if dim == 1:
        return [(l,) for l in range(k + 1)]
    return [(a, b) for a in range(k + 1) for b in range(k + 1 - a)]


@dataclass(frozen=True)
class Jet:
    """Coefficient fields {f_l : |l| <= order} on a grid."""

    grid: Grid
    order: int
    components: dict

    def __post_init__(self):
        want = set(_multi_indices(self.grid.dim, self.order))
        have = set(self.components.keys())
        if want != have:
            raise ValueError(f"jet of order {self.order} needs components {sorted(want)}")
        for key, arr in self.components.items():
            arr = np.asarray(arr, dtype=float)
            if arr.shape != (self.grid.n_points,):
                raise ValueError(f"component {key} has wrong shape {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"component {key} has non-finite entries")
            self.components[key] = arr

    def component(self, l) -> np.ndarray:
        return self.components[tuple(l)]


def jet_from_function(tf: TestFunction, grid: Grid, k: int) -> Jet:
    """Sample the analytic derivatives of a corpus function into a jet."""
    if not tf.differentiable:
        raise ValueError(f"{tf.kind} provides no analytic derivatives")
    if grid.dim == 2 and k > _MAX_2D_ORDER:
        raise ValueError(f"2D jets support order <= {_MAX_2D_ORDER}, got {k}")
    pts = grid.points()
    comps = {}
    for alpha in _multi_indices(grid.dim, k):
        if grid.dim == 1:
            comps[alpha] = np.asarray(tf.derivative(pts[:, 0], alpha[0]), dtype=float)
        else:
            comps[alpha] = np.asarray(tf.partial(pts, alpha), dtype=float)
    return Jet(grid, k, comps)


def taylor_field(F: Jet, y, x: int) -> float:
    """T^k F(y, x) = sum_l f_l(x) (y-x)^l / l!  for grid point x, any y."""
    g = F.grid
    xc = g.coord(x)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape != (g.dim,):
        raise ValueError(f"y must be a point of dimension {g.dim}")
    d = y - xc
    total = 0.0
    for alpha, comp in F.components.items():
        w = 1.0
        for a in range(g.dim):
            w *= d[a] ** alpha[a] / math.factorial(alpha[a])
        total += comp[x] * w
    return float(total)


def tw_remainder(F: Jet, f: GridFunction, y: int, x: int) -> float:
    """R^k F(y, x) = f(y) - T^k F(y, x) for grid points y, x."""
    if f.grid != F.grid:
        raise ValueError("jet and function live on different grids")
    return float(f.values[y]) - taylor_field(F, F.grid.coord(y), x)


def jet_derivative(F: Jet, l) -> Jet:
    """Formal jet derivative: shift components by l, dropping |l| orders."""
    l = tuple(l) if not isinstance(l, int) else (l,)
    g = F.grid
    if len(l) != g.dim:
        raise ValueError(f"multi-index must have {g.dim} entries")
    norm = sum(l)
    if norm > F.order:
        raise ValueError(f"|l| = {norm} exceeds jet order {F.order}")
    comps = {}
    for alpha in _multi_indices(g.dim, F.order - norm):
        src = tuple(a + b for a, b in zip(alpha, l))
        comps[alpha] = F.components[src]
    return Jet(g, F.order - norm, comps)


def _fd_weights(offsets: np.ndarray, order: int) -> np.ndarray:
    """Stencil weights for the ``order``-th derivative exact on polynomials.

    Solves the Vandermonde moment system; with len(offsets) = k+1 nodes the
    truncation term involves the (k+1)-th derivative, which vanishes for
    polynomials of degree <= k.
    """
    n = offsets.size
    V = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


def jet_commutation_check(F: Jet, l, x: int, y, step: float = 0.5) -> float:
    """|D_y^l T^k F(y, x) - T^(k-|l|) (D_l F)(y, x)| via exact stencils.

    Returns the absolute discrepancy; the stencil differentiates the Taylor
    polynomial exactly, so the result is rounding-level for any valid jet.
    """
    l = tuple(l) if not isinstance(l, int) else (l,)
    g = F.grid
    k = F.order
    y = np.atleast_1d(np.asarray(y, dtype=float))
    offs = step * (np.arange(k + 1) - k / 2.0)
    lhs = 0.0
    if g.dim == 1:
        w = _fd_weights(offs, l[0])
        lhs = sum(
            w[i] * taylor_field(F, y + offs[i], x) for i in range(k + 1)
        )
    else:
        w0 = _fd_weights(offs, l[0])
        w1 = _fd_weights(offs, l[1])
        for i in range(k + 1):
            for j in range(k + 1):
                yy = y + np.array([offs[i], offs[j]])
                lhs += w0[i] * w1[j] * taylor_field(F, yy, x)
    rhs = taylor_field(jet_derivative(F, l), y, x)
    return abs(float(lhs) - rhs)


def component_identity_check(F: Jet, l, y: int, x: int) -> float:
    """Residual of R^(k-|l|)(D_l F)(y,x) + T^(k-|l|)(D_l F)(y,x) = f_l(y)."""
    l = tuple(l) if not isinstance(l, int) else (l,)
    DF = jet_derivative(F, l)
    t = taylor_field(DF, F.grid.coord(y), x)
    zero = tuple(0 for _ in range(F.grid.dim))
    fl_y = float(DF.components[zero][y])
    r = fl_y - t
    return abs((r + t) - fl_y)


def _r1(tf: TestFunction, y, x, dim: int) -> float:
    """First-order remainder f(y) - f(x) - <f'(x), y-x> from analytic data."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    x = np.atleast_2d(np.asarray(x, dtype=float))
    fy = tf.value_nd(y, dim)[0]
    fx = tf.value_nd(x, dim)[0]
    gx = tf.gradient_at(x, dim)[0]
    return float(fy - fx - np.dot(gx, (y - x)[0]))


@dataclass
class TaylorAlgebraReport:
    """Residuals of the five remainder identities at one point triple."""

    antisymmetry: float
    cocycle: float
    first_order_symm: float
    first_order_transfer: float
    derivative_in_y: float

    @property
    def max_residual(self) -> float:
        return max(
            self.antisymmetry,
            self.cocycle,
            self.first_order_symm,
            self.first_order_transfer,
            self.derivative_in_y,
        )


def taylor_algebra_check(tf: TestFunction, x, y, z, dim: int = 1) -> TaylorAlgebraReport:
    """Check the remainder identities of orders 0 and 1 at a point triple.

    The transfer identity is  R1(y,x) - R1(y,z) = R1(z,x) + <f'(z)-f'(x), y-z>,
    determined by brute force on quadratics; its y-derivative is f'(z)-f'(x),
    checked by differencing (the expression is affine in y).
    """
    if not tf.differentiable:
        raise ValueError(f"{tf.kind} provides no analytic derivatives")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    ya = np.atleast_1d(np.asarray(y, dtype=float))
    za = np.atleast_1d(np.asarray(z, dtype=float))

    def f(p):
        return float(tf.value_nd(p[None, :], dim)[0])

    def fp(p):
        return tf.gradient_at(p[None, :], dim)[0]

    r0 = lambda b, a: f(b) - f(a)
    anti = abs(r0(ya, xa) + r0(xa, ya))
    cocycle = abs((r0(ya, xa) - r0(ya, za)) - (-r0(xa, za)))

    def r1(b, a):
        return f(b) - f(a) - float(np.dot(fp(a), b - a))

    symm = abs(r1(ya, xa) + r1(xa, ya) - float(np.dot(fp(ya) - fp(xa), ya - xa)))
    p1 = r1(ya, xa) - r1(ya, za)
    transfer = abs(p1 - (r1(za, xa) + float(np.dot(fp(za) - fp(xa), ya - za))))

    # P1 is affine in y, so one difference per axis recovers its y-gradient
    dy = 0.5
    grad_resid = 0.0
    for a in range(dim):
        e = np.zeros(dim)
        e[a] = dy
        p1_shift = (r1(ya + e, xa) - r1(ya + e, za))
        diff = (p1_shift - p1) / dy
        grad_resid = max(grad_resid, abs(diff - float((fp(za) - fp(xa))[a])))
    return TaylorAlgebraReport(anti, cocycle, symm, transfer, grad_resid)


def mq_m_field(F: Jet, f: GridFunction, m: int, cap: float | None = None) -> MQField:
    """Order-m maximal mean quotient: sup of ball averages of |R^(m-1)F(z,x)| / |z-x|^m.

    Requires the jet order to be m-1; for m = 1 this reproduces the
    first-order field bit for bit (same kernel, same coefficient list).
    """
    g = F.grid
    if m < 1:
        raise ValueError(f"order must satisfy m >= 1, got {m}")
    if F.order != m - 1:
        raise ValueError(f"jet order {F.order} does not match m-1 = {m - 1}")
    if f.grid != g:
        raise ValueError("jet and function live on different grids")
    jmax = ladder_max_rung(g, cap)
    if g.dim == 1:
        comps = [F.components[(l,)] for l in range(m)]
        best, seen = _ladder_sup_1d(f.values, comps, m, g.h, jmax)
    else:
        best, seen = _ladder_sup_2d(g, f.values, F.components, m, jmax)
    label = f"mq{m}" if cap is None else f"mq{m}[cap={cap:g}]"
    return MQField(ScalarField(g, best, label), cap, ~seen)


@dataclass
class SecondOrderReport:
    """Outcome of the three-term second-order inequality sweep (tolerance 0)."""

    triples_checked: int
    pairs_skipped_empty_lens: int
    violations: int
    worst_margin: float
    averaged_pairs_checked: int
    averaged_violations: int
    passed: bool


def second_order_check(
    tf: TestFunction,
    grid: Grid,
    triple_budget: int = 100_000,
    seed: int = 0,
    averaged_pairs: int = 64,
) -> SecondOrderReport:
    """Sample pairs, run every lens point z through the exact inequality

        |R1(y,x)| / |y-x|^2  <=  |R1(y,z)| / |z-y|^2 + |R1(z,x)| / |z-x|^2
                                  + |f'(z)-f'(x)| / |z-x|

    (first term: remainder of y around base z -- the form the transfer
    identity actually yields; see the test suite's brute-force pin).  The
    lens average of the sibling four-term arrangement is checked against
    point-count ratios times the order-2 mean quotients at both endpoints
    plus the lens averages of the two gradient-quotient terms; both checks
    carry zero tolerance.
    """
    if not tf.differentiable:
        raise ValueError(f"{tf.kind} provides no analytic derivatives")
    g = grid
    pts = g.points()
    fv = tf.value_nd(pts, g.dim)
    gv = tf.gradient_at(pts, g.dim)
    rng = np.random.default_rng(seed)
    N = g.n_points

    def r1_vec(to_idx, from_idx):
        d = pts[to_idx] - pts[from_idx]
        return fv[to_idx] - fv[from_idx] - np.sum(gv[from_idx] * d, axis=-1)

    triples = 0
    skipped = 0
    violations = 0
    worst = 0.0
    avg_checked = 0
    avg_violations = 0
    jet = None
    fgrid = GridFunction(g, fv)
    attempts = 0
    while triples < triple_budget and attempts < 100 * triple_budget:
        attempts += 1
        x = int(rng.integers(0, N))
        y = int(rng.integers(0, N))
        if x == y:
            continue
        lens = lens_indices(g, x, y)
        if lens.size == 0:
            skipped += 1
            continue
        r = float(np.linalg.norm(pts[y] - pts[x]))
        dzx = np.linalg.norm(pts[lens] - pts[x], axis=1)
        dzy = np.linalg.norm(pts[lens] - pts[y], axis=1)
        lhs = abs(float(r1_vec(np.array([y]), np.array([x]))[0])) / r**2
        t1 = np.abs(r1_vec(np.full(lens.size, y), lens)) / dzy**2
        t2 = np.abs(r1_vec(lens, np.full(lens.size, x))) / dzx**2
        t3 = np.linalg.norm(gv[lens] - gv[x], axis=1) / dzx
        rhs = t1 + t2 + t3
        bad = lhs > rhs
        violations += int(np.count_nonzero(bad))
        with np.errstate(divide="ignore", invalid="ignore"):
            marg = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
        worst = max(worst, float(np.max(marg)))
        triples += lens.size

        if avg_checked < averaged_pairs:
            if jet is None:
                jet = jet_from_function(tf, g, 1)
            mr_x = _order2_mean_quotient(jet, fgrid, x, r)
            mr_y = _order2_mean_quotient(jet, fgrid, y, r)
            nbx = ball_indices(g, x, r).size
            nby = ball_indices(g, y, r).size
            t3y = np.linalg.norm(gv[lens] - gv[y], axis=1) / dzy
            bound = (
                (nby / lens.size) * mr_y
                + (nbx / lens.size) * mr_x
                + float(np.mean(t3))
                + float(np.mean(t3y))
            )
            avg_checked += 1
            if lhs > bound:
                avg_violations += 1
    return SecondOrderReport(
        triples_checked=triples,
        pairs_skipped_empty_lens=skipped,
        violations=violations,
        worst_margin=worst,
        averaged_pairs_checked=avg_checked,
        averaged_violations=avg_violations,
        passed=violations == 0 and avg_violations == 0,
    )


def _order2_mean_quotient(F: Jet, f: GridFunction, x: int, r: float) -> float:
    """Ball average of |R^1 F(z, x)| / |z-x|^2 at one point and radius."""
    g = F.grid
    ball = ball_indices(g, x, r)
    if ball.size == 0:
        raise ValueError("empty ball")
    pts = g.points()
    d = np.linalg.norm(pts[ball] - pts[x], axis=1)
    rem = np.array([tw_remainder(F, f, int(z), x) for z in ball])
    return float(np.mean(np.abs(rem) / d**2))


def jet_to_csv(F: Jet) -> str:
    """CSV with one block per component; the block header names the multi-index."""
    g = F.grid
    pts = g.points()
    cols = ",".join(f"coord{a}" for a in range(g.dim))
    lines = []
    for alpha in sorted(F.components.keys()):
        lines.append(f"# component {','.join(str(a) for a in alpha)}")
        lines.append(f"index,{cols},value")
        comp = F.components[alpha]
        for i in range(g.n_points):
            coords = ",".join(f"{c:.17g}" for c in pts[i])
            lines.append(f"{i},{coords},{comp[i]:.17g}")
    return "\n".join(lines) + "\n"
