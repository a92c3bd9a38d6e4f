"""Newton-Lagrange interpolation on 1D node sets: divided differences,
remainders, finite differences, coalescence limits, and the scheme-dependence
experiment.

Divided differences use the standard triangular recurrence; schemes reject
node gaps below 1000 ulp of the node magnitude, where the recurrence loses
all significance.  The remainder of an n-node scheme evaluated off the nodes
is re-derived through an extended table (one more node at the evaluation
point) and both routes must agree to 1e-10 relative -- a built-in self-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, TestFunction
from .maximal import ScalarField
from .meanquotient import InequalityReport

__all__ = [
    "InterpolationScheme",
    "DividedDifferenceTable",
    "divided_differences",
    "newton_eval",
    "remainder",
    "finite_difference",
    "equidistant_identity_check",
    "dd_limit_check",
    "verify_divided_inequality",
    "scheme_witness_experiment",
    "EquidistantReport",
    "DDLimitReport",
    "WitnessReport",
]

_MIN_GAP_ULPS = 1000.0


@dataclass(frozen=True)
class InterpolationScheme:
    """Strictly increasing simple nodes x_0 < x_1 < ... < x_n."""

    nodes: tuple[float, ...]

    def __post_init__(self):
        nodes = tuple(float(x) for x in self.nodes)
        if len(nodes) < 1:
            raise ValueError("a scheme needs at least one node")
        scale = max(1.0, max(abs(x) for x in nodes))
        floor = _MIN_GAP_ULPS * np.finfo(float).eps * scale
        for a, b in zip(nodes, nodes[1:]):
            if not b > a:
                raise ValueError(f"nodes must be strictly increasing, got {a} >= {b}")
            if b - a < floor:
                raise ValueError(
                    f"node gap {b - a:.3e} below the significance floor {floor:.3e}"
                )
        object.__setattr__(self, "nodes", nodes)

    @property
    def n(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class DividedDifferenceTable:
    """Triangular table; entry (i, k) holds the k-th order difference at x_i..x_{i+k}."""

    scheme: InterpolationScheme
    table: np.ndarray

    def entry(self, i: int, k: int) -> float:
        return float(self.table[i, k])

    @property
    def coefficients(self) -> np.ndarray:
        """Newton coefficients c_i: the top row of the table."""
        return self.table[0]


def _dd_coefficients(nodes, values) -> np.ndarray:
    """Top-row divided differences for arbitrary distinct nodes (any order)."""
    nodes = np.asarray(nodes, dtype=float)
    c = np.array(values, dtype=float)
    n = nodes.size
    for k in range(1, n):
        c[k:] = (c[k:] - c[k - 1 : -1]) / (nodes[k:] - nodes[: n - k])
    return c


def divided_differences(scheme: InterpolationScheme, values) -> DividedDifferenceTable:
    """Full triangular recurrence table for the scheme."""
    nodes = np.asarray(scheme.nodes)
    vals = np.asarray(values, dtype=float)
    if vals.shape != nodes.shape:
        raise ValueError(
            f"need one value per node: {nodes.size} nodes, {vals.size} values"
        )
    n = nodes.size
    tab = np.full((n, n), np.nan)
    tab[:, 0] = vals
    for k in range(1, n):
        tab[: n - k, k] = (tab[1 : n - k + 1, k - 1] - tab[: n - k, k - 1]) / (
            nodes[k:] - nodes[: n - k]
        )
    return DividedDifferenceTable(scheme, tab)


def newton_eval(table: DividedDifferenceTable, t: float) -> float:
    """Horner evaluation of sum_i c_i prod_{k<i} (t - x_k)."""
    nodes = table.scheme.nodes
    c = table.coefficients
    n = len(nodes) - 1
    p = c[n]
    for i in range(n - 1, -1, -1):
        p = c[i] + (t - nodes[i]) * p
    return float(p)


def remainder(f, scheme: InterpolationScheme, t: float) -> float:
    """f(t) minus the Newton interpolant, with a divided-difference cross-check.

    Off the nodes, the remainder also equals the extended divided difference
    times prod (t - x_k); both routes are computed and must agree to 1e-10
    relative, otherwise an ArithmeticError is raised.
    """
    vals = [float(f(x)) for x in scheme.nodes]
    table = divided_differences(scheme, vals)
    direct = float(f(t)) - newton_eval(table, t)
    scale = max(1.0, max(abs(x) for x in scheme.nodes), abs(t))
    gap = min(abs(t - x) for x in scheme.nodes)
    if gap >= _MIN_GAP_ULPS * np.finfo(float).eps * scale:
        ext_nodes = list(scheme.nodes) + [t]
        ext_vals = vals + [float(f(t))]
        top = _dd_coefficients(ext_nodes, ext_vals)[-1]
        q = math.prod(t - x for x in scheme.nodes)
        dd_form = float(top * q)
        tol = 1e-10 * max(1.0, abs(direct), abs(dd_form))
        if abs(direct - dd_form) > tol:
            raise ArithmeticError(
                f"remainder self-check failed: direct {direct!r} vs divided-difference "
                f"form {dd_form!r}"
            )
    return direct


def finite_difference(f, x: float, h: float, m: int, domain=None) -> float:
    """Alternating binomial sum  sum_i (-1)^(m-i) C(m,i) f(x + i*h)."""
    if not (h > 0):
        raise ValueError(f"step must be positive, got {h}")
    if m < 1:
        raise ValueError(f"order must satisfy m >= 1, got {m}")
    if domain is not None:
        lo, hi = domain
        if x < lo or x + m * h > hi:
            raise ValueError(f"stencil [{x}, {x + m * h}] leaves the domain {domain}")
    total = 0.0
    for i in range(m + 1):
        total += (-1) ** (m - i) * math.comb(m, i) * float(f(x + i * h))
    return total


@dataclass
class EquidistantReport:
    """Remainder at x+m*h for the m-node equidistant scheme vs the m-th difference."""

    remainder_value: float
    difference_value: float
    rel_error: float
    passed: bool


def equidistant_identity_check(f, x: float, h: float, m: int) -> EquidistantReport:
    """Identity between the equidistant remainder and the finite difference.

    The normalization factor was pinned to exactly 1 by brute force on
    monomials (see the test suite): interpolate at x, x+h, ..., x+(m-1)h and
    evaluate the remainder at t = x + m*h.
    """
    scheme = InterpolationScheme(tuple(x + i * h for i in range(m)))
    r = remainder(f, scheme, x + m * h)
    delta = finite_difference(f, x, h, m)
    rel = abs(r - delta) / max(1.0, abs(r), abs(delta))
    return EquidistantReport(r, delta, rel, rel <= 1e-10)


@dataclass
class DDLimitReport:
    """Divided differences at shrinking spreads against the derivative target."""

    spreads: list[float]
    errors: list[float]
    target: float
    monotone: bool
    final_error: float


def dd_limit_check(
    tf: TestFunction, x: float, m: int, j_start: int = 2, j_end: int = 12
) -> DDLimitReport:
    """Watch f[x, ..., x + spread] approach f^(m)(x) / m! as the spread shrinks."""
    target = float(tf.derivative(x, m)) / math.factorial(m)
    spreads = []
    errors = []
    for j in range(j_start, j_end + 1):
        eps = 2.0**-j
        nodes = [x + i * eps / m for i in range(m + 1)]
        vals = [float(tf(v)) for v in nodes]
        dd = float(_dd_coefficients(nodes, vals)[-1])
        spreads.append(eps)
        errors.append(abs(dd - target))
    monotone = all(b < a or (a == 0 and b == 0) for a, b in zip(errors, errors[1:]))
    return DDLimitReport(spreads, errors, target, monotone, errors[-1])


def verify_divided_inequality(
    f: GridFunction,
    m: int,
    g: ScalarField,
    pair_budget: int = 200_000,
    kappa: float = 4.0,
    seed: int = 0,
) -> tuple[InequalityReport, InequalityReport]:
    """Bound m-th differences and free-node divided differences by g(x)+g(y).

    First report: |Delta^m f(y,x)| <= |y-x|^m (g(x)+g(y)) over equidistant
    grid stencils.  Second: |f[x, nodes..., y]| <= g(x)+g(y) with random
    interior grid nodes, probing that the bound ignores the intermediate
    nodes.  Both carry the per-pair allowance 1 + kappa*h/|y-x|.
    """
    gr = f.grid
    if gr.dim != 1:
        raise ValueError("divided-difference verification is 1D")
    if m < 1:
        raise ValueError(f"order must satisfy m >= 1, got {m}")
    n = gr.counts[0]
    if n < m + 1:
        raise ValueError(f"order {m} needs at least {m + 1} grid points, got {n}")
    h = gr.h
    xs = gr.axis_coords(0)
    fv = f.values
    gv = g.values
    rng = np.random.default_rng(seed)

    binom = np.array([(-1) ** (m - i) * math.comb(m, i) for i in range(m + 1)])
    worst_eq = (-1.0, 0.0, 0.0, ((xs[0],), (xs[0],)))
    checked_eq = 0
    for k in range(1, (n - 1) // m + 1):
        i = np.arange(0, n - m * k)
        delta = np.zeros(i.size)
        for ii in range(m + 1):
            delta += binom[ii] * fv[i + ii * k]
        dist = m * k * h
        den = dist**m * (gv[i] + gv[i + m * k])
        num = np.abs(delta)
        ok = den > 0
        ratio = np.where(ok, num / np.where(ok, den, 1.0), np.where(num > 0, np.inf, 0.0))
        tol = kappa * h / dist
        checked_eq += i.size
        kk = int(np.argmax(ratio))
        margin = ratio[kk] / (1.0 + tol)
        if margin > worst_eq[0]:
            worst_eq = (margin, float(ratio[kk]), tol, ((xs[kk],), (xs[kk + m * k],)))
    rep_eq = InequalityReport(
        name="finite_difference_bound",
        pairs_checked=checked_eq,
        worst_ratio=worst_eq[1],
        worst_pair=worst_eq[3],
        constant_used=1.0,
        tolerance=worst_eq[2],
        passed=worst_eq[0] <= 1.0,
    )

    worst_free = (-1.0, 0.0, 0.0, ((xs[0],), (xs[0],)))
    checked_free = 0
    budget = min(pair_budget, 20_000)
    attempts = 0
    while checked_free < budget and attempts < 20 * budget:
        attempts += 1
        i = int(rng.integers(0, n - m))
        j = int(rng.integers(i + m, n))
        if j - i < m:
            continue
        inner = rng.choice(np.arange(i + 1, j), size=m - 1, replace=False)
        idx = np.concatenate([[i], np.sort(inner), [j]])
        dd = float(_dd_coefficients(xs[idx], fv[idx])[-1])
        den = gv[i] + gv[j]
        num = abs(dd)
        dist = xs[j] - xs[i]
        tol = kappa * h / dist
        checked_free += 1
        if den == 0:
            if num > 0:
                worst_free = (math.inf, math.inf, tol, ((xs[i],), (xs[j],)))
            continue
        ratio = num / den
        margin = ratio / (1.0 + tol)
        if margin > worst_free[0]:
            worst_free = (margin, ratio, tol, ((xs[i],), (xs[j],)))
    rep_free = InequalityReport(
        name="divided_difference_bound",
        pairs_checked=checked_free,
        worst_ratio=worst_free[1],
        worst_pair=worst_free[3],
        constant_used=1.0,
        tolerance=worst_free[2],
        passed=worst_free[0] <= 1.0,
    )
    return rep_eq, rep_free


@dataclass
class WitnessReport:
    """EXPLORATORY: empirical scheme-vs-Taylor witness ratio."""

    m: int
    samples: int
    empirical_constant: float
    worst_point: float
    worst_scheme_nodes: tuple[float, ...]
    flagged_points: list[float]

    def to_dict(self) -> dict:
        return {
            "label": "EXPLORATORY",
            "m": self.m,
            "samples": self.samples,
            "empirical_C": self.empirical_constant,
            "worst_point": self.worst_point,
            "worst_scheme_nodes": list(self.worst_scheme_nodes),
            "flagged_points": list(self.flagged_points),
        }


def scheme_witness_experiment(
    tf: TestFunction,
    m: int,
    scheme_samples: int,
    n_eval: int = 33,
    interval: tuple[float, float] = (0.0, 1.0),
    seed: int = 0,
) -> WitnessReport:
    """Estimate the constant relating scheme witnesses to the Taylor witness.

    For random interior-node schemes between evaluation points x < y, the
    divided-difference bound is split evenly between the endpoints; the
    resulting envelope is divided by the analogous envelope built from
    normalized Taylor remainders.  The output is an empirical estimate only
    (EXPLORATORY) -- no reference value exists.
    """
    if not tf.differentiable:
        raise ValueError(f"{tf.kind} provides no analytic derivatives")
    if m < 2:
        raise ValueError(f"experiment needs m >= 2, got {m}")
    lo, hi = interval
    xs = np.linspace(lo, hi, n_eval)
    rng = np.random.default_rng(seed)
    g_scheme = np.zeros(n_eval)
    worst_nodes: tuple[float, ...] = ()
    worst_val = -1.0
    for s in range(scheme_samples):
        i, j = sorted(rng.choice(n_eval, size=2, replace=False))
        x, y = xs[i], xs[j]
        inner = np.sort(rng.uniform(x, y, size=m - 1))
        try:
            nodes = (x, *inner, y)
            InterpolationScheme(nodes)
        except ValueError:
            continue
        vals = [float(tf(v)) for v in nodes]
        bound = abs(float(_dd_coefficients(nodes, vals)[-1])) / 2.0
        if bound > g_scheme[i] or bound > g_scheme[j]:
            if bound > worst_val:
                worst_val = bound
                worst_nodes = nodes
        g_scheme[i] = max(g_scheme[i], bound)
        g_scheme[j] = max(g_scheme[j], bound)

    # Taylor witness: normalized remainders of the (m-1)-th order expansion
    g_taylor = np.zeros(n_eval)
    for i in range(n_eval):
        d = xs - xs[i]
        t = np.zeros(n_eval)
        for l in range(m):
            t += float(tf.derivative(xs[i], l)) / math.factorial(l) * d**l
        rem = np.abs(tf(xs) - t)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(d != 0, rem / np.abs(d) ** m, 0.0)
        g_taylor[i] = 0.5 * float(np.max(q))

    flagged = []
    ratios = np.zeros(n_eval)
    # witnesses at rounding scale count as zero (degree < m leaves exact-zero
    # divided differences only in real arithmetic)
    zero_floor = 1e-10 * max(1.0, float(np.max(np.abs(tf(xs)))))
    for i in range(n_eval):
        if g_taylor[i] <= zero_floor and g_scheme[i] <= zero_floor:
            ratios[i] = 1.0
            flagged.append(float(xs[i]))
        elif g_taylor[i] <= zero_floor:
            ratios[i] = math.inf
        else:
            ratios[i] = g_scheme[i] / g_taylor[i]
    k = int(np.argmax(ratios))
    return WitnessReport(
        m=m,
        samples=scheme_samples,
        empirical_constant=float(ratios[k]),
        worst_point=float(xs[k]),
        worst_scheme_nodes=worst_nodes,
        flagged_points=flagged,
    )
