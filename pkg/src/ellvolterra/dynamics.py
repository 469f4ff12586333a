"""Orbit iteration, fixed-point location and classification, cycle and
omega-limit detection for quadratic stochastic operators.

Fixed points are classified through the Jacobian of the reduced map obtained
by eliminating the last coordinate (x_m = 1 - sum of the others), the chart
in which the simplex constraint is structural rather than penalized.  A
fixed point is attracting / repelling / saddle when the eigenvalue moduli
are all below / all above / split around 1; eigenvalues within a small
margin of the unit circle are never forced into a hyperbolic class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import CubicMatrix, apply, evaluate_raw, simplex_point, vertex

CHART_FULL = "full"
CHART_REDUCED = "reduced"  # last coordinate eliminated

ATTRACTING = "attracting"
REPELLING = "repelling"
SADDLE = "saddle"
NON_HYPERBOLIC = "non-hyperbolic"

HYPERBOLIC_MARGIN = 1e-9
RESIDUAL_TOL = 1e-10
NEWTON_TOL = 1e-13
DEDUP_RADIUS = 1e-8
CYCLE_TOL = 1e-9
CLUSTER_RADIUS = 1e-7

# Fixed-line post-pass: at least this many collinear roots, with at most a
# handful of points off the line, signal a continuum of fixed points.
LINE_MIN_MEMBERS = 10
LINE_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class Orbit:
    """Iterates x(0), x(1), ..., x(n) as rows of a (n+1, m) array."""

    points: np.ndarray

    @property
    def initial(self) -> np.ndarray:
        return self.points[0]

    @property
    def length(self) -> int:
        return self.points.shape[0] - 1


def orbit(V: CubicMatrix, x0: np.ndarray | list, n: int) -> Orbit:
    """Iterate the operator n times from x0."""
    if n < 0:
        raise ValueError("orbit length must be nonnegative")
    x = simplex_point(x0, dim=V.m)
    points = np.empty((n + 1, V.m))
    points[0] = x
    for t in range(n):
        x = apply(V, x)
        points[t + 1] = x
    return Orbit(points=points)


def orbit_to_csv(o: Orbit) -> str:
    """CSV with header step,x1,...,xm; floats in shortest round-trip form."""
    m = o.points.shape[1]
    lines = ["step," + ",".join(f"x{i}" for i in range(1, m + 1))]
    for t, row in enumerate(o.points):
        lines.append(f"{t}," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def jacobian(V: CubicMatrix, x: np.ndarray | list, chart: str = CHART_FULL) -> np.ndarray:
    """Analytic Jacobian of the quadratic map at x.

    "full": the m x m matrix d x'_k / d x_i = 2 sum_j P[i,j,k] x_j.
    "reduced": the (m-1) x (m-1) Jacobian of the map on the first m-1
    coordinates after substituting x_m = 1 - sum of the others.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (V.m,):
        raise ValueError(f"expected a point with {V.m} coordinates")
    full = 2.0 * np.tensordot(V.entries, x, axes=(1, 0)).T
    if chart == CHART_FULL:
        return full
    if chart == CHART_REDUCED:
        r = V.m - 1
        return full[:r, :r] - full[:r, r:]
    raise ValueError(f"unknown chart {chart!r}")


def classify_eigenvalues(eigenvalues: np.ndarray, margin: float = HYPERBOLIC_MARGIN) -> str:
    mags = np.abs(eigenvalues)
    if np.any(np.abs(mags - 1.0) <= margin):
        return NON_HYPERBOLIC
    if np.all(mags < 1.0):
        return ATTRACTING
    if np.all(mags > 1.0):
        return REPELLING
    return SADDLE


@dataclass(frozen=True, eq=False)
class FixedPointReport:
    """A located fixed point with its reduced-chart eigenvalue data."""

    location: np.ndarray
    residual: float
    eigenvalues: np.ndarray
    type: str
    source: str  # vertex-test | newton | closed-form


@dataclass(frozen=True, eq=False)
class FixedLine:
    """A one-dimensional continuum of fixed points, fitted from many roots."""

    point: np.ndarray
    direction: np.ndarray
    member_count: int
    max_deviation: float


@dataclass(frozen=True, eq=False)
class FixedPointScan:
    reports: list[FixedPointReport]
    discarded_starts: int
    fixed_line: FixedLine | None = None


def _lift(y: np.ndarray) -> np.ndarray:
    return np.append(y, 1.0 - y.sum())


def report_fixed_point(V: CubicMatrix, x: np.ndarray, source: str = "closed-form") -> FixedPointReport:
    """Residual, reduced-chart eigenvalues and hyperbolic type at a point."""
    x = np.asarray(x, dtype=float)
    residual = float(np.max(np.abs(evaluate_raw(V, x) - x)))
    eigenvalues = np.linalg.eigvals(jacobian(V, x, CHART_REDUCED))
    return FixedPointReport(
        location=x,
        residual=residual,
        eigenvalues=eigenvalues,
        type=classify_eigenvalues(eigenvalues),
        source=source,
    )


def _newton_root(V: CubicMatrix, y0: np.ndarray, max_steps: int = 100) -> np.ndarray | None:
    """Damped Newton on G(y) - y in the reduced chart; None if it stalls."""
    r = V.m - 1
    eye = np.eye(r)
    y = y0.copy()
    res = evaluate_raw(V, _lift(y))[:r] - y
    rn = np.max(np.abs(res))
    for _ in range(max_steps):
        if rn <= NEWTON_TOL:
            break
        J = jacobian(V, _lift(y), CHART_REDUCED) - eye
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -res, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            return None
        t = 1.0
        improved = False
        for _ in range(40):
            cand = y + t * step
            cres = evaluate_raw(V, _lift(cand))[:r] - cand
            crn = np.max(np.abs(cres))
            if crn < rn:
                y, res, rn = cand, cres, crn
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    return y if rn <= RESIDUAL_TOL else None


def _barycentric_grid(m: int, density: int) -> np.ndarray:
    """All points with coordinates k/density summing to 1, lexicographic."""
    pts = []
    for cuts in itertools.combinations(range(density + m - 1), m - 1):
        counts = np.diff((-1,) + cuts + (density + m - 1,)) - 1
        pts.append(counts / density)
    return np.array(pts)


def _fit_fixed_line(
    locations: np.ndarray,
) -> tuple[FixedLine, np.ndarray] | None:
    """Best collinear subset; returns (line, membership mask) when it
    dominates the root set, None otherwise."""
    n = len(locations)
    if n < LINE_MIN_MEMBERS:
        return None
    best_count = 0
    best_members: np.ndarray | None = None
    for a in range(n):
        rel = locations - locations[a]
        for b in range(a + 1, n):
            d = rel[b]
            length = np.linalg.norm(d)
            if length < 1e-6:
                continue
            u = d / length
            perp = rel - np.outer(rel @ u, u)
            members = np.linalg.norm(perp, axis=1) <= LINE_TOL
            count = int(members.sum())
            if count > best_count:
                best_count = count
                best_members = members
    if best_members is None or best_count < LINE_MIN_MEMBERS:
        return None
    outliers = n - best_count
    if outliers > max(5, n // 10):
        return None
    pts = locations[best_members]
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    direction = vt[0]
    deviation = float(
        np.max(np.linalg.norm(centered - np.outer(centered @ direction, direction), axis=1))
    )
    line = FixedLine(
        point=centroid,
        direction=direction,
        member_count=best_count,
        max_deviation=deviation,
    )
    return line, best_members


def find_fixed_points(V: CubicMatrix, grid_density: int = 20) -> FixedPointScan:
    """Locate fixed points: vertex tests plus Newton from a barycentric grid.

    The vertex e_i is fixed exactly when P[i,i,i] = 1.  Newton runs in the
    reduced chart from every grid start; converged roots are kept when they
    land in the closed simplex (coordinates >= -1e-10), deduplicated at
    distance 1e-8 and classified by reduced-chart eigenvalues.  When ten or
    more roots line up within 1e-7 they are reported as a fixed line instead
    of isolated points.
    """
    m = V.m
    reports: list[FixedPointReport] = []
    locations: list[np.ndarray] = []
    for i in range(1, m + 1):
        if V.coefficient(i, i, i) == 1.0:
            e = vertex(m, i)
            reports.append(report_fixed_point(V, e, "vertex-test"))
            locations.append(e)
    discarded = 0
    newton_reports: list[FixedPointReport] = []
    for start in _barycentric_grid(m, grid_density):
        y = _newton_root(V, start[: m - 1])
        if y is None:
            discarded += 1
            continue
        x = _lift(y)
        if np.any(x < -1e-10):
            continue
        x = simplex_point(np.maximum(x, 0.0))
        if locations and min(np.max(np.abs(x - q)) for q in locations) <= DEDUP_RADIUS:
            continue
        report = report_fixed_point(V, x, "newton")
        if report.residual > RESIDUAL_TOL:
            discarded += 1
            continue
        newton_reports.append(report)
        locations.append(x)
    fixed_line = None
    if len(newton_reports) >= LINE_MIN_MEMBERS:
        fitted = _fit_fixed_line(np.array([r.location for r in newton_reports]))
        if fitted is not None:
            fixed_line, members = fitted
            newton_reports = [r for r, keep in zip(newton_reports, members) if not keep]
    return FixedPointScan(
        reports=reports + newton_reports,
        discarded_starts=discarded,
        fixed_line=fixed_line,
    )


@dataclass(frozen=True, eq=False)
class CycleReport:
    """A periodic orbit of minimal period s >= 2."""

    period: int
    points: np.ndarray
    closure_residual: float


def detect_cycle(
    V: CubicMatrix,
    x0: np.ndarray | list,
    burn_in: int = 1000,
    max_period: int = 20,
) -> CycleReport | None:
    """Minimal period s <= max_period closing within 1e-9 after burn-in.

    Returns None when the orbit settles on a fixed point (period 1) or no
    period up to max_period closes.
    """
    if burn_in < 0 or max_period < 2:
        raise ValueError("need burn_in >= 0 and max_period >= 2")
    x = simplex_point(x0, dim=V.m)
    for _ in range(burn_in):
        x = apply(V, x)
    tail = orbit(V, x, max_period).points
    for s in range(1, max_period + 1):
        if np.max(np.abs(tail[s] - tail[0])) <= CYCLE_TOL:
            if s == 1:
                return None
            closure = float(np.max(np.abs(apply(V, tail[s - 1]) - tail[0])))
            return CycleReport(period=s, points=tail[:s].copy(), closure_residual=closure)
    return None


@dataclass(frozen=True, eq=False)
class OmegaLimit:
    """Clustered tail of an orbit: a fixed point, a cycle, or unresolved."""

    kind: str  # fixed-point | cycle | unresolved
    representatives: np.ndarray
    period: int | None = None


def omega_limit_estimate(
    V: CubicMatrix,
    x0: np.ndarray | list,
    burn_in: int = 10000,
    window: int = 100,
) -> OmegaLimit:
    """Classify the limit behavior of an orbit.

    After burn_in steps, window consecutive iterates are clustered at radius
    1e-7: one cluster is a fixed point, s clusters visited cyclically a
    period-s cycle, anything else unresolved.  Representatives are cluster
    centroids in first-visit order.
    """
    if window < 2:
        raise ValueError("window must be at least 2")
    x = simplex_point(x0, dim=V.m)
    for _ in range(burn_in):
        x = apply(V, x)
    tail = orbit(V, x, window - 1).points
    centers: list[np.ndarray] = []
    counts: list[int] = []
    labels = []
    for point in tail:
        for c, center in enumerate(centers):
            if np.max(np.abs(point - center / counts[c])) <= CLUSTER_RADIUS:
                labels.append(c)
                centers[c] = center + point
                counts[c] += 1
                break
        else:
            labels.append(len(centers))
            centers.append(point.copy())
            counts.append(1)
    representatives = np.array([c / n for c, n in zip(centers, counts)])
    p = len(centers)
    if p == 1:
        return OmegaLimit(kind="fixed-point", representatives=representatives)
    periodic = all(labels[t] == labels[t + p] for t in range(window - p)) and sorted(
        labels[:p]
    ) == list(range(p))
    if periodic:
        return OmegaLimit(kind="cycle", representatives=representatives, period=p)
    return OmegaLimit(kind="unresolved", representatives=representatives)
