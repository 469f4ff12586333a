"""Explicit operator families with known closed-form dynamics.

Three constructions:

* cycle families — operators whose heredity matrix pins V(e_v) = e_next
  around chosen disjoint vertex cycles above the Volterra prefix, with a
  deterministic completion of the remaining columns;
* the two-species family x' = a x^2 + 2c x y (prefix length 1), whose
  reduced map f(x) = (a - 2c) x^2 + 2c x has fully known limit behavior;
* the symmetric three-species family with prefix length 2,
  x' = x (a x + 2b y + 2c z),  y' = y (2b x + a y + 2c z),
  whose reduced map on (x, y) is x' = x (2c + (a-2c) x + 2(b-c) y) and
  symmetrically in y.  Depending on c vs 1/2 and a vs 2b the family has a
  single global attractor, four isolated fixed points, or a repelling origin
  plus a whole fixed line x + y = (2c-1)/(2(c-b)) with invariant rays y = nu x.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .classify import detect_ell
from .core import CubicMatrix
from .dynamics import CHART_REDUCED, FixedPointReport, jacobian, report_fixed_point

REGIME_SUBCRITICAL = "c<=1/2"
REGIME_SUPER = "c>1/2"
REGIME_SUPER_A_GT = "c>1/2,a>2b"
REGIME_SUPER_A_LT = "c>1/2,a<2b"
REGIME_SUPER_LINE = "c>1/2,a=2b"


class SpecError(ValueError):
    """Invalid or unrealizable cycle specification."""


class ParamRangeError(ValueError):
    """Family parameter outside its admissible range."""


# ---------------------------------------------------------------------------
# Vertex cycle families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CycleSpec:
    """Disjoint vertex cycles above the prefix, in chosen cyclic order.

    cycles holds 1-based species labels, all in {ell+1, ..., m}; a length-1
    cycle pins the vertex as a fixed point.
    """

    m: int
    ell: int
    cycles: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "cycles", tuple(tuple(c) for c in self.cycles))
        if self.m < 2:
            raise SpecError("need at least two species (m >= 2)")
        if not 0 <= self.ell <= self.m:
            raise SpecError(f"ell={self.ell} outside 0..{self.m}")
        seen: set[int] = set()
        for cycle in self.cycles:
            if not cycle:
                raise SpecError("empty cycle")
            if len(set(cycle)) != len(cycle):
                raise SpecError(f"repeated label in cycle {cycle}")
            for v in cycle:
                if not self.ell < v <= self.m:
                    raise SpecError(
                        f"cycle label {v} must lie above the prefix ({self.ell}) and within 1..{self.m}"
                    )
                if v in seen:
                    raise SpecError(f"label {v} appears in two cycles")
                seen.add(v)


def _completion_column(m: int, ell: int, i: int, j: int) -> np.ndarray:
    """Deterministic weights for an unpinned column (1-based i <= j).

    Low rows (<= ell) only ever receive weight on the parents themselves;
    columns with both parents at or below the prefix route half their weight
    uniformly to the high rows, and columns with both parents above spread
    uniformly there, so every high coordinate keeps a positive outside
    coefficient whenever one is achievable.
    """
    col = np.zeros(m)
    nhigh = m - ell
    if i == j:
        v = i - 1
        if v < ell:
            if nhigh:
                col[v] = 0.5
                col[ell:] = 0.5 / nhigh
            else:
                col[v] = 1.0
        else:
            col[ell:] = 1.0 / nhigh
    elif j <= ell:
        if nhigh:
            col[i - 1] = 0.25
            col[j - 1] = 0.25
            col[ell:] = 0.5 / nhigh
        else:
            col[i - 1] = 0.5
            col[j - 1] = 0.5
    elif i <= ell:
        col[i - 1] = 1.0
    else:
        col[ell:] = 1.0 / nhigh
    return col


def cycle_family(spec: CycleSpec) -> CubicMatrix:
    """Canonical representative realizing the requested vertex cycles.

    For each cycle (v1, ..., vs) the diagonal columns are pinned so that
    V(e_{vt}) = e_{v(t+1)}; every other column gets the deterministic
    completion.  The detected prefix length is verified to equal spec.ell;
    a SpecError explains the rare unrealizable corner (for m = 2, a pinned
    1-cycle leaves the other coordinate without any outside coefficient).
    """
    m, ell = spec.m, spec.ell
    successor: dict[int, int] = {}
    for cycle in spec.cycles:
        for t, v in enumerate(cycle):
            successor[v] = cycle[(t + 1) % len(cycle)]
    entries = np.zeros((m, m, m))
    for i in range(1, m + 1):
        for j in range(i, m + 1):
            if i == j and i in successor:
                col = np.zeros(m)
                col[successor[i] - 1] = 1.0
            else:
                col = _completion_column(m, ell, i, j)
            entries[i - 1, j - 1] = col
            entries[j - 1, i - 1] = col
    V = CubicMatrix(entries)
    detected = detect_ell(V).ell
    if detected != ell:
        raise SpecError(
            f"completion realizes prefix length {detected}, not the requested {ell}; "
            "this cycle specification is not achievable in that class"
        )
    return V


# ---------------------------------------------------------------------------
# Two-species family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class M2Params:
    """Heredity parameters a = P[1,1,1] in [0,1) and c = P[1,2,1] in [0,1];
    b = 1-a and d = 1-c are forced by stochasticity."""

    a: float
    c: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.a < 1.0:
            raise ParamRangeError(f"a={self.a} outside [0, 1) (a=1 is the Volterra case)")
        if not 0.0 <= self.c <= 1.0:
            raise ParamRangeError(f"c={self.c} outside [0, 1]")

    @property
    def b(self) -> float:
        return 1.0 - self.a

    @property
    def d(self) -> float:
        return 1.0 - self.c


def m2_operator(p: M2Params) -> CubicMatrix:
    """x' = a x^2 + 2c x y,  y' = b x^2 + 2d x y + y^2."""
    entries = np.zeros((2, 2, 2))
    entries[0, 0] = (p.a, p.b)
    entries[0, 1] = entries[1, 0] = (p.c, p.d)
    entries[1, 1] = (0.0, 1.0)
    return CubicMatrix(entries)


def m2_reduced_map(p: M2Params) -> Callable[[float], float]:
    """f(x) = (a - 2c) x^2 + 2c x, the first coordinate on y = 1 - x."""
    a, c = p.a, p.c

    def f(x: float) -> float:
        return (a - 2.0 * c) * x * x + 2.0 * c * x

    return f


@dataclass(frozen=True, eq=False)
class M2Report:
    params: M2Params
    regime: str
    fixed_points: dict[str, FixedPointReport]
    global_attractor: np.ndarray


def m2_analyze(p: M2Params) -> M2Report:
    """Closed-form fixed points and limit behavior of the two-species family.

    For c <= 1/2 the extinction point (0, 1) is the unique fixed point and
    attracts every orbit; for c > 1/2 it repels and the interior point
    ((2c-1)/(2c-a), (1-a)/(2c-a)) attracts every other orbit.
    """
    V = m2_operator(p)
    extinction = np.array([0.0, 1.0])
    fixed = {"extinction": report_fixed_point(V, extinction)}
    if p.c <= 0.5:
        return M2Report(
            params=p,
            regime=REGIME_SUBCRITICAL,
            fixed_points=fixed,
            global_attractor=extinction,
        )
    x_star = (2.0 * p.c - 1.0) / (2.0 * p.c - p.a)
    coexistence = np.array([x_star, 1.0 - x_star])
    fixed["coexistence"] = report_fixed_point(V, coexistence)
    return M2Report(
        params=p,
        regime=REGIME_SUPER,
        fixed_points=fixed,
        global_attractor=coexistence,
    )


# ---------------------------------------------------------------------------
# Symmetric three-species family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class M3SymParams:
    """a = P[1,1,1] in [0,1), b = P[1,2,1] in [0,1/2], c = P[1,3,1] in [0,1],
    with the model symmetric under swapping species 1 and 2."""

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.a < 1.0:
            raise ParamRangeError(f"a={self.a} outside [0, 1) (a=1 is the Volterra case)")
        if not 0.0 <= self.b <= 0.5:
            raise ParamRangeError(f"b={self.b} outside [0, 1/2]")
        if not 0.0 <= self.c <= 1.0:
            raise ParamRangeError(f"c={self.c} outside [0, 1]")


def m3_coefficients(p: M3SymParams) -> dict[str, float]:
    """All twelve nonzero-pattern coefficients forced by (a, b, c), symmetry
    and column stochasticity; keys are 1-based positions."""
    a, b, c = p.a, p.b, p.c
    return {
        "P_11,1": a,
        "P_11,3": 1.0 - a,
        "P_12,1": b,
        "P_12,2": b,
        "P_12,3": 1.0 - 2.0 * b,
        "P_13,1": c,
        "P_13,3": 1.0 - c,
        "P_22,2": a,
        "P_22,3": 1.0 - a,
        "P_23,2": c,
        "P_23,3": 1.0 - c,
        "P_33,3": 1.0,
    }


def m3_operator(p: M3SymParams) -> CubicMatrix:
    """x' = x(ax + 2by + 2cz), y' = y(2bx + ay + 2cz), z' = 1 - x' - y'."""
    a, b, c = p.a, p.b, p.c
    entries = np.zeros((3, 3, 3))
    entries[0, 0] = (a, 0.0, 1.0 - a)
    entries[0, 1] = entries[1, 0] = (b, b, 1.0 - 2.0 * b)
    entries[0, 2] = entries[2, 0] = (c, 0.0, 1.0 - c)
    entries[1, 1] = (0.0, a, 1.0 - a)
    entries[1, 2] = entries[2, 1] = (0.0, c, 1.0 - c)
    entries[2, 2] = (0.0, 0.0, 1.0)
    return CubicMatrix(entries)


def m3_reduced_map(p: M3SymParams) -> Callable[[np.ndarray], np.ndarray]:
    """The map on (x, y) after eliminating z = 1 - x - y."""
    a, b, c = p.a, p.b, p.c

    def f(point: np.ndarray) -> np.ndarray:
        x, y = point
        return np.array(
            [
                x * (2.0 * c + (a - 2.0 * c) * x + 2.0 * (b - c) * y),
                y * (2.0 * c + 2.0 * (b - c) * x + (a - 2.0 * c) * y),
            ]
        )

    return f


def _lift3(x: float, y: float) -> np.ndarray:
    return np.array([x, y, 1.0 - x - y])


def ray_limit(p: M3SymParams, nu: float) -> np.ndarray:
    """Limit point on the invariant ray y = nu x in the degenerate regime
    (a = 2b, c > 1/2): the intersection of the ray with the fixed line."""
    if p.a != 2.0 * p.b:
        raise ParamRangeError("invariant rays require a = 2b")
    if p.c <= 0.5 or nu < 0:
        raise ParamRangeError("ray limit needs c > 1/2 and nu >= 0")
    x_bar = (2.0 * p.c - 1.0) / (2.0 * (p.c - p.b) * (1.0 + nu))
    return _lift3(x_bar, nu * x_bar)


def ray_restriction(p: M3SymParams, nu: float) -> Callable[[float], float]:
    """One-dimensional restriction of the degenerate-regime map to y = nu x:
    phi(x) = x (2c + 2(b - c)(1 + nu) x)."""
    if p.a != 2.0 * p.b:
        raise ParamRangeError("invariant rays require a = 2b")
    b, c = p.b, p.c

    def phi(x: float) -> float:
        return x * (2.0 * c + 2.0 * (b - c) * (1.0 + nu) * x)

    return phi


@dataclass(frozen=True, eq=False)
class M3FixedLine:
    """Continuum of fixed points x + y = coordinate_sum (degenerate regime)."""

    coordinate_sum: float
    endpoints: np.ndarray


@dataclass(frozen=True, eq=False)
class M3Report:
    params: M3SymParams
    regime: str
    coefficients: dict[str, float]
    fixed_points: dict[str, FixedPointReport]
    fixed_line: M3FixedLine | None
    invariant_sets: dict[str, str]
    stable_manifolds: dict[str, str]
    unstable_directions: dict[str, np.ndarray]


def m3_analyze(p: M3SymParams, boundary_tol: float = 0.0) -> M3Report:
    """Closed-form fixed-point structure of the symmetric three-species family.

    Regimes (classifications always computed from Jacobian eigenvalues, not
    from pre-derived eigenvalue formulas):

    * c <= 1/2: the origin (x = y = 0) is the unique fixed point and attracts
      the whole simplex (non-hyperbolic at c = 1/2 exactly);
    * c > 1/2, a != 2b: origin repelling plus three more fixed points, on
      each coordinate axis at (2c-1)/(2c-a) and on the diagonal at
      (2c-1)/(4c-a-2b) per coordinate; the axis points attract and the
      diagonal is a saddle when a > 2b, and conversely when a < 2b;
    * c > 1/2, a = 2b: origin repelling plus the fixed line
      x + y = (2c-1)/(2(c-b)); every ray y = nu x is invariant and converges
      to its intersection with the line.

    boundary_tol widens the a = 2b comparison; the default treats parameter
    choices as exact.
    """
    a, b, c = p.a, p.b, p.c
    V = m3_operator(p)
    coefficients = m3_coefficients(p)
    invariant_sets = {
        "M0": "x = 0",
        "M1": "y = 0",
        "M_eq": "x = y",
        "M_lt": "x < y",
        "M_gt": "x > y",
    }
    fixed = {"origin": report_fixed_point(V, _lift3(0.0, 0.0))}
    fixed_line = None
    stable_manifolds: dict[str, str] = {}
    if c <= 0.5:
        regime = REGIME_SUBCRITICAL
    elif abs(a - 2.0 * b) <= boundary_tol:
        regime = REGIME_SUPER_LINE
        invariant_sets["I_nu"] = "y = nu*x, any nu >= 0"
        s = (2.0 * c - 1.0) / (2.0 * (c - b))
        fixed_line = M3FixedLine(
            coordinate_sum=s,
            endpoints=np.array([_lift3(s, 0.0), _lift3(0.0, s)]),
        )
    else:
        regime = REGIME_SUPER_A_GT if a > 2.0 * b else REGIME_SUPER_A_LT
        y1 = (2.0 * c - 1.0) / (2.0 * c - a)
        t = (2.0 * c - 1.0) / (4.0 * c - a - 2.0 * b)
        fixed["x_extinct"] = report_fixed_point(V, _lift3(0.0, y1))
        fixed["y_extinct"] = report_fixed_point(V, _lift3(y1, 0.0))
        fixed["coexistence"] = report_fixed_point(V, _lift3(t, t))
        if a > 2.0 * b:
            stable_manifolds["coexistence"] = "M_eq"
        else:
            stable_manifolds["x_extinct"] = "M0"
            stable_manifolds["y_extinct"] = "M1"
    unstable: dict[str, np.ndarray] = {}
    for label, report in fixed.items():
        if report.type != "saddle":
            continue
        values, vectors = np.linalg.eig(jacobian(V, report.location, CHART_REDUCED))
        idx = int(np.argmax(np.abs(values)))
        unstable[label] = np.real(vectors[:, idx])
    return M3Report(
        params=p,
        regime=regime,
        coefficients=coefficients,
        fixed_points=fixed,
        fixed_line=fixed_line,
        invariant_sets=invariant_sets,
        stable_manifolds=stable_manifolds,
        unstable_directions=unstable,
    )
