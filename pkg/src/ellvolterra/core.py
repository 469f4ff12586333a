"""Cubic heredity matrices and quadratic stochastic operators on the simplex.

A quadratic stochastic operator (QSO) on the (m-1)-simplex is determined by a
cubic matrix of heredity coefficients P[i, j, k] (the probability that parents
of species i and j produce offspring of species k).  The map is

    x'_k = sum_{i,j} P[i, j, k] * x_i * x_j .

This module holds the matrix container with its validity conditions
(nonnegativity, symmetry in the parents, column stochasticity), simplex point
handling, direct evaluation, and the canonical multiplicative rewriting

    x'_k = x_k * (a_kk + sum_{i != k} a_ki x_i)  +  quadratic tail in the
                                                    coordinates other than k,

where a_ki = 2*P[i,k,k] - P[k,k,k] and a_kk = P[k,k,k].  Species indices in
reports, errors and the JSON format are 1-based; numpy arrays are indexed
0-based as usual.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# Simplex tolerance policy: sums within RENORM_TOL of 1 are renormalized,
# larger deviations rejected; coordinates in [CLAMP_FLOOR, 0) clamp to 0.
SUM_TOL = 1e-12
RENORM_TOL = 1e-9
CLAMP_FLOOR = -1e-15

COLUMN_SUM_TOL = 1e-12


class DimensionMismatch(ValueError):
    """Operand dimensions do not agree."""


@dataclass(frozen=True)
class AsymmetryError:
    """P[i,j,k] != P[j,i,k] for the recorded 1-based indices."""

    i: int
    j: int
    k: int

    def __str__(self) -> str:
        return f"P[{self.i},{self.j},{self.k}] != P[{self.j},{self.i},{self.k}]"


@dataclass(frozen=True)
class ColumnSumError:
    """Column (i, j) does not sum to 1 over k; 1-based indices."""

    i: int
    j: int
    total: float

    def __str__(self) -> str:
        return f"sum_k P[{self.i},{self.j},k] = {self.total!r} != 1"


@dataclass(frozen=True)
class NegativeEntryError:
    """P[i,j,k] < 0 at the recorded 1-based indices."""

    i: int
    j: int
    k: int

    def __str__(self) -> str:
        return f"P[{self.i},{self.j},{self.k}] < 0"


Violation = AsymmetryError | ColumnSumError | NegativeEntryError


class MatrixValidationError(ValueError):
    """Raised by validate(); carries the full list of violations."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = ", ".join(str(v) for v in violations[:5])
        more = "" if len(violations) <= 5 else f" (+{len(violations) - 5} more)"
        super().__init__(f"{len(violations)} violation(s): {lines}{more}")


def collect_violations(entries: np.ndarray) -> list[Violation]:
    """All symmetry / column-sum / nonnegativity violations, 1-based indices."""
    m = entries.shape[0]
    violations: list[Violation] = []
    for i in range(m):
        for j in range(i, m):
            for k in range(m):
                if entries[i, j, k] < 0:
                    violations.append(NegativeEntryError(i + 1, j + 1, k + 1))
                if i < j and entries[i, j, k] != entries[j, i, k]:
                    violations.append(AsymmetryError(i + 1, j + 1, k + 1))
            total = float(entries[i, j].sum())
            if abs(total - 1.0) > COLUMN_SUM_TOL:
                violations.append(ColumnSumError(i + 1, j + 1, total))
    return violations


@dataclass(frozen=True, eq=False)
class CubicMatrix:
    """Validated heredity coefficients of one QSO: dense (m, m, m) array.

    entries[i, j, k] is P_{i+1 j+1, k+1} in 1-based species labels.  The
    array is marked read-only; instances are safe to share across threads.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(np.asarray(self.entries, dtype=float))
        if arr.ndim != 3 or len(set(arr.shape)) != 1:
            raise ValueError(f"expected a cubic array, got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise ValueError("need at least two species (m >= 2)")
        violations = collect_violations(arr)
        if violations:
            raise MatrixValidationError(violations)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def _wrap(cls, entries: np.ndarray) -> CubicMatrix:
        """Adopt an array known valid by construction (skips re-validation)."""
        obj = object.__new__(cls)
        entries.setflags(write=False)
        object.__setattr__(obj, "entries", entries)
        return obj

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def coefficient(self, i: int, j: int, k: int) -> float:
        """P_{ij,k} with 1-based species labels."""
        return float(self.entries[i - 1, j - 1, k - 1])

    def to_json_dict(self) -> dict:
        return {"m": self.m, "P": self.entries.tolist()}


def validate(entries: np.ndarray | list) -> CubicMatrix:
    """Validate a raw cubic array; raises MatrixValidationError listing every
    violated condition (asymmetry, column sum, negative entry)."""
    return CubicMatrix(np.asarray(entries, dtype=float))


def simplex_point(coords: np.ndarray | list, *, dim: int | None = None) -> np.ndarray:
    """Return a validated probability vector.

    Coordinates in [-1e-15, 0) are clamped to 0 (floating-point underflow near
    invariant faces); sums within 1e-9 of 1 are renormalized; anything worse
    is rejected.
    """
    x = np.array(coords, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a vector, got shape {x.shape}")
    if dim is not None and x.shape[0] != dim:
        raise DimensionMismatch(f"expected {dim} coordinates, got {x.shape[0]}")
    negative = x < 0
    if np.any(x[negative] < CLAMP_FLOOR):
        raise ValueError(f"negative coordinate in {x.tolist()}")
    x[negative] = 0.0
    total = x.sum()
    if abs(total - 1.0) > RENORM_TOL:
        raise ValueError(f"coordinates sum to {total!r}, not 1")
    if total != 1.0:
        x /= total
    return x


def vertex(m: int, i: int) -> np.ndarray:
    """The vertex e_i of the simplex, 1-based label i."""
    if not 1 <= i <= m:
        raise ValueError(f"vertex label {i} outside 1..{m}")
    e = np.zeros(m)
    e[i - 1] = 1.0
    return e


def evaluate_raw(V: CubicMatrix, x: np.ndarray) -> np.ndarray:
    """The quadratic form sum_ij P[i,j,k] x_i x_j, with no simplex checks.

    Extends the map off the simplex; used for Jacobian work and Newton steps
    whose iterates may leave the simplex slightly.
    """
    return x @ np.tensordot(x, V.entries, axes=(0, 0))


def apply(V: CubicMatrix, x: np.ndarray | list) -> np.ndarray:
    """One generation step: a valid simplex point in, a valid one out."""
    x = simplex_point(x, dim=V.m)
    image = evaluate_raw(V, x)
    total = image.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise ArithmeticError(f"image sum drifted to {total!r}")
    return simplex_point(image)


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """Multiplicative rewriting of a QSO.

    a[k, i] holds a_ki = 2 P[i,k,k] - P[k,k,k] off the diagonal and
    a[k, k] = P[k,k,k]; residual maps each 1-based coordinate k > ell to the
    quadratic-tail coefficients P[i,j,k] with i != k, j != k (rows/columns
    touching k zeroed).  Coefficient bounds 0 <= a_kk <= 1 and
    -a_kk <= a_ki <= 2 - a_kk hold for every valid matrix.
    """

    m: int
    ell: int
    a: np.ndarray
    residual: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        diag = np.diag(self.a)
        # 1e-12 slack absorbs the single rounding in 2*P[i,k,k] - P[k,k,k]
        if np.any(diag < -1e-12) or np.any(diag > 1 + 1e-12):
            raise ValueError("diagonal coefficient outside [0, 1]")
        lo = -diag[:, None] - 1e-12
        hi = 2.0 - diag[:, None] + 1e-12
        if np.any(self.a < lo) or np.any(self.a > hi):
            raise ValueError("off-diagonal coefficient outside [-a_kk, 2-a_kk]")
        self.a.setflags(write=False)
        for tail in self.residual.values():
            tail.setflags(write=False)


def _volterra_coordinate_ok(entries: np.ndarray, k0: int) -> bool:
    """True if row k0 (0-based) is zero in every column (i, j) not touching k0."""
    m = entries.shape[0]
    mask = np.ones((m, m), dtype=bool)
    mask[k0, :] = False
    mask[:, k0] = False
    return bool(np.all(entries[:, :, k0][mask] <= 1e-15))


def canonical_form(V: CubicMatrix, ell: int) -> CanonicalForm:
    """Derive the canonical coefficients for a prefix length ell.

    Requires every coordinate k <= ell to satisfy the Volterra zero condition
    (P[i,j,k] = 0 whenever k is not a parent), so that the quadratic tail of
    those coordinates genuinely vanishes.
    """
    m = V.m
    if not 0 <= ell <= m:
        raise ValueError(f"ell={ell} outside 0..{m}")
    P = V.entries
    for k0 in range(ell):
        if not _volterra_coordinate_ok(P, k0):
            raise ValueError(
                f"coordinate {k0 + 1} violates the Volterra zero condition; "
                f"canonical prefix {ell} is not available"
            )
    diag = np.einsum("kkk->k", P)
    a = 2.0 * np.einsum("ikk->ki", P) - diag[:, None]
    np.fill_diagonal(a, diag)
    residual: dict[int, np.ndarray] = {}
    for k0 in range(ell, m):
        tail = P[:, :, k0].copy()
        tail[k0, :] = 0.0
        tail[:, k0] = 0.0
        residual[k0 + 1] = tail
    return CanonicalForm(m=m, ell=ell, a=a, residual=residual)


def evaluate_canonical_raw(cf: CanonicalForm, x: np.ndarray) -> np.ndarray:
    """Canonical-form evaluation without simplex checks."""
    factor = cf.a @ x - np.diag(cf.a) * x + np.diag(cf.a)
    image = x * factor
    for k, tail in cf.residual.items():
        image[k - 1] += x @ tail @ x
    return image


def apply_canonical(cf: CanonicalForm, x: np.ndarray | list) -> np.ndarray:
    """One generation step through the canonical form (cross-checks apply)."""
    x = simplex_point(x, dim=cf.m)
    image = evaluate_canonical_raw(cf, x)
    total = image.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise ArithmeticError(f"image sum drifted to {total!r}")
    return simplex_point(image)


def load_operator(source: str | Path | dict) -> CubicMatrix:
    """Read and validate operator JSON ({"m": int, "P": [[[...]]]}); extra
    keys are ignored.  P is nested i -> j -> k with 1-based semantics."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            payload = json.load(fh)
    else:
        payload = source
    if not isinstance(payload, dict) or "m" not in payload or "P" not in payload:
        raise ValueError("operator JSON needs keys 'm' and 'P'")
    m = int(payload["m"])
    entries = np.asarray(payload["P"], dtype=float)
    if entries.shape != (m, m, m):
        raise ValueError(f"P has shape {entries.shape}, expected {(m, m, m)}")
    return validate(entries)


def dump_operator(V: CubicMatrix, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(V.to_json_dict(), fh, sort_keys=True)
        fh.write("\n")
