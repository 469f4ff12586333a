"""Volterra prefix classification and the convex structure of operator classes.

A coordinate k satisfies the Volterra zero condition when P[i,j,k] = 0 for
every parent pair that does not contain k.  The class of an operator is the
longest prefix 1..ell of such coordinates, with every higher coordinate
required to carry at least one strictly positive outside coefficient.  For a
fixed prefix length the operators form a convex compact polytope whose
extreme points are exactly the 0/1 matrices; this module counts and
enumerates them and realizes the convex-combination / splitting algebra.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import CubicMatrix, DimensionMismatch, apply
from .sampling import random_face_point, random_simplex_point, resolve_rng

# Entries above this threshold count as structurally positive; at or below,
# as structural zeros (distinguishes zero patterns from rounding).
STRUCTURAL_ZERO = 1e-15

FACE_TOL = 1e-12


class SizeGuardExceeded(ValueError):
    """Enumeration request too large for the dense strategy."""


class EntryNotFractional(ValueError):
    """Splitting requires a coefficient strictly between 0 and 1."""


@dataclass(frozen=True)
class EllClassification:
    """Detected prefix length with its witness structure (1-based labels).

    volterra_coords: every coordinate satisfying the zero condition, prefix
    or not.  witnesses: for each coordinate above the prefix, one parent pair
    (i, j) with i != k != j and P[i,j,k] > 0.  Coordinates above the prefix
    that satisfy the zero condition have no witness; they are listed in
    non_prefix_volterra_coords and make the operator unclassifiable under the
    strict prefix convention (no coordinate relabeling is attempted).
    """

    m: int
    ell: int
    volterra_coords: frozenset[int]
    witnesses: dict[int, tuple[int, int]]
    non_prefix_volterra_coords: frozenset[int] = frozenset()

    @property
    def is_volterra(self) -> bool:
        return self.ell == self.m

    @property
    def unclassifiable(self) -> bool:
        return bool(self.non_prefix_volterra_coords)


def _coordinate_is_volterra(P: np.ndarray, k0: int) -> bool:
    m = P.shape[0]
    mask = np.ones((m, m), dtype=bool)
    mask[k0, :] = False
    mask[:, k0] = False
    return bool(np.all(P[:, :, k0][mask] <= STRUCTURAL_ZERO))


def detect_ell(V: CubicMatrix) -> EllClassification:
    """Classify an operator by its Volterra prefix length.

    The prefix is taken literally on coordinates 1, 2, ...: ell is the number
    of leading coordinates satisfying the zero condition.
    """
    P = V.entries
    m = V.m
    volterra = frozenset(k0 + 1 for k0 in range(m) if _coordinate_is_volterra(P, k0))
    ell = 0
    while ell < m and (ell + 1) in volterra:
        ell += 1
    witnesses: dict[int, tuple[int, int]] = {}
    for k in range(ell + 1, m + 1):
        if k in volterra:
            continue
        k0 = k - 1
        pair = next(
            (i, j)
            for i in range(m)
            for j in range(i, m)
            if i != k0 and j != k0 and P[i, j, k0] > STRUCTURAL_ZERO
        )
        witnesses[k] = (pair[0] + 1, pair[1] + 1)
    non_prefix = frozenset(k for k in volterra if k > ell)
    return EllClassification(
        m=m,
        ell=ell,
        volterra_coords=volterra,
        witnesses=witnesses,
        non_prefix_volterra_coords=non_prefix,
    )


@dataclass(frozen=True, eq=False)
class InvarianceResult:
    invariant: bool
    counterexample: tuple[np.ndarray, np.ndarray] | None = None
    outside_hypothesis: bool = False

    def __bool__(self) -> bool:
        return self.invariant


def check_face_invariance(
    V: CubicMatrix,
    zero_coords: set[int] | frozenset[int],
    samples: int = 100,
    rng: np.random.Generator | int | None = None,
) -> InvarianceResult:
    """Sample the face {x : x_i = 0, i in zero_coords} and test that images
    stay on it (zeroed coordinates <= 1e-12).  1-based labels."""
    zero_coords = set(zero_coords)
    if not zero_coords:
        return InvarianceResult(invariant=True)
    rng = resolve_rng(rng)
    idx = [i - 1 for i in sorted(zero_coords)]
    for _ in range(samples):
        x = random_face_point(V.m, zero_coords, rng)
        image = apply(V, x)
        if np.any(image[idx] > FACE_TOL):
            return InvarianceResult(invariant=False, counterexample=(x, image))
    return InvarianceResult(invariant=True)


def check_positivity_invariance(
    V: CubicMatrix,
    positive_coords: set[int] | frozenset[int],
    samples: int = 100,
    rng: np.random.Generator | int | None = None,
) -> InvarianceResult:
    """Test that points with x_i > 0 for i in positive_coords keep those
    coordinates positive after one step.

    The supporting theory assumes each requested coordinate i at or below the
    prefix has P[i,i,i] > 0; when that fails the check still runs but the
    result is flagged outside_hypothesis.
    """
    positive_coords = set(positive_coords)
    if not positive_coords:
        return InvarianceResult(invariant=True)
    rng = resolve_rng(rng)
    ell = detect_ell(V).ell
    diag = np.einsum("kkk->k", V.entries)
    outside = any(i <= ell and diag[i - 1] <= 0 for i in positive_coords)
    idx = [i - 1 for i in sorted(positive_coords)]
    for _ in range(samples):
        x = random_simplex_point(V.m, rng)
        image = apply(V, x)
        if np.any(image[idx] <= 0):
            return InvarianceResult(
                invariant=False, counterexample=(x, image), outside_hypothesis=outside
            )
    return InvarianceResult(invariant=True, outside_hypothesis=outside)


def convex_combine(V1: CubicMatrix, V2: CubicMatrix, lam: float) -> CubicMatrix:
    """Entrywise lam*V1 + (1-lam)*V2; classes with equal prefix are closed
    under this for lam in (0, 1)."""
    if V1.m != V2.m:
        raise DimensionMismatch(f"m={V1.m} vs m={V2.m}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda={lam} outside [0, 1]")
    return CubicMatrix._wrap(lam * V1.entries + (1.0 - lam) * V2.entries)


def _check_m_ell(m: int, ell: int | None) -> None:
    if m < 2:
        raise ValueError("need at least two species (m >= 2)")
    if ell is not None and not 0 <= ell <= m:
        raise ValueError(f"ell={ell} outside 0..{m}")


def extremal_count(m: int, ell: int | None) -> int:
    """Number of 0/1 operators with the prefix-ell zero pattern (exact).

    ell=None counts the extreme points of the unconstrained operator set,
    m**(m(m+1)/2).  For ell=m the count is 2**(m(m-1)/2); below that each of
    the m(m+1)/2 parent columns independently chooses one admissible row,
    giving (m-ell)^((m-ell)(m-ell+1)/2) * (m-ell+1)^((m-ell+1)ell)
    * (m-ell+2)^(ell(ell-1)/2).
    """
    _check_m_ell(m, ell)
    if ell is None:
        return m ** (m * (m + 1) // 2)
    if ell == m:
        return 2 ** (m * (m - 1) // 2)
    r = m - ell
    return (
        r ** (r * (r + 1) // 2)
        * (r + 1) ** ((r + 1) * ell)
        * (r + 2) ** (ell * (ell - 1) // 2)
    )


def admissible_rows(m: int, ell: int | None, i: int, j: int) -> tuple[int, ...]:
    """Rows (1-based) where column (i, j) may carry weight under the
    prefix-ell zero pattern; all rows when ell is None."""
    if ell is None:
        return tuple(range(1, m + 1))
    return tuple(sorted({i, j} | set(range(ell + 1, m + 1))))


def _columns(m: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, m + 1) for j in range(i, m + 1)]


def enumerate_extremals(m: int, ell: int | None) -> Iterator[CubicMatrix]:
    """Yield every 0/1 operator with the prefix-ell zero pattern.

    Columns are ordered lexicographically and each places its single 1 in one
    admissible row, so the stream is order-stable.  The zero pattern alone is
    enforced (matching the counting formula); some yielded matrices satisfy
    the zero condition at higher coordinates too, so callers interested in
    the exact class should re-check with detect_ell.  Guarded to m <= 4.
    """
    _check_m_ell(m, ell)
    if m > 4:
        raise SizeGuardExceeded(f"enumeration is dense-only and capped at m=4 (got {m})")
    cols = _columns(m)
    options = [admissible_rows(m, ell, i, j) for i, j in cols]
    for choice in itertools.product(*options):
        entries = np.zeros((m, m, m))
        for (i, j), k in zip(cols, choice):
            entries[i - 1, j - 1, k - 1] = 1.0
            entries[j - 1, i - 1, k - 1] = 1.0
        yield CubicMatrix._wrap(entries)


@dataclass(frozen=True)
class ExtremalCensus:
    """Predicted extreme-point count, optionally with the enumerated list."""

    m: int
    ell: int | None
    predicted_count: int
    enumerated: list[CubicMatrix] | None = None

    def __post_init__(self) -> None:
        if self.enumerated is not None and len(self.enumerated) != self.predicted_count:
            raise AssertionError(
                f"enumerated {len(self.enumerated)} extremals, expected {self.predicted_count}"
            )


def census(m: int, ell: int | None, enumerate_matrices: bool = False) -> ExtremalCensus:
    enumerated = list(enumerate_extremals(m, ell)) if enumerate_matrices else None
    return ExtremalCensus(m=m, ell=ell, predicted_count=extremal_count(m, ell), enumerated=enumerated)


def split_at_entry(
    V: CubicMatrix, i: int, j: int, k: int
) -> tuple[CubicMatrix, CubicMatrix, float]:
    """Write V as alpha*V1 + (1-alpha)*V2 by resolving one fractional entry.

    alpha = P[i,j,k] must lie strictly in (0, 1); V1 pushes the entry to 1
    (rest of the column zeroed), V2 zeroes it and rescales the rest of the
    column by 1/(1-alpha).  Zero patterns satisfy P = 0 iff both parts are 0,
    so the prefix class is preserved.  1-based labels.
    """
    alpha = V.coefficient(i, j, k)
    if not 0.0 < alpha < 1.0:
        raise EntryNotFractional(f"P[{i},{j},{k}] = {alpha!r} is not in (0, 1)")
    i0, j0, k0 = i - 1, j - 1, k - 1
    e1 = V.entries.copy()
    e2 = V.entries.copy()
    col1 = np.zeros(V.m)
    col1[k0] = 1.0
    e1[i0, j0] = col1
    e1[j0, i0] = col1
    col2 = V.entries[i0, j0] / (1.0 - alpha)
    col2[k0] = 0.0
    e2[i0, j0] = col2
    e2[j0, i0] = col2
    return CubicMatrix(e1), CubicMatrix(e2), alpha
