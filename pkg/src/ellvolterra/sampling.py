"""Seeded random generators for simplex points and valid operators."""

from __future__ import annotations

import numpy as np

from .core import CubicMatrix

DEFAULT_SEED = 0


def resolve_rng(rng: np.random.Generator | int | None) -> np.random.Generator:
    """Accept a Generator, a seed, or None (fixed default seed)."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(DEFAULT_SEED if rng is None else rng)


def random_simplex_point(m: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    return resolve_rng(rng).dirichlet(np.ones(m))


def random_face_point(
    m: int, zero_coords: set[int], rng: np.random.Generator | int | None = None
) -> np.ndarray:
    """A point of the face {x : x_i = 0 for i in zero_coords} (1-based labels)."""
    free = [i for i in range(m) if (i + 1) not in zero_coords]
    if not free:
        raise ValueError("cannot zero every coordinate of a probability vector")
    x = np.zeros(m)
    x[free] = resolve_rng(rng).dirichlet(np.ones(len(free)))
    return x


def _fill_column(entries: np.ndarray, i: int, j: int, rows: list[int], weights: np.ndarray) -> None:
    col = np.zeros(entries.shape[0])
    col[rows] = weights
    entries[i, j] = col
    entries[j, i] = col


def random_operator(
    m: int,
    rng: np.random.Generator | int | None = None,
    fixed_vertex_prob: float = 0.0,
) -> CubicMatrix:
    """A random valid operator; each column (i <= j) is Dirichlet over all rows.

    With probability fixed_vertex_prob a diagonal column (i, i) is pinned to
    P[i,i,i] = 1, making the vertex e_i a fixed point.
    """
    rng = resolve_rng(rng)
    entries = np.zeros((m, m, m))
    all_rows = list(range(m))
    for i in range(m):
        for j in range(i, m):
            if i == j and rng.random() < fixed_vertex_prob:
                weights = np.zeros(m)
                weights[i] = 1.0
                _fill_column(entries, i, j, all_rows, weights)
            else:
                _fill_column(entries, i, j, all_rows, rng.dirichlet(np.ones(m)))
    return CubicMatrix(entries)


def random_ell_volterra(
    m: int,
    ell: int,
    rng: np.random.Generator | int | None = None,
    fixed_vertex_prob: float = 0.0,
) -> CubicMatrix:
    """A random operator of the class with Volterra prefix length ell.

    Columns draw Dirichlet weights over their admissible rows
    ({i, j} union {ell+1..m}), which keeps the first ell coordinates Volterra
    and (almost surely) gives every higher coordinate a positive outside
    coefficient.  Vertex pinning is applied only to diagonal columns with
    i > ell so those witnesses survive.
    """
    if not 0 <= ell <= m:
        raise ValueError(f"ell={ell} outside 0..{m}")
    rng = resolve_rng(rng)
    entries = np.zeros((m, m, m))
    high = list(range(ell, m))
    for i in range(m):
        for j in range(i, m):
            rows = sorted(set([i, j]) | set(high))
            if i == j and i >= ell and rng.random() < fixed_vertex_prob:
                weights = np.zeros(len(rows))
                weights[rows.index(i)] = 1.0
            else:
                weights = rng.dirichlet(np.ones(len(rows)))
            _fill_column(entries, i, j, rows, weights)
    return CubicMatrix(entries)
