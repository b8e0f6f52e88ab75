"""Dense GF(2) matrix arithmetic on uint8 numpy arrays.

Matrices are plain 2-D ``numpy`` arrays with entries in {0, 1}; vectors are
1-D arrays.  Everything here is a pure function: inputs are never modified.
Elimination uses leftmost-pivot / first-nonzero-row selection so results are
deterministic.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


def as_bit_matrix(m) -> np.ndarray:
    """Validate and convert to a 2-D uint8 array with entries in {0, 1}."""
    a = np.asarray(m, dtype=np.uint8)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if a.size == 0:
        raise ValueError("matrix must have at least one row and one column")
    if np.any(a > 1):
        raise ValueError("matrix entries must be 0 or 1")
    return a


def as_bit_vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=np.uint8)
    if a.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got ndim={a.ndim}")
    if np.any(a > 1):
        raise ValueError("vector entries must be 0 or 1")
    return a


def _row_reduce(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """In-place RREF of ``a`` over GF(2); returns (a, pivot column list)."""
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        # clear every other 1 in this column in one vectorized xor
        mask = a[:, c].copy()
        mask[r] = 0
        a[mask == 1] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m) -> int:
    """GF(2) rank of ``m``."""
    a = as_bit_matrix(m).copy()
    _, pivots = _row_reduce(a)
    return len(pivots)


def mat_vec(m, v) -> np.ndarray:
    """GF(2) matrix-vector product ``m @ v`` (mod 2)."""
    a = as_bit_matrix(m)
    x = as_bit_vector(v)
    if x.shape[0] != a.shape[1]:
        raise ValueError(f"length mismatch: matrix has {a.shape[1]} cols, vector has {x.shape[0]}")
    return (a.astype(np.int64) @ x.astype(np.int64) % 2).astype(np.uint8)


def mat_mul(a, b) -> np.ndarray:
    """GF(2) matrix product."""
    a = as_bit_matrix(a)
    b = as_bit_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError("inner dimensions do not match")
    return (a.astype(np.int64) @ b.astype(np.int64) % 2).astype(np.uint8)


class SystematicForm(NamedTuple):
    """Column permutation + reduced matrix with an identity up front.

    ``reduced[:, :r]`` is the r x r identity (r = rank) and
    ``reduced = rref(matrix[:, perm])`` with dependent rows dropped;
    ``dropped`` is how many dependent rows were removed.
    """

    perm: np.ndarray
    reduced: np.ndarray
    dropped: int


def systematic_form(m) -> SystematicForm:
    """Reduce ``m`` so its first rank(m) columns form an identity.

    Only column *permutation* plus row operations are used, so the null
    space of the permuted matrix equals the permuted null space of ``m``.
    Rank deficiency is not an error; dependent rows are dropped and counted.
    """
    a = as_bit_matrix(m).copy()
    rows, cols = a.shape
    a, pivots = _row_reduce(a)
    r = len(pivots)
    non_pivots = [c for c in range(cols) if c not in set(pivots)]
    perm = np.array(pivots + non_pivots, dtype=np.int64)
    reduced = a[:r][:, perm]
    return SystematicForm(perm=perm, reduced=reduced, dropped=rows - r)


def null_space_basis(h) -> np.ndarray:
    """Basis (as rows) of ``{v : h @ v = 0 (mod 2)}``.

    Returns a (cols - rank) x cols matrix; zero rows never appear.  The
    basis is the standard RREF free-column construction, so it is
    deterministic.
    """
    a = as_bit_matrix(h).copy()
    _, cols = a.shape
    a, pivots = _row_reduce(a)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, p in enumerate(pivots):
            basis[i, p] = a[row, f]
    return basis
