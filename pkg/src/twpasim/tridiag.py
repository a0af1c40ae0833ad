"""Block-tridiagonal linear solves (Thomas algorithm on matrix blocks).

The ladder couples only neighbouring nodes, so every linear system here is
block tridiagonal; eliminating forward and substituting backward costs
O(n_blocks) block operations.  Blocks may carry arbitrary leading batch
axes, which numpy's stacked linalg routines handle in one call per node.
"""

from __future__ import annotations

import numpy as np


def solve_block_tridiagonal(
    diag: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    rhs: np.ndarray,
) -> np.ndarray:
    """Solve a block-tridiagonal system.

    Parameters
    ----------
    diag : ndarray, shape (m, ..., b, b)
        Diagonal blocks; the block index leads, batch axes follow.
    lower : ndarray, shape (m - 1, ..., b, b)
        ``lower[i]`` couples unknown block ``i`` into equation block ``i+1``.
    upper : ndarray, shape (m - 1, ..., b, b)
        ``upper[i]`` couples unknown block ``i+1`` into equation block ``i``.
    rhs : ndarray, shape (m, ..., b)

    Returns
    -------
    ndarray, shape (m, ..., b)

    Raises numpy.linalg.LinAlgError when a pivot block is singular.
    """
    m = diag.shape[0]
    b = diag.shape[-1]
    if diag.shape[-2] != b:
        raise ValueError("diagonal blocks must be square")
    if lower.shape[0] != m - 1 or upper.shape[0] != m - 1:
        raise ValueError("lower/upper must hold one block less than diag")
    if rhs.shape[0] != m or rhs.shape[-1] != b:
        raise ValueError("rhs shape does not match the blocks")

    # Forward elimination: store solve(pivot, upper) and the updated rhs.
    # Vector right-hand sides go through the matrix form (a trailing
    # singleton axis) so batched blocks broadcast the same way everywhere.
    c = np.empty_like(upper)
    y = np.empty_like(rhs, dtype=np.result_type(diag, rhs))
    pivot = diag[0]
    y[0] = np.linalg.solve(pivot, rhs[0][..., None])[..., 0]
    for i in range(1, m):
        c[i - 1] = np.linalg.solve(pivot, upper[i - 1])
        pivot = diag[i] - lower[i - 1] @ c[i - 1]
        y[i] = np.linalg.solve(
            pivot, (rhs[i] - (lower[i - 1] @ y[i - 1][..., None])[..., 0])[..., None]
        )[..., 0]

    x = np.empty_like(y)
    x[m - 1] = y[m - 1]
    for i in range(m - 2, -1, -1):
        x[i] = y[i] - (c[i] @ x[i + 1][..., None])[..., 0]
    return x
