"""Fourth-order finite differences on nonuniform radial grids.

Stencil weights come from Fornberg's recursion on arbitrary nodes.  Radial
symmetry is built in: stencils that would reach past the origin use
reflected nodes carrying the even extension u(-r) = u(r), and at r = 0 the
Laplacian of an even profile reduces to dim * u''(0).  The resulting
operator is a banded sparse matrix; the same matrix serves the steady
residual checks, the kernel residuals and the implicit time stepper.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .grids import RadialGrid

__all__ = ["fd_weights", "radial_laplacian", "banded_form"]


def fd_weights(z: float, x: np.ndarray, max_order: int) -> np.ndarray:
    """Finite-difference weights at point z from nodes x (Fornberg 1988).

    Returns an array W of shape (len(x), max_order + 1) such that the m-th
    derivative at z is approximated by W[:, m] @ f(x).  Exact for
    polynomials up to degree len(x) - 1.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    W = np.zeros((n, max_order + 1))
    c1, c4 = 1.0, x[0] - z
    W[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, max_order)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    W[i, k] = c1 * (k * W[i - 1, k - 1] - c5 * W[i - 1, k]) / c2
                W[i, 0] = -c1 * c5 * W[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                W[j, k] = (c4 * W[j, k] - k * W[j, k - 1]) / c3
            W[j, 0] = c4 * W[j, 0] / c3
        c1 = c2
    return W


@lru_cache(maxsize=32)
def radial_laplacian(grid: RadialGrid, dim: int, halfwidth: int = 3) -> sp.csr_matrix:
    """Discrete radial Laplacian u'' + (dim-1)/r u' for even profiles.

    Seven-point stencils (halfwidth 3) give at least fourth-order accuracy
    on the smoothly stretched grid.  Cached per grid instance; the grid's
    node array is immutable.
    """
    nodes = grid.nodes
    n = nodes.size
    rows, cols, vals = [], [], []
    for i in range(n):
        lo, hi = i - halfwidth, i + halfwidth
        if hi >= n:
            lo, hi = n - 1 - 2 * halfwidth, n - 1
        if lo < 0:
            # Reflect through the origin: node -r_k carries the value u(r_k).
            refl = list(range(-lo, 0, -1))
            x = np.concatenate([-nodes[refl], nodes[: hi + 1]])
            fold = refl + list(range(hi + 1))
        else:
            x = nodes[lo : hi + 1]
            fold = list(range(lo, hi + 1))
        W = fd_weights(nodes[i], x, 2)
        if i == 0:
            w = dim * W[:, 2]
        else:
            w = W[:, 2] + (dim - 1) / nodes[i] * W[:, 1]
        acc: dict[int, float] = {}
        for j, wj in zip(fold, w):
            acc[j] = acc.get(j, 0.0) + wj
        for j, v in acc.items():
            rows.append(i)
            cols.append(j)
            vals.append(v)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def banded_form(matrix: sp.spmatrix) -> tuple[int, int, np.ndarray]:
    """Convert a banded sparse matrix to (l, u, ab) for scipy solve_banded."""
    dia = sp.dia_matrix(matrix)
    lo = -int(dia.offsets.min())
    hi = int(dia.offsets.max())
    n = matrix.shape[0]
    ab = np.zeros((lo + hi + 1, n))
    for off, data in zip(dia.offsets, dia.data):
        ab[hi - off, :] = data
    return lo, hi, ab
