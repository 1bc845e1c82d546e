"""Pure numpy implementation of one Bellman stage sweep.

Mirror of ``_stage.pyx``; both must perform the floating-point operations in
the same order so the two backends agree bit for bit.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _select(q: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    # First candidate (in tie-preference order) within tol of the row minimum.
    best = q.min(axis=1)
    arg = np.argmax(q <= (best + tol)[:, None], axis=1)
    return best, arg


def stage_nearest(next_values, r, idx_d, idx_w, tol):
    """Backup every grid belief pair, continuation read at snapped posteriors.

    ``r[k, c]`` is the dispatch probability at grid point ``k`` under
    candidate ``c``; ``idx_d``/``idx_w`` are the snapped posterior indices
    after a dispatch/wait.  Returns ``(values, argmin)``, both ``(n, n)``.
    """
    n = r.shape[0]
    V = np.asarray(next_values, dtype=np.float64)
    values = np.empty((n, n))
    argmin = np.empty((n, n), dtype=np.intp)
    for i in range(n):
        a1 = r[i][None, :]
        w1 = 1.0 - a1
        d1 = idx_d[i][None, :]
        s1 = idx_w[i][None, :]
        a2 = r[i:]
        w2 = 1.0 - a2
        d2 = idx_d[i:]
        s2 = idx_w[i:]
        cost = 1.0 - (a1 * w2 + a2 * w1)
        cont = (w1 * w2 * V[s1, s2] + a1 * a2 * V[d1, d2]) + (
            w1 * a2 * V[s1, d2] + a1 * w2 * V[d1, s2]
        )
        val, arg = _select(cost + cont, tol)
        values[i, i:] = val
        values[i:, i] = val
        argmin[i, i:] = arg
        argmin[i:, i] = arg
    return values, argmin


def _bilinear(V, lo1, f1, lo2, f2):
    g1 = 1.0 - f1
    g2 = 1.0 - f2
    return (g1 * g2 * V[lo1, lo2] + f1 * f2 * V[lo1 + 1, lo2 + 1]) + (
        g1 * f2 * V[lo1, lo2 + 1] + f1 * g2 * V[lo1 + 1, lo2]
    )


def stage_linear(next_values, r, lo_d, f_d, lo_w, f_w, tol):
    """As :func:`stage_nearest` but with bilinear interpolation of the continuation."""
    n = r.shape[0]
    V = np.asarray(next_values, dtype=np.float64)
    values = np.empty((n, n))
    argmin = np.empty((n, n), dtype=np.intp)
    for i in range(n):
        a1 = r[i][None, :]
        w1 = 1.0 - a1
        a2 = r[i:]
        w2 = 1.0 - a2
        ld1, fd1 = lo_d[i][None, :], f_d[i][None, :]
        lw1, fw1 = lo_w[i][None, :], f_w[i][None, :]
        ld2, fd2 = lo_d[i:], f_d[i:]
        lw2, fw2 = lo_w[i:], f_w[i:]
        cost = 1.0 - (a1 * w2 + a2 * w1)
        cont = (
            w1 * w2 * _bilinear(V, lw1, fw1, lw2, fw2)
            + a1 * a2 * _bilinear(V, ld1, fd1, ld2, fd2)
        ) + (
            w1 * a2 * _bilinear(V, lw1, fw1, ld2, fd2)
            + a1 * w2 * _bilinear(V, ld1, fd1, lw2, fw2)
        )
        val, arg = _select(cost + cont, tol)
        values[i, i:] = val
        values[i:, i] = val
        argmin[i, i:] = arg
        argmin[i:, i] = arg
    return values, argmin
