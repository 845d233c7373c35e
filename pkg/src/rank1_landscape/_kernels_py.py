"""Pure numpy fallback for the compiled float kernels in ``_kernels.pyx``."""

import numpy as np


def f_value(x, y, M):
    return float(np.abs(np.outer(x, y) - M).sum())


def fp_value(x, y, M, power):
    return float((np.abs(np.outer(x, y) - M) ** power).sum())


def subgradient(x, y, M):
    L = np.sign(np.outer(x, y) - M)
    return L @ y, L.T @ x


def subgradient_path(x0, y0, M, c, diminishing, iters):
    m, n = len(x0), len(y0)
    path = np.empty((iters + 1, m + n))
    fvals = np.empty(iters + 1)
    x = np.array(x0, dtype=np.float64)
    y = np.array(y0, dtype=np.float64)
    for k in range(iters + 1):
        path[k, :m] = x
        path[k, m:] = y
        fvals[k] = f_value(x, y, M)
        if k == iters:
            break
        step = c / (k + 1) if diminishing else c
        gx, gy = subgradient(x, y, M)
        x -= step * gx
        y -= step * gy
    return path, fvals


def grid_values(pts, m, M):
    X = pts[:, :m]
    Y = pts[:, m:]
    return np.abs(X[:, :, None] * Y[:, None, :] - M[None]).sum(axis=(1, 2))
