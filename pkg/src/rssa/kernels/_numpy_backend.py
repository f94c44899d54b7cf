"""Pure-numpy implementations of the per-tick hot kernels.

These are the reference implementations; the compiled extension in
``_fast.pyx`` mirrors them exactly and is preferred at import when built.
"""
from __future__ import annotations

import numpy as np

__all__ = ["family_lie", "solve_g_star", "feasibility_bounds"]


def family_lie(samples: np.ndarray, cos_t2: float, sin_t2: float,
               td1: float, td2: float, v1: float, v2: float,
               k1: float, base: float):
    """Drift and control Lie derivatives of the safety index per xi sample.

    ``samples`` is (n, 3).  ``(v1, v2)`` is the row vector delta^T @ J of the
    frozen closest point, ``base`` collects the xi-independent part of the
    drift derivative (-2*d*d_dot - k1 * kinematic d_ddot).

    Returns (Lf (n,), Lg (n, 2)) with
      Lg_i = k1 * v^T @ M(xi_i)^-1
      Lf_i = base - Lg_i @ h(xi_i)
    """
    xi1 = samples[:, 0]
    xi2 = samples[:, 1]
    xi3 = samples[:, 2]
    m11 = xi1 + 2.0 * xi3 * cos_t2
    m12 = xi2 + xi3 * cos_t2
    m22 = xi2
    det = m11 * m22 - m12 * m12
    w1 = k1 * (v1 * m22 - v2 * m12) / det
    w2 = k1 * (v2 * m11 - v1 * m12) / det
    h1 = xi3 * sin_t2 * (-2.0 * td1 * td2 - td2 * td2)
    h2 = xi3 * sin_t2 * td1 * td1
    lf = base - (w1 * h1 + w2 * h2)
    lg = np.stack([w1, w2], axis=1)
    return lf, lg


def solve_g_star(lg: np.ndarray):
    """Exhaustive maximin over family samples.

    Maximizes min_j (Lg_i . Lg_j) / ||Lg_i|| over candidates i; zero-norm
    candidates are skipped.  Returns (index, alpha_star) where alpha_star is
    min_j Lg_i* . Lg_j.  Ties resolve to the lowest index.
    """
    norms = np.linalg.norm(lg, axis=1)
    if np.all(norms == 0.0):
        raise ValueError("all family members have zero control authority")
    dots = lg @ lg.T                      # (n, n)
    inner_min = dots.min(axis=1)          # min_j Lg_i . Lg_j
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = np.where(norms > 0.0, inner_min / norms, -np.inf)
    idx = int(np.argmax(scores))          # argmax returns the first maximum
    return idx, float(inner_min[idx])


def feasibility_bounds(lg: np.ndarray):
    """(alpha, beta) of the family: worst pairwise cosine and smallest norm."""
    norms = np.linalg.norm(lg, axis=1)
    beta = float(norms.min())
    if beta == 0.0:
        return -1.0, 0.0
    unit = lg / norms[:, None]
    alpha = float((unit @ unit.T).min())
    return min(alpha, 1.0), beta
