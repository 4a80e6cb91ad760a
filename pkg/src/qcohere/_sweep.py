"""Brute-force optimization over qubit measurement directions.

A measurement on a qubit is fixed by a unit vector ``n`` (projectors
``(I +- n.sigma)/2``). Objectives are evaluated in batch on a regular
``(theta, phi)`` grid; the best grid points are then polished with
Nelder-Mead in a local tangent chart, which avoids the coordinate
singularity at the poles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .exceptions import ValidationError


@dataclass(frozen=True)
class MeasurementSweep:
    """Grid and refinement settings for a direction sweep."""

    grid_theta: int = 90
    grid_phi: int = 180
    refine_starts: int = 4
    refine_iters: int = 400

    def __post_init__(self):
        if self.grid_theta < 8 or self.grid_phi < 8:
            raise ValidationError("sweep grid sizes must be at least 8")


DEFAULT_SWEEP = MeasurementSweep()
COARSE_SWEEP = MeasurementSweep(grid_theta=24, grid_phi=48, refine_starts=4)


def sphere_grid(n_theta: int, n_phi: int) -> np.ndarray:
    """Unit vectors on a ``theta in [0, pi]``, ``phi in [0, 2 pi)`` grid, shape ``(N, 3)``."""
    th = np.linspace(0.0, np.pi, n_theta)
    ph = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    T, P = np.meshgrid(th, ph, indexing="ij")
    return np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1).reshape(-1, 3)


def _tangent_frame(n0):
    a = np.array([1.0, 0.0, 0.0]) if abs(n0[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(n0, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n0, e1)
    return e1, e2


def _chart(n0):
    e1, e2 = _tangent_frame(n0)

    def to_sphere(ab):
        v = n0 + ab[0] * e1 + ab[1] * e2
        return v / np.linalg.norm(v)

    return to_sphere


def _distinct_best(values, vectors, k, min_sep=0.05):
    order = np.argsort(values, kind="stable")
    picked = []
    for idx in order:
        v = vectors[idx]
        if all(np.linalg.norm(v - vectors[j]) > min_sep and np.linalg.norm(v + vectors[j]) > min_sep
               for j in picked):
            picked.append(idx)
        if len(picked) == k:
            break
    return picked


def _polish(f_single, n0, iters):
    to_sphere = _chart(n0)
    res = minimize(lambda ab: f_single(to_sphere(ab)), np.zeros(2), method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": iters,
                            "initial_simplex": np.array([[0.0, 0.0], [0.02, 0.0], [0.0, 0.02]])})
    n = to_sphere(res.x)
    return float(f_single(n)), n


def minimize_direction(f_batch, sweep: MeasurementSweep = DEFAULT_SWEEP, f_single=None):
    """Minimize an objective over unit vectors in R^3.

    Parameters
    ----------
    f_batch : callable
        Maps an ``(N, 3)`` array of unit vectors to ``N`` objective values.
    sweep : MeasurementSweep
    f_single : callable, optional
        Scalar version used during refinement; defaults to ``f_batch`` on a
        one-row array.

    Returns
    -------
    value : float
    n : ndarray
        Optimal unit vector.
    """
    if f_single is None:
        def f_single(n):
            return float(f_batch(n[None, :])[0])
    grid = sphere_grid(sweep.grid_theta, sweep.grid_phi)
    vals = np.asarray(f_batch(grid), dtype=float)
    best_val = float(np.min(vals))
    best_n = grid[int(np.argmin(vals))]
    for idx in _distinct_best(vals, grid, sweep.refine_starts):
        v, n = _polish(f_single, grid[idx], sweep.refine_iters)
        if v < best_val:
            best_val, best_n = v, n
    return best_val, best_n


def maximize_direction(f_batch, sweep: MeasurementSweep = DEFAULT_SWEEP, f_single=None):
    neg_single = None if f_single is None else (lambda n: -f_single(n))
    v, n = minimize_direction(lambda ns: -np.asarray(f_batch(ns)), sweep, neg_single)
    return -v, n


def minimize_direction_pair(f_batch, n_theta: int = 16, n_phi: int = 32, refine_starts: int = 4,
                            iters: int = 2000):
    """Minimize ``f(nA, nB)`` over pairs of unit vectors.

    ``f_batch`` receives two ``(N, 3)`` arrays and returns ``N`` values. The
    grid is the product of two coarse sphere grids.
    """
    g = sphere_grid(n_theta, n_phi)
    # drop duplicate pole points to shrink the product grid
    _, uniq = np.unique(np.round(g, 12), axis=0, return_index=True)
    g = g[np.sort(uniq)]
    ia, ib = np.meshgrid(np.arange(len(g)), np.arange(len(g)), indexing="ij")
    ia = ia.ravel()
    ib = ib.ravel()
    vals = np.empty(ia.size)
    chunk = 200000
    for s in range(0, ia.size, chunk):
        vals[s:s + chunk] = f_batch(g[ia[s:s + chunk]], g[ib[s:s + chunk]])
    order = np.argsort(vals, kind="stable")[: max(refine_starts * 8, 1)]
    starts = []
    for idx in order:
        key = (ia[idx], ib[idx])
        if all(np.linalg.norm(g[key[0]] - g[a]) + np.linalg.norm(g[key[1]] - g[b]) > 0.1 for a, b in starts):
            starts.append(key)
        if len(starts) == refine_starts:
            break
    best_val = float(vals[order[0]])
    best = (g[ia[order[0]]], g[ib[order[0]]])
    for a, b in starts:
        ca, cb = _chart(g[a]), _chart(g[b])

        def obj(p):
            return float(f_batch(ca(p[:2])[None, :], cb(p[2:])[None, :])[0])

        simplex = np.vstack([np.zeros(4), 0.05 * np.eye(4)])
        res = minimize(obj, np.zeros(4), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": iters,
                                "initial_simplex": simplex})
        if res.fun < best_val:
            best_val = float(res.fun)
            best = (ca(res.x[:2]), cb(res.x[2:]))
    return best_val, best


def angles(n) -> tuple:
    """``(theta, phi)`` of a unit vector with ``phi in [0, 2 pi)``."""
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    return float(np.arccos(np.clip(n[2], -1.0, 1.0))), float(np.mod(np.arctan2(n[1], n[0]), 2 * np.pi))
