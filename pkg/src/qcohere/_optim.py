"""Small log-barrier interior-point solver for linear matrix inequalities.

The coherence measures defined through a minimization over incoherent states
(robustness, weight, trace distance, geometric) are all semidefinite programs
in a handful of real variables. This module solves

    minimize    c . z
    subject to  F_k(z) = F_k0 + sum_a z_a F_ka  > 0     (Hermitian blocks)
                G z + h > 0                               (scalar rows)

by damped Newton steps on ``t c.z - sum log det F_k - sum log(Gz + h)`` with
an increasing barrier parameter ``t``. The path is deterministic, so results
are reproducible to rounding and equivariant under relabelings that permute
the problem data consistently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import NoConvergence


@dataclass
class LMIBlock:
    """``F0 + sum_a z_a Fa[a]`` for a Hermitian ``m x m`` block."""

    F0: np.ndarray
    Fa: np.ndarray  # shape (n, m, m)

    def value(self, z):
        m = self.F0.shape[0]
        return self.F0 + (z @ self.Fa.reshape(len(z), m * m)).reshape(m, m)

    @property
    def size(self) -> int:
        return self.F0.shape[0]


@dataclass
class LMIProblem:
    c: np.ndarray
    blocks: list = field(default_factory=list)
    G: np.ndarray | None = None
    h: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.c.size

    def barrier_order(self) -> int:
        m = sum(b.size for b in self.blocks)
        if self.G is not None:
            m += self.G.shape[0]
        return m


@dataclass
class LMISolution:
    z: np.ndarray
    value: float
    gap: float
    iterations: int


def _cholesky(m):
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return None


def _feasible(prob: LMIProblem, z) -> bool:
    if prob.G is not None and np.any(prob.G @ z + prob.h <= 0):
        return False
    return all(_cholesky(b.value(z)) is not None for b in prob.blocks)


def _barrier(prob: LMIProblem, z) -> float:
    """``-sum log det F_k(z) - sum log(Gz+h)``; ``inf`` outside the domain."""
    val = 0.0
    if prob.G is not None:
        s = prob.G @ z + prob.h
        if np.any(s <= 0):
            return np.inf
        val -= np.sum(np.log(s))
    for b in prob.blocks:
        L = _cholesky(b.value(z))
        if L is None:
            return np.inf
        val -= 2.0 * np.sum(np.log(np.real(np.diag(L))))
    return val


def _derivatives(prob: LMIProblem, z):
    n = prob.n
    grad = np.zeros(n)
    hess = np.zeros((n, n))
    if prob.G is not None:
        s = prob.G @ z + prob.h
        gs = prob.G / s[:, None]
        grad -= gs.sum(axis=0)
        hess += gs.T @ gs
    for b in prob.blocks:
        L = np.linalg.cholesky(b.value(z))
        m = b.size
        # A_a = L^{-1} F_a L^{-H}
        X = np.linalg.solve(L, b.Fa.transpose(1, 0, 2).reshape(m, n * m))
        X = X.reshape(m, n, m).transpose(1, 0, 2)  # L^{-1} F_a
        A = np.linalg.solve(L.conj(), X.transpose(0, 2, 1)).transpose(0, 2, 1)
        # (L^{-1} F_a) L^{-H}: right-multiply by L^{-H}  <=>  solve conj(L) Y^T = X^T
        grad -= np.real(np.einsum("aii->a", A))
        M = A.reshape(n, m * m)
        hess += np.real(M.conj() @ M.T)
    return grad, hess


def solve_lmi(prob: LMIProblem, z0, *, gap_tol: float = 1e-11, t0: float = 1.0,
              mu: float = 10.0, newton_tol: float = 1e-9, max_newton: int = 200,
              max_outer: int = 60) -> LMISolution:
    """Barrier method for :class:`LMIProblem` from a strictly feasible ``z0``.

    Centering uses damped Newton steps ``1/(1 + lambda)`` (``lambda`` the
    Newton decrement), which keep self-concordant barriers feasible without a
    line search, and full steps once ``lambda < 1/4``.

    Returns
    -------
    LMISolution
        Final iterate, objective value and the barrier duality-gap bound
        ``m / t`` at termination.

    Raises
    ------
    NoConvergence
        If ``z0`` is infeasible or centering fails.
    """
    z = np.array(z0, dtype=float)
    c = np.asarray(prob.c, dtype=float)
    if not _feasible(prob, z):
        raise NoConvergence("barrier solver needs a strictly feasible start")
    m = prob.barrier_order()
    t = t0
    total = 0
    for _ in range(max_outer):
        for _ in range(max_newton):
            total += 1
            g, H = _derivatives(prob, z)
            g = t * c + g
            try:
                step = -np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                step = -np.linalg.lstsq(H, g, rcond=None)[0]
            dec = float(-g @ step)
            if not np.isfinite(dec):
                raise NoConvergence("non-finite Newton decrement")
            # centered enough: either in barrier units or in objective units
            if dec <= newton_tol or dec / t <= 1e-15:
                break
            lam = np.sqrt(max(dec, 0.0))
            s = 1.0 if lam < 0.25 else 1.0 / (1.0 + lam)
            while not _feasible(prob, z + s * step):
                s *= 0.5
                if s < 1e-12:
                    break
            if s < 1e-12:
                break  # rounding floor reached; accept the current point
            z = z + s * step
        else:
            if dec / t > 1e-9:
                raise NoConvergence("centering did not converge")
        if m / t < gap_tol:
            break
        t *= mu
    return LMISolution(z=z, value=float(c @ z), gap=m / t, iterations=total)


# ---------------------------------------------------------------------------
# parametrizations
# ---------------------------------------------------------------------------

def hermitian_basis(d: int) -> np.ndarray:
    """Real-linear basis of ``d x d`` Hermitian matrices (diagonal units, then Re/Im pairs)."""
    mats = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        mats.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1.0
            mats.append(e)
            f = np.zeros((d, d), dtype=complex)
            f[i, j] = 1j
            f[j, i] = -1j
            mats.append(f)
    return np.array(mats)


def hermitian_coords(m) -> np.ndarray:
    """Coordinates of a Hermitian matrix in :func:`hermitian_basis`."""
    d = m.shape[0]
    out = [np.real(m[i, i]) for i in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            out.extend([np.real(m[i, j]), np.imag(m[i, j])])
    return np.array(out)


def diag_units(d: int) -> np.ndarray:
    mats = np.zeros((d, d, d), dtype=complex)
    for i in range(d):
        mats[i, i, i] = 1.0
    return mats
