"""Measurement-induced nonlocality (MIN) quantifiers.

A MIN is the largest disturbance a local projective measurement on party
``A`` can cause while leaving the marginal ``rho_A`` untouched. For a qubit
``A`` this is easy to enumerate: if ``rho_A`` has distinct eigenvalues the
only admissible measurement is its eigenbasis, and if ``rho_A = I/2`` every
direction on the Bloch sphere is admissible. All measures here follow that
rule through :class:`LocallyInvariantConstraint`; closed forms are used
where available and the sphere sweep covers the degenerate remainder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore, states
from ._sweep import (
    COARSE_SWEEP,
    DEFAULT_SWEEP,
    MeasurementSweep,
    angles,
    maximize_direction,
    minimize_direction_pair,
)
from .discord import (
    _bipartite,
    _conditional_blocks,
    _measure_residual,
    _qubit_a,
    _sandwich_terms,
    _trace_norm_batch,
    apply_measurement_a,
    lqu_matrix,
)
from .exceptions import BoundViolation, DimensionMismatch
from .results import ANALYTIC, NUMERIC, MeasureResult

DEGENERACY_TOL = 1e-8
SWEEP_TOL = 1e-6


# ---------------------------------------------------------------------------
# admissible measurements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocallyInvariantConstraint:
    """Measurements on ``A`` that leave ``rho_A`` invariant.

    Attributes
    ----------
    marginal : ndarray
        ``rho_A``.
    degenerate : bool
        True if two eigenvalues of ``rho_A`` are closer than the tolerance.
    degenerate_blocks : tuple of tuple of int
        Indices (into the descending spectrum) grouped by eigenvalue.
    eigvecs : ndarray
        Eigenvectors of ``rho_A`` as columns, descending eigenvalues.
    """

    marginal: np.ndarray
    degenerate: bool
    degenerate_blocks: tuple
    eigvals: np.ndarray
    eigvecs: np.ndarray

    @classmethod
    def of(cls, rho, dims, tol: float = DEGENERACY_TOL) -> LocallyInvariantConstraint:
        ra = qcore.partial_trace(rho, dims, keep="A")
        w, v = qcore.hermitian_eig(ra)
        blocks = [[0]]
        for k in range(1, len(w)):
            if abs(w[k] - w[blocks[-1][-1]]) < tol:
                blocks[-1].append(k)
            else:
                blocks.append([k])
        return cls(ra, any(len(b) > 1 for b in blocks), tuple(tuple(b) for b in blocks), w, v)

    def allows(self, projectors, tol: float = DEGENERACY_TOL) -> bool:
        """Whether ``sum_k P_k rho_A P_k = rho_A`` within ``tol``."""
        out = sum(p @ self.marginal @ p for p in projectors)
        return bool(np.max(np.abs(out - self.marginal)) < tol)

    def qubit_direction(self) -> np.ndarray | None:
        """Bloch direction of the forced measurement, or ``None`` when any direction is allowed."""
        if self.marginal.shape != (2, 2):
            raise DimensionMismatch("qubit_direction needs a qubit marginal")
        if self.degenerate:
            return None
        b = qcore.bloch_vector(self.marginal)
        return b / np.linalg.norm(b)


def _constraint_qubit(rho, dims):
    r, dims = _qubit_a(rho, dims)
    return r, dims, LocallyInvariantConstraint.of(r, dims)


def _direction_result(value, n, method, tol, **extras):
    th, ph = angles(n)
    return MeasureResult(float(max(value, 0.0)), witness={"theta": th, "phi": ph, "n": np.asarray(n)},
                         method=method, tol=tol, extras=extras)


def _maximize_admissible(obj_batch, con, sweep, exact_tol=1e-10, **extras):
    """Evaluate at the forced direction, or sweep the sphere when ``rho_A`` is degenerate."""
    n = con.qubit_direction()
    if n is not None:
        return _direction_result(float(obj_batch(n[None, :])[0]), n, NUMERIC, exact_tol, **extras)
    val, n = maximize_direction(obj_batch, sweep)
    return _direction_result(val, n, NUMERIC, SWEEP_TOL, **extras)


def _schmidt_or_none(r, dims):
    psi = qcore.pure_state_of(r, tol=1e-12)
    if psi is None:
        return None
    return qcore.schmidt_coefficients(psi, dims) ** 2


# ---------------------------------------------------------------------------
# Hilbert-Schmidt MIN
# ---------------------------------------------------------------------------

def _hs_objective(r, dims):
    K = _sandwich_terms(r, dims[1])

    def f(ns):
        return np.sum(np.abs(_measure_residual(K, r, ns)) ** 2, axis=(1, 2))

    return f


def hs_min_at(rho, n, dims=None) -> float:
    """``||rho - Pi_n(rho)||_2^2`` for the qubit measurement along ``n``."""
    r, dims = _qubit_a(rho, dims)
    return float(_hs_objective(r, dims)(np.asarray(n, dtype=float)[None, :])[0])


def hs_min(rho, dims=None) -> MeasureResult:
    """Hilbert-Schmidt MIN ``N_G = max_Pi ||rho - Pi^A(rho)||_2^2`` for a qubit ``A``.

    With ``rho = sum r_ij X_i (x) Y_j`` in orthonormal operator bases, ``R``
    the block ``i, j >= 1`` and ``x_i = r_i0``, the value is
    ``|R|^2 - x^T R R^T x / |x|^2``, or ``|R|^2 - lambda_min(R R^T)`` when
    ``rho_A`` is maximally mixed.
    """
    r, dims, con = _constraint_qubit(rho, dims)
    c = qcore.correlation_tensor(r, dims)
    R = c[1:, 1:]
    RR = R @ R.T
    total = float(np.sum(R * R))
    n = con.qubit_direction()
    if n is None:
        w, v = np.linalg.eigh(RR)
        n = v[:, 0]
        value = total - w[0]
    else:
        value = total - float(n @ RR @ n)
    return _direction_result(value, n, ANALYTIC, 1e-10)


def hs_min_pure(schmidt) -> float:
    """``1 - sum_k lambda_k^2`` for Schmidt probabilities ``lambda_k``."""
    lam = np.asarray(schmidt, dtype=float)
    return float(1.0 - np.sum(lam ** 2))


def hs_min_werner(x: float, d: int) -> float:
    return float((d * x - 1.0) ** 2 / (d * (d + 1) * (d * d - 1)))


def hs_min_isotropic(x: float, d: int) -> float:
    return float((d * d * x - 1.0) ** 2 / (d * (d + 1) * (d * d - 1)))


def hs_min_upper_bound(rho, dims=None) -> float:
    """Sum of the ``d_A^2 - d_A`` largest eigenvalues of ``R R^T``."""
    r, dims = _bipartite(rho, dims)
    c = qcore.correlation_tensor(r, dims)
    R = c[1:, 1:]
    ev = np.sort(np.linalg.eigvalsh(R @ R.T))[::-1]
    return float(np.sum(ev[: dims[0] ** 2 - dims[0]]))


def hs_min_is_zero(rho, dims, tol: float = DEGENERACY_TOL) -> bool:
    """Nullity test for ``N_G`` from the block structure of ``rho``.

    Writing ``rho = sum_ij A_ij (x) |i><j|``, ``N_G`` vanishes exactly when
    the ``A_ij`` are mutually commuting normal operators and each eigenspace
    of ``rho_A`` lies inside an eigenspace of every ``A_ij``. The second
    clause is checked as: every ``A_ij`` is block diagonal and scalar on the
    eigenspaces of ``rho_A`` (eigenvalues grouped at ``tol``).
    """
    r, dims = _bipartite(rho, dims)
    da, db = dims
    t = r.reshape(da, db, da, db)
    blocks = [t[:, i, :, j] for i in range(db) for j in range(db)]
    for a in blocks:
        if np.max(np.abs(a @ a.conj().T - a.conj().T @ a)) > tol:
            return False
    for k, a in enumerate(blocks):
        for b in blocks[k + 1:]:
            if np.max(np.abs(a @ b - b @ a)) > tol:
                return False
    con = LocallyInvariantConstraint.of(r, dims, tol)
    projs = [con.eigvecs[:, list(b)] for b in con.degenerate_blocks]
    for a in blocks:
        for p in projs:
            sub = p.conj().T @ a @ p
            if np.max(np.abs(sub - np.trace(sub) / sub.shape[0] * np.eye(sub.shape[0]))) > tol:
                return False
            for q in projs:
                if q is not p and np.max(np.abs(q.conj().T @ a @ p)) > tol:
                    return False
    return True


# ---------------------------------------------------------------------------
# trace-norm MIN
# ---------------------------------------------------------------------------

def _trace_objective(r, dims):
    K = _sandwich_terms(r, dims[1])

    def f(ns):
        return _trace_norm_batch(_measure_residual(K, r, ns))

    return f


def trace_min_at(rho, n, dims=None) -> float:
    """``||rho - Pi_n(rho)||_1`` for the qubit measurement along ``n``."""
    r, dims = _qubit_a(rho, dims)
    return float(_trace_objective(r, dims)(np.asarray(n, dtype=float)[None, :])[0])


def trace_min_diagonal(x, c) -> float:
    """Closed form for two-qubit states with diagonal correlations.

    ``x`` is the Bloch vector of ``rho_A`` and ``c`` the diagonal of the
    correlation matrix, both in the Pauli normalization
    ``rho = (I + x.sigma (x) I + ... + sum c_i sigma_i (x) sigma_i)/4``.
    The marginal of ``B`` does not enter. Internally the coefficients are
    taken in orthonormal operator bases (``r = c/2``, ``x -> x/2``) and

        N_T = (sqrt(chi_+) + sqrt(chi_-)) / |x|,
        chi_pm = alpha +- 2 sqrt(beta) |x|,
        alpha = |r|^2 |x|^2 - sum_i r_i^2 x_i^2,
        beta = sum_cyclic x_i^2 r_j^2 r_k^2,

    which equals the largest singular value of ``(I - x x^T/|x|^2) diag(c)``.
    """
    xo = np.asarray(x, dtype=float) / 2.0
    r = np.asarray(c, dtype=float) / 2.0
    nx = float(np.linalg.norm(xo))
    if nx < DEGENERACY_TOL:
        return float(2.0 * np.max(np.abs(r)))
    alpha = float(r @ r * nx * nx - np.sum(r ** 2 * xo ** 2))
    beta = sum(xo[i] ** 2 * r[j] ** 2 * r[k] ** 2 for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)))
    root = 2.0 * np.sqrt(beta) * nx
    chi_p = alpha + root
    chi_m = max(alpha - root, 0.0)
    return float((np.sqrt(chi_p) + np.sqrt(chi_m)) / nx)


def trace_min_pure(schmidt) -> float:
    """``2 sqrt(lambda_1 lambda_2)`` for a ``2 x n`` pure state with Schmidt probabilities ``lambda``."""
    lam = np.asarray(schmidt, dtype=float)
    lam = np.concatenate([lam, np.zeros(max(0, 2 - lam.size))])
    return float(2.0 * np.sqrt(max(lam[0] * lam[1], 0.0)))


def trace_min_werner(x: float, d: int) -> float:
    return float(abs(d * x - 1.0) / (d + 1))


def trace_min_isotropic(x: float, d: int) -> float:
    return float(2.0 * abs(d * d * x - 1.0) / (d * (d + 1)))


def trace_min(rho, dims=None, method: str = "auto",
              sweep: MeasurementSweep = DEFAULT_SWEEP) -> MeasureResult:
    """Trace-norm MIN ``N_T = max_Pi ||rho - Pi^A(rho)||_1`` for a qubit ``A``.

    ``method='auto'`` uses the pure-state form and the two-qubit closed form
    for diagonal correlation matrices when they apply. Otherwise the
    measurement is forced to the eigenbasis of ``rho_A`` or, for a
    maximally mixed ``rho_A``, found by a sphere sweep.
    """
    r, dims, con = _constraint_qubit(rho, dims)
    if method not in ("auto", "numeric"):
        raise ValueError("method must be 'auto' or 'numeric'")
    if method == "auto":
        lam = _schmidt_or_none(r, dims)
        if lam is not None:
            return MeasureResult(trace_min_pure(lam), method=ANALYTIC, tol=1e-10)
        if dims == (2, 2):
            b = qcore.bloch_decompose_2q(r)
            if np.max(np.abs(b.R - np.diag(np.diag(b.R)))) < 1e-12:
                return MeasureResult(trace_min_diagonal(b.x, np.diag(b.R)), method=ANALYTIC, tol=1e-9)
    return _maximize_admissible(_trace_objective(r, dims), con, sweep)


# ---------------------------------------------------------------------------
# Bures MIN
# ---------------------------------------------------------------------------

def bures_min_terms(p) -> dict:
    """The ``t_0, t_i, b_i`` coefficients of ``sqrt(rho)`` for a Bell-diagonal triple."""
    bp = states._as_bell(p)
    bp.validate()
    c = bp.c
    cs = float(np.sum(c))
    s0 = np.sqrt(max(1.0 - cs, 0.0))
    sk = np.sqrt(np.clip(1.0 + cs - 2.0 * c, 0.0, None))
    t0 = (s0 + np.sum(sk)) / 8.0
    t = -s0 / 8.0 + np.sum(sk) / 8.0 - sk / 4.0
    b = 8.0 * (t0 ** 2 + t ** 2) - 1.0
    return {"t0": float(t0), "t": t, "b": b}


# Bell pairs exchanged by sigma_k (x) I, in the eigenvalue order of BellDiagonalParams
_BELL_PAIRS = {0: ((1, 2), (0, 3)), 1: ((1, 3), (0, 2)), 2: ((0, 1), (2, 3))}


def bures_fidelity_axes_bell(p) -> np.ndarray:
    """Uhlmann fidelity ``F(rho, Pi_k rho)`` for measurements along the three axes.

    ``sigma_k (x) I`` swaps Bell states in pairs, so ``Pi_k rho`` is the pair
    average of the eigenvalues and ``sqrt F = sum_pairs sqrt((a+b)/2)(sqrt a + sqrt b)``.
    """
    bp = states._as_bell(p)
    bp.validate()
    lam = np.clip(bp.eigenvalues, 0.0, None)
    out = np.empty(3)
    for k, pairs in _BELL_PAIRS.items():
        root = sum(np.sqrt((lam[a] + lam[b]) / 2.0) * (np.sqrt(lam[a]) + np.sqrt(lam[b])) for a, b in pairs)
        out[k] = root * root
    return out


def bures_min_bell_branch(p) -> float:
    """``(1 + min_i |b_i|)/2`` from the ``t``-coefficients of ``sqrt(rho)``.

    This equals ``min_n tr[sqrt(rho) Pi_n(sqrt(rho))]`` (an affinity), which
    bounds the Uhlmann minimum from above but differs from it in general.
    """
    b = bures_min_terms(p)["b"]
    return float(0.5 * (1.0 + np.min(np.abs(b))))


def bures_min_bell(p) -> MeasureResult:
    """Bures MIN ``1 - sqrt(F_min)`` of a Bell-diagonal state.

    ``F_min`` is the smallest Uhlmann fidelity between the state and its
    image under a qubit measurement on ``A``. It is attained on a coordinate
    axis and evaluated in closed form by :func:`bures_fidelity_axes_bell`.
    The affinity value of :func:`bures_min_bell_branch` is reported in
    ``extras["F_branch"]`` for comparison.
    """
    terms = bures_min_terms(p)
    fk = bures_fidelity_axes_bell(p)
    k = int(np.argmin(fk))
    f_min = float(min(fk[k], 1.0))
    return _direction_result(1.0 - np.sqrt(f_min), np.eye(3)[k], ANALYTIC, 1e-10, F_min=f_min,
                             F_branch=bures_min_bell_branch(p), **terms)


def bures_fidelity_sweep(rho, dims=None, sweep: MeasurementSweep = DEFAULT_SWEEP):
    """Oracle: ``(min F(rho, Pi_n rho), n)`` over admissible directions by direct evaluation."""
    r, dims, con = _constraint_qubit(rho, dims)

    def f(ns):
        return np.array([1.0 - qcore.fidelity(r, apply_measurement_a(r, n, dims)) for n in ns])

    n = con.qubit_direction()
    if n is not None:
        return 1.0 - float(f(n[None, :])[0]), n
    val, n = maximize_direction(f, sweep)
    return 1.0 - val, n


def bures_min(rho, dims=None, sweep: MeasurementSweep = COARSE_SWEEP) -> MeasureResult:
    """Bures MIN for a general ``2 x n`` state (closed form when Bell-diagonal).

    The fidelity is evaluated one direction at a time, hence the coarser
    default grid for the degenerate-marginal sweep.
    """
    r, dims, con = _constraint_qubit(rho, dims)
    if dims == (2, 2):
        p = states.is_bell_diagonal(r)
        if p is not None:
            return bures_min_bell(p)

    def neg_fid(ns):
        return np.array([1.0 - np.sqrt(qcore.fidelity(r, apply_measurement_a(r, n, dims))) for n in ns])

    return _maximize_admissible(neg_fid, con, sweep)


# ---------------------------------------------------------------------------
# relative-entropy MIN
# ---------------------------------------------------------------------------

def _post_entropy_objective(r, dims):
    nb = dims[1]
    B = _conditional_blocks(r, nb)

    def f(ns):
        # Pi_n(rho) = sum_pm P_pm (x) (B0 +- n.B)/2 : entropy from the two conditional blocks
        nB = np.einsum("ni,ixy->nxy", ns, B[1:])
        ent = np.zeros(len(ns))
        for sgn in (1.0, -1.0):
            w = np.linalg.eigvalsh(0.5 * (B[0][None] + sgn * nB))
            w = np.clip(w, 0.0, None)
            nz = w > 0
            ent -= np.where(nz, w * np.log2(np.where(nz, w, 1.0)), 0.0).sum(axis=1)
        return ent

    return f


def rel_entropy_min_bell(p) -> float:
    """Closed form ``1 + H((1 + c_-)/2) - S(rho)`` with ``c_- = min_i |c_i|``."""
    bp = states._as_bell(p)
    bp.validate()
    cm = float(np.min(np.abs(bp.c)))
    lam = np.clip(bp.eigenvalues, 0.0, None)
    nz = lam > 0
    return float(1.0 + qcore.binary_entropy((1.0 + cm) / 2.0) + np.sum(lam[nz] * np.log2(lam[nz])))


def rel_entropy_min_bounds(rho, dims) -> tuple:
    """``(-S(A|B), min{I(rho), S(rho_A)})``."""
    s = qcore.von_neumann_entropy(rho)
    sa = qcore.von_neumann_entropy(qcore.partial_trace(rho, dims, keep="A"))
    sb = qcore.von_neumann_entropy(qcore.partial_trace(rho, dims, keep="B"))
    return -(s - sb), min(sa + sb - s, sa)


def rel_entropy_min(rho, dims=None, sweep: MeasurementSweep = DEFAULT_SWEEP,
                    bound_tol: float = 1e-6) -> MeasureResult:
    """Relative-entropy MIN ``N_R = max_Pi S(rho || Pi^A rho) = max_Pi S(Pi^A rho) - S(rho)``.

    The maximum runs over admissible measurements. For Bell-diagonal input
    the closed form is checked against the optimized value and returned.

    Raises
    ------
    BoundViolation
        If the result leaves ``[-S(A|B), min{I, S(rho_A)}]`` or disagrees
        with the Bell-diagonal closed form.
    """
    r, dims, con = _constraint_qubit(rho, dims)
    s = qcore.von_neumann_entropy(r)
    f = _post_entropy_objective(r, dims)
    res = _maximize_admissible(lambda ns: f(ns) - s, con, sweep)
    value, method, tol = res.value, res.method, res.tol
    if dims == (2, 2):
        p = states.is_bell_diagonal(r)
        if p is not None:
            closed = rel_entropy_min_bell(p)
            if abs(closed - value) > 1e-6:
                raise BoundViolation(f"Bell-diagonal closed form {closed} differs from optimum {value}")
            value, method, tol = max(closed, 0.0), ANALYTIC, 1e-10
    lo, hi = rel_entropy_min_bounds(r, dims)
    if value < lo - bound_tol or value > hi + bound_tol:
        raise BoundViolation(f"N_R={value} outside [{lo}, {hi}]")
    return MeasureResult(float(value), witness=res.witness, method=method, tol=tol,
                         extras={"lower": lo, "upper": hi})


# ---------------------------------------------------------------------------
# skew-information MIN and uncertainty-induced nonlocality
# ---------------------------------------------------------------------------

def _sqrt_gamma(r, dims):
    return qcore.correlation_tensor(qcore.matrix_sqrt(r), dims)


def skew_min_upper_bound(rho, dims=None) -> float:
    """``1 - sum_{i < d_A} mu_i`` with ``mu`` the descending spectrum of ``Gamma Gamma^T``."""
    r, dims = _bipartite(rho, dims)
    g = _sqrt_gamma(r, dims)
    mu = np.sort(np.linalg.eigvalsh(g @ g.T))[::-1]
    return float(1.0 - np.sum(mu[: dims[0] - 1]))


def skew_min_at(rho, n, dims=None) -> float:
    """``sum_pm I(rho, P_pm (x) I)`` for the projectors ``P_pm = (I +- n.sigma)/2``."""
    r, dims = _qubit_a(rho, dims)
    n = np.asarray(n, dtype=float)
    P = 0.5 * (qcore.I2 + qcore.sigma_dot(n))
    return _skew_sum_projectors(r, dims, [P, qcore.I2 - P])


def _skew_sum_projectors(r, dims, projs):
    sq = qcore.matrix_sqrt(r)
    total = 0.0
    for p in projs:
        K = np.kron(p, np.eye(dims[1]))
        c = sq @ K - K @ sq
        total -= 0.5 * np.real(np.trace(c @ c))
    return float(total)


def skew_min(rho, dims=None, bound_tol: float = 1e-9) -> MeasureResult:
    """Skew-information MIN ``N_SI`` for a qubit ``A``.

    For a measurement along ``n`` the skew-information sum equals
    ``1 - gamma_00^2 - n^T G n`` with ``Gamma`` the coefficient matrix of
    ``sqrt(rho)`` in orthonormal operator bases and ``G`` its ``A``-Bloch
    block ``(Gamma Gamma^T)_{ij}, i, j >= 1``. The admissible direction is
    the Bloch direction of ``rho_A``; for a maximally mixed marginal the
    smallest eigenvector of ``G`` is optimal.
    """
    r, dims, con = _constraint_qubit(rho, dims)
    g = _sqrt_gamma(r, dims)
    GG = g @ g.T
    g00 = float(GG[0, 0])
    G = GG[1:, 1:]
    n = con.qubit_direction()
    if n is None:
        w, v = np.linalg.eigh(G)
        n = v[:, 0]
        value = 1.0 - g00 - w[0]
    else:
        value = 1.0 - g00 - float(n @ G @ n)
    ub = skew_min_upper_bound(r, dims)
    if value > ub + bound_tol:
        raise BoundViolation(f"N_SI={value} exceeds its upper bound {ub}")
    return _direction_result(value, n, ANALYTIC, 1e-10, upper_bound=ub)


def skew_min_werner(x: float, d: int) -> float:
    return float(0.5 * ((d - x) / (d + 1) - np.sqrt((d - 1) / (d + 1) * (1.0 - x * x))))


def skew_min_isotropic(x: float, d: int) -> float:
    return float((np.sqrt((d - 1) * x) - np.sqrt((1.0 - x) / (d + 1))) ** 2 / d)


def uin(rho, dims=None) -> MeasureResult:
    """Uncertainty-induced nonlocality ``U_SI = max_K I(rho, K (x) I)`` for a qubit ``A``.

    ``K = n.sigma`` ranges over observables commuting with ``rho_A``; the
    value is ``1 - n^T W n`` with ``W_ij = tr[sqrt(rho) (sigma_i (x) I)
    sqrt(rho) (sigma_j (x) I)]``, or ``1 - lambda_min(W)`` when ``rho_A`` is
    maximally mixed.
    """
    r, dims, con = _constraint_qubit(rho, dims)
    W = lqu_matrix(r, dims)
    n = con.qubit_direction()
    if n is None:
        w, v = np.linalg.eigh(W)
        n = v[:, 0]
        value = 1.0 - w[0]
    else:
        value = 1.0 - float(n @ W @ n)
    return _direction_result(value, n, ANALYTIC, 1e-10)


def uin_at(rho, n, dims=None) -> float:
    """``I(rho, n.sigma (x) I)`` evaluated directly."""
    r, dims = _qubit_a(rho, dims)
    sq = qcore.matrix_sqrt(r)
    K = np.kron(qcore.sigma_dot(n), np.eye(dims[1]))
    c = sq @ K - K @ sq
    return float(-0.5 * np.real(np.trace(c @ c)))


# ---------------------------------------------------------------------------
# symmetric (two-sided) HS MIN
# ---------------------------------------------------------------------------

def _two_sided_residual_norm(r, na, nb):
    """``||rho - (Pi_a (x) Pi_b)(rho)||_2^2`` for batches of directions (two qubits).

    ``Pi_a (x) Pi_b`` is an orthogonal projection in Hilbert-Schmidt space, so
    the residual is ``||rho||^2 - ||Pi rho||^2`` and only the Bloch components
    along ``na``, ``nb`` and ``na (x) nb`` survive the measurement.
    """
    b = qcore.bloch_decompose_2q(r)
    kept = 1.0 + (na @ b.x) ** 2 + (nb @ b.y) ** 2 + np.einsum("ni,ij,nj->n", na, b.R, nb) ** 2
    return qcore.purity(r) - kept / 4.0


def hs_min_two_sided(rho, n_theta: int = 16, n_phi: int = 32) -> MeasureResult:
    """Symmetric HS MIN ``max ||rho - Pi^A (x) Pi^B(rho)||_2^2`` for two qubits (numeric).

    Each side is forced to its marginal eigenbasis unless that marginal is
    maximally mixed, in which case its direction is optimized.
    """
    r = qcore.validate_density(rho)
    if r.shape != (4, 4):
        raise DimensionMismatch("two-sided MIN is implemented for two qubits")
    ca = LocallyInvariantConstraint.of(r, (2, 2))
    cb = LocallyInvariantConstraint.of(qcore.swap_subsystems(r, (2, 2)), (2, 2))
    na, nb = ca.qubit_direction(), cb.qubit_direction()
    if na is not None and nb is not None:
        val = float(_two_sided_residual_norm(r, na[None], nb[None])[0])
        return MeasureResult(val, witness={"nA": na, "nB": nb}, method=NUMERIC, tol=1e-10)
    if na is not None or nb is not None:
        fixed = na if na is not None else nb

        def f(ns):
            fx = np.broadcast_to(fixed, ns.shape)
            return _two_sided_residual_norm(r, fx, ns) if na is not None else _two_sided_residual_norm(r, ns, fx)

        val, n = maximize_direction(f, DEFAULT_SWEEP)
        wa, wb = (na, n) if na is not None else (n, nb)
        return MeasureResult(float(val), witness={"nA": wa, "nB": wb}, method=NUMERIC, tol=SWEEP_TOL)
    val, (wa, wb) = minimize_direction_pair(lambda a, b: -_two_sided_residual_norm(r, a, b), n_theta, n_phi)
    return MeasureResult(float(-val), witness={"nA": wa, "nB": wb}, method=NUMERIC, tol=SWEEP_TOL)
