"""Geometric and entropic discord quantifiers for bipartite states.

Most measures here optimize over projective measurements on a qubit
subsystem ``A`` (``2 x n`` states). Closed forms are used where they exist
(Bell-diagonal, X-states, pure states, the Bloch-tensor formula of the
Hilbert-Schmidt discord); everything else goes through the batched sphere
sweep in :mod:`qcohere._sweep`, which also serves as the oracle for the
closed forms in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from . import qcore, states
from ._sweep import (
    DEFAULT_SWEEP,
    MeasurementSweep,
    angles,
    maximize_direction,
    minimize_direction,
    minimize_direction_pair,
)
from .exceptions import (
    BoundViolation,
    DimensionMismatch,
    NotBellDiagonal,
    ParamOutOfRange,
    ValidationError,
)
from .results import ANALYTIC, NUMERIC, MeasureResult

SWEEP_TOL = 1e-6
PAULI4 = np.array([qcore.I2, qcore.SIGMA_X, qcore.SIGMA_Y, qcore.SIGMA_Z])
PAULI3 = PAULI4[1:]


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _bipartite(rho, dims=None):
    r = qcore.validate_density(rho)
    n = r.shape[0]
    if dims is None:
        if n % 2:
            raise DimensionMismatch("default split needs an even dimension; pass dims")
        dims = (2, n // 2)
    dims = (int(dims[0]), int(dims[1]))
    if dims[0] * dims[1] != n:
        raise DimensionMismatch(f"dims {dims} do not match matrix size {n}")
    return r, dims


def _qubit_a(rho, dims=None):
    r, dims = _bipartite(rho, dims)
    if dims[0] != 2:
        raise DimensionMismatch("this quantity needs a qubit on the measured side A")
    return r, dims


def _measured_side(rho, dims, side):
    """Return the state reordered so that the measured party comes first."""
    r, dims = _bipartite(rho, dims)
    side = side.upper()
    if side == "B":
        r = qcore.swap_subsystems(r, dims)
        dims = (dims[1], dims[0])
    elif side != "A":
        raise ValueError("side must be 'A' or 'B'")
    if dims[0] != 2:
        raise DimensionMismatch("the measured party must be a qubit")
    return r, dims


def _xlogx_sum(w):
    w = np.clip(w, 0.0, None)
    out = np.zeros_like(w)
    nz = w > 0
    out[nz] = w[nz] * np.log2(w[nz])
    return out.sum(axis=-1)


def _conditional_blocks(r, nb):
    """``B_mu = tr_A[(sigma_mu (x) I) rho]`` for ``mu = 0..3``."""
    t = r.reshape(2, nb, 2, nb)
    return np.einsum("mba,axby->mxy", PAULI4, t)


def _sandwich_terms(r, nb):
    """``K_ij = (sigma_i (x) I) rho (sigma_j (x) I)`` for ``i, j = 1..3``."""
    ops = np.array([np.kron(s, np.eye(nb)) for s in PAULI3])
    return np.einsum("iab,bc,jcd->ijad", ops, r, ops)


def _measure_residual(K, r, ns):
    """``rho - Pi_n(rho) = (rho - S rho S)/2`` for a batch of directions."""
    srs = np.einsum("ni,nj,ijab->nab", ns, ns, K)
    return 0.5 * (r[None] - srs)


def _qubit_projectors(n):
    s = qcore.sigma_dot(n)
    return 0.5 * (qcore.I2 + s), 0.5 * (qcore.I2 - s)


def apply_measurement_a(rho, n, dims):
    """``Pi^A(rho)`` for the qubit measurement along ``n`` on party A."""
    nb = dims[1]
    out = np.zeros_like(rho)
    for p in _qubit_projectors(n):
        m = np.kron(p, np.eye(nb))
        out = out + m @ rho @ m
    return out


def _sweep_result(value, n, tol=SWEEP_TOL, **extras):
    th, ph = angles(n)
    return MeasureResult(float(max(value, 0.0)), witness={"theta": th, "phi": ph, "n": np.asarray(n)},
                         method=NUMERIC, tol=tol, extras=extras)


def intermediate(values) -> float:
    """Median of three absolute values (the ``int{.}`` of the Bell-diagonal formulas)."""
    return float(np.sort(np.abs(np.asarray(values, dtype=float)))[1])


def negativity(rho, dims=(2, 2)) -> float:
    """Entanglement negativity ``(||rho^{T_A}||_1 - 1)/2``."""
    r = qcore.validate_density(rho)
    return qcore.negativity(r, dims)


def _bell_or_raise(rho) -> states.BellDiagonalParams:
    r = qcore.validate_density(rho)
    if r.shape != (4, 4):
        raise NotBellDiagonal("Bell-diagonal formulas need a two-qubit state")
    p = states.is_bell_diagonal(r)
    if p is None:
        raise NotBellDiagonal("state is not Bell-diagonal")
    return p


# ---------------------------------------------------------------------------
# entropic discord and quantum deficits
# ---------------------------------------------------------------------------

def _cond_entropy_batch(B, ns):
    """``sum_k p_k S(rho_B|k)`` for measurement directions ``ns`` (bits)."""
    m = np.einsum("ni,ixy->nxy", ns, B[1:])
    total = np.zeros(len(ns))
    for sign in (1.0, -1.0):
        blk = 0.5 * (B[0][None] + sign * m)
        w = np.linalg.eigvalsh(blk)
        p = np.clip(np.sum(w, axis=-1), 0.0, None)
        # p S(blk/p) = -sum w log w + p log p
        total += -_xlogx_sum(w) + np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return total


def entropic_discord_bell(p) -> float:
    """Closed form for Bell-diagonal states: ``2 + sum l log2 l - 1 + H_2((1 + max|c_i|)/2)``."""
    bp = states._as_bell(p).validate()
    lam = np.clip(bp.eigenvalues, 0.0, None)
    c = float(np.max(np.abs(bp.c)))
    mutual = 2.0 + float(np.sum(np.where(lam > 0, lam * np.log2(np.where(lam > 0, lam, 1.0)), 0.0)))
    classical = 1.0 - qcore.binary_entropy(min((1.0 + c) / 2.0, 1.0))
    return max(mutual - classical, 0.0)


def entropic_discord_2q(rho, side: str = "A", sweep: MeasurementSweep = DEFAULT_SWEEP,
                        dims=None, method: str = "numeric") -> MeasureResult:
    """Entropic quantum discord with projective measurements on a qubit party.

    ``D = min_Pi sum_k p_k S(rho_{B|k}) - S(rho) + S(rho_A)`` where ``A`` is
    the measured party selected by ``side``. With ``method="auto"``
    Bell-diagonal inputs use :func:`entropic_discord_bell`.
    """
    if method not in ("auto", "numeric"):
        raise ValidationError("method must be 'auto' or 'numeric'")
    if method == "auto":
        r0 = qcore.validate_density(rho)
        if r0.shape == (4, 4):
            p = states.is_bell_diagonal(r0)
            if p is not None:
                return MeasureResult(entropic_discord_bell(p), method=ANALYTIC, tol=1e-12)
    r, dims = _measured_side(rho, dims, side)
    nb = dims[1]
    B = _conditional_blocks(r, nb)
    s_ab = qcore.von_neumann_entropy(r)
    s_a = qcore.von_neumann_entropy(qcore.partial_trace(r, dims, "A"))
    val, n = minimize_direction(lambda ns: _cond_entropy_batch(B, ns), sweep)
    return _sweep_result(val - s_ab + s_a, n)


def one_way_deficit(rho, sweep: MeasurementSweep = DEFAULT_SWEEP, dims=None) -> MeasureResult:
    """One-way quantum deficit ``min_Pi S(Pi^A rho) - S(rho)`` (qubit measured side A)."""
    r, dims = _qubit_a(rho, dims)
    B = _conditional_blocks(r, dims[1])
    s_ab = qcore.von_neumann_entropy(r)

    def f(ns):
        # S(Pi rho) = H(p) + sum_k p_k S(rho_B|k) = -sum over all block eigenvalues w log w
        m = np.einsum("ni,ixy->nxy", ns, B[1:])
        tot = np.zeros(len(ns))
        for sign in (1.0, -1.0):
            tot -= _xlogx_sum(np.linalg.eigvalsh(0.5 * (B[0][None] + sign * m)))
        return tot

    val, n = minimize_direction(f, sweep)
    return _sweep_result(val - s_ab, n)


def zero_way_deficit(rho) -> MeasureResult:
    """Zero-way deficit ``min_{Pi^A (x) Pi^B} S(Pi rho) - S(rho)`` for two qubits."""
    r = qcore.validate_density(rho)
    if r.shape != (4, 4):
        raise DimensionMismatch("zero-way deficit is implemented for two-qubit states")
    b = qcore.bloch_decompose_2q(r)
    s_ab = qcore.von_neumann_entropy(r)

    def f(na, nb):
        xa = na @ b.x
        yb = nb @ b.y
        rab = np.einsum("ni,ij,nj->n", na, b.R, nb)
        tot = np.zeros(len(na))
        for s in (1.0, -1.0):
            for t in (1.0, -1.0):
                p = 0.25 * (1.0 + s * xa + t * yb + s * t * rab)
                p = np.clip(p, 0.0, None)
                tot -= np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        return tot

    val, (na, nb) = minimize_direction_pair(f)
    ta, pa = angles(na)
    tb, pb = angles(nb)
    return MeasureResult(float(max(val - s_ab, 0.0)),
                         witness={"theta_A": ta, "phi_A": pa, "theta_B": tb, "phi_B": pb},
                         method=NUMERIC, tol=SWEEP_TOL)


def q_discord(rho, q: float, sweep: MeasurementSweep = DEFAULT_SWEEP, dims=None) -> MeasureResult:
    """Tsallis q-discord ``min_Pi S_q(Pi^A rho) - S_q(rho)``."""
    if not q > 0 or q == 1:
        raise ParamOutOfRange("q must be positive and different from 1")
    r, dims = _qubit_a(rho, dims)
    B = _conditional_blocks(r, dims[1])
    sq_rho = qcore.tsallis_entropy(r, q)

    def f(ns):
        m = np.einsum("ni,ixy->nxy", ns, B[1:])
        tr_q = np.zeros(len(ns))
        for sign in (1.0, -1.0):
            w = np.clip(np.linalg.eigvalsh(0.5 * (B[0][None] + sign * m)), 0.0, None)
            tr_q += np.sum(np.where(w > 0, w, 0.0) ** q, axis=-1)
        return (1.0 - tr_q) / (q - 1.0)

    val, n = minimize_direction(f, sweep)
    return _sweep_result(val - sq_rho, n)


# ---------------------------------------------------------------------------
# Hilbert-Schmidt discord
# ---------------------------------------------------------------------------

def _hs_matrix(r, dims):
    """``G G^T`` with ``G_ij = tr[rho (sigma_i/sqrt2 (x) Y_j)]``, i = 1..3, all j."""
    c = qcore.correlation_tensor(r, dims)
    g = c[1:, :]
    return g @ g.T


def hs_discord_qubit_qutrit(rho) -> float:
    """Closed form ``|x|^2/6 + |R|^2/4 - k_max`` for a qubit-qutrit state.

    ``x_i = tr rho(sigma_i (x) I_3)``, ``r_ij = tr rho(sigma_i (x) lambda_j)`` with
    Gell-Mann ``lambda_j`` and ``K = x x^T/6 + R R^T/4``.
    """
    r = qcore.validate_density(rho)
    if r.shape != (6, 6):
        raise DimensionMismatch("qubit-qutrit formula needs a 6x6 state")
    gm = qcore.gell_mann(3)
    x = np.array([np.real(np.trace(r @ np.kron(s, np.eye(3)))) for s in PAULI3])
    R = np.array([[np.real(np.trace(r @ np.kron(s, l))) for l in gm] for s in PAULI3])
    K = np.outer(x, x) / 6.0 + R @ R.T / 4.0
    return float(x @ x / 6.0 + np.sum(R * R) / 4.0 - np.linalg.eigvalsh(K)[-1])


def hs_discord_two_qubit(rho) -> float:
    """``(|x|^2 + |R|^2 - k_max)/4`` with ``K = x x^T + R R^T``."""
    r = qcore.validate_density(rho)
    if r.shape != (4, 4):
        raise DimensionMismatch("two-qubit formula needs a 4x4 state")
    b = qcore.bloch_decompose_2q(r)
    K = np.outer(b.x, b.x) + b.R @ b.R.T
    return float((b.x @ b.x + np.sum(b.R * b.R) - np.linalg.eigvalsh(K)[-1]) / 4.0)


def hs_discord_lower_bound(rho, dims) -> float:
    """``sum`` of all but the ``d_A`` largest eigenvalues of ``C C^T``.

    ``C`` is the full coefficient matrix of ``rho`` in orthonormal local
    operator bases (identity components included).
    """
    r, dims = _bipartite(rho, dims)
    c = qcore.correlation_tensor(r, dims)
    ev = np.sort(np.linalg.eigvalsh(c @ c.T))[::-1]
    return float(np.sum(ev[dims[0]:]))


def hs_sweep(rho, dims=None, sweep: MeasurementSweep = DEFAULT_SWEEP) -> MeasureResult:
    """Oracle: ``min_Pi ||rho - Pi^A rho||_2^2`` by direction sweep (qubit A)."""
    r, dims = _qubit_a(rho, dims)
    K = _sandwich_terms(r, dims[1])
    val, n = minimize_direction(lambda ns: np.sum(np.abs(_measure_residual(K, r, ns)) ** 2, axis=(1, 2)),
                                sweep)
    return _sweep_result(val, n)


def _unitary_from_params(p, d):
    h = np.zeros((d, d), dtype=complex)
    iu = np.triu_indices(d, 1)
    k = len(iu[0])
    h[iu] = p[:k] + 1j * p[k:2 * k]
    h = h + h.conj().T
    h[np.diag_indices(d)] = p[2 * k:]
    return expm(1j * h)


def _local_basis_search(objective, d, starts=8, seed=0):
    """Minimize ``objective(U)`` over unitaries ``U`` on a ``d``-level system."""
    rng = qcore.make_rng(seed)
    npar = d * d
    best = (np.inf, np.eye(d))
    for s in range(starts):
        p0 = np.zeros(npar) if s == 0 else rng.normal(scale=1.0, size=npar)
        res = minimize(lambda p: objective(_unitary_from_params(p, d)), p0, method="BFGS",
                       options={"gtol": 1e-10, "maxiter": 2000})
        if res.fun < best[0]:
            best = (float(res.fun), _unitary_from_params(res.x, d))
    return best


def _dephase_a(r, dims, u):
    """``sum_k (|u_k><u_k| (x) I) rho (|u_k><u_k| (x) I)``."""
    da, db = dims
    out = np.zeros_like(r)
    for k in range(da):
        p = np.kron(np.outer(u[:, k], u[:, k].conj()), np.eye(db))
        out = out + p @ r @ p
    return out


def hs_discord(rho, dims=None) -> MeasureResult:
    """Hilbert-Schmidt geometric discord ``min_chi ||rho - chi||_2^2`` (measured side A).

    A qubit ``A`` uses ``tr(G G^T) - lambda_max(G G^T)`` (which reduces to
    the Bloch-tensor formula for two qubits and the Gell-Mann formula for a
    qutrit ``B``). For larger ``A`` the measurement basis is optimized
    numerically and the result is checked against the spectral lower bound.
    """
    r, dims = _bipartite(rho, dims)
    if dims[0] == 2:
        gg = _hs_matrix(r, dims)
        w, v = np.linalg.eigh(gg)
        value = float(np.trace(gg) - w[-1])
        n = v[:, -1]
        th, ph = angles(n)
        return MeasureResult(max(value, 0.0), witness={"theta": th, "phi": ph, "n": n},
                             method=ANALYTIC, tol=1e-10)
    purity = qcore.purity(r)
    val, u = _local_basis_search(lambda u: purity - qcore.purity(_dephase_a(r, dims, u)), dims[0])
    lb = hs_discord_lower_bound(r, dims)
    if val < lb - 1e-6:
        raise BoundViolation("numeric HS discord fell below its spectral lower bound")
    return MeasureResult(float(max(val, 0.0)), witness={"basis_A": u}, method=NUMERIC, tol=1e-6)


# ---------------------------------------------------------------------------
# trace discord
# ---------------------------------------------------------------------------

def _trace_norm_batch(m):
    return np.sum(np.abs(np.linalg.eigvalsh(m)), axis=-1)


def trace_sweep(rho, dims=None, sweep: MeasurementSweep = DEFAULT_SWEEP) -> MeasureResult:
    """Oracle: ``min_Pi ||rho - Pi^A rho||_1`` by direction sweep (qubit A)."""
    r, dims = _qubit_a(rho, dims)
    K = _sandwich_terms(r, dims[1])
    val, n = minimize_direction(lambda ns: _trace_norm_batch(_measure_residual(K, r, ns)), sweep)
    return _sweep_result(val, n)


def x_state_xi(rho) -> dict:
    """The xi quantities of the X-state trace-discord formula."""
    r = np.asarray(rho)
    a14 = abs(r[0, 3])
    a23 = abs(r[1, 2])
    xi1 = 2.0 * (a23 + a14)
    xi2 = 2.0 * (a23 - a14)
    xi3 = float(np.real(1.0 - 2.0 * (r[1, 1] + r[2, 2])))
    xa3 = float(np.real(2.0 * (r[0, 0] + r[1, 1]) - 1.0))
    xi_max = max(xi3 ** 2, xi2 ** 2 + xa3 ** 2)
    xi_min = min(xi1 ** 2, xi3 ** 2)
    return {"xi1": xi1, "xi2": xi2, "xi3": xi3, "xA3": xa3, "xi_max": xi_max, "xi_min": xi_min}


def trace_discord_x(rho):
    """Closed-form trace discord of an X-state, or ``None`` when the formula is singular."""
    q = x_state_xi(rho)
    den = q["xi_max"] - q["xi_min"] + q["xi1"] ** 2 - q["xi2"] ** 2
    if abs(den) < 1e-12:
        return None
    num = q["xi1"] ** 2 * q["xi_max"] - q["xi2"] ** 2 * q["xi_min"]
    return float(np.sqrt(max(num / den, 0.0)))


def trace_discord(rho, dims=None, method: str = "auto",
                  sweep: MeasurementSweep = DEFAULT_SWEEP) -> MeasureResult:
    """Trace-norm geometric discord ``min_Pi ||rho - Pi^A rho||_1`` (qubit A).

    Bell-diagonal states give the intermediate ``|c_i|``; X-states use the
    xi closed form; other states are swept.
    """
    r, dims = _qubit_a(rho, dims)
    if method not in ("auto", "numeric"):
        raise ValueError("method must be 'auto' or 'numeric'")
    if method == "auto" and dims == (2, 2):
        p = states.is_bell_diagonal(r)
        if p is not None:
            return MeasureResult(intermediate(np.abs(p.c)), method=ANALYTIC, tol=1e-12)
        if states.is_x_state(r):
            v = trace_discord_x(r)
            if v is not None:
                return MeasureResult(v, method=ANALYTIC, tol=1e-10)
    return trace_sweep(r, dims, sweep)


def geometric_classical_total_trace(rho) -> tuple:
    """``(C_T, T_T, C~_T)`` of a Bell-diagonal state.

    ``C_T = c+``, ``T_T = (c+ + max(c+, c0 + c-))/2`` and ``C~_T = sqrt(1+c+) - 1``
    with ``c+ >= c0 >= c-`` the sorted ``|c_i|``.

    Raises
    ------
    NotBellDiagonal
    """
    p = _bell_or_raise(rho)
    cm, c0, cp = np.sort(np.abs(p.c))
    ct = float(cp)
    tt = float(0.5 * (cp + max(cp, c0 + cm)))
    ctt = float(np.sqrt(1.0 + cp) - 1.0)
    if tt > ct + c0 + 1e-12:
        raise BoundViolation("superadditivity T_T <= C_T + D_T violated")
    return ct, tt, ctt


# ---------------------------------------------------------------------------
# Bures discord
# ---------------------------------------------------------------------------

BURES_NORM = 2.0 + np.sqrt(2.0)


def bures_fmax_bell(p) -> float:
    """Maximal fidelity to classical-quantum states for a Bell-diagonal triple."""
    c = states._as_bell(p).c
    best = -np.inf
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        a = np.sqrt(max((1 + c[i]) ** 2 - (c[j] - c[k]) ** 2, 0.0))
        b = np.sqrt(max((1 - c[i]) ** 2 - (c[j] + c[k]) ** 2, 0.0))
        best = max(best, a + b)
    return float(0.5 + 0.25 * best)


def bures_fmax_sweep(rho, dims=None, sweep: MeasurementSweep = DEFAULT_SWEEP):
    """``max_u (1 - tr Lambda(u) + 2 sum_{k<=n_B} lambda_k(u))/2`` with ``Lambda = sqrt(rho)(u.sigma (x) I)sqrt(rho)``."""
    r, dims = _qubit_a(rho, dims)
    nb = dims[1]
    sq = qcore.matrix_sqrt(r)
    lam_i = np.array([sq @ np.kron(s, np.eye(nb)) @ sq for s in PAULI3])
    tr_i = np.real(np.einsum("iaa->i", lam_i))

    def f(ns):
        L = np.einsum("ni,iab->nab", ns, lam_i)
        w = np.linalg.eigvalsh(L)[:, ::-1]
        return 0.5 * (1.0 - ns @ tr_i + 2.0 * np.sum(w[:, :nb], axis=1))

    return maximize_direction(f, sweep)


def bures_discord(rho, dims=None, method: str = "auto",
                  sweep: MeasurementSweep = DEFAULT_SWEEP) -> MeasureResult:
    """Bures discord ``(2 + sqrt2)(1 - sqrt(F_max))``."""
    r, dims = _bipartite(rho, dims)
    if method == "auto":
        psi = qcore.pure_state_of(r, tol=1e-12)
        if psi is not None:
            mu = float(np.max(qcore.schmidt_coefficients(psi, dims)) ** 2)
            return MeasureResult(BURES_NORM * (1.0 - np.sqrt(mu)), method=ANALYTIC, tol=1e-10,
                                 extras={"F_max": mu})
        if dims == (2, 2):
            p = states.is_bell_diagonal(r)
            if p is not None:
                f = bures_fmax_bell(p)
                return MeasureResult(float(max(BURES_NORM * (1.0 - np.sqrt(f)), 0.0)), method=ANALYTIC,
                                     tol=1e-10, extras={"F_max": f})
    if dims[0] != 2:
        raise DimensionMismatch("numeric Bures discord needs a qubit on side A")
    f, n = bures_fmax_sweep(r, dims, sweep)
    f = min(f, 1.0)
    return _sweep_result(BURES_NORM * (1.0 - np.sqrt(f)), n, F_max=f)


# ---------------------------------------------------------------------------
# Hellinger discord, LQU and Q_A
# ---------------------------------------------------------------------------

def _hellinger_bell(p: states.BellDiagonalParams) -> float:
    lam = np.clip(p.eigenvalues, 0.0, None)
    lam[lam < qcore.ROUNDING_FLOOR] = 0.0  # sqrt would turn 1e-17 into 3e-9
    s = np.sqrt(lam)
    h = float(np.sum(s))
    d = h - 2.0 * s[3] - 2.0 * s[:3]
    return float(1.0 - 0.25 * (h * h + np.max(d * d)))


def hellinger_discord(rho, dims=None, method: str = "auto") -> MeasureResult:
    """Hellinger-distance discord ``min_Pi ||sqrt(rho) - Pi^A(sqrt(rho))||_2^2`` (qubit A).

    Computed as ``1 - |r|^2 - mu_max(Gamma Gamma^T)`` from the expansion of
    ``sqrt(rho)`` in orthonormal operator bases; Bell-diagonal states use
    the spectral closed form. With this normalization ``lqu = 2 D_H``.
    """
    r, dims = _qubit_a(rho, dims)
    if method == "auto" and dims == (2, 2):
        p = states.is_bell_diagonal(r)
        if p is not None:
            return MeasureResult(max(_hellinger_bell(p), 0.0), method=ANALYTIC, tol=1e-10)
    gamma = qcore.correlation_tensor(qcore.matrix_sqrt(r), dims)
    r0 = float(np.sum(gamma[0] ** 2))
    G = gamma[1:]
    w, v = np.linalg.eigh(G @ G.T)
    value = 1.0 - r0 - w[-1]
    th, ph = angles(v[:, -1])
    return MeasureResult(float(max(value, 0.0)), witness={"theta": th, "phi": ph, "n": v[:, -1]},
                         method=ANALYTIC, tol=1e-10)


def lqu_matrix(rho, dims=None) -> np.ndarray:
    """``W_ij = tr[sqrt(rho)(sigma_i (x) I) sqrt(rho)(sigma_j (x) I)]``."""
    r, dims = _qubit_a(rho, dims)
    sq = qcore.matrix_sqrt(r)
    ops = [np.kron(s, np.eye(dims[1])) for s in PAULI3]
    W = np.array([[np.real(np.trace(sq @ a @ sq @ b)) for b in ops] for a in ops])
    return 0.5 * (W + W.T)


def lqu(rho, dims=None) -> MeasureResult:
    """Local quantum uncertainty ``1 - lambda_max(W)`` for a qubit party A."""
    W = lqu_matrix(rho, dims)
    w, v = np.linalg.eigh(W)
    th, ph = angles(v[:, -1])
    return MeasureResult(float(max(1.0 - w[-1], 0.0)), witness={"theta": th, "phi": ph, "n": v[:, -1]},
                         method=ANALYTIC, tol=1e-10)


def skew_sum(rho, dims, u) -> float:
    """``sum_i I(rho, |u_i><u_i| (x) I)`` for the local basis given by the columns of ``u``."""
    r, dims = _bipartite(rho, dims)
    sq = qcore.matrix_sqrt(r)
    db = dims[1]
    total = 0.0
    for k in range(dims[0]):
        K = np.kron(np.outer(u[:, k], u[:, k].conj()), np.eye(db))
        c = sq @ K - K @ sq
        total += -0.5 * np.real(np.trace(c @ c))
    return float(total)


def q_a(rho, dims=None, basis=None) -> MeasureResult:
    """Skew-information correlation ``Q_A = min_{K_A} sum_i I(rho, |i><i| (x) I)``.

    If ``basis`` (columns) is given the sum is evaluated in that basis only.
    Otherwise a qubit ``A`` uses ``lqu/2`` and larger ``A`` a numeric search
    over local bases.
    """
    r, dims = _bipartite(rho, dims)
    if basis is not None:
        u = np.asarray(basis, dtype=complex)
        return MeasureResult(skew_sum(r, dims, u), witness={"basis_A": u}, method=ANALYTIC, tol=1e-12)
    if dims[0] == 2:
        res = lqu(r, dims)
        return MeasureResult(0.5 * res.value, witness=res.witness, method=ANALYTIC, tol=1e-10)
    val, u = _local_basis_search(lambda u: skew_sum(r, dims, u), dims[0])
    return MeasureResult(max(val, 0.0), witness={"basis_A": u}, method=NUMERIC, tol=1e-6)


def q_a_werner(x: float, d: int) -> float:
    return float((d - x - np.sqrt((d * d - 1) * (1 - x * x))) / (2 * (d + 1)))


def q_a_isotropic(x: float, d: int) -> float:
    return float((1 - 2 * np.sqrt((d * d - 1) * (1 - x) * x) + (d * d - 2) * x) / (d * (d + 1)))


# ---------------------------------------------------------------------------
# relative-entropy discord of Bell-diagonal states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RelEntropyBell:
    D_R: float
    Q_R: float
    closest_classical: np.ndarray
    closest_separable: np.ndarray


def _bell_projectors():
    vecs = [states.BELL_PHI_MINUS, states.BELL_PHI_PLUS, states.BELL_PSI_PLUS, states.BELL_PSI_MINUS]
    return [qcore.proj(v) for v in vecs]


def _closest_classical_bell(lam_sorted, order):
    q = lam_sorted[0] + lam_sorted[1]
    w = np.empty(4)
    w[order[0]] = w[order[1]] = q / 2.0
    w[order[2]] = w[order[3]] = (1.0 - q) / 2.0
    return w


def rel_entropy_discord_bell(p) -> RelEntropyBell:
    """Relative-entropy discord and quantumness of a Bell-diagonal state.

    Returns ``D_R = S(chi_rho) - S(rho)`` with ``chi_rho`` the closest
    classical state, ``Q_R = S(chi_sigma) - S(sigma)`` with ``sigma`` the
    closest separable state, and both states.
    """
    p = states._as_bell(p).validate()
    lam = np.clip(p.eigenvalues, 0.0, None)
    projs = _bell_projectors()
    order = np.argsort(-lam, kind="stable")
    lam_s = lam[order]

    w_chi = _closest_classical_bell(lam_s, order)
    chi = sum(wi * P for wi, P in zip(w_chi, projs))
    d_r = qcore.shannon_entropy(w_chi) - qcore.shannon_entropy(lam)

    if lam_s[0] > 0.5:
        ws = np.empty(4)
        ws[order[0]] = 0.5
        rest = 1.0 - lam_s[0]
        for k in order[1:]:
            ws[k] = lam[k] / (2.0 * rest) if rest > 1e-15 else 1.0 / 6.0
    else:
        ws = lam.copy()
    sigma = sum(wi * P for wi, P in zip(ws, projs))
    ws_s = ws[np.argsort(-ws, kind="stable")]
    order_s = np.argsort(-ws, kind="stable")
    w_chis = _closest_classical_bell(ws_s, order_s)
    q_r = qcore.shannon_entropy(w_chis) - qcore.shannon_entropy(ws)
    return RelEntropyBell(max(d_r, 0.0), max(q_r, 0.0), chi, sigma)


# ---------------------------------------------------------------------------
# negativity of quantumness and non-commutativity
# ---------------------------------------------------------------------------

def negativity_of_quantumness(rho, side: str = "A", dims=None, method: str = "auto") -> MeasureResult:
    """``Q_N = (1/2) min_Pi ||rho - Pi(rho)||_1`` for a qubit measured side."""
    r, dims = _measured_side(rho, dims, side)
    if method == "auto" and dims == (2, 2):
        p = states.is_bell_diagonal(r)
        if p is not None:
            s = np.linalg.svd(np.diag(p.c), compute_uv=False)
            return MeasureResult(intermediate(s) / 2.0, method=ANALYTIC, tol=1e-12)
    res = trace_discord(r, dims, method=method)
    return MeasureResult(res.value / 2.0, witness=res.witness, method=res.method, tol=res.tol / 2)


def q_n_werner(x: float, d: int) -> float:
    return abs(d * x - 1) / (2.0 * (d + 1))


def q_n_isotropic(x: float, d: int) -> float:
    return abs(d * d * x - 1) / (d + 1.0)


def noncommutativity_discord(rho, dims=None, basis=None) -> tuple:
    """``(D_N, D'_N)``: half the sum over ordered distinct pairs of block commutator norms.

    ``rho = sum_ij |i><j| (x) B_ij`` in the local basis ``basis`` of A
    (columns; default computational). ``D_N`` uses the trace norm and
    ``D'_N`` the Hilbert-Schmidt norm.
    """
    r, dims = _bipartite(rho, dims)
    da, db = dims
    if basis is not None:
        u = np.kron(np.asarray(basis, dtype=complex), np.eye(db))
        r = u.conj().T @ r @ u
    t = r.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db, db)
    dn = 0.0
    dn2 = 0.0
    for a in range(da * da):
        for b in range(a + 1, da * da):
            c = t[a] @ t[b] - t[b] @ t[a]
            dn += qcore.trace_norm(c)
            dn2 += qcore.hs_norm(c)
    return float(dn), float(dn2)


def noncommutativity_pure(schmidt) -> tuple:
    """Closed forms of ``(D_N, D'_N)`` for a pure state in its Schmidt basis.

    ``schmidt`` holds the Schmidt amplitudes ``s_i`` (``sum s_i^2 = 1``).
    """
    s = np.asarray(schmidt, dtype=float)
    n = s.size

    def omega(i, j, include_diag_pair):
        out = []
        if i < j:
            out = [(k, l) for k in range(i + 1, j + 1) for l in range(j, n)]
            if include_diag_pair:
                out.append((i, j))
        else:
            out = [(k, l) for k in range(i, n) for l in range(k + 1, n)]
        return out

    dn = 0.0
    dn2 = 0.0
    for i in range(n):
        for j in range(i, n):
            dn += s[i] * s[j] * sum(s[k] * s[l] for k, l in omega(i, j, True))
            dn2 += s[i] * s[j] * sum(s[k] * s[l] for k, l in omega(i, j, False))
    cross = sum(s[i] ** 2 * s[j] ** 2 for i in range(n) for j in range(i + 1, n))
    return float(2.0 * dn), float(2.0 * dn2 + np.sqrt(2.0) * cross)
