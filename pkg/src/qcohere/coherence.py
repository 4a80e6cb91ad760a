"""Single-system coherence quantifiers.

Every quantifier takes a density matrix ``rho`` and an optional reference
basis (default: computational basis) and returns a
:class:`~qcohere.results.MeasureResult`. Closed forms carry
``method="analytic"``; values produced by the interior-point solver carry
``method="numeric"`` together with the optimal incoherent state as witness.
"""

from __future__ import annotations

import numpy as np

from . import qcore, states
from ._optim import LMIBlock, LMIProblem, diag_units, hermitian_basis, solve_lmi
from .exceptions import (
    BoundViolation,
    DimensionMismatch,
    NotHermitian,
    ParamOutOfRange,
    ValidationError,
)
from .results import ANALYTIC, NUMERIC, MeasureResult

NUMERIC_TOL = 1e-8
BRACKET_SLACK = 1e-6
DIAG_TOL = 1e-13


def _prepare(rho, basis):
    """Validate ``rho`` and express it in the reference basis."""
    r = qcore.validate_density(rho)
    b = qcore.resolve_basis(basis, r.shape[0])
    return b.to_basis(r), b


def _offdiag(r):
    return r - np.diag(np.diag(r))


def _is_incoherent(r) -> bool:
    return bool(np.max(np.abs(_offdiag(r)), initial=0.0) <= DIAG_TOL)


def _diag_state(r):
    return np.diag(np.real(np.diag(r))).astype(complex)


def _l1(r) -> float:
    return float(np.sum(np.abs(_offdiag(r))))


def _witness(b: qcore.ReferenceBasis, delta):
    """Incoherent witness state ``sum delta_i |i><i|`` in the lab frame."""
    return b.from_basis(np.diag(np.asarray(delta, dtype=complex)))


def _check_bracket(name, value, lo, hi, slack=BRACKET_SLACK):
    if value < lo - slack or value > hi + slack:
        raise BoundViolation(f"{name}={value:.10g} outside proven bracket [{lo:.10g}, {hi:.10g}]")


def _dispatch_mode(method):
    if method not in ("auto", "analytic", "numeric"):
        raise ValueError("method must be 'auto', 'analytic' or 'numeric'")
    return method


# ---------------------------------------------------------------------------
# distance-type measures with closed forms
# ---------------------------------------------------------------------------

def c_l1(rho, basis=None) -> MeasureResult:
    """l1-norm of coherence, the sum of off-diagonal moduli."""
    r, b = _prepare(rho, basis)
    return MeasureResult(_l1(r), witness=b.from_basis(_diag_state(r)), method=ANALYTIC, tol=1e-12)


def c_rel_entropy(rho, basis=None) -> MeasureResult:
    """Relative entropy of coherence ``S(Delta rho) - S(rho)`` (bits)."""
    r, b = _prepare(rho, basis)
    if _is_incoherent(r):
        return MeasureResult(0.0, witness=b.from_basis(_diag_state(r)), tol=1e-12)
    p = np.clip(np.real(np.diag(r)), 0.0, None)
    val = qcore.shannon_entropy(p) - qcore.von_neumann_entropy(r)
    return MeasureResult(max(val, 0.0), witness=b.from_basis(_diag_state(r)), tol=1e-10)


def c_l2(rho, basis=None) -> MeasureResult:
    """Squared Hilbert-Schmidt distance to the dephased state.

    Not a coherence monotone; provided for the bounds that use it.
    """
    r, b = _prepare(rho, basis)
    return MeasureResult(float(np.sum(np.abs(_offdiag(r)) ** 2)),
                         witness=b.from_basis(_diag_state(r)), tol=1e-12)


# ---------------------------------------------------------------------------
# trace-norm coherence
# ---------------------------------------------------------------------------

def c_trace_pure(psi, basis=None) -> MeasureResult:
    """Exact trace-distance coherence of a pure state.

    Sorts the amplitude moduli ``x_1 >= x_2 >= ...`` and finds the largest
    ``k`` with ``x_k > q_k``; the closest incoherent state has weights
    ``alpha_i = (x_i - q_k)/(s_k - k q_k)`` on the ``k`` largest entries.
    """
    v = qcore.validate_pure(psi)
    b = qcore.resolve_basis(basis, v.size)
    amp = b.matrix.conj().T @ v
    x_all = np.abs(amp)
    order = np.argsort(-x_all, kind="stable")
    x = x_all[order]
    d = x.size
    best_k, best_q = 1, None
    for k in range(1, d + 1):
        s = np.sum(x[:k])
        m = np.sum(x[k:] ** 2)
        p = s * s - k * m - 1.0
        q = (p + np.sqrt(max(p * p + 4.0 * k * m * s * s, 0.0))) / (2.0 * k * s)
        if x[k - 1] > q:
            best_k, best_q = k, q
    k, q = best_k, best_q
    s = np.sum(x[:k])
    m = np.sum(x[k:] ** 2)
    value = 2.0 * (q * s + m)
    alpha_sorted = np.zeros(d)
    alpha_sorted[:k] = (x[:k] - q) / (s - k * q)
    alpha = np.zeros(d)
    alpha[order] = alpha_sorted
    return MeasureResult(float(max(value, 0.0)), witness=_witness(b, alpha), method=ANALYTIC,
                         tol=1e-10, extras={"k": int(k), "q": float(q)})


def _trace_problem(r, modified: bool):
    """Barrier formulation of ``min ||rho - D||_1`` over incoherent ``D``.

    Variables are the Hermitian coordinates of ``P`` followed by the diagonal
    weights. For the plain measure the last weight is eliminated through the
    unit-trace condition; for the modified measure all weights are free and
    only required to be non-negative.
    """
    d = r.shape[0]
    hb = hermitian_basis(d)
    nP = hb.shape[0]
    units = diag_units(d)
    if modified:
        nw = d
        wmats = units
        w_off = np.zeros((d, d), dtype=complex)
    else:
        nw = d - 1
        wmats = units[:-1] - units[-1][None]
        w_off = units[-1]
    n = nP + nw
    zeros_w = np.zeros((nw, d, d), dtype=complex)
    blk_p = LMIBlock(np.zeros((d, d), dtype=complex), np.concatenate([hb, zeros_w]))
    blk_n = LMIBlock(-r + w_off, np.concatenate([hb, wmats]))
    c = np.zeros(n)
    c[:d] = 2.0  # 2 tr P (diagonal coordinates come first)
    G = np.zeros((0, n))
    h = np.zeros(0)
    if modified:
        c[nP:] = 1.0
        G = np.zeros((d, n))
        G[:, nP:] = np.eye(d)
        h = np.zeros(d)
    else:
        G = np.zeros((d, n))
        G[: d - 1, nP:] = np.eye(d - 1)
        G[d - 1, nP:] = -1.0
        h = np.zeros(d)
        h[d - 1] = 1.0
    z0 = np.zeros(n)
    z0[:d] = 2.0
    z0[nP:] = 1.0 / d
    prob = LMIProblem(c=c, blocks=[blk_p, blk_n], G=G, h=h)
    sol = solve_lmi(prob, z0)
    w = sol.z[nP:]
    if not modified:
        w = np.append(w, 1.0 - np.sum(w))
        value = sol.value
    else:
        value = sol.value - 1.0
    return max(value, 0.0), np.clip(w, 0.0, None)


def _trace_analytic_ok(r) -> bool:
    d = r.shape[0]
    if d == 2:
        return True
    return d == 4 and states.is_x_state(r)


def c_trace(rho, basis=None, method: str = "auto") -> MeasureResult:
    """Trace-distance coherence ``min_delta ||rho - delta||_1``.

    Qubits and X-states use the identity with the l1 norm, pure states the
    exact pure-state algorithm, and other inputs an interior-point solve.
    """
    _dispatch_mode(method)
    r, b = _prepare(rho, basis)
    if _is_incoherent(r):
        return MeasureResult(0.0, witness=b.from_basis(_diag_state(r)), tol=1e-12)
    if method != "numeric":
        if _trace_analytic_ok(r):
            return MeasureResult(_l1(r), witness=b.from_basis(_diag_state(r)), tol=1e-12)
        psi = qcore.pure_state_of(r, tol=1e-12)
        if psi is not None:
            res = c_trace_pure(psi)
            return MeasureResult(res.value, witness=b.from_basis(res.witness), tol=res.tol,
                                 extras=res.extras)
        if method == "analytic":
            raise ValidationError("no closed form for the trace coherence of this state")
    value, delta = _trace_problem(r, modified=False)
    return MeasureResult(value, witness=_witness(b, delta), method=NUMERIC, tol=NUMERIC_TOL)


def c_trace_modified(rho, basis=None, method: str = "auto") -> MeasureResult:
    """Modified trace coherence ``min_{lambda>=0, delta} ||rho - lambda delta||_1``.

    The witness is the unnormalized operator ``lambda delta``; ``extras``
    holds ``lambda`` and ``delta`` separately.
    """
    _dispatch_mode(method)
    r, b = _prepare(rho, basis)
    if _is_incoherent(r):
        return MeasureResult(0.0, witness=b.from_basis(_diag_state(r)), tol=1e-12,
                             extras={"lambda": 1.0, "delta": np.real(np.diag(r))})
    if method != "numeric" and _trace_analytic_ok(r):
        return MeasureResult(_l1(r), witness=b.from_basis(_diag_state(r)), tol=1e-12,
                             extras={"lambda": 1.0, "delta": np.real(np.diag(r))})
    if method == "analytic":
        raise ValidationError("no closed form for the modified trace coherence of this state")
    value, w = _trace_problem(r, modified=True)
    lam = float(np.sum(w))
    delta = w / lam if lam > 0 else np.full(r.shape[0], 1.0 / r.shape[0])
    return MeasureResult(value, witness=_witness(b, w), method=NUMERIC, tol=NUMERIC_TOL,
                         extras={"lambda": lam, "delta": delta})


# ---------------------------------------------------------------------------
# robustness and weight
# ---------------------------------------------------------------------------

def _robustness_numeric(r):
    d = r.shape[0]
    lam_max = np.linalg.eigvalsh(r)[-1]
    prob = LMIProblem(c=np.ones(d), blocks=[LMIBlock(-r, diag_units(d))])
    sol = solve_lmi(prob, np.full(d, lam_max + 1.0))
    w = sol.z
    return max(sol.value - 1.0, 0.0), w / np.sum(w)


def robustness(rho, basis=None, method: str = "auto") -> MeasureResult:
    """Robustness of coherence ``min{s >= 0 : rho <= (1+s) delta}``.

    Closed form (the l1 norm) for qubits, pure states and X-states; otherwise
    the semidefinite program ``min sum(w) - 1`` s.t. ``diag(w) >= rho`` is
    solved and the result is checked against ``C_l1/(d-1) <= C_R <= C_l1``.

    Raises
    ------
    BoundViolation
        If the numeric value leaves the analytic bracket by more than 1e-6.
    """
    _dispatch_mode(method)
    r, b = _prepare(rho, basis)
    d = r.shape[0]
    l1 = _l1(r)
    if _is_incoherent(r):
        return MeasureResult(0.0, witness=b.from_basis(_diag_state(r)), tol=1e-12)
    if method != "numeric":
        if d == 2 or (d == 4 and states.is_x_state(r)):
            return MeasureResult(l1, witness=b.from_basis(_diag_state(r)), tol=1e-12)
        psi = qcore.pure_state_of(r, tol=1e-12)
        if psi is not None:
            delta = np.abs(psi) / np.sum(np.abs(psi))
            return MeasureResult(l1, witness=_witness(b, delta), tol=1e-10)
        if method == "analytic":
            raise ValidationError("no closed form for the robustness of this state")
    value, delta = _robustness_numeric(r)
    _check_bracket("robustness", value, l1 / (d - 1), l1)
    return MeasureResult(value, witness=_witness(b, delta), method=NUMERIC, tol=NUMERIC_TOL)


def coherence_weight(rho, basis=None) -> MeasureResult:
    """Coherence weight ``min{s : rho >= (1-s) delta}``.

    Solved as ``1 - max sum(w)`` s.t. ``rho - diag(w) >= 0``, ``w >= 0``,
    restricted to the support of ``rho``. Checked against the lower bounds
    ``||rho - Delta rho||_2^2/||rho||_inf`` and ``C_l1/(d-1)``.
    """
    r, b = _prepare(rho, basis)
    d = r.shape[0]
    if _is_incoherent(r):
        return MeasureResult(0.0, witness=b.from_basis(_diag_state(r)), tol=1e-12)
    lam, vec = qcore.hermitian_eig(r)
    keep = lam > 1e-12
    V = vec[:, keep]
    r_c = np.diag(lam[keep]).astype(complex)
    # basis vectors inside the support of rho can carry weight
    leak = 1.0 - np.sum(np.abs(V) ** 2, axis=1)
    idx = np.flatnonzero(leak < 1e-10)
    if idx.size == 0:
        value, w_full = 1.0, np.zeros(d)
    else:
        Fa = np.array([-np.outer(V[i].conj(), V[i]) for i in idx])
        lmin = float(np.min(lam[keep]))
        prob = LMIProblem(c=-np.ones(idx.size), blocks=[LMIBlock(r_c, Fa)],
                          G=np.eye(idx.size), h=np.zeros(idx.size))
        sol = solve_lmi(prob, np.full(idx.size, lmin / 2.0))
        w_full = np.zeros(d)
        w_full[idx] = np.clip(sol.z, 0.0, None)
        value = min(max(1.0 + sol.value, 0.0), 1.0)
    off = float(np.sum(np.abs(_offdiag(r)) ** 2))
    lo = max(off / lam[0], _l1(r) / (d - 1))
    _check_bracket("coherence_weight", value, lo, 1.0)
    tot = np.sum(w_full)
    delta = w_full / tot if tot > 0 else np.full(d, 1.0 / d)
    return MeasureResult(value, witness=_witness(b, delta), method=NUMERIC, tol=NUMERIC_TOL)


def c_max_relative_entropy(rho, basis=None) -> MeasureResult:
    """Max-relative entropy of coherence ``log2(1 + C_R)``."""
    res = robustness(rho, basis)
    return MeasureResult(float(np.log2(1.0 + res.value)), witness=res.witness,
                         method=res.method, tol=res.tol)


# ---------------------------------------------------------------------------
# geometric coherence
# ---------------------------------------------------------------------------

def geometric_bounds(rho, basis=None):
    """Lower and upper bounds on the geometric coherence from sub/super-fidelity."""
    r, _ = _prepare(rho, basis)
    d = r.shape[0]
    diag = np.real(np.diag(r))
    purity = qcore.purity(r)
    arg = 1.0 - d / (d - 1) * (purity - np.sum(diag ** 2))
    lo = 1.0 - 1.0 / d - (d - 1) / d * np.sqrt(max(arg, 0.0))
    bsq = np.real(np.diag(qcore.matrix_sqrt(r)))
    hi = min(1.0 - np.max(diag), 1.0 - np.sum(bsq ** 2))
    return float(lo), float(hi)


def _geometric_numeric(r):
    """``max_delta sqrt F(rho, delta)`` via the block-matrix fidelity SDP."""
    d = r.shape[0]
    lam, vec = qcore.hermitian_eig(r)
    keep = lam > 1e-12
    V = vec[:, keep]
    nr = V.shape[1]
    r_c = np.diag(lam[keep]).astype(complex)
    size = nr + d
    mats = []
    cvec = []
    for i in range(nr):
        for j in range(d):
            e = np.zeros((size, size), dtype=complex)
            e[i, nr + j] = 1.0
            e[nr + j, i] = 1.0
            mats.append(e)
            cvec.append(-np.real(V[j, i]))
            f = np.zeros((size, size), dtype=complex)
            f[i, nr + j] = 1j
            f[nr + j, i] = -1j
            mats.append(f)
            cvec.append(np.imag(V[j, i]))
    nx = len(mats)
    for k in range(d - 1):
        e = np.zeros((size, size), dtype=complex)
        e[nr + k, nr + k] = 1.0
        e[size - 1, size - 1] = -1.0
        mats.append(e)
        cvec.append(0.0)
    F0 = np.zeros((size, size), dtype=complex)
    F0[:nr, :nr] = r_c
    F0[size - 1, size - 1] = 1.0
    n = len(mats)
    G = np.zeros((d, n))
    G[: d - 1, nx:] = np.eye(d - 1)
    G[d - 1, nx:] = -1.0
    h = np.zeros(d)
    h[d - 1] = 1.0
    z0 = np.zeros(n)
    z0[nx:] = 1.0 / d
    prob = LMIProblem(c=np.array(cvec), blocks=[LMIBlock(F0, np.array(mats))], G=G, h=h)
    sol = solve_lmi(prob, z0)
    root_f = -sol.value
    delta = np.append(sol.z[nx:], 1.0 - np.sum(sol.z[nx:]))
    return root_f, np.clip(delta, 0.0, None)


def geometric_coherence(rho, basis=None, method: str = "auto") -> MeasureResult:
    """Geometric coherence ``1 - max_delta F(rho, delta)`` (squared fidelity).

    Closed forms for qubits and pure states; otherwise a semidefinite program
    for the root fidelity, checked against the sub/super-fidelity bracket.
    """
    _dispatch_mode(method)
    r, b = _prepare(rho, basis)
    d = r.shape[0]
    if _is_incoherent(r):
        return MeasureResult(0.0, witness=b.from_basis(_diag_state(r)), tol=1e-12)
    if method != "numeric":
        if d == 2:
            a = abs(r[0, 1])
            val = 0.5 * (1.0 - np.sqrt(max(1.0 - 4.0 * a * a, 0.0)))
            return MeasureResult(float(val), method=ANALYTIC, tol=1e-12)
        psi = qcore.pure_state_of(r, tol=1e-12)
        if psi is not None:
            p = np.abs(psi) ** 2
            delta = np.zeros(d)
            delta[int(np.argmax(p))] = 1.0
            return MeasureResult(float(1.0 - np.max(p)), witness=_witness(b, delta), tol=1e-10)
        if method == "analytic":
            raise ValidationError("no closed form for the geometric coherence of this state")
    root_f, delta = _geometric_numeric(r)
    value = float(min(max(1.0 - root_f ** 2, 0.0), 1.0))
    lo, hi = geometric_bounds(r)
    _check_bracket("geometric_coherence", value, lo, hi)
    return MeasureResult(value, witness=_witness(b, delta), method=NUMERIC, tol=NUMERIC_TOL)


# ---------------------------------------------------------------------------
# convex-roof measures (qubit and pure closed forms only)
# ---------------------------------------------------------------------------

def coherence_of_formation_qubit(rho) -> MeasureResult:
    """Intrinsic randomness / coherence of formation of a qubit.

    ``H((1 + sqrt(1 - C^2))/2)`` where ``C`` is the coherence concurrence
    obtained from the spectrum of ``rho sigma_x rho* sigma_x``.
    """
    r = qcore.validate_density(rho)
    if r.shape != (2, 2):
        raise DimensionMismatch("coherence of formation closed form needs a qubit")
    m = r @ qcore.SIGMA_X @ r.conj() @ qcore.SIGMA_X
    ev = np.sort(np.sqrt(np.clip(np.real(np.linalg.eigvals(m)), 0.0, None)))[::-1]
    cz = float(abs(ev[0] - ev[1]))
    if abs(cz - 2.0 * abs(r[0, 1])) > 1e-10:
        raise BoundViolation("concurrence from the spectrum disagrees with 2|rho_01|")
    val = qcore.binary_entropy((1.0 + np.sqrt(max(1.0 - cz * cz, 0.0))) / 2.0)
    return MeasureResult(val, method=ANALYTIC, tol=1e-10, extras={"concurrence": cz})


def coherence_concurrence_pure(psi, basis=None) -> MeasureResult:
    """``sum_{j<k} |<psi| u_jk |psi*>|`` with ``u_jk = |j><k| + |k><j|``."""
    v = qcore.validate_pure(psi)
    b = qcore.resolve_basis(basis, v.size)
    a = b.matrix.conj().T @ v
    total = 0.0
    for j, k in qcore.iter_pairs(a.size):
        u = np.zeros((a.size, a.size), dtype=complex)
        u[j, k] = u[k, j] = 1.0
        total += abs(a.conj() @ u @ a.conj())
    return MeasureResult(float(total), method=ANALYTIC, tol=1e-12)


def coherence_rank(psi, basis=None, tol: float = 1e-10) -> int:
    v = qcore.validate_pure(psi)
    b = qcore.resolve_basis(basis, v.size)
    return int(np.sum(np.abs(b.matrix.conj().T @ v) > tol))


def c0(psi, basis=None) -> float:
    """Logarithmic coherence rank ``log2 r_C``."""
    return float(np.log2(coherence_rank(psi, basis)))


# ---------------------------------------------------------------------------
# Tsallis and skew-information measures
# ---------------------------------------------------------------------------

def tsallis_upper_bound(rho, alpha: float) -> float:
    """Upper bound on the Tsallis-alpha coherence in terms of the purity."""
    r = qcore.validate_density(rho)
    d = r.shape[0]
    P = qcore.purity(r)
    if alpha <= 2.0:
        return float(((d * P) ** (alpha - 1.0) - 1.0) / (alpha - 1.0))
    vs = np.sqrt(max((d - 1) * (d * P - 1.0), 0.0)) + 1.0
    return float((d * P * vs ** (alpha - 2.0) - 1.0) / (alpha - 1.0))


def tsallis_coherence(rho, basis=None, alpha: float = 2.0) -> MeasureResult:
    """Tsallis relative alpha-entropy of coherence.

    ``((sum_i <i|rho^alpha|i>^(1/alpha))^alpha - 1)/(alpha - 1)``; ``alpha = 1``
    is the relative entropy of coherence.
    """
    if not alpha > 0:
        raise ParamOutOfRange("alpha must be positive")
    if alpha == 1.0:
        return c_rel_entropy(rho, basis)
    r, b = _prepare(rho, basis)
    if _is_incoherent(r):
        return MeasureResult(0.0, tol=1e-12)
    ra = qcore.matrix_power(r, alpha)
    dg = np.clip(np.real(np.diag(ra)), 0.0, None)
    val = (np.sum(dg ** (1.0 / alpha)) ** alpha - 1.0) / (alpha - 1.0)
    delta = dg ** (1.0 / alpha)
    delta = delta / np.sum(delta)
    return MeasureResult(float(max(val, 0.0)), witness=_witness(b, delta), tol=1e-10)


def tsallis2_closed_form(rho, basis=None) -> float:
    """``(sum_j sqrt(sum_i |rho_ij|^2))^2 - 1``."""
    r, _ = _prepare(rho, basis)
    return float(np.sum(np.sqrt(np.sum(np.abs(r) ** 2, axis=0))) ** 2 - 1.0)


def _check_observable(rho, K):
    r = qcore.as_matrix(rho)
    k = qcore.as_matrix(K)
    if k.shape != r.shape:
        raise DimensionMismatch("observable and state dimensions differ")
    if not qcore.is_hermitian(k):
        raise NotHermitian("observable must be Hermitian")
    return r, k


def k_coherence(rho, K) -> float:
    """Wigner-Yanase skew information ``-tr([sqrt(rho), K]^2)/2``."""
    r, k = _check_observable(qcore.validate_density(rho), K)
    c = qcore.commutator(qcore.matrix_sqrt(r), k)
    return float(max(-0.5 * np.real(np.trace(c @ c)), 0.0))


def k_coherence_spectral(rho, K) -> float:
    """Same quantity via ``sum (sqrt l_i - sqrt l_j)^2 |K_ij|^2 / 2`` in the eigenbasis of rho."""
    r, k = _check_observable(qcore.validate_density(rho), K)
    lam, v = qcore.hermitian_eig(r)
    lam = np.clip(lam, 0.0, None)
    lam[lam < qcore.ROUNDING_FLOOR] = 0.0
    s = np.sqrt(lam)
    kk = v.conj().T @ k @ v
    return float(0.5 * np.sum((s[:, None] - s[None, :]) ** 2 * np.abs(kk) ** 2))


def k_coherence_lower(rho, K) -> float:
    """Lower bound ``-tr([rho, K]^2)/4`` on the skew information."""
    r, k = _check_observable(qcore.validate_density(rho), K)
    c = qcore.commutator(r, k)
    return float(max(-0.25 * np.real(np.trace(c @ c)), 0.0))


def c_sk(rho, basis=None) -> MeasureResult:
    """Skew-information coherence ``1 - sum_k <k|sqrt(rho)|k>^2``.

    Also equal to the sum of skew informations with the basis projectors;
    checked against ``C_l2/2 <= C_sk <= 1 - tr rho^2 + C_l2``.
    """
    r, b = _prepare(rho, basis)
    if _is_incoherent(r):
        return MeasureResult(0.0, witness=b.from_basis(_diag_state(r)), tol=1e-12)
    sq = qcore.matrix_sqrt(r)
    dg = np.real(np.diag(sq))
    val = float(1.0 - np.sum(dg ** 2))
    cl2 = float(np.sum(np.abs(_offdiag(r)) ** 2))
    _check_bracket("c_sk", val, 0.5 * cl2, 1.0 - qcore.purity(r) + cl2, slack=1e-9)
    delta = dg ** 2 / np.sum(dg ** 2)
    return MeasureResult(max(val, 0.0), witness=_witness(b, delta), tol=1e-10)


# ---------------------------------------------------------------------------
# basis-independent quantities
# ---------------------------------------------------------------------------

def c_basis_independent(rho) -> float:
    """``sqrt((d tr rho^2 - 1)/(d - 1))``, unitarily invariant."""
    r = qcore.validate_density(rho)
    d = r.shape[0]
    return float(np.sqrt(max((d * qcore.purity(r) - 1.0) / (d - 1.0), 0.0)))


MAX_KINDS = ("rel_entropy", "l2", "robustness", "weight", "sk")


def max_coherence_over_unitaries(rho, measure_kind: str = "rel_entropy") -> float:
    """Largest coherence reachable by a unitary rotation, from the spectrum alone."""
    r = qcore.validate_density(rho)
    d = r.shape[0]
    lam = qcore.eigvals_psd(r)
    if measure_kind == "rel_entropy":
        return float(np.log2(d) - qcore.shannon_entropy(lam))
    if measure_kind == "l2":
        return float(np.sum(lam ** 2) - 1.0 / d)
    if measure_kind == "robustness":
        return float(d * lam[0] - 1.0)
    if measure_kind == "weight":
        return float(1.0 - d * lam[-1])
    if measure_kind == "sk":
        return float(1.0 - np.sum(np.sqrt(lam)) ** 2 / d)
    raise ParamOutOfRange(f"measure_kind must be one of {MAX_KINDS}")


# ---------------------------------------------------------------------------
# multipartite coherence
# ---------------------------------------------------------------------------

_SIMPLE = {"l1": c_l1, "rel_entropy": c_rel_entropy}


def _simple(kind):
    try:
        return _SIMPLE[kind]
    except KeyError:
        raise ParamOutOfRange(f"measure_kind must be one of {tuple(_SIMPLE)}") from None


def _degenerate_blocks(lam, tol=1e-8):
    blocks = []
    start = 0
    for i in range(1, len(lam) + 1):
        if i == len(lam) or abs(lam[i] - lam[start]) > tol:
            blocks.append(list(range(start, i)))
            start = i
    return blocks


def _block_rotation(vec, blocks, rng):
    out = vec.copy()
    for blk in blocks:
        if len(blk) > 1:
            u = qcore.random_unitary(len(blk), rng)
            out[:, blk] = vec[:, blk] @ u
    return out


def correlated_coherence(rho, dims=(2, 2), measure_kind: str = "l1", samples: int = 1000,
                         seed=0) -> MeasureResult:
    """Correlated coherence ``C(rho_AB) - C(rho_A) - C(rho_B)``.

    Local bases are eigenbases of the marginals. When a marginal spectrum is
    degenerate the value is minimized over ``samples`` random rotations inside
    the degenerate eigenspaces.
    """
    fn = _simple(measure_kind)
    r = qcore.validate_density(rho)
    dims = tuple(int(x) for x in dims)
    ra = qcore.partial_trace(r, dims, "A")
    rb = qcore.partial_trace(r, dims, "B")
    la, va = qcore.hermitian_eig(ra)
    lb, vb = qcore.hermitian_eig(rb)
    ba = _degenerate_blocks(la)
    bb = _degenerate_blocks(lb)

    def value(ua, ub):
        u = np.kron(ua, ub)
        return (fn(r, u).value - fn(ra, ua).value - fn(rb, ub).value)

    best = value(va, vb)
    best_u = (va, vb)
    if any(len(x) > 1 for x in ba + bb):
        rng = qcore.make_rng(seed)
        for _ in range(samples):
            ua = _block_rotation(va, ba, rng)
            ub = _block_rotation(vb, bb, rng)
            v = value(ua, ub)
            if v < best:
                best, best_u = v, (ua, ub)
        method = NUMERIC
    else:
        method = ANALYTIC
    return MeasureResult(float(best), witness={"basis_A": best_u[0], "basis_B": best_u[1]},
                         method=method, tol=1e-10 if method == ANALYTIC else 1e-3)


def monogamy_check(rho, dims) -> dict:
    """Check ``C(rho) >= sum_i C(rho_i)`` for the relative-entropy and l1 coherence.

    Uses the computational product basis. Returns, per measure, the left- and
    right-hand sides and the slack ``lhs - rhs``.
    """
    r = qcore.validate_density(rho)
    dims = tuple(int(x) for x in dims)
    out = {}
    for kind, fn in _SIMPLE.items():
        lhs = fn(r).value
        rhs = sum(fn(qcore.partial_trace(r, dims, [i])).value for i in range(len(dims)))
        out[kind] = {"lhs": float(lhs), "rhs": float(rhs), "slack": float(lhs - rhs)}
    return out


NAQC_THRESHOLD = float(np.sqrt(6.0))


def naqc_l1(rho) -> tuple:
    """Nonlocal advantage of l1 coherence on a two-qubit state.

    Alice measures each Pauli ``sigma_i``; Bob's conditional states are scored
    by their l1 coherence in the eigenbases of the other two Paulis.

    Returns
    -------
    value : float
        ``(1/2) sum_{i != j, a} p(a|sigma_i) C_l1^{sigma_j}(rho_{B|sigma_i^a})``.
    achieves_advantage : bool
        ``value > sqrt(6)``.
    """
    r = qcore.validate_density(rho)
    if r.shape != (4, 4):
        raise DimensionMismatch("nonlocal advantage test needs a two-qubit state")
    eig_bases = [qcore.hermitian_eig(s)[1] for s in qcore.PAULIS]
    total = 0.0
    for i, s in enumerate(qcore.PAULIS):
        for sign in (1.0, -1.0):
            proj = 0.5 * (qcore.I2 + sign * s)
            m = np.kron(proj, qcore.I2)
            cond = qcore.partial_trace(m @ r @ m, (2, 2), "B")
            p = float(np.real(np.trace(cond)))
            if p < 1e-14:
                continue
            cond = cond / p
            for j in range(3):
                if j != i:
                    u = eig_bases[j]
                    total += p * _l1(u.conj().T @ cond @ u)
    value = 0.5 * total
    return float(value), bool(value > NAQC_THRESHOLD + 1e-12)
