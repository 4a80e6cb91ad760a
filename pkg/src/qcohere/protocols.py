"""Coherence bookkeeping for protocols and complementarity relations.

Covers DQC1 coherence consumption, Grover search, teleportation and remote
state preparation figures of merit, the LQU phase-estimation bound,
complementarity relations (mutually unbiased bases, coherence vs.
mixedness, wave-particle duality), Haar averages of coherence and the
ODLRO link for eta-pairing states.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import coherence, discord, qcore, states
from .exceptions import (
    BoundViolation,
    DimensionMismatch,
    InvalidGram,
    NotApplicable,
    NotMUB,
    ParamOutOfRange,
    ValidationError,
    ZeroLQU,
)

CROSS_CHECK_TOL = 1e-10


def _report(obj) -> dict:
    return {k: (float(v) if isinstance(v, (np.floating, float)) else v) for k, v in asdict(obj).items()}


# ---------------------------------------------------------------------------
# DQC1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DQC1Instance:
    """Register of ``n`` qubits with a controlled unitary ``U`` (``2^n x 2^n``)."""

    n: int
    U: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ParamOutOfRange("register needs at least one qubit")
        U = qcore.validate_unitary(self.U)
        if U.shape != (2 ** self.n, 2 ** self.n):
            raise DimensionMismatch(f"U must be {2 ** self.n}x{2 ** self.n}")
        object.__setattr__(self, "U", U)

    @property
    def normalized_trace(self) -> complex:
        return complex(np.trace(self.U) / 2 ** self.n)


def dqc1_state(inst: DQC1Instance) -> np.ndarray:
    """Control-register state after the Hadamard and the controlled ``U``."""
    D = 2 ** inst.n
    e01 = np.array([[0, 1], [0, 0]], dtype=complex)
    return 0.5 * (np.kron(np.eye(2), np.eye(D) / D) + np.kron(e01, inst.U.conj().T / D)
                  + np.kron(e01.T, inst.U / D))


def dqc1_control_state(inst: DQC1Instance) -> np.ndarray:
    return qcore.partial_trace(dqc1_state(inst), (2, 2 ** inst.n), keep="A")


def dqc1_coherence_consumption(inst: DQC1Instance) -> float:
    """``H_2((1 - |tr U|/2^n)/2)``, the relative-entropy coherence used up by the control qubit.

    The closed form is cross-checked against ``C_r(|+><+|) - C_r(rho_A)``
    with ``rho_A`` traced out of the explicit control-register state.
    """
    t = abs(inst.normalized_trace)
    value = qcore.binary_entropy(min(max((1.0 - t) / 2.0, 0.0), 1.0))
    plus = qcore.proj(states.maximally_coherent(2))
    direct = coherence.c_rel_entropy(plus).value - coherence.c_rel_entropy(dqc1_control_state(inst)).value
    if abs(direct - value) > CROSS_CHECK_TOL:
        raise BoundViolation(f"DQC1 closed form {value} differs from direct evaluation {direct}")
    return float(max(value, 0.0))


# ---------------------------------------------------------------------------
# Grover search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroverInstance:
    """Database of size ``N`` with ``j`` marked items (indices ``0..j-1``) after ``r`` iterations."""

    N: int
    j: int
    r: int = 0

    def __post_init__(self):
        if not (1 <= self.j < self.N):
            raise ParamOutOfRange("need 1 <= j < N")
        if self.r < 0:
            raise ParamOutOfRange("iteration count must be nonnegative")

    @property
    def alpha0(self) -> float:
        return math.atan(math.sqrt(self.j / (self.N - self.j)))

    @property
    def alpha(self) -> float:
        return (2 * self.r + 1) * self.alpha0


def grover_state(inst: GroverInstance) -> np.ndarray:
    """``sin(a_r)|X> + cos(a_r)|X_perp>`` written out on all ``N`` amplitudes."""
    psi = np.empty(inst.N, dtype=complex)
    psi[:inst.j] = math.sin(inst.alpha) / math.sqrt(inst.j)
    psi[inst.j:] = math.cos(inst.alpha) / math.sqrt(inst.N - inst.j)
    return psi


def grover_iterate(N: int, j: int, r: int) -> np.ndarray:
    """``G^r |psi_0>`` by explicit application of oracle and diffusion (independent check)."""
    psi0 = np.full(N, 1.0 / math.sqrt(N), dtype=complex)
    psi = psi0.copy()
    for _ in range(r):
        psi[:j] = -psi[:j]
        psi = 2.0 * psi0 * np.vdot(psi0, psi) - psi
    return psi


def grover_success(inst: GroverInstance) -> float:
    return float(math.sin(inst.alpha) ** 2)


def grover_coherence_closed(N: int, j: int, p: float, kind: str = "l1") -> float:
    """Coherence of the Grover state as a function of the success probability ``p``."""
    if kind == "l1":
        return float((math.sqrt(j * p) + math.sqrt((N - j) * (1.0 - p))) ** 2 - 1.0)
    if kind == "rel_entropy":
        return float(qcore.binary_entropy(p) + math.log2(N - j) + p * math.log2(j / (N - j)))
    raise ParamOutOfRange("kind must be 'l1' or 'rel_entropy'")


def grover_coherence(inst: GroverInstance, kind: str = "l1") -> float:
    """Closed form in ``p``, verified against the measure on the full state vector."""
    p = min(max(grover_success(inst), 0.0), 1.0)
    value = grover_coherence_closed(inst.N, inst.j, p, kind)
    rho = qcore.proj(grover_state(inst))
    direct = coherence.c_l1(rho).value if kind == "l1" else coherence.c_rel_entropy(rho).value
    if abs(direct - value) > CROSS_CHECK_TOL:
        raise BoundViolation(f"Grover closed form {value} differs from direct evaluation {direct}")
    return value


def grover_r_opt(N: int, j: int) -> int:
    """Iteration count maximizing the success probability up to the first peak.

    The search runs over ``0 .. ceil(pi/(4 a))`` with ``a = arctan sqrt(j/(N-j))``,
    which covers the first time ``(2r+1) a`` passes ``pi/2``. Later revivals
    can be marginally higher but cost roughly twice as many iterations.
    Ties go to the smaller ``r``.
    """
    a = GroverInstance(N, j).alpha0
    rs = range(math.ceil(math.pi / (4 * a)) + 1)
    probs = [grover_success(GroverInstance(N, j, r)) for r in rs]
    best = max(probs)
    return next(r for r, pr in zip(rs, probs) if pr >= best - 1e-12)


def grover_r_opt_closed(N: int, j: int) -> int:
    """Closest integer to ``(pi - a)/(2a)`` with ``a = arctan sqrt(j/(N-j))``, for comparison only."""
    a = GroverInstance(N, j).alpha0
    return int(math.floor((math.pi - a) / (2 * a) + 0.5))


# ---------------------------------------------------------------------------
# teleportation, remote state preparation, phase estimation
# ---------------------------------------------------------------------------

def _two_qubit(rho):
    r = qcore.validate_density(rho)
    if r.shape != (4, 4):
        raise DimensionMismatch("two-qubit state required")
    return r


@dataclass(frozen=True)
class TeleportationReport:
    fidelity: float
    lower: float
    upper: float

    def __iter__(self):
        return iter((self.fidelity, self.lower, self.upper))

    def to_dict(self) -> dict:
        return _report(self)


def teleport_fidelity_bounds(rho) -> TeleportationReport:
    """Average teleportation fidelity ``1/2 + tr sqrt(R^T R)/6`` and its discord bounds.

    The lower bound is ``(1 + (|R|^2 - k_max(R R^T))/3)/2`` and the upper
    bound is ``(2 + sqrt(2 D_G))/3``, where ``2 D_G`` is the normalized
    Hilbert-Schmidt discord.

    Raises
    ------
    BoundViolation
        If the ordering ``lower <= F <= upper`` fails.
    """
    r = _two_qubit(rho)
    R = qcore.bloch_decompose_2q(r).R
    sv = np.linalg.svd(R, compute_uv=False)
    F = 0.5 + float(np.sum(sv)) / 6.0
    d_max = (float(np.sum(R * R)) - float(np.linalg.eigvalsh(R @ R.T)[-1])) / 3.0
    lower = (1.0 + d_max) / 2.0
    upper = (2.0 + math.sqrt(max(2.0 * discord.hs_discord_two_qubit(r), 0.0))) / 3.0
    if not (lower <= F + 1e-10 and F <= upper + 1e-10):
        raise BoundViolation(f"teleportation ordering violated: {lower} <= {F} <= {upper}")
    return TeleportationReport(F, lower, upper)


def rsp_fidelity(rho, parallel_tol: float = 1e-9) -> float:
    """``(E_2 + E_3)/2`` with ``E_1 >= E_2 >= E_3`` the eigenvalues of ``R^T R``.

    When Alice's Bloch vector is parallel to the top eigenvector of
    ``R R^T`` (or zero), the Hilbert-Schmidt discord equals half this
    value; that identity is asserted.
    """
    r = _two_qubit(rho)
    b = qcore.bloch_decompose_2q(r)
    E = np.sort(np.linalg.eigvalsh(b.R.T @ b.R))[::-1]
    value = float(0.5 * (E[1] + E[2]))
    w, v = np.linalg.eigh(b.R @ b.R.T)
    nx = np.linalg.norm(b.x)
    gap_ok = w[-1] - w[-2] > 1e-9
    parallel = nx < parallel_tol or (gap_ok and np.linalg.norm(np.cross(b.x / nx, v[:, -1])) < parallel_tol)
    if parallel:
        dg = discord.hs_discord_two_qubit(r)
        if abs(dg - value / 2.0) > 1e-9:
            raise BoundViolation(f"HS discord {dg} differs from half the RSP fidelity {value / 2}")
    return max(value, 0.0)


def phase_estimation_bound(rho, dims=None) -> float:
    """``1/(4 LQU)``, an upper bound on the variance of the best phase estimate (one run)."""
    u = discord.lqu(rho, dims).value
    if u <= 1e-12:
        raise ZeroLQU("local quantum uncertainty vanishes; no finite bound")
    return float(1.0 / (4.0 * u))


# ---------------------------------------------------------------------------
# complementarity relations
# ---------------------------------------------------------------------------

def _is_prime(d: int) -> bool:
    return d >= 2 and all(d % k for k in range(2, math.isqrt(d) + 1))


def builtin_mubs(d: int) -> list:
    """Complete sets of ``d + 1`` mutually unbiased bases (columns of unitaries).

    ``d = 2``: eigenbases of ``sigma_z, sigma_x, sigma_y``. Odd prime ``d``:
    the computational basis plus ``|v_k^b>_j = w^{b j^2 + k j}/sqrt(d)``.
    """
    if d == 2:
        s = 1 / math.sqrt(2)
        return [np.eye(2, dtype=complex), np.array([[s, s], [s, -s]], dtype=complex),
                np.array([[s, s], [1j * s, -1j * s]], dtype=complex)]
    if _is_prime(d):
        w = np.exp(2j * np.pi / d)
        j = np.arange(d)
        out = [np.eye(d, dtype=complex)]
        for b in range(d):
            out.append(np.stack([w ** ((b * j * j + k * j) % d) for k in range(d)], axis=1) / math.sqrt(d))
        return out
    raise NotApplicable(f"no built-in MUB set for d = {d}; supply one explicitly")


def validate_mubs(mubs, d: int, tol: float = 1e-9) -> list:
    mats = [np.asarray(m, dtype=complex) for m in mubs]
    if len(mats) != d + 1 or any(m.shape != (d, d) for m in mats):
        raise NotMUB(f"a complete set needs {d + 1} bases of dimension {d}")
    for m in mats:
        if np.max(np.abs(m.conj().T @ m - np.eye(d))) > tol:
            raise NotMUB("a basis is not orthonormal")
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            if np.max(np.abs(np.abs(mats[a].conj().T @ mats[b]) ** 2 - 1.0 / d)) > tol:
                raise NotMUB("bases are not mutually unbiased")
    return mats


def rho_epsilon(eps: float, d: int, vector) -> np.ndarray:
    """``eps/(d-1) I + (d(1-eps) - 1)/(d-1) |a><a|``.

    The family saturates the ``l1`` MUB relation when ``|a>`` is a vector of
    one of the bases in the complete set (any vector works for ``d = 2``).
    """
    if not 0.0 <= eps <= 1.0:
        raise ParamOutOfRange("eps must lie in [0, 1]")
    a = np.asarray(vector, dtype=complex)
    a = a / np.linalg.norm(a)
    return eps / (d - 1) * np.eye(d, dtype=complex) + (d * (1 - eps) - 1) / (d - 1) * np.outer(a, a.conj())


@dataclass(frozen=True)
class MUBReport:
    per_basis_l1: tuple
    l1_lhs: float
    l1_rhs: float
    l1_slack: float
    per_basis_rel: tuple
    rel_lhs: float
    rel_rhs: float
    rel_slack: float

    def to_dict(self) -> dict:
        return _report(self)


def mub_complementarity(rho, mubs=None) -> MUBReport:
    """Both complementarity relations over a complete MUB set.

    ``l1``: ``sum_j C_l1(A_j)^2 <= d(d-1)(dP - 1)``. Relative entropy:
    ``sum_j C_r(A_j) <= (d+1)(log2 d - S) - (d-1)(dP-1) log2(d-1)/(d(d-2))``,
    where the last factor becomes ``(P - 1/2) log2 e`` at ``d = 2``.
    """
    r = qcore.validate_density(rho)
    d = r.shape[0]
    bases = validate_mubs(builtin_mubs(d) if mubs is None else mubs, d)
    l1 = tuple(coherence.c_l1(r, b).value for b in bases)
    rel = tuple(coherence.c_rel_entropy(r, b).value for b in bases)
    P = qcore.purity(r)
    l1_rhs = d * (d - 1) * (d * P - 1)
    if d == 2:
        corr = (P - 0.5) * math.log2(math.e)
    else:
        corr = (d - 1) * (d * P - 1) * math.log2(d - 1) / (d * (d - 2))
    rel_rhs = (d + 1) * (math.log2(d) - qcore.von_neumann_entropy(r)) - corr
    l1_lhs = float(sum(c * c for c in l1))
    rel_lhs = float(sum(rel))
    return MUBReport(l1, l1_lhs, float(l1_rhs), float(l1_rhs - l1_lhs), rel, rel_lhs, float(rel_rhs),
                     float(rel_rhs - rel_lhs))


@dataclass(frozen=True)
class MixednessReport:
    c_l1: float
    mixedness: float
    lhs: float
    slack: float
    is_mcms: bool
    mcms_p: float | None

    def to_dict(self) -> dict:
        return _report(self)


def recognize_mcms(rho, tol: float = 1e-10):
    """Return ``p`` if ``rho = (1-p) I/d + p |Psi_d><Psi_d|``, else ``None``."""
    r = np.asarray(rho, dtype=complex)
    d = r.shape[0]
    if d < 2:
        return None
    p = float(np.real(r[0, 1])) * d
    if -tol <= p <= 1 + tol and np.max(np.abs(r - states.mcms(min(max(p, 0.0), 1.0), d))) <= tol:
        return min(max(p, 0.0), 1.0)
    return None


def coherence_mixedness(rho) -> MixednessReport:
    """``C_l1^2/(d-1)^2 + M_l <= 1`` with ``M_l = d(1 - tr rho^2)/(d-1)``."""
    r = qcore.validate_density(rho)
    d = r.shape[0]
    if d < 2:
        raise DimensionMismatch("need d >= 2")
    c = coherence.c_l1(r).value
    m = d * (1.0 - qcore.purity(r)) / (d - 1)
    lhs = c * c / (d - 1) ** 2 + m
    p = recognize_mcms(r)
    return MixednessReport(c, float(m), float(lhs), float(1.0 - lhs), p is not None, p)


@dataclass(frozen=True)
class DualityReport:
    c_l1: float
    distinguishability: float
    total: float
    intensity_ratio: float

    def to_dict(self) -> dict:
        return _report(self)


def wave_particle_duality(amps, detector_overlaps, tol: float = 1e-10) -> DualityReport:
    """Path coherence versus which-path distinguishability for ``sum_i c_i |psi_i>|xi_i>``.

    Parameters
    ----------
    amps : array_like
        Normalized path amplitudes ``c_i``.
    detector_overlaps : array_like
        Gram matrix ``G_ij = <xi_i|xi_j>`` (Hermitian, PSD, unit diagonal).

    Returns
    -------
    DualityReport
        ``C_l1`` of the path state after the detector interaction, the bound
        ``D_Q`` on unambiguous discrimination, ``C_l1/(N-1) + D_Q`` and the
        fringe-intensity ratio ``(I_max - I_inc)/I_inc`` at the primary
        maximum.
    """
    c = np.asarray(amps, dtype=complex).ravel()
    G = np.asarray(detector_overlaps, dtype=complex)
    N = c.size
    if N < 2:
        raise DimensionMismatch("need at least two paths")
    if abs(np.vdot(c, c).real - 1.0) > tol:
        raise ValidationError("amplitudes must be normalized")
    if G.shape != (N, N):
        raise DimensionMismatch("Gram matrix shape does not match the amplitudes")
    if np.max(np.abs(G - G.conj().T)) > tol or np.max(np.abs(np.diag(G) - 1.0)) > tol:
        raise InvalidGram("overlap matrix must be Hermitian with unit diagonal")
    if np.linalg.eigvalsh(0.5 * (G + G.conj().T))[0] < -1e-9:
        raise InvalidGram("overlap matrix is not positive semidefinite")
    # rho'_s[i, j] = c_i c_j^* <xi_j|xi_i>
    rho_s = np.outer(c, c.conj()) * G.T
    c_l1 = coherence.c_l1(rho_s).value
    off = np.abs(np.outer(c, c.conj())) * np.abs(G)
    s = float(np.sum(off) - np.sum(np.diag(off)))
    dq = 1.0 - s / (N - 1)
    # at the primary maximum all path phases line up, so each term enters with its modulus
    i_inc = float(np.sum(np.abs(c) ** 2))
    i_max = float(np.sum(np.abs(rho_s)))
    return DualityReport(float(c_l1), float(dq), float(c_l1 / (N - 1) + dq), (i_max - i_inc) / i_inc)


# ---------------------------------------------------------------------------
# Haar averages
# ---------------------------------------------------------------------------

HAAR_KINDS = ("l1", "rel_entropy", "dephased_trace_distance")
SHARD = 2000


@dataclass(frozen=True)
class HaarEstimate:
    """Sample mean with standard error and the analytic value it should reproduce.

    For ``rel_entropy`` the primary numbers are in nats; ``mean_bits`` and
    ``analytic_bits`` give the base-2 versions.
    """

    kind: str
    d: int
    n_samples: int
    mean: float
    stderr: float
    analytic: float
    mean_bits: float | None = None
    analytic_bits: float | None = None

    @property
    def z(self) -> float:
        return (self.mean - self.analytic) / self.stderr if self.stderr > 0 else 0.0

    def within(self, k: float = 4.0) -> bool:
        return abs(self.mean - self.analytic) <= k * self.stderr

    def __iter__(self):
        return iter((self.mean, self.stderr))

    def to_dict(self) -> dict:
        out = _report(self)
        out["z"] = self.z
        return out


def haar_analytic(d: int, kind: str) -> float:
    if kind == "l1":
        return (d - 1) * math.pi / 4.0
    if kind == "rel_entropy":
        return sum(1.0 / k for k in range(1, d + 1)) - 1.0
    if kind == "dephased_trace_distance":
        return 2.0 * (1.0 - 1.0 / d) ** d
    raise ParamOutOfRange(f"kind must be one of {HAAR_KINDS}")


def _haar_shard(d, n, seed_seq, kind):
    rng = np.random.default_rng(seed_seq)
    z = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
    psi = z / np.linalg.norm(z, axis=1, keepdims=True)
    if kind == "l1":
        a = np.abs(psi)
        return np.sum(a, axis=1) ** 2 - 1.0
    p = np.abs(psi) ** 2
    if kind == "rel_entropy":
        # pure state: C_r = S(diag) in nats
        return -np.sum(np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0), axis=1)
    return np.sum(np.abs(p - 1.0 / d), axis=1)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QCOHERE_THREADS", "1")))
    except ValueError:
        return 1


def haar_average_coherence(d: int, n_samples: int = 10_000, seed=0, kind: str = "l1",
                           check: bool = False) -> HaarEstimate:
    """Monte-Carlo average of coherence over Haar-random pure states.

    Samples are drawn in shards of 2000 with child seeds spawned from
    ``seed``, so the result does not depend on ``QCOHERE_THREADS``.

    Parameters
    ----------
    kind : str
        ``l1`` (analytic ``(d-1) pi/4``), ``rel_entropy`` (natural log,
        analytic ``H_d - 1``) or ``dephased_trace_distance``
        (``||Delta(psi) - I/d||_1``, analytic ``2(1 - 1/d)^d``).
    check : bool
        Raise :class:`BoundViolation` if the mean is more than four
        standard errors away from the analytic value.
    """
    if d < 2:
        raise ParamOutOfRange("need d >= 2")
    if n_samples < 1000:
        raise ParamOutOfRange("need at least 1000 samples")
    analytic = haar_analytic(d, kind)
    sizes = [SHARD] * (n_samples // SHARD) + ([n_samples % SHARD] if n_samples % SHARD else [])
    seqs = np.random.SeedSequence(int(seed)).spawn(len(sizes))
    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        parts = list(ex.map(lambda a: _haar_shard(d, a[0], a[1], kind), zip(sizes, seqs)))
    vals = np.concatenate(parts)
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(vals.size))
    extra = {}
    if kind == "rel_entropy":
        extra = {"mean_bits": mean / math.log(2), "analytic_bits": analytic / math.log(2)}
    est = HaarEstimate(kind, d, int(vals.size), mean, stderr, analytic, **extra)
    if check and not est.within(4.0):
        raise BoundViolation(f"Haar mean {mean} is {est.z:.2f} standard errors from {analytic}")
    return est


# ---------------------------------------------------------------------------
# ODLRO
# ---------------------------------------------------------------------------

def odlro_coherence(L: int, N: int) -> float:
    """``L(L-1) C_odlro = N(L-N)`` for the eta-pairing state of ``N`` pairs on ``L`` sites."""
    if L < 2 or not 0 <= N <= L:
        raise ParamOutOfRange("need L >= 2 and 0 <= N <= L")
    return float(N * (L - N))


def eta_pairing_correlations(L: int, N: int) -> np.ndarray:
    """Pair correlation matrix ``<eta_k^dag eta_l>`` from the explicit ``L``-site state.

    Pairs are hard-core bosons, so the state is the uniform superposition
    of all ``N``-occupied configurations of ``L`` qubits.
    """
    if L > 14:
        raise ParamOutOfRange("explicit construction limited to L <= 14")
    odlro_coherence(L, N)
    idx = [s for s in range(2 ** L) if bin(s).count("1") == N]
    amp = 1.0 / math.sqrt(len(idx))
    occupied = set(idx)
    M = np.zeros((L, L))
    for s in idx:
        for k in range(L):
            for l in range(L):
                bit_k, bit_l = 1 << (L - 1 - k), 1 << (L - 1 - l)
                if k == l:
                    M[k, k] += amp * amp * bool(s & bit_k)
                elif (s & bit_l) and not (s & bit_k) and (s ^ bit_l ^ bit_k) in occupied:
                    M[k, l] += amp * amp
    return M
