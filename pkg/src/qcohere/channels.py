"""Quantum channels in Kraus form and their coherence-related properties.

Covers the standard qubit noise channels, the Heisenberg-picture transfer
matrix in the Gell-Mann basis, incoherence classification, freezing
predicates, the ``l1`` factorization laws, the coherence-breaking index,
cohering/decohering power and two "maximal attainable coherence" results
(strictly incoherent selective operations and energy-bounded unitaries).

Conventions
-----------
Operator basis: ``X_0 = sqrt(2/d) I`` followed by :func:`qcore.gell_mann`
(off-diagonal pairs first, then the diagonal generators), so that
``rho = I/d + (1/2) sum_{i>=1} x_i X_i`` with ``x_i = tr(rho X_i)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize

from . import coherence, qcore, states
from .exceptions import (
    BoundViolation,
    DimensionMismatch,
    NoSolution,
    NotApplicable,
    NotPSD,
    ParamOutOfRange,
    SingularDiagonal,
    ValidationError,
)

KRAUS_TOL = 1e-10
CLASSIFY_TOL = 1e-10
PRUNE_TOL = 1e-12
EIGEN_OP_TOL = 1e-8


# ---------------------------------------------------------------------------
# Kraus channels
# ---------------------------------------------------------------------------

@dataclass
class KrausChannel:
    """A CPTP map ``rho -> sum_k K_k rho K_k^dag``.

    Raises
    ------
    ValidationError
        If the operators have mismatched shapes or ``sum K^dag K != I``.
    """

    kraus_ops: list
    label: str = "channel"

    def __post_init__(self):
        ops = [np.asarray(k, dtype=complex) for k in self.kraus_ops]
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.ndim != 2 or k.shape != shape for k in ops):
            raise DimensionMismatch("Kraus operators must share one matrix shape")
        s = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(s - np.eye(shape[1]))) > KRAUS_TOL:
            raise ValidationError("Kraus operators are not trace preserving")
        self.kraus_ops = ops

    @property
    def dim_in(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus_ops[0].shape[0]

    @property
    def endomorphic(self) -> bool:
        return self.dim_in == self.dim_out

    def __call__(self, rho) -> np.ndarray:
        r = np.asarray(rho, dtype=complex)
        if r.shape != (self.dim_in, self.dim_in):
            raise DimensionMismatch(f"channel acts on dimension {self.dim_in}, got {r.shape}")
        return sum(k @ r @ k.conj().T for k in self.kraus_ops)

    def adjoint(self, op) -> np.ndarray:
        """Heisenberg picture ``E^dag(O) = sum_k K_k^dag O K_k``."""
        return sum(k.conj().T @ op @ k for k in self.kraus_ops)

    def choi(self) -> np.ndarray:
        """``J = sum_ij |i><j| (x) E(|i><j|)``."""
        d = self.dim_in
        J = np.zeros((d * self.dim_out, d * self.dim_out), dtype=complex)
        for i in range(d):
            for j in range(d):
                e = np.zeros((d, d), dtype=complex)
                e[i, j] = 1.0
                J += np.kron(e, self(e))
        return J

    def compose(self, other: KrausChannel, compress: bool = True) -> KrausChannel:
        """``self o other`` (``other`` acts first)."""
        if other.dim_out != self.dim_in:
            raise DimensionMismatch("channel dimensions do not compose")
        ops = [a @ b for a in self.kraus_ops for b in other.kraus_ops]
        ops = [k for k in ops if np.linalg.norm(k) > PRUNE_TOL]
        ch = KrausChannel(ops, f"{self.label}*{other.label}")
        return ch.canonical() if compress else ch

    def tensor(self, other: KrausChannel) -> KrausChannel:
        ops = [np.kron(a, b) for a in self.kraus_ops for b in other.kraus_ops]
        return KrausChannel(ops, f"{self.label}(x){other.label}")

    def canonical(self) -> KrausChannel:
        """Minimal Kraus set from the eigen-decomposition of the Choi matrix."""
        return from_choi(self.choi(), self.dim_in, self.dim_out, self.label)

    def kraus_rank(self, tol: float = PRUNE_TOL) -> int:
        w = np.linalg.eigvalsh(self.choi())
        return int(np.sum(w > tol))

    def to_json(self) -> str:
        return json.dumps({"label": self.label, "kraus": [states.matrix_to_json(k) for k in self.kraus_ops]})

    @classmethod
    def from_json(cls, text: str) -> KrausChannel:
        obj = json.loads(text) if isinstance(text, str) else text
        return cls([states.matrix_from_json(m) for m in obj["kraus"]], obj.get("label", "channel"))


def from_choi(J, d_in: int, d_out: int, label: str = "channel") -> KrausChannel:
    """Kraus operators ``sqrt(w) * reshape(v)`` from the Choi matrix eigenpairs."""
    J = 0.5 * (J + J.conj().T)
    w, v = np.linalg.eigh(J)
    if w[0] < -1e-9:
        raise NotPSD("Choi matrix is not positive: map is not completely positive")
    ops = []
    for lam, vec in zip(w[::-1], v.T[::-1]):
        if lam <= PRUNE_TOL:
            break
        # vec = sum_i |i> (x) K|i>  ->  K[:, i] = vec[i*d_out:(i+1)*d_out]
        ops.append(np.sqrt(lam) * vec.reshape(d_in, d_out).T)
    return KrausChannel(ops, label)


def from_qubit_affine(M, n=(0.0, 0.0, 0.0), label: str = "affine") -> KrausChannel:
    """Qubit channel ``(I + r.sigma)/2 -> (I + (M r + n).sigma)/2``."""
    M = np.asarray(M, dtype=float)
    n = np.asarray(n, dtype=float)

    def act(e):
        # linear extension to arbitrary 2x2 matrices through the Pauli expansion
        t = np.trace(e)
        r = np.array([np.trace(e @ s) for s in qcore.PAULIS])
        rp = M @ r + t * n
        return 0.5 * (t * qcore.I2 + sum(rp[k] * qcore.PAULIS[k] for k in range(3)))

    J = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1.0
            J += np.kron(e, act(e))
    return from_choi(J, 2, 2, label)


def unitary_channel(U, label: str = "unitary") -> KrausChannel:
    return KrausChannel([qcore.validate_unitary(U)], label)


def identity_channel(d: int = 2) -> KrausChannel:
    return KrausChannel([np.eye(d)], "identity")


def dephasing_channel(d: int = 2, p: float = 1.0) -> KrausChannel:
    """``(1 - p) rho + p Delta(rho)``; ``p = 1`` is the full dephasing ``Delta``."""
    _check_param(p)
    ops = [np.sqrt(1.0 - p) * np.eye(d)] if p < 1.0 else []
    for i in range(d):
        e = np.zeros((d, d))
        e[i, i] = np.sqrt(p)
        ops.append(e)
    return KrausChannel(ops, "dephasing" if p == 1.0 else f"dephasing({p})")


def _check_param(p, name="param"):
    if not np.isfinite(p) or p < 0.0 or p > 1.0:
        raise ParamOutOfRange(f"{name} must lie in [0, 1], got {p}")


def standard_channel(kind: str, param: float, **extra) -> KrausChannel:
    """Named qubit channels.

    Parameters
    ----------
    kind : str
        ``bit_flip``, ``phase_flip``, ``bit_phase_flip`` (flip probability
        ``p``), ``depolarizing`` (``rho -> (1-p) rho + p I/2``),
        ``amplitude_damping`` (decay probability ``gamma``),
        ``phase_damping`` (Kraus ``diag(1, p)``, ``diag(0, sqrt(1-p^2))``; ``p=1``
        is the identity), ``generalized_amplitude_damping`` (``gamma``, with
        the excited-state weight passed as ``n_th`` in [0, 1]),
        ``dephasing`` (mixture with full dephasing), ``identity``.
    param : float
        Channel parameter in ``[0, 1]``.
    """
    _check_param(param)
    p = float(param)
    X, Y, Z, I = qcore.SIGMA_X, qcore.SIGMA_Y, qcore.SIGMA_Z, qcore.I2
    if kind == "bit_flip":
        ops = [np.sqrt(1 - p) * I, np.sqrt(p) * X]
    elif kind == "phase_flip":
        ops = [np.sqrt(1 - p) * I, np.sqrt(p) * Z]
    elif kind == "bit_phase_flip":
        ops = [np.sqrt(1 - p) * I, np.sqrt(p) * Y]
    elif kind == "depolarizing":
        ops = [np.sqrt(1 - 0.75 * p) * I] + [np.sqrt(p / 4.0) * s for s in (X, Y, Z)]
    elif kind == "amplitude_damping":
        ops = [np.diag([1.0, np.sqrt(1 - p)]), np.sqrt(p) * np.array([[0.0, 1.0], [0.0, 0.0]])]
    elif kind == "phase_damping":
        ops = [np.diag([1.0, p]), np.diag([0.0, np.sqrt(1 - p * p)])]
    elif kind == "generalized_amplitude_damping":
        n_th = float(extra.get("n_th", 0.5))
        _check_param(n_th, "n_th")
        a, b = np.sqrt(1 - n_th), np.sqrt(n_th)
        ops = [a * np.diag([1.0, np.sqrt(1 - p)]), a * np.sqrt(p) * np.array([[0.0, 1.0], [0.0, 0.0]]),
               b * np.diag([np.sqrt(1 - p), 1.0]), b * np.sqrt(p) * np.array([[0.0, 0.0], [1.0, 0.0]])]
    elif kind == "dephasing":
        return dephasing_channel(2, p)
    elif kind == "identity":
        return identity_channel(2)
    else:
        raise ValidationError(f"unknown channel kind {kind!r}")
    return KrausChannel(ops, f"{kind}({p:g})")


STANDARD_KINDS = ("bit_flip", "phase_flip", "bit_phase_flip", "depolarizing", "amplitude_damping",
                  "phase_damping", "generalized_amplitude_damping", "dephasing", "identity")


def apply(channel: KrausChannel, rho, on_subsystem=None, dims=None) -> np.ndarray:
    """Apply ``channel`` to ``rho`` or to one tensor factor of it.

    Parameters
    ----------
    on_subsystem : None, 'A', 'B' or int
        ``None`` applies the channel to the whole state. Otherwise ``dims``
        lists the subsystem dimensions (default: two equal halves for
        ``'A'``/``'B'``) and the channel acts on the chosen factor.
    """
    r = np.asarray(rho, dtype=complex)
    if on_subsystem is None:
        return channel(r)
    n = r.shape[0]
    if dims is None:
        d = channel.dim_in
        if n % d:
            raise DimensionMismatch("cannot infer subsystem dimensions; pass dims")
        dims = (d, n // d) if on_subsystem in ("A", 0) else (n // d, d)
    dims = [int(x) for x in dims]
    if int(np.prod(dims)) != n:
        raise DimensionMismatch(f"dims {dims} do not match matrix size {n}")
    k = {"A": 0, "B": 1}.get(on_subsystem, on_subsystem)
    if not isinstance(k, (int, np.integer)) or not 0 <= k < len(dims):
        raise DimensionMismatch(f"invalid subsystem {on_subsystem!r}")
    if dims[k] != channel.dim_in or not channel.endomorphic:
        raise DimensionMismatch("channel dimension does not match the subsystem")
    m = len(dims)
    t = r.reshape(dims + dims)
    out = np.zeros_like(t)
    for K in channel.kraus_ops:
        u = np.moveaxis(np.tensordot(K, t, axes=([1], [k])), 0, k)
        u = np.moveaxis(np.tensordot(u, K.conj(), axes=([m + k], [1])), -1, m + k)
        out = out + u
    return out.reshape(n, n)


def apply_each(channel: KrausChannel, rho, n_sub: int) -> np.ndarray:
    """Apply the same single-system channel independently to each of ``n_sub`` factors."""
    d = channel.dim_in
    out = np.asarray(rho, dtype=complex)
    for k in range(n_sub):
        out = apply(channel, out, k, [d] * n_sub)
    return out


# ---------------------------------------------------------------------------
# transfer matrix
# ---------------------------------------------------------------------------

def operator_basis(d: int) -> list:
    """``[sqrt(2/d) I] + gell_mann(d)``, each with ``tr(X_i X_j) = 2 delta_ij``."""
    return [np.sqrt(2.0 / d) * np.eye(d, dtype=complex)] + list(qcore.gell_mann(d))


def coordinates(rho) -> np.ndarray:
    """``x_i = tr(rho X_i)`` for ``i = 0 .. d^2-1`` (``x_0 = sqrt(2/d)``)."""
    r = np.asarray(rho, dtype=complex)
    return np.array([np.real(np.trace(r @ X)) for X in operator_basis(r.shape[0])])


def from_coordinates(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d = int(round(np.sqrt(x.size)))
    return 0.5 * sum(xi * X for xi, X in zip(x, operator_basis(d)))


@dataclass(frozen=True)
class TransferMatrix:
    """``E^dag(X_i) = sum_j T_ij X_j``, so that ``x' = T x``."""

    T: np.ndarray
    dim: int

    def __post_init__(self):
        T = self.T
        if abs(T[0, 0] - 1.0) > 1e-9 or np.max(np.abs(T[0, 1:]), initial=0.0) > 1e-9:
            raise ValidationError("transfer matrix violates trace preservation (T_00 = 1, T_0j = 0)")

    def evolve(self, x) -> np.ndarray:
        return self.T @ np.asarray(x, dtype=float)

    @property
    def n_offdiag(self) -> int:
        return self.dim * self.dim - self.dim


def transfer_matrix(channel: KrausChannel) -> TransferMatrix:
    """``T_ij = tr(E^dag(X_i) X_j)/2`` in :func:`operator_basis`."""
    if not channel.endomorphic:
        raise DimensionMismatch("transfer matrix needs an endomorphic channel")
    d = channel.dim_in
    basis = operator_basis(d)
    T = np.array([[np.real(np.trace(channel.adjoint(Xi) @ Xj)) / 2.0 for Xj in basis] for Xi in basis])
    return TransferMatrix(T, d)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelClassification:
    unital: bool
    semiclassical: bool
    incoherent: bool
    strictly_incoherent: bool
    coherence_breaking: bool
    cbc_witness: list | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        return {"unital": self.unital, "semiclassical": self.semiclassical, "incoherent": self.incoherent,
                "strictly_incoherent": self.strictly_incoherent, "coherence_breaking": self.coherence_breaking}


def _max_nonzero_per(m, axis, tol):
    return int(np.max(np.sum(np.abs(m) > tol, axis=axis)))


def _output_always_diagonal(channel, tol):
    d = channel.dim_in
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            out = channel(e)
            if np.max(np.abs(out - np.diag(np.diag(out)))) > tol:
                return False
    return True


def classify(channel: KrausChannel, tol: float = CLASSIFY_TOL) -> ChannelClassification:
    """Incoherence-related flags of an endomorphic channel.

    * ``incoherent`` (IO): every Kraus operator has at most one nonzero entry
      per column in the given representation, or the channel is coherence
      breaking (which always admits such a representation).
    * ``strictly_incoherent`` (SIO): at most one nonzero entry per row and
      per column.
    * ``semiclassical`` / ``coherence_breaking``: the output is diagonal for
      every input, checked on the spanning set ``|i><j|``. The witness is the
      POVM ``F_i = E^dag(|i><i|)`` of the form ``E(rho) = sum_i tr(rho F_i)|i><i|``.
    * ``unital``: ``E(I/d) = I/d``.
    """
    if not channel.endomorphic:
        raise DimensionMismatch("classification needs an endomorphic channel")
    d = channel.dim_in
    ops = channel.kraus_ops
    col_ok = all(_max_nonzero_per(k, 0, tol) <= 1 for k in ops)
    row_ok = all(_max_nonzero_per(k, 1, tol) <= 1 for k in ops)
    cbc = _output_always_diagonal(channel, tol)
    witness = None
    if cbc:
        witness = []
        for i in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, i] = 1.0
            witness.append(channel.adjoint(e))
    unital = bool(np.max(np.abs(channel(np.eye(d) / d) - np.eye(d) / d)) <= tol)
    return ChannelClassification(unital=unital, semiclassical=cbc, incoherent=col_ok or cbc,
                                 strictly_incoherent=col_ok and row_ok, coherence_breaking=cbc,
                                 cbc_witness=witness)


# ---------------------------------------------------------------------------
# freezing predicates
# ---------------------------------------------------------------------------

FREEZE_TOL = 1e-10


def discord_freezing_condition(p, tol: float = FREEZE_TOL) -> bool:
    """Frozen entropic discord under one-sided phase damping (Bell-diagonal input).

    True when ``c2 = -c1 c3`` with ``|c1| > |c3|``, or ``c1 = -c2 c3`` with
    ``|c2| > |c3|``. The freezing lasts while the decaying component stays
    larger in modulus than ``|c3|``.
    """
    bp = states._as_bell(p)
    bp.validate()
    c1, c2, c3 = bp.c
    first = abs(c2 + c1 * c3) <= tol and abs(c1) > abs(c3) + tol
    second = abs(c1 + c2 * c3) <= tol and abs(c2) > abs(c3) + tol
    return bool(first or second)


def discord_freezing_window(p) -> tuple:
    """Range of the phase-damping parameter ``p(t)`` over which freezing holds."""
    bp = states._as_bell(p)
    c1, c2, c3 = bp.c
    big = abs(c1) if abs(c2 + c1 * c3) <= FREEZE_TOL else abs(c2)
    return (abs(c3) / big if big > 0 else 1.0, 1.0)


def coherence_freezing_condition(p, N: int, tol: float = FREEZE_TOL) -> bool:
    """``c2 = (-1)^{N/2} c1 c3`` for the ``N``-qubit Bell-diagonal family under local bit flips."""
    if N < 2 or N % 2:
        raise ParamOutOfRange("N must be an even integer >= 2")
    c1, c2, c3 = states._as_bell(p).c
    return bool(abs(c2 - (-1) ** (N // 2) * c1 * c3) <= tol)


def bell_diagonal_n(p, N: int) -> np.ndarray:
    """``(I^{(x)N} + sum_i c_i sigma_i^{(x)N}) / 2^N``."""
    c = states._as_bell(p).c
    out = np.eye(2 ** N, dtype=complex)
    for ci, s in zip(c, qcore.PAULIS):
        out = out + ci * qcore.kron(*([s] * N))
    out = out / 2 ** N
    if np.linalg.eigvalsh(out)[0] < -1e-12:
        raise NotPSD("triple does not give a state for this N")
    return out


def l1_freezing_condition_two_qubit(rho, tol: float = FREEZE_TOL) -> bool:
    """Frozen ``C_l1`` under local bit flips on both qubits.

    Requires a diagonal correlation matrix, ``x_2 = y_2 = 0`` and
    ``T_22 = u T_11`` with ``|u| <= 1``.
    """
    b = qcore.bloch_decompose_2q(qcore.validate_density(rho))
    R = b.R
    if np.max(np.abs(R - np.diag(np.diag(R)))) > tol:
        return False
    return bool(abs(b.x[1]) <= tol and abs(b.y[1]) <= tol and abs(R[1, 1]) <= abs(R[0, 0]) + tol)


def l1_freezing_condition_general(T: TransferMatrix, tol: float = 1e-9) -> bool:
    """Frozen ``C_l1`` for states with a fixed Bloch direction.

    Needs ``T_k0 = 0`` for the off-diagonal generators ``k = 1 .. d^2-d``
    and ``T^S`` (rows ``1 .. d^2-d``, columns ``1 .. d^2-1``) block diagonal
    with orthogonal ``2 x 2`` blocks on the ``(u_r, v_r)`` pairs.
    """
    M = np.asarray(T.T, dtype=float)
    m = T.n_offdiag
    if np.max(np.abs(M[1:m + 1, 0]), initial=0.0) > tol:
        return False
    S = M[1:m + 1, 1:]
    mask = np.zeros_like(S, dtype=bool)
    for r in range(m // 2):
        mask[2 * r:2 * r + 2, 2 * r:2 * r + 2] = True
    if np.max(np.abs(S[~mask]), initial=0.0) > tol:
        return False
    for r in range(m // 2):
        blk = S[2 * r:2 * r + 2, 2 * r:2 * r + 2]
        if np.max(np.abs(blk.T @ blk - np.eye(2))) > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# factorization laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FactorizationReport:
    q: float
    indices: tuple
    probe_value: float
    max_rel_deviation: float
    max_rel_deviation_probe: float
    samples: int

    def to_dict(self) -> dict:
        return {"q": self.q, "indices": list(self.indices), "probe_value": self.probe_value,
                "max_rel_deviation": self.max_rel_deviation,
                "max_rel_deviation_probe": self.max_rel_deviation_probe, "samples": self.samples}


def eigen_operator_indices(T: TransferMatrix, tol: float = EIGEN_OP_TOL) -> dict:
    """Off-diagonal generators with ``E^dag(X_k) = q_k X_k``, as ``{k: q_k}``."""
    out = {}
    for k in range(1, T.n_offdiag + 1):
        row = np.array(T.T[k], dtype=float)
        q = row[k]
        row[k] = 0.0
        if np.max(np.abs(row)) <= tol:
            out[k] = float(q)
    return out


def _family_state(d, idx, rng, T_diag_scale=1.0):
    """Random valid state ``I/d + (1/2)(sum_{k in idx} x_k X_k + sum_diag x_l X_l)``."""
    basis = operator_basis(d)
    m = d * d - d
    ks = list(idx) + list(range(m + 1, d * d))
    x = np.zeros(d * d)
    x[ks] = rng.normal(size=len(ks))
    x[0] = 0.0
    H = 0.5 * sum(x[k] * basis[k] for k in ks)
    lo = np.linalg.eigvalsh(H)[0]
    # scale the traceless part into the positive cone, at a random depth
    s = rng.uniform(0.1, 1.0) * (1.0 / d) / max(-lo, 1e-12)
    return np.eye(d) / d + s * H


def _offdiag_l1(m) -> float:
    return float(np.sum(np.abs(m)) - np.sum(np.abs(np.diag(m))))


def factorization_check(channel: KrausChannel, family=None, samples: int = 100, seed=0) -> FactorizationReport:
    """Check ``C_l1(E rho) = |q| C_l1(rho)`` on a family of states.

    Parameters
    ----------
    family : None or sequence of int
        Indices ``k`` (off-diagonal generators, ``1 .. d^2-d``) spanning the
        coherent part of the family. ``None`` uses every eigen-operator found
        in the transfer matrix.

    Returns
    -------
    FactorizationReport
        ``q``, the probe-state value ``C_l1(E rho_p)`` for the first sampled
        direction, and the largest relative deviations from the ``|q|`` law
        and from the probe law ``C_l1(E rho) = C_l1(rho) C_l1(E rho_p)``.

    Raises
    ------
    NotApplicable
        If the requested generators are not eigen-operators of ``E^dag`` or
        do not share one eigenvalue.
    """
    T = transfer_matrix(channel)
    d = T.dim
    eig = eigen_operator_indices(T)
    idx = tuple(sorted(eig)) if family is None else tuple(int(k) for k in family)
    if not idx or any(k not in eig for k in idx):
        raise NotApplicable("no eigen-operator structure on the requested generators")
    qs = np.array([eig[k] for k in idx])
    if np.max(qs) - np.min(qs) > EIGEN_OP_TOL:
        raise NotApplicable("eigen-operators do not share a common eigenvalue")
    q = float(qs[0])
    rng = qcore.make_rng(seed)
    probe_ok = np.max(np.abs(T.T[1:T.n_offdiag + 1, 0]), initial=0.0) <= EIGEN_OP_TOL
    dev = dev_probe = 0.0
    probe_value = float("nan")
    basis = operator_basis(d)
    for s in range(samples):
        rho = _family_state(d, idx, rng)
        c_in = coherence.c_l1(rho).value
        c_out = coherence.c_l1(channel(rho)).value
        if c_in > 1e-12:
            dev = max(dev, abs(c_out - abs(q) * c_in) / c_in)
        # probe state along the same Bloch direction, scaled to unit l1 coherence
        x = coordinates(rho)
        x[0] = 0.0
        n = x / np.linalg.norm(x)
        pair_norm = sum(np.hypot(n[2 * r + 1], n[2 * r + 2]) for r in range((d * d - d) // 2))
        if pair_norm > 1e-12:
            chi_p = 1.0 / pair_norm
            probe = np.eye(d) / d + 0.5 * chi_p * sum(n[k] * basis[k] for k in range(1, d * d))
            # the probe need not be positive; only the linear l1 functional is used
            pv = _offdiag_l1(channel(probe))
            if s == 0:
                probe_value = pv
            if probe_ok and c_out > 1e-12:
                dev_probe = max(dev_probe, abs(c_out - c_in * pv) / c_out)
    return FactorizationReport(q=q, indices=idx, probe_value=probe_value, max_rel_deviation=float(dev),
                               max_rel_deviation_probe=float(dev_probe) if probe_ok else float("nan"),
                               samples=samples)


# ---------------------------------------------------------------------------
# coherence-breaking index
# ---------------------------------------------------------------------------

class _Unbounded:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Unbounded"

    def __str__(self):
        return "Unbounded"


UNBOUNDED = _Unbounded()


def coherence_breaking_index(channel: KrausChannel, cap: int = 32):
    """Smallest ``n`` with ``E^n`` coherence breaking, or :data:`UNBOUNDED` if none up to ``cap``.

    Powers are formed by Kraus products, pruned below Frobenius norm 1e-12
    and compressed to a minimal Kraus set after each step.
    """
    if not channel.endomorphic:
        raise DimensionMismatch("breaking index needs an endomorphic channel")
    power = channel
    for n in range(1, cap + 1):
        if _output_always_diagonal(power, CLASSIFY_TOL):
            return n
        power = channel.compose(power)
    return UNBOUNDED


# ---------------------------------------------------------------------------
# cohering and decohering power
# ---------------------------------------------------------------------------

CP_KINDS = ("l1", "rel_entropy")


def _measure(kind):
    if kind == "l1":
        return lambda r: coherence.c_l1(r).value
    if kind == "rel_entropy":
        return lambda r: coherence.c_rel_entropy(r).value
    raise ParamOutOfRange(f"measure_kind must be one of {CP_KINDS}")


def _unitary_of(channel: KrausChannel):
    """The unitary behind a rank-one channel, or ``None``."""
    if len(channel.kraus_ops) == 1:
        return channel.kraus_ops[0]
    if channel.kraus_rank() == 1:
        return channel.canonical().kraus_ops[0]
    return None


def cohering_power_unitary(U, measure_kind: str = "l1") -> float:
    """``||U||_{1->1}^2 - 1`` (l1) or the largest column Shannon entropy (relative entropy)."""
    U = qcore.validate_unitary(U)
    if measure_kind == "l1":
        return float(np.max(np.sum(np.abs(U), axis=0)) ** 2 - 1.0)
    if measure_kind == "rel_entropy":
        return float(max(qcore.shannon_entropy(np.abs(U[:, j]) ** 2) for j in range(U.shape[1])))
    raise ParamOutOfRange(f"measure_kind must be one of {CP_KINDS}")


def cohering_power(channel: KrausChannel, measure_kind: str = "l1") -> float:
    """``CP = max_k C(E(|k><k|))`` over the incoherent basis states.

    Unitary channels are also evaluated in closed form; the two values must
    agree to 1e-10.
    """
    C = _measure(measure_kind)
    d = channel.dim_in
    vals = []
    for k in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[k, k] = 1.0
        vals.append(C(channel(e)))
    value = float(max(vals))
    U = _unitary_of(channel)
    if U is not None:
        closed = cohering_power_unitary(U, measure_kind)
        if abs(closed - value) > 1e-10:
            raise BoundViolation(f"cohering power closed form {closed} differs from basis maximum {value}")
    return value


def _mcs_batch(phases):
    """Maximally coherent pure states ``sum_j e^{i phi_j}|j>/sqrt(d)`` with ``phi_0 = 0``."""
    n, m = phases.shape
    full = np.concatenate([np.zeros((n, 1)), phases], axis=1)
    return np.exp(1j * full) / np.sqrt(m + 1)


def _coherence_batch(kind, rhos):
    if kind == "l1":
        return np.sum(np.abs(rhos), axis=(1, 2)) - np.real(np.einsum("nii->n", rhos))
    diag = np.clip(np.real(np.einsum("nii->ni", rhos)), 0.0, None)
    w = np.clip(np.linalg.eigvalsh(rhos), 0.0, None)

    def h(p):
        nz = p > 0
        return -np.sum(np.where(nz, p * np.log2(np.where(nz, p, 1.0)), 0.0), axis=1)

    return h(diag) - h(w)


def decohering_power(channel: KrausChannel, measure_kind: str = "l1", grid: int = 32) -> float:
    """``DP = C_max - min_{mcs} C(E(mcs))`` over maximally coherent pure states.

    The free phases (``d - 1`` of them) are scanned on a ``grid``-point grid
    each, and the best grid points are refined with Nelder-Mead. The result
    is accurate to about 1e-4 for ``d <= 4`` (an upper envelope on the
    minimum, hence a lower envelope on DP).
    """
    _measure(measure_kind)
    d = channel.dim_in
    c_max = float(d - 1) if measure_kind == "l1" else float(np.log2(d))
    ops = np.array(channel.kraus_ops)

    def f(phases):
        psi = _mcs_batch(np.atleast_2d(phases))
        kpsi = np.einsum("kab,nb->nka", ops, psi)
        rhos = np.einsum("nka,nkb->nab", kpsi, kpsi.conj())
        return _coherence_batch(measure_kind, rhos)

    if d == 1:
        return 0.0
    axes = [np.linspace(0.0, 2 * np.pi, grid, endpoint=False)] * (d - 1)
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d - 1)
    vals = np.concatenate([f(pts[s:s + 50000]) for s in range(0, len(pts), 50000)])
    best = float(np.min(vals))
    for i in np.argsort(vals)[:4]:
        res = minimize(lambda p: float(f(p)[0]), pts[i], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 2000})
        best = min(best, float(res.fun))
    return float(c_max - best)


def average_cohering_power_unitary(U) -> float:
    """``(1/(d+1)) (1 - (1/d) sum_ij |U_ij|^4)``, the Haar-averaged ``l2`` coherence generated from dephased inputs."""
    U = qcore.validate_unitary(U)
    d = U.shape[0]
    return float((1.0 - np.sum(np.abs(U) ** 4) / d) / (d + 1))


def average_cohering_power_unital(channel: KrausChannel) -> float:
    """``(1/(d(d+1))) sum_{i, l != m} |sum_k (A_k)_{li} (A_k)^*_{mi}|^2`` for unital channels."""
    d = channel.dim_in
    if np.max(np.abs(channel(np.eye(d) / d) - np.eye(d) / d)) > CLASSIFY_TOL:
        raise NotApplicable("closed form holds for unital channels only")
    total = 0.0
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        out = channel(e)
        total += np.sum(np.abs(out) ** 2) - np.sum(np.abs(np.diag(out)) ** 2)
    return float(total / (d * (d + 1)))


# ---------------------------------------------------------------------------
# maximal attainable coherence
# ---------------------------------------------------------------------------

def _components(A, tol):
    d = A.shape[0]
    seen = [False] * d
    comps = []
    for s in range(d):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(d):
                if not seen[j] and A[i, j] > tol:
                    seen[j] = True
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def ssio_max_coherence(rho, basis=None, tol: float = 1e-10) -> tuple:
    """Maximal ``C_l1`` after a strictly incoherent selective operation.

    Returns ``(lambda_max(D^{-1/2}|rho|D^{-1/2}) - 1, p_max)`` with ``D`` the
    diagonal of ``rho`` and ``|rho|`` the entrywise modulus. For a reducible
    ``rho`` (block diagonal up to permutation) the success probability adds
    up over the blocks that reach the largest eigenvalue.

    Raises
    ------
    SingularDiagonal
        If a diagonal entry is below ``tol``.
    """
    b = qcore.resolve_basis(basis, np.asarray(rho).shape[0])
    r = b.to_basis(qcore.validate_density(rho))
    dg = np.real(np.diag(r))
    if np.min(dg) <= tol:
        raise SingularDiagonal("the diagonal of rho must be strictly positive")
    A = np.abs(r) / np.sqrt(np.outer(dg, dg))
    lam = np.linalg.eigvalsh(A)[-1]
    p_total = 0.0
    for comp in _components(np.abs(r), tol):
        blk = A[np.ix_(comp, comp)]
        w, v = np.linalg.eigh(blk)
        if w[-1] < lam - 1e-9:
            continue
        phi = np.abs(v[:, -1])
        p_alpha = float(np.sum(dg[comp]))
        p_total += p_alpha * float(np.min(dg[comp] / p_alpha / phi ** 2))
    return float(lam - 1.0), float(min(p_total, 1.0))


def ssio_optimal_kraus(rho, tol: float = 1e-10) -> np.ndarray:
    """The filtering operator ``K' = c diag(phi_i / sqrt(rho_ii))`` for an irreducible ``rho``.

    ``c = min_i sqrt(rho_ii)/phi_i``; ``K' rho K'^dag`` has trace ``p_max`` and
    its normalization reaches the maximal ``C_l1``.
    """
    r = qcore.validate_density(rho)
    dg = np.real(np.diag(r))
    if np.min(dg) <= tol:
        raise SingularDiagonal("the diagonal of rho must be strictly positive")
    if len(_components(np.abs(r), tol)) > 1:
        raise NotApplicable("state is reducible; use the block construction")
    A = np.abs(r) / np.sqrt(np.outer(dg, dg))
    phi = np.abs(np.linalg.eigh(A)[1][:, -1])
    c = float(np.min(np.sqrt(dg) / phi))
    # the phases of rho are undone so that the filtered state has nonnegative entries
    return c * np.diag(phi / np.sqrt(dg))


def thermal_state(H, T: float) -> np.ndarray:
    """``exp(-H/T)/Z`` for a diagonal Hamiltonian (``T = inf`` gives ``I/d``)."""
    E = _energies(H)
    if np.isinf(T):
        return np.eye(E.size) / E.size
    w = np.exp(-(E - E.min()) / T)
    return np.diag(w / w.sum())


def _energies(H) -> np.ndarray:
    H = np.asarray(H)
    if H.ndim == 1:
        return H.astype(float)
    if np.max(np.abs(H - np.diag(np.diag(H)))) > 1e-12:
        raise ValidationError("Hamiltonian must be diagonal in the reference basis")
    return np.real(np.diag(H)).astype(float)


def _mean_energy(E, T):
    if np.isinf(T):
        return float(E.mean())
    w = np.exp(-(E - E.min()) / T)
    return float(w @ E / w.sum())


def energy_bounded_max_coherence(H, T: float, delta_E: float, t_max: float = 1e6) -> float:
    """Upper bound ``S(rho^{T'}) - S(rho^T)`` on created relative-entropy coherence.

    ``T'`` solves ``<H>_{T'} - <H>_T = delta_E`` (bisection on ``[T, t_max]``).
    An energy budget at the infinite-temperature limit returns
    ``log2 d - S(rho^T)``.

    Raises
    ------
    NoSolution
        If ``delta_E`` exceeds the gap between ``<H>_T`` and the
        infinite-temperature energy.
    """
    if T <= 0:
        raise ParamOutOfRange("temperature must be positive")
    if delta_E < 0:
        raise ParamOutOfRange("energy budget must be nonnegative")
    E = _energies(H)
    e0 = _mean_energy(E, T)
    s0 = qcore.von_neumann_entropy(thermal_state(E, T))
    gap = _mean_energy(E, np.inf) - e0
    if delta_E > gap + 1e-12:
        raise NoSolution(f"energy budget {delta_E} exceeds the available gap {gap}")
    if delta_E == 0.0:
        return 0.0
    if delta_E >= _mean_energy(E, t_max) - e0:
        t_prime = np.inf
    else:
        t_prime = brentq(lambda t: _mean_energy(E, t) - e0 - delta_E, T, t_max, xtol=1e-14, rtol=1e-14,
                         maxiter=500)
    return float(qcore.von_neumann_entropy(thermal_state(E, t_prime)) - s0)
