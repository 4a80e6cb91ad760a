"""Canonical state families, seeded random sampling and class recognizers."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import qcore
from .exceptions import DimensionMismatch, NotPSD, ParamOutOfRange, ValidationError

PSD_EIG_TOL = 1e-12
RECOGNIZE_TOL = 1e-10

BELL_PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
BELL_PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)
BELL_PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
BELL_PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class BellDiagonalParams:
    """Correlation triple of a Bell-diagonal two-qubit state.

    The state is ``(I + sum_i c_i sigma_i (x) sigma_i)/4``.
    """

    c1: float
    c2: float
    c3: float

    @property
    def c(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3], dtype=float)

    @property
    def eigenvalues(self) -> np.ndarray:
        """Spectrum ``(l1, l2, l3, l4)``.

        They belong to the Bell vectors ``Phi-, Phi+, Psi+, Psi-`` in that order.
        """
        c1, c2, c3 = self.c1, self.c2, self.c3
        return np.array([
            (1 - c1 + c2 + c3) / 4,
            (1 + c1 - c2 + c3) / 4,
            (1 + c1 + c2 - c3) / 4,
            (1 - c1 - c2 - c3) / 4,
        ])

    def is_valid(self, tol: float = PSD_EIG_TOL) -> bool:
        return bool(np.all(self.eigenvalues >= -tol))

    def validate(self) -> BellDiagonalParams:
        lam = self.eigenvalues
        if np.min(lam) < -PSD_EIG_TOL:
            raise NotPSD(f"triple {tuple(self.c)} gives eigenvalue {np.min(lam):.4g} < 0")
        return self

    @classmethod
    def from_eigenvalues(cls, lam) -> BellDiagonalParams:
        """Inverse of :attr:`eigenvalues`."""
        l1, l2, l3, l4 = (float(v) for v in lam)
        c1 = l2 + l3 - l1 - l4
        c2 = l1 + l3 - l2 - l4
        c3 = l1 + l2 - l3 - l4
        return cls(c1, c2, c3)


def _as_bell(p) -> BellDiagonalParams:
    if isinstance(p, BellDiagonalParams):
        return p
    c = np.asarray(p, dtype=float).ravel()
    if c.size != 3:
        raise ValidationError("Bell-diagonal triple must have three entries")
    return BellDiagonalParams(*map(float, c))


def bell_diagonal(p) -> np.ndarray:
    """Bell-diagonal state ``(I + sum c_i sigma_i (x) sigma_i)/4``.

    Parameters
    ----------
    p : BellDiagonalParams or sequence of 3 floats

    Raises
    ------
    NotPSD
        If the triple lies outside the tetrahedron of valid states.
    """
    p = _as_bell(p).validate()
    rho = np.eye(4, dtype=complex)
    for ci, s in zip(p.c, qcore.PAULIS):
        rho = rho + ci * np.kron(s, s)
    return rho / 4.0


def _check_range(name, x, lo, hi):
    if not (lo - 1e-12 <= x <= hi + 1e-12):
        raise ParamOutOfRange(f"{name}={x} outside [{lo}, {hi}]")


def _check_dim(d):
    if int(d) != d or d < 2:
        raise ParamOutOfRange(f"dimension must be an integer >= 2, got {d}")
    return int(d)


def swap_operator(d: int) -> np.ndarray:
    """``sum_ij |ij><ji|`` on ``C^d (x) C^d``."""
    f = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def max_entangled(d: int) -> np.ndarray:
    """``sum_i |ii> / sqrt(d)``."""
    v = np.zeros(d * d, dtype=complex)
    v[[i * d + i for i in range(d)]] = 1.0
    return v / np.sqrt(d)


def werner(x: float, d: int = 2) -> np.ndarray:
    """Werner state with ``x = tr(rho F)`` for the swap ``F``, ``x in [-1, 1]``."""
    d = _check_dim(d)
    _check_range("x", x, -1.0, 1.0)
    norm = d ** 3 - d
    return ((d - x) / norm) * np.eye(d * d, dtype=complex) + ((d * x - 1) / norm) * swap_operator(d)


def isotropic(x: float, d: int = 2) -> np.ndarray:
    """Isotropic state with fidelity ``x`` to the maximally entangled state, ``x in [0, 1]``."""
    d = _check_dim(d)
    _check_range("x", x, 0.0, 1.0)
    phi = qcore.proj(max_entangled(d)) * d  # sum_ij |ii><jj|
    return ((1 - x) / (d * d - 1)) * np.eye(d * d, dtype=complex) + ((d * d * x - 1) / (d ** 3 - d)) * phi


@dataclass(frozen=True)
class XStateParams:
    """Two-qubit X-state: diagonal ``(r11, r22, r33, r44)`` and anti-diagonal ``r14, r23``."""

    diagonal: tuple
    rho14: complex = 0.0
    rho23: complex = 0.0

    def validate(self) -> XStateParams:
        dg = np.asarray(self.diagonal, dtype=float)
        if dg.size != 4:
            raise ValidationError("X-state diagonal needs four entries")
        if abs(dg.sum() - 1.0) > 1e-10:
            raise ValidationError("X-state diagonal must sum to 1")
        if np.any(dg < -PSD_EIG_TOL):
            raise NotPSD("X-state diagonal has negative entries")
        if abs(self.rho14) > np.sqrt(max(dg[0] * dg[3], 0.0)) + 1e-12:
            raise NotPSD("|rho14| exceeds sqrt(rho11 rho44)")
        if abs(self.rho23) > np.sqrt(max(dg[1] * dg[2], 0.0)) + 1e-12:
            raise NotPSD("|rho23| exceeds sqrt(rho22 rho33)")
        return self


def x_state(p: XStateParams) -> np.ndarray:
    p.validate()
    rho = np.diag(np.asarray(p.diagonal, dtype=complex))
    rho[0, 3] = p.rho14
    rho[3, 0] = np.conj(p.rho14)
    rho[1, 2] = p.rho23
    rho[2, 1] = np.conj(p.rho23)
    return rho


def x_params(rho) -> XStateParams:
    """Extract :class:`XStateParams` from an X-shaped two-qubit matrix."""
    if not is_x_state(rho):
        raise ValidationError("matrix is not an X-state")
    r = np.asarray(rho, dtype=complex)
    return XStateParams(tuple(np.real(np.diag(r))), complex(r[0, 3]), complex(r[1, 2]))


def maximally_coherent(d: int) -> np.ndarray:
    """``|Psi_d> = sum_i |i>/sqrt(d)``."""
    d = int(d)
    if d < 1:
        raise ParamOutOfRange("dimension must be positive")
    return np.full(d, 1.0 / np.sqrt(d), dtype=complex)


def mcms(p: float, d: int) -> np.ndarray:
    """Maximally coherent mixed state ``(1-p) I/d + p |Psi_d><Psi_d|``."""
    _check_range("p", p, 0.0, 1.0)
    d = int(d)
    return (1 - p) * np.eye(d, dtype=complex) / d + p * qcore.proj(maximally_coherent(d))


def product(*rhos) -> np.ndarray:
    return qcore.kron(*rhos)


def random_pure(d: int, seed=None) -> np.ndarray:
    """Haar-random pure state from ``d`` complex standard normals."""
    if d < 1:
        raise ParamOutOfRange("dimension must be positive")
    rng = qcore.make_rng(seed)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_density(d: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Random density matrix ``G G^dagger / tr(G G^dagger)`` with ``G`` a ``d x rank`` Ginibre matrix."""
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise ParamOutOfRange(f"rank must be in [1, {d}], got {rank}")
    rng = qcore.make_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_bell_params(seed=None, n: int | None = None):
    """Uniform sample(s) from the tetrahedron of valid Bell-diagonal triples."""
    rng = qcore.make_rng(seed)
    m = 1 if n is None else n
    lam = rng.dirichlet(np.ones(4), size=m)
    out = [BellDiagonalParams.from_eigenvalues(l) for l in lam]
    return out[0] if n is None else out


def random_x_state(seed=None) -> np.ndarray:
    """Random X-state with uniformly drawn diagonal and admissible complex coherences."""
    rng = qcore.make_rng(seed)
    dg = rng.dirichlet(np.ones(4))
    a = np.sqrt(dg[0] * dg[3]) * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    b = np.sqrt(dg[1] * dg[2]) * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    return x_state(XStateParams(tuple(dg), a, b))


def random_diagonal(d: int, seed=None) -> np.ndarray:
    rng = qcore.make_rng(seed)
    return np.diag(rng.dirichlet(np.ones(d))).astype(complex)


def is_x_state(rho, tol: float = RECOGNIZE_TOL) -> bool:
    r = np.asarray(rho)
    if r.shape != (4, 4):
        raise DimensionMismatch("X-state recognition needs a two-qubit matrix")
    mask = np.ones((4, 4), dtype=bool)
    for i in range(4):
        mask[i, i] = False
        mask[i, 3 - i] = False
    return bool(np.max(np.abs(r[mask])) <= tol)


def is_bell_diagonal(rho, tol: float = RECOGNIZE_TOL):
    """Return the :class:`BellDiagonalParams` of ``rho`` or ``None``."""
    r = np.asarray(rho)
    if r.shape != (4, 4):
        raise DimensionMismatch("Bell-diagonal recognition needs a two-qubit matrix")
    b = qcore.bloch_decompose_2q(r)
    off = b.R - np.diag(np.diag(b.R))
    if max(np.max(np.abs(b.x)), np.max(np.abs(b.y)), np.max(np.abs(off))) > tol:
        return None
    # the Bloch coefficients reconstruct rho only if rho is Hermitian with unit trace
    if np.max(np.abs(b.to_density() - r)) > tol:
        return None
    return BellDiagonalParams(*map(float, np.diag(b.R)))


def is_diagonal(rho, tol: float = 1e-12) -> bool:
    r = np.asarray(rho)
    return bool(np.max(np.abs(r - np.diag(np.diag(r))), initial=0.0) <= tol)


# ---------------------------------------------------------------------------
# JSON I/O
# ---------------------------------------------------------------------------

def matrix_to_json(m) -> dict:
    a = np.asarray(m, dtype=complex)
    return {"dim": int(a.shape[0]), "re": a.real.ravel().tolist(), "im": a.imag.ravel().tolist()}


def matrix_from_json(obj) -> np.ndarray:
    try:
        d = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros(d * d)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix JSON: {exc}") from exc
    if re.size != d * d or im.size != d * d:
        raise DimensionMismatch(f"matrix JSON has {re.size} entries, expected {d * d}")
    return (re + 1j * im).reshape(d, d)


def state_to_json(rho) -> str:
    return json.dumps(matrix_to_json(rho))


def state_from_json(text: str) -> np.ndarray:
    """Parse the JSON state format and validate the result as a density matrix."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from exc
    return qcore.validate_density(matrix_from_json(obj))
