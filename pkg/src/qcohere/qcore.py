"""Dense complex linear algebra, matrix functions, distances and entropies.

All functions are pure and take plain ``numpy`` arrays. Logarithms are base 2
unless a ``base`` argument says otherwise, and ``0 log 0`` is taken as 0.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionMismatch,
    NoConvergence,
    NotHermitian,
    NotPSD,
    ValidationError,
)

TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-9
EIG_CLAMP = 1e-9
SUPPORT_TOL = 1e-12
ROUNDING_FLOOR = 1e-14

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
I2 = np.eye(2, dtype=complex)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite complex 2-D array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def is_hermitian(m, tol: float = TOL_HERM) -> bool:
    a = np.asarray(m)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def validate_density(rho, tol_herm: float = TOL_HERM, tol_trace: float = TOL_TRACE,
                     tol_psd: float = TOL_PSD) -> np.ndarray:
    """Check that ``rho`` is a density matrix and return it as a complex array.

    Raises
    ------
    NotHermitian, NotPSD, ValidationError
    """
    a = as_matrix(rho)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"density matrix must be square, got {a.shape}")
    if not is_hermitian(a, tol_herm):
        raise NotHermitian("density matrix is not Hermitian within tolerance")
    tr = np.trace(a).real
    if abs(tr - 1.0) > tol_trace:
        raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
    a = 0.5 * (a + a.conj().T)
    lam_min = np.linalg.eigvalsh(a)[0]
    if lam_min < -tol_psd:
        raise NotPSD(f"smallest eigenvalue {lam_min:.3e} is below -{tol_psd:g}")
    return a


def validate_pure(psi, tol: float = 1e-10) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).ravel()
    n = np.linalg.norm(v)
    if abs(n - 1.0) > tol:
        raise ValidationError(f"state vector norm is {n!r}, expected 1")
    return v


def validate_unitary(u, tol: float = 1e-10) -> np.ndarray:
    from .exceptions import NotUnitary

    a = as_matrix(u)
    if a.shape[0] != a.shape[1]:
        raise NotUnitary("unitary must be square")
    if np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) > tol:
        raise NotUnitary("matrix is not unitary within tolerance")
    return a


# ---------------------------------------------------------------------------
# eigen-decomposition and matrix functions
# ---------------------------------------------------------------------------

def hermitian_eig(m, tol: float = TOL_HERM):
    """Eigen-decomposition of a Hermitian matrix with descending eigenvalues.

    Parameters
    ----------
    m : array_like
        Hermitian matrix.
    tol : float
        Maximal entrywise deviation ``|m - m^dagger|`` that is accepted.

    Returns
    -------
    w : ndarray
        Real eigenvalues sorted in descending order.
    v : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("eigen-decomposition needs a square matrix")
    if not is_hermitian(a, tol):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + a.conj().T)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    return w[::-1].copy(), v[:, ::-1].copy()


def clamp_eigenvalues(w, clamp: float = EIG_CLAMP) -> np.ndarray:
    """Set eigenvalues in ``(-clamp, 0)`` to zero (numerical PSD drift)."""
    w = np.array(w, dtype=float)
    w[(w < 0) & (w > -clamp)] = 0.0
    return w


def psd_function(m, fn) -> np.ndarray:
    """Apply ``fn`` to the clamped spectrum of a PSD Hermitian matrix."""
    w, v = hermitian_eig(m, tol=1e-8)
    w = np.maximum(clamp_eigenvalues(w), 0.0)
    # eigenvalues at rounding level would otherwise leak ~1e-8 into sqrt(rho)
    w[w < ROUNDING_FLOOR * max(1.0, float(w[0]))] = 0.0
    return (v * fn(w)) @ v.conj().T


def matrix_sqrt(rho) -> np.ndarray:
    """Positive square root of a PSD matrix (negative drift clamped to zero)."""
    return psd_function(rho, np.sqrt)


def matrix_power(rho, alpha: float) -> np.ndarray:
    """``rho**alpha`` for PSD ``rho``; zero eigenvalues stay zero."""

    def f(w):
        out = np.zeros_like(w)
        nz = w > 0
        out[nz] = w[nz] ** alpha
        return out

    return psd_function(rho, f)


def project_psd(m) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm (negative eigenvalues removed)."""
    w, v = hermitian_eig(m, tol=1e-8)
    return (v * np.maximum(w, 0.0)) @ v.conj().T


def singular_values(m) -> np.ndarray:
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def trace_norm(m) -> float:
    """Schatten 1-norm (sum of singular values)."""
    return float(np.sum(singular_values(m)))


def hs_norm(m) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(as_matrix(m), "fro"))


def operator_norm(m) -> float:
    return float(singular_values(m)[0])


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def dagger(m) -> np.ndarray:
    return np.asarray(m).conj().T


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def proj(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).ravel()
    return np.outer(v, v.conj())


def kron(*ops) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


# ---------------------------------------------------------------------------
# entropies and distances
# ---------------------------------------------------------------------------

def _log(x, base):
    return np.log(x) / np.log(base)


def shannon_entropy(p, base: float = 2.0) -> float:
    """Shannon entropy with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * _log(p, base)))


def binary_entropy(x: float, base: float = 2.0) -> float:
    x = float(np.clip(x, 0.0, 1.0))
    return shannon_entropy([x, 1.0 - x], base)


def eigvals_psd(rho) -> np.ndarray:
    """Clamped eigenvalues (descending) of a PSD Hermitian matrix."""
    a = as_matrix(rho)
    w = np.linalg.eigvalsh(0.5 * (a + a.conj().T))[::-1]
    return np.maximum(clamp_eigenvalues(w), 0.0)


def von_neumann_entropy(rho, base: float = 2.0) -> float:
    return shannon_entropy(eigvals_psd(rho), base)


def tsallis_entropy(rho, q: float) -> float:
    """Tsallis entropy ``(1 - tr rho^q)/(q - 1)``."""
    w = eigvals_psd(rho)
    w = w[w > 0]
    return float((1.0 - np.sum(w ** q)) / (q - 1.0))


def relative_entropy(rho, sigma, base: float = 2.0) -> float:
    """Quantum relative entropy ``S(rho || sigma)``; ``inf`` on support mismatch."""
    r = as_matrix(rho)
    s = as_matrix(sigma)
    wr, vr = hermitian_eig(r, tol=1e-8)
    ws, vs = hermitian_eig(s, tol=1e-8)
    wr = np.maximum(clamp_eigenvalues(wr), 0.0)
    ws = np.maximum(clamp_eigenvalues(ws), 0.0)
    # overlaps |<r_i|s_j>|^2
    ov = np.abs(vr.conj().T @ vs) ** 2
    pos_r = wr > SUPPORT_TOL
    zero_s = ws <= SUPPORT_TOL
    if np.any(ov[np.ix_(pos_r, zero_s)] * wr[pos_r, None] > SUPPORT_TOL):
        return float("inf")
    term1 = float(np.sum(wr[pos_r] * _log(wr[pos_r], base)))
    logs = np.zeros_like(ws)
    logs[~zero_s] = _log(ws[~zero_s], base)
    term2 = float(np.sum(wr[pos_r, None] * ov[pos_r][:, ~zero_s] * logs[None, ~zero_s]))
    return max(term1 - term2, 0.0)


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(tr |sqrt(rho) sqrt(sigma)|)^2`` in [0, 1]."""
    f = trace_norm(matrix_sqrt(rho) @ matrix_sqrt(sigma)) ** 2
    return float(min(max(f, 0.0), 1.0))


def root_fidelity(rho, sigma) -> float:
    return float(np.sqrt(fidelity(rho, sigma)))


def purity(rho) -> float:
    a = as_matrix(rho)
    return float(np.real(np.trace(a @ a)))


def linear_entropy(rho) -> float:
    return 1.0 - purity(rho)


# ---------------------------------------------------------------------------
# reference bases and dephasing
# ---------------------------------------------------------------------------

class ReferenceBasis:
    """Orthonormal basis fixing the incoherent set.

    The basis vectors are stored as the columns of a unitary matrix.

    Parameters
    ----------
    vectors : array_like, optional
        Either a unitary matrix whose columns are the basis vectors or a
        sequence of vectors. ``None`` means the computational basis of ``dim``.
    dim : int, optional
        Dimension, required when ``vectors`` is ``None``.
    """

    def __init__(self, vectors=None, dim: int | None = None, tol: float = 1e-10):
        if vectors is None:
            if dim is None:
                raise ValueError("either vectors or dim must be given")
            self.matrix = np.eye(dim, dtype=complex)
            self.is_standard = True
        else:
            m = np.asarray(vectors, dtype=complex)
            if m.ndim == 2 and isinstance(vectors, (list, tuple)):
                m = m.T  # list of vectors -> columns
            m = as_matrix(m)
            if m.shape[0] != m.shape[1]:
                raise DimensionMismatch("basis must contain dim vectors of length dim")
            gram = m.conj().T @ m
            if np.max(np.abs(gram - np.eye(m.shape[0]))) > tol:
                raise ValidationError("basis vectors are not orthonormal within tolerance")
            self.matrix = m
            self.is_standard = bool(np.allclose(m, np.eye(m.shape[0]), atol=0, rtol=0))
        self.dim = self.matrix.shape[0]

    @classmethod
    def standard(cls, dim: int) -> ReferenceBasis:
        return cls(dim=dim)

    @property
    def vectors(self) -> list:
        return [self.matrix[:, i].copy() for i in range(self.dim)]

    def to_basis(self, rho) -> np.ndarray:
        """Matrix elements ``<i|rho|j>`` in this basis."""
        if self.is_standard:
            return np.asarray(rho, dtype=complex)
        return self.matrix.conj().T @ rho @ self.matrix

    def from_basis(self, m) -> np.ndarray:
        if self.is_standard:
            return np.asarray(m, dtype=complex)
        return self.matrix @ m @ self.matrix.conj().T


def resolve_basis(basis, dim: int) -> ReferenceBasis:
    if basis is None:
        return ReferenceBasis.standard(dim)
    if not isinstance(basis, ReferenceBasis):
        basis = ReferenceBasis(basis)
    if basis.dim != dim:
        raise DimensionMismatch(f"basis dimension {basis.dim} does not match state dimension {dim}")
    return basis


def dephase(rho, basis=None) -> np.ndarray:
    """Full dephasing ``Delta(rho)`` in the given basis (returned in the lab frame)."""
    a = as_matrix(rho)
    b = resolve_basis(basis, a.shape[0])
    inb = b.to_basis(a)
    return b.from_basis(np.diag(np.diag(inb)))


# ---------------------------------------------------------------------------
# subsystems
# ---------------------------------------------------------------------------

def _check_dims(n: int, dims: Sequence[int]):
    if int(np.prod(dims)) != n:
        raise DimensionMismatch(f"dims {tuple(dims)} do not multiply to {n}")


def partial_trace(rho, dims: Sequence[int], keep="A") -> np.ndarray:
    """Partial trace over the subsystems not listed in ``keep``.

    Parameters
    ----------
    rho : array_like
        Operator on the tensor product of spaces with dimensions ``dims``.
    dims : sequence of int
        Subsystem dimensions.
    keep : {"A", "B"} or iterable of int
        Subsystems to keep. ``"A"``/``"B"`` refer to the first/second factor
        of a bipartite split.
    """
    a = as_matrix(rho)
    dims = [int(d) for d in dims]
    _check_dims(a.shape[0], dims)
    if isinstance(keep, str):
        if keep.upper() == "A":
            keep_idx = [0]
        elif keep.upper() == "B":
            keep_idx = [1]
        else:
            raise ValueError("keep must be 'A', 'B' or a list of subsystem indices")
    else:
        keep_idx = sorted(int(k) for k in keep)
    n = len(dims)
    t = a.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep_idx]
    # trace out from the highest index so the remaining axis numbers stay valid
    cur = n
    for i in sorted(traced, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + cur)
        cur -= 1
    dk = int(np.prod([dims[i] for i in keep_idx])) if keep_idx else 1
    return t.reshape(dk, dk)


def partial_transpose(rho, dims: Sequence[int], sys: int = 0) -> np.ndarray:
    a = as_matrix(rho)
    dims = [int(d) for d in dims]
    _check_dims(a.shape[0], dims)
    n = len(dims)
    t = a.reshape(dims + dims)
    perm = list(range(2 * n))
    perm[sys], perm[sys + n] = perm[sys + n], perm[sys]
    return t.transpose(perm).reshape(a.shape)


def negativity(rho, dims: Sequence[int] = (2, 2), sys: int = 0) -> float:
    """Entanglement negativity ``(||rho^{T_A}||_1 - 1)/2``."""
    w = np.linalg.eigvalsh(partial_transpose(rho, dims, sys))
    return float(max(-np.sum(w[w < 0]), 0.0))


def swap_subsystems(rho, dims: Sequence[int]) -> np.ndarray:
    """Reorder a bipartite operator from A (x) B to B (x) A."""
    da, db = dims
    t = as_matrix(rho).reshape(da, db, da, db)
    return t.transpose(1, 0, 3, 2).reshape(da * db, da * db)


def apply_local(rho, op, dims: Sequence[int], sys: int) -> np.ndarray:
    """Conjugate ``rho`` by ``op`` acting on subsystem ``sys``."""
    mats = [np.eye(d) for d in dims]
    mats[sys] = op
    full = kron(*mats)
    return full @ rho @ full.conj().T


def mutual_information(rho, dims: Sequence[int]) -> float:
    return (von_neumann_entropy(partial_trace(rho, dims, "A"))
            + von_neumann_entropy(partial_trace(rho, dims, "B"))
            - von_neumann_entropy(rho))


def schmidt_coefficients(psi, dims: Sequence[int]) -> np.ndarray:
    """Schmidt coefficients (amplitudes, descending) of a bipartite pure state."""
    v = np.asarray(psi, dtype=complex).ravel()
    return np.linalg.svd(v.reshape(dims[0], dims[1]), compute_uv=False)


def pure_state_of(rho, tol: float = 1e-9):
    """Return the state vector of a rank-one density matrix, else ``None``."""
    w, v = hermitian_eig(rho, tol=1e-8)
    if w[0] >= 1.0 - tol and (len(w) == 1 or abs(w[1]) <= tol):
        return v[:, 0]
    return None


# ---------------------------------------------------------------------------
# operator bases and Bloch representation
# ---------------------------------------------------------------------------

def gell_mann(d: int) -> list:
    """Generalized Gell-Mann matrices in the order u_12, v_12, ..., u_{d-1,d}, v_{d-1,d}, w_1..w_{d-1}.

    Each matrix is Hermitian, traceless and has ``tr X^2 = 2``; for ``d = 2``
    the list is ``[sigma_x, sigma_y, sigma_z]``.
    """
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            u = np.zeros((d, d), dtype=complex)
            u[j, k] = u[k, j] = 1.0
            v = np.zeros((d, d), dtype=complex)
            v[j, k] = -1j
            v[k, j] = 1j
            mats.extend([u, v])
    for l in range(1, d):
        w = np.zeros((d, d), dtype=complex)
        for j in range(l):
            w[j, j] = 1.0
        w[l, l] = -l
        mats.append(np.sqrt(2.0 / (l * (l + 1))) * w)
    return mats


def orthonormal_operator_basis(d: int) -> list:
    """``[I/sqrt(d)] + [X/sqrt(2) for X in gell_mann(d)]`` (HS-orthonormal)."""
    return [np.eye(d, dtype=complex) / np.sqrt(d)] + [g / np.sqrt(2.0) for g in gell_mann(d)]


def correlation_tensor(rho, dims: Sequence[int]) -> np.ndarray:
    """Coefficients ``r_ij = tr[rho (X_i (x) Y_j)]`` in orthonormal operator bases.

    Row and column 0 correspond to the normalized identities.
    """
    da, db = dims
    a = as_matrix(rho)
    _check_dims(a.shape[0], dims)
    xa = np.array(orthonormal_operator_basis(da))
    yb = np.array(orthonormal_operator_basis(db))
    t = a.reshape(da, db, da, db)
    # tr[rho (X (x) Y)] = sum rho[a b, c d] X[c, a] Y[d, b]
    return np.real(np.einsum("abcd,ica,jdb->ij", t, xa, yb))


@dataclass(frozen=True)
class BlochDecomposition2Q:
    """Two-qubit state ``(I + x.sigma (x) I + I (x) y.sigma + sum r_ij sigma_i (x) sigma_j)/4``."""

    x: np.ndarray
    y: np.ndarray
    R: np.ndarray

    def to_density(self) -> np.ndarray:
        rho = np.eye(4, dtype=complex)
        for i in range(3):
            rho = rho + self.x[i] * np.kron(PAULIS[i], I2)
            rho = rho + self.y[i] * np.kron(I2, PAULIS[i])
            for j in range(3):
                rho = rho + self.R[i, j] * np.kron(PAULIS[i], PAULIS[j])
        return rho / 4.0


def bloch_decompose_2q(rho) -> BlochDecomposition2Q:
    a = as_matrix(rho)
    if a.shape != (4, 4):
        raise DimensionMismatch("two-qubit Bloch decomposition needs a 4x4 matrix")
    x = np.array([np.real(np.trace(a @ np.kron(s, I2))) for s in PAULIS])
    y = np.array([np.real(np.trace(a @ np.kron(I2, s))) for s in PAULIS])
    r = np.array([[np.real(np.trace(a @ np.kron(si, sj))) for sj in PAULIS] for si in PAULIS])
    return BlochDecomposition2Q(x, y, r)


def bloch_vector(rho) -> np.ndarray:
    """Qubit Bloch vector ``(tr rho sigma_x, tr rho sigma_y, tr rho sigma_z)``."""
    a = as_matrix(rho)
    if a.shape != (2, 2):
        raise DimensionMismatch("Bloch vector needs a qubit")
    return np.array([np.real(np.trace(a @ s)) for s in PAULIS])


def qubit_from_bloch(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return 0.5 * (I2 + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z)


def sigma_dot(n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


def unit_vector(theta: float, phi: float) -> np.ndarray:
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def angles_of(n) -> tuple:
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    theta = float(np.arccos(np.clip(n[2], -1.0, 1.0)))
    phi = float(np.mod(np.arctan2(n[1], n[0]), 2 * np.pi))
    return theta, phi


# ---------------------------------------------------------------------------
# random matrices
# ---------------------------------------------------------------------------

def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with phase fix."""
    rng = make_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph[None, :]


def random_hermitian(d: int, seed=None) -> np.ndarray:
    rng = make_rng(seed)
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (z + z.conj().T)


def iter_pairs(n: int) -> Iterable[tuple]:
    for i in range(n):
        for j in range(i + 1, n):
            yield i, j
