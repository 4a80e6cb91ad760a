import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcohere import qcore, states
from qcohere.exceptions import DimensionMismatch, NotHermitian, NotPSD, ValidationError

seeds = st.integers(min_value=0, max_value=2 ** 31 - 1)


def test_hermitian_eig_reconstructs():
    m = qcore.random_hermitian(8, seed=7)
    w, v = qcore.hermitian_eig(m)
    assert np.all(np.diff(w) <= 0)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, m, atol=1e-9)
    assert np.allclose(v.conj().T @ v, np.eye(8), atol=1e-10)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        qcore.hermitian_eig(np.array([[0, 1], [0, 0]]))


def test_matrix_sqrt_bell_diagonal():
    rho = states.bell_diagonal((0.5, 0.3, 0.1))
    s = qcore.matrix_sqrt(rho)
    assert np.allclose(s @ s, rho, atol=1e-8)


def test_partial_trace_werner():
    rho = states.werner(0.5, 2)
    assert np.allclose(qcore.partial_trace(rho, (2, 2), keep="A"), np.eye(2) / 2, atol=1e-12)
    assert np.allclose(qcore.partial_trace(rho, (2, 2), keep="B"), np.eye(2) / 2, atol=1e-12)


def test_partial_trace_against_direct_sum():
    rho = states.random_density(6, seed=4)
    t = rho.reshape(2, 3, 2, 3)
    assert np.allclose(qcore.partial_trace(rho, (2, 3), keep="A"), np.einsum("ijkj->ik", t))
    assert np.allclose(qcore.partial_trace(rho, (2, 3), keep="B"), np.einsum("ijil->jl", t))


def test_trace_norm_qubit_offdiagonal():
    rho = states.random_density(2, seed=3)
    assert abs(qcore.trace_norm(rho - qcore.dephase(rho)) - 2 * abs(rho[0, 1])) < 1e-10


def test_relative_entropy_to_maximally_mixed():
    plus = qcore.proj(states.maximally_coherent(2))
    assert abs(qcore.relative_entropy(plus, np.eye(2) / 2) - 1.0) < 1e-12
    assert qcore.relative_entropy(np.eye(2) / 2, np.diag([1.0, 0.0])) == np.inf


def test_dephase_random_qutrit():
    rho = states.random_density(3, seed=5)
    out = qcore.dephase(rho)
    assert np.allclose(out, np.diag(np.diag(rho)), atol=1e-12)


def test_dephase_in_rotated_basis():
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    plus = qcore.proj(states.maximally_coherent(2))
    assert np.allclose(qcore.dephase(plus, qcore.ReferenceBasis(H)), plus, atol=1e-12)


def test_bloch_decompose_bell_and_phi_plus():
    d = qcore.bloch_decompose_2q(states.bell_diagonal((0.5, -0.3, 0.1)))
    assert np.allclose(d.x, 0) and np.allclose(d.y, 0)
    assert np.allclose(d.R, np.diag([0.5, -0.3, 0.1]))
    d = qcore.bloch_decompose_2q(qcore.proj(states.BELL_PHI_PLUS))
    assert np.allclose(d.R, np.diag([1, -1, 1]))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_bloch_roundtrip(seed):
    rho = states.random_density(4, seed=seed)
    assert np.allclose(qcore.bloch_decompose_2q(rho).to_density(), rho, atol=1e-10)


def test_validate_density_errors():
    with pytest.raises(NotPSD):
        qcore.validate_density(np.diag([1.5, -0.5]))
    with pytest.raises(ValidationError):
        qcore.validate_density(np.eye(2))
    with pytest.raises(NotHermitian):
        qcore.validate_density(np.array([[0.5, 0.3], [0.0, 0.5]]))
    with pytest.raises(DimensionMismatch):
        qcore.validate_density(np.ones((2, 3)) / 2)


def test_entropies():
    assert abs(qcore.von_neumann_entropy(np.eye(4) / 4) - 2.0) < 1e-12
    assert abs(qcore.binary_entropy(0.5) - 1.0) < 1e-15
    assert qcore.binary_entropy(0.0) == 0.0
    assert abs(qcore.shannon_entropy([0.5, 0.25, 0.25]) - 1.5) < 1e-15


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_fidelity_properties(seed):
    rho = states.random_density(3, seed=seed)
    sigma = states.random_density(3, seed=seed + 1)
    f = qcore.fidelity(rho, sigma)
    assert -1e-12 <= f <= 1 + 1e-12
    assert abs(f - qcore.fidelity(sigma, rho)) < 1e-8
    assert abs(qcore.fidelity(rho, rho) - 1) < 1e-8


def test_gell_mann_orthogonality():
    for d in (2, 3, 4):
        ops = [np.sqrt(2 / d) * np.eye(d)] + qcore.gell_mann(d)
        gram = np.array([[np.trace(a @ b).real for b in ops] for a in ops])
        assert np.allclose(gram, 2 * np.eye(d * d), atol=1e-12)


def test_partial_transpose_negativity():
    assert abs(qcore.negativity(qcore.proj(states.BELL_PHI_PLUS)) - 0.5) < 1e-12
    assert abs(qcore.negativity(np.eye(4) / 4)) < 1e-12


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_random_unitary_is_unitary(seed):
    u = qcore.random_unitary(4, seed=seed)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-10)


def test_schmidt_coefficients():
    psi = np.sqrt(0.7) * np.kron([1, 0], [1, 0]) + np.sqrt(0.3) * np.kron([0, 1], [0, 1])
    assert np.allclose(np.sort(qcore.schmidt_coefficients(psi, (2, 2))) ** 2, [0.3, 0.7])
